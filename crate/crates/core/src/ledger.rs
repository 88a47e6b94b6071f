//! Budgeted evaluation history and the high-cost view over it.

use thiserror::Error;

use crate::geometry::PointSet;
use crate::problem::Problem;

/// The budget was already spent; nothing was evaluated.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("evaluation budget of {budget} exhausted")]
pub struct Exhausted {
    pub budget: usize,
}

/// Append-only record of every objective evaluation made by one search.
///
/// All evaluations, including seeds, candidate centres and repeated points,
/// are counted against the budget. Nothing is cached.
#[derive(Debug, Clone)]
pub struct EvaluationLedger {
    points: PointSet,
    values: Vec<f64>,
    budget: usize,
}

impl EvaluationLedger {
    /// # Panics
    /// If `budget` is zero.
    pub fn new(dim: usize, budget: usize) -> Self {
        assert!(budget > 0, "budget must be positive");
        Self {
            points: PointSet::with_capacity(dim, budget.min(1 << 16)),
            values: Vec::with_capacity(budget.min(1 << 16)),
            budget,
        }
    }

    /// Evaluates `x`, records it, and returns `f(x)`, or [`Exhausted`] if the
    /// budget is already used up.
    pub fn evaluate(&mut self, problem: &Problem, x: &[f64]) -> Result<f64, Exhausted> {
        if self.values.len() >= self.budget {
            return Err(Exhausted {
                budget: self.budget,
            });
        }
        let value = problem.value(x);
        self.points.push(x);
        self.values.push(value);
        Ok(value)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn evaluations_used(&self) -> usize {
        self.values.len()
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.values.len()
    }

    pub fn is_exhausted(&self) -> bool {
        self.values.len() >= self.budget
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.get(i)
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }
}

/// Indices of ledger entries whose value is at least the threshold `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HighCostSet {
    members: Vec<usize>,
    threshold: f64,
}

impl HighCostSet {
    pub fn from_ledger(ledger: &EvaluationLedger, threshold: f64) -> Self {
        let members = ledger
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= threshold)
            .map(|(i, _)| i)
            .collect();
        Self { members, threshold }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Gathers the member coordinates into a contiguous point set.
    pub fn points(&self, ledger: &EvaluationLedger) -> PointSet {
        let mut set = PointSet::with_capacity(ledger.dim(), self.members.len());
        for &i in &self.members {
            set.push(ledger.point(i));
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::TestFunction;

    #[test]
    fn evaluates_and_records() {
        let p = TestFunction::Sphere.make_problem(2).unwrap();
        let mut ledger = EvaluationLedger::new(2, 10);
        assert_eq!(ledger.evaluate(&p, &[0.0, 0.0]), Ok(0.0));
        assert_eq!(ledger.evaluations_used(), 1);
        assert_eq!(ledger.point(0), &[0.0, 0.0]);
    }

    #[test]
    fn exhausted_leaves_ledger_unchanged() {
        let p = TestFunction::Sphere.make_problem(2).unwrap();
        let mut ledger = EvaluationLedger::new(2, 2);
        ledger.evaluate(&p, &[1.0, 0.0]).unwrap();
        ledger.evaluate(&p, &[1.0, 0.0]).unwrap();
        let before = ledger.clone();
        assert_eq!(
            ledger.evaluate(&p, &[2.0, 0.0]),
            Err(Exhausted { budget: 2 })
        );
        assert_eq!(ledger.values(), before.values());
        assert_eq!(ledger.points(), before.points());
    }

    #[test]
    fn duplicates_are_counted() {
        let p = TestFunction::Sphere.make_problem(1).unwrap();
        let mut ledger = EvaluationLedger::new(1, 5);
        for _ in 0..3 {
            ledger.evaluate(&p, &[1.0]).unwrap();
        }
        assert_eq!(ledger.len(), 3);
        assert_eq!(HighCostSet::from_ledger(&ledger, 1.0).len(), 3);
    }

    #[test]
    fn high_cost_threshold_is_inclusive() {
        let p = TestFunction::Sphere.make_problem(1).unwrap();
        let mut ledger = EvaluationLedger::new(1, 10);
        for x in [0.0, 1.0, 2.0, 3.0] {
            ledger.evaluate(&p, &[x]).unwrap();
        }
        let hcs = HighCostSet::from_ledger(&ledger, 4.0);
        assert_eq!(hcs.members(), &[2, 3]);
        assert_eq!(hcs.points(&ledger), PointSet::from_rows(1, [[2.0], [3.0]]));
        assert!(HighCostSet::from_ledger(&ledger, f64::INFINITY).is_empty());
    }
}
