//! The largest-empty-hypersphere outer search.
//!
//! Each iteration estimates the worst case around the current candidate,
//! lowers the high-cost threshold `τ` if the candidate improves on the
//! incumbent, and then asks an [`LehCalculator`] for the point of the box
//! farthest from every high-cost point. The search ends when no empty
//! hypersphere of radius greater than `Γ` can be placed, or when the budget
//! runs out.

mod ga;
mod random;

pub use ga::{ga_leh, GaLeh, LehGaParams};
pub use random::{random_leh, RandomLeh};

use std::fmt;

use serde::Serialize;

use crate::geometry::PointSet;
use crate::inner::{inner_maximise, InnerResult};
use crate::ledger::{EvaluationLedger, HighCostSet};
use crate::problem::Problem;
use crate::rng::RngStream;

/// Candidate centre and its empty radius, as returned by a calculator.
#[derive(Debug, Clone, PartialEq)]
pub struct LehPlacement {
    pub center: Vec<f64>,
    /// Minimum distance from `center` to every high-cost point.
    pub radius: f64,
    /// `radius > Γ`.
    pub found: bool,
}

/// Strategy for (approximately) solving the max-min placement problem.
pub trait LehCalculator {
    fn place(&mut self, hcps: &PointSet, problem: &Problem, rng: &mut RngStream) -> LehPlacement;
}

impl<C: LehCalculator + ?Sized> LehCalculator for &mut C {
    fn place(&mut self, hcps: &PointSet, problem: &Problem, rng: &mut RngStream) -> LehPlacement {
        (**self).place(hcps, problem, rng)
    }
}

impl<C: LehCalculator + ?Sized> LehCalculator for Box<C> {
    fn place(&mut self, hcps: &PointSet, problem: &Problem, rng: &mut RngStream) -> LehPlacement {
        (**self).place(hcps, problem, rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    NoValidLeh,
    BudgetExhausted,
    /// A fixed iteration count finished before the budget did (PSO only).
    IterationsCompleted,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::NoValidLeh => "no_valid_leh",
            StopReason::BudgetExhausted => "budget_exhausted",
            StopReason::IterationsCompleted => "iterations_completed",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One visited candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub candidate: Vec<f64>,
    /// Empty radius reported when the candidate was placed; `None` for the
    /// first candidate and for the comparator searches.
    pub radius: Option<f64>,
    pub estimate: f64,
    pub curtailed: bool,
    /// The budget ran out during this candidate's neighbourhood search.
    pub exhausted: bool,
    /// Incumbent robust value after this candidate.
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best_point: Vec<f64>,
    /// Estimated robust value of `best_point` (final `τ`).
    pub best_value: f64,
    pub candidates_visited: usize,
    pub evaluations_used: usize,
    pub stop_reason: StopReason,
    pub trace: Vec<TraceEntry>,
}

/// Incumbent bookkeeping shared by every outer search.
///
/// A neighbourhood search cut short by the budget is only adopted when there
/// is no incumbent yet; otherwise its partial estimate is discarded.
#[derive(Debug, Default)]
pub(crate) struct Incumbent {
    best_point: Option<Vec<f64>>,
    best_value: f64,
    trace: Vec<TraceEntry>,
}

impl Incumbent {
    pub(crate) fn new() -> Self {
        Self {
            best_point: None,
            best_value: f64::INFINITY,
            trace: Vec::new(),
        }
    }

    pub(crate) fn tau(&self) -> f64 {
        self.best_value
    }

    /// Records the candidate and returns whether it became the incumbent.
    pub(crate) fn record(
        &mut self,
        candidate: &[f64],
        radius: Option<f64>,
        inner: &InnerResult,
    ) -> bool {
        let adopt = if inner.exhausted {
            self.best_point.is_none() && inner.estimate.is_finite()
        } else {
            inner.estimate < self.best_value
        };
        if adopt {
            self.best_point = Some(candidate.to_vec());
            self.best_value = inner.estimate;
        }
        self.trace.push(TraceEntry {
            candidate: candidate.to_vec(),
            radius,
            estimate: inner.estimate,
            curtailed: inner.curtailed,
            exhausted: inner.exhausted,
            tau: self.best_value,
        });
        adopt
    }

    pub(crate) fn finish(
        self,
        ledger: &EvaluationLedger,
        stop_reason: StopReason,
        fallback: &[f64],
    ) -> SearchOutcome {
        SearchOutcome {
            best_point: self.best_point.unwrap_or_else(|| fallback.to_vec()),
            best_value: self.best_value,
            candidates_visited: self.trace.len(),
            evaluations_used: ledger.evaluations_used(),
            stop_reason,
            trace: self.trace,
        }
    }
}

/// Coordinates of the high-cost set, kept in step with the ledger.
///
/// While `τ` is unchanged, only newly evaluated points need checking; when
/// it drops, the set is rebuilt. Either way the result equals
/// `HighCostSet::from_ledger(ledger, τ).points(ledger)`.
#[derive(Debug)]
struct HighCostPoints {
    threshold: f64,
    scanned: usize,
    points: PointSet,
}

impl HighCostPoints {
    fn new(dim: usize) -> Self {
        Self {
            threshold: f64::NAN,
            scanned: 0,
            points: PointSet::new(dim),
        }
    }

    fn update(&mut self, ledger: &EvaluationLedger, tau: f64) -> &PointSet {
        if tau != self.threshold {
            let hcs = HighCostSet::from_ledger(ledger, tau);
            self.points = hcs.points(ledger);
            self.threshold = tau;
        } else {
            for i in self.scanned..ledger.len() {
                if ledger.value(i) >= tau {
                    self.points.push(ledger.point(i));
                }
            }
        }
        self.scanned = ledger.len();
        &self.points
    }
}

/// Runs the largest-empty-hypersphere search on a fresh ledger.
///
/// `num_initial` uniform seed points are evaluated first and one of them is
/// picked at random as the first candidate. Every neighbourhood search takes
/// at most `max_search` samples and is curtailed against the current `τ`.
pub fn leh_search<C: LehCalculator + ?Sized>(
    problem: &Problem,
    ledger: &mut EvaluationLedger,
    rng: &mut RngStream,
    calculator: &mut C,
    num_initial: usize,
    max_search: usize,
) -> SearchOutcome {
    assert!(num_initial >= 1, "num_initial must be at least 1");
    assert!(ledger.is_empty(), "leh_search needs a fresh ledger");

    let mut seeds = Vec::with_capacity(num_initial);
    for _ in 0..num_initial {
        let x = crate::geometry::sample_in_box(rng, problem);
        match ledger.evaluate(problem, &x) {
            Ok(v) => seeds.push((x, v)),
            Err(_) => break,
        }
    }
    let (mut center, first_value) = seeds.swap_remove(rng.below(seeds.len()));
    let mut center_value = Some(first_value);
    let mut placed_radius = None;
    let mut incumbent = Incumbent::new();
    let mut high_cost = HighCostPoints::new(problem.dim());

    let stop = loop {
        let inner = inner_maximise(
            ledger,
            problem,
            rng,
            &center,
            incumbent.tau(),
            max_search,
            center_value,
        );
        incumbent.record(&center, placed_radius, &inner);
        if inner.exhausted || ledger.is_exhausted() {
            break StopReason::BudgetExhausted;
        }

        let hcps = high_cost.update(ledger, incumbent.tau());
        let placement = calculator.place(hcps, problem, rng);
        if !(placement.found && placement.radius > problem.gamma()) {
            break StopReason::NoValidLeh;
        }
        center = placement.center;
        center_value = None;
        placed_radius = Some(placement.radius);
    };
    incumbent.finish(ledger, stop, &center)
}
