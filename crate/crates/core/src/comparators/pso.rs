use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::sample_in_box;
use crate::inner::inner_maximise;
use crate::ledger::EvaluationLedger;
use crate::leh::{Incumbent, SearchOutcome, StopReason};
use crate::problem::Problem;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsoParamsError {
    #[error("swarm and iterations must be positive")]
    Empty,
    #[error("swarm × iterations = {0} exceeds the cap of 100")]
    TooLarge(usize),
    #[error("c1, c2 and vmax_fraction must be positive")]
    NonPositive,
}

/// Global-best PSO settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub swarm: usize,
    pub iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub omega: f64,
    /// Velocity cap per coordinate, as a fraction of that coordinate's range.
    pub vmax_fraction: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            swarm: 10,
            iterations: 10,
            c1: 1.49,
            c2: 1.49,
            omega: 0.72,
            vmax_fraction: 0.5,
        }
    }
}

impl PsoParams {
    pub const MAX_PARTICLE_UPDATES: usize = 100;

    pub fn validate(&self) -> Result<(), PsoParamsError> {
        if self.swarm == 0 || self.iterations == 0 {
            return Err(PsoParamsError::Empty);
        }
        let total = self.swarm * self.iterations;
        if total > Self::MAX_PARTICLE_UPDATES {
            return Err(PsoParamsError::TooLarge(total));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.vmax_fraction > 0.0) {
            return Err(PsoParamsError::NonPositive);
        }
        Ok(())
    }
}

/// Particle swarm over candidate points, each particle's fitness being a
/// full neighbourhood-search estimate of its worst case.
///
/// # Panics
/// If `params` are invalid or the ledger is not fresh.
pub fn pso_search(
    problem: &Problem,
    ledger: &mut EvaluationLedger,
    rng: &mut RngStream,
    params: &PsoParams,
    max_search: usize,
) -> SearchOutcome {
    params.validate().expect("invalid PSO parameters");
    assert!(ledger.is_empty(), "pso_search needs a fresh ledger");
    let n = problem.dim();
    let vmax: Vec<f64> = (0..n)
        .map(|i| params.vmax_fraction * problem.range(i))
        .collect();

    let mut pos: Vec<Vec<f64>> = (0..params.swarm)
        .map(|_| sample_in_box(rng, problem))
        .collect();
    let mut vel: Vec<Vec<f64>> = (0..params.swarm)
        .map(|_| vmax.iter().map(|&m| rng.uniform_in(-m, m)).collect())
        .collect();
    let mut pbest = pos.clone();
    let mut pbest_val = vec![f64::INFINITY; params.swarm];
    let mut gbest = pos[0].clone();
    let mut gbest_val = f64::INFINITY;
    let mut incumbent = Incumbent::new();

    for iteration in 0..params.iterations {
        for i in 0..params.swarm {
            let inner = inner_maximise(
                ledger,
                problem,
                rng,
                &pos[i],
                f64::INFINITY,
                max_search,
                None,
            );
            incumbent.record(&pos[i], None, &inner);
            if inner.exhausted {
                return incumbent.finish(ledger, StopReason::BudgetExhausted, &gbest);
            }
            if inner.estimate < pbest_val[i] {
                pbest_val[i] = inner.estimate;
                pbest[i].clone_from(&pos[i]);
            }
            if inner.estimate < gbest_val {
                gbest_val = inner.estimate;
                gbest.clone_from(&pos[i]);
            }
        }
        if ledger.is_exhausted() {
            return incumbent.finish(ledger, StopReason::BudgetExhausted, &gbest);
        }
        if iteration + 1 == params.iterations {
            break;
        }
        for i in 0..params.swarm {
            for k in 0..n {
                let r1 = rng.uniform();
                let r2 = rng.uniform();
                let v = params.omega * vel[i][k]
                    + params.c1 * r1 * (pbest[i][k] - pos[i][k])
                    + params.c2 * r2 * (gbest[k] - pos[i][k]);
                vel[i][k] = v.clamp(-vmax[k], vmax[k]);
                pos[i][k] += vel[i][k];
            }
            problem.clamp(&mut pos[i]);
        }
    }
    incumbent.finish(ledger, StopReason::IterationsCompleted, &gbest)
}
