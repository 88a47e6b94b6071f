//! Sampling estimate of the worst case in a candidate's uncertainty ball,
//! with early curtailment against the high-cost threshold.

use crate::geometry::sample_in_ball;
use crate::ledger::EvaluationLedger;
use crate::problem::Problem;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerResult {
    /// Running maximum of the centre value and every neighbourhood sample.
    /// `+∞` if the budget ran out before the centre could be evaluated.
    pub estimate: f64,
    /// The running maximum exceeded the threshold and sampling stopped.
    pub curtailed: bool,
    /// Neighbourhood samples evaluated (the centre is not counted).
    pub samples_used: usize,
    /// The budget ran out during this call.
    pub exhausted: bool,
}

/// Estimates `g(center)` by uniform sampling in the `Γ`-ball.
///
/// `center_value` carries `f(center)` when the centre is already in the
/// ledger (a seed point); otherwise the centre is evaluated first. Sampling
/// stops as soon as the running maximum is strictly greater than `tau`; pass
/// `f64::INFINITY` to always take `max_search` samples.
pub fn inner_maximise(
    ledger: &mut EvaluationLedger,
    problem: &Problem,
    rng: &mut RngStream,
    center: &[f64],
    tau: f64,
    max_search: usize,
    center_value: Option<f64>,
) -> InnerResult {
    let mut result = InnerResult {
        estimate: f64::INFINITY,
        curtailed: false,
        samples_used: 0,
        exhausted: false,
    };
    let start = match center_value {
        Some(v) => v,
        None => match ledger.evaluate(problem, center) {
            Ok(v) => v,
            Err(_) => {
                result.exhausted = true;
                return result;
            }
        },
    };
    result.estimate = start;
    if result.estimate > tau {
        result.curtailed = true;
        return result;
    }
    for _ in 0..max_search {
        let x = sample_in_ball(rng, center, problem.gamma());
        match ledger.evaluate(problem, &x) {
            Ok(v) => {
                result.samples_used += 1;
                result.estimate = result.estimate.max(v);
            }
            Err(_) => {
                result.exhausted = true;
                return result;
            }
        }
        if result.estimate > tau {
            result.curtailed = true;
            break;
        }
    }
    result
}
