use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{distance, sample_in_box, squared_distance, PointSet};
use crate::inner::inner_maximise;
use crate::ledger::EvaluationLedger;
use crate::leh::{Incumbent, SearchOutcome, StopReason};
use crate::problem::Problem;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescentParamsError {
    #[error("hc_fraction {0} must lie in (0, 1)")]
    HcFraction(f64),
    #[error("band_growth {0} must exceed 1")]
    BandGrowth(f64),
    #[error("epsilon {0} must be positive")]
    Epsilon(f64),
    #[error("min_step {min_step} must be positive and below step_cap {step_cap}")]
    Steps { min_step: f64, step_cap: f64 },
}

/// Descent-directions settings. `None` step bounds are derived from the
/// problem: `Γ/100` and a quarter of the box diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentParams {
    pub hc_fraction: f64,
    pub band_growth: f64,
    pub min_step: Option<f64>,
    pub step_cap: Option<f64>,
    pub epsilon: f64,
}

impl Default for DescentParams {
    fn default() -> Self {
        Self {
            hc_fraction: 0.2,
            band_growth: 2.0,
            min_step: None,
            step_cap: None,
            epsilon: 1e-6,
        }
    }
}

/// [`DescentParams`] with the step bounds filled in for one problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedDescent {
    pub hc_fraction: f64,
    pub band_growth: f64,
    pub min_step: f64,
    pub step_cap: f64,
    pub epsilon: f64,
}

impl DescentParams {
    pub fn resolve(&self, problem: &Problem) -> Result<ResolvedDescent, DescentParamsError> {
        if !(self.hc_fraction > 0.0 && self.hc_fraction < 1.0) {
            return Err(DescentParamsError::HcFraction(self.hc_fraction));
        }
        if !(self.band_growth > 1.0) {
            return Err(DescentParamsError::BandGrowth(self.band_growth));
        }
        if !(self.epsilon > 0.0) {
            return Err(DescentParamsError::Epsilon(self.epsilon));
        }
        let min_step = self.min_step.unwrap_or(problem.gamma() / 100.0);
        let step_cap = self.step_cap.unwrap_or(problem.diagonal() / 4.0);
        if !(min_step > 0.0 && min_step < step_cap) {
            return Err(DescentParamsError::Steps { min_step, step_cap });
        }
        Ok(ResolvedDescent {
            hc_fraction: self.hc_fraction,
            band_growth: self.band_growth,
            min_step,
            step_cap,
            epsilon: self.epsilon,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    /// Unit descent direction.
    pub d: Vec<f64>,
    /// Largest cosine between `d` and any candidate-to-hcp direction.
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DirectionError {
    /// No direction makes an angle above 90° with every hcp: the candidate
    /// is a local minimum for this high-cost set.
    #[error("no descent direction")]
    Infeasible,
    #[error("high cost point {0} coincides with the candidate")]
    Coincident(usize),
    #[error("no high cost points")]
    Empty,
}

const MNP_TOLERANCE: f64 = 1e-9;

/// Point of minimum Euclidean norm in the convex hull of `points` (Wolfe's
/// algorithm with exact affine-minimiser steps).
pub fn min_norm_point(points: &[Vec<f64>]) -> Vec<f64> {
    assert!(
        !points.is_empty(),
        "min_norm_point needs at least one point"
    );
    let n = points[0].len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let scale = points
        .iter()
        .map(|p| dot(p, p))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let start = (0..points.len())
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .unwrap();
    let mut active = vec![start];
    let mut lambda = vec![1.0];
    let mut x = points[start].clone();

    let combine = |active: &[usize], weights: &[f64]| {
        let mut out = vec![0.0; n];
        for (&i, &w) in active.iter().zip(weights) {
            for (o, v) in out.iter_mut().zip(&points[i]) {
                *o += w * v;
            }
        }
        out
    };

    for _ in 0..(50 * points.len() + 100) {
        let xx = dot(&x, &x);
        let j = (0..points.len())
            .min_by(|&a, &b| dot(&x, &points[a]).total_cmp(&dot(&x, &points[b])))
            .unwrap();
        if xx - dot(&x, &points[j]) <= MNP_TOLERANCE * scale || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);

        loop {
            let alpha = affine_minimiser(points, &active);
            if alpha.iter().all(|&a| a > MNP_TOLERANCE) {
                lambda = alpha;
                x = combine(&active, &lambda);
                break;
            }
            // Move from lambda towards alpha until a weight hits zero.
            let mut theta = 1.0f64;
            for (&l, &a) in lambda.iter().zip(&alpha) {
                if a <= MNP_TOLERANCE && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            let mut k = 0;
            while k < active.len() {
                if lambda[k] <= MNP_TOLERANCE {
                    active.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            x = combine(&active, &lambda);
            if active.len() == 1 {
                break;
            }
        }
    }
    x
}

/// Weights of the minimum-norm point of the affine hull of the active points.
fn affine_minimiser(points: &[Vec<f64>], active: &[usize]) -> Vec<f64> {
    let k = active.len();
    let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            m[(a, b)] = points[active[a]]
                .iter()
                .zip(&points[active[b]])
                .map(|(x, y)| x * y)
                .sum();
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let solved = m
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()));
    let sol = match solved {
        Some(s) => s,
        None => m
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .expect("SVD solve with both factors computed"),
    };
    (0..k).map(|i| sol[i]).collect()
}

/// Unit direction minimising the largest cosine with the directions from
/// `candidate` to each hcp.
///
/// By minimax duality the optimum is `d = −w/‖w‖` with `β = −‖w‖`, where
/// `w` is the minimum-norm point of the hull of the unit hcp directions.
pub fn descent_direction(
    candidate: &[f64],
    hcps: &PointSet,
    epsilon: f64,
) -> Result<Direction, DirectionError> {
    if hcps.is_empty() {
        return Err(DirectionError::Empty);
    }
    let mut units = Vec::with_capacity(hcps.len());
    for (i, h) in hcps.iter().enumerate() {
        let v: Vec<f64> = h.iter().zip(candidate).map(|(a, b)| a - b).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(DirectionError::Coincident(i));
        }
        units.push(v.into_iter().map(|x| x / norm).collect::<Vec<_>>());
    }
    let w = min_norm_point(&units);
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < epsilon {
        return Err(DirectionError::Infeasible);
    }
    let d: Vec<f64> = w.iter().map(|x| -x / norm).collect();
    let beta = units
        .iter()
        .map(|u| u.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if beta > -epsilon {
        return Err(DirectionError::Infeasible);
    }
    Ok(Direction { d, beta })
}

/// Smallest step along `d` that leaves every hcp at least `Γ` from the new
/// point, floored at `min_step` and capped at `step_cap`.
pub fn step_size(
    candidate: &[f64],
    d: &[f64],
    hcps: &PointSet,
    gamma: f64,
    min_step: f64,
    step_cap: f64,
) -> f64 {
    let mut rho: f64 = 0.0;
    for h in hcps.iter() {
        let v: Vec<f64> = candidate.iter().zip(h).map(|(c, h)| c - h).collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let vd: f64 = v.iter().zip(d).map(|(a, b)| a * b).sum();
        let disc = vd * vd - vv + gamma * gamma;
        if disc <= 0.0 {
            // The line never enters the ball around h.
            continue;
        }
        let exit = -vd + disc.sqrt();
        if exit > 0.0 {
            rho = rho.max(exit);
        }
    }
    rho.max(min_step).min(step_cap)
}

/// Ledger indices of every evaluated point within `radius` of `center`.
fn neighbourhood(ledger: &EvaluationLedger, center: &[f64], radius: f64) -> Vec<usize> {
    let r2 = radius * radius;
    (0..ledger.len())
        .filter(|&i| squared_distance(ledger.point(i), center) <= r2)
        .collect()
}

/// High-cost points among the given neighbourhood points: those whose
/// value is within `band` of the neighbourhood maximum, excluding the centre.
fn local_hcps(ledger: &EvaluationLedger, members: &[usize], center: &[f64], band: f64) -> PointSet {
    let max = members
        .iter()
        .map(|&i| ledger.value(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = PointSet::new(ledger.dim());
    for &i in members {
        let p = ledger.point(i);
        if ledger.value(i) >= max - band && p != center {
            out.push(p);
        }
    }
    out
}

/// Repeated descent-directions local searches from uniform random starts
/// until the budget is exhausted.
///
/// Each step runs a full neighbourhood search at the current candidate.
/// The neighbourhood is then every evaluated point within `Γ` of it, earlier
/// searches included: its maximum is the candidate's robust estimate, and
/// the points in the top `hc_fraction` of its value spread are the local
/// high-cost points. The candidate moves along the best descent direction
/// just far enough to push them all out of the `Γ`-ball. When no descent direction
/// exists, the band is narrowed by `band_growth` once; if that also fails,
/// or the step would be negligible, the search restarts elsewhere.
///
/// # Panics
/// If `params` are invalid for `problem` or the ledger is not fresh.
pub fn dd_restart_search(
    problem: &Problem,
    ledger: &mut EvaluationLedger,
    rng: &mut RngStream,
    params: &DescentParams,
    max_search: usize,
) -> SearchOutcome {
    let params = params.resolve(problem).expect("invalid descent parameters");
    assert!(ledger.is_empty(), "dd_restart_search needs a fresh ledger");
    let mut incumbent = Incumbent::new();
    let mut last = sample_in_box(rng, problem);

    'restart: loop {
        let mut x = sample_in_box(rng, problem);
        loop {
            let mut inner =
                inner_maximise(ledger, problem, rng, &x, f64::INFINITY, max_search, None);
            let members = neighbourhood(ledger, &x, problem.gamma());
            if !inner.exhausted {
                inner.estimate = members
                    .iter()
                    .map(|&i| ledger.value(i))
                    .fold(inner.estimate, f64::max);
            }
            incumbent.record(&x, None, &inner);
            last.clone_from(&x);
            if inner.exhausted || ledger.is_exhausted() {
                break 'restart;
            }
            let max = members
                .iter()
                .map(|&i| ledger.value(i))
                .fold(f64::NEG_INFINITY, f64::max);
            let min = members
                .iter()
                .map(|&i| ledger.value(i))
                .fold(f64::INFINITY, f64::min);
            let mut band = params.hc_fraction * (max - min);

            let mut direction = None;
            for _ in 0..2 {
                let hcps = local_hcps(ledger, &members, &x, band);
                if hcps.is_empty() {
                    break;
                }
                match descent_direction(&x, &hcps, params.epsilon) {
                    Ok(dir) => {
                        direction = Some((dir, hcps));
                        break;
                    }
                    Err(_) => band /= params.band_growth,
                }
            }
            let Some((dir, hcps)) = direction else {
                continue 'restart;
            };
            let rho = step_size(
                &x,
                &dir.d,
                &hcps,
                problem.gamma(),
                params.min_step,
                params.step_cap,
            );
            let mut next: Vec<f64> = x.iter().zip(&dir.d).map(|(a, b)| a + rho * b).collect();
            problem.clamp(&mut next);
            if distance(&next, &x) < params.min_step / 2.0 {
                continue 'restart;
            }
            x = next;
        }
    }
    incumbent.finish(ledger, StopReason::BudgetExhausted, &last)
}
