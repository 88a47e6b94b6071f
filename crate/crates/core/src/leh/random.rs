use super::{LehCalculator, LehPlacement};
use crate::geometry::{any_within, min_distance_to_set, sample_in_box, PointSet};
use crate::problem::Problem;
use crate::rng::RngStream;

/// Rejection sampling for any valid empty hypersphere.
///
/// Returns the first uniform box point farther than `Γ` from every
/// high-cost point. This is not the largest such sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomLeh {
    pub max_attempts: usize,
}

impl Default for RandomLeh {
    fn default() -> Self {
        Self { max_attempts: 1000 }
    }
}

impl LehCalculator for RandomLeh {
    fn place(&mut self, hcps: &PointSet, problem: &Problem, rng: &mut RngStream) -> LehPlacement {
        random_leh(hcps, problem, rng, self.max_attempts)
    }
}

pub fn random_leh(
    hcps: &PointSet,
    problem: &Problem,
    rng: &mut RngStream,
    max_attempts: usize,
) -> LehPlacement {
    let gamma = problem.gamma();
    let mut last = None;
    for _ in 0..max_attempts {
        let p = sample_in_box(rng, problem);
        if hcps.is_empty() {
            return LehPlacement {
                center: p,
                radius: f64::INFINITY,
                found: true,
            };
        }
        if !any_within(&p, hcps, gamma) {
            let (radius, _) = min_distance_to_set(&p, hcps);
            return LehPlacement {
                center: p,
                radius,
                found: radius > gamma,
            };
        }
        last = Some(p);
    }
    let center = last.unwrap_or_else(|| sample_in_box(rng, problem));
    let radius = if hcps.is_empty() {
        f64::INFINITY
    } else {
        min_distance_to_set(&center, hcps).0
    };
    LehPlacement {
        center,
        radius,
        found: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(gamma: f64) -> Problem {
        Problem::new("unit", vec![0.0, 0.0], vec![1.0, 1.0], gamma, |_| 0.0).unwrap()
    }

    #[test]
    fn single_central_point_is_easy() {
        let p = unit_square(0.1);
        let hcps = PointSet::from_rows(2, [[0.5, 0.5]]);
        let pl = random_leh(&hcps, &p, &mut RngStream::new(1), 1000);
        assert!(pl.found);
        assert!(pl.radius > 0.1);
        assert!(p.contains(&pl.center));
    }

    #[test]
    fn covering_grid_finds_nothing() {
        // Grid spacing 0.1 has covering radius 0.1/√2 ≈ 0.0707 < Γ = 0.08.
        let p = unit_square(0.08);
        let mut rows = Vec::new();
        for i in 0..=10 {
            for j in 0..=10 {
                rows.push([i as f64 * 0.1, j as f64 * 0.1]);
            }
        }
        let hcps = PointSet::from_rows(2, rows);
        let pl = random_leh(&hcps, &p, &mut RngStream::new(2), 1000);
        assert!(!pl.found);
    }

    #[test]
    fn acceptance_fraction_matches_area() {
        // One hcp at the origin corner, Γ = 0.45: the rejected region is a
        // quarter disc of area π Γ² / 4.
        let gamma = 0.45;
        let p = unit_square(gamma);
        let hcps = PointSet::from_rows(2, [[0.0, 0.0]]);
        let mut rng = RngStream::new(3);
        let trials = 100_000;
        let accepted = (0..trials)
            .filter(|_| random_leh(&hcps, &p, &mut rng, 1).found)
            .count();
        let expected = 1.0 - std::f64::consts::PI * gamma * gamma / 4.0;
        let frac = accepted as f64 / trials as f64;
        assert!((frac - expected).abs() < 0.01, "{frac} vs {expected}");
    }
}
