use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{LehCalculator, LehPlacement};
use crate::geometry::{min_distances_to_set, sample_in_box, PointSet};
use crate::problem::Problem;
use crate::rng::RngStream;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GaParamsError {
    #[error("population and generations must be positive")]
    Empty,
    #[error("population × generations = {0} exceeds the cap of 100")]
    TooLarge(usize),
    #[error("elites ({elites}) must be fewer than the population ({population})")]
    Elites { elites: usize, population: usize },
    #[error("tournament size must be positive")]
    Tournament,
    #[error("mutation probability {0} is outside [0, 1]")]
    MutationProb(f64),
    #[error("mutation scale {0} must be positive")]
    MutationScale(f64),
}

/// Genetic algorithm settings for LEH placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LehGaParams {
    pub population: usize,
    /// Includes the initial random population.
    pub generations: usize,
    pub elites: usize,
    pub tournament_size: usize,
    /// Per-coordinate mutation probability.
    pub mutation_prob: f64,
    /// Mutation standard deviation as a fraction of each coordinate's range.
    pub mutation_scale: f64,
}

impl Default for LehGaParams {
    fn default() -> Self {
        Self {
            population: 20,
            generations: 5,
            elites: 1,
            tournament_size: 2,
            mutation_prob: 0.1,
            mutation_scale: 0.1,
        }
    }
}

impl LehGaParams {
    pub const MAX_FITNESS_EVALUATIONS: usize = 100;

    pub fn validate(&self) -> Result<(), GaParamsError> {
        if self.population == 0 || self.generations == 0 {
            return Err(GaParamsError::Empty);
        }
        let total = self.population * self.generations;
        if total > Self::MAX_FITNESS_EVALUATIONS {
            return Err(GaParamsError::TooLarge(total));
        }
        if self.elites >= self.population {
            return Err(GaParamsError::Elites {
                elites: self.elites,
                population: self.population,
            });
        }
        if self.tournament_size == 0 {
            return Err(GaParamsError::Tournament);
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(GaParamsError::MutationProb(self.mutation_prob));
        }
        if !(self.mutation_scale > 0.0) {
            return Err(GaParamsError::MutationScale(self.mutation_scale));
        }
        Ok(())
    }
}

/// GA calculator: fitness of a point is its distance to the nearest
/// high-cost point, maximised over the box.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaLeh {
    pub params: LehGaParams,
}

impl GaLeh {
    pub fn new(params: LehGaParams) -> Result<Self, GaParamsError> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl LehCalculator for GaLeh {
    fn place(&mut self, hcps: &PointSet, problem: &Problem, rng: &mut RngStream) -> LehPlacement {
        ga_leh(hcps, problem, rng, &self.params)
    }
}

fn fitness(points: &[Vec<f64>], hcps: &PointSet) -> Vec<f64> {
    if hcps.is_empty() {
        vec![f64::INFINITY; points.len()]
    } else {
        min_distances_to_set(points, hcps)
            .into_iter()
            .map(|(d, _)| d)
            .collect()
    }
}

fn tournament(rng: &mut RngStream, fit: &[f64], size: usize) -> usize {
    let mut winner = rng.below(fit.len());
    for _ in 1..size {
        let challenger = rng.below(fit.len());
        if fit[challenger] > fit[winner] || (fit[challenger] == fit[winner] && challenger < winner)
        {
            winner = challenger;
        }
    }
    winner
}

/// Evolves box points towards the max-min distance from `hcps`: tournament
/// selection, mid-point crossover, clamped Gaussian mutation and elitism.
/// Returns the best individual ever seen.
pub fn ga_leh(
    hcps: &PointSet,
    problem: &Problem,
    rng: &mut RngStream,
    params: &LehGaParams,
) -> LehPlacement {
    let mut pop: Vec<Vec<f64>> = (0..params.population)
        .map(|_| sample_in_box(rng, problem))
        .collect();
    let mut fit = fitness(&pop, hcps);

    let mut best = 0;
    for i in 1..pop.len() {
        if fit[i] > fit[best] {
            best = i;
        }
    }
    let mut best_point = pop[best].clone();
    let mut best_fit = fit[best];

    for _ in 1..params.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fit[b].total_cmp(&fit[a]).then(a.cmp(&b)));

        let mut next = Vec::with_capacity(params.population);
        let mut next_fit = Vec::with_capacity(params.population);
        for &e in order.iter().take(params.elites) {
            next.push(pop[e].clone());
            next_fit.push(fit[e]);
        }
        let mut children = Vec::with_capacity(params.population - next.len());
        while next.len() + children.len() < params.population {
            let a = tournament(rng, &fit, params.tournament_size);
            let b = tournament(rng, &fit, params.tournament_size);
            let mut child: Vec<f64> = pop[a]
                .iter()
                .zip(&pop[b])
                .map(|(x, y)| 0.5 * (x + y))
                .collect();
            for (i, c) in child.iter_mut().enumerate() {
                if rng.bernoulli(params.mutation_prob) {
                    *c += rng.standard_normal() * params.mutation_scale * problem.range(i);
                }
            }
            problem.clamp(&mut child);
            children.push(child);
        }
        // Fitness never consumes randomness, so scoring the children together
        // gives the same result as scoring each as it is bred.
        let child_fit = fitness(&children, hcps);
        for (child, f) in children.into_iter().zip(child_fit) {
            if f > best_fit {
                best_fit = f;
                best_point.clone_from(&child);
            }
            next.push(child);
            next_fit.push(f);
        }
        pop = next;
        fit = next_fit;
    }

    LehPlacement {
        center: best_point,
        radius: best_fit,
        found: best_fit > problem.gamma(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::min_distance_to_set;
    use crate::leh::random_leh;

    fn unit_square(gamma: f64) -> Problem {
        Problem::new("unit", vec![0.0, 0.0], vec![1.0, 1.0], gamma, |_| 0.0).unwrap()
    }

    fn grid_optimum(hcps: &PointSet, steps: usize) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..=steps {
            for j in 0..=steps {
                let p = [i as f64 / steps as f64, j as f64 / steps as f64];
                best = best.max(min_distance_to_set(&p, hcps).0);
            }
        }
        best
    }

    #[test]
    fn params_validation() {
        assert!(LehGaParams::default().validate().is_ok());
        let too_big = LehGaParams {
            population: 30,
            ..Default::default()
        };
        assert_eq!(too_big.validate(), Err(GaParamsError::TooLarge(150)));
        let elites = LehGaParams {
            elites: 20,
            ..Default::default()
        };
        assert!(matches!(
            elites.validate(),
            Err(GaParamsError::Elites { .. })
        ));
        assert!(GaLeh::new(too_big).is_err());
    }

    #[test]
    fn single_centre_hcp_pushes_towards_corner() {
        let p = unit_square(0.1);
        let hcps = PointSet::from_rows(2, [[0.5, 0.5]]);
        let target = 0.5f64.sqrt();
        let mut hits = 0;
        for seed in 0..20 {
            let pl = ga_leh(
                &hcps,
                &p,
                &mut RngStream::new(seed),
                &LehGaParams::default(),
            );
            assert!(pl.found && pl.radius <= target + 1e-12);
            if target - pl.radius < 0.15 {
                hits += 1;
            }
        }
        assert!(hits >= 15, "only {hits}/20 runs within 0.15 of the corner");
    }

    #[test]
    fn opposite_corners() {
        let p = unit_square(0.1);
        // The free corners (1,0) and (0,1) are at distance 1 from both.
        let hcps = PointSet::from_rows(2, [[0.0, 0.0], [1.0, 1.0]]);
        let oracle = grid_optimum(&hcps, 200);
        assert_eq!(oracle, 1.0);
        let mut hits = 0;
        for seed in 0..20 {
            let pl = ga_leh(
                &hcps,
                &p,
                &mut RngStream::new(seed),
                &LehGaParams::default(),
            );
            assert!(pl.radius <= oracle);
            if pl.radius >= 0.8 {
                hits += 1;
            }
        }
        assert!(hits >= 15, "only {hits}/20 runs reached the max-min region");
    }

    #[test]
    fn radius_bounded_by_grid_oracle_and_exact() {
        let p = unit_square(0.02);
        let mut rng = RngStream::new(77);
        for _ in 0..10 {
            let hcps = PointSet::from_rows(2, (0..30).map(|_| [rng.uniform(), rng.uniform()]));
            let oracle = grid_optimum(&hcps, 200);
            let pl = ga_leh(&hcps, &p, &mut rng, &LehGaParams::default());
            assert!(pl.radius <= oracle + 1.0 / 200.0);
            assert!(p.contains(&pl.center));
            let (d, _) = min_distance_to_set(&pl.center, &hcps);
            assert_eq!(d, pl.radius);
        }
    }

    #[test]
    fn usually_beats_random_placement() {
        let p = Problem::new("cube", vec![0.0; 4], vec![1.0; 4], 0.05, |_| 0.0).unwrap();
        let mut rng = RngStream::new(5);
        let mut wins = 0;
        for _ in 0..100 {
            let hcps = PointSet::from_rows(
                4,
                (0..60).map(|_| (0..4).map(|_| rng.uniform()).collect::<Vec<_>>()),
            );
            let ga = ga_leh(&hcps, &p, &mut rng, &LehGaParams::default());
            let rnd = random_leh(&hcps, &p, &mut rng, 1000);
            if ga.radius >= rnd.radius {
                wins += 1;
            }
        }
        assert!(wins >= 60, "ga won {wins}/100");
    }

    #[test]
    fn best_is_monotone_in_generations() {
        let p = unit_square(0.01);
        let hcps = PointSet::from_rows(2, [[0.3, 0.3], [0.6, 0.8]]);
        let mut prev = 0.0;
        for generations in 1..=5 {
            let params = LehGaParams {
                generations,
                ..Default::default()
            };
            let pl = ga_leh(&hcps, &p, &mut RngStream::new(3), &params);
            assert!(pl.radius >= prev);
            prev = pl.radius;
        }
    }
}
