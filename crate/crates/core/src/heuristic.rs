//! Name-addressable heuristics with string parameter overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::comparators::{dd_restart_search, pso_search, DescentParams, PsoParams};
use crate::ledger::EvaluationLedger;
use crate::leh::{leh_search, GaLeh, LehGaParams, RandomLeh, SearchOutcome};
use crate::problem::Problem;
use crate::rng::RngStream;
use crate::voronoi::VoronoiLeh;

pub const HEURISTIC_NAMES: [&str; 5] = ["rnd", "ga", "vor", "pso", "ddre"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error("unknown heuristic {0:?} (expected one of rnd, ga, vor, pso, ddre)")]
    Unknown(String),
    #[error("heuristic {heuristic} has no parameter {key:?}")]
    UnknownParameter { heuristic: String, key: String },
    #[error("heuristic {heuristic}: cannot parse {key} = {value:?}")]
    BadValue {
        heuristic: String,
        key: String,
        value: String,
    },
    #[error("heuristic {heuristic}: {message}")]
    Invalid { heuristic: String, message: String },
    #[error("heuristic {heuristic} does not support {problem} in {dim} dimensions")]
    Unsupported {
        heuristic: String,
        problem: String,
        dim: usize,
    },
}

/// A configured search.
#[derive(Debug, Clone, PartialEq)]
pub enum Heuristic {
    Rnd(RandomLeh),
    Ga(LehGaParams),
    Vor(VoronoiLeh),
    Pso(PsoParams),
    Ddre(DescentParams),
}

impl Heuristic {
    /// Default settings for a registered name.
    pub fn by_name(name: &str) -> Result<Self, HeuristicError> {
        Ok(match name {
            "rnd" => Heuristic::Rnd(RandomLeh::default()),
            "ga" => Heuristic::Ga(LehGaParams::default()),
            "vor" => Heuristic::Vor(VoronoiLeh::default()),
            "pso" => Heuristic::Pso(PsoParams::default()),
            "ddre" => Heuristic::Ddre(DescentParams::default()),
            other => return Err(HeuristicError::Unknown(other.to_string())),
        })
    }

    /// Registered name with `overrides` applied and validated.
    pub fn configure(
        name: &str,
        overrides: &BTreeMap<String, String>,
    ) -> Result<Self, HeuristicError> {
        let mut h = Self::by_name(name)?;
        for (key, value) in overrides {
            h.set(key, value)?;
        }
        h.validate()?;
        Ok(h)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Heuristic::Rnd(_) => "rnd",
            Heuristic::Ga(_) => "ga",
            Heuristic::Vor(_) => "vor",
            Heuristic::Pso(_) => "pso",
            Heuristic::Ddre(_) => "ddre",
        }
    }

    pub fn is_leh(&self) -> bool {
        matches!(
            self,
            Heuristic::Rnd(_) | Heuristic::Ga(_) | Heuristic::Vor(_)
        )
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), HeuristicError> {
        let heuristic = self.name().to_string();
        let bad = || HeuristicError::BadValue {
            heuristic: heuristic.clone(),
            key: key.to_string(),
            value: value.to_string(),
        };
        fn parse<T: FromStr>(
            value: &str,
            bad: impl Fn() -> HeuristicError,
        ) -> Result<T, HeuristicError> {
            value.trim().parse().map_err(|_| bad())
        }
        match (self, key) {
            (Heuristic::Rnd(r), "max_attempts") => r.max_attempts = parse(value, bad)?,
            (Heuristic::Ga(g), "population") => g.population = parse(value, bad)?,
            (Heuristic::Ga(g), "generations") => g.generations = parse(value, bad)?,
            (Heuristic::Ga(g), "elites") => g.elites = parse(value, bad)?,
            (Heuristic::Ga(g), "tournament_size") => g.tournament_size = parse(value, bad)?,
            (Heuristic::Ga(g), "mutation_prob") => g.mutation_prob = parse(value, bad)?,
            (Heuristic::Ga(g), "mutation_scale") => g.mutation_scale = parse(value, bad)?,
            (Heuristic::Vor(v), "boundary_crossings") => v.boundary_crossings = parse(value, bad)?,
            (Heuristic::Pso(p), "swarm") => p.swarm = parse(value, bad)?,
            (Heuristic::Pso(p), "iterations") => p.iterations = parse(value, bad)?,
            (Heuristic::Pso(p), "c1") => p.c1 = parse(value, bad)?,
            (Heuristic::Pso(p), "c2") => p.c2 = parse(value, bad)?,
            (Heuristic::Pso(p), "omega") => p.omega = parse(value, bad)?,
            (Heuristic::Pso(p), "vmax_fraction") => p.vmax_fraction = parse(value, bad)?,
            (Heuristic::Ddre(d), "hc_fraction") => d.hc_fraction = parse(value, bad)?,
            (Heuristic::Ddre(d), "band_growth") => d.band_growth = parse(value, bad)?,
            (Heuristic::Ddre(d), "min_step") => d.min_step = Some(parse(value, bad)?),
            (Heuristic::Ddre(d), "step_cap") => d.step_cap = Some(parse(value, bad)?),
            (Heuristic::Ddre(d), "epsilon") => d.epsilon = parse(value, bad)?,
            _ => {
                return Err(HeuristicError::UnknownParameter {
                    heuristic,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), HeuristicError> {
        let invalid = |message: String| HeuristicError::Invalid {
            heuristic: self.name().to_string(),
            message,
        };
        match self {
            Heuristic::Rnd(r) if r.max_attempts == 0 => {
                Err(invalid("max_attempts must be positive".into()))
            }
            Heuristic::Ga(g) => g.validate().map_err(|e| invalid(e.to_string())),
            Heuristic::Pso(p) => p.validate().map_err(|e| invalid(e.to_string())),
            _ => Ok(()),
        }
    }

    /// Checks that this heuristic can run on `problem`.
    pub fn check_problem(&self, problem: &Problem) -> Result<(), HeuristicError> {
        let unsupported = || HeuristicError::Unsupported {
            heuristic: self.name().to_string(),
            problem: problem.name().to_string(),
            dim: problem.dim(),
        };
        match self {
            Heuristic::Vor(_) if problem.dim() != 2 => Err(unsupported()),
            Heuristic::Ddre(d) => {
                d.resolve(problem)
                    .map(|_| ())
                    .map_err(|e| HeuristicError::Invalid {
                        heuristic: "ddre".into(),
                        message: e.to_string(),
                    })
            }
            _ => Ok(()),
        }
    }

    /// Runs the search on a fresh ledger.
    pub fn run(
        &self,
        problem: &Problem,
        ledger: &mut EvaluationLedger,
        rng: &mut RngStream,
        num_initial: usize,
        max_search: usize,
    ) -> SearchOutcome {
        match self {
            Heuristic::Rnd(r) => leh_search(
                problem,
                ledger,
                rng,
                &mut r.clone(),
                num_initial,
                max_search,
            ),
            Heuristic::Ga(g) => leh_search(
                problem,
                ledger,
                rng,
                &mut GaLeh { params: *g },
                num_initial,
                max_search,
            ),
            Heuristic::Vor(v) => leh_search(
                problem,
                ledger,
                rng,
                &mut v.clone(),
                num_initial,
                max_search,
            ),
            Heuristic::Pso(p) => pso_search(problem, ledger, rng, p, max_search),
            Heuristic::Ddre(d) => dd_restart_search(problem, ledger, rng, d, max_search),
        }
    }

    /// Parameters as JSON, for run manifests.
    pub fn params_json(&self) -> Value {
        match self {
            Heuristic::Rnd(r) => json!({ "max_attempts": r.max_attempts }),
            Heuristic::Ga(g) => json!(g),
            Heuristic::Vor(v) => json!({ "boundary_crossings": v.boundary_crossings }),
            Heuristic::Pso(p) => json!(p),
            Heuristic::Ddre(d) => json!(d),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::TestFunction;

    #[test]
    fn registry_round_trip() {
        for name in HEURISTIC_NAMES {
            assert_eq!(Heuristic::by_name(name).unwrap().name(), name);
        }
        assert!(matches!(
            Heuristic::by_name("sa"),
            Err(HeuristicError::Unknown(_))
        ));
    }

    #[test]
    fn overrides() {
        let mut o = BTreeMap::new();
        o.insert("population".to_string(), "10".to_string());
        o.insert("generations".to_string(), "10".to_string());
        let h = Heuristic::configure("ga", &o).unwrap();
        let Heuristic::Ga(g) = h else { panic!() };
        assert_eq!((g.population, g.generations), (10, 10));

        o.insert("generations".to_string(), "11".to_string());
        assert!(matches!(
            Heuristic::configure("ga", &o),
            Err(HeuristicError::Invalid { .. })
        ));

        let mut o = BTreeMap::new();
        o.insert("swarm".to_string(), "ten".to_string());
        assert!(matches!(
            Heuristic::configure("pso", &o),
            Err(HeuristicError::BadValue { .. })
        ));
        let mut o = BTreeMap::new();
        o.insert("swarm".to_string(), "5".to_string());
        assert!(matches!(
            Heuristic::configure("ga", &o),
            Err(HeuristicError::UnknownParameter { .. })
        ));
    }

    #[test]
    fn vor_is_2d_only() {
        let vor = Heuristic::by_name("vor").unwrap();
        assert!(vor
            .check_problem(&TestFunction::Sphere.make_problem(2).unwrap())
            .is_ok());
        assert!(matches!(
            vor.check_problem(&TestFunction::Sphere.make_problem(3).unwrap()),
            Err(HeuristicError::Unsupported { dim: 3, .. })
        ));
    }
}
