use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Objective callable shared between threads.
pub type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("problem must have at least one dimension")]
    ZeroDimension,
    #[error("lower and upper bounds have different lengths ({lower} vs {upper})")]
    BoundsLength { lower: usize, upper: usize },
    #[error("coordinate {index}: lower bound {lower} is not below upper bound {upper}")]
    EmptyInterval {
        index: usize,
        lower: f64,
        upper: f64,
    },
    #[error(
        "uncertainty radius {gamma} must be positive and below half the narrowest range ({limit})"
    )]
    Gamma { gamma: f64, limit: f64 },
    #[error("{name} does not support dimension {dim}")]
    UnsupportedDimension { name: String, dim: usize },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
}

/// A box-constrained instance with implementation uncertainty of radius `gamma`.
///
/// The objective is defined on all of `R^n`: neighbourhood samples around a
/// point near the boundary are evaluated wherever they land.
#[derive(Clone)]
pub struct Problem {
    name: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
    gamma: f64,
    objective: Objective,
}

impl Problem {
    pub fn new<F>(
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        gamma: f64,
        objective: F,
    ) -> Result<Self, ProblemError>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if lower.len() != upper.len() {
            return Err(ProblemError::BoundsLength {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(ProblemError::ZeroDimension);
        }
        let mut narrowest = f64::INFINITY;
        for (index, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l < u) {
                return Err(ProblemError::EmptyInterval {
                    index,
                    lower: l,
                    upper: u,
                });
            }
            narrowest = narrowest.min(u - l);
        }
        let limit = narrowest / 2.0;
        if !(gamma > 0.0 && gamma < limit) {
            return Err(ProblemError::Gamma { gamma, limit });
        }
        Ok(Self {
            name: name.into(),
            lower,
            upper,
            gamma,
            objective: Arc::new(objective),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Width of coordinate `i`.
    pub fn range(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// Length of the box diagonal.
    pub fn diagonal(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.range(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Raw objective value. Does not touch any budget; searches go through
    /// [`crate::EvaluationLedger::evaluate`].
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        (self.objective)(x)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&l, &u))| l <= v && v <= u)
    }

    /// Clamps `x` componentwise into the box.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (&l, &u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(l, u);
        }
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("gamma", &self.gamma)
            .finish_non_exhaustive()
    }
}
