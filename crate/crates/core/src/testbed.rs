//! Benchmark problems with their default boxes and uncertainty radii.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::geometry::sample_in_ball;
use crate::problem::{Problem, ProblemError};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestFunction {
    Poly2D,
    Ackley,
    MultipeakF1,
    MultipeakF2,
    Rastrigin,
    Rosenbrock,
    Sawtooth,
    Sphere,
    Volcano,
}

impl TestFunction {
    pub const ALL: [TestFunction; 9] = [
        TestFunction::Poly2D,
        TestFunction::Ackley,
        TestFunction::MultipeakF1,
        TestFunction::MultipeakF2,
        TestFunction::Rastrigin,
        TestFunction::Rosenbrock,
        TestFunction::Sawtooth,
        TestFunction::Sphere,
        TestFunction::Volcano,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Poly2D => "poly2D",
            TestFunction::Ackley => "ackley",
            TestFunction::MultipeakF1 => "multipeakF1",
            TestFunction::MultipeakF2 => "multipeakF2",
            TestFunction::Rastrigin => "rastrigin",
            TestFunction::Rosenbrock => "rosenbrock",
            TestFunction::Sawtooth => "sawtooth",
            TestFunction::Sphere => "sphere",
            TestFunction::Volcano => "volcano",
        }
    }

    /// Per-coordinate feasible interval.
    pub fn default_bounds(self) -> (f64, f64) {
        match self {
            TestFunction::Poly2D => (-1.0, 4.0),
            TestFunction::Ackley => (-32.768, 32.768),
            TestFunction::MultipeakF1 => (0.0, 1.0),
            TestFunction::MultipeakF2 => (0.0, 10.0),
            TestFunction::Rastrigin => (-5.12, 5.12),
            TestFunction::Rosenbrock => (-2.048, 2.048),
            TestFunction::Sawtooth => (-1.0, 1.0),
            TestFunction::Sphere => (-5.0, 5.0),
            TestFunction::Volcano => (-10.0, 10.0),
        }
    }

    pub fn default_gamma(self) -> f64 {
        match self {
            TestFunction::Poly2D => 0.5,
            TestFunction::Ackley => 3.0,
            TestFunction::MultipeakF1 => 0.0625,
            TestFunction::MultipeakF2 => 0.5,
            TestFunction::Rastrigin => 0.5,
            TestFunction::Rosenbrock => 0.25,
            TestFunction::Sawtooth => 0.2,
            TestFunction::Sphere => 1.0,
            TestFunction::Volcano => 1.5,
        }
    }

    pub fn supports_dim(self, dim: usize) -> bool {
        match self {
            TestFunction::Poly2D => dim == 2,
            TestFunction::Rosenbrock => dim >= 2,
            _ => dim >= 1,
        }
    }

    /// Objective value at any finite point, inside the box or not.
    pub fn evaluate(self, x: &[f64]) -> f64 {
        let n = x.len() as f64;
        match self {
            TestFunction::Poly2D => poly2d(x[0], x[1]),
            TestFunction::Ackley => {
                let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            TestFunction::MultipeakF1 => -x.iter().map(|&v| multipeak_f1_term(v)).sum::<f64>() / n,
            TestFunction::MultipeakF2 => {
                x.iter()
                    .map(|&v| 2.0 * (10.0 * (-0.2 * v).exp() * v).sin() * (-0.25 * v).exp())
                    .sum::<f64>()
                    / n
            }
            TestFunction::Rastrigin => {
                10.0 * n
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
            TestFunction::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
                .sum(),
            TestFunction::Sawtooth => 1.0 - x.iter().map(|&v| sawtooth_term(v)).sum::<f64>() / n,
            TestFunction::Sphere => x.iter().map(|v| v * v).sum(),
            TestFunction::Volcano => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r > 1.0 {
                    r.sqrt() - 1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Builds the instance at `dim` with the default box and `Γ`.
    pub fn make_problem(self, dim: usize) -> Result<Problem, ProblemError> {
        if !self.supports_dim(dim) {
            return Err(ProblemError::UnsupportedDimension {
                name: self.name().to_string(),
                dim,
            });
        }
        let (l, u) = self.default_bounds();
        Problem::new(
            self.name(),
            vec![l; dim],
            vec![u; dim],
            self.default_gamma(),
            move |x| self.evaluate(x),
        )
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TestFunction::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ProblemError::UnknownProblem(s.to_string()))
    }
}

fn poly2d(x: f64, y: f64) -> f64 {
    2.0 * x.powi(6) - 12.2 * x.powi(5) + 21.2 * x.powi(4) + 6.2 * x - 6.4 * x.powi(3) - 4.7 * x * x
        + y.powi(6)
        - 11.0 * y.powi(5)
        + 43.3 * y.powi(4)
        - 10.0 * y
        - 74.8 * y.powi(3)
        + 56.9 * y * y
        - 4.1 * x * y
        - 0.1 * y * y * x * x
        + 0.4 * y * y * x
        + 0.4 * x * x * y
}

// The exponent carries a positive sign here, so the envelope grows away from 0.1.
fn multipeak_f1_term(x: f64) -> f64 {
    let envelope = (2.0 * LN_2 * ((x - 0.1) / 0.8).powi(2)).exp();
    let s = (5.0 * PI * x).sin();
    if 0.4 < x && x <= 0.6 {
        envelope * s.abs().sqrt()
    } else {
        envelope * s.powi(6)
    }
}

fn sawtooth_term(x: f64) -> f64 {
    if (-0.8..0.2).contains(&x) {
        x + 0.8
    } else {
        0.0
    }
}

/// Dense-sampling estimate of the worst case `max_{‖Δ‖≤Γ} f(x+Δ)`.
///
/// Evaluates the objective directly, outside any ledger, so it never counts
/// against a search budget. The centre value is always included.
pub fn reference_worst_case(
    problem: &Problem,
    x: &[f64],
    samples: usize,
    rng: &mut RngStream,
) -> f64 {
    let mut worst = problem.value(x);
    for _ in 0..samples {
        let p = sample_in_ball(rng, x, problem.gamma());
        worst = worst.max(problem.value(&p));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_minima() {
        for n in [1, 2, 5, 10] {
            let zero = vec![0.0; n];
            assert!(TestFunction::Ackley.evaluate(&zero).abs() < 1e-12);
            assert_eq!(TestFunction::Rastrigin.evaluate(&zero), 0.0);
            assert_eq!(TestFunction::Sphere.evaluate(&zero), 0.0);
            assert_eq!(TestFunction::Volcano.evaluate(&zero), 0.0);
            assert_eq!(
                TestFunction::Volcano.evaluate(&vec![1.0 / (n as f64).sqrt(); n]),
                0.0
            );
        }
        for n in [2, 3, 10] {
            assert_eq!(TestFunction::Rosenbrock.evaluate(&vec![1.0; n]), 0.0);
        }
    }

    #[test]
    fn poly2d_nominal_optimum() {
        assert!((TestFunction::Poly2D.evaluate(&[2.8, 4.0]) + 20.8).abs() < 0.1);
    }

    #[test]
    fn sawtooth_at_origin() {
        assert!((TestFunction::Sawtooth.evaluate(&[0.0]) - 0.2).abs() < 1e-15);
        assert_eq!(TestFunction::Sawtooth.evaluate(&[0.2]), 1.0);
        assert_eq!(TestFunction::Sawtooth.evaluate(&[-0.8]), 1.0);
    }

    #[test]
    fn multipeak_f1_branches() {
        // x = 0.5 uses the square-root branch: sin(2.5π) = 1, envelope exp(2 ln2 (0.5)^2).
        let expected = -(2.0 * LN_2 * 0.25).exp();
        assert!((TestFunction::MultipeakF1.evaluate(&[0.5]) - expected).abs() < 1e-12);
        // x = 0.1: sin(π/2)^6 = 1, envelope 1.
        assert!((TestFunction::MultipeakF1.evaluate(&[0.1]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_constraints() {
        assert!(TestFunction::Poly2D.make_problem(3).is_err());
        assert!(TestFunction::Rosenbrock.make_problem(1).is_err());
        assert!(TestFunction::Sphere.make_problem(1).is_ok());
        assert!(matches!(
            TestFunction::Poly2D.make_problem(1),
            Err(ProblemError::UnsupportedDimension { dim: 1, .. })
        ));
    }

    #[test]
    fn registry_round_trip() {
        for t in TestFunction::ALL {
            assert_eq!(t.name().parse::<TestFunction>().unwrap(), t);
            let p = t.make_problem(2).unwrap();
            assert_eq!(p.name(), t.name());
            assert_eq!(p.gamma(), t.default_gamma());
        }
        assert_eq!(
            "POLY2d".parse::<TestFunction>().unwrap(),
            TestFunction::Poly2D
        );
        assert!("griewank".parse::<TestFunction>().is_err());
    }

    #[test]
    fn even_functions() {
        let mut rng = RngStream::new(4);
        for t in [
            TestFunction::Ackley,
            TestFunction::Rastrigin,
            TestFunction::Sphere,
            TestFunction::Volcano,
        ] {
            for _ in 0..50 {
                let x: Vec<f64> = (0..4).map(|_| rng.uniform_in(-5.0, 5.0)).collect();
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                assert!((t.evaluate(&x) - t.evaluate(&neg)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn separable_composition() {
        // One active coordinate, the rest at a value where the 1-D term vanishes
        // (or is known), reduces to the 1-D formula.
        let a = 0.37;
        let n = 5.0;
        let x = [a, 0.0, 0.0, 0.0, 0.0];
        assert!((TestFunction::Sphere.evaluate(&x) - a * a).abs() < 1e-15);
        assert!(
            (TestFunction::Rastrigin.evaluate(&x) - TestFunction::Rastrigin.evaluate(&[a])).abs()
                < 1e-12
        );
        let f1 = TestFunction::MultipeakF1.evaluate(&x);
        assert!((f1 - TestFunction::MultipeakF1.evaluate(&[a]) / n).abs() < 1e-12);
        let f2 = TestFunction::MultipeakF2.evaluate(&x);
        assert!((f2 - TestFunction::MultipeakF2.evaluate(&[a]) / n).abs() < 1e-12);
        // sawtooth term is zero at x = 0.5
        let s = TestFunction::Sawtooth.evaluate(&[a, 0.5, 0.5, 0.5, 0.5]);
        assert!((s - (1.0 - (1.0 - TestFunction::Sawtooth.evaluate(&[a])) / n)).abs() < 1e-12);
        // ackley: cos terms at 0 are 1, squares vanish
        let ack = TestFunction::Ackley.evaluate(&x);
        let expected = -20.0 * (-0.2 * (a * a / n).sqrt()).exp()
            - (((2.0 * PI * a).cos() + 4.0) / n).exp()
            + 20.0
            + E;
        assert!((ack - expected).abs() < 1e-12);
    }

    #[test]
    fn reference_worst_case_includes_centre() {
        let p = TestFunction::Rastrigin.make_problem(3).unwrap();
        let mut rng = RngStream::new(8);
        let x = [0.3, -1.2, 2.0];
        assert!(reference_worst_case(&p, &x, 5, &mut rng) >= p.value(&x));
    }

    #[test]
    fn volcano_worst_case_closed_form() {
        let p = TestFunction::Volcano.make_problem(2).unwrap();
        let mut rng = RngStream::new(21);
        let w = reference_worst_case(&p, &[0.0, 0.0], 100_000, &mut rng);
        assert!((w - (1.5f64.sqrt() - 1.0)).abs() < 0.01, "{w}");
    }

    #[test]
    fn worst_case_monotone_in_samples() {
        let p = TestFunction::Ackley.make_problem(2).unwrap();
        let x = [1.0, 2.0];
        let mut prev = f64::NEG_INFINITY;
        for s in [1, 10, 100, 1000] {
            let w = reference_worst_case(&p, &x, s, &mut RngStream::new(3));
            assert!(w >= prev);
            prev = w;
        }
    }
}
