//! Derivative-free search for box-constrained min-max problems under
//! implementation uncertainty.
//!
//! A [`Problem`] couples a black-box objective `f` with box bounds and an
//! uncertainty radius `Γ`. The quantity being minimised is the worst-case
//! cost `g(x) = max_{‖Δ‖ ≤ Γ} f(x + Δ)`, which is only ever estimated by
//! sampling. Every search drives a single [`EvaluationLedger`], which owns
//! the evaluation budget and the full history of evaluated points.
//!
//! The main search is [`leh::leh_search`]: it repeatedly moves to the centre
//! of the largest hypersphere that contains no *high cost point* (a point
//! whose value is at least the current best robust estimate), and aborts
//! neighbourhood searches as soon as they cannot improve the incumbent.
//! Three placement strategies are available: [`leh::RandomLeh`],
//! [`leh::GaLeh`] and, for 2D problems, [`voronoi::VoronoiLeh`].
//!
//! Two baselines live in [`comparators`], and [`harness`] runs repeated
//! seeded experiments and writes CSV summaries.
//!
//! ```
//! use robustmin::{leh, testbed::TestFunction, EvaluationLedger, RngStream};
//!
//! let problem = TestFunction::Sphere.make_problem(2).unwrap();
//! let mut ledger = EvaluationLedger::new(problem.dim(), 2_000);
//! let mut rng = RngStream::new(7);
//! let mut calc = leh::RandomLeh::default();
//! let outcome = leh::leh_search(&problem, &mut ledger, &mut rng, &mut calc, 1, 100);
//! assert!(outcome.evaluations_used <= 2_000);
//! assert!(problem.contains(&outcome.best_point));
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comparators;
pub mod geometry;
pub mod harness;
pub mod heuristic;
pub mod inner;
pub mod ledger;
pub mod leh;
pub mod problem;
pub mod rng;
pub mod testbed;
pub mod voronoi;

pub use geometry::{min_distance_to_set, sample_in_ball, sample_in_box, PointSet};
pub use inner::{inner_maximise, InnerResult};
pub use ledger::{EvaluationLedger, Exhausted, HighCostSet};
pub use leh::{SearchOutcome, StopReason, TraceEntry};
pub use problem::{Problem, ProblemError};
pub use rng::RngStream;
