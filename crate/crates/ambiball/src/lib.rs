//! Ambiguity balls for probability measures on finite metric spaces.
//!
//! A discrete probability measure μₙ with n atoms, a radius ε, and a choice of
//! metric on measures (Prokhorov or Kantorovich) define a ball B_ε(μₙ). This
//! crate computes both metrics exactly via small linear programs, builds an
//! explicit finite superset of the extreme points of B_ε(μₙ), optimizes
//! worst-case objectives over the ball, and cross-checks the structural claims
//! behind the superset with a brute-force polytope oracle.
//!
//! Module map:
//!
//! * [`metric_space`]: validated finite metric spaces and set inflation.
//! * [`measures`]: discrete measures and couplings in canonical form.
//! * [`lp`]: a dense two-phase simplex kernel, generic over `f64` and
//!   arbitrary-precision rationals.
//! * [`distances`]: Prokhorov and Kantorovich distances, dual certificates,
//!   and coupling feasibility at a given radius.
//! * [`extreme_sets`]: the candidate families whose closures contain every
//!   extreme point of the ball, with γ-region geometry and adjacency-class
//!   pruning.
//! * [`optimizer`]: worst-case (distributionally robust) optimization over
//!   the ball, by LP and by candidate enumeration.
//! * [`oracle`]: H-representations and exhaustive vertex enumeration used to
//!   verify the structural claims on small instances.
//! * [`io`]: JSON/CSV formats used by the `ambiball` command-line tool.
//! * [`cli`]: the command-line entry point.
//!
//! ```
//! use ambiball::metric_space::FiniteMetricSpace;
//! use ambiball::measures::DiscreteMeasure;
//! use ambiball::distances;
//! use std::sync::Arc;
//!
//! let space = Arc::new(FiniteMetricSpace::new(
//!     vec!["a".into(), "b".into()],
//!     vec![vec![0.0, 1.0], vec![1.0, 0.0]],
//! ).unwrap());
//! let mu1 = DiscreteMeasure::dirac(space.clone(), 0);
//! let mu2 = DiscreteMeasure::new(space.clone(), vec![(0, 0.7), (1, 0.3)]).unwrap();
//! let (dk, _plan) = distances::kantorovich(&mu1, &mu2).unwrap();
//! assert!((dk - 0.3).abs() < 1e-12);
//! ```

pub mod cli;
pub mod distances;
pub mod extreme_sets;
pub mod io;
pub mod lp;
pub mod measures;
pub mod metric_space;
pub mod optimizer;
pub mod oracle;

pub use distances::BallMetric;
pub use measures::{Coupling, DiscreteMeasure};
pub use metric_space::FiniteMetricSpace;
