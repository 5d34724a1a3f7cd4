//! Symmetric linear adversarial robustness (SLAR) game.
//!
//! A defender fits a linear model `f(x) = w·x` under the regularized hinge loss
//! while an adversary shifts each class by a vector inside the ℓ∞ ball of
//! radius ε. The crate provides:
//!
//! * [`dist`]: conditionally independent, symmetric-mean feature laws, sampling
//!   and exact support enumeration,
//! * [`model`]: losses, utilities, worst-case and equilibrium perturbation plans,
//!   certified margins,
//! * [`solve`]: an exact dual solver with a duality-gap certificate and a
//!   seeded mini-batch Adam trainer,
//! * [`game`]: adversarial training as alternating best response, optimal
//!   adversarial training, the equilibrium construction and its verification,
//! * [`oracle`]: brute-force and closed-form checks of the structural results
//!   (sign lemmas, norm bounds, threshold conditions, grid maximality).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dist;
pub mod error;
pub mod format;
pub mod game;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod solve;

pub use dist::{Dataset, DistributionSpec, FeatureKind, FeatureSpec, Samples};
pub use error::{Error, Result};
pub use game::{Arena, GameConfig, InitialModel, Method, Trajectory, TrajectoryRecord};
pub use model::{Accuracy, PerturbationPlan, Weights};
pub use solve::{FitReport, OptimizerConfig, SolverMethod};
