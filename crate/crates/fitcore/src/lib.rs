//! Weighted nonlinear least-squares fitting.
//!
//! The engine is a damped Gauss-Newton iteration (Levenberg-Marquardt
//! schedule): it solves `(J^T J + lambda diag(J^T J)) step = -J^T r` and
//! adapts the damping factor by x10 on a rejected step and /10 on an
//! accepted one. Box bounds are enforced by clamping trial parameters, with
//! parameters pinned at a bound excluded from the step while the gradient
//! pushes outward. Jacobians default to central finite differences; models
//! may supply analytic ones.
//!
//! All fits in this workspace (lineshapes, decay histograms, fringe
//! visibilities, tuning regressions) run through [`least_squares_fit`].

mod jacobian;
mod lm;
mod model;
mod result;

pub use jacobian::numerical_jacobian;
pub use lm::least_squares_fit;
pub use model::{CurveModel, FitModel};
pub use result::{parameter_uncertainties, FitResult};

use thiserror::Error;

/// Hard failures of the fitting engine. Non-convergence is *not* an error
/// here: it is reported through [`FitResult::converged`] so callers can
/// attach their own context.
#[derive(Debug, Error)]
pub enum FitError {
    #[error("model has {expected} parameters but init supplies {got}")]
    BadInit { expected: usize, got: usize },
    #[error("parameter {index}: lower bound {lower} exceeds upper bound {upper}")]
    BadBounds { index: usize, lower: f64, upper: f64 },
    #[error("residuals are non-finite at the initial parameters")]
    NonFiniteInit,
    #[error("non-finite residuals while probing parameter {index} for the jacobian")]
    NonFiniteProbe { index: usize },
    #[error("jacobian is rank deficient: parameters {indices:?} have no effect on the residuals")]
    RankDeficient { indices: Vec<usize> },
}
