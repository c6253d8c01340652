//! Numerical kernels shared by the rest of the crate: finite differences,
//! adaptive quadrature, an embedded Runge–Kutta integrator, cubic roots and
//! the planar linear classification.

mod classify;
mod diff;
mod grid;
mod ode;
mod quad;
mod roots;

pub use classify::{classify_2x2, EigenClass, Mat2, CLASSIFY_TOL};
pub use diff::{default_step, fd_derivative, fd_partial};
pub use grid::{Grid1D, Grid2D};
pub use ode::{ode_solve, DenseSegment, OdeOptions, StopEvent, Trajectory};
pub use quad::quadrature;
pub use roots::{cubic_real_roots, RealRoot};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("non-finite sample of f at {at}")]
    NonFiniteSample { at: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature on [{lo}, {hi}] did not reach tolerance {tol} (error estimate {estimate})")]
    ToleranceNotMet { lo: f64, hi: f64, tol: f64, estimate: f64 },
    #[error("step size underflow near t = {t}; last state {state:?}")]
    SingularityEncountered { t: f64, state: Vec<f64> },
    #[error("polynomial has no roots (nonzero constant)")]
    NoRoots,
    #[error("all polynomial coefficients are zero")]
    ZeroPolynomial,
}
