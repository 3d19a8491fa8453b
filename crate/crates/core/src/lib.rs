//! Boundary non-crossing probabilities F_T(h) of the Slepian process and
//! high-accuracy approximations of Shepp's constants Λ(h) = −lim (1/T) log
//! F_T(h) and λ(h) = e^{−Λ(h)}.
//!
//! The crate provides:
//! - exact closed forms for T ≤ 2 and tensor-product quadrature of the
//!   determinant representation of Fₙ for integer horizons up to 5
//!   ([`exact`]);
//! - Nystrom dominant-eigenvalue computations for the one- and two-step
//!   transition operators ([`eigen`]);
//! - the approximation family A0-A8 with rigorous bounds and large-h
//!   expansions ([`approximations`]);
//! - a deterministic Monte Carlo harness for the Slepian process and three
//!   comparison stationary Gaussian processes ([`montecarlo`]).

pub mod approximations;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod normal;
pub mod quadrature;
pub mod tuning;

pub use approximations::{ApproximationId, BoundsResult, SheppResult};
pub use error::{Error, Result};
pub use montecarlo::{McConfig, McEstimate, ProcessSpec};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use tuning::Tuning;
