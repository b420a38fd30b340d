//! Approximate GKP code states computed exactly through theta-function closed forms.
//!
//! The crate is organised bottom-up:
//!
//! - [`theta`]: one-dimensional theta functions with characteristics and the genus-2 Riemann theta function.
//! - [`params`]: the three conventional approximations, the standard form and the exact conversions between them.
//! - [`reps`]: position, momentum, grid and Fock representations.
//! - [`wigner`]: Wigner functions of `|j><j'|` by three independent routes.
//! - [`observables`]: normalization, inner products and the average photon number.
//! - [`oracle`]: brute-force definitions used to cross-check the closed forms.
//! - [`selftest`]: the cross-route checks exposed by the command line tool.

pub mod error;
pub mod params;
pub mod quadrature;
pub mod observables;
pub mod oracle;
pub mod reps;
pub mod selftest;
pub mod theta;
pub mod wigner;

pub use error::{GkpError, Result};
pub use params::{CodeLabel, StandardParams};
pub use theta::{SeriesControl, ThetaArgs};
