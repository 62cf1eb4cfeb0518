//! Stationary free boundaries, radius dynamics and spectral invertibility for a
//! radially symmetric tumor model with a threshold (Heaviside) consumption switch.
//!
//! Modules build on each other bottom-up: [`cubic`] → [`stationary`] → [`dynamics`]
//! and [`spectral`]. [`oracle`] holds brute-force validators that the solvers never call.

// `!(x > 0.0)` style guards are deliberate: NaN must take the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cubic;
pub mod dynamics;
pub mod error;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod spectral;
pub mod stationary;

pub use error::{Error, Result};
pub use params::ModelParams;
