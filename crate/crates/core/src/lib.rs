//! Periodic and subharmonic solutions of the nerve fiber equation
//!
//! ```text
//! v'' - g v + n(x) F(v) = 0
//! ```
//!
//! with a β-periodic positive weight `n` and an N-shaped nonlinearity `-F`.
//! The crate follows the twist-map route: it builds the Poincaré map of the
//! planar system, measures rotation numbers around the center `(a_n̄, 0)` of the
//! autonomous comparison system, certifies the annulus twist conditions and
//! then locates fixed points of the iterated map.
//!
//! Module map:
//!
//! * [`model`] nonlinearity, its bounded modification outside `[0, 1]`, weights.
//! * [`flow`] adaptive integration with dense output, Poincaré map and Jacobian.
//! * [`rotation`] angle unwrapping, rotation numbers, outer radius search.
//! * [`energy`] autonomous system: equilibrium, band, level curves, time map.
//! * [`orbits`] annulus, twist certificate, fixed point search, classification.
//! * [`cli`] scenario config format and the experiment runners.

pub mod cli;
pub mod energy;
mod error;
pub mod flow;
pub mod model;
pub mod numeric;
pub mod orbits;
pub mod rotation;

pub use error::{Error, Result};
pub use flow::{IntegratorSettings, PhaseState, Trajectory, VectorField};
pub use model::{ModifiedNonlinearity, Nonlinearity, SplitStrategy, SystemParams, Weight};
