//! Statistics of the fluctuating second-order scattering fading model.
//!
//! The received signal is a randomly fluctuating line-of-sight term, a
//! Rayleigh term and a double-Rayleigh term. Conditioning on the power of
//! the second factor of the double-Rayleigh product turns the model into a
//! Rician-shadowed one, so every statistic is an exponential-weight average
//! of a Rician-shadowed kernel over that power.

pub mod error;
pub mod montecarlo;
pub mod params;
pub mod rician_shadowed;
pub mod special;
pub mod stats;

#[cfg(test)]
mod oracle;

pub use error::{Error, Result};
pub use params::{db_to_linear, linear_to_db, ComponentWeights, ModelClass, ModelParams};
