//! Command-line front end for the `fsosf` crate: parameter sweeps, point
//! evaluation and raw Monte-Carlo sample dumps, emitted as CSV or JSON.

pub mod app;
pub mod emit;
pub mod spec;
pub mod sweep;
