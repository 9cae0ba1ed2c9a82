//! Special functions and quadrature used by every statistic.

pub mod chaudhry;
pub mod gamma;
pub mod kummer;
pub mod laguerre;
pub mod quad;
pub mod sum;
pub mod tricomi;

pub use chaudhry::{chaudhry_gamma, ln_chaudhry_gamma};
pub use gamma::{binomial, factorial, gamma, ln_gamma, pochhammer};
pub use kummer::{kummer_1f1_m1, ln_hyp0f1_1, ln_kummer_1f1_m1};
pub use laguerre::{cached_rule, gauss_laguerre, QuadratureRule};
pub use sum::CompensatedSum;
pub use tricomi::{ln_tricomi_u, tricomi_u};
