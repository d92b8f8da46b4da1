//! Excited-state dynamics of two-level emitters coupled to medium-dressed
//! photonic continua, with and without the rotating-wave approximation.

#![allow(
    clippy::excessive_precision,
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord
)]

pub mod dynamics;
pub mod error;
pub mod greens;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod presets;
pub mod quadrature;
pub mod special;
pub mod units;
pub mod weak;

pub use error::{Error, Result};
