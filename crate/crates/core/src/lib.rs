//! Algebra and numerics for linear constant-coefficient differential
//! operators of constant rank.

pub mod appendix;
pub mod dsl;
pub mod error;
pub mod nulllag;
pub mod operator;
pub mod potential;
pub mod spectral;
pub mod par;
pub mod polyalg;

pub use error::{Error, Result};
