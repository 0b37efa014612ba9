//! Local solubility statistics for families of varieties over Q.
//!
//! Points of P^n(Q) are enumerated by height, each fibre of a family is
//! tested for local solubility prime by prime, and the number of insoluble
//! places ω is tallied and compared against its predicted Gaussian behaviour.

pub mod arith;
mod error;
pub mod families;
pub mod grouptheory;
pub mod localsolve;
pub mod par;
pub mod projective;
pub mod stats;

pub use error::{Error, Result};
