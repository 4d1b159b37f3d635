//! Classical simulability certification for quantum multiple access channels.
//!
//! The crate builds channels p(a | x₁, …, x_K) from qubit encodings and a
//! joint measurement, enumerates deterministic classical strategies with one
//! bit per sender, evaluates linear witnesses, decides membership in the
//! classical polytope with an exact rational simplex, and simulates the
//! entanglement-assisted protocol based on remote state preparation.

pub mod error;
pub mod families;
pub mod linalg;
pub mod lp;
pub mod mac;
pub mod membership;
pub mod rsp;
pub mod strategies;
pub mod witness;

/// Exact rational arithmetic used for channels, witnesses and the LP.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use mac::{Mac, MacShape};
