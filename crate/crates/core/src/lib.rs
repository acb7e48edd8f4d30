//! Design and verification toolkit for parity-constraint annealer encodings.
//!
//! - [`gf2`]: support vectors and GF(2) elimination.
//! - [`code`]: parity codes (built-in layouts, custom files, logical operators,
//!   spin labels, syndromes).
//! - [`gadgets`]: constraint Hamiltonians and program compilation.
//! - [`spectral`]: exact diagonalisation, anneal gaps, metrics and the
//!   subspace conditions checker.
//! - [`lab`]: instance generation, file formats and parameter sweeps.

pub mod basis;
pub mod code;
pub mod gadgets;
pub mod gf2;
pub mod lab;
pub mod model;
pub mod sign;
pub mod spectral;

pub use sign::Sign;
