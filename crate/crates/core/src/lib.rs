//! Simulation of SU(2)_k and Jones-Kauffman anyon models: algebraic data,
//! fusion-tree states, qubit encodings, measurement-based protocols and
//! supporting analysis.

pub mod analysis;
pub mod encoding;
pub mod error;
pub mod model;
pub mod protocol;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;
