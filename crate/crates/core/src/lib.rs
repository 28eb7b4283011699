//! Numerical certification of eventual (strong) positivity for matrix
//! semigroups `e^{tA}` and a gallery of concrete generators.

pub mod error;
pub mod matrix;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub mod spectral;

pub mod json;
pub mod models;
pub mod certify;
