//! Certified brackets for tensor spectral and nuclear norms, their tuple
//! generalizations, and executable checks of how these norms behave under
//! vertical tensor (Kronecker) products and direct sums.
//!
//! Every norm value is reported as an interval `[lower, upper]` backed by a
//! witness: a unit pure tensor or a dual tensor for the lower end, and a
//! flattening or an explicit atomic decomposition for the upper end.

pub mod cli;
pub mod error;
pub mod exec;
pub mod json;
pub mod laws;
pub mod linalg;
pub mod nuclear;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{DenseTensor, Distribution, Field, SimpleTensor, TensorSpace, TensorTuple, C64};
