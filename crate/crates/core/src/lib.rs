//! Phase-field fracture for linearized and finite elasticity.

// Tensor kernels index several arrays in lockstep, and `!(x > 0.0)` is the
// intended way to reject NaN together with non-positive values.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod driving;
pub mod error;
pub mod evolution;
pub mod fem;
pub mod finite;
pub mod linear;
pub mod scenario;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{SpectralDecomp, SymTensor, Tensor2};
