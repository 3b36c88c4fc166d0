//! Reconstruction of weighted Riemannian structure from diffusion generators.
//!
//! The crate is `no_std` with `alloc`. File formats and the command line live
//! in the companion `gammaforge` crate.

#![no_std]
// `!(x > t)` rejects NaN along with small values
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod error;
pub mod expr;
pub mod generator;
pub mod jet;
pub mod oracle;
pub mod quadrature;
pub mod reconstruction;
pub mod semigroup;
pub mod tensor;

pub use error::{Error, Result};
