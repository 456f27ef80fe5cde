//! Compressed sensing with learned sparse components.
//!
//! Hard sparse-recovery problems `Ax = b` are solved through a component
//! matrix `X` learned from easy training problems `B = AXZ`: each training
//! column is solved by ℓ1 minimization, the sparse solutions are factored as
//! `Ȳ = X̄Z̄` up to signed scaled permutation, and `b` is then recovered as
//! `x = X̄ S z` with a sparse combinator `z`.

pub mod cli;
pub mod dictlearn;
pub mod error;
pub mod harness;
pub mod io;
pub mod l1;
pub mod linalg;
mod lp;
pub mod models;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
