//! Cohomology of finite groups over finite fields, with tools for deciding
//! productivity of degree-n classes.

pub mod acceptance;
pub mod cohomology;
pub mod complex;
pub mod contract;
pub mod error;
pub mod field;
pub mod freemap;
pub mod group;
pub mod lzeta;
pub mod matrix;
pub mod parse;
pub mod postnikov;
#[cfg(test)]
mod properties;
pub mod resolution;
pub mod steenrod;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use matrix::{KMatrix, Subspace};
