//! Exact-rational norms on finitely supported vectors, domination
//! certificates, norm extension along flags, and the ordinal-indexed
//! separable domination demo.

// Errors carry exact rationals as diagnostics; boxing them buys nothing here.
#![allow(clippy::result_large_err)]

pub mod domination;
pub mod geometry;
pub mod norms;
pub mod ordinals;
pub mod par;
pub mod sampling;
pub mod scalar;
pub mod topology;
pub mod vectorspace;

pub use norms::{NormExpr, NormKind, WeightFunction};
pub use scalar::Scalar;
pub use vectorspace::{FinVector, Flag, Index, IndexSet};
