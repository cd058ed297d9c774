//! Exact-arithmetic toolkit for graded skew Clifford algebras: skew
//! polynomial quadric systems, normalizing-sequence certification,
//! base-point-freeness of the associated quadric system, and truncated
//! noncommutative Groebner machinery for Hilbert data.

pub mod error;
pub mod freealg;
pub mod geometry;
pub mod gsca;
pub mod instance;
pub mod ncgb;
pub mod scalars;
pub mod skewring;

pub use error::{Error, Result};
