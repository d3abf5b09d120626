//! Computations with Soergel bimodules: Kazhdan-Lusztig combinatorics,
//! light leaves, double leaves and idempotent projectors onto
//! indecomposable summands of Bott-Samelson bimodules.

pub mod bimod;
pub mod cache;
pub mod coxeter;
pub mod error;
pub mod hecke;
pub mod leaves;
pub mod linalg;
pub mod poly;
pub mod projector;

pub use error::{Error, Result};
