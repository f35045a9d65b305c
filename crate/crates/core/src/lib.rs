//! Symbolic differential geometry for distributions, their symmetries and
//! involutivity, with a worked second-order PDE model and a numeric harness.

pub mod distribution;
pub mod expr;
pub mod fgordon;
pub mod geometry;
pub mod linalg;
pub mod random;
pub mod symmetry;

pub use expr::{Expr, Genericity, Symbol, ZeroStatus};
