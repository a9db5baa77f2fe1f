pub mod error;
pub mod expr;
pub mod sample;

pub use error::{Error, Result};
pub mod catalog;
pub mod extension;
pub mod geometry;
pub mod linalg;
pub mod par;
pub mod projective;
pub mod qe_solver;
pub mod verdict;
