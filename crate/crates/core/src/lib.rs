extern crate openblas_src;

pub mod error;
pub mod quad;
pub mod specfun;
pub mod waves;
pub mod modal;
pub mod sampling;
pub mod solver;
pub mod geometry;

pub use error::{EpwError, Result};
