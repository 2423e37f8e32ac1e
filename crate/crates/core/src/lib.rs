//! Learning Kolmogorov models from binary-outcome data.

pub mod bench;
pub mod bqp;
pub mod cli;
pub mod data;
pub mod eigen;
pub mod error;
pub mod interpret;
pub mod lcqp;
pub mod model;
pub mod oracles;
pub mod persist;
pub mod rounding;
pub mod trainer;

pub use error::{KmError, Result};
