pub mod error;
pub mod fit;
pub mod harness;
pub mod irregularity;
pub mod kinetic;
pub mod paths;
pub mod regularity;
pub mod solver;

pub use error::{Error, Result};
