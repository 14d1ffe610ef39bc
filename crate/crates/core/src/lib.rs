pub mod bench;
pub mod classifier;
mod codec;
pub mod data_io;
pub mod error;
pub mod linalg;
pub mod preprocess;
pub mod solvers;

pub use error::{Error, Result};
