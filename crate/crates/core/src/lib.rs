pub mod bounds;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod fusion;
pub mod linalg;
pub mod solver;
pub mod subspace;
pub mod text;

pub use error::{Error, Result};
