pub mod bench;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod kmeans;
pub mod pipeline;
pub mod rng;
pub mod sampling;
pub mod sbm;
pub mod spectral;

pub use error::{Result, SscError};
