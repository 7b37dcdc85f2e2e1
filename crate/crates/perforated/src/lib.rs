pub mod asymptotics;
pub mod cli;
pub mod convergence;
pub mod densities;
pub mod dirichlet;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod potentials;
pub mod structure;

pub use error::{Error, Result};
