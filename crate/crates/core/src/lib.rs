pub mod config;
pub mod corpus;
pub mod crossings;
pub mod curve;
pub mod error;
pub mod geom;
pub mod halfint;
pub mod homotopy;
pub mod indexing;
pub mod invariants;
pub mod laurent;
pub mod quadrature;
pub mod render;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
