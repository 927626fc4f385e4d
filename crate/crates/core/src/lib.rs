//! First-order least-squares finite elements for `−A:D²u = f` in two dimensions.

pub mod adapt;
pub mod assembly;
pub mod cli;
pub mod dofmap;
pub mod elements;
pub mod linalg;
pub mod error;
pub mod estimate;
pub mod mesh;
pub mod problems;
pub mod quadrature;

pub use error::{Error, Result};
