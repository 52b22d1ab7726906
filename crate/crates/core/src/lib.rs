pub mod asymptotics;
pub mod cli;
pub mod discrimination;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod simulate;
pub mod sliver;
pub mod table;

pub use error::{Error, Result};
