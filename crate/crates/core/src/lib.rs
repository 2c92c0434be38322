//! Exact polyhedral variational analysis.

pub mod certify;
pub mod cone;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod sets;

pub use error::{Error, Result};
