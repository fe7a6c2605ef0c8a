pub mod bounds;
pub mod error;
pub mod profile;
pub mod rational;
pub mod residue;
pub mod search;
pub mod sumset;
pub mod verdict;

pub use error::{Error, Result};
