pub mod cli;
pub mod error;
pub mod information;
pub mod matcore;
pub mod measurement;
pub mod repeated;

pub use error::{Error, Result};
