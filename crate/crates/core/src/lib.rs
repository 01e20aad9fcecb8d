pub mod calibration;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod formats;
pub mod phantom;
pub mod reconstruction;
pub mod regression;
pub mod seed;
pub mod spectral;

pub use error::{Error, Result};
