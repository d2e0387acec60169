pub mod cli_io;
pub mod curve_model;
pub mod equidistants;
pub mod error;
pub mod gcs_analysis;
pub mod generating_family;
pub mod numeric;
pub mod parallel_chords;

pub use error::{Error, Result};
