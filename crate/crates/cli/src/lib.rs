//! Batch driver for `persistack-core`: stack decoding, the end-to-end
//! pipeline, artifact export and tracing comparison.

pub mod barcode;
pub mod compare;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;

pub use error::{CliError, Result, Stage};
