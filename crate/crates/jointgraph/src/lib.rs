//! File formats, experiment sweeps, plotting and the command-line front end
//! for `jointgraph-core`.

#![forbid(unsafe_code)]

pub mod cli;
mod error;
pub mod harness;
pub mod io;
pub mod plot;

pub use error::{Error, Result};
