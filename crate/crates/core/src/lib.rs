//! Interval analysis for a Solidity subset, with detectors for six classes
//! of defects.

pub mod cfg;
pub mod cli;
pub mod detectors;
pub mod domain;
pub mod engine;
pub mod error;
pub mod frontend;
pub mod report;

pub use error::{Error, Result};
