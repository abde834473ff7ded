//! Command-line front end and file formats for the CSA simulator: scenario
//! files, CSV traces, reports and seed ensembles on top of `csa-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod trace_csv;

pub use config::Scenario;
pub use error::{Result, SimError};
