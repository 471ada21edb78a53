//! Command-line front end for the radical-pair density-matrix models.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod table;

pub use error::CliError;
