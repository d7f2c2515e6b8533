//! Command-line front end: commands, result records, suites and the
//! acceptance checks.

pub mod commands;
pub mod criteria;
pub mod record;
pub mod suite;
