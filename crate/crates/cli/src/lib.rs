//! Library surface of the command-line tool: file formats, JSON config
//! schemas, subcommand implementations, and the parallel pipeline glue.
//! Kept as a lib so integration tests can drive the same code paths the
//! binary uses.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod viz;
