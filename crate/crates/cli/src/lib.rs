//! Artifact plumbing behind the `spinamp` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;
