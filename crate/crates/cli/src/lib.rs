//! Documents and commands behind the `couples` binary.

pub mod commands;
pub mod document;
pub mod fixtures;
