//! Library side of the command-line tool.

pub mod app;
pub mod format;
