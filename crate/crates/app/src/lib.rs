//! Command-line tools, file formats and the HTTP service.

pub mod cli;
pub mod error;
pub mod io;
pub mod play;
pub mod server;
pub mod tables;
