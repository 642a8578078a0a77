//! Command implementations behind the `shadowrec` binary.

pub mod audit;
pub mod config;
pub mod error;
pub mod hull;
pub mod output;
pub mod shadow;
pub mod verify;

pub use audit::parse_grid;
pub use config::{parse_config, RunConfig};
pub use error::CliError;
pub use hull::{parse_queries, parse_set_file};
