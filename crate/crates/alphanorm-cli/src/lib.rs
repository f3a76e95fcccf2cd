//! Command-line front end for alpha-norm sparse regression: CSV ingestion,
//! schema-driven encoding, and the subcommands that drive fitting, model
//! selection, simulation, and promotion-lift analysis.

pub mod commands;
pub mod data;
pub mod encode;
pub mod error;
pub mod output;
pub mod schema;

pub use commands::{run, Cli, Command};
pub use data::{load_csv, Column, RawDataset};
pub use encode::{one_hot, EncodedDesign};
pub use error::{CliError, CliResult};
pub use schema::DatasetSchema;
