//! Configuration, mesh files, generators and run orchestration.

pub mod config;
pub mod generate;
pub mod meshio;
pub mod report;
pub mod run;

pub use config::{build_model, generate_mesh, load_model, LoadedModel, ModelConfig};
pub use report::{Check, RunReport};
pub use run::{run, Command};
