use std::path::PathBuf;

use spike_circuits::CircuitError;
use spike_core::NeuronError;

use crate::config::Violation;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown experiment `{name}`; valid experiments: {valid}")]
    UnknownExperiment { name: String, valid: String },
    #[error("invalid config:\n{}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write outputs to {}: {source}", .path.display())]
    Unwritable { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Neuron(#[from] NeuronError),
    #[error("worker pool: {0}")]
    Workers(String),
}

impl CliError {
    /// Process exit status: 2 for usage and config problems, 1 for
    /// failures while running or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownExperiment { .. } | Self::Invalid(_) => 2,
            _ => 1,
        }
    }
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}
