use spike_core::{EncodingError, NetworkError, PlasticityError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Plasticity(#[from] PlasticityError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no decisions were made in the test window")]
    NoDecisions,
    #[error("connectome line {line}, column `{column}`: {message}")]
    Connectome { line: u64, column: String, message: String },
    #[error("connectome file: {0}")]
    ConnectomeIo(#[from] std::io::Error),
    #[error("dataset is empty")]
    EmptyDataset,
}

pub(crate) fn invalid(msg: impl Into<String>) -> CircuitError {
    CircuitError::InvalidConfig(msg.into())
}
