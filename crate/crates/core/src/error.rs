use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeuronError {
    #[error("input current is not finite: {0}")]
    NonFiniteInput(f64),
    #[error("timestep must be positive and finite, got {0}")]
    InvalidTimestep(f64),
    #[error("timestep {dt} ms exceeds the stable limit of {max} ms")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("membrane potential diverged (v = {v})")]
    Diverged { v: f64 },
    #[error("invalid parameter `{param}`: requires {constraint}")]
    InvalidParams { param: &'static str, constraint: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlasticityError {
    #[error("spike trains differ in duration ({pre} vs {post} steps)")]
    DurationMismatch { pre: usize, post: usize },
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    #[error("invalid parameter `{param}`: requires {constraint}")]
    InvalidParams { param: &'static str, constraint: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodingError {
    #[error("intensity {0} lies outside [0, 1]")]
    OutOfRange(f64),
    #[error("invalid encoder configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("cannot decode an all-zero population response")]
    AllZeroResponses,
    #[error("spike time {time} outside window of {duration} steps")]
    EventOutOfWindow { time: u32, duration: u32 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("population `{0}` already exists")]
    DuplicatePopulation(String),
    #[error("population `{0}` must contain at least one neuron")]
    EmptyPopulation(String),
    #[error("unknown population {0}")]
    UnknownPopulation(String),
    #[error("unknown projection {0}")]
    UnknownProjection(usize),
    #[error("shape mismatch: {what} (expected {expected:?}, got {got:?})")]
    ShapeMismatch { what: &'static str, expected: (usize, usize), got: (usize, usize) },
    #[error("{sign} projection cannot hold weight {weight}")]
    SignViolation { sign: &'static str, weight: f64 },
    #[error("neuron range {start}..{end} exceeds population `{population}` of size {size}")]
    RangeOutOfBounds { population: String, start: usize, end: usize, size: usize },
    #[error("stimulus onset {onset} is after offset {offset}")]
    InvalidStimulus { onset: u64, offset: u64 },
    #[error("a run needs at least one step")]
    ZeroSteps,
    #[error("population `{population}` neuron {neuron}: {source}")]
    Neuron {
        population: String,
        neuron: usize,
        #[source]
        source: NeuronError,
    },
    #[error(transparent)]
    InvalidModel(#[from] NeuronError),
    #[error("invalid parameter `{param}`: requires {constraint}")]
    InvalidParams { param: &'static str, constraint: &'static str },
}
