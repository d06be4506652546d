use serde::{Deserialize, Serialize};

use crate::neurons::NeuronModel;

/// Index of a population inside a [`Network`](super::Network).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PopulationId(pub usize);

/// Index of a projection inside a [`Network`](super::Network).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectionId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationModel {
    Neuron(NeuronModel),
    /// Spike generator: Poisson at `rate_hz` plus any forced spikes.
    Source { rate_hz: f64 },
}

/// Independent Poisson input to every neuron: each event adds `weight` to
/// the input current of its step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Background {
    pub rate_hz: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub name: String,
    pub size: usize,
    pub model: PopulationModel,
    /// Multiplies the summed input current before it reaches the model.
    pub input_gain: f64,
    /// Euler sub-steps per network tick.
    pub substeps: u32,
    /// Ticks a neuron is clamped at reset after a spike.
    pub refractory_steps: u32,
    /// Constant current added every tick.
    pub bias: f64,
    pub background: Option<Background>,
    /// Time constant (ms) of a unit-gain low-pass filter on the summed
    /// synaptic and background input; 0 passes input straight through.
    /// Injected current and bias are never filtered.
    pub synaptic_tau: f64,
}

impl PopulationSpec {
    pub fn neurons(name: impl Into<String>, size: usize, model: NeuronModel) -> Self {
        Self {
            name: name.into(),
            size,
            model: PopulationModel::Neuron(model),
            input_gain: 1.0,
            substeps: 1,
            refractory_steps: 0,
            bias: 0.0,
            background: None,
            synaptic_tau: 0.0,
        }
    }

    pub fn source(name: impl Into<String>, size: usize, rate_hz: f64) -> Self {
        Self { model: PopulationModel::Source { rate_hz }, ..Self::neurons(name, size, NeuronModel::Lif(Default::default())) }
    }

    pub fn with_input_gain(mut self, gain: f64) -> Self {
        self.input_gain = gain;
        self
    }

    pub fn with_substeps(mut self, substeps: u32) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn with_refractory(mut self, steps: u32) -> Self {
        self.refractory_steps = steps;
        self
    }

    pub fn with_bias(mut self, bias: f64) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_background(mut self, rate_hz: f64, weight: f64) -> Self {
        self.background = Some(Background { rate_hz, weight });
        self
    }

    pub fn with_synaptic_tau(mut self, tau_ms: f64) -> Self {
        self.synaptic_tau = tau_ms;
        self
    }

    pub fn is_source(&self) -> bool {
        matches!(self.model, PopulationModel::Source { .. })
    }
}
