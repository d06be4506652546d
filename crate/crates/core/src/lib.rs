//! Core building blocks for clock-driven spiking network simulation.
//!
//! * [`neurons`]: IF, LIF, aEIF, Izhikevich and Hodgkin-Huxley point neurons.
//! * [`plasticity`]: STDP, Hebbian, BCM, short-term plasticity, reward-modulated
//!   STDP, batch STDP, feedback targets and potential normalisation.
//! * [`encoding`]: rate, phase, latency and population codes.
//! * [`network`]: populations, masked projections with delays, recorders.
//!
//! With the default `parallel` feature, per-neuron work inside a step runs
//! on the rayon pool. Results never depend on the number of worker threads.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod encoding;
pub mod error;
pub mod network;
pub mod neurons;
pub mod par;
pub mod plasticity;

pub use error::{EncodingError, NetworkError, NeuronError, PlasticityError};
