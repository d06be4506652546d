//! Synaptic learning rules: pair-based STDP, rate-based Hebbian and BCM,
//! short-term plasticity, reward-modulated STDP and error-driven targets.

mod rules;
mod stdp;
mod targets;

pub use rules::{
    bcm_update, hebbian_accumulate, hebbian_update, rstdp_step, stp_on_spike, BcmParams, BcmState,
    RstdpState, StpParams, StpState,
};
pub use stdp::{apply_stdp, batch_stdp, pair_delta, stdp_delta, stdp_window, Pairing, StdpParams};
pub use targets::{feedback_target, pbln_normalize, penultimate_target};
