use serde::{Deserialize, Serialize};

use crate::error::PlasticityError;

/// Hebbian coincidence `x_pre · x_post`.
pub fn hebbian_update(x_pre: f64, x_post: f64) -> f64 {
    x_pre * x_post
}

/// Hebbian change summed over aligned activity series.
pub fn hebbian_accumulate(pre: &[f64], post: &[f64]) -> Result<f64, PlasticityError> {
    if pre.len() != post.len() {
        return Err(PlasticityError::DimensionMismatch {
            what: "activity series length",
            expected: pre.len(),
            got: post.len(),
        });
    }
    Ok(pre.iter().zip(post).map(|(&a, &b)| hebbian_update(a, b)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcmParams {
    /// Weight decay rate ε.
    pub epsilon: f64,
    /// Horizon (updates) of the exponential average defining θ_M.
    pub theta_window: f64,
}

impl Default for BcmParams {
    fn default() -> Self {
        Self { epsilon: 0.0, theta_window: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BcmState {
    pub theta_m: f64,
}

/// BCM rule `Δw = y (y - θ_M) x - ε w`, evaluated with the current θ_M;
/// θ_M then moves toward `y` by `1 / theta_window`.
pub fn bcm_update(x: f64, y: f64, st: &BcmState, w: f64, p: &BcmParams) -> (f64, BcmState) {
    let dw = y * (y - st.theta_m) * x - p.epsilon * w;
    let rate = 1.0 / p.theta_window.max(1.0);
    let theta_m = (st.theta_m + rate * (y - st.theta_m)).max(0.0);
    (dw, BcmState { theta_m })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StpParams {
    /// Utilisation fraction U in (0, 1].
    pub u: f64,
    pub tau_fac: f64,
    pub tau_rec: f64,
}

impl StpParams {
    pub fn validate(&self) -> Result<(), PlasticityError> {
        if !(self.u > 0.0 && self.u <= 1.0) {
            return Err(PlasticityError::InvalidParams { param: "u", constraint: "0 < U <= 1" });
        }
        if !(self.tau_fac > 0.0 && self.tau_rec > 0.0) {
            return Err(PlasticityError::InvalidParams {
                param: "tau",
                constraint: "tau_fac, tau_rec > 0",
            });
        }
        Ok(())
    }
}

/// Utilisation `u` and available resources `r` at the most recent spike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StpState {
    pub u: f64,
    pub r: f64,
    /// False until the first spike has been processed.
    pub primed: bool,
}

impl StpState {
    pub fn new(p: &StpParams) -> Self {
        Self { u: p.u, r: 1.0, primed: false }
    }
}

/// Processes a presynaptic spike arriving `dt_since_prev` ms after the
/// previous one and returns the new state with the efficacy `u · r`.
/// The first spike uses `u = U`, `r = 1`.
pub fn stp_on_spike(st: &StpState, dt_since_prev: f64, p: &StpParams) -> (StpState, f64) {
    if !st.primed {
        let next = StpState { u: p.u, r: 1.0, primed: true };
        return (next, next.u * next.r);
    }
    let dt = dt_since_prev.max(0.0);
    let fac = (-dt / p.tau_fac).exp();
    let rec = (-dt / p.tau_rec).exp();
    let u = p.u + st.u * (1.0 - p.u) * fac;
    let r = 1.0 + (st.r - st.u * st.r - 1.0) * rec;
    let next = StpState { u, r, primed: true };
    (next, u * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RstdpState {
    /// Eligibility trace.
    pub e: f64,
    pub tau_e: f64,
}

impl RstdpState {
    pub fn new(tau_e: f64) -> Self {
        Self { e: 0.0, tau_e }
    }
}

/// Decays the eligibility trace over `dt`, adds the STDP increment and
/// returns the reward-gated weight change `reward · e`.
pub fn rstdp_step(st: &RstdpState, stdp_increment: f64, reward: f64, dt: f64) -> (RstdpState, f64) {
    let e = st.e * (-dt / st.tau_e).exp() + stdp_increment;
    (RstdpState { e, tau_e: st.tau_e }, reward * e)
}
