//! Point-neuron dynamics integrated with explicit Euler steps.
//!
//! Every model shares one [`NeuronState`] record so populations can hold a
//! flat state array regardless of the model in use. Unused fields stay at
//! zero for models that do not need them.

mod classify;
mod hh;

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::NeuronError;

pub use classify::{classify_firing_pattern, classify_izhikevich, rebound_probe, FiringPattern};
pub use hh::{gate_steady_state, step_hh, HhParams, HhVariant, HH_FULL_MAX_DT};

/// Largest membrane potential magnitude the Izhikevich integrator accepts
/// before reporting divergence.
pub const IZHIKEVICH_DIVERGENCE_BOUND: f64 = 1.0e4;

/// Exponent clamp for the aEIF spike-initiation term.
pub const AEIF_EXP_CLAMP: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfParams {
    pub v_th: f64,
    pub v_reset: f64,
}

impl Default for IfParams {
    fn default() -> Self {
        Self { v_th: 1.0, v_reset: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifParams {
    /// Membrane time constant (ms).
    pub tau: f64,
    /// Membrane resistance; scales the input current.
    pub r_mem: f64,
    pub v_th: f64,
    pub v_reset: f64,
}

impl Default for LifParams {
    fn default() -> Self {
        Self { tau: 10.0, r_mem: 1.0, v_th: 1.0, v_reset: 0.0 }
    }
}

/// Adaptive exponential integrate-and-fire parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AeifParams {
    pub c_mem: f64,
    pub g_l: f64,
    pub e_l: f64,
    /// Slope factor (mV).
    pub delta_t: f64,
    pub v_th: f64,
    pub v_reset: f64,
    /// Adaptation time constant (ms).
    pub tau_w: f64,
    /// Subthreshold adaptation.
    pub a: f64,
    /// Spike-triggered adaptation increment.
    pub b: f64,
}

impl Default for AeifParams {
    fn default() -> Self {
        Self {
            c_mem: 200.0,
            g_l: 10.0,
            e_l: -70.0,
            delta_t: 2.0,
            v_th: -50.0,
            v_reset: -58.0,
            tau_w: 120.0,
            a: 2.0,
            b: 60.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IzhikevichParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Spike cutoff (mV).
    pub v_peak: f64,
}

impl IzhikevichParams {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d, v_peak: 30.0 }
    }

    /// Regular spiking (excitatory pyramidal / spiny stellate).
    pub const fn regular_spiking() -> Self {
        Self::new(0.02, 0.2, -65.0, 8.0)
    }

    /// Chattering: repetitive high-frequency bursts.
    pub const fn chattering() -> Self {
        Self::new(0.02, 0.2, -50.0, 2.0)
    }

    /// Intrinsically bursting (layer 5 pyramidal).
    pub const fn intrinsically_bursting() -> Self {
        Self::new(0.02, 0.2, -55.0, 4.0)
    }

    /// Fast spiking (basket interneurons).
    pub const fn fast_spiking() -> Self {
        Self::new(0.1, 0.2, -65.0, 2.0)
    }

    /// Low-threshold spiking (non-basket interneurons).
    pub const fn low_threshold_spiking() -> Self {
        Self::new(0.02, 0.25, -65.0, 2.0)
    }

    /// Thalamo-cortical relay cell.
    pub const fn thalamo_cortical() -> Self {
        Self::new(0.02, 0.25, -65.0, 0.05)
    }
}

impl Default for IzhikevichParams {
    fn default() -> Self {
        Self::regular_spiking()
    }
}

/// Evolving state shared by all models.
///
/// `u` is the Izhikevich recovery variable, `w` the aEIF adaptation current,
/// and `n`, `m`, `h` the Hodgkin-Huxley gating probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NeuronState {
    pub v: f64,
    pub u: f64,
    pub w: f64,
    pub n: f64,
    pub m: f64,
    pub h: f64,
    pub refractory_remaining: u32,
}

impl NeuronState {
    pub fn at_potential(v: f64) -> Self {
        Self { v, ..Self::default() }
    }

    pub fn is_finite(&self) -> bool {
        [self.v, self.u, self.w, self.n, self.m, self.h]
            .iter()
            .all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub state: NeuronState,
    pub spiked: bool,
}

fn check_inputs(i_in: f64, dt: f64) -> Result<(), NeuronError> {
    if !i_in.is_finite() {
        return Err(NeuronError::NonFiniteInput(i_in));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(NeuronError::InvalidTimestep(dt));
    }
    Ok(())
}

fn finite_or_diverged(res: StepResult) -> Result<StepResult, NeuronError> {
    if res.state.is_finite() {
        Ok(res)
    } else {
        Err(NeuronError::Diverged { v: res.state.v })
    }
}

/// Perfect integrator: `dV/dt = I`.
pub fn step_if(
    state: &NeuronState,
    p: &IfParams,
    i_in: f64,
    dt: f64,
) -> Result<StepResult, NeuronError> {
    check_inputs(i_in, dt)?;
    let mut next = *state;
    next.v = state.v + i_in * dt;
    let spiked = next.v >= p.v_th;
    if spiked {
        next.v = p.v_reset;
    }
    finite_or_diverged(StepResult { state: next, spiked })
}

static LIF_DT_WARNED: AtomicBool = AtomicBool::new(false);

/// Leaky integrator: `tau dV/dt = -V + R I`.
pub fn step_lif(
    state: &NeuronState,
    p: &LifParams,
    i_in: f64,
    dt: f64,
) -> Result<StepResult, NeuronError> {
    check_inputs(i_in, dt)?;
    if dt > p.tau && !LIF_DT_WARNED.swap(true, Ordering::Relaxed) {
        log::warn!(
            "LIF step dt={dt} ms exceeds tau={} ms; Euler integration is unstable",
            p.tau
        );
    }
    let mut next = *state;
    next.v = state.v + (dt / p.tau) * (-state.v + p.r_mem * i_in);
    let spiked = next.v >= p.v_th;
    if spiked {
        next.v = p.v_reset;
    }
    finite_or_diverged(StepResult { state: next, spiked })
}

/// Adaptive exponential integrate-and-fire.
///
/// The spike-initiation term is `g_L exp((V - V_th)/ΔT)` with its exponent
/// clamped at [`AEIF_EXP_CLAMP`]; a spike is declared whenever `V >= v_th`.
pub fn step_aeif(
    state: &NeuronState,
    p: &AeifParams,
    i_in: f64,
    dt: f64,
) -> Result<StepResult, NeuronError> {
    check_inputs(i_in, dt)?;
    let v = state.v;
    let w = state.w;
    let exp_arg = ((v - p.v_th) / p.delta_t).min(AEIF_EXP_CLAMP);
    let dv = (-p.g_l * (v - p.e_l) + p.g_l * exp_arg.exp() + i_in - w) / p.c_mem;
    let dw = (p.a * (v - p.e_l) - w) / p.tau_w;
    let mut next = *state;
    next.v = v + dt * dv;
    next.w = w + dt * dw;
    let spiked = next.v >= p.v_th;
    if spiked {
        next.v = p.v_reset;
        next.w += p.b;
    }
    finite_or_diverged(StepResult { state: next, spiked })
}

pub fn step_izhikevich(
    state: &NeuronState,
    p: &IzhikevichParams,
    i_in: f64,
    dt: f64,
) -> Result<StepResult, NeuronError> {
    check_inputs(i_in, dt)?;
    let v = state.v;
    let u = state.u;
    let dv = 0.04 * v * v + 5.0 * v + 140.0 - u + i_in;
    let du = p.a * (p.b * v - u);
    let mut next = *state;
    next.v = v + dt * dv;
    next.u = u + dt * du;
    let spiked = next.v >= p.v_peak;
    if spiked {
        next.v = p.c;
        next.u += p.d;
    } else if !(next.v.abs() <= IZHIKEVICH_DIVERGENCE_BOUND) {
        return Err(NeuronError::Diverged { v: next.v });
    }
    finite_or_diverged(StepResult { state: next, spiked })
}

/// A neuron model together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NeuronModel {
    If(IfParams),
    Lif(LifParams),
    Aeif(AeifParams),
    Izhikevich(IzhikevichParams),
    Hh { params: HhParams, variant: HhVariant },
}

impl NeuronModel {
    pub fn validate(&self) -> Result<(), NeuronError> {
        fn bad(param: &'static str, constraint: &'static str) -> Result<(), NeuronError> {
            Err(NeuronError::InvalidParams { param, constraint })
        }
        match self {
            NeuronModel::If(p) => {
                if !(p.v_reset < p.v_th) {
                    return bad("v_reset", "v_reset < v_th");
                }
            }
            NeuronModel::Lif(p) => {
                if !(p.tau > 0.0) {
                    return bad("tau", "tau > 0");
                }
                if !(p.v_reset < p.v_th) {
                    return bad("v_reset", "v_reset < v_th");
                }
            }
            NeuronModel::Aeif(p) => {
                if !(p.c_mem > 0.0) {
                    return bad("c_mem", "c_mem > 0");
                }
                if !(p.g_l > 0.0) {
                    return bad("g_l", "g_l > 0");
                }
                if !(p.delta_t > 0.0) {
                    return bad("delta_t", "delta_t > 0");
                }
                if !(p.tau_w > 0.0) {
                    return bad("tau_w", "tau_w > 0");
                }
            }
            NeuronModel::Izhikevich(p) => {
                if !(p.a > 0.0) {
                    return bad("a", "a > 0");
                }
                if !(p.v_peak > p.c) {
                    return bad("v_peak", "v_peak > c");
                }
            }
            NeuronModel::Hh { params, .. } => params.validate()?,
        }
        Ok(())
    }

    /// Potential a neuron is reset to after a spike, also used as the
    /// initial membrane potential of a fresh population.
    pub fn reset_potential(&self) -> f64 {
        match self {
            NeuronModel::If(p) => p.v_reset,
            NeuronModel::Lif(p) => p.v_reset,
            NeuronModel::Aeif(p) => p.v_reset,
            NeuronModel::Izhikevich(p) => p.c,
            NeuronModel::Hh { params, .. } => params.v_reset,
        }
    }

    pub fn initial_state(&self) -> NeuronState {
        let v = self.reset_potential();
        match self {
            NeuronModel::Izhikevich(p) => NeuronState { v, u: p.b * v, ..Default::default() },
            NeuronModel::Hh { .. } => {
                let (n, m, h) = gate_steady_state(v);
                NeuronState { v, n, m, h, ..Default::default() }
            }
            _ => NeuronState::at_potential(v),
        }
    }

    pub fn step(&self, state: &NeuronState, i_in: f64, dt: f64) -> Result<StepResult, NeuronError> {
        match self {
            NeuronModel::If(p) => step_if(state, p, i_in, dt),
            NeuronModel::Lif(p) => step_lif(state, p, i_in, dt),
            NeuronModel::Aeif(p) => step_aeif(state, p, i_in, dt),
            NeuronModel::Izhikevich(p) => step_izhikevich(state, p, i_in, dt),
            NeuronModel::Hh { params, variant } => step_hh(state, params, i_in, dt, *variant),
        }
    }

    /// Advances one network tick of length `dt` split into `substeps` Euler
    /// steps, honouring an absolute refractory period of `refractory_steps`
    /// ticks. At most one spike is reported per tick.
    pub fn advance(
        &self,
        state: &NeuronState,
        i_in: f64,
        dt: f64,
        substeps: u32,
        refractory_steps: u32,
    ) -> Result<StepResult, NeuronError> {
        if state.refractory_remaining > 0 {
            let mut next = *state;
            next.refractory_remaining -= 1;
            next.v = self.reset_potential();
            return Ok(StepResult { state: next, spiked: false });
        }
        let substeps = substeps.max(1);
        let h = dt / f64::from(substeps);
        let mut cur = *state;
        let mut spiked = false;
        for _ in 0..substeps {
            let r = self.step(&cur, i_in, h)?;
            cur = r.state;
            if r.spiked {
                spiked = true;
                if refractory_steps > 0 {
                    cur.refractory_remaining = refractory_steps;
                    break;
                }
            }
        }
        Ok(StepResult { state: cur, spiked })
    }
}
