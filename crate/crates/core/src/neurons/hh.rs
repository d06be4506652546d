//! Hodgkin-Huxley membrane with the squid-axon rate functions.
//!
//! Voltages use the original convention: `V` is the displacement from rest,
//! depolarisation positive, so rest sits at 0 mV.

use serde::{Deserialize, Serialize};

use super::{check_inputs, finite_or_diverged, NeuronState, StepResult};
use crate::error::NeuronError;

/// Largest Euler step admitted for the full model (ms).
pub const HH_FULL_MAX_DT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HhVariant {
    /// Full four-variable dynamics; spikes are detected, never reset.
    Full,
    /// Small capacitance with a hard reset once `v_th` is crossed.
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HhParams {
    /// Membrane capacitance (μF/cm²).
    pub c_mem: f64,
    pub gbar_k: f64,
    pub gbar_na: f64,
    pub gbar_l: f64,
    pub v_k: f64,
    pub v_na: f64,
    pub v_l: f64,
    /// Spike-detection threshold (mV).
    pub v_th: f64,
    /// Reset potential; only the simplified variant resets.
    pub v_reset: f64,
}

impl HhParams {
    pub fn full() -> Self {
        Self {
            c_mem: 1.0,
            gbar_k: 36.0,
            gbar_na: 120.0,
            gbar_l: 0.3,
            v_k: -12.0,
            v_na: 115.0,
            v_l: 10.6,
            v_th: 50.0,
            v_reset: 0.0,
        }
    }

    pub fn simplified() -> Self {
        Self { c_mem: 0.02, v_th: 60.0, v_reset: 0.0, ..Self::full() }
    }

    pub fn without_sodium(self) -> Self {
        Self { gbar_na: 0.0, ..self }
    }

    pub fn without_potassium(self) -> Self {
        Self { gbar_k: 0.0, ..self }
    }

    pub(super) fn validate(&self) -> Result<(), NeuronError> {
        if !(self.c_mem > 0.0) {
            return Err(NeuronError::InvalidParams { param: "c_mem", constraint: "c_mem > 0" });
        }
        if self.gbar_k < 0.0 || self.gbar_na < 0.0 || self.gbar_l < 0.0 {
            return Err(NeuronError::InvalidParams {
                param: "gbar",
                constraint: "all conductances >= 0",
            });
        }
        Ok(())
    }
}

impl Default for HhParams {
    fn default() -> Self {
        Self::full()
    }
}

/// `x / (e^x - 1)`, continuous through zero.
fn x_over_expm1(x: f64) -> f64 {
    if x.abs() < 1e-9 {
        1.0 - 0.5 * x
    } else {
        x / x.exp_m1()
    }
}

#[inline]
fn alpha_n(v: f64) -> f64 {
    0.1 * x_over_expm1((10.0 - v) / 10.0)
}
#[inline]
fn beta_n(v: f64) -> f64 {
    0.125 * (-v / 80.0).exp()
}
#[inline]
fn alpha_m(v: f64) -> f64 {
    x_over_expm1((25.0 - v) / 10.0)
}
#[inline]
fn beta_m(v: f64) -> f64 {
    4.0 * (-v / 18.0).exp()
}
#[inline]
fn alpha_h(v: f64) -> f64 {
    0.07 * (-v / 20.0).exp()
}
#[inline]
fn beta_h(v: f64) -> f64 {
    1.0 / (((30.0 - v) / 10.0).exp() + 1.0)
}

/// `x / (C E - 1)` with `C E = e^x`, falling back to a series near `x = 0`.
#[inline]
fn x_over_scaled_m1(x: f64, scaled: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - 0.5 * x + x * x / 12.0
    } else {
        x / (scaled - 1.0)
    }
}

/// All six rate functions `[α_n, β_n, α_m, β_m, α_h, β_h]` from two
/// exponentials: every rate except `β_m` depends on `v` through `e^(-v/10)`.
#[inline]
fn rates(v: f64) -> [f64; 6] {
    const E1: f64 = std::f64::consts::E;
    const E25: f64 = 12.182_493_960_703_473;
    const E3: f64 = 20.085_536_923_187_668;
    let e10 = (-v / 10.0).exp();
    let e20 = e10.sqrt();
    let e80 = e20.sqrt().sqrt();
    [
        0.1 * x_over_scaled_m1((10.0 - v) / 10.0, E1 * e10),
        0.125 * e80,
        x_over_scaled_m1((25.0 - v) / 10.0, E25 * e10),
        4.0 * (-v / 18.0).exp(),
        0.07 * e20,
        1.0 / (E3 * e10 + 1.0),
    ]
}

/// Steady-state gating `(n, m, h)` at a clamped potential.
pub fn gate_steady_state(v: f64) -> (f64, f64, f64) {
    let n = alpha_n(v) / (alpha_n(v) + beta_n(v));
    let m = alpha_m(v) / (alpha_m(v) + beta_m(v));
    let h = alpha_h(v) / (alpha_h(v) + beta_h(v));
    (n, m, h)
}

pub fn step_hh(
    state: &NeuronState,
    p: &HhParams,
    i_in: f64,
    dt: f64,
    variant: HhVariant,
) -> Result<StepResult, NeuronError> {
    check_inputs(i_in, dt)?;
    if variant == HhVariant::Full && dt > HH_FULL_MAX_DT {
        return Err(NeuronError::StepTooLarge { dt, max: HH_FULL_MAX_DT });
    }
    let NeuronState { v, n, m, h, .. } = *state;
    let i_k = p.gbar_k * n.powi(4) * (v - p.v_k);
    let i_na = p.gbar_na * m.powi(3) * h * (v - p.v_na);
    let i_l = p.gbar_l * (v - p.v_l);
    let dv = (i_in - i_k - i_na - i_l) / p.c_mem;

    let mut next = *state;
    next.v = v + dt * dv;
    let [a_n, b_n, a_m, b_m, a_h, b_h] = rates(v);
    next.n = (n + dt * (a_n * (1.0 - n) - b_n * n)).clamp(0.0, 1.0);
    next.m = (m + dt * (a_m * (1.0 - m) - b_m * m)).clamp(0.0, 1.0);
    next.h = (h + dt * (a_h * (1.0 - h) - b_h * h)).clamp(0.0, 1.0);

    let spiked = v < p.v_th && next.v >= p.v_th;
    if spiked && variant == HhVariant::Simplified {
        next.v = p.v_reset;
    }
    finite_or_diverged(StepResult { state: next, spiked })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rest() -> NeuronState {
        let (n, m, h) = gate_steady_state(0.0);
        NeuronState { v: 0.0, n, m, h, ..Default::default() }
    }

    fn run(
        p: &HhParams,
        variant: HhVariant,
        i_in: f64,
        dt: f64,
        t_ms: f64,
        mut on_step: impl FnMut(&NeuronState),
    ) -> (NeuronState, usize) {
        let mut s = rest();
        let mut spikes = 0;
        for _ in 0..(t_ms / dt).round() as usize {
            let r = step_hh(&s, p, i_in, dt, variant).unwrap();
            spikes += r.spiked as usize;
            s = r.state;
            on_step(&s);
        }
        (s, spikes)
    }

    #[test]
    fn shared_exponential_rates_match_the_direct_forms() {
        for k in -400..=1200 {
            let v = k as f64 * 0.1 + 1e-7 * (k % 3) as f64;
            let direct = [alpha_n(v), beta_n(v), alpha_m(v), beta_m(v), alpha_h(v), beta_h(v)];
            for (a, b) in rates(v).iter().zip(direct) {
                assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-12), "v={v}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rate_functions_are_continuous_at_removable_points() {
        assert!((alpha_n(10.0) - 0.1).abs() < 1e-9);
        assert!((alpha_n(10.0 + 1e-6) - 0.1).abs() < 1e-6);
        assert!((alpha_m(25.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_model_rests_without_input() {
        let p = HhParams::full();
        let (s, spikes) = run(&p, HhVariant::Full, 0.0, 0.01, 100.0, |_| {});
        assert_eq!(spikes, 0);
        assert!(s.v.abs() < 1.0, "v drifted to {}", s.v);
    }

    #[test]
    fn full_model_spikes_repetitively_with_bounded_gates() {
        let p = HhParams::full();
        let (_, spikes) = run(&p, HhVariant::Full, 10.0, 0.01, 100.0, |s| {
            for g in [s.n, s.m, s.h] {
                assert!((0.0..=1.0).contains(&g));
            }
        });
        assert!(spikes >= 5, "only {spikes} spikes");
    }

    #[test]
    fn full_model_rejects_coarse_steps() {
        let r = step_hh(&rest(), &HhParams::full(), 0.0, 0.5, HhVariant::Full);
        assert!(matches!(r, Err(NeuronError::StepTooLarge { .. })));
    }

    #[test]
    fn simplified_model_resets_after_threshold() {
        let p = HhParams::simplified();
        let mut s = rest();
        let mut seen = false;
        for _ in 0..20_000 {
            let r = step_hh(&s, &p, 20.0, 0.001, HhVariant::Simplified).unwrap();
            if r.spiked {
                assert_eq!(r.state.v, p.v_reset);
                seen = true;
            }
            s = r.state;
        }
        assert!(seen);
    }

    #[test]
    fn removing_sodium_silences_the_simplified_model() {
        let p = HhParams::simplified();
        let (_, with_na) = run(&p, HhVariant::Simplified, 20.0, 0.001, 50.0, |_| {});
        let v0 = rest().v;
        let mut v_max = f64::MIN;
        let (_, without_na) = run(&p.without_sodium(), HhVariant::Simplified, 20.0, 0.001, 50.0, |s| {
            v_max = v_max.max(s.v)
        });
        assert!(with_na > 0);
        assert_eq!(without_na, 0);
        assert!(v_max < p.v_th, "v reached {v_max} (initial {v0})");
    }

    #[test]
    fn without_sodium_an_elevated_membrane_only_decays() {
        let (n, m, h) = gate_steady_state(0.0);
        let start = NeuronState { v: 30.0, n, m, h, ..Default::default() };
        let p = HhParams::simplified();
        for (params, expect_spikes) in [(p, true), (p.without_sodium(), false)] {
            let mut s = start;
            let mut spikes = 0;
            let mut v_max = f64::MIN;
            for _ in 0..50_000 {
                let r = step_hh(&s, &params, 10.0, 0.001, HhVariant::Simplified).unwrap();
                spikes += r.spiked as usize;
                s = r.state;
                v_max = v_max.max(s.v);
            }
            if expect_spikes {
                assert!(spikes > 0);
            } else {
                assert_eq!(spikes, 0);
                assert!(v_max <= start.v, "v rose to {v_max}");
            }
        }
    }

    #[test]
    fn without_sodium_bounded_drive_never_fires() {
        let p = HhParams::simplified().without_sodium();
        for i_in in [0.0, 5.0, 10.0, 20.0, 30.0, 40.0] {
            let (_, spikes) = run(&p, HhVariant::Simplified, i_in, 0.005, 300.0, |_| {});
            assert_eq!(spikes, 0, "fired at I = {i_in}");
        }
    }
}
