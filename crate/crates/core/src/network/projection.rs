use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mask::Mask;
use super::population::{PopulationId, ProjectionId};
use crate::error::NetworkError;
use crate::plasticity::{Pairing, StdpParams, StpParams, StpState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    /// Weights stay `>= 0`.
    Excitatory,
    /// Weights stay `<= 0`.
    Inhibitory,
    Free,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Excitatory => "excitatory",
            Sign::Inhibitory => "inhibitory",
            Sign::Free => "unsigned",
        }
    }

    pub fn admits(self, w: f64) -> bool {
        match self {
            Sign::Excitatory => w >= 0.0,
            Sign::Inhibitory => w <= 0.0,
            Sign::Free => true,
        }
    }

    pub fn clamp(self, w: f64) -> f64 {
        match self {
            Sign::Excitatory => w.max(0.0),
            Sign::Inhibitory => w.min(0.0),
            Sign::Free => w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Constant(f64),
    /// Independent uniform draws from `[low, high)`.
    Uniform { low: f64, high: f64, seed: u64 },
    /// One value per synapse in mask order.
    PerSynapse(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Plasticity {
    None,
    /// Online pair-based STDP from synaptic traces.
    Stdp(StdpParams),
    /// STDP accumulates into an eligibility trace; weights change only on
    /// [`Network::deliver_reward`](super::Network::deliver_reward) by
    /// `gain * reward * e`.
    RewardStdp { stdp: StdpParams, tau_e: f64, gain: f64 },
    /// Tsodyks-Markram depression/facilitation scaling each transmitted spike.
    ShortTerm(StpParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSpec {
    pub pre: PopulationId,
    pub post: PopulationId,
    pub mask: Mask,
    pub weights: Weights,
    /// Extra ticks of transmission delay; a spike at step `t` arrives at
    /// step `t + 1 + delay`.
    pub delay: u32,
    pub sign: Sign,
    pub plasticity: Plasticity,
}

impl ProjectionSpec {
    pub fn new(pre: PopulationId, post: PopulationId, mask: Mask, weights: Weights) -> Self {
        Self { pre, post, mask, weights, delay: 0, sign: Sign::Free, plasticity: Plasticity::None }
    }

    pub fn excitatory(mut self) -> Self {
        self.sign = Sign::Excitatory;
        self
    }

    pub fn inhibitory(mut self) -> Self {
        self.sign = Sign::Inhibitory;
        self
    }

    pub fn with_delay(mut self, delay: u32) -> Self {
        self.delay = delay;
        self
    }

    pub fn with_plasticity(mut self, plasticity: Plasticity) -> Self {
        self.plasticity = plasticity;
        self
    }
}

/// Structural summary of a live projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionInfo {
    pub id: ProjectionId,
    pub pre: PopulationId,
    pub post: PopulationId,
    pub sign: Sign,
    pub delay: u32,
    pub plasticity: Plasticity,
    pub n_synapses: usize,
}

/// Live projection: weights, in-flight spikes and plasticity traces.
#[derive(Debug, Clone)]
pub(crate) struct Projection {
    pub pre: usize,
    pub post: usize,
    pub mask: Mask,
    pub weights: Vec<f64>,
    pub delay: u32,
    pub sign: Sign,
    pub plasticity: Plasticity,
    /// Slot `k` holds `(pre neuron, efficacy)` events arriving `k` ticks from now.
    pending: VecDeque<Vec<(u32, f64)>>,
    pre_trace: Vec<f64>,
    post_trace: Vec<f64>,
    eligibility: Vec<f64>,
    stp: Vec<StpState>,
    last_pre_spike: Vec<Option<u64>>,
}

impl Projection {
    pub fn build(spec: ProjectionSpec, pre_size: usize, post_size: usize) -> Result<Self, NetworkError> {
        if spec.mask.shape() != (pre_size, post_size) {
            return Err(NetworkError::ShapeMismatch {
                what: "mask vs (pre, post) population sizes",
                expected: (pre_size, post_size),
                got: spec.mask.shape(),
            });
        }
        let n = spec.mask.n_synapses();
        let weights = match spec.weights {
            Weights::Constant(w) => vec![w; n],
            Weights::Uniform { low, high, seed } => {
                if !(low <= high) {
                    return Err(NetworkError::InvalidParams { param: "weights", constraint: "low <= high" });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| low + (high - low) * rng.random::<f64>()).collect()
            }
            Weights::PerSynapse(w) => {
                if w.len() != n {
                    return Err(NetworkError::ShapeMismatch {
                        what: "per-synapse weights vs mask synapses",
                        expected: (n, 1),
                        got: (w.len(), 1),
                    });
                }
                w
            }
        };
        if let Some(&bad) = weights.iter().find(|&&w| !spec.sign.admits(w) || !w.is_finite()) {
            return Err(NetworkError::SignViolation { sign: spec.sign.as_str(), weight: bad });
        }
        match spec.plasticity {
            Plasticity::Stdp(p) | Plasticity::RewardStdp { stdp: p, .. } => {
                p.validate().map_err(|_| NetworkError::InvalidParams {
                    param: "stdp",
                    constraint: "positive time constants, non-negative amplitudes, w_min <= w_max",
                })?;
            }
            Plasticity::ShortTerm(p) => {
                p.validate().map_err(|_| NetworkError::InvalidParams {
                    param: "stp",
                    constraint: "0 < U <= 1 and positive time constants",
                })?;
            }
            Plasticity::None => {}
        }
        if let Plasticity::RewardStdp { tau_e, .. } = spec.plasticity {
            if !(tau_e > 0.0) {
                return Err(NetworkError::InvalidParams { param: "tau_e", constraint: "tau_e > 0" });
            }
        }
        let mut proj = Self {
            pre: spec.pre.0,
            post: spec.post.0,
            weights,
            delay: spec.delay,
            sign: spec.sign,
            plasticity: spec.plasticity,
            pending: VecDeque::new(),
            pre_trace: Vec::new(),
            post_trace: Vec::new(),
            eligibility: Vec::new(),
            stp: Vec::new(),
            last_pre_spike: Vec::new(),
            mask: spec.mask,
        };
        proj.reset();
        Ok(proj)
    }

    /// Clears in-flight spikes and traces; weights are kept.
    pub fn reset(&mut self) {
        let (n_pre, n_post) = self.mask.shape();
        self.pending = (0..=self.delay).map(|_| Vec::new()).collect();
        self.pre_trace = vec![0.0; n_pre];
        self.post_trace = vec![0.0; n_post];
        self.eligibility = match self.plasticity {
            Plasticity::RewardStdp { .. } => vec![0.0; self.weights.len()],
            _ => Vec::new(),
        };
        self.stp = match self.plasticity {
            Plasticity::ShortTerm(p) => vec![StpState::new(&p); n_pre],
            _ => Vec::new(),
        };
        self.last_pre_spike = vec![None; n_pre];
    }

    /// Removes the events due this tick.
    pub fn take_arrivals(&mut self) -> Vec<(u32, f64)> {
        self.pending.pop_front().unwrap_or_default()
    }

    /// Adds this tick's presynaptic spikes to the end of the delay line.
    pub fn emit(&mut self, pre_spikes: &[u32], step: u64, dt: f64) {
        let events = match self.plasticity {
            Plasticity::ShortTerm(p) => pre_spikes
                .iter()
                .map(|&i| {
                    let k = i as usize;
                    let gap = self.last_pre_spike[k].map_or(0.0, |prev| (step - prev) as f64 * dt);
                    let (next, eff) = crate::plasticity::stp_on_spike(&self.stp[k], gap, &p);
                    self.stp[k] = next;
                    self.last_pre_spike[k] = Some(step);
                    (i, eff)
                })
                .collect(),
            _ => pre_spikes.iter().map(|&i| (i, 1.0)).collect(),
        };
        self.pending.push_back(events);
    }

    /// Adds the currents carried by `arrivals` into `buffer` (indexed by
    /// postsynaptic neuron).
    pub fn deliver(&self, arrivals: &[(u32, f64)], buffer: &mut [f64]) {
        let cols = self.mask.cols();
        for &(i, eff) in arrivals {
            for syn in self.mask.row_range(i as usize) {
                buffer[cols[syn] as usize] += self.weights[syn] * eff;
            }
        }
    }

    /// Trace-based STDP for this tick. Traces decay first, so coincident
    /// spikes produce no change; then pairings are scored and traces bumped.
    pub fn learn(&mut self, pre_spiked: &[bool], post_spiked: &[bool], dt: f64) {
        let (stdp, reward_tau) = match self.plasticity {
            Plasticity::Stdp(p) => (p, None),
            Plasticity::RewardStdp { stdp, tau_e, .. } => (stdp, Some(tau_e)),
            _ => return,
        };
        let decay_plus = (-dt / stdp.tau_plus).exp();
        let decay_minus = (-dt / stdp.tau_minus).exp();
        self.pre_trace.iter_mut().for_each(|x| *x *= decay_plus);
        self.post_trace.iter_mut().for_each(|y| *y *= decay_minus);
        if let Some(tau_e) = reward_tau {
            let decay_e = (-dt / tau_e).exp();
            self.eligibility.iter_mut().for_each(|e| *e *= decay_e);
        }

        let any_pre = pre_spiked.iter().any(|&s| s);
        let any_post = post_spiked.iter().any(|&s| s);
        if any_pre || any_post {
            let cols = self.mask.cols();
            for i in 0..pre_spiked.len() {
                let x = self.pre_trace[i];
                if !pre_spiked[i] && (!any_post || x == 0.0) {
                    continue;
                }
                for syn in self.mask.row_range(i) {
                    let j = cols[syn] as usize;
                    let mut dw = 0.0;
                    if post_spiked[j] {
                        dw += stdp.a_plus * x;
                    }
                    if pre_spiked[i] {
                        dw -= stdp.a_minus * self.post_trace[j];
                    }
                    if dw == 0.0 {
                        continue;
                    }
                    match reward_tau {
                        Some(_) => self.eligibility[syn] += dw,
                        None => self.weights[syn] = self.sign.clamp(stdp.clamp(self.weights[syn] + dw)),
                    }
                }
            }
        }

        let bump = |trace: &mut [f64], spiked: &[bool]| {
            for (t, &s) in trace.iter_mut().zip(spiked) {
                if s {
                    *t = match stdp.pairing {
                        Pairing::AllPairs => *t + 1.0,
                        Pairing::NearestNeighbor => 1.0,
                    };
                }
            }
        };
        bump(&mut self.pre_trace, pre_spiked);
        bump(&mut self.post_trace, post_spiked);
    }

    pub fn reward(&mut self, r: f64) {
        if let Plasticity::RewardStdp { stdp, gain, .. } = self.plasticity {
            for (w, e) in self.weights.iter_mut().zip(&self.eligibility) {
                *w = self.sign.clamp(stdp.clamp(*w + gain * r * e));
            }
        }
    }

    pub fn eligibility(&self) -> &[f64] {
        &self.eligibility
    }
}
