//! Mushroom-body decision circuit for the colour/shape dilemma.
//!
//! Four cue channels (green, blue, upright, inverted) drive matching
//! Kenyon-cell groups, which project onto an "avoid" and an "approach"
//! output group through reward-modulated STDP. The nonlinear pathway adds a
//! global APL interneuron that inhibits every KC, and a dopaminergic group
//! in mutual inhibition with APL that excites both outputs.

use serde::{Deserialize, Serialize};
use spike_core::network::{
    Mask, Network, Plasticity, PopulationId, PopulationSpec, ProjectionId, ProjectionSpec, RecordConfig, Recorder,
    Weights,
};
use spike_core::neurons::{LifParams, NeuronModel};
use spike_core::par;
use spike_core::plasticity::{Pairing, StdpParams};

use crate::error::{invalid, CircuitError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pathway {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cue {
    Green = 0,
    Blue = 1,
    Upright = 2,
    Inverted = 3,
}

const CUE_NAMES: [&str; 4] = ["cue_green", "cue_blue", "cue_upright", "cue_inverted"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrosophilaConfig {
    pub pathway: Pathway,
    /// Poisson inputs per cue channel.
    pub cue_size: usize,
    /// Kenyon cells, split evenly across the four cue channels.
    pub kc_size: usize,
    /// Neurons per output group.
    pub mbon_size: usize,
    pub apl_size: usize,
    pub da_size: usize,
    /// Cue rate at full intensity (Hz).
    pub cue_rate_hz: f64,
    pub cue_to_kc: f64,
    /// Constant current into every KC and output cell.
    pub kc_bias: f64,
    pub mbon_bias: f64,
    /// Background Poisson drive of KC and output cells.
    pub background_hz: f64,
    pub background_weight: f64,
    pub kc_to_mbon_init: f64,
    pub rstdp: StdpParams,
    pub tau_e: f64,
    pub learning_gain: f64,
    pub kc_to_apl: f64,
    /// Magnitude of each APL-to-KC synapse before `apl_gain` scaling.
    pub apl_to_kc: f64,
    /// Strength of APL inhibition onto KCs.
    pub apl_gain: f64,
    /// Strength of dopaminergic modulation (DA to outputs and DA-APL coupling).
    pub da_gain: f64,
    pub train_trials: u32,
    pub trial_steps: u32,
    pub rest_steps: u32,
    pub teach_current: f64,
    /// Reward delivered after each training trial; negative flips learning.
    pub reward: f64,
    pub test_steps: u32,
    /// Independent test windows pooled per sweep point.
    pub test_repeats: u32,
}

impl Default for DrosophilaConfig {
    fn default() -> Self {
        Self {
            pathway: Pathway::Nonlinear,
            cue_size: 20,
            kc_size: 80,
            mbon_size: 10,
            apl_size: 10,
            da_size: 10,
            cue_rate_hz: 100.0,
            cue_to_kc: 3.0,
            kc_bias: 0.0,
            mbon_bias: 0.0,
            background_hz: 500.0,
            background_weight: 0.6,
            kc_to_mbon_init: 0.1,
            rstdp: StdpParams {
                a_plus: 0.01,
                a_minus: 0.005,
                tau_plus: 20.0,
                tau_minus: 20.0,
                w_min: 0.0,
                w_max: 0.5,
                pairing: Pairing::NearestNeighbor,
            },
            tau_e: 200.0,
            learning_gain: 1.0,
            kc_to_apl: 1.0,
            apl_to_kc: 4.0,
            apl_gain: 1.0,
            da_gain: 1.0,
            train_trials: 20,
            trial_steps: 100,
            rest_steps: 100,
            teach_current: 2.0,
            reward: 1.0,
            test_steps: 500,
            test_repeats: 4,
        }
    }
}

impl DrosophilaConfig {
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.apl_gain < 0.0 || self.da_gain < 0.0 || self.learning_gain < 0.0 {
            return Err(invalid("drosophila gains must be >= 0"));
        }
        if self.test_steps == 0 || self.test_repeats == 0 {
            return Err(invalid("drosophila test_steps and test_repeats must be >= 1"));
        }
        if self.kc_size < 4 || !self.kc_size.is_multiple_of(4) {
            return Err(invalid("kc_size must be a positive multiple of 4"));
        }
        if self.cue_size == 0 || self.mbon_size == 0 || self.apl_size == 0 || self.da_size == 0 {
            return Err(invalid("drosophila population sizes must be >= 1"));
        }
        Ok(())
    }
}

/// Built circuit plus handles to its populations and plastic projections.
#[derive(Debug, Clone)]
pub struct DrosophilaCircuit {
    pub net: Network,
    pub cfg: DrosophilaConfig,
    pub cues: [PopulationId; 4],
    pub kc: PopulationId,
    pub avoid: PopulationId,
    pub approach: PopulationId,
    pub apl: Option<PopulationId>,
    pub da: Option<PopulationId>,
    pub kc_to_avoid: ProjectionId,
    pub kc_to_approach: ProjectionId,
    pub apl_to_kc: Option<ProjectionId>,
}

fn lif() -> NeuronModel {
    NeuronModel::Lif(LifParams { tau: 10.0, r_mem: 1.0, v_th: 1.0, v_reset: 0.0 })
}

pub fn build_drosophila(cfg: &DrosophilaConfig) -> Result<DrosophilaCircuit, CircuitError> {
    cfg.validate()?;
    let mut net = Network::new(1.0)?;
    let mut cues = [PopulationId(0); 4];
    for (k, name) in CUE_NAMES.iter().enumerate() {
        cues[k] = net.add_population(PopulationSpec::source(*name, cfg.cue_size, 0.0))?;
    }
    let kc = net.add_population(
        PopulationSpec::neurons("kc", cfg.kc_size, lif())
            .with_bias(cfg.kc_bias)
            .with_background(cfg.background_hz, cfg.background_weight),
    )?;
    let mbon = |name| {
        PopulationSpec::neurons(name, cfg.mbon_size, lif())
            .with_bias(cfg.mbon_bias)
            .with_background(cfg.background_hz, cfg.background_weight)
    };
    let avoid = net.add_population(mbon("mbon_avoid"))?;
    let approach = net.add_population(mbon("mbon_approach"))?;

    let group = cfg.kc_size / 4;
    for (k, &cue) in cues.iter().enumerate() {
        let mask = Mask::from_fn(cfg.cue_size, cfg.kc_size, |_, j| j / group == k);
        net.connect(ProjectionSpec::new(cue, kc, mask, Weights::Constant(cfg.cue_to_kc)).excitatory())?;
    }
    let plastic = Plasticity::RewardStdp { stdp: cfg.rstdp, tau_e: cfg.tau_e, gain: cfg.learning_gain };
    let learned = |net: &mut Network, post| {
        net.connect(
            ProjectionSpec::new(kc, post, Mask::full(cfg.kc_size, cfg.mbon_size), Weights::Constant(cfg.kc_to_mbon_init))
                .excitatory()
                .with_plasticity(plastic),
        )
    };
    let kc_to_avoid = learned(&mut net, avoid)?;
    let kc_to_approach = learned(&mut net, approach)?;

    let (mut apl, mut da, mut apl_to_kc) = (None, None, None);
    if cfg.pathway == Pathway::Nonlinear {
        let a = net.add_population(PopulationSpec::neurons("apl", cfg.apl_size, lif()))?;
        let d = net.add_population(PopulationSpec::neurons("da", cfg.da_size, lif()))?;
        let full = |n, m| Mask::full(n, m);
        net.connect(ProjectionSpec::new(kc, a, full(cfg.kc_size, cfg.apl_size), Weights::Constant(cfg.kc_to_apl)).excitatory())?;
        apl_to_kc = Some(net.connect(
            ProjectionSpec::new(a, kc, full(cfg.apl_size, cfg.kc_size), Weights::Constant(-cfg.apl_to_kc * cfg.apl_gain))
                .inhibitory(),
        )?);
        for &cue in &cues {
            net.connect(ProjectionSpec::new(cue, d, full(cfg.cue_size, cfg.da_size), Weights::Constant(0.05)).excitatory())?;
        }
        net.connect(
            ProjectionSpec::new(d, a, full(cfg.da_size, cfg.apl_size), Weights::Constant(-0.1 * cfg.da_gain)).inhibitory(),
        )?;
        net.connect(
            ProjectionSpec::new(a, d, full(cfg.apl_size, cfg.da_size), Weights::Constant(-0.1 * cfg.da_gain)).inhibitory(),
        )?;
        for post in [avoid, approach] {
            net.connect(
                ProjectionSpec::new(d, post, full(cfg.da_size, cfg.mbon_size), Weights::Constant(0.05 * cfg.da_gain))
                    .excitatory(),
            )?;
        }
        apl = Some(a);
        da = Some(d);
    }
    Ok(DrosophilaCircuit {
        net,
        cfg: cfg.clone(),
        cues,
        kc,
        avoid,
        approach,
        apl,
        da,
        kc_to_avoid,
        kc_to_approach,
        apl_to_kc,
    })
}

/// Decision counts over a test window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilemmaOutcome {
    pub color_intensity: f64,
    /// Steps on which the avoid group out-fired the approach group.
    pub avoid_steps: u32,
    pub approach_steps: u32,
    pub pi: f64,
    /// `(approach - avoid) / (approach + avoid)`.
    pub preference: f64,
}

/// `|t1 - t2| / (t1 + t2)`.
pub fn prefer_index(t_avoid: u32, t_approach: u32) -> Result<f64, CircuitError> {
    let total = t_avoid + t_approach;
    if total == 0 {
        return Err(CircuitError::NoDecisions);
    }
    Ok(f64::from(t_avoid.abs_diff(t_approach)) / f64::from(total))
}

pub fn signed_preference(t_avoid: u32, t_approach: u32) -> Result<f64, CircuitError> {
    let total = t_avoid + t_approach;
    if total == 0 {
        return Err(CircuitError::NoDecisions);
    }
    Ok((f64::from(t_approach) - f64::from(t_avoid)) / f64::from(total))
}

impl DrosophilaCircuit {
    fn set_cues(&mut self, rates: [f64; 4]) {
        for (k, &r) in rates.iter().enumerate() {
            self.net.set_source_rate(self.cues[k], r * self.cfg.cue_rate_hz);
        }
    }

    /// Mean weight from the KC group of `cue` onto the approach or avoid group.
    pub fn mean_weight(&self, cue: Cue, approach: bool) -> f64 {
        let proj = if approach { self.kc_to_approach } else { self.kc_to_avoid };
        let w = self.net.weight_matrix(proj).expect("projection exists");
        let group = self.cfg.kc_size / 4;
        let rows = w.slice(ndarray::s![cue as usize * group..(cue as usize + 1) * group, ..]);
        rows.mean().unwrap_or(0.0)
    }

    /// Alternates the safe pattern (green, upright; taught to approach) with
    /// the punished pattern (blue, inverted; taught to avoid), delivering the
    /// configured reward after each trial. The teaching current excites the
    /// target output group and holds the other one silent.
    pub fn train(&mut self, seed: u64) -> Result<(), CircuitError> {
        self.net.reset(seed);
        let cfg = self.cfg.clone();
        for trial in 0..cfg.train_trials {
            let safe = trial % 2 == 0;
            let (rates, target, other) = if safe {
                ([1.0, 0.0, 1.0, 0.0], self.approach, self.avoid)
            } else {
                ([0.0, 1.0, 0.0, 1.0], self.avoid, self.approach)
            };
            self.set_cues(rates);
            for _ in 0..cfg.trial_steps {
                self.net.inject(target, cfg.teach_current);
                self.net.inject(other, -cfg.teach_current);
                self.net.step()?;
            }
            self.net.deliver_reward(cfg.reward);
            self.set_cues([0.0; 4]);
            for _ in 0..cfg.rest_steps {
                self.net.step()?;
            }
        }
        Ok(())
    }

    /// Presents the conflicting blue-upright stimulus with colour drive `c`
    /// and shape drive `1 - c`, counting per-step decisions. Counts are
    /// pooled over `test_repeats` windows, each starting from a fresh reset.
    pub fn test_dilemma(&mut self, color_intensity: f64, seed: u64) -> Result<DilemmaOutcome, CircuitError> {
        if !(0.0..=1.0).contains(&color_intensity) {
            return Err(invalid("colour intensity must lie in [0, 1]"));
        }
        let (mut avoid_steps, mut approach_steps) = (0, 0);
        for repeat in 0..u64::from(self.cfg.test_repeats) {
            self.net.reset(seed.wrapping_mul(0x9E37_79B9).wrapping_add(repeat));
            self.set_cues([0.0, color_intensity, 1.0 - color_intensity, 0.0]);
            for _ in 0..self.cfg.test_steps {
                self.net.step()?;
                let a = self.net.spikes(self.avoid).len();
                let b = self.net.spikes(self.approach).len();
                if a > b {
                    avoid_steps += 1;
                } else if b > a {
                    approach_steps += 1;
                }
            }
        }
        Ok(DilemmaOutcome {
            color_intensity,
            avoid_steps,
            approach_steps,
            pi: prefer_index(avoid_steps, approach_steps)?,
            preference: signed_preference(avoid_steps, approach_steps)?,
        })
    }

    /// Runs one test window at `color_intensity` and records every spike.
    pub fn record_window(&mut self, color_intensity: f64, seed: u64) -> Result<Recorder, CircuitError> {
        if !(0.0..=1.0).contains(&color_intensity) {
            return Err(invalid("colour intensity must lie in [0, 1]"));
        }
        self.net.reset(seed);
        self.set_cues([0.0, color_intensity, 1.0 - color_intensity, 0.0]);
        let mut rec = Recorder::new(RecordConfig::raster());
        for _ in 0..self.cfg.test_steps {
            self.net.step()?;
            rec.observe(&self.net);
        }
        Ok(rec)
    }

    /// Tests `points` evenly spaced colour intensities in `[0, 1]`, each on
    /// its own copy of the trained circuit.
    pub fn sweep(&self, points: usize, seed: u64) -> Result<Vec<DilemmaOutcome>, CircuitError> {
        let denom = points.saturating_sub(1).max(1) as f64;
        par::map_range(points, |k| {
            let mut copy = self.clone();
            copy.test_dilemma(k as f64 / denom, seed.wrapping_add(k as u64))
        })
        .into_iter()
        .collect()
    }
}

/// Largest absolute change of preference between neighbouring sweep points.
pub fn max_jump(curve: &[DilemmaOutcome]) -> f64 {
    curve.windows(2).map(|w| (w[1].preference - w[0].preference).abs()).fold(0.0, f64::max)
}
