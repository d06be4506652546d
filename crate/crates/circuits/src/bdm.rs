//! Basal-ganglia decision circuit trained by dopamine-modulated R-STDP on a
//! built-in obstacle corridor.
//!
//! Every nucleus is one population split into per-action blocks of
//! `group_size` neurons. PFC holds one block per state. Direct pathway:
//! PFC → StrD1 ⊣ GPi ⊣ Th → PMC. Indirect: PFC → StrD2 ⊣ GPe ⊣ GPi and
//! GPe ⊣ STN. Hyperdirect: PFC → STN → GPi. PMC inhibits the other action
//! blocks and feeds an efference copy back to both striatal populations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spike_core::network::{
    wta_readout, Mask, Network, Plasticity, PopulationId, PopulationSpec, ProjectionId, ProjectionSpec, RecordConfig,
    Recorder, Weights, WtaStatus,
};
use spike_core::neurons::{HhParams, HhVariant, LifParams, NeuronModel};
use spike_core::plasticity::{Pairing, StdpParams};

use crate::error::{invalid, CircuitError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeuronVariant {
    Lif,
    SimplifiedHh,
    SimplifiedHhNoNa,
    SimplifiedHhNoK,
}

impl NeuronVariant {
    pub const ALL: [NeuronVariant; 4] =
        [Self::Lif, Self::SimplifiedHh, Self::SimplifiedHhNoNa, Self::SimplifiedHhNoK];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lif => "lif",
            Self::SimplifiedHh => "simplified_hh",
            Self::SimplifiedHhNoNa => "simplified_hh_no_na",
            Self::SimplifiedHhNoK => "simplified_hh_no_k",
        }
    }

    fn model(self) -> NeuronModel {
        let hh = |params| NeuronModel::Hh { params, variant: HhVariant::Simplified };
        match self {
            Self::Lif => NeuronModel::Lif(LifParams { tau: 10.0, r_mem: 1.0, v_th: 1.0, v_reset: 0.0 }),
            Self::SimplifiedHh => hh(HhParams::simplified()),
            Self::SimplifiedHhNoNa => hh(HhParams::simplified().without_sodium()),
            Self::SimplifiedHhNoK => hh(HhParams::simplified().without_potassium()),
        }
    }

    fn is_hh(self) -> bool {
        self != Self::Lif
    }
}

/// Spiking nuclei of the circuit (PFC is a Poisson source).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nucleus {
    StrD1,
    StrD2,
    Stn,
    Gpe,
    Gpi,
    Th,
    Pmc,
}

impl Nucleus {
    pub const ALL: [Nucleus; 7] = [Self::StrD1, Self::StrD2, Self::Stn, Self::Gpe, Self::Gpi, Self::Th, Self::Pmc];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::StrD1 => "str_d1",
            Self::StrD2 => "str_d2",
            Self::Stn => "stn",
            Self::Gpe => "gpe",
            Self::Gpi => "gpi",
            Self::Th => "th",
            Self::Pmc => "pmc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BdmConfig {
    pub neuron_variant: NeuronVariant,
    pub state_space: usize,
    pub action_space: usize,
    pub episodes: u32,
    /// Neurons per state or action block.
    pub group_size: usize,
    /// Firing rate of the PFC block encoding the current state (Hz).
    pub pfc_rate_hz: f64,
    pub rstdp: StdpParams,
    pub tau_e: f64,
    /// Dopamine gain: `+da_gain` on PFC→StrD1, `-da_gain` on PFC→StrD2.
    pub da_gain: f64,
    pub pfc_to_str_init: f64,
    pub pfc_to_stn: f64,
    pub pfc_to_th: f64,
    pub efference: f64,
    pub d1_to_gpi: f64,
    pub d2_to_gpe: f64,
    pub gpe_to_gpi: f64,
    pub gpe_to_stn: f64,
    pub stn_to_gpi: f64,
    pub stn_to_gpe: f64,
    pub gpi_to_th: f64,
    pub th_to_pmc: f64,
    pub pmc_lateral: f64,
    pub str_bias: f64,
    pub gpi_bias: f64,
    pub gpe_bias: f64,
    pub stn_bias: f64,
    pub th_bias: f64,
    pub pmc_bias: f64,
    pub background_hz: f64,
    pub background_weight: f64,
    /// Ticks over which PMC spikes are counted for one decision.
    pub decision_steps: u32,
    /// Ticks the chosen PMC block is driven after a decision.
    pub commit_steps: u32,
    pub commit_current: f64,
    /// Ticks with PFC silent after each reward, letting the committed
    /// action fade before the next decision.
    pub settle_steps: u32,
    /// Silent ticks between episodes.
    pub rest_steps: u32,
    /// Obstacles per episode.
    pub corridor_length: usize,
    /// Scales synaptic, background and injected current into H-H neurons.
    pub hh_input_gain: f64,
    /// Scales the constant bias of H-H neurons.
    pub hh_bias_gain: f64,
    /// Multiplies the PFC rate when the network uses H-H neurons.
    pub hh_pfc_rate_gain: f64,
    pub hh_substeps: u32,
    /// Absolute refractory ticks after each H-H spike.
    pub hh_refractory: u32,
    /// Low-pass time constant (ms) on synaptic input to H-H neurons.
    pub hh_synaptic_tau: f64,
    /// Nuclei built from the H-H variant; the rest stay LIF.
    pub hh_nuclei: Vec<Nucleus>,
}

impl Default for BdmConfig {
    fn default() -> Self {
        Self {
            neuron_variant: NeuronVariant::Lif,
            state_space: Corridor::STATES,
            action_space: Corridor::ACTIONS,
            episodes: 60,
            group_size: 10,
            pfc_rate_hz: 200.0,
            rstdp: StdpParams {
                a_plus: 0.01,
                a_minus: 0.01,
                tau_plus: 20.0,
                tau_minus: 20.0,
                w_min: 0.0,
                w_max: 1.0,
                pairing: Pairing::AllPairs,
            },
            tau_e: 20.0,
            da_gain: 1.0,
            pfc_to_str_init: 0.3,
            pfc_to_stn: 0.1,
            pfc_to_th: 0.05,
            efference: 0.5,
            d1_to_gpi: 0.5,
            d2_to_gpe: 0.5,
            gpe_to_gpi: 0.3,
            gpe_to_stn: 0.3,
            stn_to_gpi: 0.1,
            stn_to_gpe: 0.1,
            gpi_to_th: 0.6,
            th_to_pmc: 0.3,
            pmc_lateral: 0.5,
            str_bias: 0.3,
            gpi_bias: 1.5,
            gpe_bias: 1.5,
            stn_bias: 0.8,
            th_bias: 1.3,
            pmc_bias: 0.8,
            background_hz: 500.0,
            background_weight: 0.4,
            decision_steps: 20,
            commit_steps: 10,
            commit_current: 2.0,
            settle_steps: 20,
            rest_steps: 20,
            corridor_length: 30,
            hh_input_gain: 3.0,
            hh_bias_gain: 5.0,
            hh_pfc_rate_gain: 1.0,
            hh_substeps: 100,
            hh_refractory: 0,
            hh_synaptic_tau: 10.0,
            hh_nuclei: vec![Nucleus::StrD1, Nucleus::StrD2],
        }
    }
}

impl BdmConfig {
    /// Whether `nucleus` is built from H-H neurons.
    pub fn uses_hh(&self, nucleus: Nucleus) -> bool {
        self.neuron_variant.is_hh() && self.hh_nuclei.contains(&nucleus)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.state_space == 0 || self.action_space == 0 || self.group_size == 0 {
            return Err(invalid("bdm state_space, action_space and group_size must be >= 1"));
        }
        if self.decision_steps == 0 || self.corridor_length == 0 {
            return Err(invalid("bdm decision_steps and corridor_length must be >= 1"));
        }
        if self.da_gain < 0.0 {
            return Err(invalid("bdm da_gain must be >= 0"));
        }
        if self.hh_substeps == 0 {
            return Err(invalid("bdm hh_substeps must be >= 1"));
        }
        if !(self.hh_input_gain > 0.0) {
            return Err(invalid("bdm hh_input_gain must be > 0"));
        }
        Ok(())
    }
}

/// Side-scrolling corridor: one obstacle per column, the gap centre moves by
/// ±1 between columns and the gap spans three rows. The agent sees its
/// height relative to the next gap (`-2..=2`, as state `0..5`) and either
/// falls (action 0) or flaps (action 1). Passing an obstacle pays +1;
/// hitting one pays -1 and ends the episode. The course is fixed by the
/// seed, so every episode replays the same corridor.
#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    gaps: Vec<i32>,
    column: usize,
    height: i32,
}

impl Corridor {
    pub const STATES: usize = 5;
    pub const ACTIONS: usize = 2;

    pub fn new(length: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gaps = Vec::with_capacity(length);
        let mut g = 0;
        for _ in 0..length {
            g += if rng.random::<bool>() { 1 } else { -1 };
            gaps.push(g);
        }
        Self { gaps, column: 0, height: 0 }
    }

    pub fn reset(&mut self) {
        self.column = 0;
        self.height = 0;
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn is_finished(&self) -> bool {
        self.column >= self.gaps.len()
    }

    /// Height relative to the next gap.
    pub fn offset(&self) -> i32 {
        self.height - self.gaps[self.column.min(self.gaps.len() - 1)]
    }

    pub fn state(&self) -> usize {
        (self.offset().clamp(-2, 2) + 2) as usize
    }

    /// Applies an action and returns `(reward, episode over)`.
    pub fn step(&mut self, action: usize) -> (f64, bool) {
        self.height += if action == 1 { 1 } else { -1 };
        if self.offset().abs() > 1 {
            return (-1.0, true);
        }
        self.column += 1;
        (1.0, self.is_finished())
    }

    /// Action that always passes the next obstacle.
    pub fn safe_action(&self) -> usize {
        usize::from(self.offset() < 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BdmPopulations {
    pub pfc: PopulationId,
    pub d1: PopulationId,
    pub d2: PopulationId,
    pub stn: PopulationId,
    pub gpe: PopulationId,
    pub gpi: PopulationId,
    pub th: PopulationId,
    pub pmc: PopulationId,
}

#[derive(Debug, Clone)]
pub struct BdmCircuit {
    pub net: Network,
    pub cfg: BdmConfig,
    pub pops: BdmPopulations,
    pub pfc_to_d1: ProjectionId,
    pub pfc_to_d2: ProjectionId,
}

/// Per-episode results of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdmOutcome {
    pub variant: NeuronVariant,
    pub episode_rewards: Vec<f64>,
    /// Decisions made by the network (clear winner or broken tie).
    pub network_decisions: u64,
    /// Decisions that fell back to the default action for lack of PMC spikes.
    pub default_decisions: u64,
}

impl BdmOutcome {
    pub fn first_fraction_mean(&self, fraction: f64) -> f64 {
        let n = fraction_len(self.episode_rewards.len(), fraction);
        mean(&self.episode_rewards[..n])
    }

    pub fn last_fraction_mean(&self, fraction: f64) -> f64 {
        let n = fraction_len(self.episode_rewards.len(), fraction);
        mean(&self.episode_rewards[self.episode_rewards.len() - n..])
    }

    /// Mean reward over the last 20% of episodes exceeds the first 20%.
    pub fn improved(&self) -> bool {
        self.last_fraction_mean(0.2) > self.first_fraction_mean(0.2)
    }

    /// Rank correlation between episode index and the episode's cumulative
    /// reward.
    pub fn spearman(&self) -> f64 {
        let index: Vec<f64> = (0..self.episode_rewards.len()).map(|k| k as f64).collect();
        spearman(&index, &self.episode_rewards)
    }
}

fn fraction_len(len: usize, fraction: f64) -> usize {
    ((len as f64 * fraction).round() as usize).clamp(len.min(1), len)
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; 0 when either series is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

pub fn build_bdm(cfg: &BdmConfig) -> Result<BdmCircuit, CircuitError> {
    cfg.validate()?;
    let n = cfg.group_size;
    let a = cfg.action_space;
    let size = a * n;
    let mut net = Network::new(1.0)?;

    let cell = |nucleus: Nucleus, bias: f64| {
        let hh = cfg.uses_hh(nucleus);
        let model = if hh { cfg.neuron_variant.model() } else { NeuronVariant::Lif.model() };
        let mut spec = PopulationSpec::neurons(nucleus.as_str(), size, model)
            .with_bias(bias)
            .with_background(cfg.background_hz, cfg.background_weight);
        if hh {
            // The population gain also multiplies the bias, so pre-divide it.
            spec = spec
                .with_bias(bias * cfg.hh_bias_gain / cfg.hh_input_gain)
                .with_input_gain(cfg.hh_input_gain)
                .with_substeps(cfg.hh_substeps)
                .with_refractory(cfg.hh_refractory)
                .with_synaptic_tau(cfg.hh_synaptic_tau);
        }
        spec
    };
    let pfc = net.add_population(PopulationSpec::source("pfc", cfg.state_space * n, 0.0))?;
    let d1 = net.add_population(cell(Nucleus::StrD1, cfg.str_bias))?;
    let d2 = net.add_population(cell(Nucleus::StrD2, cfg.str_bias))?;
    let stn = net.add_population(cell(Nucleus::Stn, cfg.stn_bias))?;
    let gpe = net.add_population(cell(Nucleus::Gpe, cfg.gpe_bias))?;
    let gpi = net.add_population(cell(Nucleus::Gpi, cfg.gpi_bias))?;
    let th = net.add_population(cell(Nucleus::Th, cfg.th_bias))?;
    let pmc = net.add_population(cell(Nucleus::Pmc, cfg.pmc_bias))?;

    let same = || Mask::from_fn(size, size, |i, j| i / n == j / n);
    let full = |pre: usize| Mask::full(pre, size);
    let exc = |net: &mut Network, pre, post, mask, w: f64| {
        net.connect(ProjectionSpec::new(pre, post, mask, Weights::Constant(w)).excitatory())
    };
    let inh = |net: &mut Network, pre, post, mask, w: f64| {
        net.connect(ProjectionSpec::new(pre, post, mask, Weights::Constant(-w)).inhibitory())
    };

    let plastic = |gain| Plasticity::RewardStdp { stdp: cfg.rstdp, tau_e: cfg.tau_e, gain };
    let pfc_to_d1 = net.connect(
        ProjectionSpec::new(pfc, d1, full(cfg.state_space * n), Weights::Constant(cfg.pfc_to_str_init))
            .excitatory()
            .with_plasticity(plastic(cfg.da_gain)),
    )?;
    let pfc_to_d2 = net.connect(
        ProjectionSpec::new(pfc, d2, full(cfg.state_space * n), Weights::Constant(cfg.pfc_to_str_init))
            .excitatory()
            .with_plasticity(plastic(-cfg.da_gain)),
    )?;
    exc(&mut net, pfc, stn, full(cfg.state_space * n), cfg.pfc_to_stn)?;
    exc(&mut net, pfc, th, full(cfg.state_space * n), cfg.pfc_to_th)?;
    exc(&mut net, pmc, d1, same(), cfg.efference)?;
    exc(&mut net, pmc, d2, same(), cfg.efference)?;
    inh(&mut net, d1, gpi, same(), cfg.d1_to_gpi)?;
    inh(&mut net, d2, gpe, same(), cfg.d2_to_gpe)?;
    inh(&mut net, gpe, gpi, same(), cfg.gpe_to_gpi)?;
    inh(&mut net, gpe, stn, same(), cfg.gpe_to_stn)?;
    exc(&mut net, stn, gpi, full(size), cfg.stn_to_gpi)?;
    exc(&mut net, stn, gpe, same(), cfg.stn_to_gpe)?;
    inh(&mut net, gpi, th, same(), cfg.gpi_to_th)?;
    exc(&mut net, th, pmc, same(), cfg.th_to_pmc)?;
    inh(&mut net, pmc, pmc, Mask::from_fn(size, size, |i, j| i / n != j / n), cfg.pmc_lateral)?;

    Ok(BdmCircuit {
        net,
        cfg: cfg.clone(),
        pops: BdmPopulations { pfc, d1, d2, stn, gpe, gpi, th, pmc },
        pfc_to_d1,
        pfc_to_d2,
    })
}

impl BdmCircuit {
    /// Advances one tick with the PFC block of `state` active.
    fn pfc_rate(&self) -> f64 {
        if self.cfg.uses_hh(Nucleus::StrD1) || self.cfg.uses_hh(Nucleus::StrD2) {
            self.cfg.pfc_rate_hz * self.cfg.hh_pfc_rate_gain
        } else {
            self.cfg.pfc_rate_hz
        }
    }

    fn tick(&mut self, state: Option<usize>) -> Result<(), CircuitError> {
        if let Some(s) = state {
            let n = self.cfg.group_size;
            let rate = self.pfc_rate();
            self.net.drive_rate(self.pops.pfc, s * n, (s + 1) * n, rate);
        }
        self.net.step()?;
        Ok(())
    }

    /// Presents every state for `decision_steps` ticks, separated by
    /// `settle_steps` silent ticks, and records all spikes. No reward is
    /// delivered.
    pub fn record_states(&mut self, seed: u64) -> Result<Recorder, CircuitError> {
        self.net.reset(seed);
        let mut rec = Recorder::new(RecordConfig::raster());
        for state in 0..self.cfg.state_space {
            for _ in 0..self.cfg.decision_steps {
                self.tick(Some(state))?;
                rec.observe(&self.net);
            }
            for _ in 0..self.cfg.settle_steps {
                self.tick(None)?;
                rec.observe(&self.net);
            }
        }
        Ok(rec)
    }

    /// Mean learned PFC→StrD1 minus PFC→StrD2 weight from `state` onto the
    /// block of `action`.
    pub fn preference(&self, state: usize, action: usize) -> f64 {
        let n = self.cfg.group_size;
        let block = |id| {
            let w = self.net.weight_matrix(id).expect("projection exists");
            w.slice(ndarray::s![state * n..(state + 1) * n, action * n..(action + 1) * n]).mean().unwrap_or(0.0)
        };
        block(self.pfc_to_d1) - block(self.pfc_to_d2)
    }

    /// Presents `state`, counts PMC spikes per action block and picks the
    /// winner. Ties are broken by `rng`; silence falls back to action 0.
    fn decide(&mut self, state: usize, rng: &mut ChaCha8Rng) -> Result<(usize, bool), CircuitError> {
        let n = self.cfg.group_size;
        let mut counts = vec![0u32; self.cfg.action_space];
        for _ in 0..self.cfg.decision_steps {
            self.tick(Some(state))?;
            for &k in self.net.spikes(self.pops.pmc) {
                counts[k as usize / n] += 1;
            }
        }
        let out = wta_readout(&counts);
        Ok(match out.status {
            WtaStatus::Clear => (out.winner.unwrap_or(0), true),
            WtaStatus::Tie => {
                let best = counts.iter().copied().max().unwrap_or(0);
                let tied: Vec<usize> = (0..counts.len()).filter(|&k| counts[k] == best).collect();
                (tied[rng.random_range(0..tied.len())], true)
            }
            WtaStatus::NoWinner => (0, false),
        })
    }

    fn commit(&mut self, state: usize, action: usize) -> Result<(), CircuitError> {
        let n = self.cfg.group_size;
        // Injected current passes through the population gain; scale it like the bias.
        let current = if self.cfg.uses_hh(Nucleus::Pmc) {
            self.cfg.commit_current * self.cfg.hh_bias_gain / self.cfg.hh_input_gain
        } else {
            self.cfg.commit_current
        };
        for _ in 0..self.cfg.commit_steps {
            for k in action * n..(action + 1) * n {
                self.net.inject_neuron(self.pops.pmc, k, current);
            }
            self.tick(Some(state))?;
        }
        Ok(())
    }

    /// Trains on the corridor for `cfg.episodes` episodes. The corridor and
    /// the network noise both derive from `seed`.
    pub fn run(&mut self, seed: u64) -> Result<BdmOutcome, CircuitError> {
        if self.cfg.state_space != Corridor::STATES || self.cfg.action_space != Corridor::ACTIONS {
            return Err(invalid("the corridor task needs state_space = 5 and action_space = 2"));
        }
        self.net.reset(seed);
        let mut env = Corridor::new(self.cfg.corridor_length, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_0FBD);
        let mut outcome = BdmOutcome {
            variant: self.cfg.neuron_variant,
            episode_rewards: Vec::with_capacity(self.cfg.episodes as usize),
            network_decisions: 0,
            default_decisions: 0,
        };
        for _ in 0..self.cfg.episodes {
            env.reset();
            let mut total = 0.0;
            loop {
                let state = env.state();
                let (action, by_network) = self.decide(state, &mut rng)?;
                if by_network {
                    outcome.network_decisions += 1;
                } else {
                    outcome.default_decisions += 1;
                }
                self.commit(state, action)?;
                let (reward, done) = env.step(action);
                self.net.deliver_reward(reward);
                total += reward;
                for _ in 0..self.cfg.settle_steps {
                    self.tick(None)?;
                }
                if done {
                    break;
                }
            }
            outcome.episode_rewards.push(total);
            for _ in 0..self.cfg.rest_steps {
                self.tick(None)?;
            }
        }
        Ok(outcome)
    }
}

/// Trains one fresh circuit per seed, in parallel.
pub fn run_seeds(cfg: &BdmConfig, seeds: &[u64]) -> Result<Vec<BdmOutcome>, CircuitError> {
    let circuit = build_bdm(cfg)?;
    spike_core::par::map_range(seeds.len(), |k| circuit.clone().run(seeds[k])).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_share_ties() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn spearman_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[10.0, 20.0, 25.0, 100.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert_eq!(spearman(&x, &[5.0; 4]), 0.0);
    }

    #[test]
    fn fractions_cover_at_least_one_episode() {
        assert_eq!(fraction_len(60, 0.2), 12);
        assert_eq!(fraction_len(3, 0.2), 1);
    }
}
