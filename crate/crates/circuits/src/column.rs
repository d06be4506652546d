//! Thalamocortical column: six cortical layers, a thalamic relay nucleus and
//! the reticular nucleus, built from four Izhikevich cell classes.
//!
//! The feedforward route is thalamus → L4 → L2/3 → L5 → L6, with L6
//! feeding back onto the relay and reticular cells.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spike_core::network::{
    Mask, Network, PopulationId, PopulationSpec, ProjectionSpec, Recorder, Schedule, Stimulus, Weights,
};
use spike_core::neurons::{classify_izhikevich, FiringPattern, IzhikevichParams, NeuronModel};

use crate::error::invalid;
use crate::CircuitError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    L1,
    L23,
    L4,
    L5,
    L6,
    Thalamus,
    Rtn,
}

impl Layer {
    pub const CORTICAL: [Layer; 5] = [Layer::L1, Layer::L23, Layer::L4, Layer::L5, Layer::L6];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::L1 => "l1",
            Layer::L23 => "l23",
            Layer::L4 => "l4",
            Layer::L5 => "l5",
            Layer::L6 => "l6",
            Layer::Thalamus => "thalamus",
            Layer::Rtn => "rtn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    /// Regular-spiking pyramidal and spiny stellate cells.
    Excitatory,
    /// Intrinsically bursting layer-5 pyramids.
    Bursting,
    /// Fast-spiking basket interneurons.
    Basket,
    /// Low-threshold spiking interneurons.
    Lts,
    /// Thalamic relay cells.
    Relay,
}

impl CellClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CellClass::Excitatory => "exc",
            CellClass::Bursting => "burst",
            CellClass::Basket => "basket",
            CellClass::Lts => "lts",
            CellClass::Relay => "relay",
        }
    }

    pub fn is_excitatory(self) -> bool {
        matches!(self, CellClass::Excitatory | CellClass::Bursting | CellClass::Relay)
    }
}

/// Size and class mix of one cortical layer. The three fractions must sum
/// to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub size: usize,
    pub excitatory: f64,
    pub basket: f64,
    pub lts: f64,
}

impl LayerSpec {
    pub const fn new(size: usize, excitatory: f64, basket: f64, lts: f64) -> Self {
        Self { size, excitatory, basket, lts }
    }

    /// Cell counts `(excitatory, basket, lts)`; rounding goes to the
    /// excitatory share so the counts add up to `size`.
    pub fn counts(&self) -> (usize, usize, usize) {
        let basket = (self.size as f64 * self.basket).round() as usize;
        let lts = ((self.size as f64 * self.lts).round() as usize).min(self.size - basket.min(self.size));
        let basket = basket.min(self.size);
        (self.size - basket - lts, basket, lts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnPresets {
    pub excitatory: IzhikevichParams,
    pub bursting: IzhikevichParams,
    pub basket: IzhikevichParams,
    pub lts: IzhikevichParams,
    pub relay: IzhikevichParams,
}

impl Default for ColumnPresets {
    fn default() -> Self {
        Self {
            excitatory: IzhikevichParams::regular_spiking(),
            bursting: IzhikevichParams::intrinsically_bursting(),
            basket: IzhikevichParams::fast_spiking(),
            lts: IzhikevichParams::low_threshold_spiking(),
            relay: IzhikevichParams::thalamo_cortical(),
        }
    }
}

impl ColumnPresets {
    pub fn get(&self, class: CellClass) -> IzhikevichParams {
        match class {
            CellClass::Excitatory => self.excitatory,
            CellClass::Bursting => self.bursting,
            CellClass::Basket => self.basket,
            CellClass::Lts => self.lts,
            CellClass::Relay => self.relay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnConfig {
    pub l1: LayerSpec,
    pub l23: LayerSpec,
    pub l4: LayerSpec,
    pub l5: LayerSpec,
    pub l6: LayerSpec,
    pub thalamus: usize,
    pub rtn: usize,
    pub presets: ColumnPresets,
    /// Connection probability of every projection.
    pub p_connect: f64,
    /// Excitatory weight inside a layer.
    pub w_local_exc: f64,
    /// Inhibitory weight magnitude inside a layer.
    pub w_local_inh: f64,
    /// Excitatory weight between layers along the feedforward route.
    pub w_feedforward: f64,
    /// Excitatory feedback weight from L6 to thalamus and RTN.
    pub w_feedback: f64,
    pub w_rtn: f64,
    pub background_hz: f64,
    pub background_weight: f64,
    /// Euler sub-steps per 1 ms tick.
    pub substeps: u32,
    /// A layer's onset is the first tick at which its cumulative spike
    /// count reaches this fraction of its cells.
    pub onset_fraction: f64,
    /// Seed for the random connectivity.
    pub wiring_seed: u64,
}

impl Default for ColumnConfig {
    fn default() -> Self {
        Self {
            l1: LayerSpec::new(20, 0.0, 0.0, 1.0),
            l23: LayerSpec::new(100, 0.8, 0.1, 0.1),
            l4: LayerSpec::new(100, 0.8, 0.15, 0.05),
            l5: LayerSpec::new(80, 0.8, 0.1, 0.1),
            l6: LayerSpec::new(80, 0.8, 0.1, 0.1),
            thalamus: 40,
            rtn: 20,
            presets: ColumnPresets::default(),
            p_connect: 0.2,
            w_local_exc: 2.0,
            w_local_inh: 6.0,
            w_feedforward: 4.0,
            w_feedback: 2.0,
            w_rtn: 4.0,
            background_hz: 20.0,
            background_weight: 4.0,
            substeps: 2,
            onset_fraction: 0.05,
            wiring_seed: 0,
        }
    }
}

impl ColumnConfig {
    pub fn validate(&self) -> Result<(), CircuitError> {
        for layer in Layer::CORTICAL {
            let s = self.layer(layer).expect("cortical layer");
            let sum = s.excitatory + s.basket + s.lts;
            if [s.excitatory, s.basket, s.lts].iter().any(|&x| !(0.0..=1.0).contains(&x)) || (sum - 1.0).abs() > 1e-9 {
                return Err(invalid(format!("column {} ratios must lie in [0, 1] and sum to 1", layer.as_str())));
            }
        }
        if self.l4.counts().0 == 0 || self.l23.counts().0 == 0 || self.l5.counts().0 == 0 || self.l6.counts().0 == 0 {
            return Err(invalid("column layers 2/3 to 6 need at least one excitatory cell"));
        }
        if self.thalamus == 0 || self.rtn == 0 {
            return Err(invalid("column thalamus and rtn sizes must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.p_connect) {
            return Err(invalid("column p_connect must lie in [0, 1]"));
        }
        let weights = [
            self.w_local_exc,
            self.w_local_inh,
            self.w_feedforward,
            self.w_feedback,
            self.w_rtn,
            self.background_weight,
            self.background_hz,
        ];
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("column weights and background must be finite and >= 0"));
        }
        if self.substeps == 0 {
            return Err(invalid("column substeps must be >= 1"));
        }
        if !(self.onset_fraction > 0.0 && self.onset_fraction <= 1.0) {
            return Err(invalid("column onset_fraction must lie in (0, 1]"));
        }
        Ok(())
    }

    fn layer(&self, layer: Layer) -> Option<&LayerSpec> {
        match layer {
            Layer::L1 => Some(&self.l1),
            Layer::L23 => Some(&self.l23),
            Layer::L4 => Some(&self.l4),
            Layer::L5 => Some(&self.l5),
            Layer::L6 => Some(&self.l6),
            Layer::Thalamus | Layer::Rtn => None,
        }
    }
}

/// One population of the column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnPopulation {
    pub id: PopulationId,
    pub layer: Layer,
    pub class: CellClass,
}

#[derive(Debug, Clone)]
pub struct ColumnCircuit {
    pub net: Network,
    pub cfg: ColumnConfig,
    pub populations: Vec<ColumnPopulation>,
}

/// Population name, e.g. `l4_exc` or `thalamus_relay`.
pub fn population_name(layer: Layer, class: CellClass) -> String {
    format!("{}_{}", layer.as_str(), class.as_str())
}

pub fn build_column(cfg: &ColumnConfig) -> Result<ColumnCircuit, CircuitError> {
    cfg.validate()?;
    let mut net = Network::new(1.0)?;
    let mut populations = Vec::new();

    let mut add = |net: &mut Network, layer: Layer, class: CellClass, size: usize| -> Result<(), CircuitError> {
        if size == 0 {
            return Ok(());
        }
        let spec = PopulationSpec::neurons(population_name(layer, class), size, NeuronModel::Izhikevich(cfg.presets.get(class)))
            .with_substeps(cfg.substeps)
            .with_background(cfg.background_hz, cfg.background_weight);
        let id = net.add_population(spec)?;
        populations.push(ColumnPopulation { id, layer, class });
        Ok(())
    };
    for layer in Layer::CORTICAL {
        let (exc, basket, lts) = cfg.layer(layer).expect("cortical layer").counts();
        let class = if layer == Layer::L5 { CellClass::Bursting } else { CellClass::Excitatory };
        add(&mut net, layer, class, exc)?;
        add(&mut net, layer, CellClass::Basket, basket)?;
        add(&mut net, layer, CellClass::Lts, lts)?;
    }
    add(&mut net, Layer::Thalamus, CellClass::Relay, cfg.thalamus)?;
    add(&mut net, Layer::Rtn, CellClass::Lts, cfg.rtn)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.wiring_seed);
    let mut wire = |net: &mut Network, pre: &ColumnPopulation, post: &ColumnPopulation, w: f64| -> Result<(), CircuitError> {
        if w == 0.0 {
            return Ok(());
        }
        let mask = Mask::bernoulli(net.size(pre.id), net.size(post.id), cfg.p_connect, &mut rng);
        let spec = if pre.class.is_excitatory() {
            ProjectionSpec::new(pre.id, post.id, mask, Weights::Constant(w)).excitatory()
        } else {
            ProjectionSpec::new(pre.id, post.id, mask, Weights::Constant(-w)).inhibitory()
        };
        net.connect(spec)?;
        Ok(())
    };

    let pops = populations.clone();
    let of = |layer: Layer| pops.iter().filter(move |p| p.layer == layer);
    let exc_of = |layer: Layer| of(layer).find(|p| p.class.is_excitatory());

    // Local circuits: E→E, E→I, I⊣E.
    for layer in Layer::CORTICAL {
        for pre in of(layer) {
            for post in of(layer) {
                let w = match (pre.class.is_excitatory(), post.class.is_excitatory()) {
                    (true, _) => cfg.w_local_exc,
                    (false, true) => cfg.w_local_inh,
                    (false, false) => 0.0,
                };
                wire(&mut net, pre, post, w)?;
            }
        }
    }
    let (th, rtn) = (exc_of(Layer::Thalamus).expect("relay"), of(Layer::Rtn).next().expect("rtn"));
    // Feedforward route, entering L4 from the relay cells.
    for post in of(Layer::L4) {
        wire(&mut net, th, post, cfg.w_feedforward)?;
    }
    for (from, to) in [(Layer::L4, Layer::L23), (Layer::L23, Layer::L5), (Layer::L5, Layer::L6)] {
        let pre = exc_of(from).expect("excitatory cells");
        for post in of(to) {
            wire(&mut net, pre, post, cfg.w_feedforward)?;
        }
    }
    // L2/3 drives the layer-1 interneurons.
    for post in of(Layer::L1) {
        wire(&mut net, exc_of(Layer::L23).expect("l23"), post, cfg.w_local_exc)?;
    }
    // Corticothalamic loop.
    let l6 = exc_of(Layer::L6).expect("l6");
    wire(&mut net, l6, th, cfg.w_feedback)?;
    wire(&mut net, l6, rtn, cfg.w_feedback)?;
    wire(&mut net, th, rtn, cfg.w_feedback)?;
    wire(&mut net, rtn, th, cfg.w_rtn)?;

    Ok(ColumnCircuit { net, cfg: cfg.clone(), populations })
}

/// Outcome of an L4 stimulation run.
#[derive(Debug, Clone)]
pub struct ColumnRun {
    pub recorder: Recorder,
    /// Onset tick of each layer, `None` if it never reached the onset count.
    pub latencies: Vec<(Layer, Option<u64>)>,
}

impl ColumnRun {
    pub fn latency(&self, layer: Layer) -> Option<u64> {
        self.latencies.iter().find(|(l, _)| *l == layer).and_then(|(_, t)| *t)
    }

    /// Mean rate (Hz) over the whole run and every population.
    pub fn mean_rate_hz(&self, n_neurons: usize) -> f64 {
        let steps = self.recorder.steps_recorded();
        if steps == 0 || n_neurons == 0 {
            return 0.0;
        }
        let total: u64 = (0..self.recorder.population_names().len())
            .map(|k| self.recorder.total_spikes(PopulationId(k)))
            .sum();
        total as f64 * 1000.0 / (steps as f64 * n_neurons as f64)
    }
}

impl ColumnCircuit {
    pub fn population(&self, layer: Layer, class: CellClass) -> Option<PopulationId> {
        self.populations.iter().find(|p| p.layer == layer && p.class == class).map(|p| p.id)
    }

    /// Injects `amplitude` into the L4 excitatory cells for the first
    /// `duration` ticks of a `steps`-tick run and records the raster.
    pub fn stimulate_l4(&mut self, amplitude: f64, duration: u64, steps: u64, seed: u64) -> Result<ColumnRun, CircuitError> {
        if !amplitude.is_finite() {
            return Err(invalid("column stimulation amplitude must be finite"));
        }
        let name = population_name(Layer::L4, CellClass::Excitatory);
        let stimuli = if duration > 0 && amplitude != 0.0 {
            vec![Stimulus::current(name, 0, duration, amplitude)]
        } else {
            Vec::new()
        };
        let recorder = self.net.run(steps, &Schedule::new(stimuli), seed)?;
        let mut latencies = Vec::new();
        for layer in [Layer::L1, Layer::L23, Layer::L4, Layer::L5, Layer::L6, Layer::Thalamus, Layer::Rtn] {
            let members: Vec<PopulationId> =
                self.populations.iter().filter(|p| p.layer == layer).map(|p| p.id).collect();
            let cells: usize = members.iter().map(|&id| self.net.size(id)).sum();
            let needed = ((cells as f64 * self.cfg.onset_fraction).ceil() as u64).max(1);
            let mut total = 0u64;
            let onset = (0..recorder.steps_recorded()).find(|&t| {
                total += members.iter().map(|&id| u64::from(recorder.spike_counts(id)[t])).sum::<u64>();
                total >= needed
            });
            latencies.push((layer, onset.map(|t| t as u64)));
        }
        Ok(ColumnRun { recorder, latencies })
    }
}

/// Labels every cell-class preset under a constant drive.
pub fn classify_presets(presets: &ColumnPresets, drive: f64, duration_ms: f64) -> Vec<(CellClass, FiringPattern)> {
    [CellClass::Excitatory, CellClass::Bursting, CellClass::Basket, CellClass::Lts, CellClass::Relay]
        .into_iter()
        .map(|c| (c, classify_izhikevich(&presets.get(c), drive, duration_ms)))
        .collect()
}
