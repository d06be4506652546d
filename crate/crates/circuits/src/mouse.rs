//! Scaled mouse-brain model: six aEIF cell types spread over connectome
//! areas, run without external stimulation.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spike_core::network::{Mask, Network, PopulationId, PopulationSpec, ProjectionSpec, Recorder, Schedule, Weights};
use spike_core::neurons::{AeifParams, NeuronModel};

use crate::error::invalid;
use crate::CircuitError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeuronType {
    E,
    IBc,
    IMc,
    Tc,
    Ti,
    Trn,
}

impl NeuronType {
    pub const ALL: [NeuronType; 6] =
        [NeuronType::E, NeuronType::IBc, NeuronType::IMc, NeuronType::Tc, NeuronType::Ti, NeuronType::Trn];

    pub fn as_str(self) -> &'static str {
        match self {
            NeuronType::E => "e",
            NeuronType::IBc => "i_bc",
            NeuronType::IMc => "i_mc",
            NeuronType::Tc => "tc",
            NeuronType::Ti => "ti",
            NeuronType::Trn => "trn",
        }
    }

    pub fn is_excitatory(self) -> bool {
        matches!(self, NeuronType::E | NeuronType::Tc)
    }
}

/// One value per neuron type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerType<T> {
    pub e: T,
    pub i_bc: T,
    pub i_mc: T,
    pub tc: T,
    pub ti: T,
    pub trn: T,
}

impl<T: Copy> PerType<T> {
    pub fn get(&self, t: NeuronType) -> T {
        match t {
            NeuronType::E => self.e,
            NeuronType::IBc => self.i_bc,
            NeuronType::IMc => self.i_mc,
            NeuronType::Tc => self.tc,
            NeuronType::Ti => self.ti,
            NeuronType::Trn => self.trn,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(NeuronType, T) -> U) -> PerType<U> {
        PerType {
            e: f(NeuronType::E, self.e),
            i_bc: f(NeuronType::IBc, self.i_bc),
            i_mc: f(NeuronType::IMc, self.i_mc),
            tc: f(NeuronType::Tc, self.tc),
            ti: f(NeuronType::Ti, self.ti),
            trn: f(NeuronType::Trn, self.trn),
        }
    }
}

/// Table cell counts at scale 1.
pub const TABLE_COUNTS: PerType<usize> = PerType { e: 56100, i_bc: 14960, i_mc: 7480, tc: 1300, ti: 260, trn: 520 };

/// Per-type membrane parameters. `tau_w` is unused (and may be absent)
/// when `alpha` and `beta` are both zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeParams {
    pub v_th: f64,
    pub v_r: f64,
    /// Membrane time constant (ms).
    pub tau_v: f64,
    pub tau_w: Option<f64>,
    /// Subthreshold adaptation `a`.
    pub alpha: f64,
    /// Spike-triggered adaptation `b`.
    pub beta: f64,
}

impl TypeParams {
    const fn new(v_th: f64, v_r: f64, tau_v: f64, tau_w: Option<f64>, alpha: f64, beta: f64) -> Self {
        Self { v_th, v_r, tau_v, tau_w, alpha, beta }
    }
}

pub const TABLE_PARAMS: PerType<TypeParams> = PerType {
    e: TypeParams::new(-50.0, -110.0, 100.0, None, 0.0, 0.0),
    i_bc: TypeParams::new(-44.0, -110.0, 100.0, Some(20.0), -2.0, 4.5),
    i_mc: TypeParams::new(-45.0, -66.0, 85.0, Some(20.0), -2.0, 4.5),
    tc: TypeParams::new(-50.0, -60.0, 200.0, None, 0.0, 0.0),
    ti: TypeParams::new(-50.0, -60.0, 20.0, Some(20.0), -2.0, 4.5),
    trn: TypeParams::new(-45.0, -65.0, 40.0, Some(20.0), -2.0, 4.5),
};

/// Shared membrane constants: leak conductance (nS), leak reversal (mV)
/// and slope factor (mV). Capacitance follows as `g_l * tau_v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Membrane {
    pub g_l: f64,
    pub e_l: f64,
    pub delta_t: f64,
}

impl Default for Membrane {
    fn default() -> Self {
        Self { g_l: 10.0, e_l: -70.0, delta_t: 2.0 }
    }
}

/// aEIF parameters for one type.
pub fn aeif_params(p: &TypeParams, m: &Membrane) -> AeifParams {
    AeifParams {
        c_mem: m.g_l * p.tau_v,
        g_l: m.g_l,
        e_l: m.e_l,
        delta_t: m.delta_t,
        v_th: p.v_th,
        v_reset: p.v_r,
        // Without adaptation the value never enters the dynamics.
        tau_w: p.tau_w.unwrap_or(1.0),
        a: p.alpha,
        b: p.beta,
    }
}

/// Threshold current of a type: the current that holds it at `v_th`,
/// counting the subthreshold adaptation.
pub fn rheobase(p: &TypeParams, m: &Membrane) -> f64 {
    (m.g_l + p.alpha) * (p.v_th - m.e_l)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ConnectomeSource {
    /// CSV with header `src_area,dst_area,weight`.
    File { path: PathBuf },
    /// Directed Watts-Strogatz graph.
    Synthetic { areas: usize, neighbours: usize, rewire: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MouseBrainConfig {
    /// Fraction of the table counts, in (0, 1].
    pub scale: f64,
    pub counts: PerType<usize>,
    pub params: PerType<TypeParams>,
    pub membrane: Membrane,
    pub connectome: ConnectomeSource,
    /// Constant drive as a fraction of each type's rheobase.
    pub bias_fraction: f64,
    pub background_hz: f64,
    /// Charge of one background event (pA over one tick).
    pub background_weight: f64,
    /// Connection probability inside an area.
    pub p_local: f64,
    /// Largest connection probability between areas, reached by the
    /// strongest connectome edge.
    pub p_inter: f64,
    pub w_exc: f64,
    pub w_inh: f64,
    pub w_inter: f64,
    pub wiring_seed: u64,
}

impl Default for MouseBrainConfig {
    fn default() -> Self {
        Self {
            scale: 0.02,
            counts: TABLE_COUNTS,
            params: TABLE_PARAMS,
            membrane: Membrane::default(),
            connectome: ConnectomeSource::Synthetic { areas: 16, neighbours: 4, rewire: 0.1, seed: 0 },
            bias_fraction: 0.9,
            background_hz: 500.0,
            background_weight: 100.0,
            p_local: 0.05,
            p_inter: 0.02,
            w_exc: 100.0,
            w_inh: 200.0,
            w_inter: 100.0,
            wiring_seed: 0,
        }
    }
}

impl MouseBrainConfig {
    pub fn validate(&self) -> Result<(), CircuitError> {
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(invalid("mouse scale ∈ (0,1]"));
        }
        for t in NeuronType::ALL {
            let p = self.params.get(t);
            if !(p.tau_v > 0.0) || !(p.v_r < p.v_th) {
                return Err(invalid(format!("mouse {} params need tau_v > 0 and v_r < v_th", t.as_str())));
            }
            let adapting = p.alpha != 0.0 || p.beta != 0.0;
            if adapting && !p.tau_w.is_some_and(|x| x > 0.0) {
                return Err(invalid(format!("mouse {} adapts, so tau_w must be > 0", t.as_str())));
            }
            if self.counts.get(t) > 0 && self.scaled_count(t) == 0 {
                return Err(invalid(format!("mouse scaled count of {} must be >= 1", t.as_str())));
            }
        }
        if !(self.membrane.g_l > 0.0 && self.membrane.delta_t > 0.0) {
            return Err(invalid("mouse g_l and delta_t must be > 0"));
        }
        for (name, p) in [("p_local", self.p_local), ("p_inter", self.p_inter)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("mouse {name} must lie in [0, 1]")));
            }
        }
        if [self.w_exc, self.w_inh, self.w_inter, self.background_hz, self.background_weight]
            .iter()
            .any(|w| !(w.is_finite() && *w >= 0.0))
        {
            return Err(invalid("mouse weights and background must be finite and >= 0"));
        }
        if !self.bias_fraction.is_finite() {
            return Err(invalid("mouse bias_fraction must be finite"));
        }
        if let ConnectomeSource::Synthetic { areas, neighbours, rewire, .. } = self.connectome {
            if areas == 0 || neighbours >= areas.max(1) || !(0.0..=1.0).contains(&rewire) {
                return Err(invalid("mouse synthetic connectome needs areas >= 1, neighbours < areas, rewire in [0, 1]"));
            }
        }
        Ok(())
    }

    /// `round(scale × count)` for one type.
    pub fn scaled_count(&self, t: NeuronType) -> usize {
        (self.scale * self.counts.get(t) as f64).round() as usize
    }

    pub fn scaled_counts(&self) -> PerType<usize> {
        self.counts.map(|t, _| self.scaled_count(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Directed weighted graph between named areas.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Connectome {
    pub areas: Vec<String>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Deserialize)]
struct Row {
    src_area: String,
    dst_area: String,
    weight: f64,
}

const HEADER: [&str; 3] = ["src_area", "dst_area", "weight"];

impl Connectome {
    pub fn from_path(path: &Path) -> Result<Self, CircuitError> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    /// Parses `src_area,dst_area,weight` rows. Areas are numbered in order
    /// of first appearance. Weights must be finite and non-negative.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, CircuitError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = rdr.headers().map_err(|e| csv_error(&e, 1))?.clone();
        for (k, expected) in HEADER.iter().enumerate() {
            if header.get(k).map(str::trim) != Some(*expected) {
                return Err(CircuitError::Connectome {
                    line: 1,
                    column: header.get(k).unwrap_or("").to_owned(),
                    message: format!("header must be `{}`", HEADER.join(",")),
                });
            }
        }
        let mut c = Connectome::default();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut area = |name: &str, c: &mut Connectome| {
            *index.entry(name.to_owned()).or_insert_with(|| {
                c.areas.push(name.to_owned());
                c.areas.len() - 1
            })
        };
        for result in rdr.deserialize::<Row>() {
            let row = result.map_err(|e| csv_error(&e, 0))?;
            let line = c.edges.len() as u64 + 2;
            for (column, name) in [("src_area", &row.src_area), ("dst_area", &row.dst_area)] {
                if name.trim().is_empty() {
                    return Err(CircuitError::Connectome { line, column: column.into(), message: "empty area name".into() });
                }
            }
            if !(row.weight.is_finite() && row.weight >= 0.0) {
                return Err(CircuitError::Connectome {
                    line,
                    column: "weight".into(),
                    message: format!("weight {} must be finite and >= 0", row.weight),
                });
            }
            let src = area(row.src_area.trim(), &mut c);
            let dst = area(row.dst_area.trim(), &mut c);
            c.edges.push(Edge { src, dst, weight: row.weight });
        }
        Ok(c)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CircuitError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CircuitError::ConnectomeIo(e.into());
        w.write_record(HEADER).map_err(io)?;
        for e in &self.edges {
            w.write_record([&self.areas[e.src], &self.areas[e.dst], &e.weight.to_string()]).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Ring of `areas` nodes, each projecting to its `neighbours` nearest
    /// successors; every edge is rewired to a random target with
    /// probability `rewire`. Weights are uniform in `[0.1, 1)`.
    pub fn small_world(areas: usize, neighbours: usize, rewire: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let names = (0..areas).map(|k| format!("area{k:03}")).collect();
        let mut edges = Vec::new();
        for src in 0..areas {
            for step in 1..=neighbours {
                let mut dst = (src + step) % areas;
                if rng.random::<f64>() < rewire && areas > 1 {
                    dst = rng.random_range(0..areas - 1);
                    if dst >= src {
                        dst += 1;
                    }
                }
                edges.push(Edge { src, dst, weight: rng.random_range(0.1..1.0) });
            }
        }
        Connectome { areas: names, edges }
    }
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> CircuitError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    let column = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err
            .field()
            .and_then(|k| HEADER.get(k as usize))
            .map_or_else(String::new, |s| (*s).to_owned()),
        _ => String::new(),
    };
    CircuitError::Connectome { line, column, message: e.to_string() }
}

/// Splits `total` over `parts` as evenly as possible, earlier parts first.
fn split(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|k| total / parts + usize::from(k < total % parts)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MousePopulation {
    pub id: PopulationId,
    pub area: usize,
    pub kind: NeuronType,
}

#[derive(Debug, Clone)]
pub struct MouseBrain {
    pub net: Network,
    pub cfg: MouseBrainConfig,
    pub connectome: Connectome,
    pub populations: Vec<MousePopulation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeActivity {
    pub kind: NeuronType,
    pub neurons: usize,
    pub spikes: u64,
    pub rate_hz: f64,
}

#[derive(Debug, Clone)]
pub struct MouseRun {
    pub recorder: Recorder,
    pub activity: Vec<TypeActivity>,
    /// Neurons whose state holds a NaN or infinity after the run.
    pub non_finite: usize,
}

/// Builds the model. Every area receives an even share of every type;
/// areas left with no cells of a type simply lack that population.
pub fn build_mouse_brain(cfg: &MouseBrainConfig) -> Result<MouseBrain, CircuitError> {
    cfg.validate()?;
    let connectome = match &cfg.connectome {
        ConnectomeSource::File { path } => Connectome::from_path(path)?,
        ConnectomeSource::Synthetic { areas, neighbours, rewire, seed } => {
            Connectome::small_world(*areas, *neighbours, *rewire, *seed)
        }
    };
    if connectome.areas.is_empty() {
        return Err(invalid("mouse connectome has no areas"));
    }
    let n_areas = connectome.areas.len();
    let mut net = Network::new(1.0)?;
    let mut populations = Vec::new();
    let counts = cfg.scaled_counts();
    let shares: Vec<Vec<usize>> = NeuronType::ALL.iter().map(|&t| split(counts.get(t), n_areas)).collect();
    for (a, name) in connectome.areas.iter().enumerate() {
        for (k, t) in NeuronType::ALL.into_iter().enumerate() {
            let size = shares[k][a];
            if size == 0 {
                continue;
            }
            let p = cfg.params.get(t);
            let spec = PopulationSpec::neurons(format!("{name}_{}", t.as_str()), size, NeuronModel::Aeif(aeif_params(&p, &cfg.membrane)))
                .with_bias(cfg.bias_fraction * rheobase(&p, &cfg.membrane))
                .with_background(cfg.background_hz, cfg.background_weight);
            let id = net.add_population(spec)?;
            populations.push(MousePopulation { id, area: a, kind: t });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.wiring_seed);
    let mut wire = |net: &mut Network, pre: &MousePopulation, post: &MousePopulation, p: f64, w: f64| {
        if p <= 0.0 || w == 0.0 {
            return Ok::<(), CircuitError>(());
        }
        let mask = Mask::bernoulli(net.size(pre.id), net.size(post.id), p, &mut rng);
        if mask.n_synapses() == 0 {
            return Ok(());
        }
        let spec = if pre.kind.is_excitatory() {
            ProjectionSpec::new(pre.id, post.id, mask, Weights::Constant(w)).excitatory()
        } else {
            ProjectionSpec::new(pre.id, post.id, mask, Weights::Constant(-w)).inhibitory()
        };
        net.connect(spec)?;
        Ok(())
    };
    for a in 0..n_areas {
        let local: Vec<MousePopulation> = populations.iter().filter(|p| p.area == a).copied().collect();
        for pre in &local {
            let w = if pre.kind.is_excitatory() { cfg.w_exc } else { cfg.w_inh };
            for post in &local {
                wire(&mut net, pre, post, cfg.p_local, w)?;
            }
        }
    }
    let max_w = connectome.edges.iter().map(|e| e.weight).fold(0.0, f64::max);
    if max_w > 0.0 {
        // Long-range projections run between the excitatory cells of each area.
        let find = |area: usize| populations.iter().find(|p| p.area == area && p.kind == NeuronType::E).copied();
        for e in &connectome.edges {
            if let (Some(pre), Some(post)) = (find(e.src), find(e.dst)) {
                wire(&mut net, &pre, &post, cfg.p_inter * e.weight / max_w, cfg.w_inter)?;
            }
        }
    }
    Ok(MouseBrain { net, cfg: cfg.clone(), connectome, populations })
}

impl MouseBrain {
    /// Cells of each type in the built network.
    pub fn type_counts(&self) -> PerType<usize> {
        let count = |t| self.populations.iter().filter(|p| p.kind == t).map(|p| self.net.size(p.id)).sum();
        PerType { e: count(NeuronType::E), i_bc: count(NeuronType::IBc), i_mc: count(NeuronType::IMc), tc: count(NeuronType::Tc), ti: count(NeuronType::Ti), trn: count(NeuronType::Trn) }
    }

    /// Runs `steps` ticks with background drive only.
    pub fn run_spontaneous(&mut self, steps: u64, seed: u64) -> Result<MouseRun, CircuitError> {
        let recorder = self.net.run(steps, &Schedule::default(), seed)?;
        let activity = NeuronType::ALL
            .into_iter()
            .map(|kind| {
                let pops = self.populations.iter().filter(|p| p.kind == kind);
                let neurons: usize = pops.clone().map(|p| self.net.size(p.id)).sum();
                let spikes: u64 = pops.map(|p| recorder.total_spikes(p.id)).sum();
                let rate_hz = if neurons == 0 { 0.0 } else { spikes as f64 * 1000.0 / (neurons as f64 * steps as f64) };
                TypeActivity { kind, neurons, spikes, rate_hz }
            })
            .collect();
        let non_finite = self
            .populations
            .iter()
            .map(|p| self.net.states(p.id).iter().filter(|s| !s.is_finite()).count())
            .sum();
        Ok(MouseRun { recorder, activity, non_finite })
    }
}
