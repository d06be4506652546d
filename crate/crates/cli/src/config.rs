//! Experiment configuration: strict JSON files, command-line overrides and
//! validation that reports every violation without running anything.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use spike_circuits::bdm::{BdmConfig, NeuronVariant};
use spike_circuits::column::ColumnConfig;
use spike_circuits::digits::DigitsConfig;
use spike_circuits::drosophila::{DrosophilaConfig, Pathway};
use spike_circuits::mouse::MouseBrainConfig;
use spike_core::neurons::{HhVariant, IzhikevichParams, NeuronModel, HH_FULL_MAX_DT};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    BdmTask,
    ColumnL4,
    DrosophilaPi,
    MouseSpontaneous,
    NeuronProbe,
    UnsupervisedDigits,
}

impl Experiment {
    /// Sorted by name.
    pub const ALL: [Experiment; 6] = [
        Self::BdmTask,
        Self::ColumnL4,
        Self::DrosophilaPi,
        Self::MouseSpontaneous,
        Self::NeuronProbe,
        Self::UnsupervisedDigits,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::BdmTask => "bdm_task",
            Self::ColumnL4 => "column_l4",
            Self::DrosophilaPi => "drosophila_pi",
            Self::MouseSpontaneous => "mouse_spontaneous",
            Self::NeuronProbe => "neuron_probe",
            Self::UnsupervisedDigits => "unsupervised_digits",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::BdmTask => "basal-ganglia decision circuit learning the corridor task with R-STDP",
            Self::ColumnL4 => "thalamocortical column driven through L4, layer onset latencies",
            Self::DrosophilaPi => "mushroom-body colour/shape dilemma, preference sweep per pathway",
            Self::MouseSpontaneous => "scaled mouse-brain spontaneous activity per neuron type",
            Self::NeuronProbe => "single neuron under a current step, voltage trace and firing pattern",
            Self::UnsupervisedDigits => "STDP digit layer, label-assignment accuracy before and after training",
        }
    }

    /// Whether the top-level `steps` or `episodes` key applies.
    fn takes_steps(self) -> bool {
        !matches!(self, Self::BdmTask | Self::UnsupervisedDigits)
    }

    pub fn names() -> String {
        Self::ALL.map(Self::as_str).join(", ")
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| CliError::UnknownExperiment { name: s.to_string(), valid: Self::names() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrosophilaParams {
    pub circuit: DrosophilaConfig,
    /// Evenly spaced colour intensities in `[0, 1]`.
    pub points: usize,
    pub pathways: Vec<Pathway>,
}

impl Default for DrosophilaParams {
    fn default() -> Self {
        Self { circuit: DrosophilaConfig::default(), points: 9, pathways: vec![Pathway::Linear, Pathway::Nonlinear] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BdmParams {
    pub circuit: BdmConfig,
    pub variants: Vec<NeuronVariant>,
    /// Independent runs per variant, seeded `seed, seed + 1, ...`.
    pub replicates: u32,
}

impl Default for BdmParams {
    fn default() -> Self {
        Self {
            circuit: BdmConfig::default(),
            variants: vec![NeuronVariant::Lif, NeuronVariant::SimplifiedHh, NeuronVariant::SimplifiedHhNoNa],
            replicates: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnParams {
    pub circuit: ColumnConfig,
    /// Current injected into L4 excitatory cells.
    pub amplitude: f64,
    pub pulse_steps: u64,
    /// Independent columns, seeded `seed, seed + 1, ...` for both wiring
    /// and noise.
    pub replicates: u32,
    pub classify_drive: f64,
    pub classify_duration_ms: f64,
}

impl Default for ColumnParams {
    fn default() -> Self {
        Self {
            circuit: ColumnConfig::default(),
            amplitude: 10.0,
            pulse_steps: 100,
            replicates: 1,
            classify_drive: 15.0,
            classify_duration_ms: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MouseParams {
    pub circuit: MouseBrainConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DigitsParams {
    pub layer: DigitsConfig,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Pixel flip probability of the generated digits.
    pub flip: f64,
    pub epochs: u32,
}

impl Default for DigitsParams {
    fn default() -> Self {
        Self { layer: DigitsConfig::default(), train_per_class: 100, test_per_class: 20, flip: 0.05, epochs: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeParams {
    pub model: NeuronModel,
    pub current: f64,
    /// Ticks at zero current before the step.
    pub onset_steps: u64,
    /// Tick length (ms).
    pub dt: f64,
    pub substeps: u32,
}

impl Default for ProbeParams {
    fn default() -> Self {
        Self {
            model: NeuronModel::Izhikevich(IzhikevichParams::regular_spiking()),
            current: 10.0,
            onset_steps: 50,
            dt: 1.0,
            substeps: 1,
        }
    }
}

/// Experiment-specific parameter table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Bdm(BdmParams),
    Column(ColumnParams),
    Drosophila(DrosophilaParams),
    Mouse(MouseParams),
    Probe(ProbeParams),
    Digits(DigitsParams),
}

/// A fully resolved and validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub steps: Option<u64>,
    pub episodes: Option<u32>,
    /// Where outputs go; not part of the hashed config.
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    pub params: Params,
}

impl ExperimentConfig {
    /// Simulation length for step-based experiments.
    pub fn steps_or(&self, default: u64) -> u64 {
        self.steps.unwrap_or(default)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serialises")
    }
}

/// One schema or constraint violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl Violation {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub steps: Option<u64>,
    pub episodes: Option<u32>,
    pub output_dir: Option<PathBuf>,
}

const TOP_LEVEL: [&str; 6] = ["experiment", "seed", "steps", "episodes", "output_dir", "params"];

pub fn read_config_file(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Invalid(vec![Violation::new(path.display().to_string(), format!("not valid JSON: {e}"))])
    })
}

/// Checks `file` (if any) merged with `over` and returns the resolved
/// config or every violation found.
pub fn resolve(file: Option<&Value>, over: &Overrides) -> Result<ExperimentConfig, Vec<Violation>> {
    let mut bad = Vec::new();
    let empty = serde_json::Map::new();
    let obj = match file {
        None => &empty,
        Some(Value::Object(m)) => m,
        Some(_) => return Err(vec![Violation::new("(root)", "expected a JSON object")]),
    };
    for key in obj.keys() {
        if !TOP_LEVEL.contains(&key.as_str()) {
            bad.push(Violation::new(key.as_str(), format!("unknown key (allowed: {})", TOP_LEVEL.join(", "))));
        }
    }

    let file_experiment = match obj.get("experiment") {
        None => None,
        Some(Value::String(s)) => match s.parse::<Experiment>() {
            Ok(e) => Some(e),
            Err(_) => {
                bad.push(Violation::new("experiment", format!("unknown experiment `{s}` (valid: {})", Experiment::names())));
                None
            }
        },
        Some(_) => {
            bad.push(Violation::new("experiment", "must be a string"));
            None
        }
    };
    let experiment = match (over.experiment, file_experiment) {
        (Some(a), Some(b)) if a != b => {
            bad.push(Violation::new("experiment", format!("file names `{b}` but `{a}` was requested")));
            Some(a)
        }
        (a, b) => a.or(b),
    };
    if experiment.is_none() && !bad.iter().any(|v| v.key == "experiment") {
        bad.push(Violation::new("experiment", "required"));
    }

    let seed = over.seed.or_else(|| field::<u64>(obj, "seed", "an unsigned 64-bit integer", &mut bad));
    if seed.is_none() && !bad.iter().any(|v| v.key == "seed") {
        bad.push(Violation::new("seed", "required"));
    }
    let steps = over.steps.or_else(|| field::<u64>(obj, "steps", "an integer >= 1", &mut bad));
    let episodes = over.episodes.or_else(|| field::<u32>(obj, "episodes", "an integer >= 1", &mut bad));
    let output_dir = over.output_dir.clone().or_else(|| field::<PathBuf>(obj, "output_dir", "a path", &mut bad));
    if steps == Some(0) {
        bad.push(Violation::new("steps", "must be >= 1"));
    }
    if episodes == Some(0) {
        bad.push(Violation::new("episodes", "must be >= 1"));
    }

    let params = experiment.and_then(|e| {
        if e.takes_steps() && episodes.is_some() {
            bad.push(Violation::new("episodes", format!("not used by {e} (use steps)")));
        }
        if !e.takes_steps() && steps.is_some() {
            bad.push(Violation::new("steps", format!("not used by {e} (use episodes)")));
        }
        let raw = obj.get("params").cloned().unwrap_or(Value::Object(Default::default()));
        parse_params(e, raw, steps, episodes, &mut bad)
    });

    match (experiment, seed, params) {
        (Some(experiment), Some(seed), Some(params)) if bad.is_empty() => {
            Ok(ExperimentConfig { experiment, seed, steps, episodes, output_dir, params })
        }
        _ => Err(bad),
    }
}

fn field<T: DeserializeOwned>(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    expected: &str,
    bad: &mut Vec<Violation>,
) -> Option<T> {
    let v = obj.get(key).filter(|v| !v.is_null())?;
    match serde_json::from_value(v.clone()) {
        Ok(x) => Some(x),
        Err(_) => {
            bad.push(Violation::new(key, format!("must be {expected}")));
            None
        }
    }
}

fn typed<T: DeserializeOwned>(raw: Value, bad: &mut Vec<Violation>) -> Option<T> {
    match serde_path_to_error::deserialize(raw) {
        Ok(v) => Some(v),
        Err(e) => {
            let path = e.path().to_string();
            let key = if path == "." { "params".to_string() } else { format!("params.{path}") };
            bad.push(Violation::new(key, e.into_inner().to_string()));
            None
        }
    }
}

fn check(bad: &mut Vec<Violation>, key: &str, ok: bool, message: &str) {
    if !ok {
        bad.push(Violation::new(key, message));
    }
}

fn domain<E: fmt::Display>(bad: &mut Vec<Violation>, key: &str, r: Result<(), E>) {
    if let Err(e) = r {
        bad.push(Violation::new(key, e.to_string()));
    }
}

fn parse_params(
    e: Experiment,
    raw: Value,
    steps: Option<u64>,
    episodes: Option<u32>,
    bad: &mut Vec<Violation>,
) -> Option<Params> {
    let before = bad.len();
    let params = match e {
        Experiment::DrosophilaPi => {
            let mut p: DrosophilaParams = typed(raw, bad)?;
            if let Some(s) = steps {
                match u32::try_from(s) {
                    Ok(s) => p.circuit.test_steps = s,
                    Err(_) => bad.push(Violation::new("steps", "must fit in 32 bits for drosophila_pi")),
                }
            }
            check(bad, "params.points", p.points >= 2, "must be >= 2");
            check(bad, "params.pathways", !p.pathways.is_empty(), "must list at least one pathway");
            domain(bad, "params.circuit", p.circuit.validate());
            Params::Drosophila(p)
        }
        Experiment::BdmTask => {
            let mut p: BdmParams = typed(raw, bad)?;
            if let Some(n) = episodes {
                p.circuit.episodes = n;
            }
            check(bad, "params.variants", !p.variants.is_empty(), "must list at least one variant");
            check(bad, "params.replicates", p.replicates >= 1, "must be >= 1");
            domain(bad, "params.circuit", p.circuit.validate());
            Params::Bdm(p)
        }
        Experiment::ColumnL4 => {
            let p: ColumnParams = typed(raw, bad)?;
            check(bad, "params.amplitude", p.amplitude.is_finite(), "must be finite");
            check(bad, "params.replicates", p.replicates >= 1, "must be >= 1");
            check(bad, "params.classify_duration_ms", p.classify_duration_ms > 0.0, "must be > 0");
            check(bad, "params.classify_drive", p.classify_drive.is_finite(), "must be finite");
            domain(bad, "params.circuit", p.circuit.validate());
            Params::Column(p)
        }
        Experiment::MouseSpontaneous => {
            let p: MouseParams = typed(raw, bad)?;
            domain(bad, "params.circuit", p.circuit.validate());
            Params::Mouse(p)
        }
        Experiment::UnsupervisedDigits => {
            let mut p: DigitsParams = typed(raw, bad)?;
            if let Some(n) = episodes {
                p.epochs = n;
            }
            check(bad, "params.train_per_class", p.train_per_class >= 1, "must be >= 1");
            check(bad, "params.test_per_class", p.test_per_class >= 1, "must be >= 1");
            check(bad, "params.flip", (0.0..=1.0).contains(&p.flip), "must lie in [0, 1]");
            domain(bad, "params.layer", p.layer.validate());
            Params::Digits(p)
        }
        Experiment::NeuronProbe => {
            let p: ProbeParams = typed(raw, bad)?;
            check(bad, "params.dt", p.dt > 0.0 && p.dt.is_finite(), "must be > 0");
            check(bad, "params.substeps", p.substeps >= 1, "must be >= 1");
            check(bad, "params.current", p.current.is_finite(), "must be finite");
            domain(bad, "params.model", p.model.validate());
            if let NeuronModel::Hh { variant: HhVariant::Full, .. } = p.model {
                let h = p.dt / f64::from(p.substeps.max(1));
                check(bad, "params.substeps", h <= HH_FULL_MAX_DT, "dt / substeps must be <= 0.1 ms for the full H-H model");
            }
            Params::Probe(p)
        }
    };
    (bad.len() == before).then_some(params)
}
