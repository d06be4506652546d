use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::population::PopulationId;
use super::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeEvent {
    pub step: u64,
    pub population: u32,
    pub neuron: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageSample {
    pub step: u64,
    pub population: u32,
    pub neuron: u32,
    pub v: f64,
}

/// What a [`Recorder`] keeps. Spike counts per population and step are
/// always kept; the full raster and voltage traces are optional.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordConfig {
    pub raster: bool,
    pub voltages: Vec<(PopulationId, Vec<usize>)>,
}

impl RecordConfig {
    pub fn raster() -> Self {
        Self { raster: true, voltages: Vec::new() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Recorder {
    config: RecordConfig,
    names: Vec<String>,
    raster: Vec<SpikeEvent>,
    voltages: Vec<VoltageSample>,
    counts: Vec<Vec<u32>>,
    metrics: BTreeMap<String, Vec<f64>>,
}

impl Recorder {
    pub fn new(config: RecordConfig) -> Self {
        Self { config, ..Self::default() }
    }

    /// Samples the network after a completed step.
    pub fn observe(&mut self, net: &Network) {
        if self.names.is_empty() {
            self.names = net.populations().iter().map(|p| p.name.clone()).collect();
            self.counts = vec![Vec::new(); self.names.len()];
        }
        let step = net.current_step().saturating_sub(1);
        for (k, counts) in self.counts.iter_mut().enumerate() {
            let spikes = net.spikes(PopulationId(k));
            counts.push(spikes.len() as u32);
            if self.config.raster {
                self.raster.extend(spikes.iter().map(|&n| SpikeEvent {
                    step,
                    population: k as u32,
                    neuron: n,
                }));
            }
        }
        for (pop, neurons) in &self.config.voltages {
            let states = net.states(*pop);
            for &n in neurons {
                if let Some(s) = states.get(n) {
                    self.voltages.push(VoltageSample {
                        step,
                        population: pop.0 as u32,
                        neuron: n as u32,
                        v: s.v,
                    });
                }
            }
        }
    }

    pub fn raster(&self) -> &[SpikeEvent] {
        &self.raster
    }

    pub fn voltages(&self) -> &[VoltageSample] {
        &self.voltages
    }

    /// Spikes per step of population `pop`.
    pub fn spike_counts(&self, pop: PopulationId) -> &[u32] {
        self.counts.get(pop.0).map_or(&[], Vec::as_slice)
    }

    pub fn total_spikes(&self, pop: PopulationId) -> u64 {
        self.spike_counts(pop).iter().map(|&c| u64::from(c)).sum()
    }

    pub fn steps_recorded(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn population_names(&self) -> &[String] {
        &self.names
    }

    pub fn push_metric(&mut self, name: &str, value: f64) {
        self.metrics.entry(name.to_owned()).or_default().push(value);
    }

    pub fn set_metric(&mut self, name: &str, series: Vec<f64>) {
        self.metrics.insert(name.to_owned(), series);
    }

    pub fn metrics(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.metrics
    }

    /// `step,population,neuron` rows with population names.
    pub fn write_raster_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "step,population,neuron")?;
        for e in &self.raster {
            writeln!(out, "{},{},{}", e.step, self.names[e.population as usize], e.neuron)?;
        }
        Ok(())
    }

    pub fn write_voltages_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "step,population,neuron,v")?;
        for s in &self.voltages {
            writeln!(out, "{},{},{},{}", s.step, self.names[s.population as usize], s.neuron, s.v)?;
        }
        Ok(())
    }

    /// Metrics as a JSON object of named series, keys in sorted order.
    pub fn metrics_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.metrics).unwrap_or_default()
    }
}
