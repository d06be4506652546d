use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Drive {
    /// Added to the input current of neuron populations.
    Current { amplitude: f64 },
    /// Overrides the firing rate of source populations.
    Rate { hz: f64 },
}

/// External input active on steps `onset..offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stimulus {
    pub population: String,
    pub onset: u64,
    pub offset: u64,
    /// Half-open neuron index range; the whole population when absent.
    #[serde(default)]
    pub neurons: Option<(usize, usize)>,
    pub drive: Drive,
}

impl Stimulus {
    pub fn current(population: impl Into<String>, onset: u64, offset: u64, amplitude: f64) -> Self {
        Self {
            population: population.into(),
            onset,
            offset,
            neurons: None,
            drive: Drive::Current { amplitude },
        }
    }

    pub fn rate(population: impl Into<String>, onset: u64, offset: u64, hz: f64) -> Self {
        Self { drive: Drive::Rate { hz }, ..Self::current(population, onset, offset, 0.0) }
    }

    pub fn on_neurons(mut self, start: usize, end: usize) -> Self {
        self.neurons = Some((start, end));
        self
    }

    pub fn active_at(&self, step: u64) -> bool {
        (self.onset..self.offset).contains(&step)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    #[serde(default)]
    pub stimuli: Vec<Stimulus>,
}

impl Schedule {
    pub fn new(stimuli: Vec<Stimulus>) -> Self {
        Self { stimuli }
    }
}
