use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::EncodingError;

/// Binary spike raster over `duration` steps, stored as one sorted list of
/// spike steps per neuron. Equivalent to a `(T x N)` 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeTrain {
    duration: u32,
    events: Vec<Vec<u32>>,
}

impl SpikeTrain {
    pub fn empty(duration: u32, n_neurons: usize) -> Self {
        Self { duration, events: vec![Vec::new(); n_neurons] }
    }

    /// Builds a train from per-neuron spike steps. Each list is sorted and
    /// deduplicated; steps outside `[0, duration)` are rejected.
    pub fn from_events(duration: u32, mut events: Vec<Vec<u32>>) -> Result<Self, EncodingError> {
        for list in &mut events {
            list.sort_unstable();
            list.dedup();
            if let Some(&last) = list.last() {
                if last >= duration {
                    return Err(EncodingError::EventOutOfWindow { time: last, duration });
                }
            }
        }
        Ok(Self { duration, events })
    }

    /// Rows are time steps, columns are neurons; any non-zero entry is a spike.
    pub fn from_dense(raster: &Array2<u8>) -> Self {
        let (t, n) = raster.dim();
        let mut events = vec![Vec::new(); n];
        for ((step, neuron), &x) in raster.indexed_iter() {
            if x != 0 {
                events[neuron].push(step as u32);
            }
        }
        Self { duration: t as u32, events }
    }

    pub fn to_dense(&self) -> Array2<u8> {
        let mut out = Array2::zeros((self.duration as usize, self.events.len()));
        for (neuron, list) in self.events.iter().enumerate() {
            for &t in list {
                out[[t as usize, neuron]] = 1;
            }
        }
        out
    }

    pub fn duration(&self) -> u32 {
        self.duration
    }

    pub fn n_neurons(&self) -> usize {
        self.events.len()
    }

    pub fn spikes(&self, neuron: usize) -> &[u32] {
        &self.events[neuron]
    }

    pub fn events(&self) -> &[Vec<u32>] {
        &self.events
    }

    pub fn spike_count(&self) -> usize {
        self.events.iter().map(Vec::len).sum()
    }

    pub fn is_spike(&self, step: u32, neuron: usize) -> bool {
        self.events[neuron].binary_search(&step).is_ok()
    }

    /// Appends a spike; steps must arrive in increasing order per neuron.
    pub fn push(&mut self, neuron: usize, step: u32) -> Result<(), EncodingError> {
        if step >= self.duration {
            return Err(EncodingError::EventOutOfWindow { time: step, duration: self.duration });
        }
        let list = &mut self.events[neuron];
        match list.last() {
            Some(&last) if last >= step => {
                if last != step {
                    let pos = list.partition_point(|&t| t < step);
                    if list.get(pos) != Some(&step) {
                        list.insert(pos, step);
                    }
                }
            }
            _ => list.push(step),
        }
        Ok(())
    }

    /// Concatenates neurons of several trains with equal duration.
    pub fn stack(trains: &[SpikeTrain]) -> Option<SpikeTrain> {
        let duration = trains.first()?.duration;
        if trains.iter().any(|t| t.duration != duration) {
            return None;
        }
        let events = trains.iter().flat_map(|t| t.events.iter().cloned()).collect();
        Some(SpikeTrain { duration, events })
    }
}
