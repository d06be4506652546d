//! Firing-pattern labels from inter-spike-interval statistics.

use serde::{Deserialize, Serialize};

use super::{step_izhikevich, IzhikevichParams, NeuronState};

/// Mean rate above which a cell is labelled fast spiking (Hz).
pub const FAST_RATE_HZ: f64 = 100.0;
/// ISIs shorter than this count as intra-burst intervals (ms).
pub const BURST_ISI_MS: f64 = 10.0;
/// Minimum share of intra-burst ISIs for a bursting label.
pub const BURST_SHORT_FRACTION: f64 = 0.2;
/// Minimum ISI coefficient of variation for a bursting label.
pub const BURST_MIN_CV: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiringPattern {
    Regular,
    Bursting,
    Fast,
    LowThreshold,
    Silent,
}

impl FiringPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            FiringPattern::Regular => "regular",
            FiringPattern::Bursting => "bursting",
            FiringPattern::Fast => "fast",
            FiringPattern::LowThreshold => "low_threshold",
            FiringPattern::Silent => "silent",
        }
    }
}

/// Labels a recorded response.
///
/// `voltage_trace` is sampled every `dt` ms and fixes the observation length;
/// `spike_times` are in ms. Rules apply in order: silent, fast (mean rate
/// above [`FAST_RATE_HZ`]), bursting (enough sub-[`BURST_ISI_MS`] intervals
/// and an irregular ISI distribution), otherwise regular. Low-threshold
/// spiking cannot be told from a single trace; see [`classify_izhikevich`].
pub fn classify_firing_pattern(voltage_trace: &[f64], dt: f64, spike_times: &[f64]) -> FiringPattern {
    if spike_times.is_empty() {
        return FiringPattern::Silent;
    }
    let duration_ms = voltage_trace.len() as f64 * dt;
    let rate_hz = if duration_ms > 0.0 {
        spike_times.len() as f64 * 1000.0 / duration_ms
    } else {
        f64::INFINITY
    };
    if rate_hz > FAST_RATE_HZ {
        return FiringPattern::Fast;
    }
    if spike_times.len() < 3 {
        return FiringPattern::Regular;
    }
    let isis: Vec<f64> = spike_times.windows(2).map(|w| w[1] - w[0]).collect();
    let n = isis.len() as f64;
    let mean = isis.iter().sum::<f64>() / n;
    let var = isis.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let cv = var.sqrt() / mean;
    let short = isis.iter().filter(|&&x| x < BURST_ISI_MS).count() as f64 / n;
    if short >= BURST_SHORT_FRACTION && cv > BURST_MIN_CV {
        FiringPattern::Bursting
    } else {
        FiringPattern::Regular
    }
}

const PROBE_DT: f64 = 0.25;

fn simulate(p: &IzhikevichParams, schedule: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let mut s = NeuronState { v: p.c, u: p.b * p.c, ..Default::default() };
    let mut trace = Vec::new();
    let mut spikes = Vec::new();
    let mut segment_of_spike = Vec::new();
    let mut t = 0.0;
    for (seg, &(duration, current)) in schedule.iter().enumerate() {
        for _ in 0..(duration / PROBE_DT).round() as usize {
            match step_izhikevich(&s, p, current, PROBE_DT) {
                Ok(r) => {
                    if r.spiked {
                        spikes.push(t);
                        segment_of_spike.push(seg);
                    }
                    s = r.state;
                }
                Err(_) => return (trace, spikes, segment_of_spike),
            }
            trace.push(s.v);
            t += PROBE_DT;
        }
    }
    (trace, spikes, segment_of_spike)
}

/// Rebound test: settle, hyperpolarise with a negative step, release.
/// Returns true when the cell fires after release without any drive.
pub fn rebound_probe(p: &IzhikevichParams) -> bool {
    let (_, _, segments) = simulate(p, &[(200.0, 0.0), (100.0, -15.0), (100.0, 0.0)]);
    segments.contains(&2) && !segments.contains(&0)
}

/// Drives a preset with a constant current for `duration_ms` (after a
/// 100 ms settling period) and labels the response, checking for
/// post-inhibitory rebound when the response is otherwise regular.
pub fn classify_izhikevich(p: &IzhikevichParams, drive: f64, duration_ms: f64) -> FiringPattern {
    let (trace, spikes, segments) = simulate(p, &[(100.0, 0.0), (duration_ms, drive)]);
    let driven_trace = &trace[trace.len().saturating_sub((duration_ms / PROBE_DT).round() as usize)..];
    let driven: Vec<f64> = spikes
        .iter()
        .zip(&segments)
        .filter(|(_, &seg)| seg == 1)
        .map(|(&t, _)| t)
        .collect();
    match classify_firing_pattern(driven_trace, PROBE_DT, &driven) {
        FiringPattern::Regular if rebound_probe(p) => FiringPattern::LowThreshold,
        other => other,
    }
}
