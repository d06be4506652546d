//! Unsupervised digit layer: rate-coded 8×8 glyphs drive LIF cells with
//! adaptive thresholds and all-to-all lateral inhibition. Weights learn by
//! batch STDP followed by per-neuron normalisation; labels come afterwards
//! from the majority response of each cell.

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spike_core::encoding::{encode_rate_with, SpikeTrain};
use spike_core::neurons::{step_lif, LifParams, NeuronState};
use spike_core::plasticity::{batch_stdp, Pairing, StdpParams};

use crate::error::invalid;
use crate::CircuitError;

pub const SIDE: usize = 8;
pub const PIXELS: usize = SIDE * SIDE;
pub const CLASSES: usize = 10;

const GLYPHS: [[&str; SIDE]; CLASSES] = [
    ["..####..", ".#....#.", "#......#", "#......#", "#......#", "#......#", ".#....#.", "..####.."],
    ["...##...", "..###...", ".#.##...", "...##...", "...##...", "...##...", "...##...", ".######."],
    ["..####..", ".#....#.", "......#.", ".....#..", "....#...", "...#....", "..#.....", ".######."],
    [".#####..", "......#.", "......#.", "..####..", "......#.", "......#.", "......#.", ".#####.."],
    ["....##..", "...#.#..", "..#..#..", ".#...#..", "########", ".....#..", ".....#..", ".....#.."],
    [".######.", ".#......", ".#......", ".#####..", "......#.", "......#.", ".#....#.", "..####.."],
    ["..####..", ".#......", "#.......", "#.####..", "##....#.", "#......#", ".#....#.", "..####.."],
    [".######.", "......#.", ".....#..", "....#...", "...#....", "...#....", "..#.....", "..#....."],
    ["..####..", ".#....#.", ".#....#.", "..####..", ".#....#.", "#......#", ".#....#.", "..####.."],
    ["..####..", ".#....#.", "#......#", ".#....##", "..####.#", ".......#", "......#.", "..####.."],
];

/// Clean prototype of digit `class`, row-major with values 0 or 1.
pub fn glyph(class: usize) -> [f64; PIXELS] {
    let mut out = [0.0; PIXELS];
    for (r, row) in GLYPHS[class % CLASSES].iter().enumerate() {
        for (c, ch) in row.bytes().enumerate() {
            out[r * SIDE + c] = f64::from(u8::from(ch == b'#'));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub pixels: Vec<f64>,
    pub label: usize,
}

/// Procedural digit set: each item is a prototype shifted by up to one
/// pixel, with pixel flips at rate `flip` and intensity jitter. Classes
/// are interleaved so every prefix is close to balanced.
pub fn digit_set(per_class: usize, flip: f64, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * CLASSES);
    for _ in 0..per_class {
        for label in 0..CLASSES {
            let proto = glyph(label);
            let (dr, dc) = (rng.random_range(-1i32..=1), rng.random_range(-1i32..=1));
            let mut pixels = vec![0.0; PIXELS];
            for r in 0..SIDE as i32 {
                for c in 0..SIDE as i32 {
                    let (sr, sc) = (r - dr, c - dc);
                    let on = (0..SIDE as i32).contains(&sr)
                        && (0..SIDE as i32).contains(&sc)
                        && proto[(sr * SIDE as i32 + sc) as usize] > 0.5;
                    let on = on != (rng.random::<f64>() < flip);
                    pixels[(r * SIDE as i32 + c) as usize] = if on { rng.random_range(0.7..=1.0) } else { 0.0 };
                }
            }
            out.push(Sample { pixels, label });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DigitsConfig {
    pub n_neurons: usize,
    /// Ticks each sample is presented.
    pub present_steps: u32,
    /// Spike probability per tick of a fully bright pixel.
    pub max_rate: f64,
    pub lif: LifParams,
    /// Threshold growth per spike; the threshold is `v_th * theta`.
    pub theta_plus: f64,
    /// Decay time constant (ticks) of `theta` back to 1.
    pub tau_theta: f64,
    /// Potential removed from every other cell per spike.
    pub inhibition: f64,
    pub stdp: StdpParams,
    pub batch_size: usize,
    /// Each cell's incoming weights are rescaled to this sum after every batch.
    pub weight_sum: f64,
    /// Initial weights are uniform in `[0, init_max)`.
    pub init_max: f64,
}

impl Default for DigitsConfig {
    fn default() -> Self {
        Self {
            n_neurons: 100,
            present_steps: 40,
            max_rate: 0.3,
            lif: LifParams { tau: 10.0, r_mem: 1.0, v_th: 1.0, v_reset: 0.0 },
            theta_plus: 0.05,
            tau_theta: 2000.0,
            inhibition: 2.0,
            stdp: StdpParams {
                a_plus: 0.2,
                a_minus: 0.1,
                tau_plus: 5.0,
                tau_minus: 5.0,
                w_min: 0.0,
                w_max: 1.0,
                pairing: Pairing::NearestNeighbor,
            },
            batch_size: 10,
            weight_sum: 24.0,
            init_max: 0.3,
        }
    }
}

impl DigitsConfig {
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.n_neurons == 0 || self.present_steps == 0 || self.batch_size == 0 {
            return Err(invalid("digits n_neurons, present_steps and batch_size must be >= 1"));
        }
        if !(self.max_rate > 0.0 && self.max_rate <= 1.0) {
            return Err(invalid("digits max_rate must lie in (0, 1]"));
        }
        if !(self.lif.tau > 0.0 && self.lif.v_reset < self.lif.v_th) {
            return Err(invalid("digits lif needs tau > 0 and v_reset < v_th"));
        }
        if !(self.theta_plus >= 0.0 && self.tau_theta > 0.0 && self.inhibition >= 0.0) {
            return Err(invalid("digits theta_plus, inhibition >= 0 and tau_theta > 0"));
        }
        if !(self.weight_sum > 0.0 && self.init_max >= 0.0) {
            return Err(invalid("digits weight_sum must be > 0 and init_max >= 0"));
        }
        self.stdp.validate()?;
        Ok(())
    }
}

/// Response of the layer to one sample.
#[derive(Debug, Clone)]
pub struct Response {
    pub input: SpikeTrain,
    pub output: SpikeTrain,
}

impl Response {
    pub fn counts(&self) -> Vec<u32> {
        self.output.events().iter().map(|e| e.len() as u32).collect()
    }
}

#[derive(Debug, Clone)]
pub struct DigitLayer {
    pub cfg: DigitsConfig,
    /// `(inputs, neurons)`.
    pub weights: Array2<f64>,
    pub theta: Array1<f64>,
    /// Class per neuron after [`DigitLayer::assign_labels`].
    pub labels: Vec<Option<usize>>,
    rng: ChaCha8Rng,
}

pub fn build_unsupervised_layer(n_inputs: usize, cfg: &DigitsConfig, seed: u64) -> Result<DigitLayer, CircuitError> {
    cfg.validate()?;
    if n_inputs == 0 {
        return Err(invalid("digits n_inputs must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = Array2::from_shape_fn((n_inputs, cfg.n_neurons), |_| rng.random::<f64>() * cfg.init_max);
    Ok(DigitLayer {
        cfg: cfg.clone(),
        weights,
        theta: Array1::ones(cfg.n_neurons),
        labels: vec![None; cfg.n_neurons],
        rng,
    })
}

fn check(data: &[Sample], n_inputs: usize) -> Result<(), CircuitError> {
    if data.is_empty() {
        return Err(CircuitError::EmptyDataset);
    }
    for s in data {
        if s.pixels.len() != n_inputs {
            return Err(invalid(format!("digits sample has {} values, expected {n_inputs}", s.pixels.len())));
        }
        if s.pixels.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(invalid("digits sample values must lie in [0, 1]"));
        }
        if s.label >= CLASSES {
            return Err(invalid(format!("digits label {} out of range", s.label)));
        }
    }
    Ok(())
}

impl DigitLayer {
    pub fn n_inputs(&self) -> usize {
        self.weights.nrows()
    }

    /// Presents one sample from rest. Thresholds adapt when `adapt` is set.
    pub fn present(&mut self, pixels: &[f64], adapt: bool) -> Result<Response, CircuitError> {
        let cfg = &self.cfg;
        let rates: Vec<f64> = pixels.iter().map(|x| x * cfg.max_rate).collect();
        let input = encode_rate_with(&rates, cfg.present_steps, &mut self.rng)?;
        let n = cfg.n_neurons;
        let mut states = vec![NeuronState::at_potential(cfg.lif.v_reset); n];
        let mut events = vec![Vec::new(); n];
        let decay = (-1.0 / cfg.tau_theta).exp();
        let mut drive = Array1::<f64>::zeros(n);
        for t in 0..cfg.present_steps {
            drive.fill(0.0);
            for i in 0..self.n_inputs() {
                if input.is_spike(t, i) {
                    drive += &self.weights.row(i);
                }
            }
            let mut fired = Vec::new();
            for (j, s) in states.iter_mut().enumerate() {
                let p = LifParams { v_th: cfg.lif.v_th * self.theta[j], ..cfg.lif };
                let r = step_lif(s, &p, drive[j], 1.0).map_err(|e| invalid(e.to_string()))?;
                *s = r.state;
                if r.spiked {
                    fired.push(j);
                }
            }
            for &j in &fired {
                events[j].push(t);
                if adapt {
                    self.theta[j] += cfg.theta_plus;
                }
            }
            if !fired.is_empty() {
                let k = fired.len() as f64;
                for (j, s) in states.iter_mut().enumerate() {
                    let own = if fired.contains(&j) { 1.0 } else { 0.0 };
                    s.v -= cfg.inhibition * (k - own);
                }
            }
            if adapt {
                self.theta.mapv_inplace(|th| 1.0 + (th - 1.0) * decay);
            }
        }
        let output = SpikeTrain::from_events(cfg.present_steps, events)?;
        Ok(Response { input, output })
    }

    /// Rescales each cell's incoming weights to `weight_sum`, then clamps.
    pub fn normalize(&mut self) {
        let (target, p) = (self.cfg.weight_sum, self.cfg.stdp);
        for mut col in self.weights.axis_iter_mut(Axis(1)) {
            let sum: f64 = col.sum();
            if sum > 0.0 {
                col.mapv_inplace(|w| p.clamp(w * target / sum));
            }
        }
    }

    /// Trains for `epochs` passes; every `batch_size` samples the summed
    /// STDP change is applied at once and the weights are normalised.
    pub fn train(&mut self, data: &[Sample], epochs: u32) -> Result<(), CircuitError> {
        check(data, self.n_inputs())?;
        self.normalize();
        let shape = self.weights.dim();
        for _ in 0..epochs {
            for batch in data.chunks(self.cfg.batch_size) {
                let mut pre = Vec::with_capacity(batch.len());
                let mut post = Vec::with_capacity(batch.len());
                for s in batch {
                    let r = self.present(&s.pixels, true)?;
                    pre.push(r.input);
                    post.push(r.output);
                }
                let delta = batch_stdp(&pre, &post, &self.cfg.stdp, shape)?;
                let p = self.cfg.stdp;
                self.weights.zip_mut_with(&delta, |w, d| *w = p.clamp(*w + d));
                self.normalize();
            }
        }
        Ok(())
    }

    /// Spike counts `(samples, neurons)` without threshold adaptation.
    pub fn responses(&mut self, data: &[Sample]) -> Result<Array2<f64>, CircuitError> {
        check(data, self.n_inputs())?;
        let mut out = Array2::zeros((data.len(), self.cfg.n_neurons));
        for (k, s) in data.iter().enumerate() {
            let counts = self.present(&s.pixels, false)?.counts();
            for (j, c) in counts.into_iter().enumerate() {
                out[[k, j]] = f64::from(c);
            }
        }
        Ok(out)
    }

    /// Labels each cell with the class that drives it hardest on average;
    /// cells that never fire stay unlabelled.
    pub fn assign_labels(&mut self, data: &[Sample]) -> Result<(), CircuitError> {
        let resp = self.responses(data)?;
        let mut sums = Array2::<f64>::zeros((CLASSES, self.cfg.n_neurons));
        let mut seen = [0usize; CLASSES];
        for (k, s) in data.iter().enumerate() {
            seen[s.label] += 1;
            let mut row = sums.row_mut(s.label);
            row += &resp.row(k);
        }
        for (j, label) in self.labels.iter_mut().enumerate() {
            let best = (0..CLASSES)
                .filter(|&c| seen[c] > 0)
                .map(|c| (c, sums[[c, j]] / seen[c] as f64))
                .filter(|&(_, m)| m > 0.0)
                .fold(None, |acc: Option<(usize, f64)>, (c, m)| match acc {
                    Some((_, bm)) if bm >= m => acc,
                    _ => Some((c, m)),
                });
            *label = best.map(|(c, _)| c);
        }
        Ok(())
    }

    /// Predicts the class whose labelled cells fire most on average;
    /// `None` when no labelled cell fires.
    pub fn predict(&mut self, pixels: &[f64]) -> Result<Option<usize>, CircuitError> {
        let counts = self.present(pixels, false)?.counts();
        let mut sum = [0.0; CLASSES];
        let mut members = [0usize; CLASSES];
        for (j, &c) in counts.iter().enumerate() {
            if let Some(l) = self.labels[j] {
                sum[l] += f64::from(c);
                members[l] += 1;
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for c in 0..CLASSES {
            if members[c] == 0 {
                continue;
            }
            let m = sum[c] / members[c] as f64;
            if m > 0.0 && best.is_none_or(|(_, bm)| m > bm) {
                best = Some((c, m));
            }
        }
        Ok(best.map(|(c, _)| c))
    }

    /// Fraction of `data` predicted correctly.
    pub fn accuracy(&mut self, data: &[Sample]) -> Result<f64, CircuitError> {
        check(data, self.n_inputs())?;
        let mut correct = 0usize;
        for s in data {
            if self.predict(&s.pixels)? == Some(s.label) {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len() as f64)
    }
}

/// Assigns labels on `labelled` and scores on `test`.
pub fn assign_labels_and_score(layer: &mut DigitLayer, labelled: &[Sample], test: &[Sample]) -> Result<f64, CircuitError> {
    layer.assign_labels(labelled)?;
    layer.accuracy(test)
}
