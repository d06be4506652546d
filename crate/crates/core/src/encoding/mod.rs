//! Analog-to-spike encoders: rate (Bernoulli), phase, time-to-first-spike
//! and Gaussian population coding.

mod train;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EncodingError;

pub use train::SpikeTrain;

fn check_unit(x: f64) -> Result<(), EncodingError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(EncodingError::OutOfRange(x))
    }
}

/// Rate code for a single intensity: at each step a spike is emitted iff
/// `x > α` with `α` drawn uniformly from `[0, 1)`.
pub fn encode_rate(x: f64, t_steps: u32, seed: u64) -> Result<SpikeTrain, EncodingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    encode_rate_with(&[x], t_steps, &mut rng)
}

/// Rate code for a vector of intensities, one neuron each, drawing from a
/// caller-supplied generator (time-major order).
pub fn encode_rate_with<R: Rng + ?Sized>(
    xs: &[f64],
    t_steps: u32,
    rng: &mut R,
) -> Result<SpikeTrain, EncodingError> {
    for &x in xs {
        check_unit(x)?;
    }
    let mut events = vec![Vec::new(); xs.len()];
    for t in 0..t_steps {
        for (neuron, &x) in xs.iter().enumerate() {
            let alpha: f64 = rng.random();
            if x > alpha {
                events[neuron].push(t);
            }
        }
    }
    SpikeTrain::from_events(t_steps, events)
}

/// Integer phase code `round(x (2^K - 1))`.
pub fn phase_code(x: f64, k_period: u32) -> Result<u64, EncodingError> {
    check_unit(x)?;
    if !(1..=52).contains(&k_period) {
        return Err(EncodingError::InvalidConfig("phase period K must lie in 1..=52"));
    }
    let levels = (1u64 << k_period) - 1;
    Ok((x * levels as f64).round() as u64)
}

/// Phase code: bit `K - 1 - (t mod K)` of the integer code is emitted at
/// step `t`. `t_steps` is padded up to a whole number of periods.
pub fn encode_phase(x: f64, k_period: u32, t_steps: u32) -> Result<SpikeTrain, EncodingError> {
    let code = phase_code(x, k_period)?;
    let periods = t_steps.div_ceil(k_period).max(1);
    let duration = periods * k_period;
    let spikes = (0..duration)
        .filter(|t| {
            let shift = k_period - 1 - (t % k_period);
            (code >> shift) & 1 == 1
        })
        .collect();
    SpikeTrain::from_events(duration, vec![spikes])
}

/// Phase-weighted spike sum `Σ s(t) 2^-(1 + t mod K)`, averaged over the
/// complete periods of `neuron`'s train. Equals `code / 2^K`.
pub fn phase_weighted_sum(train: &SpikeTrain, neuron: usize, k_period: u32) -> f64 {
    let periods = (train.duration() / k_period).max(1);
    let limit = periods * k_period;
    let total: f64 = train
        .spikes(neuron)
        .iter()
        .filter(|&&t| t < limit)
        .map(|&t| 0.5f64.powi(1 + (t % k_period) as i32))
        .sum();
    total / periods as f64
}

/// Reconstructs the intensity of a phase-coded neuron: the weighted sum
/// rescaled from `code / 2^K` to `code / (2^K - 1)`.
pub fn decode_phase(train: &SpikeTrain, neuron: usize, k_period: u32) -> f64 {
    let scale = 2f64.powi(k_period as i32);
    phase_weighted_sum(train, neuron, k_period) * scale / (scale - 1.0)
}

/// Time-to-first-spike latency `T - round(T x)`. A result equal to `T`
/// lies outside the window, meaning the neuron stays silent.
pub fn encode_ttfs(x: f64, t_total: u32) -> Result<u32, EncodingError> {
    check_unit(x)?;
    if t_total == 0 {
        return Err(EncodingError::InvalidConfig("TTFS window must be at least one step"));
    }
    let t = t_total as f64;
    Ok(t_total - (t * x).round() as u32)
}

/// Latency-codes a vector into a `t_total`-step train, one neuron per value.
pub fn ttfs_train(xs: &[f64], t_total: u32) -> Result<SpikeTrain, EncodingError> {
    let events = xs
        .iter()
        .map(|&x| encode_ttfs(x, t_total).map(|t| if t < t_total { vec![t] } else { vec![] }))
        .collect::<Result<Vec<_>, _>>()?;
    SpikeTrain::from_events(t_total, events)
}

/// Gaussian population code over `[i_min, i_max]` with `m > 2` neurons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationCodeConfig {
    pub m: usize,
    pub i_min: f64,
    pub i_max: f64,
    pub beta: f64,
}

impl PopulationCodeConfig {
    pub fn new(m: usize, i_min: f64, i_max: f64, beta: f64) -> Result<Self, EncodingError> {
        let cfg = Self { m, i_min, i_max, beta };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), EncodingError> {
        if self.m <= 2 {
            return Err(EncodingError::InvalidConfig("population code needs m > 2 neurons"));
        }
        if !(self.i_min < self.i_max) {
            return Err(EncodingError::InvalidConfig("population code needs i_min < i_max"));
        }
        if !(self.beta > 0.0) {
            return Err(EncodingError::InvalidConfig("population code needs beta > 0"));
        }
        Ok(())
    }

    fn spacing(&self) -> f64 {
        (self.i_max - self.i_min) / (self.m - 2) as f64
    }

    /// Preferred value of neuron `i` (1-based, as in the usual formulation).
    pub fn center(&self, i: usize) -> f64 {
        self.i_min + (2.0 * i as f64 - 3.0) / 2.0 * self.spacing()
    }

    pub fn centers(&self) -> Vec<f64> {
        (1..=self.m).map(|i| self.center(i)).collect()
    }

    /// Shared tuning width.
    pub fn sigma(&self) -> f64 {
        self.spacing() / self.beta
    }
}

/// Response `exp(-(x - μ_i)² / (2σ²))` of every neuron in the population.
pub fn population_tuning(x: f64, cfg: &PopulationCodeConfig) -> Result<Vec<f64>, EncodingError> {
    cfg.validate()?;
    let two_var = 2.0 * cfg.sigma().powi(2);
    Ok(cfg.centers().into_iter().map(|mu| (-(x - mu).powi(2) / two_var).exp()).collect())
}

/// Centre-of-mass readout `Σ r_i μ_i / Σ r_i`.
pub fn population_decode(responses: &[f64], cfg: &PopulationCodeConfig) -> Result<f64, EncodingError> {
    cfg.validate()?;
    if responses.len() != cfg.m {
        return Err(EncodingError::InvalidConfig("response vector length must equal m"));
    }
    let total: f64 = responses.iter().sum();
    if !(total > 0.0) {
        return Err(EncodingError::AllZeroResponses);
    }
    let weighted: f64 = responses.iter().zip(cfg.centers()).map(|(r, mu)| r * mu).sum();
    Ok(weighted / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rate_extremes() {
        assert_eq!(encode_rate(0.0, 200, 1).unwrap().spike_count(), 0);
        assert_eq!(encode_rate(1.0, 200, 1).unwrap().spike_count(), 200);
        assert!(encode_rate(1.5, 10, 1).is_err());
        assert!(encode_rate(-0.1, 10, 1).is_err());
    }

    #[test]
    fn rate_half_within_three_sigma() {
        let n = encode_rate(0.5, 10_000, 42).unwrap().spike_count() as f64 / 10_000.0;
        assert!((n - 0.5).abs() <= 0.015, "rate {n}");
    }

    #[test]
    fn rate_is_reproducible_per_seed() {
        assert_eq!(encode_rate(0.3, 500, 9).unwrap(), encode_rate(0.3, 500, 9).unwrap());
        assert_ne!(encode_rate(0.3, 500, 9).unwrap(), encode_rate(0.3, 500, 10).unwrap());
    }

    #[test]
    fn phase_patterns() {
        let ones = encode_phase(1.0, 8, 16).unwrap();
        assert_eq!(ones.spike_count(), 16);
        assert_eq!(encode_phase(0.0, 8, 16).unwrap().spike_count(), 0);

        let x = 170.0 / 255.0;
        let train = encode_phase(x, 8, 16).unwrap();
        let bits: Vec<u8> = (0..16).map(|t| train.is_spike(t, 0) as u8).collect();
        assert_eq!(bits, [1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn phase_pads_to_whole_periods() {
        assert_eq!(encode_phase(0.5, 8, 10).unwrap().duration(), 16);
        assert_eq!(encode_phase(0.5, 4, 0).unwrap().duration(), 4);
    }

    #[test]
    fn phase_decode_examples() {
        assert_eq!(decode_phase(&encode_phase(0.0, 8, 8).unwrap(), 0, 8), 0.0);
        let all = encode_phase(1.0, 8, 8).unwrap();
        assert_abs_diff_eq!(phase_weighted_sum(&all, 0, 8), 255.0 / 256.0, epsilon = 1e-15);
        let back = decode_phase(&encode_phase(0.4, 8, 24).unwrap(), 0, 8);
        assert!((back - 0.4).abs() <= 1.0 / 255.0);
    }

    #[test]
    fn ttfs_examples() {
        assert_eq!(encode_ttfs(1.0, 100).unwrap(), 0);
        assert_eq!(encode_ttfs(0.0, 100).unwrap(), 100);
        assert_eq!(encode_ttfs(0.25, 100).unwrap(), 75);
        let train = ttfs_train(&[0.0, 1.0], 100).unwrap();
        assert!(train.spikes(0).is_empty());
        assert_eq!(train.spikes(1), &[0]);
    }

    #[test]
    fn population_parameters() {
        let cfg = PopulationCodeConfig::new(10, 0.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(cfg.center(1), -0.0625, epsilon = 1e-12);
        assert_abs_diff_eq!(cfg.sigma(), 0.125, epsilon = 1e-12);
        let r = population_tuning(cfg.center(4), &cfg).unwrap();
        assert_abs_diff_eq!(r[3], 1.0, epsilon = 1e-15);
        assert!(PopulationCodeConfig::new(2, 0.0, 1.0, 1.0).is_err());
        assert!(PopulationCodeConfig::new(5, 1.0, 1.0, 1.0).is_err());
        assert!(PopulationCodeConfig::new(5, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn population_decode_examples() {
        let cfg = PopulationCodeConfig::new(6, 0.0, 1.0, 1.0).unwrap();
        let mut one_hot = vec![0.0; 6];
        one_hot[2] = 0.7;
        assert_abs_diff_eq!(population_decode(&one_hot, &cfg).unwrap(), cfg.center(3), epsilon = 1e-12);

        let mut sym = vec![0.0; 6];
        sym[1] = 0.5;
        sym[3] = 0.5;
        assert_abs_diff_eq!(population_decode(&sym, &cfg).unwrap(), cfg.center(3), epsilon = 1e-12);

        assert_eq!(population_decode(&[0.0; 6], &cfg), Err(EncodingError::AllZeroResponses));
    }
}
