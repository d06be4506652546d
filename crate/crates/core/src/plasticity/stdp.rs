use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::encoding::SpikeTrain;
use crate::error::PlasticityError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Every pre/post spike pair contributes.
    AllPairs,
    /// Each spike pairs only with the closest earlier spike of the partner.
    NearestNeighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StdpParams {
    pub a_plus: f64,
    pub a_minus: f64,
    /// Potentiation time constant (ms, or steps when applied to trains).
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub pairing: Pairing,
}

impl Default for StdpParams {
    fn default() -> Self {
        Self {
            a_plus: 0.01,
            a_minus: 0.012,
            tau_plus: 20.0,
            tau_minus: 20.0,
            w_min: 0.0,
            w_max: 1.0,
            pairing: Pairing::AllPairs,
        }
    }
}

impl StdpParams {
    pub fn validate(&self) -> Result<(), PlasticityError> {
        let bad = |param, constraint| Err(PlasticityError::InvalidParams { param, constraint });
        if !(self.tau_plus > 0.0 && self.tau_minus > 0.0) {
            return bad("tau", "tau_plus, tau_minus > 0");
        }
        if !(self.a_plus >= 0.0 && self.a_minus >= 0.0) {
            return bad("a", "a_plus, a_minus >= 0");
        }
        if !(self.w_min <= self.w_max) {
            return bad("w_min", "w_min <= w_max");
        }
        Ok(())
    }

    pub fn clamp(&self, w: f64) -> f64 {
        w.clamp(self.w_min, self.w_max)
    }
}

/// Weight change for a single pair separated by `delta_t = t_post - t_pre`.
/// Zero when the spikes coincide.
pub fn stdp_window(delta_t: f64, p: &StdpParams) -> f64 {
    if delta_t > 0.0 {
        p.a_plus * (-delta_t / p.tau_plus).exp()
    } else if delta_t < 0.0 {
        -p.a_minus * (delta_t / p.tau_minus).exp()
    } else {
        0.0
    }
}

/// `Σ_{l ∈ later} Σ_{e ∈ earlier, e < l} exp(-(l - e)/tau)` via a running
/// trace over the two sorted lists.
fn causal_sum(earlier: &[u32], later: &[u32], tau: f64) -> f64 {
    let mut trace = 0.0;
    let mut trace_time = 0u32;
    let mut next = 0;
    let mut total = 0.0;
    for &l in later {
        while next < earlier.len() && earlier[next] < l {
            let e = earlier[next];
            trace = trace * (-f64::from(e - trace_time) / tau).exp() + 1.0;
            trace_time = e;
            next += 1;
        }
        if next > 0 {
            total += trace * (-f64::from(l - trace_time) / tau).exp();
        }
    }
    total
}

/// `Σ_{l ∈ later} exp(-(l - e*)/tau)` where `e*` is the latest strictly
/// earlier spike of `earlier`.
fn nearest_sum(earlier: &[u32], later: &[u32], tau: f64) -> f64 {
    let mut next = 0;
    let mut total = 0.0;
    for &l in later {
        while next < earlier.len() && earlier[next] < l {
            next += 1;
        }
        if next > 0 {
            total += (-f64::from(l - earlier[next - 1]) / tau).exp();
        }
    }
    total
}

/// Unclamped STDP weight change for one synapse given the spike steps of
/// its pre- and postsynaptic neurons.
pub fn pair_delta(pre: &[u32], post: &[u32], p: &StdpParams) -> f64 {
    let sum = match p.pairing {
        Pairing::AllPairs => causal_sum,
        Pairing::NearestNeighbor => nearest_sum,
    };
    p.a_plus * sum(pre, post, p.tau_plus) - p.a_minus * sum(post, pre, p.tau_minus)
}

fn check_trains(pre: &SpikeTrain, post: &SpikeTrain) -> Result<(), PlasticityError> {
    if pre.duration() != post.duration() {
        return Err(PlasticityError::DurationMismatch {
            pre: pre.duration() as usize,
            post: post.duration() as usize,
        });
    }
    Ok(())
}

/// Unclamped weight change matrix `(n_pre x n_post)` for two trains.
pub fn stdp_delta(
    pre: &SpikeTrain,
    post: &SpikeTrain,
    p: &StdpParams,
) -> Result<Array2<f64>, PlasticityError> {
    p.validate()?;
    check_trains(pre, post)?;
    let mut delta = Array2::zeros((pre.n_neurons(), post.n_neurons()));
    for ((i, j), d) in delta.indexed_iter_mut() {
        *d = pair_delta(pre.spikes(i), post.spikes(j), p);
    }
    Ok(delta)
}

/// Applies STDP over the full trains and clamps to `[w_min, w_max]`.
pub fn apply_stdp(
    pre: &SpikeTrain,
    post: &SpikeTrain,
    w: &Array2<f64>,
    p: &StdpParams,
) -> Result<Array2<f64>, PlasticityError> {
    let delta = stdp_delta(pre, post, p)?;
    check_shape(w, delta.dim())?;
    Ok((w + &delta).mapv(|x| p.clamp(x)))
}

fn check_shape(w: &Array2<f64>, dim: (usize, usize)) -> Result<(), PlasticityError> {
    if w.nrows() != dim.0 {
        return Err(PlasticityError::DimensionMismatch {
            what: "weight rows vs presynaptic neurons",
            expected: dim.0,
            got: w.nrows(),
        });
    }
    if w.ncols() != dim.1 {
        return Err(PlasticityError::DimensionMismatch {
            what: "weight columns vs postsynaptic neurons",
            expected: dim.1,
            got: w.ncols(),
        });
    }
    Ok(())
}

/// Sample/temporal batch STDP: the summed change over every
/// `(pre_batches[k], post_batches[k])` pair, applied as one update.
/// `shape` is `(n_pre, n_post)`; an empty batch yields zeros.
pub fn batch_stdp(
    pre_batches: &[SpikeTrain],
    post_batches: &[SpikeTrain],
    p: &StdpParams,
    shape: (usize, usize),
) -> Result<Array2<f64>, PlasticityError> {
    if pre_batches.len() != post_batches.len() {
        return Err(PlasticityError::DimensionMismatch {
            what: "batch sizes",
            expected: pre_batches.len(),
            got: post_batches.len(),
        });
    }
    let mut total = Array2::zeros(shape);
    for (pre, post) in pre_batches.iter().zip(post_batches) {
        let delta = stdp_delta(pre, post, p)?;
        check_shape(&total, delta.dim())?;
        total += &delta;
    }
    Ok(total)
}
