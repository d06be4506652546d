use ndarray::{Array1, Array2};

use crate::error::PlasticityError;

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), PlasticityError> {
    if expected == got {
        Ok(())
    } else {
        Err(PlasticityError::DimensionMismatch { what, expected, got })
    }
}

/// Hidden-layer target `Ŝ = S - η G (S_out - S_T)` for a fixed feedback
/// matrix `G` of shape `(hidden x outputs)`.
pub fn feedback_target(
    s_layer: &Array1<f64>,
    g: &Array2<f64>,
    s_out: &Array1<f64>,
    s_target: &Array1<f64>,
    eta: f64,
) -> Result<Array1<f64>, PlasticityError> {
    check_len("output vs target length", s_out.len(), s_target.len())?;
    check_len("feedback rows vs layer size", s_layer.len(), g.nrows())?;
    check_len("feedback columns vs output size", s_out.len(), g.ncols())?;
    let err = s_out - s_target;
    Ok(s_layer - &(g.dot(&err) * eta))
}

/// Target for the layer feeding the output through `w_out` of shape
/// `(outputs x hidden)`: `Ŝ = S - η Wᵀ (S_out - S_T)`.
pub fn penultimate_target(
    s_layer: &Array1<f64>,
    w_out: &Array2<f64>,
    s_out: &Array1<f64>,
    s_target: &Array1<f64>,
    eta: f64,
) -> Result<Array1<f64>, PlasticityError> {
    feedback_target(s_layer, &w_out.t().to_owned(), s_out, s_target, eta)
}

/// Per-sample normalisation `(x - mean) / sqrt(var + eps)` using the
/// population variance of `x`.
pub fn pbln_normalize(x: &[f64], eps: f64) -> Result<Vec<f64>, PlasticityError> {
    if x.is_empty() {
        return Err(PlasticityError::DimensionMismatch { what: "pbLN input length", expected: 1, got: 0 });
    }
    if !(eps > 0.0) {
        return Err(PlasticityError::InvalidParams { param: "eps", constraint: "eps > 0" });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let scale = (var + eps).sqrt();
    Ok(x.iter().map(|v| (v - mean) / scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn zero_error_leaves_activity() {
        let s = array![0.2, 0.5, 0.9];
        let g = Array2::from_elem((3, 2), 0.7);
        let out = array![1.0, 0.0];
        let t = feedback_target(&s, &g, &out, &out, 1.0).unwrap();
        assert_eq!(t, s);
    }

    #[test]
    fn penultimate_uses_transpose() {
        let s = array![1.0, 1.0];
        let w = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let out = array![1.0, 0.0, 0.0];
        let target = array![0.0, 0.0, 0.0];
        let t = penultimate_target(&s, &w, &out, &target, 0.5).unwrap();
        assert_abs_diff_eq!(t[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t[1], 0.0, epsilon = 1e-15);
        assert!(feedback_target(&s, &w, &out, &target, 1.0).is_err());
    }

    #[test]
    fn pbln_examples() {
        let y = pbln_normalize(&[1.0, 2.0, 3.0, 4.0], 1e-12).unwrap();
        let mean: f64 = y.iter().sum::<f64>() / 4.0;
        let var: f64 = y.iter().map(|v| v * v).sum::<f64>() / 4.0;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var, 1.0, epsilon = 1e-9);
        assert!(pbln_normalize(&[3.0; 5], 1e-6).unwrap().iter().all(|&v| v == 0.0));
        assert!(pbln_normalize(&[], 1e-6).is_err());
    }
}
