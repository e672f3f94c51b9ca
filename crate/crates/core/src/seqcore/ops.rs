//! The closed set of differentiable operations the fusion pipeline needs.
//!
//! Every forward has a matching `_backward` that consumes the upstream
//! gradient and returns the input gradient; parameter gradients accumulate
//! into the [`ParamStore`]. No tape, no graph — callers own the chain rule.

use crate::error::{Error, Result};
use crate::seqcore::{Matrix, ParamStore};

/// x · W for the parameter named `name`. No bias unless a `name.bias`
/// entry exists in the store (one row, broadcast over x's rows).
pub fn linear(x: &Matrix, name: &str, store: &ParamStore) -> Result<Matrix> {
    let w = store.get(name)?;
    if x.cols() != w.rows() {
        return Err(Error::Dimension(format!(
            "linear {name}: input {}x{} vs weight {}x{}",
            x.rows(),
            x.cols(),
            w.rows(),
            w.cols()
        )));
    }
    let mut out = x.matmul(w)?;
    let bias_name = format!("{name}.bias");
    if store.contains(&bias_name) {
        let b = store.get(&bias_name)?;
        for r in 0..out.rows() {
            for (o, &bv) in out.row_mut(r).iter_mut().zip(b.row(0)) {
                *o += bv;
            }
        }
    }
    Ok(out)
}

/// Backward of [`linear`]: accumulates dW (and d bias when declared),
/// returns dx.
pub fn linear_backward(
    x: &Matrix,
    name: &str,
    d_out: &Matrix,
    store: &mut ParamStore,
) -> Result<Matrix> {
    let dw = x.transpose_matmul(d_out)?;
    store.accumulate_grad(name, &dw)?;
    let bias_name = format!("{name}.bias");
    if store.contains(&bias_name) {
        let mut db = Matrix::zeros(1, d_out.cols());
        for r in 0..d_out.rows() {
            for (c, &g) in d_out.row(r).iter().enumerate() {
                db.add_at(0, c, g);
            }
        }
        store.accumulate_grad(&bias_name, &db)?;
    }
    let w = store.get(name)?;
    d_out.matmul_transpose_b(w)
}

/// (x − mean)/sqrt(var + eps) ⊙ gamma + beta with population variance.
pub fn layer_norm(x: &[f64], gamma: &[f64], beta: &[f64], eps: f64) -> Result<Vec<f64>> {
    let d = x.len();
    if d == 0 {
        return Err(Error::Dimension("layer_norm: zero-length vector".into()));
    }
    if gamma.len() != d || beta.len() != d {
        return Err(Error::Dimension(format!(
            "layer_norm: x has {} entries, gamma {}, beta {}",
            d,
            gamma.len(),
            beta.len()
        )));
    }
    let mean = x.iter().sum::<f64>() / d as f64;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
    let inv = 1.0 / (var + eps).sqrt();
    Ok(x.iter()
        .zip(gamma.iter().zip(beta))
        .map(|(&v, (&g, &b))| (v - mean) * inv * g + b)
        .collect())
}

/// Backward of [`layer_norm`]: returns (dx, dgamma, dbeta).
pub fn layer_norm_backward(
    x: &[f64],
    gamma: &[f64],
    eps: f64,
    d_out: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let d = x.len();
    let n = d as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let inv = 1.0 / (var + eps).sqrt();
    let xhat: Vec<f64> = x.iter().map(|&v| (v - mean) * inv).collect();

    let d_gamma: Vec<f64> = d_out.iter().zip(&xhat).map(|(&g, &h)| g * h).collect();
    let d_beta: Vec<f64> = d_out.to_vec();

    let d_xhat: Vec<f64> = d_out.iter().zip(gamma).map(|(&g, &gm)| g * gm).collect();
    let mean_dxhat = d_xhat.iter().sum::<f64>() / n;
    let mean_dxhat_xhat = d_xhat.iter().zip(&xhat).map(|(&a, &b)| a * b).sum::<f64>() / n;
    let d_x: Vec<f64> = d_xhat
        .iter()
        .zip(&xhat)
        .map(|(&dh, &h)| inv * (dh - mean_dxhat - h * mean_dxhat_xhat))
        .collect();
    (d_x, d_gamma, d_beta)
}

/// Numerically stable softmax (max-subtraction).
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|&x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Backward of [`softmax`] given its output `y` and upstream `d_out`.
pub fn softmax_backward(y: &[f64], d_out: &[f64]) -> Vec<f64> {
    let dot: f64 = y.iter().zip(d_out).map(|(&a, &b)| a * b).sum();
    y.iter().zip(d_out).map(|(&yi, &gi)| yi * (gi - dot)).collect()
}

/// Elementwise max(0, x).
pub fn relu(x: &Matrix) -> Matrix {
    x.map(|v| v.max(0.0))
}

/// Backward of [`relu`]: passes gradient where the pre-activation was > 0.
pub fn relu_backward(x: &Matrix, d_out: &Matrix) -> Matrix {
    let mut out = d_out.clone();
    for (g, &v) in out.data_mut().iter_mut().zip(x.data()) {
        if v <= 0.0 {
            *g = 0.0;
        }
    }
    out
}

/// Mean of each row: aggregates token features along the feature dimension,
/// producing one scalar per token.
pub fn mean_over_features(x: &Matrix) -> Vec<f64> {
    let d = x.cols() as f64;
    (0..x.rows())
        .map(|r| x.row(r).iter().sum::<f64>() / d)
        .collect()
}

/// Backward of [`mean_over_features`]: spreads each token's gradient evenly
/// over its features.
pub fn mean_over_features_backward(rows: usize, cols: usize, d_out: &[f64]) -> Matrix {
    let mut dx = Matrix::zeros(rows, cols);
    let inv = 1.0 / cols as f64;
    for (r, &g) in d_out.iter().enumerate() {
        for v in dx.row_mut(r) {
            *v = g * inv;
        }
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store_with(name: &str, rows: &[Vec<f64>]) -> ParamStore {
        let mut s = ParamStore::new();
        s.insert(name, Matrix::from_rows(rows).unwrap());
        s
    }

    #[test]
    fn linear_identity() {
        let s = store_with("w", &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let x = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(linear(&x, "w", &s).unwrap().row(0), &[1.0, 2.0]);
    }

    #[test]
    fn linear_zero_annihilates() {
        let s = store_with("w", &[vec![0.0, 0.0], vec![0.0, 0.0]]);
        let x = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(linear(&x, "w", &s).unwrap().row(0), &[0.0, 0.0]);
    }

    #[test]
    fn linear_hand_case() {
        let s = store_with("w", &[vec![1.0, 0.0], vec![1.0, 1.0]]);
        let x = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(linear(&x, "w", &s).unwrap().row(0), &[3.0, 2.0]);
    }

    #[test]
    fn linear_shape_mismatch_names_shapes() {
        let s = store_with("w", &[vec![1.0, 0.0], vec![1.0, 1.0]]);
        let x = Matrix::zeros(1, 3);
        let msg = linear(&x, "w", &s).unwrap_err().to_string();
        assert!(msg.contains("1x3") && msg.contains("2x2"), "{msg}");
    }

    #[test]
    fn layer_norm_constant_input() {
        let y = layer_norm(&[5.0, 5.0, 5.0], &[1.0; 3], &[0.0; 3], 1e-12).unwrap();
        assert!(y.iter().all(|&v| v.abs() < 1e-6));
    }

    #[test]
    fn layer_norm_two_point() {
        let y = layer_norm(&[1.0, 3.0], &[1.0; 2], &[0.0; 2], 1e-12).unwrap();
        assert!((y[0] + 1.0).abs() < 1e-6 && (y[1] - 1.0).abs() < 1e-6, "{y:?}");
    }

    #[test]
    fn layer_norm_gamma_annihilates() {
        let y = layer_norm(&[1.0, 3.0], &[0.0; 2], &[7.0; 2], 1e-12).unwrap();
        assert_eq!(y, vec![7.0, 7.0]);
    }

    #[test]
    fn layer_norm_empty_is_error() {
        assert!(layer_norm(&[], &[], &[], 1e-12).is_err());
    }

    #[test]
    fn softmax_uniform() {
        let y = softmax(&[2.5, 2.5, 2.5]);
        for v in y {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_closed_form() {
        let y = softmax(&[0.0, 2.0f64.ln()]);
        assert!((y[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((y[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn relu_cases() {
        let x = Matrix::from_rows(&[vec![-1.0, 0.0, 2.0]]).unwrap();
        assert_eq!(relu(&x).row(0), &[0.0, 0.0, 2.0]);
        let neg = Matrix::from_rows(&[vec![-3.0, -0.5]]).unwrap();
        assert!(relu(&neg).data().iter().all(|&v| v == 0.0));
        assert_eq!(relu(&relu(&x)), relu(&x));
    }

    #[test]
    fn mean_over_features_cases() {
        let x = Matrix::from_rows(&[vec![2.0, 4.0]]).unwrap();
        assert_eq!(mean_over_features(&x), vec![3.0]);
        let c = Matrix::from_rows(&[vec![1.5, 1.5], vec![1.5, 1.5]]).unwrap();
        assert_eq!(mean_over_features(&c), vec![1.5, 1.5]);
        let single = Matrix::from_rows(&[vec![4.0], vec![9.0]]).unwrap();
        assert_eq!(mean_over_features(&single), vec![4.0, 9.0]);
    }
}
