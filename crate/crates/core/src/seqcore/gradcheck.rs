use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::seqcore::ParamStore;

/// Outcome of a finite-difference audit of one loss function.
#[derive(Debug, Clone)]
pub struct GradReport {
    /// Max relative error seen per parameter name.
    pub per_param: BTreeMap<String, f64>,
    pub max_rel_error: f64,
    pub pass: bool,
    pub epsilon: f64,
    pub tolerance: f64,
}

impl std::fmt::Display for GradReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (name, err) in &self.per_param {
            writeln!(f, "  {name}: max rel err {err:.3e}")?;
        }
        write!(
            f,
            "  overall max {:.3e} (eps {:.1e}, tol {:.1e}) -> {}",
            self.max_rel_error,
            self.epsilon,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Central-difference verification of every trainable scalar in `store`.
///
/// `loss_fn` must be deterministic, return the scalar loss, and accumulate
/// analytic gradients into the store's gradient slots. Each scalar is
/// perturbed ±eps, the numeric slope (f₊ − f₋)/(2·eps) is compared to the
/// analytic entry by relative error |a − n| / max(1, |a|, |n|), and the
/// report passes iff every error is ≤ tol.
pub fn grad_check<F>(loss_fn: F, store: &mut ParamStore, eps: f64, tol: f64) -> Result<GradReport>
where
    F: Fn(&mut ParamStore) -> Result<f64>,
{
    if eps <= 0.0 {
        return Err(Error::Config(format!("grad_check: eps must be > 0, got {eps}")));
    }
    store.zero_grads();
    let base = loss_fn(store)?;
    if !base.is_finite() {
        return Err(Error::Eval(format!("grad_check: non-finite loss {base}")));
    }

    // Snapshot analytic gradients before FD evaluations clobber the slots.
    let analytic: BTreeMap<String, Vec<f64>> = store
        .iter()
        .filter(|(_, e)| e.trainable)
        .map(|(name, e)| (name.clone(), e.grad.data().to_vec()))
        .collect();

    let names: Vec<String> = analytic.keys().cloned().collect();
    let mut per_param = BTreeMap::new();
    let mut max_rel = 0.0f64;

    for name in &names {
        let count = store.get(name)?.rows() * store.get(name)?.cols();
        let mut worst = 0.0f64;
        for idx in 0..count {
            let orig = store.get(name)?.data()[idx];

            store.get_mut(name)?.data_mut()[idx] = orig + eps;
            let f_plus = loss_fn(store)?;
            store.get_mut(name)?.data_mut()[idx] = orig - eps;
            let f_minus = loss_fn(store)?;
            store.get_mut(name)?.data_mut()[idx] = orig;

            if !f_plus.is_finite() || !f_minus.is_finite() {
                return Err(Error::Eval(format!(
                    "grad_check: non-finite loss while perturbing {name}[{idx}]"
                )));
            }
            let numeric = (f_plus - f_minus) / (2.0 * eps);
            let a = analytic[name][idx];
            let rel = (a - numeric).abs() / 1.0f64.max(a.abs()).max(numeric.abs());
            worst = worst.max(rel);
        }
        max_rel = max_rel.max(worst);
        per_param.insert(name.clone(), worst);
    }

    // Leave the store holding the analytic gradients of the unperturbed point.
    store.zero_grads();
    for (name, grads) in &analytic {
        let g = store
            .iter_mut()
            .find(|(n, _)| *n == name)
            .map(|(_, e)| &mut e.grad)
            .expect("snapshot name present");
        g.data_mut().copy_from_slice(grads);
    }

    Ok(GradReport {
        per_param,
        max_rel_error: max_rel,
        pass: max_rel <= tol,
        epsilon: eps,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::Matrix;

    #[test]
    fn quadratic_with_correct_gradient_passes() {
        let mut store = ParamStore::new();
        store.insert("theta", Matrix::from_rows(&[vec![1.0, -2.0, 0.5]]).unwrap());
        let loss = |s: &mut ParamStore| {
            let th = s.get("theta")?.clone();
            let l: f64 = th.data().iter().map(|v| v * v).sum();
            s.accumulate_grad("theta", &th.scale(2.0))?;
            Ok(l)
        };
        let report = grad_check(loss, &mut store, 1e-5, 1e-5).unwrap();
        assert!(report.pass, "{report}");
    }

    #[test]
    fn quadratic_with_wrong_gradient_fails() {
        let mut store = ParamStore::new();
        store.insert("theta", Matrix::from_rows(&[vec![1.0, -2.0, 0.5]]).unwrap());
        let loss = |s: &mut ParamStore| {
            let th = s.get("theta")?.clone();
            let l: f64 = th.data().iter().map(|v| v * v).sum();
            // deliberately wrong: gradient set to theta instead of 2*theta
            s.accumulate_grad("theta", &th)?;
            Ok(l)
        };
        let report = grad_check(loss, &mut store, 1e-5, 1e-5).unwrap();
        assert!(!report.pass, "{report}");
    }

    #[test]
    fn non_finite_loss_is_eval_error() {
        let mut store = ParamStore::new();
        store.insert("theta", Matrix::zeros(1, 1));
        let loss = |_: &mut ParamStore| Ok(f64::NAN);
        assert!(matches!(
            grad_check(loss, &mut store, 1e-5, 1e-5),
            Err(Error::Eval(_))
        ));
    }
}
