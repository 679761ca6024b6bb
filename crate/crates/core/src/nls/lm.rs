use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::model::NlsModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    pub max_iterations: usize,
    pub initial_damping: f64,
    pub max_damping: f64,
    /// Stop when an accepted step lowers the SSE by less than this fraction.
    pub relative_sse_tolerance: f64,
    /// Stop when `‖Jᵀr‖∞` drops below this.
    pub gradient_tolerance: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            initial_damping: 1e-3,
            max_damping: 1e16,
            relative_sse_tolerance: 1e-10,
            gradient_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NlsFit {
    pub model_id: String,
    pub beta: Vec<f64>,
    pub start: Vec<f64>,
    /// The start heuristic fell back to all ones.
    pub start_fallback: bool,
    pub sse: f64,
    pub fitted: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl NlsFit {
    /// All fitted values are finite.
    pub fn fit_ok(&self) -> bool {
        self.fitted.iter().all(|v| v.is_finite())
    }
}

fn sse_at(model: &dyn NlsModel, x: &[f64], y: &[f64], beta: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - model.eval(*xi, beta);
            r * r
        })
        .sum()
}

/// Least squares fit of `model` by Levenberg-Marquardt with default settings.
///
/// `start = None` uses the model's heuristic.
pub fn fit_nls(model: &dyn NlsModel, x: &[f64], y: &[f64], start: Option<&[f64]>) -> Result<NlsFit> {
    fit_nls_with(model, x, y, start, &LmConfig::default())
}

pub fn fit_nls_with(
    model: &dyn NlsModel,
    x: &[f64],
    y: &[f64],
    start: Option<&[f64]>,
    config: &LmConfig,
) -> Result<NlsFit> {
    let n = x.len();
    let p = model.arity();
    if n != y.len() {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    if n <= p {
        return Err(Error::InvalidArgument(alloc::format!(
            "model {} needs more than {p} observations, got {n}",
            model.id()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (start, start_fallback) = match start {
        Some(b) => {
            if b.len() != p {
                return Err(Error::LengthMismatch(b.len(), p));
            }
            (b.to_vec(), false)
        }
        None => {
            let g = model.start(x, y);
            (g.beta, g.fallback)
        }
    };
    if start.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFiniteStart(model.id().into()));
    }

    let mut beta = start.clone();
    let mut sse = sse_at(model, x, y, &beta);
    if !sse.is_finite() {
        return Err(Error::NonFiniteStart(model.id().into()));
    }
    let mut lambda = config.initial_damping;
    let mut converged = false;
    let mut iterations = 0;
    let mut jac = DMatrix::zeros(n, p);
    let mut grad_row = vec![0.0; p];
    let mut trial = vec![0.0; p];

    'outer: while iterations < config.max_iterations {
        iterations += 1;
        let mut resid = DVector::zeros(n);
        for i in 0..n {
            resid[i] = y[i] - model.eval(x[i], &beta);
            model.gradient(x[i], &beta, &mut grad_row);
            for j in 0..p {
                jac[(i, j)] = grad_row[j];
            }
        }
        let g = jac.transpose() * &resid;
        if g.amax() < config.gradient_tolerance {
            converged = true;
            break;
        }
        let jtj = jac.transpose() * &jac;
        let mut singular = false;
        loop {
            let mut m = jtj.clone();
            for j in 0..p {
                let d = jtj[(j, j)];
                m[(j, j)] += lambda * if d > 0.0 { d } else { 1.0 };
            }
            match m.cholesky() {
                Some(ch) => {
                    let step = ch.solve(&g);
                    for j in 0..p {
                        trial[j] = beta[j] + step[j];
                    }
                    let trial_sse = sse_at(model, x, y, &trial);
                    if trial_sse.is_finite() && trial_sse <= sse {
                        let drop = (sse - trial_sse) / sse.max(f64::MIN_POSITIVE);
                        beta.copy_from_slice(&trial);
                        sse = trial_sse;
                        lambda = (lambda / 10.0).max(1e-12);
                        if drop < config.relative_sse_tolerance {
                            converged = true;
                            break 'outer;
                        }
                        break;
                    }
                }
                None => singular = true,
            }
            lambda *= 10.0;
            if lambda > config.max_damping {
                // no downhill step exists at any damping: a minimum unless the system was singular
                converged = !singular;
                break 'outer;
            }
        }
    }

    let fitted: Vec<f64> = x.iter().map(|xi| model.eval(*xi, &beta)).collect();
    Ok(NlsFit { model_id: model.id().into(), beta, start, start_fallback, sse, fitted, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nls::catalog::{ExpDecay, Logistic, Reciprocal, Saturation, SinCos};
    use crate::stats::ols_columns;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn sample(
        model: &dyn NlsModel,
        beta: &[f64],
        lo: f64,
        hi: f64,
        n: usize,
        sd: f64,
        seed: u64,
    ) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        x.sort_by(f64::total_cmp);
        let noise = Normal::new(0.0, sd.max(f64::MIN_POSITIVE)).unwrap();
        let y = x.iter().map(|v| model.eval(*v, beta) + if sd > 0.0 { noise.sample(&mut rng) } else { 0.0 }).collect();
        (x, y)
    }

    #[allow(clippy::type_complexity)]
    #[test]
    fn zero_residual_recovery() {
        let cases: [(&dyn NlsModel, &[f64], f64, f64, f64); 5] = [
            (&Logistic, &[2.0, 3.0, 1.0], -6.0, 6.0, 1e-5),
            (&ExpDecay, &[0.25, 1.0], 1.0, 4.0, 1e-6),
            (&Saturation, &[20.0, 120.0], 5.0, 210.0, 1e-5),
            (&SinCos, &[4.0, 1.0], 0.0, 4.0, 1e-8),
            (&Reciprocal, &[1.0, 0.5], 1.0, 4.0, 1e-6),
        ];
        for (model, beta, lo, hi, tol) in cases {
            let (x, y) = sample(model, beta, lo, hi, 128, 0.0, 1);
            let fit = fit_nls(model, &x, &y, None).unwrap();
            assert!(fit.converged, "{}", model.id());
            for (b, t) in fit.beta.iter().zip(beta) {
                assert!((b - t).abs() <= tol * t.abs().max(1.0), "{}: {:?}", model.id(), fit.beta);
            }
        }
    }

    #[test]
    fn noisy_logistic_beats_truth() {
        let truth = [2.0, 3.0, 1.0];
        let (x, y) = sample(&Logistic, &truth, -6.0, 6.0, 256, 0.1, 77);
        let fit = fit_nls(&Logistic, &x, &y, None).unwrap();
        assert!(fit.sse <= sse_at(&Logistic, &x, &y, &truth));
        let recomputed: f64 = y.iter().zip(&fit.fitted).map(|(a, b)| (a - b) * (a - b)).sum();
        assert!((recomputed - fit.sse).abs() <= 1e-10 * fit.sse);
        assert!(fit.fit_ok());
    }

    #[test]
    fn linear_model_matches_closed_form() {
        let (x, y) = sample(&SinCos, &[4.0, 1.0], 0.0, 4.0, 100, 1.0, 4);
        let fit = fit_nls(&SinCos, &x, &y, Some(&[0.0, 0.0])).unwrap();
        let c: Vec<f64> = x.iter().map(|v| (2.0 * v).cos()).collect();
        let s: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let exact = ols_columns(&[&c, &s], &y).unwrap();
        for (a, b) in fit.beta.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn non_finite_start_is_an_error() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 0.5, 0.3, 0.25];
        // 1/(β1 + β2 x) has a pole at x = 2
        let r = fit_nls(&Reciprocal, &x, &y, Some(&[-2.0, 1.0]));
        assert_eq!(r, Err(Error::NonFiniteStart("f24".into())));
        assert!(fit_nls(&Reciprocal, &x[..2], &y[..2], None).is_err());
        assert!(fit_nls(&Reciprocal, &x, &y, Some(&[1.0])).is_err());
    }

    #[test]
    fn unidentifiable_parameter_stops_without_panicking() {
        // β2 multiplies sin(x) = 0 everywhere, leaving a zero column
        let x: Vec<f64> = (0..10).map(|i| i as f64 * core::f64::consts::PI).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * (2.0 * v).cos()).collect();
        let fit = fit_nls(&SinCos, &x, &y, Some(&[1.0, 1.0])).unwrap();
        assert!((fit.beta[0] - 2.0).abs() < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn never_worse_than_start(seed in any::<u64>(), sd in 0.01f64..0.3) {
            let (x, y) = sample(&ExpDecay, &[0.25, 1.0], 1.0, 4.0, 64, sd, seed);
            let fit = fit_nls(&ExpDecay, &x, &y, None).unwrap();
            prop_assert!(fit.sse <= sse_at(&ExpDecay, &x, &y, &fit.start));
        }

        #[test]
        fn row_permutation_invariance(seed in any::<u64>()) {
            let (x, y) = sample(&Saturation, &[20.0, 120.0], 5.0, 210.0, 40, 5.0, seed);
            let start = [18.0, 110.0];
            let fit = fit_nls(&Saturation, &x, &y, Some(&start)).unwrap();
            let xr: Vec<f64> = x.iter().rev().copied().collect();
            let yr: Vec<f64> = y.iter().rev().copied().collect();
            let fitr = fit_nls(&Saturation, &xr, &yr, Some(&start)).unwrap();
            for (a, b) in fit.beta.iter().zip(&fitr.beta) {
                prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0));
            }
        }
    }
}
