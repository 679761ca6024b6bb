//! Brute-force rescoring oracle for `wp_select`: refits every candidate and
//! recomputes the reference and both distances from scratch.

#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavesel_core::glm::{fit_glm, intercept_design, Family, Link};
use wavesel_core::nls::{builtin_catalog, fit_nls, ExprModel};
use wavesel_core::regression::{fit_wavelet, WaveletConfig};
use wavesel_core::select::{wp_select, CandidateKind, CandidateModel, Criterion};

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Wavelet fit on the min-max rescaled least squares line, in row order.
pub fn reference(x: &[f64], y: &[f64], config: &WaveletConfig) -> Vec<f64> {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let eta: Vec<f64> = x.iter().map(|a| my + slope * (a - mx)).collect();
    let lo = eta.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let t: Vec<f64> = eta.iter().map(|e| ((e - lo) / (hi - lo)).clamp(0.0, 1.0)).collect();
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| t[a].total_cmp(&t[b]));
    let ts: Vec<f64> = order.iter().map(|&i| t[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let fit = fit_wavelet(&ts, &ys, config).unwrap();
    let mut out = vec![0.0; x.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = fit.fitted[k];
    }
    out
}

pub fn candidates() -> Vec<CandidateModel> {
    let mut c: Vec<CandidateModel> = builtin_catalog().into_iter().map(CandidateModel::nonlinear).collect();
    c.push(CandidateModel::nonlinear(Arc::new(ExprModel::new("quad", "b1 + b2*x + b3*x^2", None).unwrap())));
    for link in [Link::Identity, Link::Log, Link::Inverse] {
        c.push(CandidateModel::glm(Family::Gamma, link));
    }
    c
}

pub fn instance(seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(40..200);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..4.0)).collect();
    // unsorted rows on purpose
    x.swap(0, n - 1);
    let kind = seed % 4;
    let y = x
        .iter()
        .map(|&v| {
            let mean = match kind {
                0 => 0.25 + (-v).exp(),
                1 => 120.0 * v / (20.0 + v) / 50.0,
                2 => 1.0 / (0.5 + 0.7 * v),
                _ => (0.3 * v).exp(),
            };
            mean * (1.0 + 0.1 * rng.random_range(-1.0..1.0))
        })
        .collect();
    (x, y)
}

/// Winners `(rmse, mae)` by brute force: refit each candidate, score it against
/// the independently recomputed reference, ties broken by id.
pub fn brute_force_winners(x: &[f64], y: &[f64], cands: &[CandidateModel]) -> (String, String) {
    let config = WaveletConfig::default();
    let design = intercept_design(x);
    let wav = reference(x, y, &config);
    let mut rescored: Vec<(String, f64, f64)> = Vec::new();
    for c in cands {
        let fitted = match &c.kind {
            CandidateKind::Nonlinear(m) => fit_nls(m.as_ref(), x, y, None).ok().map(|f| f.fitted),
            CandidateKind::Glm { family, link } => fit_glm(&design, y, *family, *link).ok().map(|f| f.mu),
        };
        let Some(fitted) = fitted.filter(|f| f.iter().all(|v| v.is_finite())) else { continue };
        let mse = fitted.iter().zip(&wav).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / x.len() as f64;
        let mut abs: Vec<f64> = fitted.iter().zip(&wav).map(|(a, b)| (a - b).abs()).collect();
        rescored.push((c.id.clone(), mse.sqrt(), median(&mut abs)));
    }
    let best = |pick: fn(&(String, f64, f64)) -> f64| {
        rescored
            .iter()
            .min_by(|a, b| pick(a).total_cmp(&pick(b)).then_with(|| a.0.cmp(&b.0)))
            .map(|r| r.0.clone())
            .unwrap_or_default()
    };
    (best(|r| r.1), best(|r| r.2))
}

/// Compares `wp_select` on instance `seed` with the brute-force rescoring.
pub fn check_instance(seed: u64) -> Result<(), String> {
    let config = WaveletConfig::default();
    let cands = candidates();
    let (x, y) = instance(seed);
    let report = wp_select(&intercept_design(&x), &y, &cands, &config).map_err(|e| format!("seed {seed}: {e}"))?;
    let wav = reference(&x, &y, &config);
    for (a, b) in wav.iter().zip(&report.reference.fitted) {
        if (a - b).abs() >= 1e-9 {
            return Err(format!("seed {seed}: reference differs ({a} vs {b})"));
        }
    }
    let (rmse, mae) = brute_force_winners(&x, &y, &cands);
    for (criterion, expected) in [(Criterion::Rmse, rmse), (Criterion::Mae, mae)] {
        if report.winner(criterion) != expected {
            return Err(format!("seed {seed} {criterion}: {} vs {expected}", report.winner(criterion)));
        }
    }
    Ok(())
}
