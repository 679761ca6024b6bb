//! Builtin regression functions.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::model::{NlsModel, StartGuess};
use crate::stats::{median, ols_columns, simple_linear};

/// `β1 / (β2 + exp(β3 x))`, a decreasing logistic curve.
#[derive(Debug, Clone, Copy, Default)]
pub struct Logistic;

/// `β1 + exp(-β2 x)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpDecay;

/// `β2 x / (β1 + x)`, the Michaelis-Menten curve.
#[derive(Debug, Clone, Copy, Default)]
pub struct Saturation;

/// `β1 cos(2x) + β2 sin(x)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SinCos;

/// `1 / (β1 + β2 x)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Reciprocal;

impl NlsModel for Logistic {
    fn id(&self) -> &str {
        "f1"
    }

    fn arity(&self) -> usize {
        3
    }

    fn eval(&self, x: f64, b: &[f64]) -> f64 {
        b[0] / (b[1] + (b[2] * x).exp())
    }

    fn gradient(&self, x: f64, b: &[f64], out: &mut [f64]) {
        let e = (b[2] * x).exp();
        let d = b[1] + e;
        out[0] = 1.0 / d;
        out[1] = -b[0] / (d * d);
        out[2] = -b[0] * x * e / (d * d);
    }

    fn has_analytic_gradient(&self) -> bool {
        true
    }

    /// Upper asymptote `A = 1.05 max(y)`, then `ln(A/y - 1) = β3 x - ln β2`
    /// fitted on the points with `0.05 A < y < 0.95 A`.
    fn start(&self, x: &[f64], y: &[f64]) -> StartGuess {
        let top = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(top > 0.0) {
            return StartGuess::ones(3);
        }
        let asymptote = 1.05 * top;
        let (xs, zs): (Vec<f64>, Vec<f64>) = x
            .iter()
            .zip(y)
            .filter(|(_, &yi)| yi > 0.05 * asymptote && yi < 0.95 * asymptote)
            .map(|(&xi, &yi)| (xi, (asymptote / yi - 1.0).ln()))
            .unzip();
        match simple_linear(&xs, &zs) {
            Some((c0, c1)) if xs.len() >= 3 => {
                let b2 = (-c0).exp();
                StartGuess::checked(vec![asymptote * b2, b2, c1])
            }
            _ => StartGuess::ones(3),
        }
    }

    fn domain_note(&self) -> &str {
        "finite wherever β2 + exp(β3 x) ≠ 0"
    }
}

impl NlsModel for ExpDecay {
    fn id(&self) -> &str {
        "f2"
    }

    fn arity(&self) -> usize {
        2
    }

    fn eval(&self, x: f64, b: &[f64]) -> f64 {
        b[0] + (-b[1] * x).exp()
    }

    fn gradient(&self, x: f64, b: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        out[1] = -x * (-b[1] * x).exp();
    }

    fn has_analytic_gradient(&self) -> bool {
        true
    }

    /// Profile scan: `β2` over a log grid (plus the log-linear guess from
    /// `β1 ≈ min(y)`), each paired with its optimal `β1 = mean(y - exp(-β2 x))`.
    fn start(&self, x: &[f64], y: &[f64]) -> StartGuess {
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let delta = 0.1 * (hi - lo) + 1e-3 * lo.abs().max(1.0);
        let floor = lo - delta;
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sxz: f64 = x.iter().zip(y).map(|(xi, yi)| xi * (yi - floor).ln()).sum();
        let log_linear = if sxx > 0.0 { -sxz / sxx } else { 1.0 };
        let best = log_grid(1e-3, 1e2).chain(core::iter::once(log_linear)).filter_map(|b2| {
            let decay: Vec<f64> = x.iter().map(|v| (-b2 * v).exp()).collect();
            let b1 = y.iter().zip(&decay).map(|(yi, d)| yi - d).sum::<f64>() / y.len() as f64;
            let sse: f64 = y.iter().zip(&decay).map(|(yi, d)| (yi - b1 - d).powi(2)).sum();
            sse.is_finite().then_some((sse, [b1, b2]))
        });
        match best.min_by(|a, b| a.0.total_cmp(&b.0)) {
            Some((_, b)) => StartGuess::checked(b.to_vec()),
            None => StartGuess::ones(2),
        }
    }

    fn domain_note(&self) -> &str {
        "finite for all real x and β"
    }
}

impl NlsModel for Saturation {
    fn id(&self) -> &str {
        "f3"
    }

    fn arity(&self) -> usize {
        2
    }

    fn eval(&self, x: f64, b: &[f64]) -> f64 {
        b[1] * x / (b[0] + x)
    }

    fn gradient(&self, x: f64, b: &[f64], out: &mut [f64]) {
        let d = b[0] + x;
        out[0] = -b[1] * x / (d * d);
        out[1] = x / d;
    }

    fn has_analytic_gradient(&self) -> bool {
        true
    }

    /// Half-max guess (`β2 = max(y)`, `β1` the predictor value whose response
    /// is nearest half of it), refined by a profile scan: `β1` over a log grid
    /// scaled to the predictor, each paired with its least squares `β2`.
    fn start(&self, x: &[f64], y: &[f64]) -> StartGuess {
        let top = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let half = 0.5 * top;
        let mut nearest = None;
        for (xi, yi) in x.iter().zip(y) {
            let gap = (yi - half).abs();
            if nearest.is_none_or(|(g, _)| gap < g) {
                nearest = Some((gap, *xi));
            }
        }
        let half_max = match nearest {
            Some((_, v)) if v > 0.0 => v,
            _ => median(x).abs().max(1.0),
        };
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let best = log_grid(1e-3, 1e2).map(|r| r * scale).chain(core::iter::once(half_max)).filter_map(|b1| {
            let u: Vec<f64> = x.iter().map(|v| v / (b1 + v)).collect();
            let uu: f64 = u.iter().map(|v| v * v).sum();
            let b2 = u.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / uu;
            let sse: f64 = u.iter().zip(y).map(|(a, b)| (b - b2 * a).powi(2)).sum();
            sse.is_finite().then_some((sse, [b1, b2]))
        });
        match best.min_by(|a, b| a.0.total_cmp(&b.0)) {
            Some((_, b)) => StartGuess::checked(b.to_vec()),
            None => StartGuess::checked(vec![half_max, top]),
        }
    }

    fn domain_note(&self) -> &str {
        "finite for x ≠ -β1; intended for x > 0"
    }
}

impl NlsModel for SinCos {
    fn id(&self) -> &str {
        "f4"
    }

    fn arity(&self) -> usize {
        2
    }

    fn eval(&self, x: f64, b: &[f64]) -> f64 {
        b[0] * (2.0 * x).cos() + b[1] * x.sin()
    }

    fn gradient(&self, x: f64, _b: &[f64], out: &mut [f64]) {
        out[0] = (2.0 * x).cos();
        out[1] = x.sin();
    }

    fn has_analytic_gradient(&self) -> bool {
        true
    }

    /// Linear in `β`, so least squares on the two basis columns is exact.
    fn start(&self, x: &[f64], y: &[f64]) -> StartGuess {
        let c: Vec<f64> = x.iter().map(|v| (2.0 * v).cos()).collect();
        let s: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        match ols_columns(&[&c, &s], y) {
            Ok(beta) => StartGuess::checked(beta),
            Err(_) => StartGuess::ones(2),
        }
    }

    fn domain_note(&self) -> &str {
        "finite for all real x and β"
    }
}

impl NlsModel for Reciprocal {
    fn id(&self) -> &str {
        "f24"
    }

    fn arity(&self) -> usize {
        2
    }

    fn eval(&self, x: f64, b: &[f64]) -> f64 {
        1.0 / (b[0] + b[1] * x)
    }

    fn gradient(&self, x: f64, b: &[f64], out: &mut [f64]) {
        let d = b[0] + b[1] * x;
        out[0] = -1.0 / (d * d);
        out[1] = -x / (d * d);
    }

    fn has_analytic_gradient(&self) -> bool {
        true
    }

    /// Least squares of `1/y` on `x` when every response is positive.
    fn start(&self, x: &[f64], y: &[f64]) -> StartGuess {
        let hi = y.iter().copied().fold(0.0, f64::max);
        if y.iter().any(|v| !(*v > 1e-8 * hi.max(1.0))) {
            return StartGuess::ones(2);
        }
        let inv: Vec<f64> = y.iter().map(|v| 1.0 / v).collect();
        match simple_linear(x, &inv) {
            Some((a, b)) => StartGuess::checked(vec![a, b]),
            None => StartGuess::ones(2),
        }
    }

    fn domain_note(&self) -> &str {
        "finite for x ≠ -β1/β2"
    }
}

/// 61 log-spaced points from `lo` to `hi`, both included.
fn log_grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    const STEPS: usize = 60;
    let (a, b) = (lo.ln(), hi.ln());
    (0..=STEPS).map(move |i| (a + (b - a) * i as f64 / STEPS as f64).exp())
}

/// The five builtin functions, in id order.
pub fn builtin_catalog() -> Vec<Arc<dyn NlsModel>> {
    vec![Arc::new(Logistic), Arc::new(ExpDecay), Arc::new(Saturation), Arc::new(SinCos), Arc::new(Reciprocal)]
}

/// Looks up a builtin model by id.
pub fn builtin(id: &str) -> Option<Arc<dyn NlsModel>> {
    builtin_catalog().into_iter().find(|m| m.id() == id)
}
