//! Small numeric helpers shared across modules.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Relative size below which a diagonal entry of R marks a rank deficiency.
pub const RANK_TOLERANCE: f64 = 1e-10;

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Median with the even-length convention of averaging the two middle values.
pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Least squares solution of `a * beta = b` through a Householder QR.
///
/// Fails with [`Error::RankDeficient`] when a diagonal entry of R is tiny
/// relative to the largest one.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let (n, p) = a.shape();
    if n < p || p == 0 {
        return Err(Error::RankDeficient);
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if !(scale > 0.0) || (0..p).any(|i| r[(i, i)].abs() <= RANK_TOLERANCE * scale) {
        return Err(Error::RankDeficient);
    }
    let qtb = qr.q().transpose() * b;
    r.solve_upper_triangular(&qtb).ok_or(Error::RankDeficient)
}

/// Ordinary least squares on explicit basis columns, no intercept added.
pub fn ols_columns(columns: &[&[f64]], y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    let p = columns.len();
    let a = DMatrix::from_fn(n, p, |i, j| columns[j][i]);
    let b = DVector::from_column_slice(y);
    Ok(least_squares(&a, &b)?.iter().copied().collect())
}

/// Simple linear regression `y = a + b x`, returned as `(a, b)`.
pub fn simple_linear(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}
