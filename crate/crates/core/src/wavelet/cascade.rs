//! Pointwise evaluation of the scale function by the Daubechies–Lagarias
//! cascade: products of the two refinement matrices indexed by the dyadic
//! digits of the argument converge to a matrix whose columns all equal
//! `(φ(t), φ(t+1), …, φ(t+2N-2))`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::FilterPair;
use crate::{Error, Result};

pub const DEFAULT_CASCADE_DEPTH: usize = 24;

/// `T0 = (√2 h_{2i-j-1})`, `T1 = (√2 h_{2i-j})` for `1 ≤ i, j ≤ 2N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementMatrices {
    pub t0: DMatrix<f64>,
    pub t1: DMatrix<f64>,
}

impl RefinementMatrices {
    pub fn new(fp: &FilterPair) -> Self {
        let dim = fp.len() - 1;
        let entry =
            |i: usize, j: usize, shift: isize| SQRT_2 * fp.h_at(2 * (i as isize + 1) - (j as isize + 1) - shift);
        Self {
            t0: DMatrix::from_fn(dim, dim, |i, j| entry(i, j, 1)),
            t1: DMatrix::from_fn(dim, dim, |i, j| entry(i, j, 0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.t0.nrows()
    }

    pub fn averaged(&self) -> DMatrix<f64> {
        (&self.t0 + &self.t1) * 0.5
    }
}

/// First `depth` binary digits of `t ∈ (0, 1)`.
fn dyadic_digits(mut t: f64, depth: usize) -> Vec<u8> {
    (0..depth)
        .map(|_| {
            t *= 2.0;
            if t >= 1.0 {
                t -= 1.0;
                1
            } else {
                0
            }
        })
        .collect()
}

/// Approximates `(φ(t), φ(t+1), …, φ(t+2N-2))` by applying
/// `T_{d1} ⋯ T_{d_depth}` to the integer-point vector `(φ(0), …, φ(2N-2))`.
///
/// The integer-point vector is the fixed point of `T0`, so the result is exact
/// for dyadic `t` with at most `depth` digits. For other `t` the error decays
/// like `2^(-α·depth)` with `α` the Hölder exponent of `φ`.
pub fn cascade_eval(fp: &FilterPair, t: f64, depth: usize) -> Result<Vec<f64>> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::CascadeDomain(t));
    }
    if depth == 0 {
        return Err(Error::CascadeDepth);
    }
    let mats = RefinementMatrices::new(fp);
    let mut v = DVector::zeros(mats.dim());
    if mats.dim() == 1 {
        // Haar: φ is the indicator of [0, 1)
        v[0] = 1.0;
    } else {
        for (k, value) in eigen_phi(fp)?.into_iter().enumerate() {
            v[k + 1] = value;
        }
    }
    for digit in dyadic_digits(t, depth).into_iter().rev() {
        v = if digit == 0 { &mats.t0 * v } else { &mats.t1 * v };
    }
    Ok(v.iter().copied().collect())
}

/// Values of `φ` at the interior integers `1..=2N-2`, taken as the
/// eigenvector for eigenvalue 1 of `(√2 h_{2k-l})` normalized to sum to one.
pub fn eigen_phi(fp: &FilterPair) -> Result<Vec<f64>> {
    let dim = fp.len().saturating_sub(2);
    if dim == 0 {
        return Ok(vec![]);
    }
    let m = DMatrix::from_fn(dim, dim, |k, l| {
        SQRT_2 * fp.h_at(2 * (k as isize + 1) - (l as isize + 1)) - if k == l { 1.0 } else { 0.0 }
    });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or(Error::DegenerateEigenspace)?;
    let sv = &svd.singular_values;
    let (mut min_i, mut min_v) = (0, f64::INFINITY);
    for (i, s) in sv.iter().enumerate() {
        if *s < min_v {
            min_i = i;
            min_v = *s;
        }
    }
    let scale = sv.iter().copied().fold(0.0, f64::max).max(1.0);
    let nullity = sv.iter().filter(|s| **s <= 1e-9 * scale).count();
    if nullity != 1 {
        return Err(Error::DegenerateEigenspace);
    }
    let row = v_t.row(min_i);
    let total: f64 = row.iter().sum();
    if total.abs() < 1e-12 {
        return Err(Error::DegenerateEigenspace);
    }
    Ok(row.iter().map(|v| v / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::{make_daubechies, make_haar};

    /// φ at a dyadic point `m / 2^k`, by recursive refinement from integer values.
    fn refine(fp: &FilterPair, integer_phi: &[f64], m: i64, k: u32) -> f64 {
        if k == 0 {
            return if m >= 1 && (m as usize) <= integer_phi.len() { integer_phi[m as usize - 1] } else { 0.0 };
        }
        if m % 2 == 0 {
            return refine(fp, integer_phi, m / 2, k - 1);
        }
        // φ(x) = Σ √2 h_j φ(2x - j), 2x = m / 2^(k-1)
        (0..fp.len() as i64)
            .map(|j| SQRT_2 * fp.h()[j as usize] * refine(fp, integer_phi, m - j * (1 << (k - 1)), k - 1))
            .sum()
    }

    #[test]
    fn haar_cascade_is_indicator() {
        let v = cascade_eval(&make_haar(), 0.25, 10).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!(eigen_phi(&make_haar()).unwrap().is_empty());
    }

    #[test]
    fn daub2_integer_values_by_hand() {
        // 2x2 eigenproblem: φ(1) = √2(h1 φ(1) + h0 φ(2)), φ(2) = √2(h3 φ(1) + h2 φ(2))
        let fp = make_daubechies(2).unwrap();
        let phi = eigen_phi(&fp).unwrap();
        let r3 = 3f64.sqrt();
        assert!((phi[0] - (1.0 + r3) / 2.0).abs() < 1e-12);
        assert!((phi[1] - (1.0 - r3) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_phi_sums_to_one() {
        for n in 2..=4 {
            let phi = eigen_phi(&make_daubechies(n).unwrap()).unwrap();
            assert_eq!(phi.len(), 2 * n - 2);
            assert!((phi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn daub2_half_point_matches_one_refinement_step() {
        // φ(0.5) = √2 h0 φ(1) = (2 + √3) / 4 from the closed-form taps
        let fp = make_daubechies(2).unwrap();
        let r3 = 3f64.sqrt();
        let h0 = (1.0 + r3) / (4.0 * SQRT_2);
        let phi1 = (1.0 + r3) / 2.0;
        let oracle = SQRT_2 * h0 * phi1;
        assert!((oracle - (2.0 + r3) / 4.0).abs() < 1e-15);
        let v = cascade_eval(&fp, 0.5, 20).unwrap();
        assert!((v[0] - oracle).abs() < 1e-6, "{} vs {oracle}", v[0]);
    }

    #[test]
    fn cascade_converges_with_depth() {
        let fp = make_daubechies(2).unwrap();
        let shallow = cascade_eval(&fp, 0.5, 5).unwrap();
        let deep = cascade_eval(&fp, 0.5, 25).unwrap();
        for (a, b) in shallow.iter().zip(&deep) {
            assert!((a - b).abs() < 1e-4);
        }
        // non-dyadic argument: successive depths approach each other
        let t = 1.0 / 3.0;
        let d30 = cascade_eval(&fp, t, 30).unwrap();
        let d45 = cascade_eval(&fp, t, 45).unwrap();
        for (a, b) in d30.iter().zip(&d45) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
        for n in 2..=4 {
            let fp = make_daubechies(n).unwrap();
            let v = cascade_eval(&fp, 0.3, DEFAULT_CASCADE_DEPTH).unwrap();
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-6, "partition of unity");
        }
    }

    #[test]
    fn cascade_agrees_with_refinement_at_dyadic_points() {
        for n in 2..=4 {
            let fp = make_daubechies(n).unwrap();
            let phi = eigen_phi(&fp).unwrap();
            for (m, k) in [(1, 1), (1, 2), (3, 2), (3, 3), (5, 3), (7, 4), (11, 5)] {
                let t = m as f64 / (1u64 << k) as f64;
                let v = cascade_eval(&fp, t, 48).unwrap();
                for (shift, value) in v.iter().enumerate() {
                    let exact = refine(&fp, &phi, m + shift as i64 * (1 << k), k);
                    assert!((value - exact).abs() < 1e-8, "N={n} t={t}+{shift}: {value} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn cascade_domain_errors() {
        let fp = make_daubechies(2).unwrap();
        assert_eq!(cascade_eval(&fp, 0.0, 10), Err(Error::CascadeDomain(0.0)));
        assert_eq!(cascade_eval(&fp, 1.0, 10), Err(Error::CascadeDomain(1.0)));
        assert_eq!(cascade_eval(&fp, 0.5, 0), Err(Error::CascadeDepth));
    }

    #[test]
    fn averaged_matrix_has_unit_eigenvalue() {
        for n in 1..=4 {
            let mats = RefinementMatrices::new(&make_daubechies(n).unwrap());
            let avg = mats.averaged();
            let dim = mats.dim();
            let shifted = &avg - DMatrix::<f64>::identity(dim, dim);
            let smallest = shifted.svd(false, false).singular_values.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(smallest < 1e-10, "N={n}: {smallest}");
            // columns of both matrices sum to one as well
            for j in 0..dim {
                assert!((mats.t0.column(j).sum() - 1.0).abs() < 1e-10);
                assert!((mats.t1.column(j).sum() - 1.0).abs() < 1e-10);
            }
        }
    }
}
