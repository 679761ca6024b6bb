use alloc::vec;
use alloc::vec::Vec;

use super::grid::{cell_of, grid_resolution, map_to_grid, GriddedSample, MAX_RESOLUTION};
use super::threshold::{threshold, ThresholdPolicy};
use crate::wavelet::{dwt, idwt, CoefficientPyramid, Wavelet};
use crate::{Error, Result};

/// Coarsest level that is never thresholded.
pub const DEFAULT_COARSE_LEVEL: usize = 3;

/// Share of multiply-occupied cells above which the report flags the grid.
pub const MULTIPLICITY_FLAG: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveletConfig {
    pub wavelet: Wavelet,
    pub coarse_level: usize,
    pub policy: ThresholdPolicy,
    /// Grid resolution; chosen from the sample size when `None`.
    pub resolution: Option<usize>,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self {
            wavelet: Wavelet::default(),
            coarse_level: DEFAULT_COARSE_LEVEL,
            policy: ThresholdPolicy::default(),
            resolution: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveletFit {
    pub pyramid: CoefficientPyramid,
    /// Reconstructed grid values.
    pub grid_fit: Vec<f64>,
    /// Fit read back at each original observation.
    pub fitted: Vec<f64>,
    /// Fraction of zeroed detail coefficients at levels `0..J`; zero below `j0`.
    pub null_fraction_by_level: Vec<f64>,
    pub coarse_level: usize,
    pub grid: GriddedSample,
}

impl WaveletFit {
    pub fn resolution(&self) -> usize {
        self.grid.resolution
    }

    pub fn multiplicity_flagged(&self) -> bool {
        self.grid.multiplicity_fraction > MULTIPLICITY_FLAG
    }
}

/// Thresholded wavelet regression of `y` on sorted `x ∈ [0, 1]`.
///
/// The coarse level is lowered to `J - 1` when the grid is too small for it.
pub fn fit_wavelet(x: &[f64], y: &[f64], config: &WaveletConfig) -> Result<WaveletFit> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let resolution = config.resolution.unwrap_or_else(|| grid_resolution(x.len(), MAX_RESOLUTION));
    let fp = config.wavelet.filter()?;
    let grid = map_to_grid(x, y, resolution)?;
    let coarse_level = config.coarse_level.min(resolution - 1);
    let raw = dwt(&grid.grid_y, &fp, coarse_level)?;
    let pyramid = threshold(&raw, config.policy);
    let grid_fit = idwt(&pyramid, &fp)?;
    let fitted = x.iter().map(|&xi| grid_fit[cell_of(xi, resolution)]).collect();

    let mut null_fraction_by_level = vec![0.0; resolution];
    for (level, d) in pyramid.levels() {
        let zeros = d.iter().filter(|v| **v == 0.0).count();
        null_fraction_by_level[level] = zeros as f64 / d.len() as f64;
    }
    Ok(WaveletFit { pyramid, grid_fit, fitted, null_fraction_by_level, coarse_level, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn equispaced(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
    }

    fn rmse(a: &[f64], b: &[f64]) -> f64 {
        (a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>() / a.len() as f64).sqrt()
    }

    #[test]
    fn constant_response_is_reproduced() {
        let x = equispaced(100);
        for w in [Wavelet::Haar, Wavelet::Daubechies(2), Wavelet::Daubechies(4)] {
            let cfg = WaveletConfig { wavelet: w, ..Default::default() };
            let fit = fit_wavelet(&x, &[3.25; 100], &cfg).unwrap();
            assert!(fit.fitted.iter().all(|v| (v - 3.25).abs() < 1e-10));
        }
    }

    #[test]
    fn smooth_signal_is_tracked() {
        let x = equispaced(128);
        let y: Vec<f64> = x.iter().map(|t| (2.0 * PI * t).sin()).collect();
        let fit = fit_wavelet(&x, &y, &WaveletConfig::default()).unwrap();
        assert!(rmse(&fit.fitted, &y) < rmse(&vec![0.0; 128], &y));
        let n = y.len() as f64;
        let (my, mf) = (y.iter().sum::<f64>() / n, fit.fitted.iter().sum::<f64>() / n);
        let cov: f64 = y.iter().zip(&fit.fitted).map(|(a, b)| (a - my) * (b - mf)).sum();
        let vy: f64 = y.iter().map(|a| (a - my).powi(2)).sum();
        let vf: f64 = fit.fitted.iter().map(|b| (b - mf).powi(2)).sum();
        let r = cov / (vy * vf).sqrt();
        assert!(r > 0.99, "r = {r}");
    }

    #[test]
    fn noise_is_mostly_zeroed_above_coarse_levels() {
        let x = equispaced(128);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let y: Vec<f64> = (0..128).map(|_| StandardNormal.sample(&mut rng)).collect();
        let fit = fit_wavelet(&x, &y, &WaveletConfig::default()).unwrap();
        assert_eq!(fit.null_fraction_by_level.len(), 7);
        assert_eq!(&fit.null_fraction_by_level[..3], &[0.0, 0.0, 0.0]);
        let zeros: usize = fit.pyramid.levels().map(|(_, d)| d.iter().filter(|v| **v == 0.0).count()).sum();
        let total: usize = fit.pyramid.levels().map(|(_, d)| d.len()).sum();
        assert!(zeros as f64 / total as f64 > 0.6);
    }

    #[test]
    fn fitted_length_and_fraction_range() {
        let x: Vec<f64> = (0..71).map(|i| (i as f64 / 70.0).powi(2)).collect();
        let y: Vec<f64> = x.iter().map(|t| t * 3.0).collect();
        let fit = fit_wavelet(&x, &y, &WaveletConfig::default()).unwrap();
        assert_eq!(fit.fitted.len(), 71);
        assert_eq!(fit.resolution(), 7);
        assert!(fit.null_fraction_by_level.iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn small_grid_clamps_coarse_level() {
        let x = equispaced(8);
        let fit = fit_wavelet(&x, &[1.0; 8], &WaveletConfig::default()).unwrap();
        assert_eq!(fit.coarse_level, 2);
    }
}
