//! Wavelet regression for non-equispaced data on `[0, 1]`.

mod fit;
mod grid;
mod threshold;

pub use fit::{fit_wavelet, WaveletConfig, WaveletFit, DEFAULT_COARSE_LEVEL, MULTIPLICITY_FLAG};
pub use grid::{cell_of, grid_resolution, map_to_grid, GriddedSample, MAX_RESOLUTION};
pub use threshold::{
    mad_sigma, threshold, threshold_with, universal_lambda, ThresholdPolicy, ThresholdRule, MAD_SCALE,
};
