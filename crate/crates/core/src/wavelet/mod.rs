//! Orthonormal wavelet filters, the cascade algorithm and the periodic
//! discrete wavelet transform on dyadic-length signals.

mod cascade;
mod filters;
mod transform;

pub use cascade::{cascade_eval, eigen_phi, RefinementMatrices, DEFAULT_CASCADE_DEPTH};
pub use filters::{make_daubechies, make_haar, FilterPair, Wavelet};
pub use transform::{dwt, dyadic_level, idwt, CoefficientPyramid};
