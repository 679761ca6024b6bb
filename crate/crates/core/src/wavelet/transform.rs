use alloc::vec;
use alloc::vec::Vec;

use super::FilterPair;
use crate::{Error, Result};

/// Approximation coefficients at the coarse level `j0` plus detail
/// coefficients for every level `j0..J`.
///
/// `details[i]` holds level `coarse_level + i` and has `2^(coarse_level + i)`
/// entries; the whole pyramid holds `2^J` coefficients.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoefficientPyramid {
    pub coarse_level: usize,
    pub max_level: usize,
    pub approx: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub thresholded: bool,
}

impl CoefficientPyramid {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_level >= self.max_level {
            return Err(Error::InvalidLevel { coarse: self.coarse_level, max: self.max_level });
        }
        if self.approx.len() != 1 << self.coarse_level {
            return Err(Error::MalformedPyramid("approximation length must be 2^j0"));
        }
        if self.details.len() != self.max_level - self.coarse_level {
            return Err(Error::MalformedPyramid("one detail vector is required per level"));
        }
        for (i, d) in self.details.iter().enumerate() {
            if d.len() != 1 << (self.coarse_level + i) {
                return Err(Error::MalformedPyramid("detail vector at level j must have 2^j entries"));
            }
        }
        Ok(())
    }

    /// Detail coefficients of level `j`, if the pyramid stores that level.
    pub fn level(&self, j: usize) -> Option<&[f64]> {
        j.checked_sub(self.coarse_level).and_then(|i| self.details.get(i)).map(Vec::as_slice)
    }

    pub fn finest(&self) -> &[f64] {
        self.details.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Iterates `(level, coefficients)` from coarse to fine.
    pub fn levels(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.details.iter().enumerate().map(move |(i, d)| (self.coarse_level + i, d.as_slice()))
    }

    pub fn coefficient_count(&self) -> usize {
        self.approx.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn energy(&self) -> f64 {
        self.approx.iter().chain(self.details.iter().flatten()).map(|c| c * c).sum()
    }

    /// A pyramid of zeros with the given shape.
    pub fn zeros(coarse_level: usize, max_level: usize) -> Self {
        Self {
            coarse_level,
            max_level,
            approx: vec![0.0; 1 << coarse_level],
            details: (coarse_level..max_level).map(|j| vec![0.0; 1 << j]).collect(),
            thresholded: false,
        }
    }
}

/// `log2(n)` when `n` is an exact power of two.
pub fn dyadic_level(n: usize) -> Option<usize> {
    (n > 0 && n.is_power_of_two()).then(|| n.trailing_zeros() as usize)
}

#[inline]
fn wrap(i: isize, len: usize) -> usize {
    i.rem_euclid(len as isize) as usize
}

/// Periodic pyramid decomposition of a signal of length `2^J` down to level `j0`.
pub fn dwt(signal: &[f64], fp: &FilterPair, coarse_level: usize) -> Result<CoefficientPyramid> {
    let max_level = dyadic_level(signal.len()).ok_or(Error::NotDyadic(signal.len()))?;
    if coarse_level >= max_level {
        return Err(Error::InvalidLevel { coarse: coarse_level, max: max_level });
    }
    let h = fp.h();
    let g = fp.g();
    let g_offset = fp.g_offset();
    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(max_level - coarse_level);
    for level in (coarse_level..max_level).rev() {
        let len = 2usize << level;
        let half = len / 2;
        let mut a = vec![0.0; half];
        let mut d = vec![0.0; half];
        for k in 0..half {
            let base = 2 * k as isize;
            a[k] = h.iter().enumerate().map(|(m, hm)| hm * approx[wrap(base + m as isize, len)]).sum();
            d[k] = g.iter().enumerate().map(|(i, gi)| gi * approx[wrap(base + i as isize + g_offset, len)]).sum();
        }
        approx = a;
        details.push(d);
    }
    details.reverse();
    Ok(CoefficientPyramid { coarse_level, max_level, approx, details, thresholded: false })
}

/// Inverse of [`dwt`]: synthesis with the transposed periodic filter bank.
pub fn idwt(pyramid: &CoefficientPyramid, fp: &FilterPair) -> Result<Vec<f64>> {
    pyramid.validate()?;
    let h = fp.h();
    let g = fp.g();
    let g_offset = fp.g_offset();
    let mut approx = pyramid.approx.clone();
    for (level, d) in pyramid.levels() {
        let len = 2usize << level;
        let mut out = vec![0.0; len];
        for k in 0..(len / 2) {
            let base = 2 * k as isize;
            let (ak, dk) = (approx[k], d[k]);
            for (m, hm) in h.iter().enumerate() {
                out[wrap(base + m as isize, len)] += hm * ak;
            }
            for (i, gi) in g.iter().enumerate() {
                out[wrap(base + i as isize + g_offset, len)] += gi * dk;
            }
        }
        approx = out;
    }
    Ok(approx)
}
