use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

// Extremal-phase scaling filters, tabulated to 20 significant digits.
const DAUB2: [f64; 4] = [
    0.482_962_913_144_534_143_37,
    0.836_516_303_737_807_905_58,
    0.224_143_868_042_013_381_03,
    -0.129_409_522_551_260_381_17,
];
const DAUB3: [f64; 6] = [
    0.332_670_552_950_082_616,
    0.806_891_509_311_092_576_49,
    0.459_877_502_118_491_570_1,
    -0.135_011_020_010_254_588_7,
    -0.085_441_273_882_026_661_693,
    0.035_226_291_885_709_536_603,
];
const DAUB4: [f64; 8] = [
    0.230_377_813_308_896_500_86,
    0.714_846_570_552_915_647_09,
    0.630_880_767_929_858_907_88,
    -0.027_983_769_416_859_854_211,
    -0.187_034_811_719_093_084_08,
    0.030_841_381_835_560_763_627,
    0.032_883_011_666_885_199_735,
    -0.010_597_401_785_069_032_105,
];

/// Scale filter `h` and wavelet filter `g` of an orthonormal compactly
/// supported wavelet basis.
///
/// `h` has support `0..2N`. The wavelet filter follows the index-shifted
/// quadrature mirror relation `g_n = (-1)^n h_{1-n}`, so its support is
/// `2-2N..=1`; the stored slice starts at [`FilterPair::g_offset`].
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    h: Vec<f64>,
    g: Vec<f64>,
    g_offset: isize,
    vanishing_moments: usize,
}

impl FilterPair {
    /// Builds the pair from scale filter taps `h_0..h_{2N-1}`.
    pub fn from_scaling(h: Vec<f64>) -> Result<Self> {
        if h.len() < 2 || !h.len().is_multiple_of(2) {
            return Err(Error::InvalidFilter("scale filter must have a positive even length"));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFilter("scale filter taps must be finite"));
        }
        let len = h.len() as isize;
        let g_offset = 2 - len;
        let g = (0..len)
            .map(|i| {
                let n = i + g_offset;
                let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                sign * h[(1 - n) as usize]
            })
            .collect();
        Ok(Self { vanishing_moments: h.len() / 2, h, g, g_offset })
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Wavelet filter taps; entry `i` holds `g_{i + g_offset}`.
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn g_offset(&self) -> isize {
        self.g_offset
    }

    /// `h_n`, zero outside the support.
    pub fn h_at(&self, n: isize) -> f64 {
        if n < 0 {
            return 0.0;
        }
        self.h.get(n as usize).copied().unwrap_or(0.0)
    }

    /// `g_n`, zero outside the support.
    pub fn g_at(&self, n: isize) -> f64 {
        let i = n - self.g_offset;
        if i < 0 {
            return 0.0;
        }
        self.g.get(i as usize).copied().unwrap_or(0.0)
    }

    pub fn vanishing_moments(&self) -> usize {
        self.vanishing_moments
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// The Haar basis, `h_0 = h_1 = g_0 = -g_1 = √2/2`.
pub fn make_haar() -> FilterPair {
    FilterPair::from_scaling(alloc::vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).expect("haar taps are valid")
}

/// Extremal-phase Daubechies filter with `n` vanishing moments (`n = 1` is Haar).
pub fn make_daubechies(n: usize) -> Result<FilterPair> {
    let taps: &[f64] = match n {
        1 => return Ok(make_haar()),
        2 => &DAUB2,
        3 => &DAUB3,
        4 => &DAUB4,
        other => return Err(Error::UnsupportedWavelet(other)),
    };
    FilterPair::from_scaling(taps.to_vec())
}

/// Named wavelet basis, parsed from `haar` or `daubN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "alloc::string::String", into = "alloc::string::String"))]
pub enum Wavelet {
    Haar,
    Daubechies(usize),
}

impl Wavelet {
    pub fn filter(self) -> Result<FilterPair> {
        match self {
            Wavelet::Haar => Ok(make_haar()),
            Wavelet::Daubechies(n) => make_daubechies(n),
        }
    }
}

impl Default for Wavelet {
    fn default() -> Self {
        Wavelet::Daubechies(2)
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wavelet::Haar => f.write_str("haar"),
            Wavelet::Daubechies(n) => write!(f, "daub{n}"),
        }
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "haar" {
            return Ok(Wavelet::Haar);
        }
        let order = lower
            .strip_prefix("daub")
            .and_then(|rest| rest.parse::<usize>().ok())
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("unknown wavelet basis {s:?}")))?;
        if !(1..=4).contains(&order) {
            return Err(Error::UnsupportedWavelet(order));
        }
        Ok(Wavelet::Daubechies(order))
    }
}

impl TryFrom<alloc::string::String> for Wavelet {
    type Error = Error;

    fn try_from(s: alloc::string::String) -> Result<Self> {
        s.parse()
    }
}

impl From<Wavelet> for alloc::string::String {
    fn from(w: Wavelet) -> Self {
        alloc::format!("{w}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_filters() -> Vec<FilterPair> {
        (1..=4).map(|n| make_daubechies(n).unwrap()).collect()
    }

    #[test]
    fn haar_taps() {
        let fp = make_haar();
        let s = 2f64.sqrt() / 2.0;
        assert_eq!(fp.h(), &[s, s]);
        assert_eq!(fp.g_at(0), s);
        assert_eq!(fp.g_at(1), -s);
        assert!((fp.h().iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn daubechies2_closed_form() {
        let fp = make_daubechies(2).unwrap();
        let r3 = 3f64.sqrt();
        let d = 4.0 * 2f64.sqrt();
        let expected = [(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d];
        for (a, b) in fp.h().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        assert!((fp.h()[0] - 0.48296291).abs() < 1e-8);
        assert!((fp.h()[3] + 0.12940952).abs() < 1e-8);
    }

    #[test]
    fn order_one_is_haar() {
        assert_eq!(make_daubechies(1).unwrap(), make_haar());
    }

    #[test]
    fn unsupported_orders() {
        assert_eq!(make_daubechies(0), Err(Error::UnsupportedWavelet(0)));
        assert_eq!(make_daubechies(5), Err(Error::UnsupportedWavelet(5)));
    }

    #[test]
    fn qmf_relation_tap_by_tap() {
        for fp in all_filters() {
            let two_n = fp.len() as isize;
            for n in (2 - two_n)..=1 {
                let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                assert_eq!(fp.g_at(n), sign * fp.h_at(1 - n));
            }
            assert_eq!(fp.g_at(2), 0.0);
            assert_eq!(fp.g_at(1 - two_n), 0.0);
        }
    }

    #[test]
    fn normalization_and_moments() {
        for fp in all_filters() {
            let sum: f64 = fp.h().iter().sum();
            let energy: f64 = fp.h().iter().map(|v| v * v).sum();
            assert!((sum - 2f64.sqrt()).abs() < 1e-12);
            assert!((energy - 1.0).abs() < 1e-12);
            for k in 0..fp.vanishing_moments() as i32 {
                let m: f64 = fp
                    .h()
                    .iter()
                    .enumerate()
                    .map(|(n, h)| {
                        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                        (n as f64).powi(k) * sign * h
                    })
                    .sum();
                assert!(m.abs() < 1e-10, "N={} k={k}: {m}", fp.vanishing_moments());
            }
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("haar".parse::<Wavelet>().unwrap(), Wavelet::Haar);
        assert_eq!("Daub3".parse::<Wavelet>().unwrap(), Wavelet::Daubechies(3));
        assert!("daub9".parse::<Wavelet>().is_err());
        assert!("sym4".parse::<Wavelet>().is_err());
        assert_eq!(alloc::format!("{}", Wavelet::Daubechies(2)), "daub2");
    }
}
