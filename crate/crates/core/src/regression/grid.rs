use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest grid resolution chosen automatically.
pub const MAX_RESOLUTION: usize = 12;

/// Observations moved onto the dyadic grid `t_k = (k + 1/2) 2^-J`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GriddedSample {
    pub resolution: usize,
    pub grid_t: Vec<f64>,
    pub grid_y: Vec<f64>,
    /// Observation that supplied each cell's value (its own or the fill donor).
    pub source_index: Vec<usize>,
    /// Whether the cell contained at least one observation.
    pub occupied: Vec<bool>,
    /// Fraction of cells that contained more than one observation.
    pub multiplicity_fraction: f64,
}

impl GriddedSample {
    pub fn len(&self) -> usize {
        self.grid_y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid_y.is_empty()
    }
}

/// Smallest `J` with `2^J >= n`, clamped to `[2, cap]`.
pub fn grid_resolution(n: usize, cap: usize) -> usize {
    let j = n.max(1).next_power_of_two().trailing_zeros() as usize;
    j.clamp(2, cap.max(2))
}

/// Index of the grid cell containing `x`; the last cell is closed on the right.
pub fn cell_of(x: f64, resolution: usize) -> usize {
    let cells = 1usize << resolution;
    let k = (x * cells as f64) as usize;
    k.min(cells - 1)
}

/// Maps sorted observations in `[0, 1]` onto `2^J` equispaced cells.
///
/// A cell takes the observation inside it nearest to its centre (ties go to
/// the lower index). Empty cells copy the nearest non-empty cell on their
/// left; leading empty cells copy the first non-empty cell.
pub fn map_to_grid(x: &[f64], y: &[f64], resolution: usize) -> Result<GriddedSample> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if !(1..=30).contains(&resolution) {
        return Err(Error::InvalidArgument(alloc::format!("grid resolution {resolution} out of range")));
    }
    for &v in x {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfUnitInterval(v));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if x.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Unsorted);
    }

    let cells = 1usize << resolution;
    let width = 1.0 / cells as f64;
    let grid_t: Vec<f64> = (0..cells).map(|k| (k as f64 + 0.5) * width).collect();
    let mut chosen: Vec<Option<usize>> = vec![None; cells];
    let mut counts = vec![0usize; cells];
    for (i, &xi) in x.iter().enumerate() {
        let k = cell_of(xi, resolution);
        counts[k] += 1;
        let better = match chosen[k] {
            None => true,
            Some(j) => (xi - grid_t[k]).abs() < (x[j] - grid_t[k]).abs(),
        };
        if better {
            chosen[k] = Some(i);
        }
    }

    let first = chosen.iter().flatten().next().copied().expect("at least one observation");
    let mut source_index = Vec::with_capacity(cells);
    let mut donor = first;
    for c in &chosen {
        if let Some(i) = c {
            donor = *i;
        }
        source_index.push(donor);
    }
    let grid_y = source_index.iter().map(|&i| y[i]).collect();
    let multi = counts.iter().filter(|&&c| c > 1).count();
    Ok(GriddedSample {
        resolution,
        grid_t,
        grid_y,
        source_index,
        occupied: chosen.iter().map(Option::is_some).collect(),
        multiplicity_fraction: multi as f64 / cells as f64,
    })
}
