//! Heuristic regions: probability maps, thresholded masks and their metrics.

mod adaptive;
mod oracle;
mod rescale;

pub use adaptive::{adaptive_threshold, td_grid, RegionSelection, ThresholdPolicy};
pub use oracle::oracle_region;
pub use rescale::{dilate_mask, rescale_region, upscale_mask};

use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};
use crate::grid::{Cell, Dims, Raster};
use crate::scalar::Real;
use crate::search::GridPath;

/// Per-cell likelihood in `[0, 1]` that the optimal path crosses the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap<T> {
    probs: Raster<T>,
}

impl<T: Real> ProbabilityMap<T> {
    pub fn new(width: usize, height: usize, probs: Vec<T>) -> Result<Self> {
        let probs = Raster::from_vec(width, height, probs)
            .ok_or_else(|| invalid(format!("expected {} probabilities", width * height)))?;
        Self::from_raster(probs)
    }

    pub fn from_raster(probs: Raster<T>) -> Result<Self> {
        if let Some(p) = probs
            .as_slice()
            .iter()
            .find(|p| !(**p >= T::zero() && **p <= T::one()))
        {
            return Err(invalid(format!("probability {p} outside [0, 1]")));
        }
        Ok(ProbabilityMap { probs })
    }

    pub fn uniform(width: usize, height: usize, p: T) -> Result<Self> {
        Self::from_raster(Raster::filled(width, height, p))
    }

    pub fn dims(&self) -> Dims {
        self.probs.dims()
    }

    pub fn width(&self) -> usize {
        self.probs.width()
    }

    pub fn height(&self) -> usize {
        self.probs.height()
    }

    #[inline]
    pub fn get(&self, c: Cell) -> T {
        self.probs.get(c)
    }

    pub fn raster(&self) -> &Raster<T> {
        &self.probs
    }
}

/// Binary region; `true` cells are inside the heuristic region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMask {
    dims: Dims,
    bits: Vec<bool>,
}

impl RegionMask {
    pub fn full(width: usize, height: usize) -> Self {
        RegionMask {
            dims: Dims::new(width, height),
            bits: vec![true; width * height],
        }
    }

    pub fn empty(width: usize, height: usize) -> Self {
        RegionMask {
            dims: Dims::new(width, height),
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(Cell) -> bool) -> Self {
        let dims = Dims::new(width, height);
        RegionMask {
            dims,
            bits: (0..dims.len()).map(|i| f(dims.cell(i))).collect(),
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(invalid("mask length does not match dimensions"));
        }
        Ok(RegionMask {
            dims: Dims::new(width, height),
            bits,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn get(&self, c: Cell) -> bool {
        self.bits[self.dims.index(c)]
    }

    #[inline]
    pub(crate) fn get_index(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    pub fn set(&mut self, c: Cell, v: bool) {
        let i = self.dims.index(c);
        self.bits[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of `true` cells.
    pub fn area(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_subset_of(&self, other: &RegionMask) -> bool {
        self.dims == other.dims && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    pub fn contains_path(&self, path: &GridPath) -> bool {
        path.cells
            .iter()
            .all(|c| self.dims.contains(*c) && self.get(*c))
    }

    /// Mask as a `0.0 / 1.0` raster.
    pub fn to_raster<T: Real>(&self) -> Raster<T> {
        Raster::from_vec(
            self.dims.width,
            self.dims.height,
            self.bits
                .iter()
                .map(|b| if *b { T::one() } else { T::zero() })
                .collect(),
        )
        .expect("mask dims")
    }

    /// Cells with value `>= 0.5` are inside.
    pub fn from_raster<T: Real>(r: &Raster<T>) -> Self {
        let half = T::lit(0.5);
        RegionMask {
            dims: r.dims(),
            bits: r.as_slice().iter().map(|v| *v >= half).collect(),
        }
    }
}

/// Cells with `p >= td`.
pub fn threshold_region<T: Real>(prob: &ProbabilityMap<T>, td: T) -> Result<RegionMask> {
    if !(td >= T::zero() && td <= T::one()) {
        return Err(invalid(format!("threshold {td} outside [0, 1]")));
    }
    Ok(RegionMask {
        dims: prob.dims(),
        bits: prob.raster().as_slice().iter().map(|p| *p >= td).collect(),
    })
}

/// True iff an 8-connected chain of mask cells joins `start` and `goal`.
pub fn region_connected(mask: &RegionMask, start: Cell, goal: Cell) -> Result<bool> {
    let dims = mask.dims();
    if !dims.contains(start) || !dims.contains(goal) {
        return Err(invalid(format!(
            "start {start} or goal {goal} out of bounds"
        )));
    }
    Ok(connected_by(dims, start, goal, |i| mask.bits[i]))
}

/// Breadth-first search over cells accepted by `inside`.
pub(crate) fn connected_by(
    dims: Dims,
    start: Cell,
    goal: Cell,
    inside: impl Fn(usize) -> bool,
) -> bool {
    let (s, g) = (dims.index(start), dims.index(goal));
    if !inside(s) || !inside(g) {
        return false;
    }
    if s == g {
        return true;
    }
    let mut seen = vec![false; dims.len()];
    let mut queue = VecDeque::new();
    seen[s] = true;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        for (v, _) in crate::search::neighbors_idx(dims, u) {
            if !seen[v] && inside(v) {
                if v == g {
                    return true;
                }
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    false
}

/// Label-path area over region area.
pub fn model_metric<T: Real>(label_path: &GridPath, mask: &RegionMask) -> Result<T> {
    let area = mask.area();
    if area == 0 {
        return Err(Error::EmptyMask);
    }
    let mut cells = label_path.cells.clone();
    cells.sort_unstable();
    cells.dedup();
    Ok(T::lit(cells.len() as f64) / T::lit(area as f64))
}

/// Summary of one adaptive-threshold region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionReport<T> {
    /// `None` when the fallback full mask was used.
    pub chosen_td: Option<T>,
    pub area: usize,
    pub mm: T,
}

impl<T: Real> RegionReport<T> {
    pub fn new(selection: &RegionSelection<T>, label_path: &GridPath) -> Result<Self> {
        Ok(RegionReport {
            chosen_td: selection.td(),
            area: selection.mask().area(),
            mm: model_metric(label_path, selection.mask())?,
        })
    }

    pub const CSV_HEADER: &'static str = "td,area,mm";

    /// `td,area,mm`; the fallback mask is written with an empty `td`.
    pub fn csv_row(&self) -> String {
        let td = self.chosen_td.map(|t| format!("{t}")).unwrap_or_default();
        format!("{td},{},{}", self.area, self.mm)
    }
}
