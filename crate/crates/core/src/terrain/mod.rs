//! Elevation rasters and the slope/roughness/step traversability model.

mod plane;
mod synth;

pub use plane::{fit_patch_plane, PatchFit, PATCH_OFFSETS};
pub use synth::synth_terrain;

use crate::error::{invalid, Result};
use crate::grid::{Cell, Dims, Raster};
use crate::scalar::Real;

/// Height raster in metres with a square cell of `cell_size` metres.
#[derive(Debug, Clone, PartialEq)]
pub struct Dem<T> {
    heights: Raster<T>,
    cell_size: T,
}

impl<T: Real> Dem<T> {
    pub fn new(width: usize, height: usize, cell_size: T, heights: Vec<T>) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(invalid(format!(
                "DEM must be at least 3x3, got {width}x{height}"
            )));
        }
        if !(cell_size > T::zero()) || !cell_size.is_finite() {
            return Err(invalid("cell size must be positive and finite"));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(invalid("DEM heights must be finite"));
        }
        let heights = Raster::from_vec(width, height, heights).ok_or_else(|| {
            invalid(format!(
                "expected {} heights for {width}x{height}",
                width * height
            ))
        })?;
        Ok(Dem { heights, cell_size })
    }

    pub fn flat(width: usize, height: usize, cell_size: T, level: T) -> Result<Self> {
        Self::new(width, height, cell_size, vec![level; width * height])
    }

    pub fn width(&self) -> usize {
        self.heights.width()
    }

    pub fn height(&self) -> usize {
        self.heights.height()
    }

    pub fn dims(&self) -> Dims {
        self.heights.dims()
    }

    pub fn cell_size(&self) -> T {
        self.cell_size
    }

    pub fn heights(&self) -> &Raster<T> {
        &self.heights
    }

    pub fn elevation(&self, c: Cell) -> T {
        self.heights.get(c)
    }
}

/// Vehicle limits and weights of the traversability model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainParams<T> {
    /// Maximum safe slope, degrees.
    pub max_slope_deg: T,
    /// Maximum obstacle height, metres.
    pub max_step: T,
    /// Maximum roughness.
    pub max_roughness: T,
    pub slope_weight: T,
    pub roughness_weight: T,
    pub step_weight: T,
}

impl<T: Real> Default for TerrainParams<T> {
    fn default() -> Self {
        TerrainParams {
            max_slope_deg: T::lit(30.0),
            max_step: T::lit(0.2),
            max_roughness: T::lit(0.6),
            slope_weight: T::lit(0.6),
            roughness_weight: T::lit(0.2),
            step_weight: T::lit(0.2),
        }
    }
}

impl<T: Real> TerrainParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.max_slope_deg, self.max_step, self.max_roughness];
        if positive.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(invalid("terrain limits must be strictly positive"));
        }
        let weights = [self.slope_weight, self.roughness_weight, self.step_weight];
        if weights.iter().any(|w| *w < T::zero() || !w.is_finite()) {
            return Err(invalid("terrain weights must be non-negative"));
        }
        let sum = self.slope_weight + self.roughness_weight + self.step_weight;
        if (sum - T::one()).abs() > T::lit(1e-6) {
            return Err(invalid(format!("terrain weights must sum to 1, got {sum}")));
        }
        Ok(())
    }

    /// Traversability cost of a cell with the given features.
    ///
    /// Any ratio at or above its limit marks the cell untraversable (cost 1).
    pub fn cost_of(&self, f: &CellFeatures<T>) -> T {
        let ratios = [
            f.slope_deg / self.max_slope_deg,
            f.roughness / self.max_roughness,
            f.elev_diff / self.max_step,
        ];
        if ratios.iter().any(|r| *r >= T::one()) {
            return T::one();
        }
        let weights = [self.slope_weight, self.roughness_weight, self.step_weight];
        let sum = ratios.iter().zip(weights).fold(T::zero(), |acc, (r, w)| {
            acc + w * r.max(T::zero()).min(T::one())
        });
        sum.max(T::zero()).min(T::one())
    }
}

/// Geometric features of one cell's 3x3 patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellFeatures<T> {
    /// Tilt of the fitted plane from horizontal, degrees.
    pub slope_deg: T,
    /// RMS of the plane-fit residuals.
    pub roughness: T,
    /// Largest absolute deviation of a patch point from the fitted plane.
    pub elev_diff: T,
}

pub fn compute_cell_features<T: Real>(dem: &Dem<T>, cell: Cell) -> CellFeatures<T> {
    let fit = fit_patch_plane(dem, cell);
    let n = T::lit(fit.residuals.len() as f64);
    let sq: T = fit.residuals.iter().map(|r| *r * *r).sum();
    let elev_diff = fit
        .residuals
        .iter()
        .fold(T::zero(), |acc, r| acc.max(r.abs()));
    CellFeatures {
        slope_deg: fit.slope_deg(),
        roughness: (sq / n).sqrt(),
        elev_diff,
    }
}

pub fn compute_cost_map<T: Real>(dem: &Dem<T>, params: &TerrainParams<T>) -> Result<CostMap<T>> {
    params.validate()?;
    let costs = Raster::from_fn(dem.width(), dem.height(), |c| {
        params.cost_of(&compute_cell_features(dem, c))
    });
    Ok(CostMap { costs })
}

/// Per-cell traversability cost in `[0, 1]`; 1 is untraversable.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMap<T> {
    costs: Raster<T>,
}

impl<T: Real> CostMap<T> {
    pub fn new(width: usize, height: usize, costs: Vec<T>) -> Result<Self> {
        let costs = Raster::from_vec(width, height, costs)
            .ok_or_else(|| invalid(format!("expected {} costs", width * height)))?;
        Self::from_raster(costs)
    }

    pub fn from_raster(costs: Raster<T>) -> Result<Self> {
        if costs.dims().is_empty() {
            return Err(invalid("cost map must be non-empty"));
        }
        if let Some(bad) = costs
            .as_slice()
            .iter()
            .find(|v| !(**v >= T::zero() && **v <= T::one()))
        {
            return Err(invalid(format!("cost {bad} outside [0, 1]")));
        }
        Ok(CostMap { costs })
    }

    pub fn uniform(width: usize, height: usize, cost: T) -> Result<Self> {
        Self::from_raster(Raster::filled(width, height, cost))
    }

    pub fn width(&self) -> usize {
        self.costs.width()
    }

    pub fn height(&self) -> usize {
        self.costs.height()
    }

    pub fn dims(&self) -> Dims {
        self.costs.dims()
    }

    #[inline]
    pub fn cost(&self, c: Cell) -> T {
        self.costs.get(c)
    }

    #[inline]
    pub(crate) fn cost_at(&self, idx: usize) -> T {
        self.costs.as_slice()[idx]
    }

    /// Overwrites one cell, clamping into `[0, 1]`.
    pub fn set_cost(&mut self, c: Cell, cost: T) {
        self.costs.set(c, cost.max(T::zero()).min(T::one()));
    }

    pub fn raster(&self) -> &Raster<T> {
        &self.costs
    }

    /// Fraction of cells whose cost is exactly 1.
    pub fn obstacle_fraction(&self) -> f64 {
        let n = self
            .costs
            .as_slice()
            .iter()
            .filter(|c| **c >= T::one())
            .count();
        n as f64 / self.dims().len() as f64
    }

    /// Average-pools `factor x factor` blocks into a smaller map.
    pub fn downsample(&self, factor: usize) -> Result<Self> {
        if factor == 0
            || !self.width().is_multiple_of(factor)
            || !self.height().is_multiple_of(factor)
        {
            return Err(invalid(format!(
                "factor {factor} does not divide {}x{}",
                self.width(),
                self.height()
            )));
        }
        let (w, h) = (self.width() / factor, self.height() / factor);
        let norm = T::lit((factor * factor) as f64);
        let costs = Raster::from_fn(w, h, |c| {
            let mut acc = T::zero();
            for dy in 0..factor {
                for dx in 0..factor {
                    acc = acc + self.cost(Cell::new(c.x * factor + dx, c.y * factor + dy));
                }
            }
            (acc / norm).min(T::one())
        });
        Self::from_raster(costs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feats(slope: f64, rough: f64, step: f64) -> CellFeatures<f64> {
        CellFeatures {
            slope_deg: slope,
            roughness: rough,
            elev_diff: step,
        }
    }

    #[test]
    fn saturated_features_are_untraversable() {
        let p = TerrainParams::<f64>::default();
        assert_eq!(p.cost_of(&feats(30.0, 0.6, 0.2)), 1.0);
        assert_eq!(p.cost_of(&feats(30.0, 0.0, 0.0)), 1.0);
        assert_eq!(p.cost_of(&feats(0.0, 0.0, 0.25)), 1.0);
    }

    #[test]
    fn single_slope_term() {
        let p = TerrainParams::<f64>::default();
        assert!((p.cost_of(&feats(15.0, 0.0, 0.0)) - 0.30).abs() < 1e-15);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let p = TerrainParams::<f64> {
            slope_weight: 0.5,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = TerrainParams::<f64> {
            max_step: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn dem_rejects_small_or_nonfinite() {
        assert!(Dem::<f64>::flat(2, 5, 1.0, 0.0).is_err());
        let mut h = vec![0.0; 9];
        h[4] = f64::NAN;
        assert!(Dem::new(3, 3, 1.0, h).is_err());
        assert!(Dem::new(3, 3, 0.0, vec![0.0; 9]).is_err());
    }

    #[test]
    fn flat_dem_costs_zero() {
        let dem = Dem::<f64>::flat(8, 6, 1.0, 5.0).unwrap();
        let cm = compute_cost_map(&dem, &TerrainParams::default()).unwrap();
        assert!(cm.raster().as_slice().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn flat_dem_features_zero() {
        let dem = Dem::<f32>::flat(5, 5, 0.5, 5.0).unwrap();
        let f = compute_cell_features(&dem, Cell::new(2, 2));
        assert_eq!((f.slope_deg, f.roughness, f.elev_diff), (0.0, 0.0, 0.0));
    }

    #[test]
    fn ramp_slope_is_thirty_degrees() {
        let t = 30f64.to_radians().tan();
        let dem = Dem::new(7, 7, 1.0, (0..49).map(|i| (i % 7) as f64 * t).collect()).unwrap();
        // interior and border (edge replication flattens the border patch)
        let f = compute_cell_features(&dem, Cell::new(3, 3));
        assert!((f.slope_deg - 30.0).abs() < 1e-6);
        assert!(f.roughness < 1e-12 && f.elev_diff < 1e-12);
        let f_edge = compute_cell_features(&dem, Cell::new(3, 0));
        assert!((f_edge.slope_deg - 30.0).abs() < 1e-6);
    }

    #[test]
    fn cost_map_rejects_out_of_range() {
        assert!(CostMap::new(2, 2, vec![0.0, 0.5, 1.2, 0.0]).is_err());
        assert!(CostMap::new(2, 2, vec![0.0, 0.5, f64::NAN, 0.0]).is_err());
        assert!(CostMap::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn downsample_averages_blocks() {
        let cm = CostMap::new(2, 2, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(cm.downsample(2).unwrap().cost(Cell::new(0, 0)), 0.5);
        assert!(cm.downsample(3).is_err());
    }
}
