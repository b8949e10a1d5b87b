use crate::error::{invalid, Result};
use crate::grid::Cell;
use crate::scalar::Real;

use super::{connected_by, dilate_mask, ProbabilityMap, RegionMask};

/// Descending threshold sweep `td_start, td_start - td_step, ..., >= td_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPolicy<T> {
    pub td_start: T,
    pub td_step: T,
    pub td_min: T,
}

impl<T: Real> Default for ThresholdPolicy<T> {
    fn default() -> Self {
        ThresholdPolicy {
            td_start: T::lit(0.95),
            td_step: T::lit(0.05),
            td_min: T::lit(0.05),
        }
    }
}

impl<T: Real> ThresholdPolicy<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.td_min > T::zero() && self.td_min <= self.td_start && self.td_start <= T::one()) {
            return Err(invalid(
                "threshold policy needs 0 < td_min <= td_start <= 1",
            ));
        }
        if !(self.td_step > T::zero()) {
            return Err(invalid("td_step must be positive"));
        }
        Ok(())
    }
}

/// Threshold values visited by the sweep, highest first.
///
/// Values are snapped to a 1e-9 grid so that e.g. `0.95 - 3 * 0.05` is exactly
/// the same float as a probability written as `0.8`.
pub fn td_grid<T: Real>(policy: &ThresholdPolicy<T>) -> Vec<T> {
    let start = policy.td_start.as_f64();
    let step = policy.td_step.as_f64();
    let min = policy.td_min.as_f64();
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let td = ((start - k as f64 * step) * 1e9).round() / 1e9;
        if td < min - 1e-12 {
            break;
        }
        out.push(T::lit(td));
        k += 1;
    }
    out
}

/// Result of the adaptive threshold search.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionSelection<T> {
    /// Highest threshold whose region connects start and goal.
    Threshold { td: T, mask: RegionMask },
    /// No threshold connected the endpoints; the whole map is used.
    Fallback { mask: RegionMask },
}

impl<T: Real> RegionSelection<T> {
    pub fn mask(&self) -> &RegionMask {
        match self {
            RegionSelection::Threshold { mask, .. } | RegionSelection::Fallback { mask } => mask,
        }
    }

    pub fn into_mask(self) -> RegionMask {
        match self {
            RegionSelection::Threshold { mask, .. } | RegionSelection::Fallback { mask } => mask,
        }
    }

    pub fn td(&self) -> Option<T> {
        match self {
            RegionSelection::Threshold { td, .. } => Some(*td),
            RegionSelection::Fallback { .. } => None,
        }
    }

    pub fn is_fallback(&self) -> bool {
        matches!(self, RegionSelection::Fallback { .. })
    }

    /// Grows a thresholded mask by `radius` cells; the fallback is already full.
    pub fn dilated(self, radius: usize) -> Self {
        match self {
            RegionSelection::Threshold { td, mask } => RegionSelection::Threshold {
                td,
                mask: dilate_mask(&mask, radius),
            },
            fallback => fallback,
        }
    }
}

/// Lowers the threshold until `start` and `goal` are 8-connected in the
/// region `{p >= td} + {start, goal}`.
pub fn adaptive_threshold<T: Real>(
    prob: &ProbabilityMap<T>,
    start: Cell,
    goal: Cell,
    policy: &ThresholdPolicy<T>,
) -> Result<RegionSelection<T>> {
    policy.validate()?;
    let dims = prob.dims();
    if !dims.contains(start) || !dims.contains(goal) {
        return Err(invalid(format!(
            "start {start} or goal {goal} out of bounds"
        )));
    }
    let (s, g) = (dims.index(start), dims.index(goal));
    let probs = prob.raster().as_slice();
    for td in td_grid(policy) {
        let inside = |i: usize| i == s || i == g || probs[i] >= td;
        if connected_by(dims, start, goal, inside) {
            let mut mask = RegionMask {
                dims,
                bits: probs.iter().map(|p| *p >= td).collect(),
            };
            mask.bits[s] = true;
            mask.bits[g] = true;
            return Ok(RegionSelection::Threshold { td, mask });
        }
    }
    Ok(RegionSelection::Fallback {
        mask: RegionMask::full(dims.width, dims.height),
    })
}
