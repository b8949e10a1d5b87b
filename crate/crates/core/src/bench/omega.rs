use std::time::Instant;

use crate::error::{invalid, Result};
use crate::grid::Cell;
use crate::scalar::Real;
use crate::search::{astar_plan, PlannerConfig};
use crate::terrain::CostMap;

/// `0, 0.005, ..., 0.2`.
pub fn default_omega_grid<T: Real>() -> Vec<T> {
    (0..=40).map(|i| T::lit(i as f64 * 0.005)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSweep<T> {
    pub omegas: Vec<T>,
    pub lengths: Vec<T>,
    pub ccs: Vec<T>,
    pub t_sns: Vec<T>,
    pub len_norm: Vec<T>,
    pub cc_norm: Vec<T>,
    /// Planning seconds per omega.
    pub times: Vec<f64>,
    pub omega_star: T,
}

impl<T: Real> OmegaSweep<T> {
    pub const CSV_HEADER: &'static str = "omega,length,cc,t_sn,len_norm,cc_norm,time";

    pub fn csv_rows(&self) -> Vec<String> {
        (0..self.omegas.len())
            .map(|i| {
                format!(
                    "{},{},{},{},{},{},{}",
                    self.omegas[i],
                    self.lengths[i],
                    self.ccs[i],
                    self.t_sns[i],
                    self.len_norm[i],
                    self.cc_norm[i],
                    self.times[i]
                )
            })
            .collect()
    }

    pub fn star_index(&self) -> usize {
        self.omegas
            .iter()
            .position(|w| *w == self.omega_star)
            .expect("omega_star is drawn from the grid")
    }

    /// True when the minimum sits strictly inside the grid.
    pub fn star_is_interior(&self) -> bool {
        let i = self.star_index();
        i > 0 && i + 1 < self.omegas.len()
    }
}

fn min_max_norm<T: Real>(xs: &[T]) -> Vec<T> {
    let lo = xs.iter().copied().fold(T::infinity(), T::min);
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let span = hi - lo;
    xs.iter()
        .map(|x| {
            if span > T::zero() {
                (*x - lo) / span
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Plans once per omega and locates the knee of the length/cost trade-off.
/// Ties in `len_norm + cc_norm` go to the smallest omega.
pub fn sweep_omega<T: Real>(
    costmap: &CostMap<T>,
    start: Cell,
    goal: Cell,
    omegas: &[T],
    base: &PlannerConfig<T>,
) -> Result<OmegaSweep<T>> {
    if omegas.len() < 3 || !omegas.iter().any(|w| *w == T::zero()) {
        return Err(invalid("omega grid needs at least 3 values including 0"));
    }
    let mut lengths = Vec::with_capacity(omegas.len());
    let mut ccs = Vec::with_capacity(omegas.len());
    let mut t_sns = Vec::with_capacity(omegas.len());
    let mut times = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let cfg = PlannerConfig { omega, ..*base };
        let t = Instant::now();
        let out = astar_plan(costmap, start, goal, &cfg, None)?;
        times.push(t.elapsed().as_secs_f64());
        lengths.push(out.stats.length);
        ccs.push(out.stats.cc);
        t_sns.push(out.stats.t_sn);
    }
    let len_norm = min_max_norm(&lengths);
    let cc_norm = min_max_norm(&ccs);
    let mut best = 0;
    for i in 1..omegas.len() {
        let (s, b) = (len_norm[i] + cc_norm[i], len_norm[best] + cc_norm[best]);
        if s < b || (s == b && omegas[i] < omegas[best]) {
            best = i;
        }
    }
    Ok(OmegaSweep {
        omegas: omegas.to_vec(),
        lengths,
        ccs,
        t_sns,
        len_norm,
        cc_norm,
        times,
        omega_star: omegas[best],
    })
}
