//! Calibration sweeps, benchmarks and the dynamic-scenario simulator.

mod dynamic;
mod masked;
mod omega;
mod scaling;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::Cell;
use crate::io::{from_f32_raster, read_nnpr_file};
use crate::region::{
    adaptive_threshold, oracle_region, rescale_region, ProbabilityMap, RegionSelection,
    ThresholdPolicy,
};
use crate::scalar::Real;
use crate::search::{astar_plan, GraphMode, PlannerConfig};
use crate::terrain::CostMap;

pub use dynamic::{dynamic_sim, DynamicScenario, FrameRecord, ScriptedRect, SimConfig, SimReport};
pub use masked::{bench_masked_vs_full, BenchCase, MaskedReport, MaskedRow};
pub use omega::{default_omega_grid, sweep_omega, OmegaSweep};
pub use scaling::{bench_scaling, snap_to_free, ScalingRow};

/// Runs `f` once as warm-up, then `trials` timed runs; returns the median
/// wall time in seconds and the last result.
pub fn time_median<R>(trials: usize, mut f: impl FnMut() -> Result<R>) -> Result<(f64, R)> {
    f()?;
    let mut times = Vec::with_capacity(trials.max(1));
    let mut last = None;
    for _ in 0..trials.max(1) {
        let t = Instant::now();
        let r = f()?;
        times.push(t.elapsed().as_secs_f64());
        last = Some(r);
    }
    Ok((median(&mut times), last.expect("at least one trial")))
}

pub fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Astar,
    AstarNN,
    Dstar,
    DstarNN,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Astar,
        Method::AstarNN,
        Method::Dstar,
        Method::DstarNN,
    ];

    pub fn uses_region(self) -> bool {
        matches!(self, Method::AstarNN | Method::DstarNN)
    }

    pub fn incremental(self) -> bool {
        matches!(self, Method::Dstar | Method::DstarNN)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Astar => "Astar",
            Method::AstarNN => "AstarNN",
            Method::Dstar => "Dstar",
            Method::DstarNN => "DstarNN",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "astar" => Ok(Method::Astar),
            "astarnn" | "astar-nn" => Ok(Method::AstarNN),
            "dstar" => Ok(Method::Dstar),
            "dstarnn" | "dstar-nn" => Ok(Method::DstarNN),
            _ => Err(invalid(format!("unknown method {s:?}"))),
        }
    }
}

/// Where probability maps for the region-guided methods come from.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionSource {
    /// Corridor around the optimal path of the queried map.
    Oracle { radius: usize, blur_sigma: f64 },
    /// `<dir>/<name>.prob.nnpr`, first channel; rescaled when the size
    /// differs from the cost map by an integer factor.
    ModelFiles(PathBuf),
}

impl RegionSource {
    pub fn oracle() -> Self {
        RegionSource::Oracle {
            radius: 3,
            blur_sigma: 1.0,
        }
    }

    pub fn model_file_path(dir: &std::path::Path, name: &str) -> PathBuf {
        dir.join(format!("{name}.prob.nnpr"))
    }

    pub fn probability_map<T: Real>(
        &self,
        name: &str,
        costmap: &CostMap<T>,
        start: Cell,
        goal: Cell,
        cfg: &PlannerConfig<T>,
    ) -> Result<RegionProb<T>> {
        match self {
            RegionSource::Oracle { radius, blur_sigma } => {
                let cfg = PlannerConfig {
                    graph_mode: GraphMode::Lazy,
                    ..*cfg
                };
                let label = astar_plan(costmap, start, goal, &cfg, None)?.path;
                let prob = oracle_region(
                    &label,
                    costmap.width(),
                    costmap.height(),
                    *radius,
                    T::lit(*blur_sigma),
                )?;
                Ok(RegionProb::new(prob, false))
            }
            RegionSource::ModelFiles(dir) => {
                let path = Self::model_file_path(dir, name);
                if !path.exists() {
                    return Err(Error::RegionMissing(path.display().to_string()));
                }
                let chans = read_nnpr_file(&path)?;
                let first = chans
                    .first()
                    .ok_or_else(|| Error::Format(format!("{} has no channels", path.display())))?;
                let prob = ProbabilityMap::from_raster(from_f32_raster(first))?;
                RegionProb::fit(prob, costmap.width(), costmap.height())
            }
        }
    }
}

/// A probability map on the planning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionProb<T> {
    pub prob: ProbabilityMap<T>,
    /// Interpolated up from a coarser map; thresholded masks get one dilation step.
    pub upscaled: bool,
}

impl<T: Real> RegionProb<T> {
    pub fn new(prob: ProbabilityMap<T>, upscaled: bool) -> Self {
        RegionProb { prob, upscaled }
    }

    /// Rescales `prob` to `width x height` when needed.
    pub fn fit(prob: ProbabilityMap<T>, width: usize, height: usize) -> Result<Self> {
        if (prob.width(), prob.height()) == (width, height) {
            return Ok(RegionProb::new(prob, false));
        }
        let upscaled = width > prob.width();
        Ok(RegionProb::new(
            rescale_region(&prob, width, height)?,
            upscaled,
        ))
    }

    /// Adaptive threshold, plus the post-upscale dilation.
    pub fn select(
        &self,
        start: Cell,
        goal: Cell,
        policy: &ThresholdPolicy<T>,
    ) -> Result<RegionSelection<T>> {
        let sel = adaptive_threshold(&self.prob, start, goal, policy)?;
        Ok(if self.upscaled { sel.dilated(1) } else { sel })
    }
}

/// One benchmark run. `cc` and `mm` are absent when not applicable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub size: usize,
    pub method: Method,
    pub at: f64,
    pub cc: Option<f64>,
    pub weighted_cost: Option<f64>,
    pub success: bool,
    pub mm: Option<f64>,
    pub graphing_time: f64,
    pub search_time: f64,
    pub expansions: usize,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str =
        "name,size,method,at,cc,weighted_cost,success,mm,graphing_time,search_time,expansions";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.name,
            self.size,
            self.method,
            self.at,
            opt(self.cc),
            opt(self.weighted_cost),
            self.success,
            opt(self.mm),
            self.graphing_time,
            self.search_time,
            self.expansions
        )
    }
}

pub(crate) fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes a header line followed by one line per row.
pub fn write_csv<W: Write, I: IntoIterator<Item = String>>(
    mut w: W,
    header: &str,
    rows: I,
) -> Result<()> {
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}
