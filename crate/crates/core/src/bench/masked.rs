use std::time::Instant;

use crate::dataset::{LoadedSample, Sample};
use crate::error::Result;
use crate::grid::Cell;
use crate::region::{model_metric, RegionSelection, ThresholdPolicy};
use crate::scalar::Real;
use crate::search::{astar_plan, GridPath, PlanOutcome, PlannerConfig};
use crate::terrain::CostMap;

use super::{opt, time_median, BenchRow, Method, RegionSource};

/// One planning query of a masked-vs-full comparison.
#[derive(Debug, Clone)]
pub struct BenchCase<T> {
    pub name: String,
    pub cost: CostMap<T>,
    pub start: Cell,
    pub goal: Cell,
    /// Reference path for MM; the full plan is used when absent.
    pub label: Option<GridPath>,
}

impl<T: Real> From<Sample<T>> for BenchCase<T> {
    fn from(s: Sample<T>) -> Self {
        BenchCase {
            name: format!("sample_{:05}", s.meta.index),
            cost: s.cost,
            start: s.meta.start,
            goal: s.meta.goal,
            label: Some(s.label),
        }
    }
}

impl<T: Real> From<LoadedSample<T>> for BenchCase<T> {
    fn from(s: LoadedSample<T>) -> Self {
        BenchCase {
            name: s.name,
            cost: s.cost,
            start: s.start,
            goal: s.goal,
            label: Some(s.label),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskedRow {
    pub name: String,
    pub size: usize,
    pub full_at: f64,
    pub masked_at: f64,
    pub full_cc: f64,
    pub full_weighted: f64,
    pub masked_cc: Option<f64>,
    pub masked_weighted: Option<f64>,
    /// `100 * (masked - full) / full` on the weighted objective.
    pub cost_excess_pct: Option<f64>,
    pub cc_excess_pct: Option<f64>,
    pub success: bool,
    pub mm: Option<f64>,
    pub mask_area: usize,
    pub td: Option<f64>,
    pub fallback: bool,
    pub failure: Option<String>,
}

impl MaskedRow {
    pub const CSV_HEADER: &'static str =
        "name,size,full_at,masked_at,full_cc,masked_cc,cc_excess_pct,\
full_weighted,masked_weighted,cost_excess_pct,success,mm,mask_area,td,fallback,failure";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.name,
            self.size,
            self.full_at,
            self.masked_at,
            self.full_cc,
            opt(self.masked_cc),
            opt(self.cc_excess_pct),
            self.full_weighted,
            opt(self.masked_weighted),
            opt(self.cost_excess_pct),
            self.success,
            opt(self.mm),
            self.mask_area,
            opt(self.td),
            self.fallback,
            self.failure.as_deref().unwrap_or("")
        )
    }

    pub fn area_fraction(&self) -> f64 {
        self.mask_area as f64 / (self.size * self.size) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaskedReport {
    pub rows: Vec<MaskedRow>,
}

impl MaskedReport {
    /// Total full time over total masked time, successful pairs only.
    pub fn speedup(&self) -> f64 {
        let ok = self.rows.iter().filter(|r| r.success);
        let (f, m) = ok.fold((0.0, 0.0), |(f, m), r| (f + r.full_at, m + r.masked_at));
        f / m
    }

    pub fn success_rate(&self) -> f64 {
        self.rows.iter().filter(|r| r.success).count() as f64 / self.rows.len().max(1) as f64
    }

    pub fn mean_cc_excess_pct(&self) -> f64 {
        mean(self.rows.iter().filter_map(|r| r.cc_excess_pct))
    }

    pub fn mean_cost_excess_pct(&self) -> f64 {
        mean(self.rows.iter().filter_map(|r| r.cost_excess_pct))
    }

    pub fn mean_mm(&self) -> f64 {
        mean(self.rows.iter().filter_map(|r| r.mm))
    }

    pub fn mean_area_fraction(&self) -> f64 {
        mean(self.rows.iter().map(|r| r.area_fraction()))
    }

    /// Two rows per pair, tagged `Astar` and `AstarNN`.
    pub fn bench_rows(&self) -> Vec<BenchRow> {
        let mut out = Vec::with_capacity(self.rows.len() * 2);
        for r in &self.rows {
            out.push(BenchRow {
                name: r.name.clone(),
                size: r.size,
                method: Method::Astar,
                at: r.full_at,
                cc: Some(r.full_cc),
                weighted_cost: Some(r.full_weighted),
                success: true,
                mm: None,
                graphing_time: 0.0,
                search_time: 0.0,
                expansions: 0,
            });
            out.push(BenchRow {
                name: r.name.clone(),
                size: r.size,
                method: Method::AstarNN,
                at: r.masked_at,
                cc: r.masked_cc,
                weighted_cost: r.masked_weighted,
                success: r.success,
                mm: r.mm,
                graphing_time: 0.0,
                search_time: 0.0,
                expansions: 0,
            });
        }
        out
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn f<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Paired full vs region-guided planning on identical queries. The masked
/// time covers threshold selection plus the restricted search; producing the
/// probability map is not timed. A full-plan failure aborts the bench.
pub fn bench_masked_vs_full<T: Real>(
    cases: &[BenchCase<T>],
    source: &RegionSource,
    policy: &ThresholdPolicy<T>,
    cfg: &PlannerConfig<T>,
    trials: usize,
) -> Result<MaskedReport> {
    let mut report = MaskedReport::default();
    for case in cases {
        let (full_at, full) = time_median(trials, || {
            astar_plan(&case.cost, case.start, case.goal, cfg, None)
        })?;
        let prob = source.probability_map(&case.name, &case.cost, case.start, case.goal, cfg)?;
        let run = || -> Result<(RegionSelection<T>, PlanOutcome<T>)> {
            let sel = prob.select(case.start, case.goal, policy)?;
            let out = astar_plan(&case.cost, case.start, case.goal, cfg, Some(sel.mask()))?;
            Ok((sel, out))
        };
        let label = case.label.as_ref().unwrap_or(&full.path);
        let (full_cc, full_w) = (f(full.stats.cc), f(full.stats.weighted_cost));
        let row = match time_median(trials, run) {
            Ok((masked_at, (sel, out))) => {
                let (cc, w) = (f(out.stats.cc), f(out.stats.weighted_cost));
                MaskedRow {
                    name: case.name.clone(),
                    size: case.cost.width(),
                    full_at,
                    masked_at,
                    full_cc,
                    full_weighted: full_w,
                    masked_cc: Some(cc),
                    masked_weighted: Some(w),
                    cost_excess_pct: Some(100.0 * (w - full_w) / full_w),
                    cc_excess_pct: (full_cc > 0.0).then(|| 100.0 * (cc - full_cc) / full_cc),
                    success: true,
                    mm: model_metric::<f64>(label, sel.mask()).ok(),
                    mask_area: sel.mask().area(),
                    td: sel.td().map(f),
                    fallback: sel.is_fallback(),
                    failure: None,
                }
            }
            Err(e) => {
                let t = Instant::now();
                let sel = prob.select(case.start, case.goal, policy)?;
                let _ = astar_plan(&case.cost, case.start, case.goal, cfg, Some(sel.mask()));
                MaskedRow {
                    name: case.name.clone(),
                    size: case.cost.width(),
                    full_at,
                    masked_at: t.elapsed().as_secs_f64(),
                    full_cc,
                    full_weighted: full_w,
                    masked_cc: None,
                    masked_weighted: None,
                    cost_excess_pct: None,
                    cc_excess_pct: None,
                    success: false,
                    mm: model_metric::<f64>(label, sel.mask()).ok(),
                    mask_area: sel.mask().area(),
                    td: sel.td().map(f),
                    fallback: sel.is_fallback(),
                    failure: Some(e.to_string()),
                }
            }
        };
        report.rows.push(row);
    }
    Ok(report)
}
