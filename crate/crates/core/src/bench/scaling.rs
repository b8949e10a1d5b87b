use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};
use crate::grid::Cell;
use crate::scalar::Real;
use crate::search::{astar_plan, GraphMode, PlannerConfig};
use crate::terrain::CostMap;

use super::median;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub size: usize,
    pub graphing_time: f64,
    pub search_time: f64,
    /// `graphing / (graphing + search)`.
    pub ratio: f64,
    pub length: f64,
    pub graph_nodes: usize,
    pub start: Cell,
    pub goal: Cell,
}

impl ScalingRow {
    pub const CSV_HEADER: &'static str = "size,graphing_time,search_time,ratio,length,graph_nodes";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.size,
            self.graphing_time,
            self.search_time,
            self.ratio,
            self.length,
            self.graph_nodes
        )
    }
}

/// Nearest cell (BFS order) with cost below `threshold`.
pub fn snap_to_free<T: Real>(costmap: &CostMap<T>, cell: Cell, threshold: T) -> Option<Cell> {
    let dims = costmap.dims();
    if !dims.contains(cell) {
        return None;
    }
    let mut seen = vec![false; dims.len()];
    let mut queue = VecDeque::from([cell]);
    seen[dims.index(cell)] = true;
    while let Some(c) = queue.pop_front() {
        if costmap.cost(c) < threshold {
            return Some(c);
        }
        for n in dims.neighbors8(c) {
            let i = dims.index(n);
            if !seen[i] {
                seen[i] = true;
                queue.push_back(n);
            }
        }
    }
    None
}

fn frac_cell(size: usize, f: (f64, f64)) -> Cell {
    let at = |v: f64| ((v * (size - 1) as f64).round() as usize).min(size - 1);
    Cell::new(at(f.0), at(f.1))
}

/// Prebuilt-mode planning on average-pooled copies of `base`. Endpoints sit at
/// the same fractional positions on every size, snapped to a free cell.
/// Times are medians over `trials` runs after one warm-up.
pub fn bench_scaling<T: Real>(
    base: &CostMap<T>,
    sizes: &[usize],
    start_frac: (f64, f64),
    goal_frac: (f64, f64),
    omega: T,
    trials: usize,
) -> Result<Vec<ScalingRow>> {
    if base.width() != base.height() {
        return Err(invalid("scaling bench needs a square base map"));
    }
    let cfg = PlannerConfig::with_omega(omega).with_mode(GraphMode::Prebuilt);
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size == 0 || !base.width().is_multiple_of(size) {
            return Err(invalid(format!(
                "size {size} does not divide base size {}",
                base.width()
            )));
        }
        let map = base.downsample(base.width() / size)?;
        let snap = |f| {
            snap_to_free(&map, frac_cell(size, f), cfg.obstacle_threshold)
                .ok_or_else(|| invalid(format!("no free cell at size {size}")))
        };
        let (start, goal) = (snap(start_frac)?, snap(goal_frac)?);
        astar_plan(&map, start, goal, &cfg, None)?;
        let mut graphing = Vec::with_capacity(trials);
        let mut search = Vec::with_capacity(trials);
        let mut last = None;
        for _ in 0..trials.max(1) {
            let out = astar_plan(&map, start, goal, &cfg, None)?;
            graphing.push(out.telemetry.graphing_time);
            search.push(out.telemetry.search_time);
            last = Some(out);
        }
        let out = last.ok_or(Error::InvalidInput("no trials".into()))?;
        let (g, s) = (median(&mut graphing), median(&mut search));
        rows.push(ScalingRow {
            size,
            graphing_time: g,
            search_time: s,
            ratio: g / (g + s),
            length: out.stats.length.to_f64().unwrap_or(f64::NAN),
            graph_nodes: out.telemetry.graph_nodes,
            start,
            goal,
        });
    }
    Ok(rows)
}
