//! Weighted A* and D*-Lite over 8-connected cost grids.
//!
//! A move between neighbouring cells `a` and `b` costs
//! `euclid(a, b) + omega * (T_a + T_b)`, where `euclid` is 1 for cardinal and
//! sqrt(2) for diagonal moves. Cells at or above the obstacle threshold, and
//! cells outside an optional region mask, are not part of the graph. Diagonal
//! moves are allowed even when both flanking cardinal cells are obstacles.

mod astar;
mod dstar;
mod heap;

pub use astar::astar_plan;
pub use dstar::DStarLite;

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{invalid, Error, NoPathReason, Result};
use crate::grid::{Cell, Dims};
use crate::region::RegionMask;
use crate::scalar::Real;
use crate::terrain::CostMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphMode {
    /// Materialise every node and edge inside the active region before searching.
    Prebuilt,
    /// Generate neighbours on demand.
    #[default]
    Lazy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig<T> {
    /// Weight of the accumulated traversability cost.
    pub omega: T,
    /// Cells with cost at or above this value are obstacles.
    pub obstacle_threshold: T,
    pub graph_mode: GraphMode,
}

/// Default traversability weight.
pub const DEFAULT_OMEGA: f64 = 0.011;

impl<T: Real> Default for PlannerConfig<T> {
    fn default() -> Self {
        PlannerConfig {
            omega: T::lit(DEFAULT_OMEGA),
            obstacle_threshold: T::one(),
            graph_mode: GraphMode::Lazy,
        }
    }
}

impl<T: Real> PlannerConfig<T> {
    pub fn with_omega(omega: T) -> Self {
        PlannerConfig {
            omega,
            ..Default::default()
        }
    }

    pub fn with_mode(mut self, mode: GraphMode) -> Self {
        self.graph_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega >= T::zero()) || !self.omega.is_finite() {
            return Err(invalid(format!("omega must be >= 0, got {}", self.omega)));
        }
        if !(self.obstacle_threshold > T::zero() && self.obstacle_threshold <= T::one()) {
            return Err(invalid(format!(
                "obstacle threshold must lie in (0, 1], got {}",
                self.obstacle_threshold
            )));
        }
        Ok(())
    }
}

/// Ordered cells from start to goal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GridPath {
    pub cells: Vec<Cell>,
}

impl GridPath {
    pub fn new(cells: Vec<Cell>) -> Self {
        GridPath { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn start(&self) -> Option<Cell> {
        self.cells.first().copied()
    }

    pub fn goal(&self) -> Option<Cell> {
        self.cells.last().copied()
    }

    /// Checks adjacency, bounds and that no cell is an obstacle.
    pub fn validate<T: Real>(&self, costmap: &CostMap<T>, obstacle_threshold: T) -> Result<()> {
        check_shape(self, costmap.dims())?;
        if let Some(c) = self
            .cells
            .iter()
            .find(|c| costmap.cost(**c) >= obstacle_threshold)
        {
            return Err(Error::InvalidPath(format!("cell {c} is an obstacle")));
        }
        Ok(())
    }

    /// Writes one `x y` pair per line.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.cells {
            writeln!(w, "{} {}", c.x, c.y)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut cells = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<usize> {
                s.and_then(|v| v.parse().ok()).ok_or_else(|| {
                    Error::Format(format!("path line {}: expected `x y`", lineno + 1))
                })
            };
            let x = parse(it.next())?;
            let y = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Format(format!(
                    "path line {}: trailing tokens",
                    lineno + 1
                )));
            }
            cells.push(Cell::new(x, y));
        }
        Ok(GridPath { cells })
    }
}

fn check_shape(path: &GridPath, dims: Dims) -> Result<()> {
    if path.cells.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    if let Some(c) = path.cells.iter().find(|c| !dims.contains(**c)) {
        return Err(Error::InvalidPath(format!("cell {c} out of bounds")));
    }
    for w in path.cells.windows(2) {
        if !w[0].is_adjacent8(&w[1]) {
            return Err(Error::InvalidPath(format!(
                "cells {} and {} are not 8-adjacent",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStats<T> {
    /// Euclidean length in cells.
    pub length: T,
    /// Sum of cell costs along the path.
    pub cc: T,
    /// Sum of per-step pair costs `T_k + T_{k+1}`.
    pub t_sn: T,
    /// `length + omega * t_sn`.
    pub weighted_cost: T,
    pub cardinal_steps: usize,
    pub diagonal_steps: usize,
}

impl<T: Real> fmt::Display for PathStats<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L={:.6} CC={:.6} weighted={:.6}",
            self.length, self.cc, self.weighted_cost
        )
    }
}

pub fn path_stats<T: Real>(
    path: &GridPath,
    costmap: &CostMap<T>,
    omega: T,
) -> Result<PathStats<T>> {
    check_shape(path, costmap.dims())?;
    let mut cardinal = 0usize;
    let mut diagonal = 0usize;
    let mut t_sn = T::zero();
    for w in path.cells.windows(2) {
        if w[0].is_diagonal_to(&w[1]) {
            diagonal += 1;
        } else {
            cardinal += 1;
        }
        t_sn = t_sn + costmap.cost(w[0]) + costmap.cost(w[1]);
    }
    let cc = path.cells.iter().map(|c| costmap.cost(*c)).sum();
    let length = T::lit(cardinal as f64) + T::lit(diagonal as f64) * T::SQRT_2();
    Ok(PathStats {
        length,
        cc,
        t_sn,
        weighted_cost: length + omega * t_sn,
        cardinal_steps: cardinal,
        diagonal_steps: diagonal,
    })
}

/// Cost of moving between two 8-adjacent cells.
pub fn step_cost<T: Real>(costmap: &CostMap<T>, from: Cell, to: Cell, omega: T) -> Result<T> {
    let dims = costmap.dims();
    if !dims.contains(from) || !dims.contains(to) || !from.is_adjacent8(&to) {
        return Err(Error::NotAdjacent(from, to));
    }
    let euclid = if from.is_diagonal_to(&to) {
        T::SQRT_2()
    } else {
        T::one()
    };
    Ok(euclid + omega * (costmap.cost(from) + costmap.cost(to)))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchTelemetry {
    /// Seconds spent materialising the graph (prebuilt mode only).
    pub graphing_time: f64,
    pub search_time: f64,
    pub expansions: usize,
    /// Prebuilt: nodes materialised. Lazy: distinct nodes generated.
    pub graph_nodes: usize,
}

impl SearchTelemetry {
    pub fn total_time(&self) -> f64 {
        self.graphing_time + self.search_time
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome<T> {
    pub path: GridPath,
    pub stats: PathStats<T>,
    pub telemetry: SearchTelemetry,
}

/// Which cells the planner may use.
pub(crate) struct Passability<'a, T> {
    pub costmap: &'a CostMap<T>,
    pub mask: Option<&'a RegionMask>,
    pub threshold: T,
}

impl<T: Real> Passability<'_, T> {
    #[inline]
    pub fn open(&self, idx: usize) -> bool {
        self.costmap.cost_at(idx) < self.threshold && self.mask.is_none_or(|m| m.get_index(idx))
    }

    fn blocked_reason(&self, start: Cell, goal: Cell) -> Option<NoPathReason> {
        let dims = self.costmap.dims();
        if self.costmap.cost(start) >= self.threshold {
            return Some(NoPathReason::StartBlocked);
        }
        if self.costmap.cost(goal) >= self.threshold {
            return Some(NoPathReason::GoalBlocked);
        }
        if let Some(m) = self.mask {
            if !m.get_index(dims.index(start)) {
                return Some(NoPathReason::StartOutsideMask);
            }
            if !m.get_index(dims.index(goal)) {
                return Some(NoPathReason::GoalOutsideMask);
            }
        }
        None
    }
}

/// Shared argument checks for both planners.
pub(crate) fn check_query<T: Real>(
    costmap: &CostMap<T>,
    start: Cell,
    goal: Cell,
    cfg: &PlannerConfig<T>,
    mask: Option<&RegionMask>,
) -> Result<()> {
    cfg.validate()?;
    let dims = costmap.dims();
    if !dims.contains(start) || !dims.contains(goal) {
        return Err(invalid(format!(
            "start {start} or goal {goal} out of bounds"
        )));
    }
    if start == goal {
        return Err(invalid("start and goal must differ"));
    }
    if let Some(m) = mask {
        if m.dims() != dims {
            return Err(invalid("mask dimensions differ from cost map"));
        }
    }
    let pass = Passability {
        costmap,
        mask,
        threshold: cfg.obstacle_threshold,
    };
    match pass.blocked_reason(start, goal) {
        Some(reason) => Err(Error::NoPath(reason)),
        None => Ok(()),
    }
}

#[inline]
pub(crate) fn euclid_idx<T: Real>(dims: Dims, a: usize, b: usize) -> T {
    let (ax, ay) = (a % dims.width, a / dims.width);
    let (bx, by) = (b % dims.width, b / dims.width);
    let dx = T::lit(ax.abs_diff(bx) as f64);
    let dy = T::lit(ay.abs_diff(by) as f64);
    (dx * dx + dy * dy).sqrt()
}

/// 8-neighbours of `idx` as `(neighbour index, is_diagonal)`.
#[inline]
pub(crate) fn neighbors_idx(dims: Dims, idx: usize) -> impl Iterator<Item = (usize, bool)> {
    let (x, y) = ((idx % dims.width) as isize, (idx / dims.width) as isize);
    let (w, h) = (dims.width as isize, dims.height as isize);
    crate::grid::OFFSETS8.iter().filter_map(move |&(dx, dy)| {
        let (nx, ny) = (x + dx, y + dy);
        (nx >= 0 && ny >= 0 && nx < w && ny < h)
            .then(|| ((ny * w + nx) as usize, dx != 0 && dy != 0))
    })
}

#[inline]
pub(crate) fn edge_cost<T: Real>(
    costmap: &CostMap<T>,
    a: usize,
    b: usize,
    diagonal: bool,
    omega: T,
) -> T {
    let euclid = if diagonal { T::SQRT_2() } else { T::one() };
    euclid + omega * (costmap.cost_at(a) + costmap.cost_at(b))
}
