//! D*-Lite incremental replanner.

use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{invalid, Error, NoPathReason, Result};
use crate::grid::{Cell, Dims};
use crate::region::RegionMask;
use crate::scalar::Real;
use crate::terrain::CostMap;

use super::heap::{Key, KeyEntry};
use super::{
    check_query, edge_cost, euclid_idx, neighbors_idx, path_stats, GridPath, PlanOutcome,
    PlannerConfig, SearchTelemetry,
};

/// Replanner state. Searches backwards from the goal so that moving the
/// start only shifts heuristic values (`km`) instead of invalidating `g`.
#[derive(Debug, Clone)]
pub struct DStarLite<T> {
    costmap: CostMap<T>,
    mask: Option<RegionMask>,
    cfg: PlannerConfig<T>,
    dims: Dims,
    start: usize,
    goal: usize,
    last: usize,
    km: T,
    g: Vec<T>,
    rhs: Vec<T>,
    open_key: Vec<Option<Key<T>>>,
    heap: BinaryHeap<KeyEntry<T>>,
    expansions: usize,
    /// Cells with finite `g`.
    settled: usize,
    /// Pre-update (cost, in-mask) of cells changed in the current batch.
    old: Vec<Option<(T, bool)>>,
}

impl<T: Real> DStarLite<T> {
    /// Builds the state and computes the first plan.
    pub fn init(
        costmap: CostMap<T>,
        start: Cell,
        goal: Cell,
        cfg: PlannerConfig<T>,
        mask: Option<RegionMask>,
    ) -> Result<(Self, PlanOutcome<T>)> {
        check_query(&costmap, start, goal, &cfg, mask.as_ref())?;
        let t0 = Instant::now();
        let dims = costmap.dims();
        let n = dims.len();
        let (s, g) = (dims.index(start), dims.index(goal));
        let mut me = DStarLite {
            costmap,
            mask,
            cfg,
            dims,
            start: s,
            goal: g,
            last: s,
            km: T::zero(),
            g: vec![T::infinity(); n],
            rhs: vec![T::infinity(); n],
            open_key: vec![None; n],
            heap: BinaryHeap::new(),
            expansions: 0,
            settled: 0,
            old: vec![None; n],
        };
        me.rhs[g] = T::zero();
        me.update_vertex(g);
        let out = me.solve(t0)?;
        Ok((me, out))
    }

    pub fn costmap(&self) -> &CostMap<T> {
        &self.costmap
    }

    pub fn mask(&self) -> Option<&RegionMask> {
        self.mask.as_ref()
    }

    pub fn start(&self) -> Cell {
        self.dims.cell(self.start)
    }

    pub fn goal(&self) -> Cell {
        self.dims.cell(self.goal)
    }

    /// Applies cell cost changes, moves the start and replans.
    pub fn apply_changes_and_replan(
        &mut self,
        changes: &[(Cell, T)],
        new_start: Cell,
    ) -> Result<PlanOutcome<T>> {
        self.update(changes, None, new_start)
    }

    /// Like [`apply_changes_and_replan`](Self::apply_changes_and_replan) but also
    /// replaces the region mask; cells entering or leaving the mask are
    /// handled as edge-cost changes.
    pub fn replace_mask_and_replan(
        &mut self,
        changes: &[(Cell, T)],
        mask: Option<RegionMask>,
        new_start: Cell,
    ) -> Result<PlanOutcome<T>> {
        self.update(changes, Some(mask), new_start)
    }

    fn update(
        &mut self,
        changes: &[(Cell, T)],
        mask: Option<Option<RegionMask>>,
        new_start: Cell,
    ) -> Result<PlanOutcome<T>> {
        let t0 = Instant::now();
        let dims = self.dims;
        if !dims.contains(new_start) {
            return Err(invalid(format!("start {new_start} out of bounds")));
        }
        if let Some(c) = changes.iter().find(|(c, _)| !dims.contains(*c)) {
            return Err(invalid(format!("changed cell {} out of bounds", c.0)));
        }
        if let Some(Some(m)) = &mask {
            if m.dims() != dims {
                return Err(invalid("mask dimensions differ from cost map"));
            }
        }
        if dims.index(new_start) == self.goal {
            return Err(invalid("start and goal must differ"));
        }
        self.expansions = 0;

        let mut changed = Vec::new();
        for &(c, cost) in changes {
            let idx = dims.index(c);
            let cost = cost.max(T::zero()).min(T::one());
            let prev = self.costmap.cost_at(idx);
            if prev != cost {
                if self.old[idx].is_none() {
                    self.old[idx] = Some((prev, self.in_mask(idx)));
                    changed.push(idx);
                }
                self.costmap.set_cost(c, cost);
            }
        }
        if let Some(new_mask) = mask {
            for idx in 0..dims.len() {
                let before = self.in_mask(idx);
                let after = new_mask.as_ref().is_none_or(|m| m.get_index(idx));
                if before != after && self.old[idx].is_none() {
                    self.old[idx] = Some((self.costmap.cost_at(idx), before));
                    changed.push(idx);
                }
            }
            self.mask = new_mask;
        }

        let s = dims.index(new_start);
        if s != self.start {
            self.km = self.km + euclid_idx(dims, self.last, s);
            self.last = s;
            self.start = s;
        }

        changed.sort_unstable();
        for &a in &changed {
            for (b, diagonal) in neighbors_idx(dims, a) {
                if b < a && self.old[b].is_some() {
                    continue;
                }
                let c_old = self.old_cost(a, b, diagonal);
                let c_new = self.cost(a, b, diagonal);
                if c_old != c_new {
                    self.edge_changed(a, b, c_old, c_new);
                    self.edge_changed(b, a, c_old, c_new);
                }
            }
        }
        for &a in &changed {
            self.old[a] = None;
        }
        self.solve(t0)
    }

    #[inline]
    fn in_mask(&self, idx: usize) -> bool {
        self.mask.as_ref().is_none_or(|m| m.get_index(idx))
    }

    /// Edge cost before the current batch of changes.
    fn old_cost(&self, a: usize, b: usize, diagonal: bool) -> T {
        let state =
            |i: usize| self.old[i].unwrap_or_else(|| (self.costmap.cost_at(i), self.in_mask(i)));
        let ((ta, ma), (tb, mb)) = (state(a), state(b));
        let thr = self.cfg.obstacle_threshold;
        if ta < thr && ma && tb < thr && mb {
            let euclid = if diagonal { T::SQRT_2() } else { T::one() };
            euclid + self.cfg.omega * (ta + tb)
        } else {
            T::infinity()
        }
    }

    /// Repairs `rhs(u)` after the cost of edge `u -> v` changed.
    fn edge_changed(&mut self, u: usize, v: usize, c_old: T, c_new: T) {
        if u == self.goal {
            return;
        }
        let before = self.rhs[u];
        if c_old > c_new {
            self.rhs[u] = self.rhs[u].min(c_new + self.g[v]);
        } else if self.g[v].is_finite() && self.rhs[u] == c_old + self.g[v] {
            self.rhs[u] = self.best_successor(u).1;
        }
        if self.rhs[u] != before {
            self.update_vertex(u);
        }
    }

    fn solve(&mut self, t0: Instant) -> Result<PlanOutcome<T>> {
        if let Some(reason) = self.endpoint_problem() {
            return Err(Error::NoPath(reason));
        }
        self.compute_shortest_path();
        let telemetry = SearchTelemetry {
            graphing_time: 0.0,
            search_time: t0.elapsed().as_secs_f64(),
            expansions: self.expansions,
            graph_nodes: self.settled,
        };
        let path = self.extract_path()?;
        let stats = path_stats(&path, &self.costmap, self.cfg.omega)?;
        Ok(PlanOutcome {
            path,
            stats,
            telemetry: SearchTelemetry {
                search_time: t0.elapsed().as_secs_f64(),
                ..telemetry
            },
        })
    }

    fn endpoint_problem(&self) -> Option<NoPathReason> {
        let thr = self.cfg.obstacle_threshold;
        let in_mask = |i: usize| self.mask.as_ref().is_none_or(|m| m.get_index(i));
        if self.costmap.cost_at(self.start) >= thr {
            Some(NoPathReason::StartBlocked)
        } else if self.costmap.cost_at(self.goal) >= thr {
            Some(NoPathReason::GoalBlocked)
        } else if !in_mask(self.start) {
            Some(NoPathReason::StartOutsideMask)
        } else if !in_mask(self.goal) {
            Some(NoPathReason::GoalOutsideMask)
        } else {
            None
        }
    }

    #[inline]
    fn open(&self, idx: usize) -> bool {
        self.costmap.cost_at(idx) < self.cfg.obstacle_threshold
            && self.mask.as_ref().is_none_or(|m| m.get_index(idx))
    }

    #[inline]
    fn cost(&self, u: usize, v: usize, diagonal: bool) -> T {
        if self.open(u) && self.open(v) {
            edge_cost(&self.costmap, u, v, diagonal, self.cfg.omega)
        } else {
            T::infinity()
        }
    }

    /// Successor minimising `c(u, s) + g(s)`, with that value.
    fn best_successor(&self, u: usize) -> (usize, T) {
        let mut best = (usize::MAX, T::infinity());
        if !self.open(u) {
            return best;
        }
        for (v, diagonal) in neighbors_idx(self.dims, u) {
            if !self.open(v) {
                continue;
            }
            let val = edge_cost(&self.costmap, u, v, diagonal, self.cfg.omega) + self.g[v];
            if val < best.1 {
                best = (v, val);
            }
        }
        best
    }

    fn calc_key(&self, u: usize) -> Key<T> {
        let m = self.g[u].min(self.rhs[u]);
        Key(m + euclid_idx(self.dims, self.start, u) + self.km, m)
    }

    fn update_vertex(&mut self, u: usize) {
        if self.g[u] != self.rhs[u] {
            let key = self.calc_key(u);
            if self.open_key[u] != Some(key) {
                self.open_key[u] = Some(key);
                self.heap.push(KeyEntry {
                    key,
                    node: u as u32,
                });
            }
        } else {
            self.open_key[u] = None;
        }
    }

    /// Drops stale heap entries and returns the live top.
    fn top(&mut self) -> Option<KeyEntry<T>> {
        while let Some(e) = self.heap.peek() {
            if self.open_key[e.node as usize] == Some(e.key) {
                return Some(*e);
            }
            self.heap.pop();
        }
        None
    }

    fn compute_shortest_path(&mut self) {
        let dims = self.dims;
        while let Some(top) = self.top() {
            let start_key = self.calc_key(self.start);
            if !(top.key.less(&start_key) || self.rhs[self.start] != self.g[self.start]) {
                break;
            }
            let u = top.node as usize;
            let new_key = self.calc_key(u);
            if top.key.less(&new_key) {
                self.open_key[u] = Some(new_key);
                self.heap.push(KeyEntry {
                    key: new_key,
                    node: top.node,
                });
                continue;
            }
            self.heap.pop();
            self.open_key[u] = None;
            self.expansions += 1;
            if self.g[u] > self.rhs[u] {
                if !self.g[u].is_finite() {
                    self.settled += 1;
                }
                self.g[u] = self.rhs[u];
                let gu = self.g[u];
                for (s, diagonal) in neighbors_idx(dims, u) {
                    if s != self.goal {
                        let c = self.cost(s, u, diagonal);
                        if c + gu < self.rhs[s] {
                            self.rhs[s] = c + gu;
                        }
                    }
                    self.update_vertex(s);
                }
            } else {
                let g_old = self.g[u];
                if g_old.is_finite() {
                    self.settled -= 1;
                }
                self.g[u] = T::infinity();
                if u != self.goal && self.rhs[u] == g_old {
                    self.rhs[u] = self.best_successor(u).1;
                }
                self.update_vertex(u);
                for (s, diagonal) in neighbors_idx(dims, u) {
                    if s != self.goal && self.rhs[s] == self.cost(s, u, diagonal) + g_old {
                        self.rhs[s] = self.best_successor(s).1;
                    }
                    self.update_vertex(s);
                }
            }
        }
    }

    fn extract_path(&self) -> Result<GridPath> {
        if !self.rhs[self.start].is_finite() {
            return Err(Error::NoPath(NoPathReason::Disconnected));
        }
        let mut cells = vec![self.dims.cell(self.start)];
        let mut cur = self.start;
        while cur != self.goal {
            let (next, val) = self.best_successor(cur);
            if !val.is_finite() || cells.len() > self.dims.len() {
                return Err(Error::NoPath(NoPathReason::Disconnected));
            }
            cur = next;
            cells.push(self.dims.cell(cur));
        }
        Ok(GridPath::new(cells))
    }
}
