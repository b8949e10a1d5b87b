use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{Error, NoPathReason, Result};
use crate::grid::{Cell, Dims};
use crate::region::RegionMask;
use crate::scalar::Real;
use crate::terrain::CostMap;

use super::heap::OpenEntry;
use super::{
    check_query, edge_cost, euclid_idx, neighbors_idx, path_stats, GraphMode, GridPath,
    Passability, PlanOutcome, PlannerConfig, SearchTelemetry,
};

const NONE: u32 = u32::MAX;

/// Weighted A* with the Euclidean heuristic.
///
/// The returned path minimises `L + omega * T_sn` over all 8-connected paths
/// that stay inside `mask` (or the whole map) and avoid obstacle cells.
pub fn astar_plan<T: Real>(
    costmap: &CostMap<T>,
    start: Cell,
    goal: Cell,
    cfg: &PlannerConfig<T>,
    mask: Option<&RegionMask>,
) -> Result<PlanOutcome<T>> {
    check_query(costmap, start, goal, cfg, mask)?;
    let pass = Passability {
        costmap,
        mask,
        threshold: cfg.obstacle_threshold,
    };
    let (path, telemetry) = match cfg.graph_mode {
        GraphMode::Lazy => lazy_search(&pass, start, goal, cfg.omega)?,
        GraphMode::Prebuilt => prebuilt_search(&pass, start, goal, cfg.omega)?,
    };
    let stats = path_stats(&path, costmap, cfg.omega)?;
    Ok(PlanOutcome {
        path,
        stats,
        telemetry,
    })
}

fn lazy_search<T: Real>(
    pass: &Passability<'_, T>,
    start: Cell,
    goal: Cell,
    omega: T,
) -> Result<(GridPath, SearchTelemetry)> {
    let t0 = Instant::now();
    let dims = pass.costmap.dims();
    let n = dims.len();
    let (s, g_idx) = (dims.index(start), dims.index(goal));

    let mut g = vec![T::infinity(); n];
    let mut parent = vec![NONE; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    let mut generated = 1usize;
    let mut expansions = 0usize;

    g[s] = T::zero();
    open.push(OpenEntry {
        f: euclid_idx(dims, s, g_idx),
        g: T::zero(),
        node: s as u32,
    });

    let mut found = false;
    while let Some(OpenEntry { g: gu, node, .. }) = open.pop() {
        let u = node as usize;
        if closed[u] || gu > g[u] {
            continue;
        }
        closed[u] = true;
        expansions += 1;
        if u == g_idx {
            found = true;
            break;
        }
        for (v, diagonal) in neighbors_idx(dims, u) {
            if closed[v] || !pass.open(v) {
                continue;
            }
            let cand = gu + edge_cost(pass.costmap, u, v, diagonal, omega);
            if cand < g[v] {
                if g[v] == T::infinity() {
                    generated += 1;
                }
                g[v] = cand;
                parent[v] = u as u32;
                open.push(OpenEntry {
                    f: cand + euclid_idx(dims, v, g_idx),
                    g: cand,
                    node: v as u32,
                });
            }
        }
    }
    let telemetry = SearchTelemetry {
        graphing_time: 0.0,
        search_time: t0.elapsed().as_secs_f64(),
        expansions,
        graph_nodes: generated,
    };
    if !found {
        return Err(Error::NoPath(NoPathReason::Disconnected));
    }
    Ok((trace(dims, &parent, s, g_idx, |i| i), telemetry))
}

/// Node record of the materialised search graph.
#[derive(Debug, Clone, Copy)]
struct Node<T> {
    cell: u32,
    g: T,
    h: T,
    f: T,
    parent: u32,
    closed: bool,
}

/// Adjacency of every open cell, built before the search starts.
struct SearchGraph<T> {
    node_of: Vec<u32>,
    nodes: Vec<Node<T>>,
    offsets: Vec<u32>,
    edges: Vec<(u32, T)>,
}

impl<T: Real> SearchGraph<T> {
    fn build(pass: &Passability<'_, T>, goal: usize, omega: T) -> Self {
        let dims = pass.costmap.dims();
        let n = dims.len();
        let mut node_of = vec![NONE; n];
        let mut nodes = Vec::new();
        for (idx, slot) in node_of.iter_mut().enumerate() {
            if pass.open(idx) {
                *slot = nodes.len() as u32;
                let h = euclid_idx(dims, idx, goal);
                nodes.push(Node {
                    cell: idx as u32,
                    g: T::infinity(),
                    h,
                    f: T::infinity(),
                    parent: NONE,
                    closed: false,
                });
            }
        }
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        let mut edges = Vec::with_capacity(nodes.len() * 8);
        offsets.push(0);
        for node in &nodes {
            let u = node.cell as usize;
            for (v, diagonal) in neighbors_idx(dims, u) {
                let nv = node_of[v];
                if nv != NONE {
                    edges.push((nv, edge_cost(pass.costmap, u, v, diagonal, omega)));
                }
            }
            offsets.push(edges.len() as u32);
        }
        SearchGraph {
            node_of,
            nodes,
            offsets,
            edges,
        }
    }
}

fn prebuilt_search<T: Real>(
    pass: &Passability<'_, T>,
    start: Cell,
    goal: Cell,
    omega: T,
) -> Result<(GridPath, SearchTelemetry)> {
    let dims = pass.costmap.dims();
    let t0 = Instant::now();
    let mut graph = SearchGraph::build(pass, dims.index(goal), omega);
    let graphing_time = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let s = graph.node_of[dims.index(start)] as usize;
    let target = graph.node_of[dims.index(goal)] as usize;
    let mut open = BinaryHeap::new();
    let mut expansions = 0usize;
    {
        let sn = &mut graph.nodes[s];
        sn.g = T::zero();
        sn.f = sn.h;
        open.push(OpenEntry {
            f: sn.f,
            g: sn.g,
            node: s as u32,
        });
    }
    let mut found = false;
    while let Some(OpenEntry { g: gu, node, .. }) = open.pop() {
        let u = node as usize;
        if graph.nodes[u].closed || gu > graph.nodes[u].g {
            continue;
        }
        graph.nodes[u].closed = true;
        expansions += 1;
        if u == target {
            found = true;
            break;
        }
        let (lo, hi) = (graph.offsets[u] as usize, graph.offsets[u + 1] as usize);
        for &(v, w) in &graph.edges[lo..hi] {
            let node_v = &mut graph.nodes[v as usize];
            if node_v.closed {
                continue;
            }
            let cand = gu + w;
            if cand < node_v.g {
                node_v.g = cand;
                node_v.f = cand + node_v.h;
                node_v.parent = node;
                open.push(OpenEntry {
                    f: node_v.f,
                    g: cand,
                    node: v,
                });
            }
        }
    }
    let telemetry = SearchTelemetry {
        graphing_time,
        search_time: t1.elapsed().as_secs_f64(),
        expansions,
        graph_nodes: graph.nodes.len(),
    };
    if !found {
        return Err(Error::NoPath(NoPathReason::Disconnected));
    }
    let parents: Vec<u32> = graph.nodes.iter().map(|n| n.parent).collect();
    let cells: Vec<u32> = graph.nodes.iter().map(|n| n.cell).collect();
    Ok((
        trace(dims, &parents, s, target, |i| cells[i] as usize),
        telemetry,
    ))
}

/// Follows parent links from `goal` back to `start`.
fn trace(
    dims: Dims,
    parent: &[u32],
    start: usize,
    goal: usize,
    to_cell: impl Fn(usize) -> usize,
) -> GridPath {
    let mut cells = vec![dims.cell(to_cell(goal))];
    let mut cur = goal;
    while cur != start {
        cur = parent[cur] as usize;
        cells.push(dims.cell(to_cell(cur)));
    }
    cells.reverse();
    GridPath::new(cells)
}
