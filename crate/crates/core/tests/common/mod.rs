//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use terrapath::region::RegionMask;
use terrapath::terrain::{CostMap, Dem};
use terrapath::{Cell, Raster};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Plain Dijkstra over the whole 8-connected grid. Returns the optimal
/// `L + omega * sum(T_a + T_b)` or `None` when unreachable.
pub fn dijkstra(
    costs: &[f64],
    w: usize,
    h: usize,
    s: (usize, usize),
    g: (usize, usize),
    omega: f64,
    mask: Option<&[bool]>,
) -> Option<f64> {
    let open = |i: usize| costs[i] < 1.0 && mask.is_none_or(|m| m[i]);
    let (si, gi) = (s.1 * w + s.0, g.1 * w + g.0);
    if !open(si) || !open(gi) {
        return None;
    }
    let mut dist = vec![f64::INFINITY; w * h];
    let mut heap = BinaryHeap::new();
    dist[si] = 0.0;
    heap.push(Item(0.0, si));
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == gi {
            return Some(d);
        }
        let (ux, uy) = ((u % w) as i64, (u / w) as i64);
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let (vx, vy) = (ux + dx, uy + dy);
                if (dx, dy) == (0, 0) || vx < 0 || vy < 0 || vx >= w as i64 || vy >= h as i64 {
                    continue;
                }
                let v = (vy * w as i64 + vx) as usize;
                if !open(v) {
                    continue;
                }
                let step = ((dx * dx + dy * dy) as f64).sqrt() + omega * (costs[u] + costs[v]);
                if d + step < dist[v] {
                    dist[v] = d + step;
                    heap.push(Item(d + step, v));
                }
            }
        }
    }
    None
}

pub fn dijkstra_map(
    cm: &CostMap<f64>,
    s: Cell,
    g: Cell,
    omega: f64,
    mask: Option<&RegionMask>,
) -> Option<f64> {
    dijkstra(
        cm.raster().as_slice(),
        cm.width(),
        cm.height(),
        (s.x, s.y),
        (g.x, g.y),
        omega,
        mask.map(|m| m.bits()),
    )
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// 8-connectivity of two cells through `true` cells.
pub fn uf_connected(
    bits: &[bool],
    w: usize,
    h: usize,
    a: (usize, usize),
    b: (usize, usize),
) -> bool {
    let mut uf = UnionFind::new(w * h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !bits[i] {
                continue;
            }
            // forward half of the neighbourhood
            for (dx, dy) in [(1i64, 0i64), (-1, 1), (0, 1), (1, 1)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx >= 0 && nx < w as i64 && ny < h as i64 {
                    let j = ny as usize * w + nx as usize;
                    if bits[j] {
                        uf.union(i, j);
                    }
                }
            }
        }
    }
    let (ia, ib) = (a.1 * w + a.0, b.1 * w + b.0);
    bits[ia] && bits[ib] && uf.find(ia) == uf.find(ib)
}

/// Solves the 3x3 normal equations of `z = a x + b y + c` by Gaussian
/// elimination with partial pivoting.
pub fn normal_equations_fit(pts: &[(f64, f64, f64)]) -> [f64; 3] {
    let mut m = [[0.0f64; 4]; 3];
    for &(x, y, z) in pts {
        let row = [x, y, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            m[i][3] += row[i] * z;
        }
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|a, b| m[*a][col].abs().total_cmp(&m[*b][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let pivot = m[col];
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot[col];
                for k in col..4 {
                    row[k] -= f * pivot[k];
                }
            }
        }
    }
    [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]]
}

/// Patch points around `(x, y)` with clamped borders, centred coordinates in metres.
pub fn patch_points(dem: &Dem<f64>, x: usize, y: usize) -> Vec<(f64, f64, f64)> {
    let hs = dem.heights();
    let mut pts = Vec::with_capacity(9);
    for dy in -1..=1i64 {
        for dx in -1..=1i64 {
            let cx = (x as i64 + dx).clamp(0, dem.width() as i64 - 1) as usize;
            let cy = (y as i64 + dy).clamp(0, dem.height() as i64 - 1) as usize;
            pts.push((
                dx as f64 * dem.cell_size(),
                dy as f64 * dem.cell_size(),
                hs.get(Cell::new(cx, cy)),
            ));
        }
    }
    pts
}

/// (slope degrees, RMS residual, max |residual|) of the patch at `(x, y)`.
pub fn oracle_features(dem: &Dem<f64>, x: usize, y: usize) -> (f64, f64, f64) {
    let pts = patch_points(dem, x, y);
    let [a, b, c] = normal_equations_fit(&pts);
    let res: Vec<f64> = pts
        .iter()
        .map(|(px, py, z)| z - (a * px + b * py + c))
        .collect();
    let rms = (res.iter().map(|r| r * r).sum::<f64>() / 9.0).sqrt();
    let dh = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let slope = (a * a + b * b).sqrt().atan2(1.0).to_degrees();
    (slope, rms, dh)
}

/// Straight-line evaluation of the traversability formula with default limits.
pub fn oracle_cost(slope: f64, rough: f64, dh: f64) -> f64 {
    let (rs, rr, rf) = (slope / 30.0, rough / 0.6, dh / 0.2);
    if rs >= 1.0 || rr >= 1.0 || rf >= 1.0 {
        return 1.0;
    }
    (0.6 * rs + 0.2 * rr + 0.2 * rf).clamp(0.0, 1.0)
}

pub fn random_costmap(r: &mut ChaCha8Rng, w: usize, h: usize, obstacle_p: f64) -> CostMap<f64> {
    let costs = (0..w * h)
        .map(|_| {
            if r.gen_bool(obstacle_p) {
                1.0
            } else {
                r.gen_range(0.0..0.95)
            }
        })
        .collect();
    CostMap::new(w, h, costs).unwrap()
}

pub fn random_free_cell(r: &mut ChaCha8Rng, cm: &CostMap<f64>) -> Cell {
    loop {
        let c = Cell::new(r.gen_range(0..cm.width()), r.gen_range(0..cm.height()));
        if cm.cost(c) < 1.0 {
            return c;
        }
    }
}

/// Random DEM mixing a tilt, bumps and noise so costs span the full range.
pub fn random_dem(r: &mut ChaCha8Rng, w: usize, h: usize) -> Dem<f64> {
    let tilt_x = r.gen_range(-0.4..0.4);
    let tilt_y = r.gen_range(-0.4..0.4);
    let noise = r.gen_range(0.01..0.12);
    let heights = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            tilt_x * x
                + tilt_y * y
                + (0.7 * x).sin() * 0.2 * noise * 5.0 * (0.3 * y).cos()
                + r.gen_range(-noise..noise)
        })
        .collect();
    Dem::new(w, h, 1.0, heights).unwrap()
}

pub fn raster_eq_bits(a: &Raster<f32>, b: &Raster<f32>) -> bool {
    a.dims() == b.dims()
        && a.as_slice()
            .iter()
            .zip(b.as_slice())
            .all(|(x, y)| x.to_bits() == y.to_bits())
}
