use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::grid::Cell;
use crate::region::{RegionMask, ThresholdPolicy};
use crate::scalar::Real;
use crate::search::{astar_plan, DStarLite, GraphMode, GridPath, PlanOutcome, PlannerConfig};
use crate::terrain::CostMap;

use super::{opt, BenchRow, Method, RegionSource};

/// Axis-aligned obstacle with one top-left corner per frame; the last
/// position is held once the script runs out.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedRect {
    pub width: usize,
    pub height: usize,
    pub positions: Vec<Cell>,
}

impl ScriptedRect {
    pub fn at(&self, frame: usize) -> Option<Cell> {
        self.positions.get(frame).or(self.positions.last()).copied()
    }

    pub fn covers(&self, frame: usize, c: Cell) -> bool {
        self.at(frame).is_some_and(|p| {
            c.x >= p.x && c.x < p.x + self.width && c.y >= p.y && c.y < p.y + self.height
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicScenario<T> {
    pub base: CostMap<T>,
    pub obstacles: Vec<ScriptedRect>,
    pub start: Cell,
    pub goal: Cell,
    /// Cells the agent advances between map updates.
    pub steps_per_replan: usize,
    pub max_frames: usize,
}

impl<T: Real> DynamicScenario<T> {
    pub fn new_static(base: CostMap<T>, start: Cell, goal: Cell, steps_per_replan: usize) -> Self {
        let n = base.width() * base.height();
        DynamicScenario {
            base,
            obstacles: Vec::new(),
            start,
            goal,
            steps_per_replan,
            max_frames: n / steps_per_replan.max(1) + 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = self.base.dims();
        if !dims.contains(self.start) || !dims.contains(self.goal) {
            return Err(invalid("start or goal out of bounds"));
        }
        if self.steps_per_replan == 0 || self.max_frames == 0 {
            return Err(invalid("steps_per_replan and max_frames must be >= 1"));
        }
        for r in &self.obstacles {
            if r.width == 0 || r.height == 0 || r.positions.is_empty() {
                return Err(invalid("obstacle needs a size and at least one position"));
            }
            if r.positions
                .iter()
                .any(|p| p.x + r.width > dims.width || p.y + r.height > dims.height)
            {
                return Err(invalid("obstacle leaves the map"));
            }
        }
        Ok(())
    }

    /// Cost map at `frame`: obstacle cells set to 1. A rectangle that would
    /// cover the agent or the goal stays at its latest earlier position that
    /// does not, or is left out if there is none.
    pub fn render(&self, frame: usize, agent: Cell) -> CostMap<T> {
        let mut map = self.base.clone();
        for r in &self.obstacles {
            let clear = |k: usize| !r.covers(k, agent) && !r.covers(k, self.goal);
            let Some(k) = (0..=frame).rev().find(|k| clear(*k)) else {
                continue;
            };
            let Some(p) = r.at(k) else { continue };
            for y in p.y..p.y + r.height {
                for x in p.x..p.x + r.width {
                    map.set_cost(Cell::new(x, y), T::one());
                }
            }
        }
        map
    }

    /// Two rectangles oscillating across the start-goal segment at roughly
    /// one and two thirds of its length.
    pub fn two_rects(
        base: CostMap<T>,
        start: Cell,
        goal: Cell,
        seed: u64,
        steps_per_replan: usize,
    ) -> Result<Self> {
        let (w, h) = (base.width(), base.height());
        if w < 16 || h < 16 {
            return Err(invalid("two_rects needs a map of at least 16x16"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sx, sy) = (start.x as f64, start.y as f64);
        let (dx, dy) = (goal.x as f64 - sx, goal.y as f64 - sy);
        let len = dx.hypot(dy).max(1.0);
        let (px, py) = (-dy / len, dx / len);
        let span = w.min(h) as f64;
        let max_frames = 4 * (w + h) / steps_per_replan.max(1) + 8;
        let mut obstacles = Vec::with_capacity(2);
        for i in 0..2 {
            let t = (i as f64 + 1.0) / 3.0 + rng.gen_range(-0.08..0.08);
            let (cx, cy) = (sx + t * dx, sy + t * dy);
            let rw = ((span * rng.gen_range(0.10..0.18)) as usize).max(2);
            let rh = ((span * rng.gen_range(0.06..0.12)) as usize).max(2);
            let amp = span * rng.gen_range(0.15..0.3);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let speed = rng.gen_range(0.5..1.1);
            let positions = (0..max_frames)
                .map(|k| {
                    let s = amp * (phase + speed * k as f64).sin();
                    let x = (cx + s * px - rw as f64 / 2.0)
                        .round()
                        .clamp(0.0, (w - rw) as f64);
                    let y = (cy + s * py - rh as f64 / 2.0)
                        .round()
                        .clamp(0.0, (h - rh) as f64);
                    Cell::new(x as usize, y as usize)
                })
                .collect();
            obstacles.push(ScriptedRect {
                width: rw,
                height: rh,
                positions,
            });
        }
        let sc = DynamicScenario {
            base,
            obstacles,
            start,
            goal,
            steps_per_replan,
            max_frames,
        };
        sc.validate()?;
        Ok(sc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub planner: PlannerConfig<T>,
    pub policy: ThresholdPolicy<T>,
    /// When set, a fresh A* in this mode is also run (and timed) on every frame.
    pub reference: Option<GraphMode>,
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        SimConfig {
            planner: PlannerConfig::default(),
            policy: ThresholdPolicy::default(),
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub frame: usize,
    pub agent: Cell,
    /// Planning seconds for this frame (threshold selection included).
    pub at: f64,
    pub cc: f64,
    pub weighted_cost: f64,
    pub length: f64,
    pub expansions: usize,
    /// Cells whose cost changed since the previous frame.
    pub changed_cells: usize,
    /// The remainder of the previous plan crosses an obstacle on this frame.
    pub blocked: bool,
    pub mask_area: Option<usize>,
    pub td: Option<f64>,
    pub fallback: bool,
    pub reference_at: Option<f64>,
    pub reference_weighted: Option<f64>,
}

impl FrameRecord {
    pub const CSV_HEADER: &'static str =
        "frame,agent_x,agent_y,at,cc,weighted_cost,length,expansions,\
changed_cells,blocked,mask_area,td,fallback,reference_at,reference_weighted";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.frame,
            self.agent.x,
            self.agent.y,
            self.at,
            self.cc,
            self.weighted_cost,
            self.length,
            self.expansions,
            self.changed_cells,
            self.blocked,
            self.mask_area.map(|a| a.to_string()).unwrap_or_default(),
            opt(self.td),
            self.fallback,
            opt(self.reference_at),
            opt(self.reference_weighted)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub method: Method,
    pub frames: Vec<FrameRecord>,
    pub executed: GridPath,
    pub success: bool,
    pub failure: Option<String>,
}

impl SimReport {
    pub fn total_at(&self) -> f64 {
        self.frames.iter().map(|f| f.at).sum()
    }

    pub fn total_reference_at(&self) -> f64 {
        self.frames.iter().filter_map(|f| f.reference_at).sum()
    }

    /// Largest `|weighted - reference|` over frames with a reference.
    pub fn max_reference_gap(&self) -> f64 {
        self.frames
            .iter()
            .filter_map(|f| f.reference_weighted.map(|r| (f.weighted_cost - r).abs()))
            .fold(0.0, f64::max)
    }

    pub fn bench_rows(&self, name: &str, size: usize) -> Vec<BenchRow> {
        self.frames
            .iter()
            .map(|f| BenchRow {
                name: format!("{name}#{}", f.frame),
                size,
                method: self.method,
                at: f.at,
                cc: Some(f.cc),
                weighted_cost: Some(f.weighted_cost),
                success: true,
                mm: None,
                graphing_time: 0.0,
                search_time: 0.0,
                expansions: f.expansions,
            })
            .collect()
    }
}

fn to64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

struct Planned<T> {
    out: PlanOutcome<T>,
    at: f64,
    mask_area: Option<usize>,
    td: Option<f64>,
    fallback: bool,
}

/// Plan, walk `steps_per_replan` cells, apply the next frame's obstacles and
/// replan, until the goal is reached or the frame budget runs out. Every
/// frame is a scheduled replan, so a blocked remainder never gets executed.
pub fn dynamic_sim<T: Real>(
    scenario: &DynamicScenario<T>,
    method: Method,
    source: Option<&RegionSource>,
    cfg: &SimConfig<T>,
) -> Result<SimReport> {
    scenario.validate()?;
    cfg.planner.validate()?;
    let source = match (method.uses_region(), source) {
        (true, None) => return Err(invalid(format!("{method} needs a region source"))),
        (true, Some(s)) => Some(s),
        (false, _) => None,
    };
    let thr = cfg.planner.obstacle_threshold;
    let goal = scenario.goal;
    let mut agent = scenario.start;
    let mut map = scenario.render(0, agent);
    let mut dstar: Option<DStarLite<T>> = None;
    let mut executed = vec![agent];
    let mut frames = Vec::new();
    let mut remainder: Vec<Cell> = Vec::new();
    let mut changes: Vec<(Cell, T)> = Vec::new();
    let mut frame = 0usize;

    let failure = loop {
        let blocked = remainder.iter().any(|c| map.cost(*c) >= thr);
        let region = match source {
            Some(src) => Some(src.probability_map(
                &format!("frame_{frame:04}"),
                &map,
                agent,
                goal,
                &cfg.planner,
            )),
            None => None,
        };
        let region = match region.transpose() {
            Ok(r) => r,
            Err(e) => break Some(e.to_string()),
        };
        let t = Instant::now();
        let planned = (|| -> Result<Planned<T>> {
            let sel = match &region {
                Some(p) => Some(p.select(agent, goal, &cfg.policy)?),
                None => None,
            };
            let mask: Option<RegionMask> = sel.as_ref().map(|s| s.mask().clone());
            let out = if method.incremental() {
                match dstar.as_mut() {
                    None => {
                        let (d, out) =
                            DStarLite::init(map.clone(), agent, goal, cfg.planner, mask)?;
                        dstar = Some(d);
                        out
                    }
                    Some(d) if method.uses_region() => {
                        d.replace_mask_and_replan(&changes, mask, agent)?
                    }
                    Some(d) => d.apply_changes_and_replan(&changes, agent)?,
                }
            } else {
                astar_plan(&map, agent, goal, &cfg.planner, mask.as_ref())?
            };
            Ok(Planned {
                out,
                at: 0.0,
                mask_area: sel.as_ref().map(|s| s.mask().area()),
                td: sel.as_ref().and_then(|s| s.td()).map(to64),
                fallback: sel.as_ref().is_some_and(|s| s.is_fallback()),
            })
        })()
        .map(|mut p| {
            p.at = t.elapsed().as_secs_f64();
            p
        });
        let planned = match planned {
            Ok(p) => p,
            Err(e) => break Some(e.to_string()),
        };
        let (reference_at, reference_weighted) = match cfg.reference {
            Some(mode) => {
                let rc = cfg.planner.with_mode(mode);
                let t = Instant::now();
                let r = astar_plan(&map, agent, goal, &rc, None);
                let at = t.elapsed().as_secs_f64();
                (Some(at), r.ok().map(|o| to64(o.stats.weighted_cost)))
            }
            None => (None, None),
        };
        let path = &planned.out.path.cells;
        frames.push(FrameRecord {
            frame,
            agent,
            at: planned.at,
            cc: to64(planned.out.stats.cc),
            weighted_cost: to64(planned.out.stats.weighted_cost),
            length: to64(planned.out.stats.length),
            expansions: planned.out.telemetry.expansions,
            changed_cells: changes.len(),
            blocked,
            mask_area: planned.mask_area,
            td: planned.td,
            fallback: planned.fallback,
            reference_at,
            reference_weighted,
        });

        let steps = scenario.steps_per_replan.min(path.len() - 1);
        for c in &path[1..=steps] {
            if map.cost(*c) >= thr {
                return Err(Error::InvalidPath(format!(
                    "plan enters obstacle {c} on frame {frame}"
                )));
            }
            executed.push(*c);
        }
        agent = path[steps];
        remainder = path[steps..].to_vec();
        if agent == goal {
            break None;
        }
        frame += 1;
        if frame >= scenario.max_frames {
            break Some(format!("frame budget {} exhausted", scenario.max_frames));
        }
        let next = scenario.render(frame, agent);
        changes = next
            .raster()
            .as_slice()
            .iter()
            .zip(map.raster().as_slice())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, (a, _))| (next.dims().cell(i), *a))
            .collect();
        map = next;
    };
    Ok(SimReport {
        method,
        frames,
        executed: GridPath::new(executed),
        success: failure.is_none(),
        failure,
    })
}
