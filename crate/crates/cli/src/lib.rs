//! Command-line front end. `run` parses arguments, dispatches and maps
//! failures to exit codes: 0 success, 1 no path, 2 bad input.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use terrapath::bench::{
    bench_masked_vs_full, bench_scaling, default_omega_grid, dynamic_sim, snap_to_free,
    sweep_omega, write_csv, BenchCase, BenchRow, DynamicScenario, FrameRecord, MaskedRow, Method,
    OmegaSweep, RegionProb, RegionSource, ScalingRow, SimConfig,
};
use terrapath::dataset::{
    generate_sample, load_sample, read_manifest, write_dataset, DatasetSpec, MANIFEST_NAME,
};
use terrapath::io::{
    from_f32_raster, read_ascii_grid_file, read_nnpr_file, to_f32_raster, write_ascii_grid_file,
    write_nnpr_file, AsciiGrid,
};
use terrapath::region::{
    adaptive_threshold, model_metric, oracle_region, ProbabilityMap, ThresholdPolicy,
};
use terrapath::search::{astar_plan, GraphMode, GridPath, PlannerConfig};
use terrapath::terrain::{compute_cost_map, synth_terrain, CostMap, Dem, TerrainParams};
use terrapath::{Cell, Error, Raster};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_PATH: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "terrapath",
    version,
    about = "Terrain-aware grid path planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a traversability cost map from a DEM (or a synthetic one).
    Cost(CostArgs),
    /// Plan on the full map with A*.
    Plan(PlanArgs),
    /// Sweep omega on one query and report the normalised curves.
    SweepOmega(SweepArgs),
    /// Generate a labelled dataset with a manifest.
    GenDataset(GenArgs),
    /// Plan inside an adaptive-threshold region of a probability map.
    RegionPlan(RegionPlanArgs),
    /// Run a benchmark: masked vs full, scaling, or omega distribution.
    Bench(BenchArgs),
    /// Simulate a dynamic two-obstacle scenario.
    DynamicSim(DynamicArgs),
    /// Model metric of a label path against an adaptive-threshold region.
    Mm(MmArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Nnpr,
    Ascii,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Graph {
    Lazy,
    Prebuilt,
}

impl From<Graph> for GraphMode {
    fn from(g: Graph) -> Self {
        match g {
            Graph::Lazy => GraphMode::Lazy,
            Graph::Prebuilt => GraphMode::Prebuilt,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchKind {
    Masked,
    Scaling,
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct XY(Cell);

impl FromStr for XY {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
        let p = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad coordinate {v:?}: {e}"))
        };
        Ok(XY(Cell::new(p(x)?, p(y)?)))
    }
}

#[derive(Debug, Args)]
struct CostArgs {
    /// DEM as an ASCII grid or NNPR file; omitted means synthetic terrain.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Cell size in metres; overrides the ASCII header, defaults to 1 for NNPR.
    #[arg(long)]
    cell_size: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct Query {
    /// Cost map as an ASCII grid or NNPR file (first channel).
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    start: XY,
    #[arg(long)]
    goal: XY,
    #[arg(long, default_value_t = terrapath::search::DEFAULT_OMEGA)]
    omega: f64,
    #[arg(long, value_enum, default_value = "lazy")]
    graph: Graph,
}

impl Query {
    fn config(&self) -> PlannerConfig<f64> {
        PlannerConfig::with_omega(self.omega).with_mode(self.graph.into())
    }
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[command(flatten)]
    query: Query,
    /// Write the path, one `x y` pair per line.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    start: XY,
    #[arg(long)]
    goal: XY,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = terrapath::search::DEFAULT_OMEGA)]
    omega: f64,
    /// Encoding spread as a fraction of the map size.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RegionPlanArgs {
    #[command(flatten)]
    query: Query,
    /// Probability map (NNPR, first channel); omitted means an oracle region.
    #[arg(long)]
    prob: Option<PathBuf>,
    /// Oracle blur sigma in cells.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Label path for reporting MM.
    #[arg(long)]
    label: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "masked")]
    kind: BenchKind,
    /// Dataset directory with a manifest; omitted means freshly generated samples.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Square base cost map for the scaling bench; omitted means synthetic terrain.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Directory of `<name>.prob.nnpr` model outputs; omitted means oracle regions.
    #[arg(long)]
    prob: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = terrapath::search::DEFAULT_OMEGA)]
    omega: f64,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, value_enum, default_value = "prebuilt")]
    graph: Graph,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DynamicArgs {
    /// Base cost map; omitted means synthetic terrain.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    start: Option<XY>,
    #[arg(long)]
    goal: Option<XY>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = terrapath::search::DEFAULT_OMEGA)]
    omega: f64,
    #[arg(long, default_value_t = 45)]
    steps: usize,
    /// One of Astar, AstarNN, Dstar, DstarNN; all four when omitted.
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    prob: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, value_enum, default_value = "lazy")]
    graph: Graph,
    /// Per-frame CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MmArgs {
    #[arg(long)]
    prob: PathBuf,
    #[arg(long)]
    label: PathBuf,
    /// Defaults to the first label cell.
    #[arg(long)]
    start: Option<XY>,
    /// Defaults to the last label cell.
    #[arg(long)]
    goal: Option<XY>,
}

enum Failure {
    NoPath(String),
    Bad(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoPath(_) => Failure::NoPath(e.to_string()),
            e => Failure::Bad(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Bad(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

/// Parses `argv` (program name first), runs the command, returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_OK
            };
        }
    };
    let out = io::stdout();
    let mut out = out.lock();
    let res = match cli.command {
        Command::Cost(a) => cmd_cost(a, &mut out),
        Command::Plan(a) => cmd_plan(a, &mut out),
        Command::SweepOmega(a) => cmd_sweep(a, &mut out),
        Command::GenDataset(a) => cmd_gen(a, &mut out),
        Command::RegionPlan(a) => cmd_region_plan(a, &mut out),
        Command::Bench(a) => cmd_bench(a, &mut out),
        Command::DynamicSim(a) => cmd_dynamic(a, &mut out),
        Command::Mm(a) => cmd_mm(a, &mut out),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(Failure::NoPath(msg)) => {
            eprintln!("terrapath: {msg}");
            EXIT_NO_PATH
        }
        Err(Failure::Bad(msg)) => {
            eprintln!("terrapath: {msg}");
            EXIT_BAD_INPUT
        }
    }
}

fn is_nnpr(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("nnpr"))
}

/// First NNPR channel or an ASCII grid, plus the ASCII cell size when present.
fn read_raster(path: &Path) -> Result<(Raster<f64>, Option<f64>), Error> {
    if is_nnpr(path) {
        let chans = read_nnpr_file(path)?;
        let first = chans
            .first()
            .ok_or_else(|| Error::Format(format!("{} has no channels", path.display())))?;
        Ok((from_f32_raster(first), None))
    } else {
        let g = read_ascii_grid_file(path)?;
        Ok((g.values, Some(g.cell_size)))
    }
}

fn write_raster(
    path: &Path,
    r: &Raster<f64>,
    cell_size: f64,
    format: Option<Format>,
) -> Result<(), Error> {
    let format = format.unwrap_or(if is_nnpr(path) {
        Format::Nnpr
    } else {
        Format::Ascii
    });
    match format {
        Format::Nnpr => write_nnpr_file(path, &[to_f32_raster(r)]),
        Format::Ascii => write_ascii_grid_file(
            path,
            &AsciiGrid {
                values: r.clone(),
                cell_size,
            },
        ),
    }
}

fn load_costmap(path: &Path) -> Result<CostMap<f64>, Error> {
    CostMap::from_raster(read_raster(path)?.0)
}

fn load_prob(path: &Path, width: usize, height: usize) -> Result<RegionProb<f64>, Error> {
    RegionProb::fit(
        ProbabilityMap::from_raster(read_raster(path)?.0)?,
        width,
        height,
    )
}

fn load_path(path: &Path) -> Result<GridPath, Error> {
    GridPath::read_text(BufReader::new(File::open(path)?))
}

fn save_path(path: &Path, p: &GridPath) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    p.write_text(&mut w)?;
    w.flush()?;
    Ok(())
}

/// CSV to `out` when given, otherwise to `fallback`.
fn emit_csv<I: IntoIterator<Item = String>>(
    out: Option<&Path>,
    fallback: &mut dyn Write,
    header: &str,
    rows: I,
) -> Result<(), Error> {
    match out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write_csv(&mut w, header, rows)?;
            w.flush()?;
            Ok(())
        }
        None => write_csv(fallback, header, rows),
    }
}

fn cmd_cost(a: CostArgs, out: &mut dyn Write) -> CliResult {
    let dem = match &a.map {
        Some(p) => {
            let (heights, cs) = read_raster(p)?;
            let cs = a.cell_size.or(cs).unwrap_or(1.0);
            Dem::new(heights.width(), heights.height(), cs, heights.into_vec())?
        }
        None => synth_terrain::<f64>(a.seed, a.size, 1.0)?,
    };
    let cm = compute_cost_map(&dem, &TerrainParams::default())?;
    write_raster(&a.out, cm.raster(), dem.cell_size(), a.format)?;
    writeln!(
        out,
        "size={}x{} obstacles={:.4} out={}",
        cm.width(),
        cm.height(),
        cm.obstacle_fraction(),
        a.out.display()
    )?;
    Ok(())
}

fn cmd_plan(a: PlanArgs, out: &mut dyn Write) -> CliResult {
    let cm = load_costmap(&a.query.map)?;
    let t0 = Instant::now();
    let res = astar_plan(
        &cm,
        a.query.start.0,
        a.query.goal.0,
        &a.query.config(),
        None,
    )?;
    let secs = t0.elapsed().as_secs_f64();
    writeln!(
        out,
        "L={} CC={} weighted={} time={:.6}s expansions={}",
        res.stats.length, res.stats.cc, res.stats.weighted_cost, secs, res.telemetry.expansions
    )?;
    if let Some(p) = &a.out {
        save_path(p, &res.path)?;
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> CliResult {
    let cm = load_costmap(&a.map)?;
    let sweep: OmegaSweep<f64> = sweep_omega(
        &cm,
        a.start.0,
        a.goal.0,
        &default_omega_grid(),
        &PlannerConfig::default(),
    )?;
    emit_csv(
        a.out.as_deref(),
        out,
        OmegaSweep::<f64>::CSV_HEADER,
        sweep.csv_rows(),
    )?;
    let line = format!(
        "omega_star={} interior={}",
        sweep.omega_star,
        sweep.star_is_interior()
    );
    if a.out.is_some() {
        writeln!(out, "{line}")?;
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> CliResult {
    let mut spec = DatasetSpec::new(a.count, a.size, a.seed);
    spec.omega = a.omega;
    if let Some(s) = a.sigma {
        spec.sigma_fraction = s;
    }
    let entries = write_dataset(&spec, &a.out)?;
    writeln!(
        out,
        "samples={} manifest={}",
        entries.len(),
        a.out.join(MANIFEST_NAME).display()
    )?;
    Ok(())
}

fn cmd_region_plan(a: RegionPlanArgs, out: &mut dyn Write) -> CliResult {
    let q = &a.query;
    let cm = load_costmap(&q.map)?;
    let cfg = q.config();
    let prob = match &a.prob {
        Some(p) => load_prob(p, cm.width(), cm.height())?,
        None => {
            let label = astar_plan(&cm, q.start.0, q.goal.0, &cfg, None)?.path;
            RegionProb::new(
                oracle_region(&label, cm.width(), cm.height(), 3, a.sigma)?,
                false,
            )
        }
    };
    let t0 = Instant::now();
    let sel = prob.select(q.start.0, q.goal.0, &ThresholdPolicy::default())?;
    let res = astar_plan(&cm, q.start.0, q.goal.0, &cfg, Some(sel.mask()))?;
    let secs = t0.elapsed().as_secs_f64();
    let td = sel
        .td()
        .map(|t| t.to_string())
        .unwrap_or_else(|| "fallback".into());
    write!(
        out,
        "L={} CC={} weighted={} time={:.6}s td={} area={}",
        res.stats.length,
        res.stats.cc,
        res.stats.weighted_cost,
        secs,
        td,
        sel.mask().area()
    )?;
    if let Some(l) = &a.label {
        let mm: f64 = model_metric(&load_path(l)?, sel.mask())?;
        write!(out, " mm={mm}")?;
    }
    writeln!(out)?;
    if let Some(p) = &a.out {
        save_path(p, &res.path)?;
    }
    Ok(())
}

fn bench_cases(a: &BenchArgs) -> Result<Vec<BenchCase<f64>>, Error> {
    match &a.dataset {
        Some(dir) => read_manifest(dir.join(MANIFEST_NAME))?
            .iter()
            .map(|e| load_sample::<f64>(dir, e).map(BenchCase::from))
            .collect(),
        None => {
            let mut spec = DatasetSpec::new(a.count, a.size, a.seed);
            spec.omega = a.omega;
            (0..a.count)
                .map(|i| generate_sample::<f64>(&spec, i).map(BenchCase::from))
                .collect()
        }
    }
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> CliResult {
    let cfg = PlannerConfig::with_omega(a.omega).with_mode(a.graph.into());
    match a.kind {
        BenchKind::Masked => {
            let cases = bench_cases(&a)?;
            let source = match &a.prob {
                Some(dir) => RegionSource::ModelFiles(dir.clone()),
                None => RegionSource::Oracle {
                    radius: 3,
                    blur_sigma: a.sigma,
                },
            };
            let rep =
                bench_masked_vs_full(&cases, &source, &ThresholdPolicy::default(), &cfg, a.trials)?;
            emit_csv(
                a.out.as_deref(),
                out,
                MaskedRow::CSV_HEADER,
                rep.rows.iter().map(MaskedRow::csv_row),
            )?;
            eprintln!(
                "pairs={} speedup={:.3} success={:.3} cc_excess_pct={:.4} cost_excess_pct={:.4} mm={:.4} area={:.4}",
                rep.rows.len(),
                rep.speedup(),
                rep.success_rate(),
                rep.mean_cc_excess_pct(),
                rep.mean_cost_excess_pct(),
                rep.mean_mm(),
                rep.mean_area_fraction()
            );
        }
        BenchKind::Scaling => {
            let base = match &a.map {
                Some(p) => load_costmap(p)?,
                None => compute_cost_map(
                    &synth_terrain::<f64>(a.seed, a.size, 1.0)?,
                    &TerrainParams::default(),
                )?,
            };
            let mut sizes = Vec::new();
            let mut s = base.width();
            while s >= 64 && base.width().is_multiple_of(s) {
                sizes.push(s);
                s /= 2;
            }
            sizes.reverse();
            let rows = bench_scaling(&base, &sizes, (0.05, 0.1), (0.9, 0.6), a.omega, a.trials)?;
            emit_csv(
                a.out.as_deref(),
                out,
                ScalingRow::CSV_HEADER,
                rows.iter().map(ScalingRow::csv_row),
            )?;
        }
        BenchKind::Omega => {
            let cases = bench_cases(&a)?;
            let grid = default_omega_grid::<f64>();
            let mut rows = Vec::with_capacity(cases.len());
            for c in &cases {
                let s = sweep_omega(&c.cost, c.start, c.goal, &grid, &cfg)?;
                rows.push(format!(
                    "{},{},{}",
                    c.name,
                    s.omega_star,
                    s.star_is_interior()
                ));
            }
            emit_csv(a.out.as_deref(), out, "name,omega_star,interior", rows)?;
        }
    }
    Ok(())
}

fn cmd_dynamic(a: DynamicArgs, out: &mut dyn Write) -> CliResult {
    let base = match &a.map {
        Some(p) => load_costmap(p)?,
        None => compute_cost_map(
            &synth_terrain::<f64>(a.seed, a.size, 1.0)?,
            &TerrainParams::default(),
        )?,
    };
    let (w, h) = (base.width(), base.height());
    let snap = |c: Cell| {
        snap_to_free(&base, c, 1.0)
            .ok_or_else(|| Error::InvalidInput("map has no free cell".into()))
    };
    let start = match a.start {
        Some(c) => c.0,
        None => snap(Cell::new(w / 16, h / 16))?,
    };
    let goal = match a.goal {
        Some(c) => c.0,
        None => snap(Cell::new(w - 1 - w / 16, h - 1 - h / 16))?,
    };
    let scenario = DynamicScenario::two_rects(base, start, goal, a.seed, a.steps)?;
    let source = match &a.prob {
        Some(dir) => RegionSource::ModelFiles(dir.clone()),
        None => RegionSource::Oracle {
            radius: 3,
            blur_sigma: a.sigma,
        },
    };
    let cfg = SimConfig {
        planner: PlannerConfig::with_omega(a.omega).with_mode(a.graph.into()),
        ..SimConfig::default()
    };
    let methods: Vec<Method> = match a.method {
        Some(m) => vec![m],
        None => Method::ALL.to_vec(),
    };
    let mut frame_rows = Vec::new();
    let mut bench_rows = Vec::new();
    let mut any_failed = None;
    for m in methods {
        let rep = dynamic_sim(&scenario, m, Some(&source), &cfg)?;
        writeln!(
            out,
            "method={} frames={} total_at={:.6} success={} executed_len={}",
            m,
            rep.frames.len(),
            rep.total_at(),
            rep.success,
            rep.executed.len()
        )?;
        if let Some(f) = &rep.failure {
            any_failed.get_or_insert_with(|| format!("{m}: {f}"));
        }
        frame_rows.extend(rep.frames.iter().map(|f| format!("{m},{}", f.csv_row())));
        bench_rows.extend(rep.bench_rows("dynamic", w.max(h)));
    }
    if let Some(p) = &a.out {
        let header = format!("method,{}", FrameRecord::CSV_HEADER);
        emit_csv(Some(p), out, &header, frame_rows)?;
        let summary = p.with_extension("summary.csv");
        emit_csv(
            Some(&summary),
            out,
            BenchRow::CSV_HEADER,
            bench_rows.iter().map(BenchRow::csv_row),
        )?;
    }
    match any_failed {
        Some(msg) => Err(Failure::NoPath(msg)),
        None => Ok(()),
    }
}

fn cmd_mm(a: MmArgs, out: &mut dyn Write) -> CliResult {
    let label = load_path(&a.label)?;
    let (first, last) = match (label.start(), label.goal()) {
        (Some(s), Some(g)) => (s, g),
        _ => return Err(Failure::Bad("label path is empty".into())),
    };
    let prob = ProbabilityMap::from_raster(read_raster(&a.prob)?.0)?;
    let start = a.start.map_or(first, |c| c.0);
    let goal = a.goal.map_or(last, |c| c.0);
    let sel = adaptive_threshold(&prob, start, goal, &ThresholdPolicy::default())?;
    let mm: f64 = model_metric(&label, sel.mask())?;
    writeln!(out, "{mm}")?;
    Ok(())
}
