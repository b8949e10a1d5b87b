//! Synthetic training samples labelled with optimal A* paths.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{gaussian_encode, EncodingConfig};
use crate::error::{invalid, Error, Result};
use crate::grid::{Cell, Raster};
use crate::io::{from_f32_raster, read_nnpr_file, to_f32_raster, write_nnpr_file};
use crate::scalar::Real;
use crate::search::{astar_plan, GridPath, PlannerConfig, DEFAULT_OMEGA};
use crate::terrain::{compute_cost_map, synth_terrain, CostMap, TerrainParams};

const TERRAIN_ATTEMPTS: usize = 4;
const ENDPOINT_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetSpec {
    pub count: usize,
    pub size: usize,
    pub omega: f64,
    pub seed: u64,
    /// Minimum Euclidean start-goal distance, cells.
    pub min_separation: f64,
    pub ruggedness: f64,
    /// Encoding sigma as a fraction of `size`.
    pub sigma_fraction: f64,
}

impl DatasetSpec {
    pub fn new(count: usize, size: usize, seed: u64) -> Self {
        DatasetSpec {
            count,
            size,
            omega: DEFAULT_OMEGA,
            seed,
            min_separation: size as f64 / 4.0,
            ruggedness: 1.0,
            sigma_fraction: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(invalid("dataset count must be >= 1"));
        }
        if self.size < 8 {
            return Err(invalid("dataset size must be >= 8"));
        }
        if !(self.min_separation >= 0.0
            && self.min_separation < self.size as f64 * std::f64::consts::SQRT_2)
        {
            return Err(invalid("min_separation must lie in [0, size * sqrt 2)"));
        }
        if !(self.omega >= 0.0) || !(self.sigma_fraction > 0.0) {
            return Err(invalid("omega must be >= 0 and sigma_fraction > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub seed: u64,
    pub index: usize,
    pub terrain_seed: u64,
    pub omega: f64,
    pub start: Cell,
    pub goal: Cell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub cost: CostMap<T>,
    pub start_enc: Raster<T>,
    pub goal_enc: Raster<T>,
    pub label: GridPath,
    /// 1 on label cells, 0 elsewhere.
    pub label_raster: Raster<T>,
    pub meta: SampleMeta,
}

impl<T: Real> Sample<T> {
    /// `[cost, start_enc, goal_enc, label_raster]`.
    pub fn channels(&self) -> [&Raster<T>; 4] {
        [
            self.cost.raster(),
            &self.start_enc,
            &self.goal_enc,
            &self.label_raster,
        ]
    }
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Deterministic in `(spec.seed, index)`.
pub fn generate_sample<T: Real>(spec: &DatasetSpec, index: usize) -> Result<Sample<T>> {
    spec.validate()?;
    let mut rng = sample_rng(spec.seed, index);
    let cfg = PlannerConfig::with_omega(T::lit(spec.omega));
    let mut attempts = 0;
    for _ in 0..TERRAIN_ATTEMPTS {
        let terrain_seed: u64 = rng.gen();
        let dem = synth_terrain::<T>(terrain_seed, spec.size, spec.ruggedness)?;
        let cost = compute_cost_map(&dem, &TerrainParams::default())?;
        let free: Vec<Cell> = (0..cost.dims().len())
            .map(|i| cost.dims().cell(i))
            .filter(|c| cost.cost(*c) < T::one())
            .collect();
        if free.len() < 2 {
            attempts += ENDPOINT_ATTEMPTS;
            continue;
        }
        for _ in 0..ENDPOINT_ATTEMPTS {
            attempts += 1;
            let start = *free.choose(&mut rng).expect("non-empty");
            let goal = *free.choose(&mut rng).expect("non-empty");
            if start == goal || start.euclidean(&goal) < spec.min_separation {
                continue;
            }
            let Ok(plan) = astar_plan(&cost, start, goal, &cfg, None) else {
                continue;
            };
            let enc = EncodingConfig::with_fraction(spec.size, T::lit(spec.sigma_fraction));
            let start_enc = gaussian_encode(spec.size, spec.size, start, &enc)?;
            let goal_enc = gaussian_encode(spec.size, spec.size, goal, &enc)?;
            let mut label_raster = Raster::filled(spec.size, spec.size, T::zero());
            for c in &plan.path.cells {
                label_raster.set(*c, T::one());
            }
            return Ok(Sample {
                cost,
                start_enc,
                goal_enc,
                label: plan.path,
                label_raster,
                meta: SampleMeta {
                    seed: spec.seed,
                    index,
                    terrain_seed,
                    omega: spec.omega,
                    start,
                    goal,
                },
            });
        }
    }
    Err(Error::GenerationFailed { attempts })
}

/// One line of `manifest.jsonl`. Paths are relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub sample_path: String,
    pub start: [usize; 2],
    pub goal: [usize; 2],
    pub omega: f64,
    pub seed: u64,
    pub label_path: String,
}

pub const MANIFEST_NAME: &str = "manifest.jsonl";

/// Writes `sample_NNNNN.nnpr` (cost, start/goal encodings, label raster),
/// `sample_NNNNN.path.txt` and `manifest.jsonl` into `dir`.
pub fn write_dataset(spec: &DatasetSpec, dir: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(spec.count);
    for index in 0..spec.count {
        let sample = generate_sample::<f32>(spec, index)?;
        let stem = format!("sample_{index:05}");
        let sample_path = format!("{stem}.nnpr");
        let label_path = format!("{stem}.path.txt");
        let chans: Vec<Raster<f32>> = sample.channels().iter().map(|r| to_f32_raster(r)).collect();
        write_nnpr_file(dir.join(&sample_path), &chans)?;
        sample
            .label
            .write_text(BufWriter::new(File::create(dir.join(&label_path))?))?;
        entries.push(ManifestEntry {
            sample_path,
            start: [sample.meta.start.x, sample.meta.start.y],
            goal: [sample.meta.goal.x, sample.meta.goal.y],
            omega: spec.omega,
            seed: spec.seed,
            label_path,
        });
    }
    let mut w = BufWriter::new(File::create(dir.join(MANIFEST_NAME))?);
    for e in &entries {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(entries)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// A manifest entry read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedSample<T> {
    pub name: String,
    pub cost: CostMap<T>,
    pub start: Cell,
    pub goal: Cell,
    pub omega: f64,
    pub label: GridPath,
}

pub fn load_sample<T: Real>(
    dir: impl AsRef<Path>,
    entry: &ManifestEntry,
) -> Result<LoadedSample<T>> {
    let dir: PathBuf = dir.as_ref().to_path_buf();
    let chans = read_nnpr_file(dir.join(&entry.sample_path))?;
    let cost = CostMap::from_raster(from_f32_raster::<T>(
        chans
            .first()
            .ok_or_else(|| Error::Format("sample has no channels".into()))?,
    ))?;
    let label = GridPath::read_text(BufReader::new(File::open(dir.join(&entry.label_path))?))?;
    let name = Path::new(&entry.sample_path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(LoadedSample {
        name,
        cost,
        start: Cell::new(entry.start[0], entry.start[1]),
        goal: Cell::new(entry.goal[0], entry.goal[1]),
        omega: entry.omega,
        label,
    })
}
