//! Seeded benchmark matrix: every record reproducible from its cell and
//! seed alone. Emits CSV and JSON-lines with a versioned schema.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ped_core::blocks::{approx_ed, PseudoParams};
use ped_core::detect::detect_single_shot;
use ped_core::distance::{ed_exact, exact_guard};
use ped_core::gen::{generate, random_text, GenKind, GenSpec};
use ped_core::{Prng, Text, WorkMeter};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const BENCH_SCHEMA_VERSION: u32 = 1;

/// Guard for exact-distance computations triggered from bench cells.
const BENCH_EXACT_CELL_LIMIT: usize = 1 << 26;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchAlgorithm {
    Approx,
    Exact,
    Detect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchCell {
    pub id: String,
    #[serde(flatten)]
    pub kind: GenKind,
    pub n: usize,
    #[serde(default = "default_alphabet")]
    pub alphabet: u16,
    pub algorithm: BenchAlgorithm,
    /// 1/p for the approx pipeline.
    #[serde(default)]
    pub inv_p: Option<usize>,
    #[serde(default)]
    pub b: Option<usize>,
    #[serde(default)]
    pub alpha: Option<usize>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    pub seeds: Vec<u64>,
    /// Also run the exact DP for the ratio column (guarded).
    #[serde(default)]
    pub compute_exact: bool,
}

fn default_alphabet() -> u16 {
    4
}

fn default_reps() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub schema_version: u32,
    pub cells: Vec<BenchCell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub schema_version: u32,
    pub cell_id: String,
    pub algorithm: String,
    pub kind: String,
    pub n: usize,
    pub alphabet: u16,
    pub seed: u64,
    pub inv_p: Option<usize>,
    pub b: Option<usize>,
    pub alpha: Option<usize>,
    pub true_distance: Option<usize>,
    pub estimate: usize,
    pub ratio: Option<f64>,
    pub work_units: u64,
    pub wall_time_ms: f64,
}

fn kind_name(kind: &GenKind) -> &'static str {
    match kind {
        GenKind::UniformRandom => "uniform-random",
        GenKind::EditsFromX { .. } => "edits-from-x",
        GenKind::Smoothed { .. } => "smoothed",
        GenKind::PlantedDuplicates { .. } => "planted-duplicates",
    }
}

/// Instantiate the cell's pair for one seed. Kinds that generate a
/// single string are benchmarked against an independent uniform string
/// of the same length.
fn instantiate(cell: &BenchCell, seed: u64) -> Result<(Text, Text)> {
    let spec = GenSpec {
        kind: cell.kind.clone(),
        n: cell.n,
        alphabet: cell.alphabet,
        seed,
    };
    let (x, y) = generate(&spec)?;
    let y = match y {
        Some(y) => y,
        None => {
            let mut rng = Prng::from_seed(seed ^ 0x9e3779b97f4a7c15);
            random_text(&mut rng, x.len(), cell.alphabet)
        }
    };
    Ok((x, y))
}

fn run_one(cell: &BenchCell, seed: u64, force: bool) -> Result<BenchRecord> {
    let (x, y) = instantiate(cell, seed)?;
    let mut meter = WorkMeter::new();
    let start = Instant::now();
    let estimate = match cell.algorithm {
        BenchAlgorithm::Approx => {
            let inv_p = cell
                .inv_p
                .with_context(|| format!("cell {}: approx needs inv_p", cell.id))?;
            let b = cell.b.with_context(|| format!("cell {}: approx needs b", cell.id))?;
            let params = PseudoParams::new(inv_p, b)?;
            let mut rng = Prng::from_seed(seed.wrapping_add(1));
            approx_ed(&x, &y, &params, &mut rng, cell.reps, &mut meter)?.estimate
        }
        BenchAlgorithm::Exact => {
            exact_guard(x.len(), y.len(), BENCH_EXACT_CELL_LIMIT, force)?;
            ed_exact(&x, &y, &mut meter)
        }
        BenchAlgorithm::Detect => {
            let alpha = cell
                .alpha
                .with_context(|| format!("cell {}: detect needs alpha", cell.id))?;
            let mut rng = Prng::from_seed(seed.wrapping_add(1));
            detect_single_shot(&x, &y, alpha, &mut rng, 4.0, &mut meter)?.estimate
        }
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let true_distance = if cell.compute_exact && !matches!(cell.algorithm, BenchAlgorithm::Exact) {
        exact_guard(x.len(), y.len(), BENCH_EXACT_CELL_LIMIT, force)?;
        Some(ed_exact(&x, &y, &mut WorkMeter::new()))
    } else if matches!(cell.algorithm, BenchAlgorithm::Exact) {
        Some(estimate)
    } else {
        None
    };
    let ratio = true_distance.map(|d| estimate as f64 / d.max(1) as f64);
    Ok(BenchRecord {
        schema_version: BENCH_SCHEMA_VERSION,
        cell_id: cell.id.clone(),
        algorithm: match cell.algorithm {
            BenchAlgorithm::Approx => "approx".into(),
            BenchAlgorithm::Exact => "exact".into(),
            BenchAlgorithm::Detect => "detect".into(),
        },
        kind: kind_name(&cell.kind).into(),
        n: cell.n,
        alphabet: cell.alphabet,
        seed,
        inv_p: cell.inv_p,
        b: cell.b,
        alpha: cell.alpha,
        true_distance,
        estimate,
        ratio,
        work_units: meter.units(),
        wall_time_ms,
    })
}

const CSV_HEADER: [&str; 15] = [
    "schema_version",
    "cell_id",
    "algorithm",
    "kind",
    "n",
    "alphabet",
    "seed",
    "inv_p",
    "b",
    "alpha",
    "true_distance",
    "estimate",
    "ratio",
    "work_units",
    "wall_time_ms",
];

pub fn run_bench(
    config: &BenchConfig,
    out_csv: &Path,
    out_jsonl: &Path,
    force: bool,
) -> Result<usize> {
    if config.schema_version != BENCH_SCHEMA_VERSION {
        bail!(
            "bench config schema {} unsupported (expected {BENCH_SCHEMA_VERSION})",
            config.schema_version
        );
    }
    let jobs: Vec<(usize, &BenchCell, u64)> = config
        .cells
        .iter()
        .enumerate()
        .flat_map(|(idx, cell)| cell.seeds.iter().map(move |&s| (idx, cell, s)))
        .collect();
    let mut records: Vec<(usize, u64, BenchRecord)> = jobs
        .par_iter()
        .map(|&(idx, cell, seed)| run_one(cell, seed, force).map(|r| (idx, seed, r)))
        .collect::<Result<_>>()?;
    records.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    let mut csv = csv::Writer::from_path(out_csv)
        .with_context(|| format!("creating {}", out_csv.display()))?;
    csv.write_record(CSV_HEADER)?;
    let mut jsonl = String::new();
    for (_, _, rec) in &records {
        csv.write_record([
            rec.schema_version.to_string(),
            rec.cell_id.clone(),
            rec.algorithm.clone(),
            rec.kind.clone(),
            rec.n.to_string(),
            rec.alphabet.to_string(),
            rec.seed.to_string(),
            rec.inv_p.map_or_else(String::new, |v| v.to_string()),
            rec.b.map_or_else(String::new, |v| v.to_string()),
            rec.alpha.map_or_else(String::new, |v| v.to_string()),
            rec.true_distance.map_or_else(String::new, |v| v.to_string()),
            rec.estimate.to_string(),
            rec.ratio.map_or_else(String::new, |v| format!("{v:.6}")),
            rec.work_units.to_string(),
            format!("{:.3}", rec.wall_time_ms),
        ])?;
        jsonl.push_str(&serde_json::to_string(&rec)?);
        jsonl.push('\n');
    }
    csv.flush()?;
    std::fs::write(out_jsonl, jsonl).with_context(|| format!("writing {}", out_jsonl.display()))?;
    Ok(records.len())
}
