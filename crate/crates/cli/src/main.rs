mod bench;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ped_core::audit::{audit_exact, audit_sampled};
use ped_core::blocks::{approx_ed, PseudoParams};
use ped_core::clean::{alignment_cost, matrix_oracle, solve_clean_alignment};
use ped_core::detect::{detect_single_shot, preprocess_source, query_source, SourceProfile};
use ped_core::distance::{ed_exact, ed_exact_with_script, exact_guard};
use ped_core::gen::{GenKind, GenSpec};
use ped_core::{Error as CoreError, Prng, WorkMeter};
use serde_json::json;

/// Edit distance approximation for pseudorandom strings.
#[derive(Debug, Parser)]
#[command(name = "ped", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Override size guards on quadratic operations.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// File holding the first string (one string per file).
    #[arg(long)]
    x: PathBuf,
    /// File holding the second string.
    #[arg(long)]
    y: PathBuf,
    /// Declared alphabet size; auto-detected from the files if absent.
    #[arg(long)]
    alphabet: Option<u16>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact edit distance (quadratic DP; guarded).
    Exact {
        #[command(flatten)]
        pair: PairArgs,
        /// Write the optimal edit script as JSON.
        #[arg(long)]
        emit_script: Option<PathBuf>,
    },
    /// Block-pipeline approximation with known (p, B).
    Approx {
        #[command(flatten)]
        pair: PairArgs,
        /// p as a ratio, e.g. 1/4.
        #[arg(long)]
        p: String,
        #[arg(long)]
        b: usize,
        /// Pipeline repetitions; default ceil(log2 n).
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        emit_script: Option<PathBuf>,
    },
    /// Run the clean-alignment solver on an explicit 0/1 matrix.
    CleanAlign {
        /// Matrix file: one row per u-letter, '0'/'1' per v-letter.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 100)]
        attempts_coeff: u32,
    },
    /// Audit the pseudorandomness hypothesis for a string.
    Audit {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        alphabet: Option<u16>,
        #[arg(long)]
        p: String,
        #[arg(long)]
        b: usize,
        /// Exhaustive audit (default).
        #[arg(long, conflicts_with = "sampled")]
        exact: bool,
        /// Sampled audit; requires --threshold.
        #[arg(long)]
        sampled: bool,
        /// Mass threshold for the sampled audit.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Single-shot estimate without knowing B.
    Detect {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        alpha: usize,
    },
    /// Find a usable block size for a source string.
    Preprocess {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        alphabet: Option<u16>,
        #[arg(long)]
        alpha: usize,
        /// Where to store the JSON profile.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate against a preprocessed source string.
    Query {
        #[arg(long)]
        profile: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Generate a seeded instance.
    Gen {
        /// uniform-random | edits-from-x | smoothed | planted-duplicates
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        alphabet: u16,
        #[arg(long)]
        out: PathBuf,
        /// Second string (kinds that produce one).
        #[arg(long)]
        out_y: Option<PathBuf>,
        /// Edit count for edits-from-x.
        #[arg(long)]
        edits: Option<usize>,
        /// Per-letter perturbation probability for smoothed.
        #[arg(long)]
        perturb: Option<f64>,
        /// Block scale for planted-duplicates.
        #[arg(long)]
        scale: Option<usize>,
        /// Planted fraction for planted-duplicates.
        #[arg(long, default_value_t = 0.05)]
        fraction: f64,
    },
    /// Run a benchmark matrix from a JSON config.
    Bench {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_jsonl: PathBuf,
    },
}

const EXACT_CELL_GUARD: usize = 1 << 28;
const SCRIPT_CELL_GUARD: usize = 1 << 26;
const LOWER_BOUND_CHECK_CELLS: usize = 1 << 24;

fn default_reps(n: usize) -> usize {
    (n.max(2) as f64).log2().ceil() as usize
}

fn write_script(path: &PathBuf, script: &ped_core::EditScript) -> Result<()> {
    let payload = serde_json::to_string_pretty(script)?;
    std::fs::write(path, payload).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .context("initializing worker pool")?;
    }
    match cli.command {
        Command::Exact { pair, emit_script } => {
            let (x, y) = io::load_pair(&pair.x, &pair.y, pair.alphabet)?;
            let guard = if emit_script.is_some() {
                SCRIPT_CELL_GUARD
            } else {
                EXACT_CELL_GUARD
            };
            exact_guard(x.len(), y.len(), guard, cli.force)?;
            let mut meter = WorkMeter::new();
            let distance = if let Some(path) = emit_script {
                let (d, script) = ed_exact_with_script(&x, &y, &mut meter);
                write_script(&path, &script)?;
                d
            } else {
                ed_exact(&x, &y, &mut meter)
            };
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "distance": distance,
                        "n": x.len(),
                        "m": y.len(),
                        "work_units": meter.units(),
                    })
                );
            } else {
                println!("{distance}");
            }
        }
        Command::Approx {
            pair,
            p,
            b,
            reps,
            emit_script,
        } => {
            let (x, y) = io::load_pair(&pair.x, &pair.y, pair.alphabet)?;
            let inv_p = PseudoParams::parse_p(&p)?;
            let params = PseudoParams::new(inv_p, b)?;
            if params.was_clamped() {
                eprintln!(
                    "warning: p clamped to 1/{} (p < 1/B leaves uniqueness unchanged)",
                    params.inv_p()
                );
            }
            let reps = reps.unwrap_or_else(|| default_reps(x.len().max(y.len())));
            let mut rng = Prng::from_seed(cli.seed);
            let mut meter = WorkMeter::new();
            let out = approx_ed(&x, &y, &params, &mut rng, reps, &mut meter)?;
            let cells = (x.len() + 1) * (y.len() + 1);
            let lower_bound_checked = if cells <= LOWER_BOUND_CHECK_CELLS {
                let exact = ed_exact(&x, &y, &mut WorkMeter::new());
                anyhow::ensure!(
                    out.estimate >= exact,
                    "estimate {} undercuts exact distance {exact}",
                    out.estimate
                );
                true
            } else {
                false
            };
            if let Some(path) = emit_script {
                write_script(&path, &out.script)?;
            }
            println!(
                "{}",
                json!({
                    "estimate": out.estimate,
                    "exact_lower_bound_checked": lower_bound_checked,
                    "reps": out.repetitions,
                    "seed": cli.seed,
                    "work_units": meter.units(),
                })
            );
        }
        Command::CleanAlign {
            matrix,
            attempts_coeff,
        } => {
            let rows = io::load_matrix(&matrix)?;
            let (u_len, v_len) = (rows.len(), rows[0].len());
            let mut oracle = matrix_oracle(rows);
            let mut rng = Prng::from_seed(cli.seed);
            let alignment = solve_clean_alignment(&mut oracle, &mut rng, attempts_coeff);
            let cost = alignment_cost(&alignment, u_len, v_len);
            let pairs: Vec<(usize, usize)> =
                alignment.pairs().iter().map(|p| (p.x, p.y)).collect();
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "pairs": pairs,
                        "x_portion": cost.x_portion,
                        "y_portion": cost.y_portion,
                        "cost": cost.total,
                        "distinct_queries": oracle.distinct_evals(),
                        "seed": cli.seed,
                    })
                );
            } else {
                println!("cost {} ({} pairs)", cost.total, pairs.len());
                for (i, j) in pairs {
                    println!("{i}\t{j}");
                }
            }
        }
        Command::Audit {
            x,
            alphabet,
            p,
            b,
            exact,
            sampled,
            threshold,
        } => {
            let x = io::load_text(&x, alphabet)?;
            let inv_p = PseudoParams::parse_p(&p)?;
            let params = PseudoParams::new(inv_p, b)?;
            let report = if sampled {
                let threshold = threshold
                    .ok_or_else(|| CoreError::InvalidParam("--sampled needs --threshold".into()))?;
                audit_sampled(&x, &params, threshold, cli.seed)?
            } else {
                let _ = exact; // exhaustive is the default mode
                audit_exact(&x, &params, cli.force)?
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Detect { pair, alpha } => {
            let (x, y) = io::load_pair(&pair.x, &pair.y, pair.alphabet)?;
            let mut rng = Prng::from_seed(cli.seed);
            let mut meter = WorkMeter::new();
            let out = detect_single_shot(&x, &y, alpha, &mut rng, 4.0, &mut meter)?;
            println!(
                "{}",
                json!({
                    "estimate": out.estimate,
                    "exact": out.exact,
                    "detected_b": out.detected_b,
                    "fallback": out.fallback,
                    "levels": out.levels,
                    "seed": cli.seed,
                    "work_units": meter.units(),
                })
            );
        }
        Command::Preprocess {
            x,
            alphabet,
            alpha,
            out,
        } => {
            let x = io::load_text(&x, alphabet)?;
            let mut meter = WorkMeter::new();
            let profile = preprocess_source(&x, alpha, cli.seed, &mut meter)?;
            std::fs::write(&out, serde_json::to_string_pretty(&profile)?)
                .with_context(|| format!("writing {}", out.display()))?;
            if profile.detected_b.is_none() {
                eprintln!("warning: no block size accepted; queries fall back to exact DP");
            }
            println!(
                "{}",
                json!({
                    "detected_b": profile.detected_b,
                    "levels": profile.levels.len(),
                    "profile": out,
                    "work_units": meter.units(),
                })
            );
        }
        Command::Query { profile, pair } => {
            let raw = std::fs::read_to_string(&profile)
                .with_context(|| format!("reading {}", profile.display()))?;
            let profile: SourceProfile = serde_json::from_str(&raw)?;
            let (x, y) = io::load_pair(&pair.x, &pair.y, pair.alphabet)?;
            let mut rng = Prng::from_seed(cli.seed);
            let mut meter = WorkMeter::new();
            let out = query_source(&profile, &x, &y, &mut rng, 4.0, &mut meter)?;
            println!(
                "{}",
                json!({
                    "estimate": out.estimate,
                    "exact": out.exact,
                    "detected_b": out.detected_b,
                    "fallback": out.fallback,
                    "seed": cli.seed,
                    "work_units": meter.units(),
                })
            );
        }
        Command::Gen {
            kind,
            n,
            alphabet,
            out,
            out_y,
            edits,
            perturb,
            scale,
            fraction,
        } => {
            let kind = match kind.as_str() {
                "uniform-random" => GenKind::UniformRandom,
                "edits-from-x" => GenKind::EditsFromX {
                    edits: edits
                        .ok_or_else(|| CoreError::InvalidParam("edits-from-x needs --edits".into()))?,
                },
                "smoothed" => GenKind::Smoothed {
                    perturb: perturb
                        .ok_or_else(|| CoreError::InvalidParam("smoothed needs --perturb".into()))?,
                },
                "planted-duplicates" => GenKind::PlantedDuplicates {
                    scale: scale.ok_or_else(|| {
                        CoreError::InvalidParam("planted-duplicates needs --scale".into())
                    })?,
                    fraction,
                },
                other => {
                    return Err(CoreError::InvalidParam(format!("unknown kind {other:?}")).into())
                }
            };
            let spec = GenSpec {
                kind,
                n,
                alphabet,
                seed: cli.seed,
            };
            let (x, y) = ped_core::gen::generate(&spec)?;
            io::store_text(&out, &x)?;
            match (y, out_y) {
                (Some(y), Some(path)) => io::store_text(&path, &y)?,
                (Some(_), None) => eprintln!("note: kind produces a pair; pass --out-y to keep y"),
                (None, Some(_)) => {
                    return Err(CoreError::InvalidParam(
                        "this kind generates a single string; --out-y is unused".into(),
                    )
                    .into())
                }
                (None, None) => {}
            }
        }
        Command::Bench {
            matrix,
            out_csv,
            out_jsonl,
        } => {
            let raw = std::fs::read_to_string(&matrix)
                .with_context(|| format!("reading {}", matrix.display()))?;
            let config: bench::BenchConfig = serde_json::from_str(&raw)?;
            let written = bench::run_bench(&config, &out_csv, &out_jsonl, cli.force)?;
            eprintln!("{written} records -> {} / {}", out_csv.display(), out_jsonl.display());
        }
    }
    Ok(())
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::SizeGuard { .. } => 3,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
