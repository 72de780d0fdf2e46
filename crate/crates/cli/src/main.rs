//! `sepkit`: robust linear separators from the command line.
//!
//! Exit codes: 0 ok, 2 usage or parse error, 3 infeasible, 4 schedule
//! violation, 5 internal invariant failure.

mod bench;
mod config;
mod solve;
mod stream;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sepkit::io::parse_dataset;
use sepkit::{Error, LabeledPoint};

use crate::config::{effective_seed, Mode, Problem, ProblemArgs, RunConfig, SearchArg};

#[derive(Parser, Debug)]
#[command(name = "sepkit", version, about = "Exact and approximate robust linear separators")]
struct Cli {
    /// Seed for generated workloads; SEPKIT_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Solve one dataset and print a JSON report.
    Solve {
        #[command(flatten)]
        p: ProblemArgs,
        /// Dataset: CSV `x,y,color` or JSON.
        input: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write a plot of the solution.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Brute-force reference answer.
    Oracle {
        #[command(flatten)]
        p: ProblemArgs,
        input: PathBuf,
        #[arg(long, default_value_t = solve::ORACLE_CAP)]
        cap: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Replay a JSON-lines update stream through the dynamic structures.
    Simulate {
        #[command(flatten)]
        p: ProblemArgs,
        stream: PathBuf,
        /// Points present before the stream starts; they are never deleted.
        #[arg(long)]
        initial: Option<PathBuf>,
        /// Recompute statically after every step and fail on disagreement.
        #[arg(long)]
        verify: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Time solvers on random instances; CSV rows on stdout.
    Bench {
        /// kmm or kmm-approx.
        #[arg(long, value_enum, default_value_t = Problem::Kmm)]
        problem: Problem,
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 200, 400])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Layered SVG of the dataset, its dual arrangements and the k-mis separator.
    Plot {
        #[arg(long, default_value_t = 0)]
        k: usize,
        input: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Write random workloads.
    Generate {
        #[command(subcommand)]
        what: Gen,
    },
}

#[derive(Subcommand, Debug)]
enum Gen {
    /// Random labelled points as CSV.
    Points {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        range: i64,
        /// Allow repeated x coordinates.
        #[arg(long)]
        degenerate: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Sliding-window point stream as JSON lines.
    Window {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 1000)]
        range: i64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> Result<Vec<LabeledPoint>> {
    Ok(parse_dataset(&read(path)?)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

/// Returns the exit code for a successful run.
fn run(cli: Cli) -> Result<u8> {
    let seed = effective_seed(cli.seed)?;
    match cli.cmd {
        Cmd::Solve { p, input, out, svg } => {
            let mut cfg = RunConfig::new(Mode::Solve, &p, seed)?;
            cfg.input = Some(input.clone());
            cfg.output = out.clone();
            cfg.svg = svg.clone();
            let pts = load(&input)?;
            let o = solve::solve(&cfg, &pts)?;
            emit(&out, &json_text(&o.report))?;
            if let Some(path) = &svg {
                let (text, _) = solve::plot(&pts, cfg.k.unwrap_or(pts.len()))?;
                emit(&Some(path.clone()), &text)?;
            }
            Ok(if o.ok { 0 } else { 3 })
        }
        Cmd::Oracle { p, input, cap, out } => {
            let cfg = RunConfig::new(Mode::Oracle, &p, seed)?;
            let pts = load(&input)?;
            let o = solve::oracle(&cfg, &pts, cap)?;
            emit(&out, &json_text(&o.report))?;
            Ok(if o.ok { 0 } else { 3 })
        }
        Cmd::Simulate { p, stream: path, initial, verify, out } => {
            let cfg = RunConfig::new(Mode::Simulate, &p, seed)?;
            let init = match &initial {
                Some(f) => load(f)?,
                None => Vec::new(),
            };
            let ops = stream::parse_stream(&read(&path)?)?;
            let mut w = writer(&out)?;
            stream::simulate(&cfg, &init, &ops, verify, &mut *w)?;
            w.flush()?;
            Ok(0)
        }
        Cmd::Bench { problem, n, k, eps, reps, jobs, out } => {
            let p = ProblemArgs { problem, dim: 2, k: Some(k), eps, tol: None, search: SearchArg::Critical, perturb: None };
            let cfg = RunConfig::new(Mode::Bench, &p, seed)?;
            let mut w = writer(&out)?;
            bench::bench(&n, k, cfg.eps.as_ref(), reps, cfg.seed, jobs, &mut *w)?;
            w.flush()?;
            Ok(0)
        }
        Cmd::Plot { k, input, out } => {
            let pts = load(&input)?;
            let (svg, _) = solve::plot(&pts, k)?;
            emit(&out, &svg)?;
            Ok(0)
        }
        Cmd::Generate { what } => {
            match what {
                Gen::Points { n, range, degenerate, out } => emit(&out, &bench::points_csv(n, range, !degenerate, seed))?,
                Gen::Window { n, window, range, out } => {
                    let mut s = bench::window_stream(n, window, range, seed).join("\n");
                    if !s.is_empty() {
                        s.push('\n');
                    }
                    emit(&out, &s)?
                }
            }
            Ok(0)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Infeasible { .. }) => 3,
        Some(Error::ScheduleViolation(_) | Error::UnknownId(_)) => 4,
        Some(Error::Internal(_) | Error::InfeasibleWedge) => 5,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code(&e);
            let kind = match code {
                3 => "infeasible",
                4 => "schedule_violation",
                5 => "internal",
                _ => "usage",
            };
            let msg = format!("{e:#}");
            eprintln!("{}", serde_json::json!({ "status": "error", "error": kind, "message": msg }));
            ExitCode::from(code)
        }
    }
}
