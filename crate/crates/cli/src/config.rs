//! Run configuration shared by the subcommands.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use sepkit::approx::{ApproxOptions, Search};
use sepkit::rat::parse_rat;
use sepkit::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// Widest separating strip.
    Maxstrip,
    /// Least farthest-error separator with no budget.
    Minmax,
    /// Fewest misclassifications.
    Minmis,
    /// Least farthest-error separator with at most k misclassifications.
    Kmm,
    /// (1+eps)-approximate kmm.
    KmmApprox,
    /// Leftmost point violating at most k dual constraints (line streams only).
    Lp,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Maxstrip => "maxstrip",
            Problem::Minmax => "minmax",
            Problem::Minmis => "minmis",
            Problem::Kmm => "kmm",
            Problem::KmmApprox => "kmm-approx",
            Problem::Lp => "lp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Solve,
    Simulate,
    Oracle,
    Bench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Critical,
    Bisect,
}

/// Flags common to the solver subcommands.
#[derive(Clone, Debug, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    /// 1 reads only the x column of the dataset.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: u8,
    #[arg(long)]
    pub k: Option<usize>,
    /// Exact decimal or fraction, e.g. 0.1 or 1/10.
    #[arg(long)]
    pub eps: Option<String>,
    /// Relative tolerance of the bisection search.
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long, value_enum, default_value_t = SearchArg::Critical)]
    pub search: SearchArg,
    /// Moves point i by (i·η, i²·η) before solving; η defaults to 1/1000000.
    #[arg(long, num_args = 0..=1, default_missing_value = "1/1000000")]
    pub perturb: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub problem: Problem,
    pub dim: u8,
    pub k: Option<usize>,
    pub eps: Option<Rat>,
    pub tol: Rat,
    pub search: Search,
    pub seed: u64,
    pub perturb: Option<Rat>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(mode: Mode, a: &ProblemArgs, seed: u64) -> Result<Self> {
        let eps = a.eps.as_deref().map(parse_rat).transpose()?;
        let tol = match &a.tol {
            Some(t) => parse_rat(t)?,
            None => ApproxOptions::default().tol,
        };
        let cfg = RunConfig {
            mode,
            problem: a.problem,
            dim: a.dim,
            k: a.k,
            eps,
            tol,
            search: match a.search {
                SearchArg::Critical => Search::Critical,
                SearchArg::Bisect => Search::Bisect,
            },
            seed,
            perturb: a.perturb.as_deref().map(parse_rat).transpose()?,
            input: None,
            output: None,
            svg: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let approx = self.problem == Problem::KmmApprox;
        if approx != self.eps.is_some() {
            bail!("--eps is required for kmm-approx and only accepted there");
        }
        let needs_k = matches!(self.problem, Problem::Kmm | Problem::KmmApprox | Problem::Lp);
        if needs_k && self.k.is_none() {
            bail!("--k is required for {}", self.problem.name());
        }
        if !needs_k && self.k.is_some() {
            bail!("--k is not used by {}", self.problem.name());
        }
        if self.dim == 1 && matches!(self.problem, Problem::Maxstrip | Problem::KmmApprox | Problem::Lp) {
            bail!("{} is only available in the plane", self.problem.name());
        }
        match (self.mode, self.problem) {
            (Mode::Simulate, _) | (_, Problem::Kmm | Problem::Minmax | Problem::Minmis) => {}
            (Mode::Oracle, p) => bail!("no oracle for {}", p.name()),
            (Mode::Solve | Mode::Bench, Problem::Lp) => bail!("lp takes a line stream; use simulate"),
            (Mode::Bench, Problem::Maxstrip) => bail!("bench runs kmm or kmm-approx"),
            _ => {}
        }
        if self.tol <= Rat::from_integer(0.into()) {
            bail!("--tol must be positive");
        }
        Ok(())
    }

    pub fn approx_options(&self) -> ApproxOptions {
        ApproxOptions { search: self.search, tol: self.tol.clone() }
    }
}

/// `SEPKIT_SEED` wins over `--seed`.
pub fn effective_seed(flag: u64) -> Result<u64> {
    match std::env::var("SEPKIT_SEED") {
        Ok(v) => Ok(v.trim().parse().map_err(|_| anyhow::anyhow!("SEPKIT_SEED is not an integer: {v:?}"))?),
        Err(_) => Ok(flag),
    }
}
