//! One-shot solving, oracle runs and plotting.

use anyhow::Result;
use serde_json::{json, Value};
use sepkit::approx::solve_approx_with;
use sepkit::exact::{solve_exact, solve_exact_with_regions};
use sepkit::geom::{perturb, Color};
use sepkit::hull::{max_margin_static, StripStatus};
use sepkit::oracle::{oracle_1d, oracle_kmm_capped, oracle_minmis, DEFAULT_CAP};
use sepkit::report::{approx_json, error_json, exact_json, oracle_json, result_1d_json, strip_json};
use sepkit::sep1d::{build_1d, Point1D};
use sepkit::{Error, LabeledPoint};

use crate::config::{Problem, RunConfig};

/// A JSON report and whether it is a success.
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

impl Outcome {
    fn from(report: Value) -> Self {
        let ok = report["status"] == "ok";
        Outcome { report, ok }
    }
}

pub fn points_1d(pts: &[LabeledPoint]) -> Vec<Point1D> {
    pts.iter().map(|p| Point1D::new(p.point.x.clone(), p.color, p.id)).collect()
}

fn with_problem(mut v: Value, p: Problem) -> Value {
    v["problem"] = p.name().into();
    v
}

pub fn solve(cfg: &RunConfig, pts: &[LabeledPoint]) -> Result<Outcome> {
    let owned;
    let pts = match &cfg.perturb {
        Some(eta) => {
            owned = perturb(pts, eta);
            &owned[..]
        }
        None => pts,
    };
    if pts.is_empty() {
        return Err(Error::EmptyInput.into());
    }
    let n = pts.len();
    if cfg.dim == 1 {
        let tree = build_1d(&points_1d(pts))?;
        let k = match cfg.problem {
            Problem::Minmis => tree.k_min(),
            Problem::Minmax => n,
            _ => cfg.k.expect("validated"),
        };
        let v = with_problem(result_1d_json(&tree.query(k), k), cfg.problem);
        return Ok(Outcome::from(v));
    }
    let v = match cfg.problem {
        Problem::Maxstrip => {
            let r = max_margin_static(pts);
            let v = strip_json(&r);
            return Ok(Outcome { ok: r.status == StripStatus::Separable, report: v });
        }
        Problem::Kmm => exact_json(&solve_exact_with_regions(pts, cfg.k.expect("validated"))?),
        Problem::Minmax => with_problem(exact_json(&solve_exact_with_regions(pts, n)?), cfg.problem),
        Problem::Minmis => {
            let k_min = solve_exact(pts, 0)?.k_min;
            with_problem(exact_json(&solve_exact_with_regions(pts, k_min)?), cfg.problem)
        }
        Problem::KmmApprox => {
            let k = cfg.k.expect("validated");
            match solve_approx_with(pts, k, cfg.eps.as_ref().expect("validated"), &cfg.approx_options()) {
                Ok(r) => approx_json(&r, None),
                Err(e @ Error::Infeasible { .. }) => with_problem(error_json(&e), cfg.problem),
                Err(e) => return Err(e.into()),
            }
        }
        Problem::Lp => anyhow::bail!("lp takes a line stream; use simulate"),
    };
    Ok(Outcome::from(v))
}

pub fn oracle(cfg: &RunConfig, pts: &[LabeledPoint], cap: usize) -> Result<Outcome> {
    if pts.is_empty() {
        return Err(Error::EmptyInput.into());
    }
    let n = pts.len();
    if cfg.dim == 1 {
        let p1 = points_1d(pts);
        let k = match cfg.problem {
            Problem::Minmis => oracle_1d(&p1, 0).k_min,
            Problem::Minmax => n,
            _ => cfg.k.expect("validated"),
        };
        return Ok(Outcome::from(oracle_json(&oracle_1d(&p1, k))));
    }
    let r = match cfg.problem {
        Problem::Kmm => oracle_kmm_capped(pts, cfg.k.expect("validated"), cap)?,
        Problem::Minmax => oracle_kmm_capped(pts, n, cap)?,
        Problem::Minmis => {
            if n > cap {
                return Err(Error::CapExceeded { n, cap }.into());
            }
            oracle_minmis(pts)
        }
        p => anyhow::bail!("no oracle for {}", p.name()),
    };
    Ok(Outcome::from(oracle_json(&r)))
}

pub const ORACLE_CAP: usize = DEFAULT_CAP;

/// SVG of the dataset with the exact k-mis separator, if one exists.
pub fn plot(pts: &[LabeledPoint], k: usize) -> Result<(String, Value)> {
    if pts.is_empty() {
        return Err(Error::EmptyInput.into());
    }
    let has = |c| pts.iter().any(|p: &LabeledPoint| p.color == c);
    let (rep, sep) = if has(Color::Red) && has(Color::Blue) {
        let r = solve_exact_with_regions(pts, k)?;
        let sep = r.separator();
        (exact_json(&r), sep)
    } else {
        (json!({ "status": "error", "error": "empty_color" }), None)
    };
    Ok((sepkit::svg::plot_svg(pts, k, sep.as_ref())?, rep))
}
