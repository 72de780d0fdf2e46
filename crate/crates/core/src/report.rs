//! JSON reports. Exact values are strings in canonical `n/d` form; square roots
//! of squared distances are rendered with 12 significant digits.

use serde_json::{json, Map, Value};

use crate::approx::{ApproxReport, Search};
use crate::exact::ExactSolveReport;
use crate::geom::{LineR2, Orientation, PointR2, Separator};
use crate::hull::{Feature, StripResult, StripSeparator, StripStatus};
use crate::lpviol::{LPResult, UnboundedReason};
use crate::oracle::{OracleProblem, OracleReport, Witness};
use crate::rat::{rat_str, sqrt_decimal, Rat};
use crate::sep1d::Result1D;
use crate::Error;

pub const SIG_DIGITS: usize = 12;

pub fn sqrt_str(sq: &Rat) -> String {
    sqrt_decimal(sq, SIG_DIGITS)
}

pub fn orientation_str(o: Orientation) -> &'static str {
    match o {
        Orientation::BlueAbove => "BlueAbove",
        Orientation::RedAbove => "RedAbove",
    }
}

pub fn line_json(l: &LineR2) -> Value {
    json!({ "m": rat_str(&l.m), "c": rat_str(&l.c) })
}

pub fn point_json(p: &PointR2) -> Value {
    json!({ "x": rat_str(&p.x), "y": rat_str(&p.y) })
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("json! object literal"),
    }
}

fn separator_fields(m: &mut Map<String, Value>, s: &Separator) {
    m.insert("line".into(), line_json(&s.line));
    m.insert("orientation".into(), orientation_str(s.orientation).into());
}

/// Report for k-mis MinMax (also used for the unconstrained and MinMis problems).
pub fn exact_json(r: &ExactSolveReport) -> Value {
    let c = &r.counts;
    let mut m = obj(json!({
        "problem": "kmm",
        "k": r.k,
        "k_min": r.k_min,
        "counts": { "a": c.a, "b": c.b, "c": c.c, "d": c.d, "probe": c.probe },
    }));
    match &r.best {
        Some(b) => {
            m.insert("status".into(), "ok".into());
            m.insert("mis".into(), b.mis.into());
            m.insert("max_sq".into(), rat_str(&b.max_sq).into());
            m.insert("max".into(), sqrt_str(&b.max_sq).into());
            separator_fields(&mut m, &b.separator());
            m.insert("dual_point".into(), point_json(&b.location));
        }
        None => {
            m.insert("status".into(), "infeasible".into());
        }
    }
    if let Some(v) = r.valid_regions {
        m.insert("valid_regions".into(), v.into());
    }
    if let Some(e) = &r.escape_sq {
        m.insert("escape_sq".into(), rat_str(e).into());
    }
    Value::Object(m)
}

pub fn approx_json(r: &ApproxReport, k_min: Option<usize>) -> Value {
    let mut m = obj(json!({
        "status": "ok",
        "problem": "kmm-approx",
        "k": r.k,
        "mis": r.mis,
        "max_sq": rat_str(&r.euclid_max_sq),
        "max": sqrt_str(&r.euclid_max_sq),
        "eps": rat_str(&r.eps),
        "t": r.t,
        "wedges": r.wedges,
        "wedge": r.wedge,
        "approx_err": rat_str(&r.approx_err),
        "delta": rat_str(&r.delta),
        "search": match r.search { Search::Critical => "critical", Search::Bisect => "bisect" },
        "misclassified_ids": r.misclassified_ids,
    }));
    separator_fields(&mut m, &r.separator);
    if let Some(k) = k_min {
        m.insert("k_min".into(), k.into());
    }
    Value::Object(m)
}

pub fn infeasible_json(problem: &str, k: usize, k_min: usize) -> Value {
    json!({ "status": "infeasible", "problem": problem, "k": k, "k_min": k_min })
}

pub fn result_1d_json(r: &Result1D, k: usize) -> Value {
    match &r.separator_x {
        Some(x) => json!({
            "status": "ok",
            "problem": "kmm",
            "dim": 1,
            "k": k,
            "mis": r.mis,
            "separator_x": rat_str(x),
            "max_dist": rat_str(&r.max_dist),
            "orientation": orientation_str(r.orientation),
        }),
        None => json!({ "status": "infeasible", "problem": "kmm", "dim": 1, "k": k, "k_min": r.mis }),
    }
}

fn feature_json(f: &Feature) -> Value {
    match f {
        Feature::Vertex(a) => json!([a]),
        Feature::Edge(a, b) => json!([a, b]),
    }
}

pub fn strip_json(r: &StripResult) -> Value {
    let status = match r.status {
        StripStatus::Separable => "ok",
        StripStatus::NotSeparable => "not_separable",
        StripStatus::EmptySide => "empty_side",
    };
    let mut m = obj(json!({ "status": status, "problem": "maxstrip" }));
    if let Some(w) = &r.width_sq {
        m.insert("width_sq".into(), rat_str(w).into());
        m.insert("width".into(), sqrt_str(w).into());
    }
    match &r.separator {
        Some(StripSeparator::Line(s)) => separator_fields(&mut m, s),
        Some(StripSeparator::Vertical { x, blue_on_right }) => {
            m.insert("vertical_x".into(), rat_str(x).into());
            m.insert("blue_on_right".into(), (*blue_on_right).into());
        }
        None => {}
    }
    if let Some(w) = &r.witness {
        m.insert(
            "witness".into(),
            json!({
                "red": feature_json(&w.red),
                "blue": feature_json(&w.blue),
                "red_point": point_json(&w.red_point),
                "blue_point": point_json(&w.blue_point),
            }),
        );
    }
    Value::Object(m)
}

pub fn lp_json(r: &LPResult) -> Value {
    match r {
        LPResult::Feasible { point, violations } => json!({ "status": "ok", "point": point_json(point), "violations": violations }),
        LPResult::Unbounded(why) => json!({
            "status": "unbounded",
            "reason": match why { UnboundedReason::LeftRay => "left_ray", UnboundedReason::EmptySide => "empty_side" },
        }),
        LPResult::Infeasible => json!({ "status": "infeasible" }),
    }
}

pub fn oracle_json(r: &OracleReport) -> Value {
    let problem = match r.problem {
        OracleProblem::OneD => "kmm-1d",
        OracleProblem::MinMis => "minmis",
        OracleProblem::LeftmostValid => "lp",
        OracleProblem::Kmm => "kmm",
    };
    let mut m = obj(json!({
        "status": if r.feasible { "ok" } else { "infeasible" },
        "problem": problem,
        "oracle": true,
        "mis": r.mis,
        "value": rat_str(&r.value),
        "k_min": r.k_min,
        "candidates": r.candidates,
        "skipped": r.skipped,
    }));
    match &r.witness {
        Witness::None => {}
        Witness::Threshold { x, orientation } => {
            m.insert("separator_x".into(), rat_str(x).into());
            m.insert("orientation".into(), orientation_str(*orientation).into());
        }
        Witness::Line(s) => {
            separator_fields(&mut m, s);
            if r.problem == OracleProblem::Kmm && r.feasible {
                m.insert("max_sq".into(), rat_str(&r.value).into());
                m.insert("max".into(), sqrt_str(&r.value).into());
            }
        }
        Witness::Lp { orientation, result } => {
            m.insert("orientation".into(), orientation_str(*orientation).into());
            m.insert("lp".into(), lp_json(result));
        }
    }
    Value::Object(m)
}

/// Machine-readable status for failures.
pub fn error_json(e: &Error) -> Value {
    match e {
        Error::Infeasible { k, k_min } => json!({ "status": "infeasible", "k": k, "k_min": k_min }),
        _ => {
            let kind = match e {
                Error::Parse(_) | Error::DuplicateCoordinate(_) | Error::DuplicateId(_) | Error::EmptyInput => "input",
                Error::EmptyColor => "empty_color",
                Error::NonPositiveEps => "usage",
                Error::UnknownId(_) | Error::ScheduleViolation(_) => "schedule_violation",
                Error::CapExceeded { .. } => "cap_exceeded",
                Error::InfeasibleWedge | Error::Internal(_) | Error::Infeasible { .. } => "internal",
            };
            json!({ "status": "error", "error": kind, "message": e.to_string() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_exact;
    use crate::geom::{Color, LabeledPoint};
    use crate::rat::int;

    fn ds3() -> Vec<LabeledPoint> {
        vec![
            LabeledPoint::ints(0, 0, Color::Red, 0),
            LabeledPoint::ints(2, 2, Color::Red, 1),
            LabeledPoint::ints(0, 2, Color::Blue, 2),
            LabeledPoint::ints(2, 0, Color::Blue, 3),
        ]
    }

    #[test]
    fn exact_fields() {
        let v = exact_json(&solve_exact(&ds3(), 1).unwrap());
        assert_eq!(v["status"], "ok");
        assert_eq!(v["max_sq"], "2");
        assert_eq!(v["max"], "1.41421356237");
        assert_eq!(v["mis"], 1);
        assert_eq!(v["k_min"], 1);
        let v = exact_json(&solve_exact(&ds3(), 0).unwrap());
        assert_eq!(v["status"], "infeasible");
        assert_eq!(v["k_min"], 1);
    }

    #[test]
    fn sqrt_rendering() {
        assert_eq!(sqrt_str(&int(4)), "2");
        assert_eq!(sqrt_str(&int(2)), "1.41421356237");
        assert_eq!(sqrt_str(&int(0)), "0");
    }
}
