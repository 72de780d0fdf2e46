//! Update streams: JSON lines of inserts, deletes and queries driving the
//! semi-online structures.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;
use serde_json::{json, Value};
use sepkit::approx::{make_tgon, solve_approx_tgon, ApproxReport, DynApproxState, TGon};
use sepkit::exact::solve_exact;
use sepkit::geom::{split_colors, Color, LineR2, PointR2};
use sepkit::hull::{max_margin_static, MarginState};
use sepkit::lpviol::{static_leftmost_valid, DynMode, DynOp, DynState, ConstraintSet};
use sepkit::oracle::{oracle_1d, oracle_kmm_capped};
use sepkit::rat::parse_rat;
use sepkit::report::{approx_json, exact_json, lp_json, result_1d_json, strip_json};
use sepkit::sep1d::{build_1d, Point1D, Tree1D};
use sepkit::workload::PointOp;
use sepkit::{Error, LabeledPoint};

use crate::config::{Problem, RunConfig};
use crate::solve::{points_1d, ORACLE_CAP};

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum StreamOp {
    Insert {
        color: String,
        #[serde(default)]
        m: Option<String>,
        #[serde(default)]
        c: Option<String>,
        #[serde(default)]
        x: Option<String>,
        #[serde(default)]
        y: Option<String>,
        #[serde(default)]
        delete_at: Option<u64>,
    },
    Delete {
        id: usize,
    },
    Query {
        #[serde(default)]
        k: Option<usize>,
    },
}

pub fn parse_stream(text: &str) -> Result<Vec<StreamOp>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("stream line {}: {e}", i + 1)).into()))
        .collect()
}

fn req(v: &Option<String>, name: &str) -> Result<sepkit::Rat> {
    let s = v.as_deref().ok_or_else(|| Error::Parse(format!("insert needs field {name:?}")))?;
    Ok(parse_rat(s)?)
}

/// Semi-online deletion rule: not earlier than announced, never for permanent items.
#[derive(Default)]
struct Schedule {
    due: HashMap<usize, Option<u64>>,
}

impl Schedule {
    fn check_delete(&self, id: usize, t: u64) -> Result<(), Error> {
        match self.due.get(&id) {
            None => Err(Error::UnknownId(id)),
            Some(None) => Err(Error::ScheduleViolation(format!("id {id} was inserted without a deletion time"))),
            Some(Some(d)) if *d > t => Err(Error::ScheduleViolation(format!("id {id} deleted at update {t}, announced for {d}"))),
            Some(_) => Ok(()),
        }
    }
}

enum Engine {
    Lp { st: DynState, k: usize },
    Approx { st: DynApproxState, tg: TGon, k: usize },
    OneD { tree: Tree1D, k: Option<usize>, problem: Problem },
    Strip { st: MarginState },
    Exact { pts: BTreeMap<usize, LabeledPoint>, k: Option<usize>, problem: Problem },
}

pub struct Simulator {
    engine: Engine,
    verify: bool,
    schedule: Schedule,
    updates: u64,
    next_id: usize,
}

fn approx_value(r: &Option<ApproxReport>) -> Value {
    match r {
        Some(r) => approx_json(r, None),
        None => json!({ "status": "infeasible" }),
    }
}

impl Simulator {
    pub fn new(cfg: &RunConfig, initial: &[LabeledPoint], verify: bool) -> Result<Self> {
        let next_id = initial.iter().map(|p| p.id + 1).max().unwrap_or(0);
        let mut schedule = Schedule::default();
        for p in initial {
            schedule.due.insert(p.id, None);
        }
        let none = HashMap::new();
        let engine = match (cfg.problem, cfg.dim) {
            (Problem::Lp, _) => {
                if !initial.is_empty() {
                    anyhow::bail!("lp streams start empty; insert lines through the stream");
                }
                let k = cfg.k.expect("validated");
                Engine::Lp { st: DynState::build(&ConstraintSet::new(vec![], vec![]), &none, DynMode::Fixed(k))?, k }
            }
            (Problem::KmmApprox, _) => {
                let eps = cfg.eps.as_ref().expect("validated");
                let k = cfg.k.expect("validated");
                let st = DynApproxState::build(initial, k, eps, &none, cfg.approx_options())?;
                Engine::Approx { st, tg: make_tgon(eps)?, k }
            }
            (p, 1) => Engine::OneD { tree: build_1d(&points_1d(initial))?, k: cfg.k, problem: p },
            (Problem::Maxstrip, _) => Engine::Strip { st: MarginState::build(initial)? },
            (p, _) => Engine::Exact { pts: initial.iter().map(|p| (p.id, p.clone())).collect(), k: cfg.k, problem: p },
        };
        Ok(Simulator { engine, verify, schedule, updates: 0, next_id })
    }

    /// Applies one operation; returns the output line.
    pub fn step(&mut self, op: &StreamOp) -> Result<Value> {
        let mut line = match op {
            StreamOp::Insert { color, m, c, x, y, delete_at } => {
                let color = Color::from_letter(color)?;
                if let Some(d) = delete_at {
                    if *d <= self.updates + 1 {
                        return Err(Error::ScheduleViolation(format!("deletion time {d} is not after the insertion")).into());
                    }
                }
                self.updates += 1;
                let id = self.insert(color, (m, c), (x, y), *delete_at)?;
                self.schedule.due.insert(id, *delete_at);
                json!({ "step": self.updates, "op": "insert", "id": id })
            }
            StreamOp::Delete { id } => {
                self.schedule.check_delete(*id, self.updates + 1)?;
                self.updates += 1;
                self.delete(*id)?;
                self.schedule.due.remove(id);
                json!({ "step": self.updates, "op": "delete", "id": id })
            }
            StreamOp::Query { k } => json!({ "step": self.updates, "op": "query", "k": k }),
        };
        let qk = match op {
            StreamOp::Query { k } => *k,
            _ => None,
        };
        let (result, verified) = self.result(qk)?;
        line["result"] = result;
        if let Some(v) = verified {
            line["verified"] = v.into();
        }
        Ok(line)
    }

    fn insert(&mut self, color: Color, (m, c): (&Option<String>, &Option<String>), (x, y): (&Option<String>, &Option<String>), delete_at: Option<u64>) -> Result<usize> {
        if let Engine::Lp { st, .. } = &mut self.engine {
            let line = LineR2::new(req(m, "m")?, req(c, "c")?);
            let id = st.update(DynOp::Insert { color, line, delete_at })?.ok_or_else(|| anyhow!("insert returned no id"))?;
            return Ok(id);
        }
        let id = self.next_id;
        self.next_id += 1;
        let xv = req(x, "x")?;
        let yv = match (&self.engine, y) {
            (Engine::OneD { .. }, None) => sepkit::rat::int(0),
            _ => req(y, "y")?,
        };
        let p = LabeledPoint { point: PointR2::new(xv, yv), color, id };
        match &mut self.engine {
            Engine::Lp { .. } => unreachable!(),
            Engine::Approx { st, .. } => st.update(&PointOp::Insert { point: p, delete_at })?,
            Engine::OneD { tree, .. } => tree.insert(Point1D::new(p.point.x, color, id))?,
            Engine::Strip { st } => {
                sepkit::hull::margin_insert(st, &p)?;
            }
            Engine::Exact { pts, .. } => {
                pts.insert(id, p);
            }
        }
        Ok(id)
    }

    fn delete(&mut self, id: usize) -> Result<()> {
        match &mut self.engine {
            Engine::Lp { st, .. } => {
                st.update(DynOp::Delete { id })?;
            }
            Engine::Approx { st, .. } => st.update(&PointOp::Delete { id })?,
            Engine::OneD { tree, .. } => {
                tree.delete(id)?;
            }
            Engine::Strip { st } => {
                sepkit::hull::margin_delete(st, id)?;
            }
            Engine::Exact { pts, .. } => {
                pts.remove(&id).ok_or(Error::UnknownId(id))?;
            }
        }
        Ok(())
    }

    /// Current result and, with verification on, whether a static recomputation agrees.
    fn result(&self, query_k: Option<usize>) -> Result<(Value, Option<bool>)> {
        let verify = self.verify;
        Ok(match &self.engine {
            Engine::Lp { st, k } => {
                let k = match query_k {
                    Some(q) if q > *k => anyhow::bail!("query budget {q} exceeds the maintained budget {k}"),
                    q => q.unwrap_or(*k),
                };
                let got = st.query(k)?;
                let ok = verify.then(|| got == static_leftmost_valid(&st.live_set(), k));
                (lp_json(&got), ok)
            }
            Engine::Approx { st, tg, k } => {
                let got = st.report()?;
                let ok = if verify {
                    let live = st.live_points();
                    let (r, b) = split_colors(&live);
                    let want = if r.is_empty() || b.is_empty() {
                        None
                    } else {
                        match solve_approx_tgon(&live, *k, tg, &Default::default()) {
                            Ok(w) => Some(w),
                            Err(Error::Infeasible { .. }) => None,
                            Err(e) => return Err(e.into()),
                        }
                    };
                    Some(got.as_ref().map(|g| &g.approx_err) == want.as_ref().map(|w| &w.approx_err))
                } else {
                    None
                };
                (approx_value(&got), ok)
            }
            Engine::OneD { tree, k, problem } => {
                let k = match problem {
                    Problem::Minmis => tree.k_min(),
                    Problem::Minmax => tree.len(),
                    _ => query_k.or(*k).expect("validated"),
                };
                let got = tree.query(k);
                let ok = verify.then(|| {
                    let want = oracle_1d(&tree.points(), k).result_1d();
                    (got.separator_x.is_some(), &got.max_dist) == (want.separator_x.is_some(), &want.max_dist)
                });
                (result_1d_json(&got, k), ok)
            }
            Engine::Strip { st } => {
                let got = st.result();
                let ok = verify.then(|| {
                    let want = max_margin_static(&st.points());
                    (want.status, &want.width_sq) == (got.status, &got.width_sq)
                });
                (strip_json(&got), ok)
            }
            Engine::Exact { pts, k, problem } => {
                let live: Vec<LabeledPoint> = pts.values().cloned().collect();
                let (r, b) = split_colors(&live);
                if r.is_empty() || b.is_empty() {
                    return Ok((json!({ "status": "empty_color" }), None));
                }
                let k = match problem {
                    Problem::Minmis => solve_exact(&live, 0)?.k_min,
                    Problem::Minmax => live.len(),
                    _ => query_k.or(*k).expect("validated"),
                };
                let got = solve_exact(&live, k)?;
                // the static solver is the maintained result; check it against the oracle when small
                let ok = if verify && live.len() <= ORACLE_CAP {
                    let want = oracle_kmm_capped(&live, k, ORACLE_CAP)?;
                    Some(got.max_sq() == want.feasible.then_some(&want.value))
                } else {
                    None
                };
                (exact_json(&got), ok)
            }
        })
    }
}

/// Runs a whole stream, writing one JSON line per operation.
pub fn simulate(cfg: &RunConfig, initial: &[LabeledPoint], ops: &[StreamOp], verify: bool, out: &mut dyn Write) -> Result<()> {
    let mut sim = Simulator::new(cfg, initial, verify)?;
    for (i, op) in ops.iter().enumerate() {
        let line = sim.step(op).with_context(|| format!("stream operation {}", i + 1))?;
        writeln!(out, "{line}")?;
        if line.get("verified") == Some(&Value::Bool(false)) {
            return Err(Error::Internal(format!("verification failed at stream operation {}", i + 1)).into());
        }
    }
    Ok(())
}
