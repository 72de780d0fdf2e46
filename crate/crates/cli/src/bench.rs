//! Timing runs and workload generation.

use std::io::Write;
use std::time::Instant;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sepkit::approx::{make_tgon, solve_approx_tgon, ApproxOptions};
use sepkit::exact::solve_exact;
use sepkit::rat::rat_str;
use sepkit::workload::random_points;
use sepkit::{Error, LabeledPoint, Rat};

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub solver: &'static str,
    pub seed: u64,
    pub wall_ms: f64,
    pub candidates: usize,
}

/// Points with distinct x in a box that grows with n.
pub fn instance(n: usize, seed: u64) -> Vec<LabeledPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_points(&mut rng, n, (2 * n as i64).max(50), true)
}

fn run_one(n: usize, k: usize, eps: Option<&Rat>, seed: u64) -> Result<BenchRow> {
    let pts = instance(n, seed);
    let start = Instant::now();
    let (solver, candidates) = match eps {
        None => {
            let r = solve_exact(&pts, k)?;
            let c = r.counts;
            ("exact", c.a + c.b + c.c + c.d + c.probe)
        }
        Some(e) => {
            let tg = make_tgon(e)?;
            match solve_approx_tgon(&pts, k, &tg, &ApproxOptions::default()) {
                Ok(_) | Err(Error::Infeasible { .. }) => {}
                Err(e) => return Err(e.into()),
            }
            ("approx", tg.wedges.len())
        }
    };
    Ok(BenchRow { n, k, solver, seed, wall_ms: start.elapsed().as_secs_f64() * 1e3, candidates })
}

/// One row per (n, rep); `jobs > 1` spreads runs over threads.
pub fn bench(ns: &[usize], k: usize, eps: Option<&Rat>, reps: usize, seed: u64, jobs: usize, out: &mut dyn Write) -> Result<Vec<BenchRow>> {
    let tasks: Vec<(usize, u64)> = ns.iter().flat_map(|&n| (0..reps as u64).map(move |r| (n, seed.wrapping_add(r)))).collect();
    let jobs = jobs.max(1).min(tasks.len().max(1));
    let rows: Vec<Result<BenchRow>> = if jobs == 1 {
        tasks.iter().map(|&(n, s)| run_one(n, k, eps, s)).collect()
    } else {
        let chunk = tasks.len().div_ceil(jobs);
        std::thread::scope(|sc| {
            let hs: Vec<_> = tasks
                .chunks(chunk)
                .map(|c| sc.spawn(move || c.iter().map(|&(n, s)| run_one(n, k, eps, s)).collect::<Vec<_>>()))
                .collect();
            hs.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
        })
    };
    writeln!(out, "n,k,solver,seed,wall_ms,candidates")?;
    let mut done = Vec::new();
    for r in rows {
        let r = r?;
        writeln!(out, "{},{},{},{},{:.3},{}", r.n, r.k, r.solver, r.seed, r.wall_ms, r.candidates)?;
        done.push(r);
    }
    Ok(done)
}

/// Sliding window: after the first `window` arrivals every arrival is followed
/// by the deletion of the oldest point, whose deletion time is announced on insert.
pub fn window_stream(n: usize, window: usize, range: i64, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = window.max(1);
    let mut xs = std::collections::HashSet::new();
    let mut lines = Vec::new();
    // deletion of point j happens right after arrival j + window
    let plan: Vec<(bool, usize)> = (0..n)
        .flat_map(|i| {
            let mut v = vec![(true, i)];
            if i >= window {
                v.push((false, i - window));
            }
            v
        })
        .collect();
    let mut del_time = vec![None; n];
    for (step, (ins, j)) in plan.iter().enumerate() {
        if !*ins {
            del_time[*j] = Some(step as u64 + 1);
        }
    }
    for (ins, j) in plan {
        if ins {
            let x = loop {
                let x = rng.gen_range(-range..=range);
                if xs.insert(x) {
                    break x;
                }
            };
            let y = rng.gen_range(-range..=range);
            let c = if rng.gen() { "R" } else { "B" };
            let mut v = json!({ "op": "insert", "color": c, "x": x.to_string(), "y": y.to_string() });
            if let Some(d) = del_time[j] {
                v["delete_at"] = d.into();
            }
            lines.push(v.to_string());
        } else {
            lines.push(json!({ "op": "delete", "id": j }).to_string());
        }
    }
    lines
}

pub fn points_csv(n: usize, range: i64, general: bool, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_points(&mut rng, n, range, general);
    let mut s = String::from("x,y,color\n");
    for p in pts {
        s.push_str(&format!("{},{},{}\n", rat_str(&p.point.x), rat_str(&p.point.y), p.color.letter()));
    }
    s
}
