//! Parameter sweeps over `construct`.
//!
//! Grid points run on a rayon pool whose size can be capped with
//! `NEARORTH_WORKERS`; results are collected in grid order, so the CSV is the
//! same for any worker count.

use rayon::prelude::*;
use serde::Serialize;

use nearorth::analysis::witness_graph;
use nearorth::construction::{build, ConstructionParams};
use nearorth::verify::CheckMode;

use crate::args::SweepArgs;
use crate::commands::ratio_string;
use crate::{pretty_json, Failure, Outcome, Status};

pub const WORKERS_ENV: &str = "NEARORTH_WORKERS";

pub const CSV_HEADER: [&str; 9] = ["p", "t", "m", "n", "k", "d", "size", "retries", "ratio"];

/// Parses `2,3,5`, `3..6` (inclusive), or a mix such as `2,4..6`.
pub fn parse_axis(spec: &str) -> Result<Vec<u64>, Failure> {
    let bad = |piece: &str| Failure::usage(format!("bad grid value `{piece}` in `{spec}`"));
    let mut values = Vec::new();
    for piece in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match piece.split_once("..") {
            Some((lo, hi)) => {
                let lo: u64 = lo.trim().parse().map_err(|_| bad(piece))?;
                let hi: u64 = hi
                    .trim()
                    .trim_start_matches('=')
                    .parse()
                    .map_err(|_| bad(piece))?;
                values.extend(lo..=hi);
            }
            None => values.push(piece.parse().map_err(|_| bad(piece))?),
        }
    }
    Ok(values)
}

#[derive(Clone, Copy, Debug)]
struct Point {
    p: u64,
    t: u64,
    m: u64,
    n: u64,
    k: u64,
    seed: u64,
}

#[derive(Clone, Debug, Serialize)]
struct Record {
    p: u64,
    t: u64,
    m: u64,
    n: u64,
    k: u64,
    seed: u64,
    status: &'static str,
    d: Option<usize>,
    size: Option<usize>,
    retries: Option<usize>,
    ratio: Option<String>,
    ratio_value: Option<f64>,
    error: Option<String>,
}

fn run_point(pt: Point, mode: CheckMode, max_retries: usize) -> Record {
    let mut rec = Record {
        p: pt.p,
        t: pt.t,
        m: pt.m,
        n: pt.n,
        k: pt.k,
        seed: pt.seed,
        status: "error",
        d: None,
        size: None,
        retries: None,
        ratio: None,
        ratio_value: None,
        error: None,
    };
    let outcome = (|| -> Result<(), Failure> {
        let params = ConstructionParams::unpadded(
            pt.p,
            pt.t as usize,
            pt.m as usize,
            pt.n as usize,
            pt.k as usize,
            mode,
        )?;
        rec.d = Some(params.d);
        let run = build(&params, pt.seed, max_retries)?;
        rec.size = Some(run.result.len());
        rec.retries = Some(run.retries_used);
        if !run.verdict.pass {
            rec.status = "fail";
            return Ok(());
        }
        let w = witness_graph(&run.result, params.k, mode)?;
        let (ratio, value) = ratio_string(&w)?;
        rec.ratio = Some(ratio);
        rec.ratio_value = Some(value);
        rec.status = "pass";
        Ok(())
    })();
    if let Err(failure) = outcome {
        rec.status = if failure.code == 2 {
            "inconclusive"
        } else {
            "error"
        };
        rec.error = Some(failure.message);
    }
    rec
}

fn pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        let workers: usize = value.parse().ok().filter(|&w| w > 0).ok_or_else(|| {
            Failure::usage(format!(
                "{WORKERS_ENV} must be a positive integer, got `{value}`"
            ))
        })?;
        builder = builder.num_threads(workers);
    }
    builder
        .build()
        .map_err(|e| Failure::usage(format!("cannot start worker pool: {e}")))
}

pub fn run(a: &SweepArgs) -> Result<Outcome, Failure> {
    let axis = |s: &Option<String>| parse_axis(s.as_deref().expect("resolved"));
    let (ps, ts, ms, ns, ks, seeds) = (
        axis(&a.p)?,
        axis(&a.t)?,
        axis(&a.m)?,
        axis(&a.n)?,
        axis(&a.k)?,
        axis(&a.seeds)?,
    );
    let size = [&ps, &ts, &ms, &ns, &ks, &seeds]
        .iter()
        .try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
    let limit = a.max_points.expect("resolved");
    if size.is_none_or(|s| s > limit) {
        return Err(Failure::usage(format!("grid exceeds --max-points {limit}")));
    }
    let mut points = Vec::new();
    for &p in &ps {
        for &t in &ts {
            for &m in &ms {
                for &n in &ns {
                    for &k in &ks {
                        for &seed in &seeds {
                            points.push(Point {
                                p,
                                t,
                                m,
                                n,
                                k,
                                seed,
                            });
                        }
                    }
                }
            }
        }
    }
    let mode: CheckMode = a.mode.expect("resolved").into();
    let max_retries = a.max_retries.expect("resolved");
    let records: Vec<Record> = pool()?.install(|| {
        points
            .par_iter()
            .map(|&pt| run_point(pt, mode, max_retries))
            .collect()
    });

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(CSV_HEADER).expect("in-memory csv");
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &records {
        csv.write_record([
            r.p.to_string(),
            r.t.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            opt(r.d),
            opt(r.size),
            opt(r.retries),
            r.ratio_value.map(|v| format!("{v:.6}")).unwrap_or_default(),
        ])
        .expect("in-memory csv");
    }
    let passed = records.iter().filter(|r| r.status == "pass").count();
    Ok(Outcome {
        status: Status::Pass,
        summary: format!("sweep: {} points, {passed} passed", records.len()),
        files: vec![
            ("sweep.csv".into(), csv.into_inner().expect("in-memory csv")),
            ("sweep.json".into(), pretty_json(&records)),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes() {
        assert_eq!(parse_axis("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_axis("2, 4..5,7").unwrap(), vec![2, 4, 5, 7]);
        assert_eq!(parse_axis("5..4").unwrap(), Vec::<u64>::new());
        assert_eq!(parse_axis("").unwrap(), Vec::<u64>::new());
        assert_eq!(parse_axis("1..=2").unwrap(), vec![1, 2]);
        assert!(parse_axis("x").is_err());
    }
}
