use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use nearorth::analysis::{count_npt, ratio_report, witness_graph, WitnessGraph};
use nearorth::construction::{
    build_with_budget, schedule_f2, schedule_fp, union_bound, ConstructionParams, ConstructionRun,
};
use nearorth::covers::{
    cover_pair_for, f2_cover_dim, f2_cover_member, f2_cover_of, g_inner_identity_check,
};
use nearorth::spectral::{build_gpt, cross_product_bound_check, random_mixing_trials, spectrum};
use nearorth::verify::{
    bipartite_check, build_graph, is_k_nearly_orthogonal, CheckMode, GraphMode,
};
use nearorth::{Error, FpVector, PrimeModulus};

use crate::args::{
    ConstructArgs, CountArgs, CoverOp, CoversArgs, ExportArgs, Format, Mode, ScheduleKind,
    SpectralArgs, VerifyArgs,
};
use crate::config::RunConfig;
use crate::{pretty_json, sweep, Failure, Outcome, Status};

pub fn execute(config: &RunConfig) -> Result<Outcome, Failure> {
    match config {
        RunConfig::Construct(a) => construct(a),
        RunConfig::Verify(a) => verify(a),
        RunConfig::Spectral(a) => spectral(a),
        RunConfig::Covers(a) => covers(a),
        RunConfig::Count(a) => count(a),
        RunConfig::Sweep(a) => sweep::run(a),
        RunConfig::Export(a) => export(a),
    }
}

fn status_of(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn inconclusive(err: &Error) -> Outcome {
    Outcome {
        status: Status::Inconclusive,
        summary: err.to_string(),
        files: vec![(
            "inconclusive.json".into(),
            pretty_json(&json!({ "reason": err.to_string() })),
        )],
    }
}

/// A vector set read from disk, plus the run parameters if it came from a
/// `construct` run file.
pub struct LoadedSet {
    pub vectors: Vec<FpVector>,
    pub run: Option<ConstructionRun>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompactSet {
    p: u64,
    vectors: Vec<Vec<u32>>,
}

/// Accepts a JSON list of vectors (`{"p", "dim", "entries"}` each), a compact
/// `{"p": 3, "vectors": [[1, 0], ...]}` object, or a `run.json`.
pub fn read_set(path: &Path) -> Result<LoadedSet, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| Failure::usage(format!("{}: {e}", path.display()));
    if value.is_array() {
        return Ok(LoadedSet {
            vectors: serde_json::from_value(value).map_err(bad)?,
            run: None,
        });
    }
    if value.get("result").is_some() {
        let run: ConstructionRun = serde_json::from_value(value).map_err(bad)?;
        return Ok(LoadedSet {
            vectors: run.result.clone(),
            run: Some(run),
        });
    }
    let compact: CompactSet = serde_json::from_value(value).map_err(bad)?;
    let p = PrimeModulus::new(compact.p)?;
    let vectors = compact
        .vectors
        .into_iter()
        .map(|entries| FpVector::new(p, entries))
        .collect::<Result<_, _>>()?;
    Ok(LoadedSet { vectors, run: None })
}

fn expect<T>(value: Option<T>) -> T {
    value.expect("resolved config has every field")
}

fn construct(a: &ConstructArgs) -> Result<Outcome, Failure> {
    let p = PrimeModulus::new(expect(a.p))?;
    let k = expect(a.k);
    let mode: CheckMode = expect(a.mode).into();
    let (t, m, n) = match a.schedule {
        None => (expect(a.t), expect(a.m), expect(a.n)),
        Some(kind) => {
            let d = expect(a.d) as u64;
            let s = match kind {
                ScheduleKind::F2 if p.get() != 2 => {
                    return Err(Failure::usage("--schedule f2 requires --p 2"))
                }
                ScheduleKind::F2 => schedule_f2(k as u64, d)?,
                ScheduleKind::Fp => schedule_fp(p, k as u64, d)?,
            };
            let n = usize::try_from(&s.n).map_err(|_| {
                Failure::from(Error::TooLarge {
                    what: "scheduled sample count",
                    size: u128::MAX,
                    limit: usize::MAX as u128,
                })
            })?;
            (s.t as usize, s.m as usize, n)
        }
    };
    let mut params = ConstructionParams::unpadded(p.get() as u64, t, m, n, k, mode)?;
    if let Some(d) = a.d {
        params.d = d;
        params.validate()?;
    }
    let run = match build_with_budget(
        &params,
        expect(a.seed),
        expect(a.max_retries),
        expect(a.budget) as u128,
    ) {
        Err(err @ Error::Inconclusive { .. }) => return Ok(inconclusive(&err)),
        other => other?,
    };
    let summary = format!(
        "construct p={} t={t} m={m} n={n} k={k} d={} mode={:?}: {} distinct vectors, {} attempt(s), union bound log2 = {:.2}",
        p,
        params.d,
        mode,
        run.result.len(),
        run.retries_used,
        union_bound(&params),
    );
    Ok(Outcome {
        status: status_of(run.verdict.pass),
        summary,
        files: vec![
            ("run.json".into(), pretty_json(&run)),
            ("set.json".into(), pretty_json(&run.result)),
        ],
    })
}

fn verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let set = read_set(expect(a.input.as_deref()))?.vectors;
    let k = expect(a.k);
    let mode: CheckMode = expect(a.mode).into();
    let verdict = match mode {
        CheckMode::Clique => is_k_nearly_orthogonal(&set, k)?,
        CheckMode::Bipartite => match bipartite_check(&set, k, expect(a.budget) as u128) {
            Err(err @ Error::Inconclusive { .. }) => return Ok(inconclusive(&err)),
            other => other?,
        },
    };
    let graph = build_graph(&set, GraphMode::NonOrthogonality)?;
    Ok(Outcome {
        status: status_of(verdict.pass),
        summary: format!(
            "verify {} vectors, k={k}, mode={mode:?}: witness {}",
            set.len(),
            verdict
                .witness
                .as_ref()
                .map_or_else(|| "none".to_string(), |w| format!("{w:?}")),
        ),
        files: vec![
            ("verdict.json".into(), pretty_json(&verdict)),
            ("graph.dimacs".into(), graph.to_dimacs().into_bytes()),
        ],
    })
}

fn spectral(a: &SpectralArgs) -> Result<Outcome, Failure> {
    let p = PrimeModulus::new(expect(a.p))?;
    let t = expect(a.t);
    let g = build_gpt(p, t)?;
    let report = spectrum(&g)?;
    let mut pass = report.pass;
    let mut summary = format!(
        "spectral G({p},{t}): {} vertices, degree {}, lambda = {:.6}, bound = {:.6}",
        report.order, report.degree, report.lambda_max_abs_rest, report.vinh_bound
    );
    let mut files = vec![
        ("spectrum.json".to_string(), pretty_json(&report)),
        ("graph.dimacs".to_string(), g.to_dimacs().into_bytes()),
        ("adjacency.txt".to_string(), g.to_dense_text().into_bytes()),
    ];
    let samples = expect(a.mixing_samples);
    if samples > 0 {
        let mixing = random_mixing_trials(&g, report.lambda_max_abs_rest, samples, expect(a.seed))?;
        pass &= mixing.violations == 0;
        summary += &format!(
            ", mixing violations {}/{}",
            mixing.violations, mixing.trials
        );
        files.push(("mixing.json".into(), pretty_json(&mixing)));
    }
    if expect(a.cross) {
        let cross = cross_product_bound_check(p, t, expect(a.seed))?;
        pass &= cross.holds();
        summary += &format!(
            ", cross max {} vs p^(t+2) = {} ({:?})",
            cross.max_product, cross.bound, cross.mode
        );
        files.push(("cross.json".into(), pretty_json(&cross)));
    }
    Ok(Outcome {
        status: status_of(pass),
        summary,
        files,
    })
}

fn covers(a: &CoversArgs) -> Result<Outcome, Failure> {
    match expect(a.op) {
        CoverOp::F2cover => {
            let set = read_set(expect(a.input.as_deref()))?.vectors;
            let t = match (a.t, set.first()) {
                (Some(t), _) => t,
                (None, Some(v)) => v.dim(),
                (None, None) => return Err(Failure::usage("empty set; pass --t")),
            };
            let cover = f2_cover_of(t, &set)?;
            let member = f2_cover_member(t, &set)?;
            let summary = format!(
                "covers f2cover: {} vectors of F_2^{t} lie in a subspace of dimension {} (collection member of dimension {})",
                set.len(),
                cover.rank(),
                member.rank()
            );
            let out =
                json!({ "t": t, "dim_bound": f2_cover_dim(t), "cover": cover, "member": member });
            Ok(Outcome {
                status: Status::Pass,
                summary,
                files: vec![("cover.json".into(), pretty_json(&out))],
            })
        }
        CoverOp::Gcheck => {
            let p = PrimeModulus::new(expect(a.p))?;
            let t = expect(a.t);
            let report = g_inner_identity_check(p, t, expect(a.budget) as u128)?;
            Ok(Outcome {
                status: status_of(report.holds()),
                summary: format!(
                    "covers gcheck ({p},{t}): {} pairs, {} identity and {} biconditional violations",
                    report.pairs_checked, report.identity_violations, report.biconditional_violations
                ),
                files: vec![("gidentity.json".into(), pretty_json(&report))],
            })
        }
        CoverOp::Pair => {
            let a1 = read_set(expect(a.input.as_deref()))?.vectors;
            let a2 = read_set(expect(a.input2.as_deref()))?.vectors;
            let first = a1
                .first()
                .or(a2.first())
                .ok_or_else(|| Failure::usage("both sets are empty"))?;
            let (p, t) = (first.modulus(), a.t.unwrap_or(first.dim()));
            let pair = cover_pair_for(p, t, &a1, &a2)?;
            let bound = (p.get() as u128).pow(t as u32 + 2);
            Ok(Outcome {
                status: Status::Pass,
                summary: format!(
                    "covers pair: |C1| = {}, |C2| = {}, product {} <= p^(t+2) = {bound}",
                    pair.c1.len(),
                    pair.c2.len(),
                    pair.product()
                ),
                files: vec![("pair.json".into(), pretty_json(&pair))],
            })
        }
    }
}

fn count(a: &CountArgs) -> Result<Outcome, Failure> {
    let p = PrimeModulus::new(expect(a.p))?;
    let t = expect(a.t);
    let report = count_npt(p, t)?;
    Ok(Outcome {
        status: Status::Pass,
        summary: format!(
            "count ({p},{t}): {} sets ({} nonempty) over {} vectors, largest set {}",
            report.total_sets,
            report.nonempty_sets,
            report.vertices,
            report.largest_set.len()
        ),
        files: vec![("count.json".into(), pretty_json(&report))],
    })
}

pub fn ratio_string(w: &WitnessGraph) -> Result<(String, f64), Failure> {
    let r = ratio_report(w)?;
    Ok((
        format!("{}/{}", r.numer(), r.denom()),
        *r.numer() as f64 / *r.denom() as f64,
    ))
}

fn export(a: &ExportArgs) -> Result<Outcome, Failure> {
    let loaded = read_set(expect(a.input.as_deref()))?;
    let k =
        a.k.or(loaded.run.as_ref().map(|r| r.params.k))
            .ok_or_else(|| Failure::usage("missing required flag --k (input is not a run file)"))?;
    let mode: CheckMode = a
        .mode
        .or(loaded.run.as_ref().map(|r| Mode::from(r.params.mode)))
        .unwrap_or(Mode::Clique)
        .into();
    let w = witness_graph(&loaded.vectors, k, mode)?;
    let (ratio, ratio_value) = ratio_string(&w)?;
    let summary = format!(
        "export {} vertices, {} edges, clique cover in [{}, {}], independence {}, d = {}, ratio {ratio}",
        w.order(),
        w.edges.len(),
        w.clique_cover_lower(),
        w.clique_cover_upper,
        w.independence_lower,
        w.xi_upper
    );
    let file = match expect(a.format) {
        Format::Json => (
            "witness.json".to_string(),
            pretty_json(&json!({
                "witness": w,
                "clique_cover_lower": w.clique_cover_lower(),
                "ratio": ratio,
                "ratio_value": ratio_value,
            })),
        ),
        Format::Dimacs => (
            "witness.dimacs".to_string(),
            w.graph.to_dimacs().into_bytes(),
        ),
        Format::Csv => {
            let mut out = csv::Writer::from_writer(Vec::new());
            let exact = w
                .clique_cover_exact
                .map(|c| c.to_string())
                .unwrap_or_default();
            let rows: [[String; 11]; 2] = [
                [
                    "n",
                    "d",
                    "k",
                    "mode",
                    "clique_limit",
                    "clique_cover_lower",
                    "clique_cover_greedy",
                    "clique_cover_exact",
                    "independence_lower",
                    "xi_upper",
                    "ratio",
                ]
                .map(String::from),
                [
                    w.order().to_string(),
                    w.xi_upper.to_string(),
                    k.to_string(),
                    format!("{:?}", Mode::from(mode)).to_lowercase(),
                    w.clique_limit.to_string(),
                    w.clique_cover_lower().to_string(),
                    w.clique_cover_greedy.to_string(),
                    exact,
                    w.independence_lower.to_string(),
                    w.xi_upper.to_string(),
                    format!("{ratio_value:.6}"),
                ],
            ];
            for row in rows {
                out.write_record(row).expect("in-memory csv");
            }
            (
                "witness.csv".to_string(),
                out.into_inner().expect("in-memory csv"),
            )
        }
    };
    Ok(Outcome {
        status: Status::Pass,
        summary,
        files: vec![file],
    })
}
