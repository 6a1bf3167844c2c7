//! Randomized tensor-product construction of nearly orthogonal sets.
//!
//! Pick a base set V of non-self-orthogonal vectors of F_p^t (over F_p with
//! p > 2, only those whose first nonzero entry is 1), draw n iid products
//! `v_1 ⊗ ... ⊗ v_m` with each `v_j` uniform in V, deduplicate, verify, and
//! retry with fresh randomness on failure.
//!
//! # Randomness
//!
//! Attempt `r` (0-based) of a run with seed `s` draws from ChaCha8 seeded by
//! `ChaCha8Rng::seed_from_u64(s)` with its stream set to `r`. Each sample
//! consumes the stream factor by factor (`j = 0..m`); a factor index is the
//! first `next_u64()` output below `2^64 - (2^64 mod |V|)`, reduced mod |V|.
//! V is listed in lexicographic order (first coordinate most significant).

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::Pow;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{all_vectors, FpVector, PrimeModulus};
use crate::tensor::{tensor_many, TensorFactorization, MAX_PRODUCT_DIM};
use crate::verify::{self, CheckMode, Verdict, DEFAULT_SUBSET_BUDGET};

/// Non-self-orthogonal vectors of F_p^t, lexicographic order. With
/// `normalized`, only those with leading entry 1 (no effect over F_2).
pub fn enumerate_v(modulus: PrimeModulus, t: usize, normalized: bool) -> Result<Vec<FpVector>> {
    Ok(all_vectors(modulus, t)?
        .into_iter()
        .filter(|v| !v.is_zero() && !v.is_self_orthogonal())
        .filter(|v| !normalized || v.is_normalized())
        .collect())
}

/// Largest sample count `build` accepts.
pub const MAX_SAMPLES: usize = 1 << 20;

/// The `(t, m, n)` triple prescribed by a parameter schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub t: u64,
    pub m: u32,
    #[serde(with = "crate::serde_big")]
    pub n: BigUint,
}

fn largest_power_exponent(t: u64, d: u64) -> Result<u32> {
    if t < 2 {
        return Err(Error::InvalidParams(format!(
            "schedule gives t = {t}; need t >= 2 for a finite tensor power"
        )));
    }
    let mut m = 0u32;
    let mut power: u128 = 1;
    while power * t as u128 <= d as u128 {
        power *= t as u128;
        m += 1;
    }
    if m == 0 {
        return Err(Error::InvalidParams(format!("d = {d} is below t = {t}")));
    }
    Ok(m)
}

/// floor(base^(exp/4)) computed as the integer fourth root of base^exp.
fn floor_quarter_power(base: u64, exp: u64) -> BigUint {
    BigUint::from(base).pow(exp).nth_root(4)
}

/// F_2 schedule: `t = floor(k/8)`, `m` maximal with `t^m <= d`,
/// `n = floor(2^(m t / 4))`.
pub fn schedule_f2(k: u64, d: u64) -> Result<Schedule> {
    if k < 8 {
        return Err(Error::InvalidParams(format!(
            "k = {k} < 8 gives t = 0; pass t, m, n directly"
        )));
    }
    let t = k / 8;
    let m = largest_power_exponent(t, d)?;
    Ok(Schedule {
        t,
        m,
        n: floor_quarter_power(2, m as u64 * t),
    })
}

/// F_p schedule: `t` maximal with `k > 32 t^(p-1)`, `m` maximal with
/// `t^m <= d`, `n = floor(p^(m t / 4))`.
pub fn schedule_fp(modulus: PrimeModulus, k: u64, d: u64) -> Result<Schedule> {
    if k <= 32 {
        return Err(Error::InvalidParams(format!(
            "k = {k} <= 32 gives t = 0; pass t, m, n directly"
        )));
    }
    let e = modulus.get() - 1;
    let mut t = 0u64;
    while 32 * ((t + 1) as u128).pow(e) < k as u128 {
        t += 1;
    }
    let m = largest_power_exponent(t, d)?;
    Ok(Schedule {
        t,
        m,
        n: floor_quarter_power(modulus.get() as u64, m as u64 * t),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub p: PrimeModulus,
    pub t: usize,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub mode: CheckMode,
}

impl ConstructionParams {
    /// Parameters with `d = t^m` (no padding).
    pub fn unpadded(
        p: u64,
        t: usize,
        m: usize,
        n: usize,
        k: usize,
        mode: CheckMode,
    ) -> Result<Self> {
        let d = checked_power(t, m)
            .ok_or_else(|| Error::InvalidParams(format!("t^m overflows for t = {t}, m = {m}")))?;
        let params = Self {
            p: PrimeModulus::new(p)?,
            t,
            m,
            n,
            k,
            d,
            mode,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn product_dim(&self) -> Option<usize> {
        checked_power(self.t, self.m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.t == 0 || self.m == 0 || self.n == 0 || self.k == 0 {
            return bad(format!(
                "t, m, n, k must be positive (t = {}, m = {}, n = {}, k = {})",
                self.t, self.m, self.n, self.k
            ));
        }
        match self.product_dim() {
            Some(dim) if dim <= self.d => Ok(()),
            _ => bad(format!(
                "t^m exceeds d (t = {}, m = {}, d = {})",
                self.t, self.m, self.d
            )),
        }
    }

    fn check_buildable(&self) -> Result<()> {
        self.validate()?;
        if self.d > MAX_PRODUCT_DIM {
            return Err(Error::TooLarge {
                what: "ambient dimension",
                size: self.d as u128,
                limit: MAX_PRODUCT_DIM as u128,
            });
        }
        if self.n > MAX_SAMPLES {
            return Err(Error::TooLarge {
                what: "sample count",
                size: self.n as u128,
                limit: MAX_SAMPLES as u128,
            });
        }
        Ok(())
    }
}

fn checked_power(t: usize, m: usize) -> Option<usize> {
    u32::try_from(m).ok().and_then(|m| t.checked_pow(m))
}

/// The generator for attempt `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform index in `0..bound` by rejection.
pub fn uniform_index(rng: &mut impl RngCore, bound: usize) -> usize {
    assert!(bound > 0, "empty range");
    let bound = bound as u64;
    let limit = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= limit {
            return (x % bound) as usize;
        }
    }
}

fn draw(
    rng: &mut impl RngCore,
    base: &[FpVector],
    m: usize,
    count: usize,
) -> Result<Vec<TensorFactorization>> {
    if base.is_empty() {
        return Err(Error::InvalidParams(
            "no non-self-orthogonal base vectors to sample from".into(),
        ));
    }
    (0..count)
        .map(|_| {
            let factors: Vec<FpVector> = (0..m)
                .map(|_| base[uniform_index(rng, base.len())].clone())
                .collect();
            tensor_many(&factors)
        })
        .collect()
}

/// `count` iid uniform members of `V^{⊗m}`, drawn from stream 0 of `seed`.
pub fn sample_q(
    params: &ConstructionParams,
    seed: u64,
    count: usize,
) -> Result<Vec<TensorFactorization>> {
    params.validate()?;
    let base = enumerate_v(params.p, params.t, true)?;
    draw(&mut stream_rng(seed, 0), &base, params.m, count)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionRun {
    pub params: ConstructionParams,
    pub seed: u64,
    /// Attempts made, including the successful one.
    pub retries_used: usize,
    /// Samples drawn over all attempts.
    pub samples_drawn: usize,
    pub verdict: Verdict,
    /// Distinct vectors of the last attempt, padded with zeros to dimension d.
    pub result: Vec<FpVector>,
}

/// Las Vegas loop: sample, deduplicate, verify in `params.mode`, retry.
/// Exhausting `max_retries` gives a failing verdict, not an error.
pub fn build(
    params: &ConstructionParams,
    seed: u64,
    max_retries: usize,
) -> Result<ConstructionRun> {
    build_with_budget(params, seed, max_retries, DEFAULT_SUBSET_BUDGET)
}

pub fn build_with_budget(
    params: &ConstructionParams,
    seed: u64,
    max_retries: usize,
    subset_budget: u128,
) -> Result<ConstructionRun> {
    params.check_buildable()?;
    if max_retries == 0 {
        return Err(Error::InvalidParams(
            "max_retries must be at least 1".into(),
        ));
    }
    let base = enumerate_v(params.p, params.t, true)?;
    let padding = params.d - params.product_dim().expect("validated");
    let mut samples_drawn = 0;
    let mut retries_used = 0;
    let mut last = None;
    for attempt in 0..max_retries {
        retries_used += 1;
        let mut rng = stream_rng(seed, attempt as u64);
        let samples = draw(&mut rng, &base, params.m, params.n)?;
        samples_drawn += samples.len();
        let mut seen = HashSet::new();
        let distinct: Vec<FpVector> = samples
            .into_iter()
            .map(TensorFactorization::into_product)
            .filter(|v| seen.insert(v.clone()))
            .collect();
        let verdict = match params.mode {
            CheckMode::Clique => verify::is_k_nearly_orthogonal(&distinct, params.k)?,
            CheckMode::Bipartite => verify::bipartite_check(&distinct, params.k, subset_budget)?,
        };
        let pass = verdict.pass;
        last = Some((verdict, distinct));
        if pass {
            break;
        }
    }
    let (verdict, distinct) = last.expect("at least one attempt");
    Ok(ConstructionRun {
        params: params.clone(),
        seed,
        retries_used,
        samples_drawn,
        verdict,
        result: distinct.iter().map(|v| v.pad_zeros(padding)).collect(),
    })
}

/// log2 of the union bound on the failure probability of one attempt.
///
/// Clique mode over F_2: `2^(m t^2) * (n / 2^(m (t-3) / 2))^(k+1)`.
/// Bipartite mode: `p^(2 m t (t^(p-1) + p - 1)) * (n / p^(m (t/2 - 3)))^k`.
/// Clique mode over F_p with p > 2 uses the bipartite bound with k + 1,
/// since a (k+1)-clique is a pair of non-orthogonal (k+1)-subsets.
/// Returns `-inf` when `n = 0`; positive values mean the bound is vacuous.
pub fn union_bound(params: &ConstructionParams) -> f64 {
    if params.n == 0 {
        return f64::NEG_INFINITY;
    }
    let p = params.p.get() as f64;
    let t = params.t as f64;
    let m = params.m as f64;
    let k = params.k as f64;
    let log_n = (params.n as f64).log2();
    match (params.mode, params.p.get()) {
        (CheckMode::Clique, 2) => m * t * t + (k + 1.0) * (log_n - m * (t - 3.0) / 2.0),
        (mode, _) => {
            let tuple = if mode == CheckMode::Clique {
                k + 1.0
            } else {
                k
            };
            let boxes = 2.0 * m * t * (t.powf(p - 1.0) + p - 1.0);
            p.log2() * boxes + tuple * (log_n - m * (t / 2.0 - 3.0) * p.log2())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::fp;

    fn f2() -> PrimeModulus {
        PrimeModulus::new(2).unwrap()
    }

    #[test]
    fn base_set_sizes() {
        assert_eq!(enumerate_v(f2(), 4, false).unwrap().len(), 8);
        let m3 = PrimeModulus::new(3).unwrap();
        assert_eq!(
            enumerate_v(m3, 2, true).unwrap(),
            vec![
                fp(3, &[0, 1]),
                fp(3, &[1, 0]),
                fp(3, &[1, 1]),
                fp(3, &[1, 2])
            ]
        );
        assert!(!enumerate_v(m3, 2, true).unwrap().is_empty());
        assert!(enumerate_v(f2(), 25, false).is_err());
    }

    #[test]
    fn f2_schedule_examples() {
        let s = schedule_f2(96, 12u64.pow(10)).unwrap();
        assert_eq!((s.t, s.m, s.n.clone()), (12, 10, BigUint::from(1u64 << 30)));
        let s = schedule_f2(16, 4).unwrap();
        assert_eq!((s.t, s.m, s.n), (2, 2, BigUint::from(2u32)));
        assert!(schedule_f2(7, 100).is_err());
        // t = 1 leaves m unbounded
        assert!(schedule_f2(12, 100).is_err());
    }

    #[test]
    fn f2_schedule_small_d() {
        let s = schedule_f2(16, 16).unwrap();
        assert_eq!(s.n, BigUint::from(4u32));
    }

    #[test]
    fn fp_schedule_examples() {
        let m3 = PrimeModulus::new(3).unwrap();
        let s = schedule_fp(m3, 300, 9).unwrap();
        assert_eq!((s.t, s.m, s.n), (3, 2, BigUint::from(5u32)));
        let s = schedule_fp(f2(), 65, 4).unwrap();
        assert_eq!((s.t, s.m, s.n), (2, 2, BigUint::from(2u32)));
        assert!(schedule_fp(m3, 32, 100).is_err());
    }

    #[test]
    fn quarter_powers() {
        assert_eq!(floor_quarter_power(3, 6), BigUint::from(5u32)); // 3^1.5 = 5.196
        assert_eq!(floor_quarter_power(2, 5), BigUint::from(2u32)); // 2^1.25 = 2.378
        assert_eq!(floor_quarter_power(2, 120), BigUint::from(1u64 << 30));
    }

    #[test]
    fn params_validation() {
        assert!(ConstructionParams::unpadded(2, 5, 2, 32, 4, CheckMode::Clique).is_ok());
        assert!(ConstructionParams::unpadded(4, 5, 2, 32, 4, CheckMode::Clique).is_err());
        assert!(ConstructionParams::unpadded(2, 5, 2, 0, 4, CheckMode::Clique).is_err());
        let mut p = ConstructionParams::unpadded(2, 5, 2, 32, 4, CheckMode::Clique).unwrap();
        p.d = 24;
        assert!(p.validate().is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let params = ConstructionParams::unpadded(3, 3, 2, 10, 2, CheckMode::Clique).unwrap();
        let a = sample_q(&params, 99, 50).unwrap();
        let b = sample_q(&params, 99, 50).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_q(&params, 100, 50).unwrap());
        assert!(a.iter().all(|f| !f.product().is_self_orthogonal()));
    }

    #[test]
    fn sampling_is_uniform_on_small_base() {
        let params = ConstructionParams::unpadded(2, 3, 1, 1, 1, CheckMode::Clique).unwrap();
        let base = enumerate_v(f2(), 3, true).unwrap();
        assert_eq!(base.len(), 4);
        let draws = sample_q(&params, 5, 10_000).unwrap();
        let sigma = (10_000f64 * 0.25 * 0.75).sqrt();
        for v in &base {
            let c = draws.iter().filter(|f| f.product() == v).count() as f64;
            assert!((c - 2500.0).abs() <= 5.0 * sigma, "count {c} for {v}");
        }
    }

    #[test]
    fn uniform_index_in_range() {
        let mut rng = stream_rng(1, 0);
        for bound in 1..50 {
            for _ in 0..20 {
                assert!(uniform_index(&mut rng, bound) < bound);
            }
        }
    }

    #[test]
    fn single_sample_passes() {
        for k in 1..4 {
            let params = ConstructionParams::unpadded(3, 2, 2, 1, k, CheckMode::Clique).unwrap();
            let run = build(&params, 3, 1).unwrap();
            assert!(run.verdict.pass);
            assert_eq!(run.result.len(), 1);
            assert_eq!(run.retries_used, 1);
        }
    }

    #[test]
    fn padding_appends_zeros() {
        let mut params = ConstructionParams::unpadded(2, 3, 2, 8, 3, CheckMode::Clique).unwrap();
        params.d = 12;
        let run = build(&params, 1, 10).unwrap();
        let unpadded = {
            let mut p = params.clone();
            p.d = 9;
            build(&p, 1, 10).unwrap().result
        };
        assert_eq!(run.result.len(), unpadded.len());
        for (a, b) in run.result.iter().zip(&unpadded) {
            assert_eq!(a.dim(), 12);
            assert_eq!(&a.entries()[..9], b.entries());
            assert!(a.entries()[9..].iter().all(|&e| e == 0));
        }
        for i in 0..unpadded.len() {
            for j in 0..unpadded.len() {
                assert_eq!(
                    run.result[i].inner_product(&run.result[j]),
                    unpadded[i].inner_product(&unpadded[j])
                );
            }
        }
    }

    #[test]
    fn zero_retries_rejected() {
        let params = ConstructionParams::unpadded(2, 3, 1, 2, 1, CheckMode::Clique).unwrap();
        assert!(build(&params, 0, 0).is_err());
    }

    #[test]
    fn union_bound_examples() {
        let mut params = ConstructionParams {
            p: f2(),
            t: 12,
            m: 10,
            n: 1 << 30,
            k: 96,
            d: 12usize.pow(10),
            mode: CheckMode::Clique,
        };
        assert_eq!(union_bound(&params), -15.0);
        params = ConstructionParams::unpadded(2, 5, 2, 32, 4, CheckMode::Clique).unwrap();
        assert_eq!(union_bound(&params), 65.0);
        params.n = 0;
        assert_eq!(union_bound(&params), f64::NEG_INFINITY);
    }

    #[test]
    fn bipartite_union_bound_formula() {
        // p = 3, t = 8, m = 2, n = 3^4, k = 10:
        // 2*2*8*(64 + 2) = 2112 box exponent; (4 - 2*(4-3)) * 10 = 20
        let params = ConstructionParams::unpadded(3, 8, 2, 81, 10, CheckMode::Bipartite).unwrap();
        let expected = 3f64.log2() * (2112.0 + 20.0);
        assert!((union_bound(&params) - expected).abs() < 1e-9);
    }
}
