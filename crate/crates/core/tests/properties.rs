use std::collections::HashSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use nearorth::analysis::{ramsey_bound, witness_graph};
use nearorth::construction::{build, enumerate_v, schedule_f2, schedule_fp, ConstructionParams};
use nearorth::covers::{cover_pair_for, span};
use nearorth::ff::{all_vectors, FpVector, PrimeModulus};
use nearorth::graph::BitGraph;
use nearorth::spectral::{build_gpt, spectrum};
use nearorth::tensor::tensor_many;
use nearorth::verify::{bipartite_check, is_k_nearly_orthogonal, CheckMode, DEFAULT_SUBSET_BUDGET};

fn m(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

fn rand_vec(rng: &mut ChaCha8Rng, p: u64, t: usize) -> FpVector {
    FpVector::new(m(p), (0..t).map(|_| (rng.next_u64() % p) as u32).collect()).unwrap()
}

#[test]
fn tensor_self_orthogonal_iff_some_factor_is() {
    let vs = all_vectors(m(2), 2).unwrap();
    for u in &vs {
        for v in &vs {
            let prod = tensor_many(&[u.clone(), v.clone()]).unwrap();
            assert_eq!(
                prod.product().is_self_orthogonal(),
                u.is_self_orthogonal() || v.is_self_orthogonal(),
                "{u} ⊗ {v}"
            );
        }
    }
}

#[test]
fn tensor_injective_on_normalized_factors() {
    for p in [2, 3, 5] {
        let normalized: Vec<FpVector> = all_vectors(m(p), 2)
            .unwrap()
            .into_iter()
            .filter(FpVector::is_normalized)
            .collect();
        let mut seen = HashSet::new();
        for u in &normalized {
            for v in &normalized {
                assert!(seen.insert(tensor_many(&[u.clone(), v.clone()]).unwrap().into_product()));
            }
        }
    }
}

#[test]
fn normalized_base_set_is_large() {
    for p in [3u64, 5] {
        for t in 2..=4 {
            let v = enumerate_v(m(p), t, true).unwrap();
            assert!(
                v.len() as u64 >= p.pow(t as u32 - 2),
                "p={p} t={t}: {}",
                v.len()
            );
            assert!(v
                .iter()
                .all(|x| x.is_normalized() && !x.is_self_orthogonal()));
        }
    }
}

proptest! {
    #[test]
    fn f2_schedule_is_maximal(k in 16u64..400, d in 2u64..1_000_000) {
        let t = k / 8;
        if let Ok(s) = schedule_f2(k, d) {
            prop_assert_eq!(s.t, t);
            let tm = (s.t as u128).pow(s.m);
            prop_assert!(tm <= d as u128 && (d as u128) < tm * s.t as u128);
        } else {
            prop_assert!(t > d);
        }
    }

    #[test]
    fn fp_schedule_is_maximal(pi in 0usize..3, k in 33u64..5000, d in 2u64..1_000_000) {
        let p = [3u64, 5, 7][pi];
        let e = p as u32 - 1;
        if let Ok(s) = schedule_fp(m(p), k, d) {
            prop_assert!(32 * (s.t as u128).pow(e) < k as u128);
            prop_assert!(k as u128 <= 32 * (s.t as u128 + 1).pow(e));
            let tm = (s.t as u128).pow(s.m);
            prop_assert!(tm <= d as u128 && (d as u128) < tm * s.t as u128);
        }
    }
}

/// Random families of pairwise orthogonal, non-self-orthogonal vectors, built
/// by Gram-Schmidt-style filtering of random candidates.
#[test]
fn orthogonal_families_are_one_nearly_orthogonal_and_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let p = [2u64, 3, 5, 7][(rng.next_u64() % 4) as usize];
        let d = 1 + (rng.next_u64() % 6) as usize;
        let mut family: Vec<FpVector> = Vec::new();
        for _ in 0..400 {
            let v = rand_vec(&mut rng, p, d);
            if v.is_zero() || v.is_self_orthogonal() {
                continue;
            }
            if family.iter().all(|u| u.inner_product(&v).unwrap() == 0) {
                family.push(v);
            }
        }
        assert!(family.len() <= d);
        assert!(is_k_nearly_orthogonal(&family, 1).unwrap().pass);
    }
}

fn random_cross_pair(rng: &mut ChaCha8Rng, p: u64, t: usize) -> (Vec<FpVector>, Vec<FpVector>) {
    let nonzero: Vec<FpVector> = all_vectors(m(p), t).unwrap().into_iter().skip(1).collect();
    let pick =
        |rng: &mut ChaCha8Rng| nonzero[(rng.next_u64() % nonzero.len() as u64) as usize].clone();
    let mut a1 = vec![pick(rng)];
    let mut a2: Vec<FpVector> = Vec::new();
    for _ in 0..20 {
        let v = pick(rng);
        if rng.next_u64().is_multiple_of(2) {
            if a2.iter().all(|u| u.inner_product(&v).unwrap() != 0) && !a1.contains(&v) {
                a1.push(v);
            }
        } else if a1.iter().all(|u| u.inner_product(&v).unwrap() != 0) && !a2.contains(&v) {
            a2.push(v);
        }
    }
    (a1, a2)
}

#[test]
fn cover_pairs_contain_their_sets_and_respect_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for (p, t) in [(3u64, 2usize), (3, 3), (5, 2)] {
        for _ in 0..40 {
            let (a1, a2) = random_cross_pair(&mut rng, p, t);
            let pair = cover_pair_for(m(p), t, &a1, &a2).unwrap();
            assert!(pair.product() <= (p as u128).pow(t as u32 + 2));
            assert!(a1.iter().all(|v| pair.c1.contains(v)));
            assert!(a2.iter().all(|v| pair.c2.contains(v)));
        }
    }
}

#[test]
fn span_is_canonical_under_shuffling_and_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let p = [2u64, 3, 5, 7][(rng.next_u64() % 4) as usize];
        let dim = 1 + (rng.next_u64() % 5) as usize;
        let count = (rng.next_u64() % 6) as usize;
        let mut gens: Vec<FpVector> = (0..count).map(|_| rand_vec(&mut rng, p, dim)).collect();
        let reference = span(m(p), dim, &gens).unwrap();
        for i in (1..gens.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            gens.swap(i, j);
        }
        let scaled: Vec<FpVector> = gens
            .iter()
            .map(|v| v.scale(1 + (rng.next_u64() % (p - 1)) as u32))
            .collect();
        assert_eq!(span(m(p), dim, &scaled).unwrap(), reference);
    }
}

#[test]
fn spectrum_trace_equals_loop_count() {
    for (p, t) in [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2)] {
        let g = build_gpt(m(p), t).unwrap();
        let isotropic = all_vectors(m(p), t)
            .unwrap()
            .iter()
            .filter(|v| !v.is_zero() && v.is_self_orthogonal())
            .count();
        let r = spectrum(&g).unwrap();
        assert_eq!(r.trace, isotropic);
        let sum: f64 = r.eigenvalues.iter().sum();
        assert!((sum - isotropic as f64).abs() < 1e-6, "({p},{t}): {sum}");
    }
}

#[test]
fn clique_cover_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..60 {
        let n = 1 + (rng.next_u64() % 14) as usize;
        let mut g = BitGraph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.next_u64() % 3 != 0 {
                    g.add_edge(i, j);
                }
            }
        }
        let greedy = g.greedy_clique_cover().unwrap().len();
        let exact = g.min_clique_cover().unwrap().len();
        let alpha = g.independence_number().unwrap().clique.len();
        assert!(
            greedy >= exact && exact >= alpha,
            "{greedy} {exact} {alpha}"
        );
    }
}

#[test]
fn build_output_supports_witness_graphs() {
    let params = ConstructionParams::unpadded(2, 5, 2, 32, 5, CheckMode::Bipartite).unwrap();
    let run = build(&params, 3, 50).unwrap();
    assert!(run.verdict.pass);
    assert!(run.result.iter().all(|v| !v.is_self_orthogonal()));
    assert!(
        bipartite_check(&run.result, 5, DEFAULT_SUBSET_BUDGET)
            .unwrap()
            .pass
    );
    let w = witness_graph(&run.result, 5, CheckMode::Bipartite).unwrap();
    assert_eq!(w.xi_upper, 25);
    assert!(w.clique_cover_upper >= w.clique_cover_lower());
    assert!(w.clique_cover_upper >= w.independence_lower);

    let params = ConstructionParams::unpadded(2, 5, 2, 32, 4, CheckMode::Clique).unwrap();
    let run = build(&params, 3, 20).unwrap();
    assert!(run.verdict.pass);
    assert!(BigUint::from(run.result.len()) < ramsey_bound(25, 4));
}
