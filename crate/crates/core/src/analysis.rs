//! Counting pairwise non-orthogonal sets and graph-level consequences of
//! verified sets (clique covers against representation dimension).

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{all_vectors, FpVector, PrimeModulus};
use crate::graph::MAX_EXACT_COVER_VERTICES;
use crate::verify::{self, build_graph, CheckMode, GraphMode, OrthoGraph};

/// Vertex limit for all-cliques enumeration.
pub const MAX_COUNT_VERTICES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub p: u32,
    pub t: usize,
    /// Non-self-orthogonal vectors of F_p^t.
    pub vertices: usize,
    /// Pairwise non-orthogonal sets of non-self-orthogonal vectors,
    /// including the empty set.
    #[serde(with = "crate::serde_big")]
    pub total_sets: BigUint,
    #[serde(with = "crate::serde_big")]
    pub nonempty_sets: BigUint,
    pub largest_set: Vec<FpVector>,
    /// The largest set found; `2^|B|` of its subsets are counted.
    pub lower_bound_witness: Vec<FpVector>,
}

/// Counts every clique (empty one included) of the non-orthogonality graph
/// on the non-self-orthogonal vectors of F_p^t.
pub fn count_npt(p: PrimeModulus, t: usize) -> Result<CountReport> {
    let vectors: Vec<FpVector> = all_vectors(p, t)?
        .into_iter()
        .filter(|v| !v.is_self_orthogonal())
        .collect();
    let n = vectors.len();
    if n > MAX_COUNT_VERTICES {
        return Err(Error::TooLarge {
            what: "clique counting graph",
            size: n as u128,
            limit: MAX_COUNT_VERTICES as u128,
        });
    }
    let adj: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && vectors[i].dot_unchecked(&vectors[j]) != 0)
                .fold(0u32, |m, j| m | 1 << j)
        })
        .collect();
    let mut counter = CliqueCounter {
        adj: &adj,
        current: Vec::new(),
        largest: Vec::new(),
    };
    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let total = counter.count(all);
    let largest: Vec<FpVector> = counter
        .largest
        .iter()
        .map(|&i| vectors[i].clone())
        .collect();
    let report = CountReport {
        p: p.get(),
        t,
        vertices: n,
        total_sets: BigUint::from(total),
        nonempty_sets: BigUint::from(total - 1),
        lower_bound_witness: largest.clone(),
        largest_set: largest,
    };
    if BigUint::from(1u32) << report.lower_bound_witness.len() > report.total_sets {
        return Err(Error::Internal("2^|B| exceeds the clique count".into()));
    }
    Ok(report)
}

struct CliqueCounter<'a> {
    adj: &'a [u32],
    current: Vec<usize>,
    largest: Vec<usize>,
}

impl CliqueCounter<'_> {
    /// Cliques extending `current` by vertices of `candidates` (all of which
    /// are adjacent to `current` and above its last vertex), counting
    /// `current` itself.
    fn count(&mut self, candidates: u32) -> u64 {
        if self.current.len() > self.largest.len() {
            self.largest = self.current.clone();
        }
        let mut total = 1;
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.current.push(v);
            total += self.count(rest & self.adj[v]);
            self.current.pop();
        }
        total
    }
}

/// `C(d + k, k)`, the Ramsey-type ceiling on the size of a k-nearly
/// orthogonal set in dimension d.
pub fn ramsey_bound(d: u64, k: u64) -> BigUint {
    verify::binomial(d + k, k)
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessGraph {
    pub source_set: Vec<FpVector>,
    #[serde(skip)]
    pub graph: OrthoGraph,
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
    pub mode: CheckMode,
    /// Largest clique the verified property allows: k in clique mode, k - 1
    /// in bipartite mode.
    pub clique_limit: usize,
    /// The set is an orthogonal representation of its own graph, so the
    /// ambient dimension bounds the minimum representation dimension.
    pub xi_upper: usize,
    pub clique_cover_upper: usize,
    pub clique_cover_greedy: usize,
    pub clique_cover_exact: Option<usize>,
    pub independence_lower: usize,
}

impl WitnessGraph {
    pub fn order(&self) -> usize {
        self.source_set.len()
    }

    /// `ceil(n / clique_limit)`: every clique cover of a graph without
    /// cliques above `clique_limit` needs at least this many cliques.
    pub fn clique_cover_lower(&self) -> usize {
        self.order().div_ceil(self.clique_limit.max(1))
    }
}

/// Builds the non-orthogonality graph of a set after re-verifying it in
/// `mode`, and bounds its clique cover number and representation dimension.
pub fn witness_graph(set: &[FpVector], k: usize, mode: CheckMode) -> Result<WitnessGraph> {
    let verdict = match mode {
        CheckMode::Clique => verify::is_k_nearly_orthogonal(set, k)?,
        CheckMode::Bipartite => verify::bipartite_check(set, k, verify::DEFAULT_SUBSET_BUDGET)?,
    };
    if !verdict.pass {
        return Err(Error::Unverified(format!(
            "{mode:?} check with k = {k} failed: {:?}",
            verdict.witness
        )));
    }
    let graph = build_graph(set, GraphMode::NonOrthogonality)?;
    let g = graph.graph();
    let clique_cover_greedy = g.greedy_clique_cover()?.len();
    let clique_cover_exact = if g.order() <= MAX_EXACT_COVER_VERTICES {
        Some(g.min_clique_cover()?.len())
    } else {
        None
    };
    let independence_lower = graph.independence_number()?;
    let clique_limit = match mode {
        CheckMode::Clique => k,
        CheckMode::Bipartite => k.saturating_sub(1).max(1),
    };
    let w = WitnessGraph {
        source_set: set.to_vec(),
        edges: g.edges(),
        k,
        mode,
        clique_limit,
        xi_upper: set.first().map_or(0, FpVector::dim),
        clique_cover_upper: clique_cover_exact.unwrap_or(clique_cover_greedy),
        clique_cover_greedy,
        clique_cover_exact,
        independence_lower,
        graph,
    };
    if w.clique_cover_upper < w.clique_cover_lower() {
        return Err(Error::Internal(format!(
            "clique cover {} below ceil(n/k) = {}",
            w.clique_cover_upper,
            w.clique_cover_lower()
        )));
    }
    Ok(w)
}

/// `ceil(n / clique_limit) / xi_upper`, a lower bound on the ratio of the
/// clique cover number to the minimum orthogonal representation dimension.
pub fn ratio_report(w: &WitnessGraph) -> Result<Ratio<u64>> {
    if w.xi_upper == 0 {
        return Err(Error::InvalidParams("empty witness set".into()));
    }
    Ok(Ratio::new(w.clique_cover_lower() as u64, w.xi_upper as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn tiny_counts() {
        let r = count_npt(m(2), 1).unwrap();
        assert_eq!(r.total_sets, BigUint::from(2u32));
        let r = count_npt(m(2), 2).unwrap();
        assert_eq!(r.vertices, 2);
        assert_eq!(r.total_sets, BigUint::from(3u32));
        assert_eq!(r.nonempty_sets, BigUint::from(2u32));
        assert_eq!(r.largest_set.len(), 1);
        assert!(count_npt(m(2), 6).is_err());
    }

    #[test]
    fn ramsey_examples() {
        assert_eq!(ramsey_bound(4, 2), BigUint::from(15u32));
        assert_eq!(ramsey_bound(1, 1), BigUint::from(2u32));
    }

    #[test]
    fn basis_witness() {
        for d in 1..6 {
            let basis: Vec<FpVector> = (0..d).map(|i| FpVector::unit(m(2), d, i)).collect();
            let w = witness_graph(&basis, 1, CheckMode::Clique).unwrap();
            assert!(w.edges.is_empty());
            assert_eq!(w.clique_cover_upper, d);
            assert_eq!(w.xi_upper, d);
            assert_eq!(w.independence_lower, d);
            assert_eq!(ratio_report(&w).unwrap(), Ratio::from_integer(1));
        }
    }

    #[test]
    fn unverified_sets_are_rejected() {
        let e1 = FpVector::unit(m(3), 3, 0);
        let set = vec![
            e1.clone(),
            e1.add(&FpVector::unit(m(3), 3, 1)).unwrap(),
            e1.add(&FpVector::unit(m(3), 3, 2)).unwrap(),
        ];
        assert!(matches!(
            witness_graph(&set, 2, CheckMode::Clique),
            Err(Error::Unverified(_))
        ));
        assert!(witness_graph(&set, 3, CheckMode::Clique).is_ok());
    }
}
