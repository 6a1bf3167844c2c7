//! Exact verification of near-orthogonality.
//!
//! A set is k-nearly orthogonal when its members are non-self-orthogonal and
//! every k+1 of them contain an orthogonal pair, i.e. its non-orthogonality
//! graph has no clique of size k+1. The bipartite property asks that for any
//! two k-subsets G1, G2 (possibly overlapping) some v1 in G1 and v2 in G2 are
//! orthogonal.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::FpVector;
use crate::graph::{self, BitGraph, CliqueSearch};

/// Default number of k-subsets `bipartite_check` may enumerate.
pub const DEFAULT_SUBSET_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMode {
    /// Edge iff the inner product is nonzero.
    NonOrthogonality,
    /// Edge iff the inner product is zero.
    Orthogonality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Clique,
    Bipartite,
}

impl std::str::FromStr for CheckMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clique" => Ok(Self::Clique),
            "bipartite" => Ok(Self::Bipartite),
            other => Err(Error::InvalidParams(format!("unknown mode {other:?}"))),
        }
    }
}

/// The graph of a vector set. Loops (the relation of a vector with itself)
/// are kept apart from the simple adjacency.
#[derive(Clone, Debug)]
pub struct OrthoGraph {
    vertices: Vec<FpVector>,
    graph: BitGraph,
    loops: Vec<bool>,
    mode: GraphMode,
}

impl OrthoGraph {
    pub fn vertices(&self) -> &[FpVector] {
        &self.vertices
    }

    pub fn graph(&self) -> &BitGraph {
        &self.graph
    }

    pub fn loops(&self) -> &[bool] {
        &self.loops
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn max_clique(&self) -> Result<CliqueSearch> {
        self.graph.max_clique()
    }

    pub fn independence_number(&self) -> Result<usize> {
        Ok(self.graph.independence_number()?.clique.len())
    }

    /// DIMACS export; looped vertices are listed in comment lines.
    pub fn to_dimacs(&self) -> String {
        let mut comments = vec![format!(
            "{} graph over F_{} vectors",
            match self.mode {
                GraphMode::NonOrthogonality => "non-orthogonality",
                GraphMode::Orthogonality => "orthogonality",
            },
            self.vertices.first().map_or(0, |v| v.p())
        )];
        comments.extend(
            self.loops
                .iter()
                .enumerate()
                .filter(|(_, &l)| l)
                .map(|(i, _)| format!("loop {}", i + 1)),
        );
        self.graph.to_dimacs(&comments)
    }
}

pub fn build_graph(set: &[FpVector], mode: GraphMode) -> Result<OrthoGraph> {
    if let Some(first) = set.first() {
        for v in &set[1..] {
            first.check_compatible(v)?;
        }
    }
    let mut seen: HashMap<&FpVector, usize> = HashMap::with_capacity(set.len());
    for (i, v) in set.iter().enumerate() {
        if let Some(&first) = seen.get(v) {
            return Err(Error::DuplicateVector { first, second: i });
        }
        seen.insert(v, i);
    }
    let related = |ip: u32| match mode {
        GraphMode::NonOrthogonality => ip != 0,
        GraphMode::Orthogonality => ip == 0,
    };
    let n = set.len();
    let mut graph = BitGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if related(set[i].dot_unchecked(&set[j])) {
                graph.add_edge(i, j);
            }
        }
    }
    let loops = set.iter().map(|v| related(v.dot_unchecked(v))).collect();
    Ok(OrthoGraph {
        vertices: set.to_vec(),
        graph,
        loops,
        mode,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    SelfOrthogonal {
        index: usize,
    },
    /// Pairwise non-orthogonal vertices.
    Clique {
        indices: Vec<usize>,
    },
    /// Every left member is non-orthogonal to every right member.
    Biclique {
        left: Vec<usize>,
        right: Vec<usize>,
    },
}

impl Witness {
    /// Re-checks the claim against raw inner products.
    pub fn revalidate(&self, set: &[FpVector]) -> bool {
        let nonzero = |i: usize, j: usize| match (set.get(i), set.get(j)) {
            (Some(a), Some(b)) => a.inner_product(b).is_ok_and(|ip| ip != 0),
            _ => false,
        };
        match self {
            Witness::SelfOrthogonal { index } => {
                set.get(*index).is_some_and(FpVector::is_self_orthogonal)
            }
            Witness::Clique { indices } => indices
                .iter()
                .enumerate()
                .all(|(a, &i)| indices[a + 1..].iter().all(|&j| i != j && nonzero(i, j))),
            Witness::Biclique { left, right } => {
                distinct(left)
                    && distinct(right)
                    && left.iter().all(|&i| right.iter().all(|&j| nonzero(i, j)))
            }
        }
    }
}

fn distinct(xs: &[usize]) -> bool {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.windows(2).all(|w| w[0] != w[1])
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerifyStats {
    /// Search nodes (clique mode) or subsets visited (bipartite mode).
    pub nodes: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub witness: Option<Witness>,
    pub stats: VerifyStats,
}

impl Verdict {
    fn pass(nodes: u64, started: Instant) -> Self {
        Self {
            pass: true,
            witness: None,
            stats: VerifyStats {
                nodes,
                elapsed: started.elapsed(),
            },
        }
    }

    fn fail(witness: Witness, nodes: u64, started: Instant) -> Self {
        Self {
            pass: false,
            witness: Some(witness),
            stats: VerifyStats {
                nodes,
                elapsed: started.elapsed(),
            },
        }
    }
}

fn first_self_orthogonal(set: &[FpVector]) -> Option<usize> {
    set.iter().position(FpVector::is_self_orthogonal)
}

/// Passes iff every member is non-self-orthogonal and no k+1 members are
/// pairwise non-orthogonal.
pub fn is_k_nearly_orthogonal(set: &[FpVector], k: usize) -> Result<Verdict> {
    let started = Instant::now();
    let g = build_graph(set, GraphMode::NonOrthogonality)?;
    if let Some(index) = first_self_orthogonal(set) {
        return Ok(Verdict::fail(Witness::SelfOrthogonal { index }, 0, started));
    }
    let target = k + 1;
    let search = g
        .graph
        .max_clique_within(&g.graph.full_mask(), Some(target))?;
    if search.clique.len() >= target {
        let indices = search.clique[..target].to_vec();
        Ok(Verdict::fail(
            Witness::Clique { indices },
            search.nodes,
            started,
        ))
    } else {
        Ok(Verdict::pass(search.nodes, started))
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Passes iff for every k-subset G1 the common non-orthogonal neighbourhood
/// N*(G1) (a vector counts as its own neighbour when non-self-orthogonal)
/// has fewer than k members. Fails with the first offending G1 in
/// lexicographic order. Enumerating more than `budget` subsets is
/// reported as [`Error::Inconclusive`].
pub fn bipartite_check(set: &[FpVector], k: usize, budget: u128) -> Result<Verdict> {
    let started = Instant::now();
    if k == 0 {
        return Err(Error::InvalidParams("bipartite check needs k >= 1".into()));
    }
    let g = build_graph(set, GraphMode::NonOrthogonality)?;
    if let Some(index) = first_self_orthogonal(set) {
        return Ok(Verdict::fail(Witness::SelfOrthogonal { index }, 0, started));
    }
    let n = set.len();
    let needed = binomial(n as u64, k as u64);
    let needed = needed.to_u128().unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::Inconclusive { needed, budget });
    }
    let words = graph::words_for(n);
    let closed: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut row = g.graph.row(i).to_vec();
            if g.loops[i] {
                graph::set_bit(&mut row, i);
            }
            row
        })
        .collect();
    let mut all = vec![0u64; words];
    for i in 0..n {
        graph::set_bit(&mut all, i);
    }
    let mut search = BipartiteSearch {
        closed: &closed,
        n,
        k,
        chosen: Vec::with_capacity(k),
        nodes: 0,
        found: None,
    };
    search.descend(0, all);
    match search.found {
        Some(w) => Ok(Verdict::fail(w, search.nodes, started)),
        None => Ok(Verdict::pass(search.nodes, started)),
    }
}

struct BipartiteSearch<'a> {
    closed: &'a [Vec<u64>],
    n: usize,
    k: usize,
    chosen: Vec<usize>,
    nodes: u64,
    found: Option<Witness>,
}

impl BipartiteSearch<'_> {
    // `common` is the intersection of closed neighbourhoods of `chosen`.
    fn descend(&mut self, from: usize, common: Vec<u64>) {
        if self.found.is_some() {
            return;
        }
        self.nodes += 1;
        if graph::popcount(&common) < self.k {
            // every superset has a smaller common neighbourhood
            return;
        }
        if self.chosen.len() == self.k {
            self.found = Some(Witness::Biclique {
                left: self.chosen.clone(),
                right: graph::bits(&common).take(self.k).collect(),
            });
            return;
        }
        let remaining = self.k - self.chosen.len();
        for v in from..=self.n - remaining {
            let next: Vec<u64> = common
                .iter()
                .zip(&self.closed[v])
                .map(|(a, b)| a & b)
                .collect();
            self.chosen.push(v);
            self.descend(v + 1, next);
            self.chosen.pop();
            if self.found.is_some() {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{fp, PrimeModulus};

    fn basis(p: u64, d: usize) -> Vec<FpVector> {
        let m = PrimeModulus::new(p).unwrap();
        (0..d).map(|i| FpVector::unit(m, d, i)).collect()
    }

    fn star(p: u64, t: usize) -> Vec<FpVector> {
        // e1, e1+e2, ..., e1+e_t
        let m = PrimeModulus::new(p).unwrap();
        let e1 = FpVector::unit(m, t, 0);
        let mut out = vec![e1.clone()];
        for i in 1..t {
            out.push(e1.add(&FpVector::unit(m, t, i)).unwrap());
        }
        out
    }

    #[test]
    fn graph_examples() {
        let g = build_graph(&basis(2, 3), GraphMode::NonOrthogonality).unwrap();
        assert_eq!(g.graph().edge_count(), 0);
        assert!(g.loops().iter().all(|&l| l));

        let g = build_graph(
            &[fp(2, &[1, 1, 1]), fp(2, &[1, 0, 0])],
            GraphMode::NonOrthogonality,
        )
        .unwrap();
        assert_eq!(g.graph().edges(), vec![(0, 1)]);

        let g = build_graph(&[], GraphMode::NonOrthogonality).unwrap();
        assert_eq!(g.order(), 0);

        let g = build_graph(&basis(3, 3), GraphMode::Orthogonality).unwrap();
        assert_eq!(g.graph().edge_count(), 3);
        assert!(g.loops().iter().all(|&l| !l));
    }

    #[test]
    fn graph_rejects_bad_input() {
        assert_eq!(
            build_graph(
                &[fp(2, &[1, 0]), fp(2, &[1, 0])],
                GraphMode::NonOrthogonality
            )
            .unwrap_err(),
            Error::DuplicateVector {
                first: 0,
                second: 1
            }
        );
        assert!(matches!(
            build_graph(&[fp(2, &[1, 0]), fp(2, &[1])], GraphMode::NonOrthogonality),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn star_is_a_clique_over_f3() {
        let g = build_graph(&star(3, 4), GraphMode::NonOrthogonality).unwrap();
        assert_eq!(g.max_clique().unwrap().clique.len(), 4);
    }

    #[test]
    fn near_orthogonality_examples() {
        for d in 1..6 {
            assert!(is_k_nearly_orthogonal(&basis(2, d), 1).unwrap().pass);
        }
        let s = star(3, 3);
        let v = is_k_nearly_orthogonal(&s, 2).unwrap();
        assert!(!v.pass);
        assert_eq!(
            v.witness,
            Some(Witness::Clique {
                indices: vec![0, 1, 2]
            })
        );
        assert!(v.witness.unwrap().revalidate(&s));

        assert!(
            is_k_nearly_orthogonal(&[fp(5, &[2, 3, 0])], 1)
                .unwrap()
                .pass
        );

        let with_iso = [fp(2, &[1, 0]), fp(2, &[1, 1])];
        let v = is_k_nearly_orthogonal(&with_iso, 3).unwrap();
        assert_eq!(v.witness, Some(Witness::SelfOrthogonal { index: 1 }));
    }

    #[test]
    fn bipartite_examples() {
        for d in 2..7 {
            for k in 2..=d {
                assert!(
                    bipartite_check(&basis(2, d), k, DEFAULT_SUBSET_BUDGET)
                        .unwrap()
                        .pass
                );
            }
        }
        let s = star(3, 4);
        let v = bipartite_check(&s, 2, DEFAULT_SUBSET_BUDGET).unwrap();
        assert!(!v.pass);
        let w = v.witness.unwrap();
        assert!(w.revalidate(&s));
        assert_eq!(
            w,
            Witness::Biclique {
                left: vec![0, 1],
                right: vec![0, 1]
            }
        );
    }

    #[test]
    fn bipartite_budget_is_inconclusive() {
        let set = basis(2, 30);
        assert_eq!(
            bipartite_check(&set, 5, 1000).unwrap_err(),
            Error::Inconclusive {
                needed: 142_506,
                budget: 1000
            }
        );
        assert!(bipartite_check(&set, 0, 1000).is_err());
    }

    #[test]
    fn fewer_vectors_than_k_passes() {
        assert!(bipartite_check(&basis(2, 2), 3, 10).unwrap().pass);
    }

    #[test]
    fn dimacs_lists_loops() {
        let g = build_graph(
            &[fp(3, &[1, 1, 1]), fp(3, &[1, 0, 0])],
            GraphMode::Orthogonality,
        )
        .unwrap();
        let text = g.to_dimacs();
        assert!(text.contains("c loop 1\n"));
        assert!(text.contains("p edge 2 0\n"));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), BigUint::from(15u32));
        assert_eq!(binomial(2, 3), BigUint::from(0u32));
        assert_eq!(binomial(30, 5), BigUint::from(142_506u32));
    }
}
