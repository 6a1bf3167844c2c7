//! Undirected simple graphs over bitset rows, with exact clique search.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Vertex limit for exact clique and independence searches.
pub const MAX_SEARCH_VERTICES: usize = 10_000;

/// Vertex limit for the exact clique-cover search.
pub const MAX_EXACT_COVER_VERTICES: usize = 20;

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

pub(crate) fn set_bit(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

pub(crate) fn clear_bit(row: &mut [u64], i: usize) {
    row[i / 64] &= !(1 << (i % 64));
}

pub(crate) fn test_bit(row: &[u64], i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

pub(crate) fn popcount(row: &[u64]) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

pub(crate) fn first_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

pub(crate) fn bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + b)
        })
    })
}

/// Symmetric adjacency without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

/// Result of an exact clique search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueSearch {
    /// Vertices of the best clique found, ascending.
    pub clique: Vec<usize>,
    /// Search-tree nodes expanded.
    pub nodes: u64,
}

impl BitGraph {
    pub fn new(n: usize) -> Self {
        let words = words_for(n);
        Self {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n, "vertex out of range");
        if i == j {
            return;
        }
        let w = self.words;
        set_bit(&mut self.rows[i * w..(i + 1) * w], j);
        set_bit(&mut self.rows[j * w..(j + 1) * w], i);
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        test_bit(self.row(i), j)
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn degree(&self, i: usize) -> usize {
        popcount(self.row(i))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| {
                bits(self.row(i))
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect()
    }

    pub fn complement(&self) -> BitGraph {
        let mut g = BitGraph::new(self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.has_edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(a, &u)| {
            vertices[a + 1..]
                .iter()
                .all(|&v| u != v && self.has_edge(u, v))
        })
    }

    pub fn full_mask(&self) -> Vec<u64> {
        let mut mask = vec![0u64; self.words];
        for i in 0..self.n {
            set_bit(&mut mask, i);
        }
        mask
    }

    fn check_search_size(&self) -> Result<()> {
        if self.n > MAX_SEARCH_VERTICES {
            return Err(Error::TooLarge {
                what: "clique search graph",
                size: self.n as u128,
                limit: MAX_SEARCH_VERTICES as u128,
            });
        }
        Ok(())
    }

    /// Exact maximum clique.
    pub fn max_clique(&self) -> Result<CliqueSearch> {
        self.max_clique_within(&self.full_mask(), None)
    }

    /// Exact maximum clique inside `candidates`. With `stop_at`, the search
    /// returns as soon as a clique of that size is found.
    pub fn max_clique_within(
        &self,
        candidates: &[u64],
        stop_at: Option<usize>,
    ) -> Result<CliqueSearch> {
        self.check_search_size()?;
        Ok(CliqueSolver::new(self, candidates).run(stop_at))
    }

    pub fn independence_number(&self) -> Result<CliqueSearch> {
        self.check_search_size()?;
        self.complement().max_clique()
    }

    /// Greedy clique cover: repeatedly removes a maximum clique of what is
    /// left. Returns the cliques in removal order.
    pub fn greedy_clique_cover(&self) -> Result<Vec<Vec<usize>>> {
        let mut remaining = self.full_mask();
        let mut cover = Vec::new();
        while popcount(&remaining) > 0 {
            let found = self.max_clique_within(&remaining, None)?;
            for &v in &found.clique {
                clear_bit(&mut remaining, v);
            }
            cover.push(found.clique);
        }
        Ok(cover)
    }

    /// Exact clique cover number by backtracking.
    pub fn min_clique_cover(&self) -> Result<Vec<Vec<usize>>> {
        if self.n > MAX_EXACT_COVER_VERTICES {
            return Err(Error::TooLarge {
                what: "exact clique cover graph",
                size: self.n as u128,
                limit: MAX_EXACT_COVER_VERTICES as u128,
            });
        }
        let greedy = self.greedy_clique_cover()?;
        let adj: Vec<u32> = (0..self.n).map(|i| self.row(i)[0] as u32).collect();
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (adj[v].count_ones(), v));
        let mut best: Vec<u32> = greedy
            .iter()
            .map(|c| c.iter().fold(0u32, |m, &v| m | 1 << v))
            .collect();
        let mut current = Vec::new();
        cover_backtrack(&adj, &order, 0, &mut current, &mut best);
        let mut cover: Vec<Vec<usize>> = best
            .iter()
            .map(|&mask| (0..self.n).filter(|&v| mask >> v & 1 == 1).collect())
            .collect();
        cover.sort();
        Ok(cover)
    }

    /// DIMACS `edge` format, 1-based vertices. `comments` lines are emitted
    /// first as `c` lines.
    pub fn to_dimacs(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "c {c}");
        }
        let edges = self.edges();
        let _ = writeln!(out, "p edge {} {}", self.n, edges.len());
        for (i, j) in edges {
            let _ = writeln!(out, "e {} {}", i + 1, j + 1);
        }
        out
    }
}

fn cover_backtrack(
    adj: &[u32],
    order: &[usize],
    pos: usize,
    current: &mut Vec<u32>,
    best: &mut Vec<u32>,
) {
    if current.len() >= best.len() {
        return;
    }
    if pos == order.len() {
        *best = current.clone();
        return;
    }
    let v = order[pos];
    for c in 0..current.len() {
        if current[c] & !adj[v] == 0 {
            current[c] |= 1 << v;
            cover_backtrack(adj, order, pos + 1, current, best);
            current[c] &= !(1 << v);
        }
    }
    if current.len() + 1 < best.len() {
        current.push(1 << v);
        cover_backtrack(adj, order, pos + 1, current, best);
        current.pop();
    }
}

/// Branch and bound with greedy-coloring bounds over bitsets. Vertices are
/// relabelled by descending degree (ties by index) so that the coloring
/// visits high-degree vertices first.
struct CliqueSolver {
    n: usize,
    words: usize,
    // rows in relabelled coordinates
    rows: Vec<u64>,
    // relabelled -> original
    order: Vec<usize>,
    start: Vec<u64>,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    stop_at: usize,
}

impl CliqueSolver {
    fn new(g: &BitGraph, candidates: &[u64]) -> Self {
        let n = g.n;
        let words = g.words;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        let mut pos = vec![0; n];
        for (r, &v) in order.iter().enumerate() {
            pos[v] = r;
        }
        let mut rows = vec![0u64; n * words];
        for (r, &v) in order.iter().enumerate() {
            let dst = &mut rows[r * words..(r + 1) * words];
            for u in bits(g.row(v)) {
                set_bit(dst, pos[u]);
            }
        }
        let mut start = vec![0u64; words];
        for v in bits(candidates).filter(|&v| v < n) {
            set_bit(&mut start, pos[v]);
        }
        Self {
            n,
            words,
            rows,
            order,
            start,
            best: Vec::new(),
            current: Vec::new(),
            nodes: 0,
            stop_at: usize::MAX,
        }
    }

    fn run(mut self, stop_at: Option<usize>) -> CliqueSearch {
        self.stop_at = stop_at.unwrap_or(usize::MAX);
        if self.n > 0 && popcount(&self.start) > 0 {
            let start = std::mem::take(&mut self.start);
            self.expand(start);
        }
        let mut clique: Vec<usize> = self.best.iter().map(|&r| self.order[r]).collect();
        clique.sort_unstable();
        CliqueSearch {
            clique,
            nodes: self.nodes,
        }
    }

    fn done(&self) -> bool {
        self.best.len() >= self.stop_at
    }

    fn expand(&mut self, mut candidates: Vec<u64>) {
        self.nodes += 1;
        let colored = self.color_sort(&candidates);
        for &(v, color) in colored.iter().rev() {
            if self.current.len() + color <= self.best.len() || self.done() {
                return;
            }
            self.current.push(v);
            let next: Vec<u64> = candidates
                .iter()
                .zip(&self.rows[v * self.words..(v + 1) * self.words])
                .map(|(a, b)| a & b)
                .collect();
            if next.iter().all(|&w| w == 0) {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            clear_bit(&mut candidates, v);
        }
    }

    /// Greedy sequential coloring; returns (vertex, color) with colors
    /// nondecreasing, colors starting at 1.
    fn color_sort(&self, candidates: &[u64]) -> Vec<(usize, usize)> {
        let mut uncolored = candidates.to_vec();
        let mut out = Vec::with_capacity(popcount(candidates));
        let mut color = 0;
        while uncolored.iter().any(|&w| w != 0) {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = first_bit(&q) {
                clear_bit(&mut q, v);
                clear_bit(&mut uncolored, v);
                let row = &self.rows[v * self.words..(v + 1) * self.words];
                for (a, b) in q.iter_mut().zip(row) {
                    *a &= !b;
                }
                out.push((v, color));
            }
        }
        out
    }
}
