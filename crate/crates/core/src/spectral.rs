//! The orthogonality graph G(p, t) and its spectral properties.
//!
//! Vertices are the nonzero vectors of F_p^t; u ~ v iff `<u, v> = 0`,
//! including a loop at every self-orthogonal vector. A loop adds 1 to the
//! degree and sits as a 1 on the diagonal of the adjacency matrix. With this
//! convention the graph is `(p^(t-1) - 1)`-regular and its non-principal
//! eigenvalues are bounded by `(p-1) p^(t/2-1)`.

use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{all_vectors, FpVector, PrimeModulus};
use crate::graph::BitGraph;

/// Vertex limit for the dense eigensolver.
pub const MAX_SPECTRAL_VERTICES: usize = 4096;

/// Slack on eigenvalue bound comparisons.
pub const BOUND_TOLERANCE: f64 = 1e-6;

/// Relative off-diagonal Frobenius mass at which Jacobi stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct SpectralGraph {
    p: PrimeModulus,
    t: usize,
    vertices: Vec<FpVector>,
    // row-major n x n, diagonal holds loops
    adjacency: Vec<u8>,
    degree: usize,
}

impl SpectralGraph {
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vertices(&self) -> &[FpVector] {
        &self.vertices
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.order() + j] == 1
    }

    pub fn loop_count(&self) -> usize {
        (0..self.order()).filter(|&i| self.adjacent(i, i)).count()
    }

    pub fn row_sum(&self, i: usize) -> usize {
        let n = self.order();
        self.adjacency[i * n..(i + 1) * n]
            .iter()
            .map(|&x| x as usize)
            .sum()
    }

    pub fn dense_matrix(&self) -> Vec<f64> {
        self.adjacency.iter().map(|&x| x as f64).collect()
    }

    /// DIMACS export of the simple part; loops as `c loop i` comments.
    pub fn to_dimacs(&self) -> String {
        let n = self.order();
        let mut g = BitGraph::new(n);
        let mut comments = vec![format!("orthogonality graph G({}, {})", self.p, self.t)];
        for i in 0..n {
            if self.adjacent(i, i) {
                comments.push(format!("loop {}", i + 1));
            }
            for j in i + 1..n {
                if self.adjacent(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g.to_dimacs(&comments)
    }

    /// One matrix row per line, entries separated by spaces.
    pub fn to_dense_text(&self) -> String {
        let n = self.order();
        let mut out = String::with_capacity(2 * n * n);
        for i in 0..n {
            let row: Vec<&str> = self.adjacency[i * n..(i + 1) * n]
                .iter()
                .map(|&x| if x == 1 { "1" } else { "0" })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// Builds G(p, t) and checks its regularity.
pub fn build_gpt(p: PrimeModulus, t: usize) -> Result<SpectralGraph> {
    let n = (p.get() as u128)
        .checked_pow(t as u32)
        .map_or(u128::MAX, |x| x - 1);
    if n > MAX_SPECTRAL_VERTICES as u128 {
        return Err(Error::TooLarge {
            what: "G(p, t) order",
            size: n,
            limit: MAX_SPECTRAL_VERTICES as u128,
        });
    }
    if t == 0 {
        return Err(Error::InvalidParams("t must be positive".into()));
    }
    let vertices: Vec<FpVector> = all_vectors(p, t)?.into_iter().skip(1).collect();
    let n = vertices.len();
    let mut adjacency = vec![0u8; n * n];
    for i in 0..n {
        for j in i..n {
            if vertices[i].dot_unchecked(&vertices[j]) == 0 {
                adjacency[i * n + j] = 1;
                adjacency[j * n + i] = 1;
            }
        }
    }
    let degree = (p.get() as usize).pow(t as u32 - 1) - 1;
    let g = SpectralGraph {
        p,
        t,
        vertices,
        adjacency,
        degree,
    };
    if let Some(bad) = (0..n).find(|&i| g.row_sum(i) != degree) {
        return Err(Error::Internal(format!(
            "G({p}, {t}) vertex {bad} has degree {} instead of {degree}",
            g.row_sum(bad)
        )));
    }
    Ok(g)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Also returns the number of sweeps used.
pub fn jacobi_eigenvalues(matrix: &[f64], n: usize) -> Result<(Vec<f64>, usize)> {
    assert_eq!(matrix.len(), n * n, "matrix shape");
    let mut a = matrix.to_vec();
    let initial: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_TOLERANCE * initial;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    loop {
        let residual = off(&a);
        if residual <= tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok((eig, sweeps))
}

/// `(p - 1) p^(t/2 - 1)`.
pub fn vinh_bound(p: PrimeModulus, t: usize) -> f64 {
    let p = p.get() as f64;
    (p - 1.0) * p.powf(t as f64 / 2.0 - 1.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub p: u32,
    pub t: usize,
    pub order: usize,
    pub degree: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub principal: f64,
    pub lambda_max_abs_rest: f64,
    pub vinh_bound: f64,
    pub trace: usize,
    pub sweeps: usize,
    pub pass: bool,
}

pub fn spectrum(g: &SpectralGraph) -> Result<SpectrumReport> {
    let n = g.order();
    let (eigenvalues, sweeps) = jacobi_eigenvalues(&g.dense_matrix(), n)?;
    let principal = eigenvalues.last().copied().unwrap_or(0.0);
    let lambda_max_abs_rest = eigenvalues[..n.saturating_sub(1)]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let bound = vinh_bound(g.p, g.t);
    Ok(SpectrumReport {
        p: g.p.get(),
        t: g.t,
        order: n,
        degree: g.degree,
        principal,
        lambda_max_abs_rest,
        vinh_bound: bound,
        trace: g.loop_count(),
        sweeps,
        pass: lambda_max_abs_rest <= bound + BOUND_TOLERANCE,
        eigenvalues,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    /// Ordered adjacent pairs (x1, x2) with x1 in C1, x2 in C2; a looped
    /// vertex in both sets contributes once.
    pub edges: u64,
    pub expected: f64,
    pub deviation: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `e(C1, C2)` with `(d/n)|C1||C2|`; the deviation must not exceed
/// `lambda * sqrt(|C1||C2|)`. Duplicate indices are ignored.
pub fn mixing_check(
    g: &SpectralGraph,
    c1: &[usize],
    c2: &[usize],
    lambda: f64,
) -> Result<MixingReport> {
    let n = g.order();
    let norm = |c: &[usize]| -> Result<Vec<usize>> {
        let mut c = c.to_vec();
        c.sort_unstable();
        c.dedup();
        match c.last() {
            Some(&last) if last >= n => Err(Error::IndexOutOfRange {
                index: last,
                len: n,
            }),
            _ => Ok(c),
        }
    };
    let (c1, c2) = (norm(c1)?, norm(c2)?);
    let edges = c1
        .iter()
        .map(|&x| c2.iter().filter(|&&y| g.adjacent(x, y)).count() as u64)
        .sum::<u64>();
    let size = (c1.len() * c2.len()) as f64;
    let expected = g.degree as f64 / n as f64 * size;
    let deviation = (edges as f64 - expected).abs();
    let bound = lambda * size.sqrt();
    Ok(MixingReport {
        edges,
        expected,
        deviation,
        bound,
        holds: deviation <= bound + BOUND_TOLERANCE,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingSummary {
    pub trials: usize,
    pub violations: usize,
    /// Largest deviation / bound ratio seen (0 when every bound is 0).
    pub worst_ratio: f64,
}

/// Random subset pairs: each trial draws an inclusion density per set and
/// includes each vertex independently.
pub fn random_mixing_trials(
    g: &SpectralGraph,
    lambda: f64,
    trials: usize,
    seed: u64,
) -> Result<MixingSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.order();
    let mut summary = MixingSummary {
        trials,
        violations: 0,
        worst_ratio: 0.0,
    };
    let subset = |rng: &mut ChaCha8Rng| -> Vec<usize> {
        let density = rng.next_u64() % 256;
        (0..n).filter(|_| rng.next_u64() % 256 < density).collect()
    };
    for _ in 0..trials {
        let c1 = subset(&mut rng);
        let c2 = subset(&mut rng);
        let r = mixing_check(g, &c1, &c2, lambda)?;
        if !r.holds {
            summary.violations += 1;
        }
        if r.bound > 0.0 {
            summary.worst_ratio = summary.worst_ratio.max(r.deviation / r.bound);
        }
    }
    Ok(summary)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossBoundReport {
    pub p: u32,
    pub t: usize,
    pub mode: SearchMode,
    pub bound: u128,
    /// Valid (cross non-orthogonal) pairs examined.
    pub pairs_checked: u64,
    pub max_product: u128,
    pub best_c1: Vec<FpVector>,
    pub best_c2: Vec<FpVector>,
    pub violations: u64,
}

impl CrossBoundReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Largest `p^t` for which every subset pair is enumerated.
pub const EXHAUSTIVE_CROSS_LIMIT: u64 = 12;

/// Restarts used in randomized mode.
pub const CROSS_RESTARTS: usize = 2000;

/// Checks `|C1||C2| <= p^(t+2)` over pairs of sets of F_p^t whose cross
/// pairs are all non-orthogonal. The zero vector is orthogonal to
/// everything, so only nonzero vectors are considered.
pub fn cross_product_bound_check(p: PrimeModulus, t: usize, seed: u64) -> Result<CrossBoundReport> {
    if t < 2 {
        return Err(Error::InvalidParams("cross bound needs t >= 2".into()));
    }
    let size = (p.get() as u64).checked_pow(t as u32).unwrap_or(u64::MAX);
    let vertices: Vec<FpVector> = if size <= EXHAUSTIVE_CROSS_LIMIT {
        all_vectors(p, t)?.into_iter().skip(1).collect()
    } else {
        let g = build_gpt(p, t)?;
        g.vertices
    };
    let n = vertices.len();
    let words = n.div_ceil(64);
    let nonorth: Vec<Vec<u64>> = vertices
        .iter()
        .map(|u| {
            let mut row = vec![0u64; words];
            for (j, v) in vertices.iter().enumerate() {
                if u.dot_unchecked(v) != 0 {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    let bound = (p.get() as u128).pow(t as u32 + 2);
    let mut report = CrossBoundReport {
        p: p.get(),
        t,
        mode: SearchMode::Exhaustive,
        bound,
        pairs_checked: 0,
        max_product: 0,
        best_c1: Vec::new(),
        best_c2: Vec::new(),
        violations: 0,
    };
    let to_vecs = |mask: &[u64]| -> Vec<FpVector> {
        crate::graph::bits(mask)
            .map(|i| vertices[i].clone())
            .collect()
    };
    let record = |report: &mut CrossBoundReport, c1: &[u64], c2: &[u64]| {
        let product = crate::graph::popcount(c1) as u128 * crate::graph::popcount(c2) as u128;
        report.pairs_checked += 1;
        if product > bound {
            report.violations += 1;
        }
        if product > report.max_product {
            report.max_product = product;
            report.best_c1 = to_vecs(c1);
            report.best_c2 = to_vecs(c2);
        }
    };
    let common = |set: &[u64]| -> Vec<u64> {
        let mut acc = vec![u64::MAX; words];
        for i in crate::graph::bits(set) {
            for (a, b) in acc.iter_mut().zip(&nonorth[i]) {
                *a &= b;
            }
        }
        if !n.is_multiple_of(64) {
            acc[words - 1] &= (1u64 << (n % 64)) - 1;
        }
        acc
    };
    if size <= EXHAUSTIVE_CROSS_LIMIT {
        let full = 1u64 << n;
        for c1 in 0..full {
            let allowed = common(&[c1])[0];
            for c2 in 0..full {
                if c2 & !allowed == 0 {
                    record(&mut report, &[c1], &[c2]);
                }
            }
        }
    } else {
        report.mode = SearchMode::Randomized;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..CROSS_RESTARTS {
            let mut c1 = vec![0u64; words];
            let seeds = 1 + rng.next_u64() % 3;
            for _ in 0..seeds {
                let v = (rng.next_u64() % n as u64) as usize;
                c1[v / 64] |= 1 << (v % 64);
            }
            // alternate closures until the pair stabilizes
            let mut c2 = common(&c1);
            loop {
                record(&mut report, &c1, &c2);
                let next1 = common(&c2);
                let next2 = common(&next1);
                if next1 == c1 && next2 == c2 {
                    break;
                }
                c1 = next1;
                c2 = next2;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn small_graphs() {
        let g = build_gpt(m(2), 3).unwrap();
        assert_eq!((g.order(), g.degree()), (7, 3));
        let g = build_gpt(m(3), 2).unwrap();
        assert_eq!((g.order(), g.degree()), (8, 2));
        let g = build_gpt(m(2), 2).unwrap();
        assert_eq!((g.order(), g.degree()), (3, 1));
        // vertices (0,1), (1,0), (1,1); only (1,1) is self-orthogonal
        assert_eq!(g.loop_count(), 1);
        assert!(g.adjacent(2, 2));
        assert!(g.adjacent(0, 1));
        assert!(build_gpt(m(2), 13).is_err());
    }

    #[test]
    fn jacobi_on_known_matrices() {
        // [[2,1],[1,2]] -> 1, 3
        let (e, _) = jacobi_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
        // K_4 adjacency -> -1 (x3), 3
        let mut k4 = vec![1.0; 16];
        for i in 0..4 {
            k4[i * 4 + i] = 0.0;
        }
        let (e, _) = jacobi_eigenvalues(&k4, 4).unwrap();
        for x in &e[..3] {
            assert!((x + 1.0).abs() < 1e-10);
        }
        assert!((e[3] - 3.0).abs() < 1e-10);
        // 5-cycle -> 2 cos(2 pi k / 5)
        let mut c5 = vec![0.0; 25];
        for i in 0..5 {
            c5[i * 5 + (i + 1) % 5] = 1.0;
            c5[((i + 1) % 5) * 5 + i] = 1.0;
        }
        let (e, _) = jacobi_eigenvalues(&c5, 5).unwrap();
        let mut expected: Vec<f64> = (0..5)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 5.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn spectra_of_small_instances() {
        for (p, t) in [(2, 4), (3, 2)] {
            let g = build_gpt(m(p), t).unwrap();
            let r = spectrum(&g).unwrap();
            assert!(
                r.pass,
                "{p} {t}: {} > {}",
                r.lambda_max_abs_rest, r.vinh_bound
            );
            assert!((r.principal - r.degree as f64).abs() < 1e-9);
            assert_eq!(r.vinh_bound, 2.0);
            let sum: f64 = r.eigenvalues.iter().sum();
            assert!((sum - r.trace as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn mixing_examples() {
        let g = build_gpt(m(3), 2).unwrap();
        let lambda = spectrum(&g).unwrap().lambda_max_abs_rest;
        let all: Vec<usize> = (0..g.order()).collect();
        let r = mixing_check(&g, &all, &all, lambda).unwrap();
        assert_eq!(r.edges, (g.order() * g.degree()) as u64);
        assert!(r.deviation.abs() < 1e-9);

        // no loops over F_3^2: x^2 + y^2 = 0 forces x = y = 0
        assert_eq!(g.loop_count(), 0);
        let g4 = build_gpt(m(2), 4).unwrap();
        let looped = (0..g4.order()).find(|&i| g4.adjacent(i, i)).unwrap();
        let r = mixing_check(&g4, &[looped], &[looped], 2.0).unwrap();
        assert_eq!(r.edges, 1);

        let r = mixing_check(&g, &[], &all, lambda).unwrap();
        assert_eq!(r.edges, 0);
        assert!(mixing_check(&g, &[99], &all, lambda).is_err());

        let s = random_mixing_trials(&g, lambda, 200, 4).unwrap();
        assert_eq!(s.violations, 0);
    }

    #[test]
    fn exports() {
        let g = build_gpt(m(2), 2).unwrap();
        assert_eq!(g.to_dense_text(), "0 1 0\n1 0 0\n0 0 1\n");
        let d = g.to_dimacs();
        assert!(d.contains("c loop 3\n"));
        assert!(d.contains("p edge 3 1\ne 1 2\n"));
    }

    #[test]
    fn randomized_cross_bound() {
        let r = cross_product_bound_check(m(5), 2, 1).unwrap();
        assert_eq!(r.mode, SearchMode::Randomized);
        assert!(r.holds());
        assert!(r.max_product > 0);
        for u in &r.best_c1 {
            for v in &r.best_c2 {
                assert_ne!(u.inner_product(v).unwrap(), 0);
            }
        }
    }
}
