//! Subspaces of F_p^s and the cover collections behind the union bounds.
//!
//! Over F_2, a pairwise non-orthogonal set A of non-self-orthogonal vectors
//! lifts to `{(v, 1)}`, whose span is totally isotropic and therefore has
//! dimension at most `floor((t+1)/2)`; dropping the last coordinate gives a
//! small subspace containing A ([`f2_cover_of`]).
//!
//! Over F_p, the map `g(v) = (v^{⊗(p-1)}, 1, ..., 1)` (p-1 trailing ones)
//! satisfies `<g(u), g(v)> = <u, v>^(p-1) + (p-1)`, so by Fermat `u, v` are
//! orthogonal iff `g(u), g(v)` are not. Cross non-orthogonal sets A1, A2
//! therefore map into orthogonal spans W1, W2, and the preimages of those
//! spans are the cover pair ([`cover_pair_for`]).

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{all_vectors, FpVector, PrimeModulus};
use crate::tensor::{tensor_power, MAX_PRODUCT_DIM};

/// A subspace stored as its reduced row echelon basis. Equal subspaces have
/// identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    p: PrimeModulus,
    rows: Vec<Vec<u32>>,
}

impl SubspaceBasis {
    pub fn zero(p: PrimeModulus, ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            p,
            rows: Vec::new(),
        }
    }

    pub fn full(p: PrimeModulus, ambient_dim: usize) -> Self {
        let rows = (0..ambient_dim)
            .map(|i| FpVector::unit(p, ambient_dim, i).into_entries())
            .collect();
        Self {
            ambient_dim,
            p,
            rows,
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn basis_vectors(&self) -> Vec<FpVector> {
        self.rows
            .iter()
            .map(|r| FpVector::new(self.p, r.clone()).expect("rows are residues"))
            .collect()
    }

    fn check_vector(&self, v: &FpVector) -> Result<()> {
        if v.modulus() != self.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: v.p(),
            });
        }
        if v.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                left: self.ambient_dim,
                right: v.dim(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &FpVector) -> Result<bool> {
        self.check_vector(v)?;
        let m = self.p;
        let mut residual = v.entries().to_vec();
        for row in &self.rows {
            let pivot = row.iter().position(|&e| e != 0).expect("nonzero row");
            let c = residual[pivot];
            if c != 0 {
                let neg = m.neg(c);
                for (r, &x) in residual.iter_mut().zip(row) {
                    *r = m.add(*r, m.mul(neg, x));
                }
            }
        }
        Ok(residual.iter().all(|&e| e == 0))
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> Result<bool> {
        for v in self.basis_vectors() {
            if !other.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The span of this basis together with `extra`.
    pub fn extended(&self, extra: &[FpVector]) -> Result<SubspaceBasis> {
        let mut gens = self.basis_vectors();
        gens.extend_from_slice(extra);
        span(self.p, self.ambient_dim, &gens)
    }

    /// Adds standard basis vectors, lowest index first, until the rank
    /// reaches `target`.
    pub fn extend_to_dim(&self, target: usize) -> Result<SubspaceBasis> {
        if target > self.ambient_dim {
            return Err(Error::InvalidParams(format!(
                "cannot extend to dimension {target} inside F_p^{}",
                self.ambient_dim
            )));
        }
        let mut out = self.clone();
        for i in 0..self.ambient_dim {
            if out.rank() >= target {
                break;
            }
            let e = FpVector::unit(self.p, self.ambient_dim, i);
            if !out.contains(&e)? {
                out = out.extended(&[e])?;
            }
        }
        Ok(out)
    }

    /// Span of the basis rows restricted to their first `len` coordinates.
    pub fn project_prefix(&self, len: usize) -> Result<SubspaceBasis> {
        if len > self.ambient_dim {
            return Err(Error::DimensionMismatch {
                left: self.ambient_dim,
                right: len,
            });
        }
        let gens: Vec<FpVector> = self
            .rows
            .iter()
            .map(|r| FpVector::new(self.p, r[..len].to_vec()).expect("residues"))
            .collect();
        span(self.p, len, &gens)
    }

    /// W ⊆ W⊥.
    pub fn is_totally_isotropic(&self) -> bool {
        subspaces_orthogonal(self, self).unwrap_or(false)
    }
}

/// Canonical RREF basis of the span. Empty input gives the zero subspace.
pub fn span(p: PrimeModulus, ambient_dim: usize, vectors: &[FpVector]) -> Result<SubspaceBasis> {
    let probe = SubspaceBasis::zero(p, ambient_dim);
    for v in vectors {
        probe.check_vector(v)?;
    }
    let mut rows: Vec<Vec<u32>> = vectors.iter().map(|v| v.entries().to_vec()).collect();
    let mut rank = 0;
    for col in 0..ambient_dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = p.inv(rows[rank][col]).expect("nonzero pivot");
        for x in rows[rank].iter_mut() {
            *x = p.mul(*x, inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col] == 0 {
                continue;
            }
            let neg = p.neg(row[col]);
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = p.add(*x, p.mul(neg, y));
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    Ok(SubspaceBasis {
        ambient_dim,
        p,
        rows,
    })
}

pub fn subspaces_orthogonal(w1: &SubspaceBasis, w2: &SubspaceBasis) -> Result<bool> {
    if w1.p != w2.p {
        return Err(Error::ModulusMismatch {
            left: w1.p.get(),
            right: w2.p.get(),
        });
    }
    if w1.ambient_dim != w2.ambient_dim {
        return Err(Error::DimensionMismatch {
            left: w1.ambient_dim,
            right: w2.ambient_dim,
        });
    }
    let (a, b) = (w1.basis_vectors(), w2.basis_vectors());
    Ok(a.iter().all(|u| b.iter().all(|v| u.dot_unchecked(v) == 0)))
}

/// `floor((t + 1) / 2)`.
pub fn f2_cover_dim(t: usize) -> usize {
    t.div_ceil(2)
}

fn pair_violation(u: &FpVector, v: &FpVector, reason: &'static str) -> Error {
    Error::PairViolation {
        left: u.to_string(),
        right: v.to_string(),
        reason,
    }
}

/// A subspace of F_2^t of dimension at most `floor((t+1)/2)` containing `a`.
/// Every pair of `a`, including each vector with itself, must have inner
/// product 1.
pub fn f2_cover_of(t: usize, a: &[FpVector]) -> Result<SubspaceBasis> {
    let f2 = PrimeModulus::new(2)?;
    for u in a {
        SubspaceBasis::zero(f2, t).check_vector(u)?;
    }
    for (i, u) in a.iter().enumerate() {
        for v in &a[i..] {
            if u.dot_unchecked(v) == 0 {
                return Err(pair_violation(
                    u,
                    v,
                    "orthogonal pair in a pairwise non-orthogonal set",
                ));
            }
        }
    }
    let lifted: Vec<FpVector> = a
        .iter()
        .map(|v| v.extend_with(&[1]))
        .collect::<Result<_>>()?;
    let w = span(f2, t + 1, &lifted)?;
    if !w.is_totally_isotropic() {
        return Err(Error::Internal(
            "lifted span is not totally isotropic".into(),
        ));
    }
    if w.rank() > f2_cover_dim(t) {
        return Err(Error::Internal(format!(
            "isotropic subspace of F_2^{} has dimension {}",
            t + 1,
            w.rank()
        )));
    }
    let cover = w.project_prefix(t)?;
    for v in a {
        if !cover.contains(v)? {
            return Err(Error::Internal(format!("{v} missing from its cover")));
        }
    }
    Ok(cover)
}

/// The member of the dimension-`floor((t+1)/2)` collection that contains
/// [`f2_cover_of`]'s subspace.
pub fn f2_cover_member(t: usize, a: &[FpVector]) -> Result<SubspaceBasis> {
    f2_cover_of(t, a)?.extend_to_dim(f2_cover_dim(t))
}

/// Limit on subspace enumeration.
pub const MAX_SUBSPACE_ENUMERATION: usize = 1 << 22;

/// Every `r`-dimensional subspace of F_p^n, by enumerating reduced row
/// echelon forms (pivot columns, then free entries right of each pivot).
pub fn enumerate_subspaces(p: PrimeModulus, n: usize, r: usize) -> Result<Vec<SubspaceBasis>> {
    if r > n {
        return Ok(Vec::new());
    }
    let count = gaussian_binomial(n, r, p.get() as u64);
    if count > BigUint::from(MAX_SUBSPACE_ENUMERATION) {
        return Err(Error::TooLarge {
            what: "subspace enumeration",
            size: u128::try_from(&count).unwrap_or(u128::MAX),
            limit: MAX_SUBSPACE_ENUMERATION as u128,
        });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for pivots in combinations(n, r) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| {
                let pivots = &pivots;
                (c + 1..n)
                    .filter(move |j| !pivots.contains(j))
                    .map(move |j| (i, j))
            })
            .collect();
        let mut values = vec![0u32; free.len()];
        loop {
            let mut rows = vec![vec![0u32; n]; r];
            for (i, &c) in pivots.iter().enumerate() {
                rows[i][c] = 1;
            }
            for (&(i, j), &x) in free.iter().zip(&values) {
                rows[i][j] = x;
            }
            let basis = SubspaceBasis {
                ambient_dim: n,
                p,
                rows,
            };
            if seen.insert(basis.clone()) {
                out.push(basis);
            }
            if !odometer(&mut values, p.get()) {
                break;
            }
        }
    }
    Ok(out)
}

fn odometer(values: &mut [u32], base: u32) -> bool {
    for v in values.iter_mut().rev() {
        *v += 1;
        if *v < base {
            return true;
        }
        *v = 0;
    }
    false
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Number of r-dimensional subspaces of F_q^n.
pub fn gaussian_binomial(n: usize, r: usize, q: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        num *= q.pow((n - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

/// Largest `t` for which [`count_f2_collection`] enumerates.
pub const MAX_COLLECTION_T: usize = 8;

/// Number of subspaces of F_2^t of dimension `floor((t+1)/2)`, counted by
/// enumerating canonical forms. Fails internally if the count exceeds
/// `2^(t^2)`.
pub fn count_f2_collection(t: usize) -> Result<BigUint> {
    if t == 0 || t > MAX_COLLECTION_T {
        return Err(Error::TooLarge {
            what: "collection dimension t",
            size: t as u128,
            limit: MAX_COLLECTION_T as u128,
        });
    }
    let f2 = PrimeModulus::new(2)?;
    let count = BigUint::from(enumerate_subspaces(f2, t, f2_cover_dim(t))?.len());
    if count > BigUint::one() << (t * t) {
        return Err(Error::Internal(format!("{count} subspaces exceed 2^(t^2)")));
    }
    Ok(count)
}

/// Dimension of `g(v)` for `v ∈ F_p^t`: `t^(p-1) + p - 1`.
pub fn g_dim(p: PrimeModulus, t: usize) -> Result<usize> {
    let e = p.get() - 1;
    let inner = (t as u128).checked_pow(e).unwrap_or(u128::MAX);
    let dim = inner.saturating_add(e as u128);
    if dim > MAX_PRODUCT_DIM as u128 {
        return Err(Error::TooLarge {
            what: "g-map dimension",
            size: dim,
            limit: MAX_PRODUCT_DIM as u128,
        });
    }
    Ok(dim as usize)
}

/// `g(v) = (v^{⊗(p-1)}, 1, ..., 1)` with p-1 trailing ones.
pub fn g_map(v: &FpVector) -> Result<FpVector> {
    let p = v.modulus();
    g_dim(p, v.dim())?;
    let e = (p.get() - 1) as usize;
    tensor_power(v, e)?.extend_with(&vec![1; e])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GIdentityReport {
    pub p: u32,
    pub t: usize,
    pub pairs_checked: u64,
    /// Pairs with `<g(u), g(v)> != <u, v>^(p-1) + (p-1)`.
    pub identity_violations: u64,
    /// Pairs where orthogonality of `u, v` does not match non-orthogonality
    /// of `g(u), g(v)`.
    pub biconditional_violations: u64,
}

impl GIdentityReport {
    pub fn holds(&self) -> bool {
        self.identity_violations == 0 && self.biconditional_violations == 0
    }
}

/// Default pair budget for [`g_inner_identity_check`].
pub const DEFAULT_PAIR_BUDGET: u128 = 1 << 26;

/// Checks the g-map inner product identity on all ordered pairs of F_p^t.
pub fn g_inner_identity_check(p: PrimeModulus, t: usize, budget: u128) -> Result<GIdentityReport> {
    let pairs = (p.get() as u128)
        .checked_pow(2 * t as u32)
        .unwrap_or(u128::MAX);
    if pairs > budget {
        return Err(Error::TooLarge {
            what: "g-map pair check",
            size: pairs,
            limit: budget,
        });
    }
    let all = all_vectors(p, t)?;
    let images: Vec<FpVector> = all.iter().map(g_map).collect::<Result<_>>()?;
    let e = (p.get() - 1) as u64;
    let mut report = GIdentityReport {
        p: p.get(),
        t,
        pairs_checked: 0,
        identity_violations: 0,
        biconditional_violations: 0,
    };
    for (u, gu) in all.iter().zip(&images) {
        for (v, gv) in all.iter().zip(&images) {
            let ip = u.dot_unchecked(v);
            let gip = gu.dot_unchecked(gv);
            report.pairs_checked += 1;
            if gip != p.add(p.pow(ip, e), p.get() - 1) {
                report.identity_violations += 1;
            }
            if (ip == 0) != (gip != 0) {
                report.biconditional_violations += 1;
            }
        }
    }
    Ok(report)
}

/// `{v ∈ F_p^t : g(v) ∈ W}`, lexicographic order.
pub fn g_preimage(w: &SubspaceBasis, t: usize) -> Result<Vec<FpVector>> {
    let expected = g_dim(w.p, t)?;
    if w.ambient_dim != expected {
        return Err(Error::DimensionMismatch {
            left: expected,
            right: w.ambient_dim,
        });
    }
    let mut out = Vec::new();
    for v in all_vectors(w.p, t)? {
        if w.contains(&g_map(&v)?)? {
            out.push(v);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverPair {
    pub c1: Vec<FpVector>,
    pub c2: Vec<FpVector>,
    pub w1: SubspaceBasis,
    pub w2: SubspaceBasis,
}

impl CoverPair {
    pub fn product(&self) -> u128 {
        self.c1.len() as u128 * self.c2.len() as u128
    }
}

/// Builds `C_i = g^{-1}(span g(A_i))`. Requires `t >= 2` and every cross pair
/// of `a1 × a2` non-orthogonal; the returned pair satisfies `A_i ⊆ C_i`,
/// `W1 ⊥ W2`, cross non-orthogonality of `C1 × C2`, and
/// `|C1| |C2| <= p^(t+2)` (each checked, violations are internal errors).
pub fn cover_pair_for(
    p: PrimeModulus,
    t: usize,
    a1: &[FpVector],
    a2: &[FpVector],
) -> Result<CoverPair> {
    if t < 2 {
        return Err(Error::InvalidParams("cover pairs need t >= 2".into()));
    }
    let probe = SubspaceBasis::zero(p, t);
    for v in a1.iter().chain(a2) {
        probe.check_vector(v)?;
    }
    for u in a1 {
        for v in a2 {
            if u.dot_unchecked(v) == 0 {
                return Err(pair_violation(u, v, "orthogonal cross pair"));
            }
        }
    }
    let dim = g_dim(p, t)?;
    let images = |a: &[FpVector]| a.iter().map(g_map).collect::<Result<Vec<_>>>();
    let w1 = span(p, dim, &images(a1)?)?;
    let w2 = span(p, dim, &images(a2)?)?;
    if !subspaces_orthogonal(&w1, &w2)? {
        return Err(Error::Internal("image spans are not orthogonal".into()));
    }
    let c1 = g_preimage(&w1, t)?;
    let c2 = g_preimage(&w2, t)?;
    for (a, c) in [(a1, &c1), (a2, &c2)] {
        if let Some(v) = a.iter().find(|v| !c.contains(v)) {
            return Err(Error::Internal(format!("{v} missing from its cover")));
        }
    }
    for u in &c1 {
        for v in &c2 {
            if u.dot_unchecked(v) == 0 {
                return Err(Error::Internal(format!(
                    "cover pair has orthogonal {u}, {v}"
                )));
            }
        }
    }
    let pair = CoverPair { c1, c2, w1, w2 };
    let bound = (p.get() as u128).pow(t as u32 + 2);
    if pair.product() > bound {
        return Err(Error::Internal(format!(
            "|C1||C2| = {} exceeds p^(t+2) = {bound}",
            pair.product()
        )));
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::fp;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn span_examples() {
        assert_eq!(
            span(m(2), 2, &[fp(2, &[1, 1]), fp(2, &[0, 1])])
                .unwrap()
                .rank(),
            2
        );
        assert_eq!(
            span(m(5), 2, &[fp(5, &[1, 2]), fp(5, &[2, 4])])
                .unwrap()
                .rank(),
            1
        );
        assert_eq!(span(m(3), 4, &[]).unwrap().rank(), 0);
        assert!(span(m(3), 2, &[fp(3, &[1])]).is_err());
    }

    #[test]
    fn span_is_reduced_echelon() {
        let w = span(
            m(3),
            3,
            &[fp(3, &[2, 1, 0]), fp(3, &[1, 1, 1]), fp(3, &[0, 0, 1])],
        )
        .unwrap();
        assert_eq!(w.rows(), &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let w = span(m(3), 3, &[fp(3, &[0, 2, 1]), fp(3, &[0, 1, 2])]).unwrap();
        assert_eq!(w.rows(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn orthogonality_examples() {
        for p in [2, 3, 5] {
            let e1 = span(m(p), 3, &[FpVector::unit(m(p), 3, 0)]).unwrap();
            let e2 = span(m(p), 3, &[FpVector::unit(m(p), 3, 1)]).unwrap();
            assert!(subspaces_orthogonal(&e1, &e2).unwrap());
            assert!(!subspaces_orthogonal(&e1, &e1).unwrap());
            let zero = SubspaceBasis::zero(m(p), 3);
            assert!(subspaces_orthogonal(&zero, &SubspaceBasis::full(m(p), 3)).unwrap());
        }
        assert!(
            subspaces_orthogonal(&SubspaceBasis::zero(m(2), 3), &SubspaceBasis::zero(m(2), 4))
                .is_err()
        );
    }

    #[test]
    fn f2_cover_small() {
        let w = f2_cover_of(3, &[fp(2, &[1, 0, 0])]).unwrap();
        assert!(w.rank() <= 2);
        assert!(w.contains(&fp(2, &[1, 0, 0])).unwrap());
        let member = f2_cover_member(3, &[fp(2, &[1, 0, 0])]).unwrap();
        assert_eq!(member.rank(), 2);
        assert!(w.is_subspace_of(&member).unwrap());
    }

    #[test]
    fn f2_cover_rejects_orthogonal_pairs() {
        assert!(matches!(
            f2_cover_of(2, &[fp(2, &[1, 0]), fp(2, &[0, 1])]),
            Err(Error::PairViolation { .. })
        ));
        assert!(matches!(
            f2_cover_of(2, &[fp(2, &[1, 1])]),
            Err(Error::PairViolation { .. })
        ));
    }

    /// Independent RREF-free oracle: count r-subsets of nonzero vectors that
    /// are linearly independent, divided by |GL_r|-style ordered basis count.
    fn subspace_count_by_bases(n: usize, r: usize) -> u64 {
        // ordered bases of an r-dim subspace of F_2^n: count ordered
        // independent r-tuples in F_2^n and divide by those inside F_2^r
        let ordered = |ambient: u32, r: usize| -> u64 {
            (0..r).map(|i| (1u64 << ambient) - (1u64 << i)).product()
        };
        ordered(n as u32, r) / ordered(r as u32, r)
    }

    #[test]
    fn collection_counts() {
        assert_eq!(count_f2_collection(3).unwrap(), BigUint::from(7u32));
        assert_eq!(count_f2_collection(1).unwrap(), BigUint::from(1u32));
        let c4 = count_f2_collection(4).unwrap();
        assert!(c4 <= BigUint::from(1u32 << 16));
        for t in 1..=6 {
            assert_eq!(
                count_f2_collection(t).unwrap(),
                BigUint::from(subspace_count_by_bases(t, f2_cover_dim(t)))
            );
            assert_eq!(
                count_f2_collection(t).unwrap(),
                gaussian_binomial(t, f2_cover_dim(t), 2)
            );
        }
        assert!(count_f2_collection(9).is_err());
    }

    #[test]
    fn subspace_enumeration_over_f3() {
        // 2-dim subspaces of F_3^3: (27-1)(27-3)/((9-1)(9-3)) = 13
        let all = enumerate_subspaces(m(3), 3, 2).unwrap();
        assert_eq!(all.len(), 13);
        for w in &all {
            assert_eq!(span(m(3), 3, &w.basis_vectors()).unwrap(), *w);
        }
    }

    #[test]
    fn g_map_examples() {
        assert_eq!(g_map(&fp(2, &[1, 0, 1])).unwrap(), fp(2, &[1, 0, 1, 1]));
        assert_eq!(g_map(&fp(3, &[1, 2])).unwrap(), fp(3, &[1, 2, 2, 1, 1, 1]));
        assert_eq!(g_map(&fp(3, &[0, 0])).unwrap(), fp(3, &[0, 0, 0, 0, 1, 1]));
        assert_eq!(g_dim(m(5), 2).unwrap(), 20);
    }

    #[test]
    fn g_identity_small_cases() {
        let r = g_inner_identity_check(m(3), 2, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(r.pairs_checked, 81);
        assert!(r.holds());
        let r = g_inner_identity_check(m(2), 3, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(r.pairs_checked, 64);
        assert!(r.holds());
        assert!(g_inner_identity_check(m(3), 8, 1000).is_err());
        let zero = fp(3, &[0, 0]);
        let g0 = g_map(&zero).unwrap();
        assert_eq!(g0.inner_product(&g0).unwrap(), 2);
    }

    #[test]
    fn preimage_examples() {
        let dim = g_dim(m(3), 2).unwrap();
        assert_eq!(
            g_preimage(&SubspaceBasis::full(m(3), dim), 2)
                .unwrap()
                .len(),
            9
        );
        assert!(g_preimage(&SubspaceBasis::zero(m(3), dim), 2)
            .unwrap()
            .is_empty());

        let e1 = fp(3, &[1, 0]);
        let w = span(m(3), dim, &[g_map(&e1).unwrap()]).unwrap();
        let pre = g_preimage(&w, 2).unwrap();
        // g(v) = (v1^2, v1 v2, v2 v1, v2^2, 1, 1) is a multiple of
        // (1, 0, 0, 0, 1, 1) only for v2 = 0 and v1^2 = 1
        let oracle: Vec<FpVector> = all_vectors(m(3), 2)
            .unwrap()
            .into_iter()
            .filter(|v| v.entries()[1] == 0 && v.entries()[0] != 0)
            .collect();
        assert_eq!(pre, oracle);
        assert!(g_preimage(&w, 3).is_err());
    }

    #[test]
    fn cover_pair_examples() {
        let e1 = fp(3, &[1, 0]);
        let pair = cover_pair_for(m(3), 2, std::slice::from_ref(&e1), std::slice::from_ref(&e1)).unwrap();
        assert_eq!(pair.c1, pair.c2);
        assert!(pair.c1.contains(&e1));
        assert!(pair.product() <= 81);

        let f = fp(3, &[1, 1]);
        let pair = cover_pair_for(m(3), 2, std::slice::from_ref(&e1), std::slice::from_ref(&f)).unwrap();
        assert!(pair.c1.contains(&e1) && pair.c2.contains(&f));

        let pair = cover_pair_for(m(3), 2, &[], &[f]).unwrap();
        assert!(pair.c1.is_empty());

        assert!(matches!(
            cover_pair_for(m(3), 2, &[e1], &[fp(3, &[0, 1])]),
            Err(Error::PairViolation { .. })
        ));
        assert!(cover_pair_for(m(3), 1, &[], &[]).is_err());
    }
}
