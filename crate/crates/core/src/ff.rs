//! Prime-field scalars and vectors.
//!
//! Every [`FpVector`] carries its own [`PrimeModulus`]; operations on vectors
//! from different fields or of different lengths are errors. Over F_2 the
//! vector additionally keeps a word-packed copy of its entries so inner
//! products reduce to `AND` + popcount parity.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted. Residue products must fit comfortably in `u64`.
pub const MAX_MODULUS: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self(p as u32))
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let p = self.0 as u64;
        let mut acc = 1 % p;
        let mut b = base as u64 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc as u32
    }

    /// Multiplicative inverse via Fermat; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.0;
        (a != 0).then(|| self.pow(a, self.0 as u64 - 2))
    }
}

impl<'de> Deserialize<'de> for PrimeModulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        PrimeModulus::new(p).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A vector over F_p.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpVector {
    modulus: PrimeModulus,
    entries: Vec<u32>,
    // Only populated for p = 2; bit i of word i/64 holds entry i.
    packed: Option<Vec<u64>>,
}

impl FpVector {
    pub fn new(modulus: PrimeModulus, entries: Vec<u32>) -> Result<Self> {
        let p = modulus.get();
        if let Some((position, &e)) = entries.iter().enumerate().find(|(_, &e)| e >= p) {
            return Err(Error::EntryOutOfRange {
                entry: e as u64,
                position,
                p,
            });
        }
        Ok(Self::from_residues(modulus, entries))
    }

    /// Reduces arbitrary integers into [0, p).
    pub fn from_ints(modulus: PrimeModulus, values: &[i64]) -> Self {
        let p = modulus.get() as i64;
        let entries = values.iter().map(|v| v.rem_euclid(p) as u32).collect();
        Self::from_residues(modulus, entries)
    }

    pub fn zeros(modulus: PrimeModulus, dim: usize) -> Self {
        Self::from_residues(modulus, vec![0; dim])
    }

    /// Standard basis vector e_i (0-based).
    pub fn unit(modulus: PrimeModulus, dim: usize, i: usize) -> Self {
        let mut entries = vec![0; dim];
        entries[i] = 1;
        Self::from_residues(modulus, entries)
    }

    pub(crate) fn from_residues(modulus: PrimeModulus, entries: Vec<u32>) -> Self {
        debug_assert!(entries.iter().all(|&e| e < modulus.get()));
        let packed = (modulus.get() == 2).then(|| pack_bits(&entries));
        Self {
            modulus,
            entries,
            packed,
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn p(&self) -> u32 {
        self.modulus.get()
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.entries
    }

    /// Packed words for F_2 vectors.
    pub fn packed_words(&self) -> Option<&[u64]> {
        self.packed.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn leading_entry(&self) -> Option<(usize, u32)> {
        self.entries
            .iter()
            .copied()
            .enumerate()
            .find(|&(_, e)| e != 0)
    }

    /// True when the first nonzero entry is 1.
    pub fn is_normalized(&self) -> bool {
        matches!(self.leading_entry(), Some((_, 1)))
    }

    pub fn check_compatible(&self, other: &FpVector) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.p(),
                right: other.p(),
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn inner_product(&self, other: &FpVector) -> Result<u32> {
        self.check_compatible(other)?;
        Ok(self.dot_unchecked(other))
    }

    /// Inner product without the compatibility check.
    pub(crate) fn dot_unchecked(&self, other: &FpVector) -> u32 {
        match (&self.packed, &other.packed) {
            (Some(a), Some(b)) => packed_dot(a, b),
            _ => self.dot_scalar(other),
        }
    }

    /// Entrywise reference inner product, bypassing the packed path.
    pub fn inner_product_reference(&self, other: &FpVector) -> Result<u32> {
        self.check_compatible(other)?;
        Ok(self.dot_scalar(other))
    }

    fn dot_scalar(&self, other: &FpVector) -> u32 {
        let p = self.p() as u64;
        // Each product is < p^2 <= 2^32, so reduce every few terms.
        let mut acc = 0u64;
        for (&a, &b) in self.entries.iter().zip(&other.entries) {
            acc += a as u64 * b as u64;
            if acc >= 1 << 62 {
                acc %= p;
            }
        }
        (acc % p) as u32
    }

    pub fn is_self_orthogonal(&self) -> bool {
        self.dot_unchecked(self) == 0
    }

    pub fn scale(&self, a: u32) -> FpVector {
        let m = self.modulus;
        let entries = self.entries.iter().map(|&e| m.mul(e, a)).collect();
        Self::from_residues(m, entries)
    }

    pub fn add(&self, other: &FpVector) -> Result<FpVector> {
        self.check_compatible(other)?;
        let m = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| m.add(a, b))
            .collect();
        Ok(Self::from_residues(m, entries))
    }

    /// Scales so the first nonzero entry becomes 1.
    pub fn normalize_leading(&self) -> Result<FpVector> {
        let (_, lead) = self.leading_entry().ok_or(Error::ZeroVector)?;
        let inv = self.modulus.inv(lead).expect("leading entry is nonzero");
        Ok(self.scale(inv))
    }

    /// Appends `extra` zero coordinates.
    pub fn pad_zeros(&self, extra: usize) -> FpVector {
        let mut entries = self.entries.clone();
        entries.resize(self.dim() + extra, 0);
        Self::from_residues(self.modulus, entries)
    }

    /// Appends the given residues.
    pub fn extend_with(&self, tail: &[u32]) -> Result<FpVector> {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(tail);
        FpVector::new(self.modulus, entries)
    }
}

/// Enumeration limit for exhaustive walks over F_p^t.
pub const MAX_ENUMERATION: u64 = 1 << 24;

/// All of F_p^t in lexicographic order (first coordinate most significant),
/// starting with the zero vector.
pub fn all_vectors(modulus: PrimeModulus, t: usize) -> Result<Vec<FpVector>> {
    let p = modulus.get() as u64;
    let total = (p as u128).checked_pow(t as u32).unwrap_or(u128::MAX);
    if total > MAX_ENUMERATION as u128 {
        return Err(Error::TooLarge {
            what: "vector enumeration",
            size: total,
            limit: MAX_ENUMERATION as u128,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut digits = vec![0u32; t];
    for _ in 0..total {
        out.push(FpVector::from_residues(modulus, digits.clone()));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < p as u32 {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

fn pack_bits(entries: &[u32]) -> Vec<u64> {
    let mut words = vec![0u64; entries.len().div_ceil(64)];
    for (i, &e) in entries.iter().enumerate() {
        if e & 1 == 1 {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

fn packed_dot(a: &[u64], b: &[u64]) -> u32 {
    let ones: u32 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum();
    ones & 1
}

impl fmt::Debug for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}{}", self.p(), self)
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    p: u64,
    dim: usize,
    entries: Vec<u64>,
}

impl Serialize for FpVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorRepr {
            p: self.p() as u64,
            dim: self.dim(),
            entries: self.entries.iter().map(|&e| e as u64).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FpVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = VectorRepr::deserialize(d)?;
        let modulus = PrimeModulus::new(repr.p).map_err(D::Error::custom)?;
        if repr.dim != repr.entries.len() {
            return Err(D::Error::custom(Error::DimensionMismatch {
                left: repr.dim,
                right: repr.entries.len(),
            }));
        }
        let p = modulus.get();
        let mut entries = Vec::with_capacity(repr.entries.len());
        for (position, e) in repr.entries.into_iter().enumerate() {
            if e >= p as u64 {
                return Err(D::Error::custom(Error::EntryOutOfRange {
                    entry: e,
                    position,
                    p,
                }));
            }
            entries.push(e as u32);
        }
        Ok(FpVector::from_residues(modulus, entries))
    }
}

/// Shorthand used throughout tests: `fp(3, &[1, 2])`.
pub fn fp(p: u64, entries: &[u32]) -> FpVector {
    let modulus = PrimeModulus::new(p).expect("prime modulus");
    FpVector::new(modulus, entries.to_vec()).expect("valid residues")
}
