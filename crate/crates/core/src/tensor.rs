//! Tensor products of vectors and of vector sets.
//!
//! Layout: the product of `u` (length `a`) and `v` (length `b`) has length
//! `a * b`, and coordinate `(i1, i2)` lives at flat position `i1 * b + i2`.
//! Longer products are left-associated folds, so the flat order is the
//! row-major lexicographic order of multi-indices.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{FpVector, PrimeModulus};

/// Largest product dimension the crate will materialize.
pub const MAX_PRODUCT_DIM: usize = 1 << 20;

pub fn tensor_pair(u: &FpVector, v: &FpVector) -> Result<FpVector> {
    if u.modulus() != v.modulus() {
        return Err(Error::ModulusMismatch {
            left: u.p(),
            right: v.p(),
        });
    }
    let dim = (u.dim() as u128) * (v.dim() as u128);
    if dim > MAX_PRODUCT_DIM as u128 {
        return Err(Error::TooLarge {
            what: "tensor product dimension",
            size: dim,
            limit: MAX_PRODUCT_DIM as u128,
        });
    }
    let m = u.modulus();
    let mut out = Vec::with_capacity(dim as usize);
    for &a in u.entries() {
        out.extend(v.entries().iter().map(|&b| m.mul(a, b)));
    }
    FpVector::new(m, out)
}

/// `v ⊗ v ⊗ ... ⊗ v` with `power` factors.
pub fn tensor_power(v: &FpVector, power: usize) -> Result<FpVector> {
    if power == 0 {
        return Err(Error::EmptyFactors);
    }
    let mut acc = v.clone();
    for _ in 1..power {
        acc = tensor_pair(&acc, v)?;
    }
    Ok(acc)
}

/// A product vector kept together with its factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorFactorization {
    factors: Vec<FpVector>,
    product: FpVector,
}

impl TensorFactorization {
    pub fn factors(&self) -> &[FpVector] {
        &self.factors
    }

    pub fn product(&self) -> &FpVector {
        &self.product
    }

    pub fn into_product(self) -> FpVector {
        self.product
    }

    /// Number of factors.
    pub fn m(&self) -> usize {
        self.factors.len()
    }

    /// Factor dimension.
    pub fn t(&self) -> usize {
        self.factors[0].dim()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.product.modulus()
    }
}

pub fn tensor_many(factors: &[FpVector]) -> Result<TensorFactorization> {
    let first = factors.first().ok_or(Error::EmptyFactors)?;
    for f in &factors[1..] {
        first.check_compatible(f)?;
    }
    let mut product = first.clone();
    for f in &factors[1..] {
        product = tensor_pair(&product, f)?;
    }
    Ok(TensorFactorization {
        factors: factors.to_vec(),
        product,
    })
}

#[derive(Serialize, Deserialize)]
struct FactorizationRepr {
    p: u64,
    t: usize,
    m: usize,
    factors: Vec<Vec<u64>>,
}

impl Serialize for TensorFactorization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FactorizationRepr {
            p: self.modulus().get() as u64,
            t: self.t(),
            m: self.m(),
            factors: self
                .factors
                .iter()
                .map(|f| f.entries().iter().map(|&e| e as u64).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorFactorization {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FactorizationRepr::deserialize(d)?;
        let modulus = PrimeModulus::new(repr.p).map_err(D::Error::custom)?;
        if repr.factors.len() != repr.m {
            return Err(D::Error::custom(format!(
                "expected {} factors, found {}",
                repr.m,
                repr.factors.len()
            )));
        }
        let mut factors = Vec::with_capacity(repr.m);
        for f in repr.factors {
            if f.len() != repr.t {
                return Err(D::Error::custom(Error::DimensionMismatch {
                    left: repr.t,
                    right: f.len(),
                }));
            }
            let entries = f
                .into_iter()
                .map(|e| u32::try_from(e).unwrap_or(u32::MAX))
                .collect();
            factors.push(FpVector::new(modulus, entries).map_err(D::Error::custom)?);
        }
        tensor_many(&factors).map_err(D::Error::custom)
    }
}

/// The set of `j`-th factors (0-based) over a collection, first-seen order,
/// duplicates removed.
pub fn projection(set: &[TensorFactorization], j: usize) -> Result<Vec<FpVector>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for member in set {
        let factor = member.factors.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: member.m(),
        })?;
        if seen.insert(factor) {
            out.push(factor.clone());
        }
    }
    Ok(out)
}

/// `A_1 ⊗ ... ⊗ A_m`, kept as its factor sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductBox {
    pub factor_sets: Vec<Vec<FpVector>>,
}

impl ProductBox {
    pub fn new(factor_sets: Vec<Vec<FpVector>>) -> Self {
        Self { factor_sets }
    }

    /// `∏ |A_j|`, which is the exact cardinality when every factor vector is
    /// nonzero with leading entry 1 (the product map is then injective).
    pub fn size(&self) -> Result<BigUint> {
        for set in &self.factor_sets {
            if let Some(bad) = set.iter().find(|v| !v.is_normalized()) {
                return Err(Error::NotNormalized {
                    vector: bad.to_string(),
                });
            }
        }
        Ok(self
            .factor_sets
            .iter()
            .fold(BigUint::one(), |acc, s| acc * BigUint::from(s.len())))
    }

    pub fn contains(&self, f: &TensorFactorization) -> bool {
        f.m() == self.factor_sets.len()
            && f.factors
                .iter()
                .zip(&self.factor_sets)
                .all(|(v, set)| set.contains(v))
    }

    /// Every product vector, deduplicated. Refuses boxes with more than
    /// `limit` factor tuples.
    pub fn materialize(&self, limit: usize) -> Result<Vec<FpVector>> {
        let tuples = self
            .factor_sets
            .iter()
            .fold(BigUint::one(), |acc, s| acc * BigUint::from(s.len()));
        if tuples > BigUint::from(limit) {
            return Err(Error::TooLarge {
                what: "box",
                size: u128::try_from(&tuples).unwrap_or(u128::MAX),
                limit: limit as u128,
            });
        }
        if self.factor_sets.is_empty() || tuples.is_zero() {
            return Ok(Vec::new());
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.factor_sets.len()];
        loop {
            let factors: Vec<FpVector> = idx
                .iter()
                .zip(&self.factor_sets)
                .map(|(&i, s)| s[i].clone())
                .collect();
            let product = tensor_many(&factors)?.into_product();
            if seen.insert(product.clone()) {
                out.push(product);
            }
            // odometer, last factor fastest
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < self.factor_sets[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}
