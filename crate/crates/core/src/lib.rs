//! Nearly orthogonal vector sets over prime fields.
//!
//! A set of non-self-orthogonal vectors is *k-nearly orthogonal* when every
//! k+1 of its members include an orthogonal pair. This crate builds such sets
//! by sampling tensor products of short base vectors, verifies them exactly,
//! and checks the combinatorial and spectral facts the construction relies on
//! on small instances.
//!
//! Modules:
//! - [`ff`]: prime-field vectors and inner products
//! - [`tensor`]: tensor products of vectors and of sets (boxes)
//! - [`construction`]: base sets, parameter schedules, sampling, the build loop
//! - [`verify`]: exact near-orthogonality and bipartite checks
//! - [`graph`]: bitset graphs, clique search, clique covers, DIMACS
//! - [`covers`]: subspaces and the cover collections used by the union bounds
//! - [`spectral`]: the orthogonality graph G(p, t), its spectrum and mixing
//! - [`analysis`]: counting pairwise non-orthogonal sets and witness graphs

pub mod analysis;
pub mod construction;
pub mod covers;
pub mod error;
pub mod ff;
pub mod graph;
pub mod spectral;
pub mod tensor;
pub mod verify;

mod serde_big;

pub use error::{Error, Result};
pub use ff::{FpVector, PrimeModulus};
