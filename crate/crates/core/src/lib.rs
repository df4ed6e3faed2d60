//! Group-invariant feature families and brute-force checks of their
//! orbit-separating power.
//!
//! * [`group`]: permutations, the product group acting on symmetric-matrix
//!   slots, cyclic shifts, scalar roots of unity, orthogonal sampling.
//! * [`families`]: power sums, conjugation invariants, Veronese monomials,
//!   Fourier invariants, sort-based separators.
//! * [`galois`]: fixer subgroups, the Galois-distinguishing check, and the
//!   explicit bad set of the combined invariants.
//! * [`separation`]: brute-force orbit oracles and invariance / separation
//!   trials.
//! * [`pointcloud`]: invariants of point clouds modulo translations, `O(d)`
//!   and relabeling, with a Procrustes orbit oracle.
//! * [`mra`]: multi-reference alignment simulation and bispectrum inversion.

pub mod error;
pub mod families;
pub mod galois;
pub mod pointcloud;
pub mod group;
pub mod mra;
pub mod seed;
pub mod separation;

pub use error::{Error, Result};
pub use families::{Domain, FeatureMap, FourierInvariants, HasDomain};
pub use pointcloud::PointCloud;
pub use group::{ComplexPair, Permutation, ProductGroupElement, Signal, SymMatrix};
