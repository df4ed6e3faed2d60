//! Finite group elements and their actions on the data spaces used by the
//! invariant families: permutations of matrix slots, cyclic shifts of
//! signals, scalar roots of unity on `C^2`, and sampled orthogonal matrices.
//!
//! All indices are 0-based. Off-diagonal entries of an `n x n` symmetric
//! matrix are addressed lexicographically by [`pair_index`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, Rng};

/// Default cap on the number of elements [`enumerate_group`] will produce.
pub const DEFAULT_GROUP_CAP: u128 = 1_000_000;

/// A permutation of `0..n`; `image[i]` is where slot `i` goes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::InvalidDimension("permutation of 0 slots".into()));
        }
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidArgument(format!(
                    "{image:?} is not a bijection on 0..{n}"
                )));
            }
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// The shift `i -> i + t (mod n)`.
    pub fn cyclic(n: usize, t: usize) -> Self {
        Self {
            image: (0..n).map(|i| (i + t) % n).collect(),
        }
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Self { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        check_same_len(self.len(), other.len())?;
        Ok(Self {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Self { image: inv }
    }

    /// Moves the entry in slot `i` to slot `image[i]`.
    pub fn permute<T: Clone>(&self, data: &[T]) -> Result<Vec<T>> {
        check_same_len(self.len(), data.len())?;
        let mut out = data.to_vec();
        for (i, x) in data.iter().enumerate() {
            out[self.image[i]] = x.clone();
        }
        Ok(out)
    }
}

fn check_same_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        });
    }
    Ok(())
}

/// Number of unordered pairs `i < j` in `0..n`.
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `(i, j)`, `i < j < n`.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(n: usize, idx: usize) -> (usize, usize) {
    debug_assert!(idx < pair_count(n));
    let mut i = 0;
    let mut start = 0;
    loop {
        let row = n - i - 1;
        if idx < start + row {
            return (i, i + 1 + idx - start);
        }
        start += row;
        i += 1;
    }
}

/// The permutation of pair slots induced by relabeling points with `p`.
pub fn induced_pair_perm(p: &Permutation) -> Result<Permutation> {
    let n = p.len();
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "pair permutation needs n >= 2, got {n}"
        )));
    }
    let mut image = vec![0; pair_count(n)];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (p.apply(i), p.apply(j));
            image[pair_index(n, i, j)] = pair_index(n, a.min(b), a.max(b));
        }
    }
    Ok(Permutation { image })
}

/// An element of `S_n x S_{n(n-1)/2}` acting on the diagonal and off-diagonal
/// slots of a symmetric matrix independently.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductGroupElement {
    pub sigma: Permutation,
    pub tau: Permutation,
}

impl ProductGroupElement {
    pub fn new(sigma: Permutation, tau: Permutation) -> Result<Self> {
        let n = sigma.len();
        if n < 2 {
            return Err(Error::InvalidDimension(format!(
                "product group needs n >= 2, got {n}"
            )));
        }
        if tau.len() != pair_count(n) {
            return Err(Error::DimensionMismatch {
                expected: format!("{} off-diagonal slots", pair_count(n)),
                actual: tau.len().to_string(),
            });
        }
        Ok(Self { sigma, tau })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sigma: Permutation::identity(n),
            tau: Permutation::identity(pair_count(n)),
        }
    }

    /// The image of `p` under the embedding `S_n -> G`, i.e. conjugation by `p`.
    pub fn embedded(p: &Permutation) -> Result<Self> {
        Ok(Self {
            sigma: p.clone(),
            tau: induced_pair_perm(p)?,
        })
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            sigma: self.sigma.compose(&other.sigma)?,
            tau: self.tau.compose(&other.tau)?,
        })
    }

    pub fn inverse(&self) -> Self {
        Self {
            sigma: self.sigma.inverse(),
            tau: self.tau.inverse(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.is_identity() && self.tau.is_identity()
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        Self {
            sigma: Permutation::random(n, rng),
            tau: Permutation::random(pair_count(n), rng),
        }
    }
}

/// A real symmetric `n x n` matrix stored as its diagonal and its
/// lexicographically pair-indexed strict upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymMatrixRepr")]
pub struct SymMatrix {
    n: usize,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

#[derive(Deserialize)]
struct SymMatrixRepr {
    n: usize,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TryFrom<SymMatrixRepr> for SymMatrix {
    type Error = Error;

    fn try_from(r: SymMatrixRepr) -> Result<Self> {
        if r.diag.len() != r.n {
            return Err(Error::DimensionMismatch {
                expected: format!("{} diagonal entries", r.n),
                actual: r.diag.len().to_string(),
            });
        }
        SymMatrix::new(r.diag, r.offdiag)
    }
}

impl SymMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidDimension("empty symmetric matrix".into()));
        }
        if offdiag.len() != pair_count(n) {
            return Err(Error::DimensionMismatch {
                expected: format!("{} off-diagonal entries", pair_count(n)),
                actual: offdiag.len().to_string(),
            });
        }
        Ok(Self { n, diag, offdiag })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let diag = (0..n).map(|i| f(i, i)).collect();
        let mut offdiag = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                offdiag.push(f(i, j));
            }
        }
        Self { n, diag, offdiag }
    }

    /// Reads the upper triangle of a square matrix; fails if it is not symmetric.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "{}x{} is not a non-empty square matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| m[(i, j)]))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Entries iid standard normal.
    pub fn random_gaussian(n: usize, rng: &mut Rng) -> Self {
        Self::from_fn(n, |_, _| StandardNormal.sample(rng))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.diag[i],
            std::cmp::Ordering::Less => self.offdiag[pair_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.offdiag[pair_index(self.n, j, i)],
        }
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.diag
            .iter()
            .zip(&other.diag)
            .chain(self.offdiag.iter().zip(&other.offdiag))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `p X p^T`: the output satisfies `Y[p(i), p(j)] = X[i, j]`.
pub fn conjugate_sym(p: &Permutation, x: &SymMatrix) -> Result<SymMatrix> {
    check_same_len(x.n(), p.len())?;
    let n = x.n();
    let mut diag = vec![0.0; n];
    let mut offdiag = vec![0.0; pair_count(n)];
    for i in 0..n {
        diag[p.apply(i)] = x.diag[i];
        for j in i + 1..n {
            let (a, b) = (p.apply(i), p.apply(j));
            offdiag[pair_index(n, a.min(b), a.max(b))] = x.offdiag[pair_index(n, i, j)];
        }
    }
    Ok(SymMatrix { n, diag, offdiag })
}

/// Permutes the diagonal by `g.sigma` and the off-diagonal slots by `g.tau`.
pub fn apply_product(g: &ProductGroupElement, x: &SymMatrix) -> Result<SymMatrix> {
    check_same_len(x.n(), g.n())?;
    Ok(SymMatrix {
        n: x.n,
        diag: g.sigma.permute(&x.diag)?,
        offdiag: g.tau.permute(&x.offdiag)?,
    })
}

/// A complex signal of fixed length. Real signals have zero imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Signal {
    entries: Vec<Complex64>,
}

impl Signal {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension("empty signal".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.re).collect()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `y[j] = x[(j - t) mod n]`.
pub fn cyclic_shift(t: i64, x: &Signal) -> Signal {
    let n = x.len() as i64;
    let t = t.rem_euclid(n) as usize;
    let len = x.len();
    let entries = (0..len)
        .map(|j| x.entries[(j + len - t) % len])
        .collect();
    Signal { entries }
}

/// A point of `C^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    pub x: Complex64,
    pub y: Complex64,
}

impl ComplexPair {
    pub fn new(x: Complex64, y: Complex64) -> Self {
        Self { x, y }
    }

    pub fn max_abs_diff(&self, other: &ComplexPair) -> f64 {
        (self.x - other.x).norm().max((self.y - other.y).norm())
    }

    pub fn is_zero(&self) -> bool {
        self.x == Complex64::new(0.0, 0.0) && self.y == Complex64::new(0.0, 0.0)
    }
}

/// `exp(2 pi i k / n)`, reduced mod `n` first so large `k` stays accurate.
///
/// # Panics
/// If `n == 0`.
pub fn root_of_unity(k: i64, n: usize) -> Complex64 {
    assert!(n >= 1, "root of unity of order 0");
    let k = k.rem_euclid(n as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * k / n as f64)
}

/// Scalar action of `k` in `Z/nZ` on `C^2`: `(x, y) -> (z^k x, z^k y)`.
///
/// # Panics
/// If `n == 0`.
pub fn scalar_root_action(k: i64, n: usize, pt: &ComplexPair) -> ComplexPair {
    let z = root_of_unity(k, n);
    ComplexPair::new(z * pt.x, z * pt.y)
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// triangular factor's diagonal made positive.
pub fn random_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
    random_orthogonal_with(d, &mut rng_from_seed(seed))
}

pub fn random_orthogonal_with(d: usize, rng: &mut Rng) -> DMatrix<f64> {
    let a = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Which finite group to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    /// `S_n`.
    Symmetric(usize),
    /// `Z/nZ` as shift permutations.
    Cyclic(usize),
    /// `S_n x S_{n(n-1)/2}` acting on symmetric-matrix slots.
    Product(usize),
}

/// The elements of an enumerated group, in lexicographic order of their
/// image arrays.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElements {
    Permutations(Vec<Permutation>),
    Product(Vec<ProductGroupElement>),
}

impl GroupElements {
    pub fn len(&self) -> usize {
        match self {
            Self::Permutations(v) => v.len(),
            Self::Product(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `n!`, or `None` on `u128` overflow.
pub fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// Order of the group, saturating at `u128::MAX`.
pub fn group_order(kind: GroupKind) -> u128 {
    match kind {
        GroupKind::Symmetric(n) => factorial(n).unwrap_or(u128::MAX),
        GroupKind::Cyclic(n) => n as u128,
        GroupKind::Product(n) => factorial(n)
            .zip(factorial(pair_count(n)))
            .and_then(|(a, b)| a.checked_mul(b))
            .unwrap_or(u128::MAX),
    }
}

/// Enumerates a finite group in lexicographic order, refusing groups larger
/// than `cap`.
pub fn enumerate_group(kind: GroupKind, cap: u128) -> Result<GroupElements> {
    let order = group_order(kind);
    if order > cap {
        return Err(Error::SizeLimit {
            required: order,
            cap,
        });
    }
    Ok(match kind {
        GroupKind::Symmetric(n) => {
            require_positive(n)?;
            GroupElements::Permutations(all_permutations(n))
        }
        GroupKind::Cyclic(n) => {
            require_positive(n)?;
            GroupElements::Permutations((0..n).map(|t| Permutation::cyclic(n, t)).collect())
        }
        GroupKind::Product(n) => {
            if n < 2 {
                return Err(Error::InvalidDimension(format!(
                    "product group needs n >= 2, got {n}"
                )));
            }
            let sigmas = all_permutations(n);
            let taus = all_permutations(pair_count(n));
            let mut out = Vec::with_capacity(sigmas.len() * taus.len());
            for s in &sigmas {
                for t in &taus {
                    out.push(ProductGroupElement {
                        sigma: s.clone(),
                        tau: t.clone(),
                    });
                }
            }
            GroupElements::Product(out)
        }
    })
}

/// The product group `S_n x S_{n(n-1)/2}` in lexicographic order.
pub fn enumerate_product(n: usize, cap: u128) -> Result<Vec<ProductGroupElement>> {
    match enumerate_group(GroupKind::Product(n), cap)? {
        GroupElements::Product(v) => Ok(v),
        GroupElements::Permutations(_) => unreachable!(),
    }
}

/// `S_n` in lexicographic order.
pub fn enumerate_symmetric(n: usize, cap: u128) -> Result<Vec<Permutation>> {
    match enumerate_group(GroupKind::Symmetric(n), cap)? {
        GroupElements::Permutations(v) => Ok(v),
        GroupElements::Product(_) => unreachable!(),
    }
}

/// The conjugation subgroup `H`: `S_n` embedded in the product group.
pub fn embedded_symmetric(n: usize, cap: u128) -> Result<Vec<ProductGroupElement>> {
    enumerate_symmetric(n, cap)?
        .iter()
        .map(ProductGroupElement::embedded)
        .collect()
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("group of degree 0".into()));
    }
    Ok(())
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![Permutation {
        image: current.clone(),
    }];
    while next_permutation(&mut current) {
        out.push(Permutation {
            image: current.clone(),
        });
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
