//! Ground-truth orbit equality by brute force, and randomized trials that
//! compare feature equality against it.
//!
//! A *false split* is a same-orbit pair with different features: an
//! invariance bug. A *false merge* is a pair in distinct orbits with equal
//! features: a separation failure, which for generically separating families
//! must be explained by the pair touching a bad set.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{feature_distance, features_equal, FeatureMap, HasDomain};
use crate::group::{
    conjugate_sym, cyclic_shift, enumerate_symmetric, factorial, root_of_unity,
    scalar_root_action, ComplexPair, Permutation, ProductGroupElement, Signal, SymMatrix,
    apply_product, DEFAULT_GROUP_CAP,
};
use crate::seed::{child_rng, Rng};

/// Default tolerance for both feature equality and orbit equality.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest `n` for brute-force conjugation and row-permutation oracles.
pub const MAX_PERMUTATION_N: usize = 8;
pub const MAX_CYCLIC_N: usize = 4096;
pub const MAX_SCALAR_N: usize = 64;

/// A group action with a brute-force orbit oracle.
pub trait OrbitAction<T>: Sync {
    fn name(&self) -> String;

    /// `g x` for a uniformly random group element `g`.
    fn random_transform(&self, x: &T, rng: &mut Rng) -> T;

    /// Whether some `g` has `|g a - b| <= tol` in the action's metric.
    fn same_orbit(&self, a: &T, b: &T, tol: f64) -> Result<bool>;
}

pub fn same_orbit_bruteforce<T>(x1: &T, x2: &T, action: &dyn OrbitAction<T>, tol: f64) -> Result<bool> {
    action.same_orbit(x1, x2, tol)
}

/// `S_n` acting on symmetric matrices by `X -> P X P^T`.
#[derive(Debug, Clone)]
pub struct ConjugationAction {
    n: usize,
    group: Vec<Permutation>,
}

impl ConjugationAction {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_PERMUTATION_N {
            return Err(Error::SizeLimit {
                required: factorial(n).unwrap_or(u128::MAX),
                cap: factorial(MAX_PERMUTATION_N).unwrap(),
            });
        }
        Ok(Self {
            n,
            group: enumerate_symmetric(n, DEFAULT_GROUP_CAP)?,
        })
    }
}

impl OrbitAction<SymMatrix> for ConjugationAction {
    fn name(&self) -> String {
        format!("conjugation(S_{})", self.n)
    }

    fn random_transform(&self, x: &SymMatrix, rng: &mut Rng) -> SymMatrix {
        conjugate_sym(&Permutation::random(self.n, rng), x).expect("dimension checked by sampler")
    }

    fn same_orbit(&self, a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<bool> {
        for p in &self.group {
            if conjugate_sym(p, a)?.max_abs_diff(b) <= tol {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `S_n x S_{n(n-1)/2}` permuting diagonal and off-diagonal slots
/// independently. Orbits are pairs of multisets, so the oracle sorts.
#[derive(Debug, Clone, Copy)]
pub struct ProductAction {
    pub n: usize,
}

impl OrbitAction<SymMatrix> for ProductAction {
    fn name(&self) -> String {
        format!("product(S_{n} x S_{m})", n = self.n, m = crate::group::pair_count(self.n))
    }

    fn random_transform(&self, x: &SymMatrix, rng: &mut Rng) -> SymMatrix {
        apply_product(&ProductGroupElement::random(self.n, rng), x).expect("dimension checked by sampler")
    }

    fn same_orbit(&self, a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<bool> {
        let sorted = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v
        };
        let close = |u: Vec<f64>, v: Vec<f64>| u.iter().zip(&v).all(|(s, t)| (s - t).abs() <= tol);
        Ok(a.n() == b.n()
            && close(sorted(a.diag()), sorted(b.diag()))
            && close(sorted(a.offdiag()), sorted(b.offdiag())))
    }
}

/// `Z/nZ` acting on signals by cyclic shifts.
#[derive(Debug, Clone, Copy)]
pub struct CyclicShiftAction {
    n: usize,
}

impl CyclicShiftAction {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_CYCLIC_N {
            return Err(Error::SizeLimit {
                required: n as u128,
                cap: MAX_CYCLIC_N as u128,
            });
        }
        Ok(Self { n })
    }
}

impl OrbitAction<Signal> for CyclicShiftAction {
    fn name(&self) -> String {
        format!("cyclic(Z/{})", self.n)
    }

    fn random_transform(&self, x: &Signal, rng: &mut Rng) -> Signal {
        cyclic_shift(rng.random_range(0..self.n as i64), x)
    }

    fn same_orbit(&self, a: &Signal, b: &Signal, tol: f64) -> Result<bool> {
        Ok((0..self.n as i64).any(|t| cyclic_shift(t, a).max_abs_diff(b) <= tol))
    }
}

/// `Z/nZ` acting on `C^2` by scalar roots of unity.
#[derive(Debug, Clone, Copy)]
pub struct ScalarRootAction {
    n: usize,
}

impl ScalarRootAction {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("scalar action of order 0".into()));
        }
        if n > MAX_SCALAR_N {
            return Err(Error::SizeLimit {
                required: n as u128,
                cap: MAX_SCALAR_N as u128,
            });
        }
        Ok(Self { n })
    }
}

impl OrbitAction<ComplexPair> for ScalarRootAction {
    fn name(&self) -> String {
        format!("scalar(Z/{})", self.n)
    }

    fn random_transform(&self, x: &ComplexPair, rng: &mut Rng) -> ComplexPair {
        scalar_root_action(rng.random_range(0..self.n as i64), self.n, x)
    }

    fn same_orbit(&self, a: &ComplexPair, b: &ComplexPair, tol: f64) -> Result<bool> {
        Ok((0..self.n as i64).any(|k| scalar_root_action(k, self.n, a).max_abs_diff(b) <= tol))
    }
}

/// `S_n` permuting the rows of `n x d` matrices.
#[derive(Debug, Clone)]
pub struct RowPermutationAction {
    n: usize,
    group: Vec<Permutation>,
}

impl RowPermutationAction {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_PERMUTATION_N {
            return Err(Error::SizeLimit {
                required: factorial(n).unwrap_or(u128::MAX),
                cap: factorial(MAX_PERMUTATION_N).unwrap(),
            });
        }
        Ok(Self {
            n,
            group: enumerate_symmetric(n, DEFAULT_GROUP_CAP)?,
        })
    }
}

/// Moves row `i` to row `p(i)`.
pub fn permute_rows(x: &DMatrix<f64>, p: &Permutation) -> DMatrix<f64> {
    let mut y = x.clone();
    for i in 0..x.nrows() {
        y.set_row(p.apply(i), &x.row(i));
    }
    y
}

impl OrbitAction<DMatrix<f64>> for RowPermutationAction {
    fn name(&self) -> String {
        format!("rows(S_{})", self.n)
    }

    fn random_transform(&self, x: &DMatrix<f64>, rng: &mut Rng) -> DMatrix<f64> {
        permute_rows(x, &Permutation::random(self.n, rng))
    }

    fn same_orbit(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> Result<bool> {
        if a.shape() != b.shape() || a.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", a.shape()),
                actual: format!("{:?}", b.shape()),
            });
        }
        Ok(self.group.iter().any(|p| {
            (0..self.n).all(|i| {
                let target = p.apply(i);
                (0..a.ncols()).all(|j| (a[(i, j)] - b[(target, j)]).abs() <= tol)
            })
        }))
    }
}

pub type Sampler<'a, T> = dyn Fn(&mut Rng) -> T + Sync + 'a;
/// Produces a partner for `x`, typically one sharing coarser invariants.
pub type PairMaker<'a, T> = dyn Fn(&T, &mut Rng) -> T + Sync + 'a;
/// Produces several candidate partners for `x`.
pub type CandidateMaker<'a, T> = dyn Fn(&T, &mut Rng) -> Vec<T> + Sync + 'a;
/// Whether a point lies in a known bad set.
pub type BadSetFlag<'a, T> = dyn Fn(&T) -> Result<bool> + Sync + 'a;

pub fn gaussian_sym(n: usize) -> impl Fn(&mut Rng) -> SymMatrix + Sync {
    move |rng| SymMatrix::random_gaussian(n, rng)
}

pub fn gaussian_signal(n: usize) -> impl Fn(&mut Rng) -> Signal + Sync {
    move |rng| {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        Signal::from_real(&v).expect("n >= 1")
    }
}

pub fn gaussian_pair() -> impl Fn(&mut Rng) -> ComplexPair + Sync {
    |rng| {
        let mut g = || -> f64 { StandardNormal.sample(rng) };
        ComplexPair::new(Complex64::new(g(), g()), Complex64::new(g(), g()))
    }
}

pub fn gaussian_matrix(n: usize, d: usize) -> impl Fn(&mut Rng) -> DMatrix<f64> + Sync {
    move |rng| DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(rng))
}

/// Both coordinates with modulus uniform on `[r_min, r_max]` and uniform
/// phase. Degree-`n` monomials of Gaussian points span too many orders of
/// magnitude for a 1e-9 comparison once `n` reaches 8.
pub fn annulus_pair(r_min: f64, r_max: f64) -> impl Fn(&mut Rng) -> ComplexPair + Sync {
    move |rng| {
        let mut z = || Complex64::from_polar(rng.random_range(r_min..=r_max), rng.random_range(0.0..std::f64::consts::TAU));
        ComplexPair::new(z(), z())
    }
}

/// A random element of the product group applied to `x`: same product-group
/// orbit, usually a different conjugation orbit.
pub fn product_group_twist(n: usize) -> impl Fn(&SymMatrix, &mut Rng) -> SymMatrix + Sync {
    move |x, rng| apply_product(&ProductGroupElement::random(n, rng), x).expect("dimension checked")
}

/// Each column permuted independently: same column multisets, usually a
/// different row-permutation orbit.
pub fn column_shuffle() -> impl Fn(&DMatrix<f64>, &mut Rng) -> DMatrix<f64> + Sync {
    |x, rng| {
        let mut y = x.clone();
        for j in 0..x.ncols() {
            let p = Permutation::random(x.nrows(), rng);
            for i in 0..x.nrows() {
                y[(p.apply(i), j)] = x[(i, j)];
            }
        }
        y
    }
}

/// `(z^a x, z^b y)` for random `a, b`: same `x^n` and `y^n`.
pub fn root_twist(n: usize) -> impl Fn(&ComplexPair, &mut Rng) -> ComplexPair + Sync {
    move |p, rng| {
        let a = rng.random_range(0..n as i64);
        let b = rng.random_range(0..n as i64);
        ComplexPair::new(root_of_unity(a, n) * p.x, root_of_unity(b, n) * p.y)
    }
}

/// Every `(z^a x, z^b y)`, `0 <= a, b < n`.
pub fn all_root_twists(n: usize) -> impl Fn(&ComplexPair, &mut Rng) -> Vec<ComplexPair> + Sync {
    move |p, _| {
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n as i64 {
            for b in 0..n as i64 {
                out.push(ComplexPair::new(root_of_unity(a, n) * p.x, root_of_unity(b, n) * p.y));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    SameOrbit,
    Independent,
    HardNegative,
    Candidate,
}

/// A replayable record of one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: usize,
    pub kind: PairKind,
    pub left: serde_json::Value,
    pub right: serde_json::Value,
    pub left_features: Vec<f64>,
    pub right_features: Vec<f64>,
    pub feature_distance: f64,
    /// Bad-set membership of either point, when a checker was supplied.
    pub in_bad_set: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub family: String,
    pub action: String,
    pub seed: u64,
    pub trials: usize,
    pub same_orbit_pairs: usize,
    pub distinct_orbit_pairs: usize,
    pub hard_negative_pairs: usize,
    pub false_merges: Vec<Witness>,
    pub false_splits: Vec<Witness>,
    /// False merges not certified to lie in the bad set.
    pub uncertified_merges: usize,
    pub tolerance: f64,
}

impl SeparationReport {
    /// No false splits and every false merge certified.
    pub fn passed(&self) -> bool {
        self.false_splits.is_empty() && self.uncertified_merges == 0
    }
}

/// Everything needed to run invariance, separation and collision trials for
/// one feature family.
pub struct Harness<'a, T> {
    pub features: &'a FeatureMap<T>,
    pub action: &'a dyn OrbitAction<T>,
    pub sampler: &'a Sampler<'a, T>,
    pub hard_negative: Option<&'a PairMaker<'a, T>>,
    pub bad_set: Option<&'a BadSetFlag<'a, T>>,
    /// Relative tolerance for feature equality.
    pub feature_tol: f64,
    /// Tolerance handed to the orbit oracle.
    pub orbit_tol: f64,
}

struct Outcome {
    kind: PairKind,
    same: bool,
    split: Option<Witness>,
    merge: Option<Witness>,
}

impl<'a, T> Harness<'a, T>
where
    T: HasDomain + Serialize + Send + Sync,
{
    pub fn new(features: &'a FeatureMap<T>, action: &'a dyn OrbitAction<T>, sampler: &'a Sampler<'a, T>) -> Self {
        Self {
            features,
            action,
            sampler,
            hard_negative: None,
            bad_set: None,
            feature_tol: DEFAULT_TOL,
            orbit_tol: DEFAULT_TOL,
        }
    }

    pub fn with_hard_negatives(mut self, maker: &'a PairMaker<'a, T>) -> Self {
        self.hard_negative = Some(maker);
        self
    }

    pub fn with_bad_set(mut self, flag: &'a BadSetFlag<'a, T>) -> Self {
        self.bad_set = Some(flag);
        self
    }

    pub fn with_tolerances(mut self, feature_tol: f64, orbit_tol: f64) -> Self {
        self.feature_tol = feature_tol;
        self.orbit_tol = orbit_tol;
        self
    }

    fn witness(&self, trial: usize, kind: PairKind, x: &T, y: &T, fx: Vec<f64>, fy: Vec<f64>) -> Result<Witness> {
        let to_json = |v: &T| serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()));
        Ok(Witness {
            trial,
            kind,
            left: to_json(x)?,
            right: to_json(y)?,
            feature_distance: feature_distance(&fx, &fy),
            left_features: fx,
            right_features: fy,
            in_bad_set: None,
        })
    }

    fn empty_report(&self, trials: usize, seed: u64) -> SeparationReport {
        SeparationReport {
            family: self.features.name().to_string(),
            action: self.action.name(),
            seed,
            trials,
            same_orbit_pairs: 0,
            distinct_orbit_pairs: 0,
            hard_negative_pairs: 0,
            false_merges: Vec::new(),
            false_splits: Vec::new(),
            uncertified_merges: 0,
            tolerance: self.feature_tol,
        }
    }

    /// Checks `f(g x) = f(x)` for random `x` and `g`; violations are recorded
    /// as false splits.
    pub fn invariance_test(&self, trials: usize, seed: u64) -> Result<SeparationReport> {
        if trials < 1 {
            return Err(Error::InvalidArgument("need at least one trial".into()));
        }
        let splits: Vec<Option<Witness>> = (0..trials)
            .into_par_iter()
            .map(|i| -> Result<Option<Witness>> {
                let mut rng = child_rng(seed, i as u64);
                let x = (self.sampler)(&mut rng);
                let y = self.action.random_transform(&x, &mut rng);
                let (fx, fy) = (self.features.evaluate(&x)?, self.features.evaluate(&y)?);
                if features_equal(&fx, &fy, self.feature_tol) {
                    Ok(None)
                } else {
                    self.witness(i, PairKind::SameOrbit, &x, &y, fx, fy).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        let mut report = self.empty_report(trials, seed);
        report.same_orbit_pairs = trials;
        report.false_splits = splits.into_iter().flatten().collect();
        Ok(report)
    }

    /// Even trials pair `x` with a random `g x`; odd trials pair it with an
    /// independent sample, or with a hard negative on every other odd trial
    /// when a maker is configured. Ground truth always comes from the oracle.
    pub fn separation_test(&self, trials: usize, seed: u64) -> Result<SeparationReport> {
        if trials < 1 {
            return Err(Error::InvalidArgument("need at least one trial".into()));
        }
        let outcomes: Vec<Outcome> = (0..trials)
            .into_par_iter()
            .map(|i| self.separation_trial(i, seed))
            .collect::<Result<_>>()?;
        let mut report = self.empty_report(trials, seed);
        for o in outcomes {
            if o.same {
                report.same_orbit_pairs += 1;
            } else {
                report.distinct_orbit_pairs += 1;
            }
            if o.kind == PairKind::HardNegative {
                report.hard_negative_pairs += 1;
            }
            report.false_splits.extend(o.split);
            if let Some(m) = o.merge {
                if m.in_bad_set != Some(true) {
                    report.uncertified_merges += 1;
                }
                report.false_merges.push(m);
            }
        }
        Ok(report)
    }

    fn separation_trial(&self, i: usize, seed: u64) -> Result<Outcome> {
        let mut rng = child_rng(seed, i as u64);
        let x = (self.sampler)(&mut rng);
        let (kind, y) = if i.is_multiple_of(2) {
            (PairKind::SameOrbit, self.action.random_transform(&x, &mut rng))
        } else {
            match self.hard_negative {
                Some(maker) if (i / 2) % 2 == 1 => (PairKind::HardNegative, maker(&x, &mut rng)),
                _ => (PairKind::Independent, (self.sampler)(&mut rng)),
            }
        };
        let same = self.action.same_orbit(&x, &y, self.orbit_tol)?;
        let (fx, fy) = (self.features.evaluate(&x)?, self.features.evaluate(&y)?);
        let equal = features_equal(&fx, &fy, self.feature_tol);
        let mut outcome = Outcome {
            kind,
            same,
            split: None,
            merge: None,
        };
        if same && !equal {
            outcome.split = Some(self.witness(i, kind, &x, &y, fx, fy)?);
        } else if !same && equal {
            let mut w = self.witness(i, kind, &x, &y, fx, fy)?;
            if let Some(flag) = self.bad_set {
                w.in_bad_set = Some(flag(&x)? || flag(&y)?);
            }
            outcome.merge = Some(w);
        }
        Ok(outcome)
    }

    /// Searches for two points in distinct orbits with equal features.
    /// `candidates` proposes partners for each sampled point; `budget` bounds
    /// the number of pairs compared. Deterministic given `seed`.
    pub fn collision_search(
        &self,
        candidates: &CandidateMaker<'_, T>,
        budget: usize,
        seed: u64,
    ) -> Result<Option<Witness>> {
        if budget < 1 {
            return Err(Error::InvalidArgument("collision search budget must be >= 1".into()));
        }
        let mut spent = 0;
        let mut round = 0u64;
        while spent < budget {
            let mut rng = child_rng(seed, round);
            let x = (self.sampler)(&mut rng);
            let fx = self.features.evaluate(&x)?;
            let cands = candidates(&x, &mut rng);
            if cands.is_empty() {
                return Err(Error::InvalidArgument("candidate generator produced nothing".into()));
            }
            for y in cands {
                if spent == budget {
                    break;
                }
                spent += 1;
                let fy = self.features.evaluate(&y)?;
                if features_equal(&fx, &fy, self.feature_tol) && !self.action.same_orbit(&x, &y, self.orbit_tol)? {
                    return self.witness(round as usize, PairKind::Candidate, &x, &y, fx, fy).map(Some);
                }
            }
            round += 1;
        }
        Ok(None)
    }
}
