//! Upgrading invariants of a large group `G` to separating invariants of a
//! subgroup `H`.
//!
//! If `f_1..f_r` generically separate `G`-orbits and the `H`-invariant maps
//! `f*_1..f*_s` are fixed by no element of `G` outside `H`, their
//! concatenation generically separates `H`-orbits. Points where it may fail
//! lie in the explicit bad set
//!
//! ```text
//! B = union over j and g not fixing f*_j of { x : f*_j(g^-1 x) = f*_j(x) }
//! ```
//!
//! Here `G = S_n x S_{n(n-1)/2}` acts on symmetric matrices and `H` is `S_n`
//! acting by conjugation. Whether `g` fixes a polynomial map is decided by
//! randomized polynomial identity testing on integer points.

use std::collections::HashSet;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{feature_distance, max_norm, FeatureMap};
use crate::group::{apply_product, ProductGroupElement, SymMatrix};
use crate::seed::{child_rng, Rng};

/// Random evaluation points per group element.
pub const DEFAULT_PIT_TRIALS: usize = 32;
/// Entries of the evaluation points are integers in `[-PIT_RANGE, PIT_RANGE]`.
pub const PIT_RANGE: i64 = 1000;
/// Relative tolerance for "the two evaluations agree".
pub const FIXER_REL_TOL: f64 = 1e-9;
/// Default bad-set tolerance, relative to the largest `|f*|` seen at the point.
pub const BAD_SET_REL_TOL: f64 = 1e-9;

/// Which elements of an enumerated group fix a feature map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixerReport {
    pub group_size: usize,
    /// Positions of the fixers in the enumerated group, ascending.
    pub fixer_indices: Vec<usize>,
    pub fixers: Vec<ProductGroupElement>,
    pub trials_per_element: usize,
    pub evaluation_scale: f64,
}

/// A symmetric matrix with independent integer entries in `[-1000, 1000]`.
pub fn random_integer_sym(n: usize, rng: &mut Rng) -> SymMatrix {
    SymMatrix::from_fn(n, |_, _| rng.random_range(-PIT_RANGE..=PIT_RANGE) as f64)
}

/// Finds every `g` in `group` with `g f = f`, i.e. `f(g^-1 X) = f(X)` on all
/// `trials` random integer points.
pub fn fixer_subgroup(
    f: &FeatureMap<SymMatrix>,
    group: &[ProductGroupElement],
    trials: usize,
    seed: u64,
) -> Result<FixerReport> {
    if trials < 1 {
        return Err(Error::InvalidArgument("fixer test needs at least one trial".into()));
    }
    let Some(first) = group.first() else {
        return Err(Error::InvalidArgument("empty group".into()));
    };
    let n = first.n();
    let points: Vec<SymMatrix> = (0..trials)
        .map(|t| random_integer_sym(n, &mut child_rng(seed, t as u64)))
        .collect();
    let base: Vec<Vec<f64>> = points.iter().map(|x| f.evaluate(x)).collect::<Result<_>>()?;
    let scale = base.iter().map(|v| max_norm(v)).fold(0.0, f64::max);
    let tol = FIXER_REL_TOL * scale;

    let verdicts: Vec<Result<bool>> = group
        .par_iter()
        .map(|g| {
            let inv = g.inverse();
            for (x, fx) in points.iter().zip(&base) {
                let moved = f.evaluate(&apply_product(&inv, x)?)?;
                if feature_distance(&moved, fx) > tol {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect();
    let mut fixer_indices = Vec::new();
    for (i, v) in verdicts.into_iter().enumerate() {
        if v? {
            fixer_indices.push(i);
        }
    }
    Ok(FixerReport {
        group_size: group.len(),
        fixers: fixer_indices.iter().map(|&i| group[i].clone()).collect(),
        fixer_indices,
        trials_per_element: trials,
        evaluation_scale: scale,
    })
}

/// Checks identity, inverses and closure. Closure is checked on all pairs
/// when there are at most `max_pairs` of them, otherwise on `max_pairs`
/// random pairs.
pub fn is_subgroup(elements: &[ProductGroupElement], max_pairs: usize, seed: u64) -> Result<bool> {
    let Some(first) = elements.first() else {
        return Ok(false);
    };
    let set: HashSet<&ProductGroupElement> = elements.iter().collect();
    if !set.contains(&ProductGroupElement::identity(first.n())) {
        return Ok(false);
    }
    if !elements.iter().all(|g| set.contains(&g.inverse())) {
        return Ok(false);
    }
    let m = elements.len();
    if m.saturating_mul(m) <= max_pairs {
        for a in elements {
            for b in elements {
                if !set.contains(&a.compose(b)?) {
                    return Ok(false);
                }
            }
        }
    } else {
        let mut rng = child_rng(seed, 0);
        for _ in 0..max_pairs {
            let a = &elements[rng.random_range(0..m)];
            let b = &elements[rng.random_range(0..m)];
            if !set.contains(&a.compose(b)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of the Galois-distinguishing check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaloisCheck {
    /// The common fixers are exactly `H`.
    pub distinguishing: bool,
    /// Indices into the group of elements fixing every map.
    pub common_fixer_indices: Vec<usize>,
    pub per_map: Vec<FixerReport>,
    /// An element of `H` that fails to fix map `j`: the maps are not
    /// `H`-invariant.
    pub non_invariant: Option<(ProductGroupElement, usize)>,
}

/// True iff the elements of `group` fixing every map in `f_stars` are exactly
/// the elements of `h`.
pub fn is_galois_distinguishing(
    f_stars: &[FeatureMap<SymMatrix>],
    group: &[ProductGroupElement],
    h: &[ProductGroupElement],
    trials: usize,
    seed: u64,
) -> Result<GaloisCheck> {
    let group_set: HashSet<&ProductGroupElement> = group.iter().collect();
    if let Some(stray) = h.iter().find(|e| !group_set.contains(e)) {
        return Err(Error::InvalidArgument(format!(
            "subgroup element {stray:?} is not in the group"
        )));
    }
    let h_set: HashSet<&ProductGroupElement> = h.iter().collect();

    let mut per_map = Vec::with_capacity(f_stars.len());
    let mut common: Vec<bool> = vec![true; group.len()];
    let mut non_invariant = None;
    for (j, f) in f_stars.iter().enumerate() {
        let report = fixer_subgroup(f, group, trials, crate::seed::derive_seed(seed, j as u64))?;
        let fixed: HashSet<usize> = report.fixer_indices.iter().copied().collect();
        for (i, keep) in common.iter_mut().enumerate() {
            *keep &= fixed.contains(&i);
        }
        if non_invariant.is_none() {
            if let Some(bad) = report_missing(&report, h) {
                non_invariant = Some((bad, j));
            }
        }
        per_map.push(report);
    }
    let common_fixer_indices: Vec<usize> = (0..group.len()).filter(|&i| common[i]).collect();
    let distinguishing = non_invariant.is_none()
        && common_fixer_indices.len() == h_set.len()
        && common_fixer_indices.iter().all(|&i| h_set.contains(&group[i]));
    Ok(GaloisCheck {
        distinguishing,
        common_fixer_indices,
        per_map,
        non_invariant,
    })
}

fn report_missing(report: &FixerReport, h: &[ProductGroupElement]) -> Option<ProductGroupElement> {
    let fixers: HashSet<&ProductGroupElement> = report.fixers.iter().collect();
    h.iter().find(|e| !fixers.contains(e)).cloned()
}

/// The concatenation `f_1..f_r, f*_1..f*_s`.
pub fn combine(
    g_invariants: &FeatureMap<SymMatrix>,
    f_stars: &[FeatureMap<SymMatrix>],
) -> Result<FeatureMap<SymMatrix>> {
    let mut parts = vec![g_invariants.clone()];
    parts.extend(f_stars.iter().cloned());
    let name = parts.iter().map(|p| p.name()).collect::<Vec<_>>().join("+");
    FeatureMap::concat(name, &parts)
}

/// One vanishing residual `f*_j(g^-1 X) - f*_j(X)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadSetWitness {
    pub element_index: usize,
    pub map_index: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadSetVerdict {
    pub member: bool,
    /// Every residual with magnitude at most `zero_tol`.
    pub witnesses: Vec<BadSetWitness>,
    pub min_residual: f64,
    pub zero_tol: f64,
}

/// Precomputed stabilizers and coset representatives for repeated bad-set
/// membership queries.
#[derive(Debug, Clone)]
pub struct BadSetChecker {
    f_stars: Vec<FeatureMap<SymMatrix>>,
    /// Per map: `(index in group, inverse element)` for one representative of
    /// each left coset `g G_j` other than `G_j` itself.
    representatives: Vec<Vec<(usize, ProductGroupElement)>>,
    fixers: Vec<FixerReport>,
    rel_tol: f64,
    abs_tol: Option<f64>,
}

impl BadSetChecker {
    pub fn new(
        f_stars: &[FeatureMap<SymMatrix>],
        group: &[ProductGroupElement],
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut representatives = Vec::with_capacity(f_stars.len());
        let mut fixers = Vec::with_capacity(f_stars.len());
        for (j, f) in f_stars.iter().enumerate() {
            let report = fixer_subgroup(f, group, trials, crate::seed::derive_seed(seed, j as u64))?;
            // g f = g' f exactly when g' is in g G_j.
            let mut covered: HashSet<ProductGroupElement> = report.fixers.iter().cloned().collect();
            let mut reps = Vec::new();
            for (i, g) in group.iter().enumerate() {
                if covered.contains(g) {
                    continue;
                }
                for h in &report.fixers {
                    covered.insert(g.compose(h)?);
                }
                reps.push((i, g.inverse()));
            }
            representatives.push(reps);
            fixers.push(report);
        }
        Ok(Self {
            f_stars: f_stars.to_vec(),
            representatives,
            fixers,
            rel_tol: BAD_SET_REL_TOL,
            abs_tol: None,
        })
    }

    /// Tolerance relative to the largest `|f*|` evaluated at the point.
    pub fn with_relative_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = None;
        self
    }

    pub fn with_absolute_tolerance(mut self, zero_tol: f64) -> Self {
        self.abs_tol = Some(zero_tol);
        self
    }

    pub fn fixer_reports(&self) -> &[FixerReport] {
        &self.fixers
    }

    /// Number of distinct residual functions checked per point.
    pub fn residual_count(&self) -> usize {
        self.representatives.iter().map(Vec::len).sum()
    }

    pub fn check(&self, x: &SymMatrix) -> Result<BadSetVerdict> {
        let mut residuals = Vec::with_capacity(self.residual_count());
        let mut scale: f64 = 0.0;
        for (j, (f, reps)) in self.f_stars.iter().zip(&self.representatives).enumerate() {
            let fx = f.evaluate(x)?;
            scale = scale.max(max_norm(&fx));
            for (index, inv) in reps {
                let moved = f.evaluate(&apply_product(inv, x)?)?;
                scale = scale.max(max_norm(&moved));
                residuals.push(BadSetWitness {
                    element_index: *index,
                    map_index: j,
                    residual: feature_distance(&moved, &fx),
                });
            }
        }
        let zero_tol = self.abs_tol.unwrap_or(self.rel_tol * scale);
        let min_residual = residuals
            .iter()
            .map(|w| w.residual)
            .fold(f64::INFINITY, f64::min);
        let witnesses: Vec<_> = residuals
            .into_iter()
            .filter(|w| w.residual <= zero_tol)
            .collect();
        Ok(BadSetVerdict {
            member: !witnesses.is_empty(),
            witnesses,
            min_residual,
            zero_tol,
        })
    }
}

/// One-shot membership test; builds a [`BadSetChecker`] with the default
/// number of identity-testing trials. `zero_tol` defaults to
/// `1e-9 * max |f*|` observed at `x`.
pub fn bad_set_member(
    x: &SymMatrix,
    f_stars: &[FeatureMap<SymMatrix>],
    group: &[ProductGroupElement],
    zero_tol: Option<f64>,
) -> Result<BadSetVerdict> {
    let checker = BadSetChecker::new(f_stars, group, DEFAULT_PIT_TRIALS, 0)?;
    let checker = match zero_tol {
        Some(t) => checker.with_absolute_tolerance(t),
        None => checker,
    };
    checker.check(x)
}
