//! Invariants of point clouds modulo translation, `O(d)` and relabeling of
//! points: center, take the Gram matrix, then apply the conjugation
//! invariants. Ground truth comes from [`orbit_align`], which enumerates
//! relabelings and solves orthogonal Procrustes for each.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{conjugation_invariants, Domain, FeatureMap, HasDomain};
use crate::group::{
    enumerate_symmetric, factorial, pair_count, random_orthogonal_with, Permutation, SymMatrix,
    DEFAULT_GROUP_CAP,
};
use crate::separation::OrbitAction;
use crate::seed::Rng;

/// Largest point count [`orbit_align`] will enumerate.
pub const MAX_ALIGN_N: usize = 8;
pub const DEFAULT_ALIGN_TOL: f64 = 1e-6;
pub const RANK_CUTOFF: f64 = 1e-9;

/// `d x n` coordinates, one point per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CloudRepr", into = "CloudRepr")]
pub struct PointCloud {
    coords: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct CloudRepr {
    d: usize,
    n: usize,
    points: Vec<Vec<f64>>,
}

impl From<PointCloud> for CloudRepr {
    fn from(p: PointCloud) -> Self {
        CloudRepr {
            d: p.d(),
            n: p.n(),
            points: (0..p.n()).map(|j| p.point(j).iter().copied().collect()).collect(),
        }
    }
}

impl TryFrom<CloudRepr> for PointCloud {
    type Error = Error;

    fn try_from(r: CloudRepr) -> Result<Self> {
        if r.points.len() != r.n || r.points.iter().any(|p| p.len() != r.d) {
            return Err(Error::Parse(format!("point list does not match {}x{}", r.d, r.n)));
        }
        PointCloud::from_points(&r.points)
    }
}

impl PointCloud {
    pub fn new(coords: DMatrix<f64>) -> Result<Self> {
        if coords.nrows() < 1 || coords.ncols() < 1 {
            return Err(Error::InvalidDimension(format!(
                "point cloud must have d >= 1 and n >= 1, got {}x{}",
                coords.nrows(),
                coords.ncols()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("point cloud has non-finite coordinates".into()));
        }
        Ok(Self { coords })
    }

    /// One inner vector per point.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        let d = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidDimension("points of differing dimension".into()));
        }
        Self::new(DMatrix::from_fn(d, n, |i, j| points[j][i]))
    }

    pub fn random_gaussian(d: usize, n: usize, rng: &mut Rng) -> Self {
        Self {
            coords: DMatrix::from_fn(d, n, |_, _| StandardNormal.sample(rng)),
        }
    }

    pub fn d(&self) -> usize {
        self.coords.nrows()
    }

    pub fn n(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn point(&self, j: usize) -> DVector<f64> {
        self.coords.column(j).into_owned()
    }

    pub fn centroid(&self) -> DVector<f64> {
        self.coords.column_mean()
    }

    /// `R P Pi + t 1^T`, where column `i` moves to column `p(i)`.
    pub fn transform(&self, rotation: &DMatrix<f64>, p: &Permutation, translation: &DVector<f64>) -> Result<Self> {
        if rotation.shape() != (self.d(), self.d()) || p.len() != self.n() || translation.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: format!("d={} n={}", self.d(), self.n()),
                actual: format!(
                    "rotation {:?}, permutation of {}, translation of {}",
                    rotation.shape(),
                    p.len(),
                    translation.len()
                ),
            });
        }
        let moved = permute_columns(&(rotation * &self.coords), p);
        Ok(Self {
            coords: DMatrix::from_fn(self.d(), self.n(), |i, j| moved[(i, j)] + translation[i]),
        })
    }
}

impl HasDomain for PointCloud {
    fn domain(&self) -> Domain {
        Domain::PointCloud {
            d: self.d(),
            n: self.n(),
        }
    }
}

fn permute_columns(m: &DMatrix<f64>, p: &Permutation) -> DMatrix<f64> {
    let mut out = m.clone();
    for j in 0..m.ncols() {
        out.set_column(p.apply(j), &m.column(j));
    }
    out
}

pub fn center(p: &PointCloud) -> PointCloud {
    let c = p.centroid();
    PointCloud {
        coords: DMatrix::from_fn(p.d(), p.n(), |i, j| p.coords[(i, j)] - c[i]),
    }
}

/// `P^T P`: squared norms on the diagonal, pairwise inner products off it.
pub fn gram(p: &PointCloud) -> SymMatrix {
    SymMatrix::from_fn(p.n(), |i, j| p.coords.column(i).dot(&p.coords.column(j)))
}

pub fn cloud_invariants(p: &PointCloud) -> Result<Vec<f64>> {
    if p.n() < 2 {
        return Err(Error::InvalidDimension(format!("cloud invariants need n >= 2, got {}", p.n())));
    }
    conjugation_invariants(&gram(&center(p)))
}

pub fn cloud_invariant_map(d: usize, n: usize) -> Result<FeatureMap<PointCloud>> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidDimension(format!("cloud invariants need d >= 1, n >= 2, got d={d} n={n}")));
    }
    Ok(FeatureMap::new(
        "cloud_invariants",
        Domain::PointCloud { d, n },
        n + pair_count(n) + 1,
        |p: &PointCloud| conjugation_invariants(&gram(&center(p))).expect("n >= 2 checked"),
    ))
}

/// Number of eigenvalues of `x` above `cutoff` times the largest magnitude.
pub fn numerical_rank(x: &SymMatrix, cutoff: f64) -> usize {
    let eig = x.to_dense().symmetric_eigenvalues();
    let top = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return 0;
    }
    eig.iter().filter(|v| v.abs() > cutoff * top).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub rotation: DMatrix<f64>,
    pub permutation: Permutation,
    pub translation: DVector<f64>,
    /// `|R P1 Pi + t 1^T - P2|_F`.
    pub residual: f64,
    /// `max(|center(P1)|_F, |center(P2)|_F)`.
    pub scale: f64,
}

/// The best `(R, Pi, t)` over all relabelings, with `R` the orthogonal
/// Procrustes optimum (reflections allowed).
pub fn best_alignment(p1: &PointCloud, p2: &PointCloud) -> Result<AlignmentResult> {
    if p1.d() != p2.d() || p1.n() != p2.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", p1.d(), p1.n()),
            actual: format!("{}x{}", p2.d(), p2.n()),
        });
    }
    let n = p1.n();
    if n > MAX_ALIGN_N {
        return Err(Error::SizeLimit {
            required: factorial(n).unwrap_or(u128::MAX),
            cap: factorial(MAX_ALIGN_N).unwrap(),
        });
    }
    let (c1, c2) = (center(p1), center(p2));
    let scale = c1.coords.norm().max(c2.coords.norm());
    let perms = enumerate_symmetric(n, DEFAULT_GROUP_CAP)?;
    let (index, rotation, residual) = perms
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let q = permute_columns(&c1.coords, p);
            let r = procrustes(&q, &c2.coords);
            let residual = (&r * &q - &c2.coords).norm();
            (i, r, residual)
        })
        .reduce_with(|a, b| if (b.2, b.0) < (a.2, a.0) { b } else { a })
        .expect("at least one permutation");
    let translation = p2.centroid() - &rotation * p1.centroid();
    Ok(AlignmentResult {
        rotation,
        permutation: perms[index].clone(),
        translation,
        residual,
        scale,
    })
}

/// The orthogonal `R` minimizing `|R a - b|_F`: `U V^T` from the SVD of `b a^T`.
fn procrustes(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (u, _, v) = jacobi_svd(&(b * a.transpose()));
    u * v.transpose()
}

/// One-sided Jacobi SVD of a square matrix: `m = U diag(s) V^T` with `U`, `V`
/// orthogonal. nalgebra's bidiagonal SVD loses accuracy on rank-deficient
/// inputs, which is exactly the case of fewer points than dimensions.
pub(crate) fn jacobi_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let d = m.ncols();
    assert_eq!(m.nrows(), d, "square input");
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(d, d);
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for x in [&mut a, &mut v] {
                    for i in 0..d {
                        let (xp, xq) = (x[(i, p)], x[(i, q)]);
                        x[(i, p)] = c * xp - s * xq;
                        x[(i, q)] = s * xp + c * xq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = DVector::from_fn(d, |i, _| a.column(i).norm());
    let top = sigma.max();
    let mut u = DMatrix::<f64>::zeros(d, d);
    let mut filled = Vec::with_capacity(d);
    for i in 0..d {
        if sigma[i] > 1e-12 * top {
            u.set_column(i, &(a.column(i) / sigma[i]));
            filled.push(i);
        }
    }
    // Complete U on the null space by Gram-Schmidt over the standard basis.
    let mut basis = 0;
    for i in 0..d {
        if filled.contains(&i) {
            continue;
        }
        loop {
            let mut e = DVector::<f64>::zeros(d);
            e[basis] = 1.0;
            basis += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let proj = u.column(j).dot(&e);
                    e -= u.column(j) * proj;
                }
            }
            let norm = e.norm();
            if norm > 1e-6 {
                u.set_column(i, &(e / norm));
                filled.push(i);
                break;
            }
        }
    }
    (u, sigma, v)
}

/// `Some` alignment when the clouds lie in one orbit, i.e. the best residual
/// is at most `tol` times the cloud scale.
pub fn orbit_align(p1: &PointCloud, p2: &PointCloud, tol: f64) -> Result<Option<AlignmentResult>> {
    let best = best_alignment(p1, p2)?;
    Ok((best.residual <= tol * best.scale).then_some(best))
}

/// Translations, `O(d)` and relabeling acting together.
#[derive(Debug, Clone, Copy)]
pub struct RigidMotionAction {
    pub d: usize,
    pub n: usize,
}

impl RigidMotionAction {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if n > MAX_ALIGN_N {
            return Err(Error::SizeLimit {
                required: factorial(n).unwrap_or(u128::MAX),
                cap: factorial(MAX_ALIGN_N).unwrap(),
            });
        }
        Ok(Self { d, n })
    }

    pub fn random_motion(&self, rng: &mut Rng) -> (DMatrix<f64>, Permutation, DVector<f64>) {
        let r = random_orthogonal_with(self.d, rng);
        let p = Permutation::random(self.n, rng);
        let t = DVector::from_fn(self.d, |_, _| StandardNormal.sample(rng));
        (r, p, t)
    }
}

impl OrbitAction<PointCloud> for RigidMotionAction {
    fn name(&self) -> String {
        format!("rigid(O({}) x S_{} x R^{})", self.d, self.n, self.d)
    }

    fn random_transform(&self, x: &PointCloud, rng: &mut Rng) -> PointCloud {
        let (r, p, t) = self.random_motion(rng);
        x.transform(&r, &p, &t).expect("dimension checked by sampler")
    }

    fn same_orbit(&self, a: &PointCloud, b: &PointCloud, tol: f64) -> Result<bool> {
        Ok(orbit_align(a, b, tol)?.is_some())
    }
}

pub fn gaussian_cloud(d: usize, n: usize) -> impl Fn(&mut Rng) -> PointCloud + Sync {
    move |rng| PointCloud::random_gaussian(d, n, rng)
}

/// Reads one point per row under the header `x0,...,x{d-1}`.
pub fn read_cloud_csv<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for (i, h) in headers.iter().enumerate() {
        if h != format!("x{i}") {
            return Err(Error::Parse(format!("header column {i} is {h:?}, expected \"x{i}\"")));
        }
    }
    let d = headers.len();
    let mut points = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != d {
            return Err(Error::Parse(format!("row {} has {} fields, expected {d}", row + 1, record.len())));
        }
        let point = record
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {s:?}: {e}", row + 1))))
            .collect::<Result<Vec<_>>>()?;
        points.push(point);
    }
    if points.is_empty() {
        return Err(Error::InvalidDimension("point cloud file has no points".into()));
    }
    PointCloud::from_points(&points)
}

pub fn read_cloud_file(path: impl AsRef<Path>) -> Result<PointCloud> {
    read_cloud_csv(std::fs::File::open(path)?)
}

pub fn write_cloud_csv<W: Write>(p: &PointCloud, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record((0..p.d()).map(|i| format!("x{i}")))?;
    for j in 0..p.n() {
        w.write_record(p.coords.column(j).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::families::features_equal;
    use crate::seed::{child_rng, rng_from_seed};
    use crate::separation::Harness;

    fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
        features_equal(a, b, tol)
    }

    fn check_svd(m: &DMatrix<f64>) {
        let d = m.nrows();
        let (u, s, v) = jacobi_svd(m);
        let id = DMatrix::<f64>::identity(d, d);
        let scale = 1.0 + m.norm();
        assert!((u.transpose() * &u - &id).norm() < 1e-12);
        assert!((v.transpose() * &v - &id).norm() < 1e-12);
        assert!((&u * DMatrix::from_diagonal(&s) * v.transpose() - m).norm() < 1e-12 * scale);
        // Singular values squared are the eigenvalues of m^T m.
        let mut want: Vec<f64> = (m.transpose() * m).symmetric_eigenvalues().iter().map(|x| x.max(0.0).sqrt()).collect();
        let mut got: Vec<f64> = s.iter().copied().collect();
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-7 * scale, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn jacobi_svd_on_full_and_deficient_rank() {
        let mut rng = rng_from_seed(60);
        for d in 1..=4 {
            for rank in 0..=d {
                for _ in 0..50 {
                    let a = DMatrix::<f64>::from_fn(d, rank, |_, _| StandardNormal.sample(&mut rng));
                    let b = DMatrix::<f64>::from_fn(rank, d, |_, _| StandardNormal.sample(&mut rng));
                    check_svd(&(a * b));
                }
            }
        }
    }

    #[test]
    fn three_points_in_space_align_to_their_image() {
        // Centered clouds of n <= d points are rank deficient.
        let action = RigidMotionAction::new(3, 3).unwrap();
        let mut rng = rng_from_seed(62);
        for _ in 0..2000 {
            let p = PointCloud::random_gaussian(3, 3, &mut rng);
            let q = action.random_transform(&p, &mut rng);
            let best = best_alignment(&p, &q).unwrap();
            assert!(best.residual <= 1e-12 * best.scale, "{}", best.residual);
        }
    }

    #[test]
    fn procrustes_beats_random_rotations() {
        let mut rng = rng_from_seed(63);
        for _ in 0..50 {
            let a = DMatrix::<f64>::from_fn(2, 5, |_, _| StandardNormal.sample(&mut rng));
            let b = DMatrix::<f64>::from_fn(2, 5, |_, _| StandardNormal.sample(&mut rng));
            let best = (procrustes(&a, &b) * &a - &b).norm();
            for k in 0..720 {
                let th = k as f64 * std::f64::consts::TAU / 720.0;
                let (c, s) = (th.cos(), th.sin());
                for r in [
                    DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
                    DMatrix::from_row_slice(2, 2, &[c, s, s, -c]),
                ] {
                    assert!(best <= (r * &a - &b).norm() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn centering() {
        let mut rng = rng_from_seed(61);
        let p = PointCloud::random_gaussian(3, 5, &mut rng);
        let c = center(&p);
        assert!(c.centroid().norm() < 1e-12 * (1.0 + p.coords.norm()));
        assert!(center(&c).coords.relative_eq(&c.coords, 1e-12, 1e-12));
        let t = DVector::from_vec(vec![3.0, -1.0, 7.5]);
        let shifted = p.transform(&DMatrix::identity(3, 3), &Permutation::identity(5), &t).unwrap();
        assert!(center(&shifted).coords.relative_eq(&c.coords, 1e-12, 1e-12));
        let single = PointCloud::from_points(&[vec![2.0, -3.0]]).unwrap();
        assert_eq!(center(&single).coords, DMatrix::zeros(2, 1));
    }

    #[test]
    fn gram_examples() {
        let e = PointCloud::new(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(gram(&e), SymMatrix::new(vec![1.0, 1.0], vec![0.0]).unwrap());
        let mut rng = rng_from_seed(62);
        let p = PointCloud::random_gaussian(3, 4, &mut rng);
        let g = gram(&p);
        for _ in 0..100 {
            let q = random_orthogonal_with(3, &mut rng);
            let moved = PointCloud::new(&q * p.coords()).unwrap();
            assert!(gram(&moved).max_abs_diff(&g) <= 1e-12 * (1.0 + p.coords.norm_squared()));
        }
        let pi = Permutation::random(4, &mut rng);
        let relabeled = PointCloud::new(permute_columns(p.coords(), &pi)).unwrap();
        let conj = crate::group::conjugate_sym(&pi, &g).unwrap();
        assert!(gram(&relabeled).max_abs_diff(&conj) < 1e-12);
    }

    #[test]
    fn invariance_under_rigid_motions() {
        for d in 2..=3 {
            for n in 3..=6 {
                let f = cloud_invariant_map(d, n).unwrap();
                let action = RigidMotionAction::new(d, n).unwrap();
                let sampler = gaussian_cloud(d, n);
                let report = Harness::new(&f, &action, &sampler)
                    .with_tolerances(1e-8, DEFAULT_ALIGN_TOL)
                    .invariance_test(1000, (10 * d + n) as u64)
                    .unwrap();
                assert!(report.false_splits.is_empty(), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn constructed_alignment_is_recovered() {
        let mut rng = rng_from_seed(63);
        for trial in 0..50 {
            let (d, n) = (2 + trial % 2, 3 + trial % 4);
            let p = PointCloud::random_gaussian(d, n, &mut rng);
            let action = RigidMotionAction::new(d, n).unwrap();
            let (r, pi, t) = action.random_motion(&mut rng);
            let q = p.transform(&r, &pi, &t).unwrap();
            let a = orbit_align(&p, &q, DEFAULT_ALIGN_TOL).unwrap().expect("same orbit");
            assert!(a.residual <= 1e-9, "{}", a.residual);
            assert_eq!(a.permutation, pi);
            let rtr = a.rotation.transpose() * &a.rotation;
            assert!((rtr - DMatrix::<f64>::identity(d, d)).amax() < 1e-9);
            let rebuilt = p.transform(&a.rotation, &a.permutation, &a.translation).unwrap();
            assert!(((rebuilt.coords - &q.coords).norm() - a.residual).abs() < 1e-9);
        }
    }

    #[test]
    fn reflections_and_collinear_mirrors() {
        let mut rng = rng_from_seed(64);
        let p = PointCloud::random_gaussian(2, 5, &mut rng);
        let mirror = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let q = p.transform(&mirror, &Permutation::identity(5), &DVector::zeros(2)).unwrap();
        assert!(orbit_align(&p, &q, DEFAULT_ALIGN_TOL).unwrap().unwrap().residual <= 1e-9);

        let line = PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![3.0, 3.0]]).unwrap();
        let flipped = line
            .transform(&(-DMatrix::<f64>::identity(2, 2)), &Permutation::identity(3), &DVector::zeros(2))
            .unwrap();
        assert!(rel_close(
            &cloud_invariants(&line).unwrap(),
            &cloud_invariants(&flipped).unwrap(),
            1e-12
        ));
        assert!(orbit_align(&line, &flipped, DEFAULT_ALIGN_TOL).unwrap().is_some());
    }

    #[test]
    fn independent_clouds_are_far_apart_and_separated() {
        for trial in 0..2000u64 {
            let mut rng = child_rng(65, trial);
            let p = PointCloud::random_gaussian(3, 5, &mut rng);
            let q = PointCloud::random_gaussian(3, 5, &mut rng);
            let a = best_alignment(&p, &q).unwrap();
            assert!(a.residual > 1e-2 * a.scale);
            assert!(!rel_close(
                &cloud_invariants(&p).unwrap(),
                &cloud_invariants(&q).unwrap(),
                1e-9
            ));
        }
    }

    #[test]
    fn gram_rank_is_bounded() {
        let mut rng = rng_from_seed(66);
        for d in 1..=4 {
            for n in 1..=7 {
                let p = PointCloud::random_gaussian(d, n, &mut rng);
                let rank = numerical_rank(&gram(&center(&p)), RANK_CUTOFF);
                assert_eq!(rank, d.min(n - 1), "d={d} n={n}");
            }
        }
        let repeated = PointCloud::from_points(&vec![vec![1.0, 2.0]; 4]).unwrap();
        assert_eq!(numerical_rank(&gram(&center(&repeated)), RANK_CUTOFF), 0);
    }

    #[test]
    fn caps_and_errors() {
        let mut rng = rng_from_seed(67);
        let p = PointCloud::random_gaussian(2, 9, &mut rng);
        assert!(matches!(best_alignment(&p, &p), Err(Error::SizeLimit { .. })));
        let q = PointCloud::random_gaussian(3, 9, &mut rng);
        assert!(matches!(best_alignment(&p, &q), Err(Error::DimensionMismatch { .. })));
        let one = PointCloud::from_points(&[vec![1.0]]).unwrap();
        assert!(cloud_invariants(&one).is_err());
        assert!(PointCloud::new(DMatrix::from_element(1, 1, f64::NAN)).is_err());
        assert!(PointCloud::new(DMatrix::zeros(0, 3)).is_err());
    }

    #[test]
    fn csv_round_trip_and_rejections() {
        let mut rng = rng_from_seed(68);
        let p = PointCloud::random_gaussian(3, 4, &mut rng);
        let mut buf = Vec::new();
        write_cloud_csv(&p, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("x0,x1,x2\n"));
        assert_eq!(read_cloud_csv(&buf[..]).unwrap(), p);

        assert!(read_cloud_csv("x0,x1\n1,2\n3\n".as_bytes()).is_err());
        assert!(read_cloud_csv("x0,x1\n1,2\n3,4,5\n".as_bytes()).is_err());
        assert!(read_cloud_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_cloud_csv("x0,x1\n1,oops\n".as_bytes()).is_err());
        assert!(read_cloud_csv("x0,x1\n".as_bytes()).is_err());
        let ok = read_cloud_csv("x0,x1\n1,2\n3,4\n5,6\n".as_bytes()).unwrap();
        assert_eq!((ok.d(), ok.n()), (2, 3));
        assert_eq!(ok.point(1).as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn serde_round_trip() {
        let p = PointCloud::from_points(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"d":2,"n":2,"points":[[1.0,2.0],[3.0,4.0]]}"#);
        assert_eq!(serde_json::from_str::<PointCloud>(&json).unwrap(), p);
        assert!(serde_json::from_str::<PointCloud>(r#"{"d":2,"n":2,"points":[[1.0]]}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn invariants_survive_rigid_motions(d in 1usize..4, n in 2usize..7, seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let p = PointCloud::random_gaussian(d, n, &mut rng);
            let (r, perm, t) = RigidMotionAction::new(d, n).unwrap().random_motion(&mut rng);
            let q = p.transform(&r, &perm, &t).unwrap();
            prop_assert!(rel_close(&cloud_invariants(&p).unwrap(), &cloud_invariants(&q).unwrap(), 1e-8));
            let best = best_alignment(&p, &q).unwrap();
            prop_assert!(best.residual <= 1e-9 * best.scale.max(1e-300));
        }

        #[test]
        fn csv_files_round_trip(d in 1usize..5, n in 1usize..9, seed in any::<u64>()) {
            let p = PointCloud::random_gaussian(d, n, &mut rng_from_seed(seed));
            let mut file = tempfile::NamedTempFile::new().unwrap();
            write_cloud_csv(&p, &mut file).unwrap();
            prop_assert_eq!(read_cloud_file(file.path()).unwrap(), p);
        }
    }
}
