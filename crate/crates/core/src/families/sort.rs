//! Sort-based invariants `X -> <u, sort(X v)>` of `S_n` permuting the rows of
//! an `n x d` matrix. Randomly drawn `(u, v)` give a strongly separating
//! family: `2nd + 1` draws separate all orbits, `nd + 1` separate generic ones.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::child_rng;

use super::{Domain, FeatureMap};

/// `<u, sort(X v)>` with ascending sort.
pub fn sort_separator(x: &DMatrix<f64>, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != x.nrows() || v.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: format!("u of length {} and v of length {}", x.nrows(), x.ncols()),
            actual: format!("u of length {} and v of length {}", u.len(), v.len()),
        });
    }
    Ok(sort_separator_unchecked(x, u, v))
}

fn sort_separator_unchecked(x: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    // Row by row so a row's projection does not depend on its position.
    let mut w: Vec<f64> = (0..x.nrows())
        .map(|i| (0..x.ncols()).fold(0.0, |acc, j| acc + x[(i, j)] * v[j]))
        .collect();
    w.sort_by(f64::total_cmp);
    u.iter().zip(&w).map(|(a, b)| a * b).sum()
}

/// One draw of the parameters `(u, v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortSeparatorParams {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// `2 n d + 1`: enough random draws to separate every pair of orbits.
pub fn strong_separator_count(n: usize, d: usize) -> usize {
    2 * n * d + 1
}

/// `n d + 1`: enough random draws to separate generic orbits.
pub fn generic_separator_count(n: usize, d: usize) -> usize {
    n * d + 1
}

/// Draws `count` parameter pairs with standard normal entries. Draw `i` is
/// seeded from `(seed, i)` alone, so it does not change with `count`.
pub fn sort_separator_params(n: usize, d: usize, count: usize, seed: u64) -> Vec<SortSeparatorParams> {
    (0..count)
        .map(|i| {
            let mut rng = child_rng(seed, i as u64);
            let u = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let v = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            SortSeparatorParams { u, v }
        })
        .collect()
}

/// A feature map of `count` random sort separators on `n x d` matrices.
/// `count` defaults to [`strong_separator_count`].
pub fn sample_sort_separators(
    n: usize,
    d: usize,
    count: Option<usize>,
    seed: u64,
) -> Result<FeatureMap<DMatrix<f64>>> {
    let count = count.unwrap_or_else(|| strong_separator_count(n, d));
    if count < 1 {
        return Err(Error::InvalidArgument("need at least one sort separator".into()));
    }
    if n < 1 || d < 1 {
        return Err(Error::InvalidDimension(format!("{n}x{d} matrices")));
    }
    let params = sort_separator_params(n, d, count, seed);
    Ok(FeatureMap::new(
        format!("sort_separators(count={count},seed={seed})"),
        Domain::Matrix { rows: n, cols: d },
        count,
        move |x: &DMatrix<f64>| {
            params
                .iter()
                .map(|p| sort_separator_unchecked(x, &p.u, &p.v))
                .collect()
        },
    ))
}
