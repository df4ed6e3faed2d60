//! Invariants of `Z/nZ` acting on `C^2` by scalar roots of unity.
//!
//! The invariant ring is spanned by monomials whose degree is a multiple of
//! `n`. The `n + 1` monomials of degree exactly `n` generate it, while three of
//! them, `x^n`, `x^(n-j) y^j` and `y^n` with `gcd(j, n) = 1`, already separate
//! orbits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::ComplexPair;

use super::{flatten_complex, Domain, FeatureMap};

fn check_separator_args(n: usize, j: usize) -> Result<()> {
    if n < 1 || j < 1 || j >= n {
        return Err(Error::InvalidArgument(format!(
            "separator exponent j={j} must satisfy 1 <= j <= n-1 for n={n}"
        )));
    }
    Ok(())
}

/// `(x^n, x^(n-j) y^j, y^n)`.
pub fn veronese_separators(pt: &ComplexPair, n: usize, j: usize) -> Result<[Complex64; 3]> {
    check_separator_args(n, j)?;
    Ok(separators_unchecked(pt, n, j))
}

fn separators_unchecked(pt: &ComplexPair, n: usize, j: usize) -> [Complex64; 3] {
    let (n, j) = (n as u32, j as u32);
    [
        pt.x.powu(n),
        pt.x.powu(n - j) * pt.y.powu(j),
        pt.y.powu(n),
    ]
}

/// All degree-`n` monomials `(x^n, x^(n-1) y, ..., y^n)`.
pub fn veronese_generators(pt: &ComplexPair, n: usize) -> Result<Vec<Complex64>> {
    if n < 1 {
        return Err(Error::InvalidArgument("Veronese degree must be >= 1".into()));
    }
    Ok(generators_unchecked(pt, n))
}

fn generators_unchecked(pt: &ComplexPair, n: usize) -> Vec<Complex64> {
    let n = n as u32;
    (0..=n).map(|k| pt.x.powu(n - k) * pt.y.powu(k)).collect()
}

pub fn veronese_separator_map(n: usize, j: usize) -> Result<FeatureMap<ComplexPair>> {
    check_separator_args(n, j)?;
    Ok(FeatureMap::new(
        format!("veronese_separators(n={n},j={j})"),
        Domain::ComplexPair,
        6,
        move |pt| flatten_complex(separators_unchecked(pt, n, j)),
    ))
}

pub fn veronese_generator_map(n: usize) -> Result<FeatureMap<ComplexPair>> {
    if n < 1 {
        return Err(Error::InvalidArgument("Veronese degree must be >= 1".into()));
    }
    Ok(FeatureMap::new(
        format!("veronese_generators(n={n})"),
        Domain::ComplexPair,
        2 * (n + 1),
        move |pt| flatten_complex(generators_unchecked(pt, n)),
    ))
}
