use crate::error::{Error, Result};
use crate::group::{pair_count, pair_index, SymMatrix};

use super::{Domain, FeatureMap};

/// `p_k = sum_i v_i^k` for `k = 1..=k_max`.
pub fn power_sums(v: &[f64], k_max: usize) -> Result<Vec<f64>> {
    if k_max < 1 {
        return Err(Error::InvalidArgument("power sums need K >= 1".into()));
    }
    Ok(power_sums_unchecked(v, k_max))
}

fn power_sums_unchecked(v: &[f64], k_max: usize) -> Vec<f64> {
    let mut sums = vec![0.0; k_max];
    for &x in v {
        let mut acc = x;
        for s in sums.iter_mut() {
            *s += acc;
            acc *= x;
        }
    }
    sums
}

fn require_n2(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "symmetric-matrix invariants need n >= 2, got {n}"
        )));
    }
    Ok(())
}

/// Power sums of the diagonal (degrees `1..=n`) followed by power sums of the
/// off-diagonal entries (degrees `1..=n(n-1)/2`). Invariant under the whole
/// product group.
pub fn diag_offdiag_invariants(x: &SymMatrix) -> Result<Vec<f64>> {
    require_n2(x.n())?;
    Ok(diag_offdiag_unchecked(x))
}

fn diag_offdiag_unchecked(x: &SymMatrix) -> Vec<f64> {
    let mut out = power_sums_unchecked(x.diag(), x.n());
    out.extend(power_sums_unchecked(x.offdiag(), pair_count(x.n())));
    out
}

/// `sum_{i != j} X_ii X_ij`.
///
/// Every monomial pairs an off-diagonal slot with the diagonal slot of one of
/// its endpoints, so only elements of the product group that move diagonal
/// and off-diagonal slots consistently can fix it.
pub fn f_star(x: &SymMatrix) -> Result<f64> {
    require_n2(x.n())?;
    Ok(f_star_unchecked(x))
}

fn f_star_unchecked(x: &SymMatrix) -> f64 {
    let n = x.n();
    let (d, o) = (x.diag(), x.offdiag());
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += (d[i] + d[j]) * o[pair_index(n, i, j)];
        }
    }
    total
}

/// [`diag_offdiag_invariants`] with [`f_star`] appended.
pub fn conjugation_invariants(x: &SymMatrix) -> Result<Vec<f64>> {
    require_n2(x.n())?;
    let mut out = diag_offdiag_unchecked(x);
    out.push(f_star_unchecked(x));
    Ok(out)
}

pub fn diag_offdiag_map(n: usize) -> Result<FeatureMap<SymMatrix>> {
    require_n2(n)?;
    Ok(FeatureMap::new(
        "diag_offdiag_invariants",
        Domain::SymMatrix(n),
        n + pair_count(n),
        diag_offdiag_unchecked,
    ))
}

pub fn f_star_map(n: usize) -> Result<FeatureMap<SymMatrix>> {
    require_n2(n)?;
    Ok(FeatureMap::new("f_star", Domain::SymMatrix(n), 1, |x: &SymMatrix| {
        vec![f_star_unchecked(x)]
    }))
}

pub fn conjugation_map(n: usize) -> Result<FeatureMap<SymMatrix>> {
    require_n2(n)?;
    Ok(FeatureMap::new(
        "conjugation_invariants",
        Domain::SymMatrix(n),
        n + pair_count(n) + 1,
        |x: &SymMatrix| {
            let mut out = diag_offdiag_unchecked(x);
            out.push(f_star_unchecked(x));
            out
        },
    ))
}

/// The raw diagonal. Not invariant under anything but the identity; used as a
/// negative control for the invariance harness.
pub fn raw_diagonal_map(n: usize) -> FeatureMap<SymMatrix> {
    FeatureMap::new("raw_diagonal", Domain::SymMatrix(n), n, |x: &SymMatrix| {
        x.diag().to_vec()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{apply_product, conjugate_sym, Permutation, ProductGroupElement};
    use crate::seed::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng as _;

    fn two_by_two() -> SymMatrix {
        SymMatrix::new(vec![1.0, 3.0], vec![2.0]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], rel: f64) -> bool {
        a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= rel * (1.0 + x.abs().max(y.abs())))
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sums(&[1.0, 2.0, 3.0], 3).unwrap(), vec![6.0, 14.0, 36.0]);
        assert_eq!(power_sums(&[0.0; 4], 3).unwrap(), vec![0.0; 3]);
        assert!(power_sums(&[1.0], 0).is_err());
    }

    proptest! {
        #[test]
        fn power_sums_ignore_order(
            v in proptest::collection::vec(-10i32..10, 1..9),
            seed in any::<u64>(),
        ) {
            let v: Vec<f64> = v.into_iter().map(f64::from).collect();
            let p = Permutation::random(v.len(), &mut rng_from_seed(seed));
            let w = p.permute(&v).unwrap();
            // small integers: exact
            prop_assert_eq!(power_sums(&v, v.len()).unwrap(), power_sums(&w, w.len()).unwrap());
        }
    }

    #[test]
    fn power_sums_determine_multisets() {
        let mut rng = rng_from_seed(11);
        let mut equal_multisets = 0;
        for trial in 0..10_000 {
            let n = rng.random_range(1..=8);
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-2..=2) as f64).collect();
            let b: Vec<f64> = if trial % 3 == 0 {
                Permutation::random(n, &mut rng).permute(&a).unwrap()
            } else {
                let mut b = a.clone();
                let k = rng.random_range(0..n);
                b[k] = rng.random_range(-2..=2) as f64;
                Permutation::random(n, &mut rng).permute(&b).unwrap()
            };
            let mut sa = a.clone();
            let mut sb = b.clone();
            sa.sort_by(f64::total_cmp);
            sb.sort_by(f64::total_cmp);
            let same_multiset = sa == sb;
            equal_multisets += same_multiset as usize;
            assert_eq!(
                power_sums(&a, n).unwrap() == power_sums(&b, n).unwrap(),
                same_multiset,
                "{a:?} vs {b:?}"
            );
        }
        assert!(equal_multisets > 1000);
    }

    #[test]
    fn diag_offdiag_example() {
        assert_eq!(diag_offdiag_invariants(&two_by_two()).unwrap(), vec![4.0, 10.0, 2.0]);
        let one = SymMatrix::new(vec![1.0], vec![]).unwrap();
        assert!(diag_offdiag_invariants(&one).is_err());
        assert!(f_star(&one).is_err());
        assert!(conjugation_invariants(&one).is_err());
    }

    #[test]
    fn diag_offdiag_is_product_invariant() {
        let mut rng = rng_from_seed(12);
        for _ in 0..100 {
            let x = SymMatrix::random_gaussian(4, &mut rng);
            let g = ProductGroupElement::random(4, &mut rng);
            let y = apply_product(&g, &x).unwrap();
            assert!(close(
                &diag_offdiag_invariants(&x).unwrap(),
                &diag_offdiag_invariants(&y).unwrap(),
                1e-12
            ));
        }
    }

    #[test]
    fn diag_offdiag_separates_diagonal_multisets() {
        let mut rng = rng_from_seed(13);
        for _ in 0..200 {
            let x = SymMatrix::random_gaussian(3, &mut rng);
            let mut diag = x.diag().to_vec();
            diag[0] += 0.5;
            let y = SymMatrix::new(diag, x.offdiag().to_vec()).unwrap();
            assert_ne!(diag_offdiag_invariants(&x).unwrap(), diag_offdiag_invariants(&y).unwrap());
        }
    }

    #[test]
    fn f_star_examples() {
        assert_eq!(f_star(&two_by_two()).unwrap(), 8.0);
        let diagonal = SymMatrix::new(vec![1.0, 5.0, -2.0], vec![0.0; 3]).unwrap();
        assert_eq!(f_star(&diagonal).unwrap(), 0.0);
        assert_eq!(conjugation_invariants(&two_by_two()).unwrap(), vec![4.0, 10.0, 2.0, 8.0]);
    }

    #[test]
    fn f_star_and_conjugation_invariants_are_conjugation_invariant() {
        let mut rng = rng_from_seed(14);
        for _ in 0..1000 {
            let n = rng.random_range(2..=6);
            let x = SymMatrix::random_gaussian(n, &mut rng);
            let y = conjugate_sym(&Permutation::random(n, &mut rng), &x).unwrap();
            let (a, b) = (f_star(&x).unwrap(), f_star(&y).unwrap());
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            assert!(close(
                &conjugation_invariants(&x).unwrap(),
                &conjugation_invariants(&y).unwrap(),
                1e-12
            ));
        }
    }

    #[test]
    fn maps_agree_with_functions() {
        let x = two_by_two();
        assert_eq!(conjugation_map(2).unwrap().evaluate(&x).unwrap(), vec![4.0, 10.0, 2.0, 8.0]);
        assert_eq!(f_star_map(2).unwrap().evaluate(&x).unwrap(), vec![8.0]);
        assert_eq!(raw_diagonal_map(2).evaluate(&x).unwrap(), vec![1.0, 3.0]);
        assert!(conjugation_map(1).is_err());
    }
}
