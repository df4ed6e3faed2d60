//! Concrete invariant feature maps.
//!
//! Each family is available both as a plain function on its data type and as
//! a [`FeatureMap`], a named map with a fixed output length that the
//! separation and fixer harnesses can evaluate generically. Complex-valued
//! invariants are flattened into interleaved `(re, im)` pairs.

mod fourier;
mod sort;
mod symmetric;
mod veronese;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ComplexPair, Signal, SymMatrix};

pub use fourier::{fourier_invariants, fourier_map, Dft, FourierInvariants};
pub use sort::{
    generic_separator_count, sample_sort_separators, sort_separator, sort_separator_params,
    strong_separator_count, SortSeparatorParams,
};
pub use symmetric::{
    conjugation_invariants, conjugation_map, diag_offdiag_invariants, diag_offdiag_map, f_star,
    f_star_map, power_sums, raw_diagonal_map,
};
pub use veronese::{
    veronese_generator_map, veronese_generators, veronese_separator_map, veronese_separators,
};

/// The data space a feature map is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Vector(usize),
    SymMatrix(usize),
    Signal(usize),
    PointCloud { d: usize, n: usize },
    Matrix { rows: usize, cols: usize },
    ComplexPair,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Vector(n) => write!(f, "vector({n})"),
            Domain::SymMatrix(n) => write!(f, "symmatrix({n})"),
            Domain::Signal(n) => write!(f, "signal({n})"),
            Domain::PointCloud { d, n } => write!(f, "pointcloud({d},{n})"),
            Domain::Matrix { rows, cols } => write!(f, "matrix({rows},{cols})"),
            Domain::ComplexPair => write!(f, "complexpair"),
        }
    }
}

/// Data types that know which [`Domain`] they live in.
pub trait HasDomain {
    fn domain(&self) -> Domain;
}

impl HasDomain for Vec<f64> {
    fn domain(&self) -> Domain {
        Domain::Vector(self.len())
    }
}

impl HasDomain for SymMatrix {
    fn domain(&self) -> Domain {
        Domain::SymMatrix(self.n())
    }
}

impl HasDomain for Signal {
    fn domain(&self) -> Domain {
        Domain::Signal(self.len())
    }
}

impl HasDomain for DMatrix<f64> {
    fn domain(&self) -> Domain {
        Domain::Matrix {
            rows: self.nrows(),
            cols: self.ncols(),
        }
    }
}

impl HasDomain for ComplexPair {
    fn domain(&self) -> Domain {
        Domain::ComplexPair
    }
}

type Evaluator<T> = dyn Fn(&T) -> Vec<f64> + Send + Sync;

/// A named, deterministic map from a data space to a real feature vector of
/// constant length.
pub struct FeatureMap<T> {
    name: String,
    domain: Domain,
    output_len: usize,
    eval: Arc<Evaluator<T>>,
}

impl<T> Clone for FeatureMap<T> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            domain: self.domain,
            output_len: self.output_len,
            eval: Arc::clone(&self.eval),
        }
    }
}

impl<T> fmt::Debug for FeatureMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeatureMap")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("output_len", &self.output_len)
            .finish_non_exhaustive()
    }
}

impl<T: HasDomain> FeatureMap<T> {
    /// `eval` is only ever called on inputs whose domain equals `domain` and
    /// must return exactly `output_len` values.
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        output_len: usize,
        eval: impl Fn(&T) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            output_len,
            eval: Arc::new(eval),
        }
    }

    /// A map that ignores its input.
    pub fn constant(domain: Domain, values: Vec<f64>) -> Self {
        let len = values.len();
        Self::new("constant", domain, len, move |_| values.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn output_len(&self) -> usize {
        self.output_len
    }

    pub fn evaluate(&self, x: &T) -> Result<Vec<f64>> {
        let actual = x.domain();
        if actual != self.domain {
            return Err(Error::DimensionMismatch {
                expected: self.domain.to_string(),
                actual: actual.to_string(),
            });
        }
        let out = (self.eval)(x);
        debug_assert_eq!(out.len(), self.output_len, "feature map {}", self.name);
        Ok(out)
    }

    /// Concatenation of several maps over one domain.
    pub fn concat(name: impl Into<String>, parts: &[FeatureMap<T>]) -> Result<Self>
    where
        T: 'static,
    {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidArgument("cannot concatenate zero feature maps".into()));
        };
        let domain = first.domain;
        if let Some(bad) = parts.iter().find(|p| p.domain != domain) {
            return Err(Error::DimensionMismatch {
                expected: domain.to_string(),
                actual: format!("{} ({})", bad.domain, bad.name),
            });
        }
        let output_len = parts.iter().map(|p| p.output_len).sum();
        let evals: Vec<_> = parts.iter().map(|p| Arc::clone(&p.eval)).collect();
        Ok(Self::new(name, domain, output_len, move |x| {
            let mut out = Vec::with_capacity(output_len);
            for e in &evals {
                out.extend(e(x));
            }
            out
        }))
    }
}

/// Max-norm distance between two feature vectors.
pub fn feature_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Relative equality used by every harness: `|a - b|_max <= tol (1 + max(|a|, |b|))`.
pub fn features_equal(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && feature_distance(a, b) <= tol * (1.0 + max_norm(a).max(max_norm(b)))
}

pub(crate) fn flatten_complex(values: impl IntoIterator<Item = num_complex::Complex64>) -> Vec<f64> {
    values.into_iter().flat_map(|z| [z.re, z.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_checks_domain() {
        let f = diag_offdiag_map(3).unwrap();
        let x = SymMatrix::new(vec![1.0, 2.0], vec![3.0]).unwrap();
        assert!(matches!(f.evaluate(&x), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn concat_lengths_add_and_domains_must_match() {
        let a = diag_offdiag_map(3).unwrap();
        let b = f_star_map(3).unwrap();
        let c = FeatureMap::concat("ab", &[a.clone(), b.clone()]).unwrap();
        assert_eq!(c.output_len(), a.output_len() + b.output_len());
        let other = f_star_map(4).unwrap();
        assert!(FeatureMap::concat("bad", &[a, other]).is_err());
        assert!(FeatureMap::<SymMatrix>::concat("none", &[]).is_err());
    }

    #[test]
    fn relative_equality() {
        assert!(features_equal(&[1e6, 1.0], &[1e6 + 1e-4, 1.0], 1e-9));
        assert!(!features_equal(&[1.0, 1.0], &[1.0, 1.001], 1e-9));
        assert!(!features_equal(&[1.0], &[1.0, 2.0], 1e-9));
    }
}
