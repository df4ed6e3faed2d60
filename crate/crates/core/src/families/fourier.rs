//! Degree <= 3 invariants of the cyclic group acting on signals by shifts.
//!
//! Convention: unnormalized forward DFT, `X[k] = sum_j x[j] exp(-2 pi i jk/n)`.
//! A shift by `t` multiplies `X[k]` by `exp(-2 pi i kt/n)`; the mean, the power
//! spectrum and the bispectrum are products in which these phases cancel.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Signal;

use super::{flatten_complex, Domain, FeatureMap};

/// Planned forward/inverse DFT of one length.
#[derive(Clone)]
pub struct Dft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// In-place forward transform; `scratch` must hold [`Self::scratch_len`] values.
    pub fn forward_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    /// Inverse transform including the `1/n` factor.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
        buf
    }
}

/// Mean, power spectrum and bispectrum of a signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierInvariants {
    /// `X[0]` (the sum of the entries under the unnormalized convention).
    pub mean: Complex64,
    /// `|X[k]|^2`.
    pub power: Vec<f64>,
    /// Row-major `n x n`: `b[k, l] = X[k] X[l] conj(X[(k + l) mod n])`.
    pub bispectrum: Vec<Complex64>,
}

impl FourierInvariants {
    pub fn from_spectrum(spectrum: &[Complex64]) -> Self {
        let n = spectrum.len();
        let power = spectrum.iter().map(|z| z.norm_sqr()).collect();
        let mut bispectrum = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                bispectrum.push(spectrum[k] * spectrum[l] * spectrum[(k + l) % n].conj());
            }
        }
        Self {
            mean: spectrum[0],
            power,
            bispectrum,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            mean: Complex64::new(0.0, 0.0),
            power: vec![0.0; n],
            bispectrum: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.power.len()
    }

    pub fn bispectrum_at(&self, k: usize, l: usize) -> Complex64 {
        let n = self.n();
        self.bispectrum[(k % n) * n + l % n]
    }

    /// `[re(mean), im(mean), power..., re(b00), im(b00), ...]`.
    pub fn to_features(&self) -> Vec<f64> {
        let mut out = vec![self.mean.re, self.mean.im];
        out.extend_from_slice(&self.power);
        out.extend(flatten_complex(self.bispectrum.iter().copied()));
        out
    }

    /// `|mean - truth| / |truth|` (absolute when the truth is zero).
    pub fn mean_error(&self, truth: &Self) -> f64 {
        relative((self.mean - truth.mean).norm(), truth.mean.norm())
    }

    /// Relative L2 error of the power spectrum.
    pub fn power_error(&self, truth: &Self) -> f64 {
        let num: f64 = self
            .power
            .iter()
            .zip(&truth.power)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        let den: f64 = truth.power.iter().map(|b| b * b).sum();
        relative(num.sqrt(), den.sqrt())
    }

    /// Relative Frobenius error of the bispectrum.
    pub fn bispectrum_error(&self, truth: &Self) -> f64 {
        let num: f64 = self
            .bispectrum
            .iter()
            .zip(&truth.bispectrum)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = truth.bispectrum.iter().map(|b| b.norm_sqr()).sum();
        relative(num.sqrt(), den.sqrt())
    }
}

fn relative(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

pub fn fourier_invariants(x: &Signal) -> Result<FourierInvariants> {
    if x.len() < 2 {
        return Err(Error::InvalidDimension(format!(
            "Fourier invariants need n >= 2, got {}",
            x.len()
        )));
    }
    let spectrum = Dft::new(x.len()).forward(x.entries());
    Ok(FourierInvariants::from_spectrum(&spectrum))
}

/// Flattened [`FourierInvariants`] as a feature map of length `2 + n + 2 n^2`.
pub fn fourier_map(n: usize) -> Result<FeatureMap<Signal>> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "Fourier invariants need n >= 2, got {n}"
        )));
    }
    let dft = Dft::new(n);
    Ok(FeatureMap::new(
        "fourier_invariants",
        Domain::Signal(n),
        2 + n + 2 * n * n,
        move |x: &Signal| FourierInvariants::from_spectrum(&dft.forward(x.entries())).to_features(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::group::cyclic_shift;
    use crate::seed::rng_from_seed;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    fn random_real(n: usize, seed: u64) -> Signal {
        let mut rng = rng_from_seed(seed);
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        Signal::from_real(&v).unwrap()
    }

    #[test]
    fn dft_matches_direct_sum_and_inverts() {
        for n in 2..20 {
            let x = random_real(n, n as u64);
            let dft = Dft::new(n);
            let fast = dft.forward(x.entries());
            for (a, b) in fast.iter().zip(naive_dft(x.entries())) {
                assert!((a - b).norm() < 1e-10);
            }
            let back = dft.inverse(&fast);
            for (a, b) in back.iter().zip(x.entries()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_signal() {
        let x = Signal::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let inv = fourier_invariants(&x).unwrap();
        assert_eq!(inv.mean, Complex64::new(1.0, 0.0));
        assert!(inv.power.iter().all(|&p| (p - 1.0).abs() < 1e-15));
        assert!(inv.bispectrum.iter().all(|b| (b - 1.0).norm() < 1e-15));
    }

    #[test]
    fn constant_signal() {
        let x = Signal::from_real(&[1.0; 4]).unwrap();
        let inv = fourier_invariants(&x).unwrap();
        assert!((inv.mean - 4.0).norm() < 1e-15);
        let expected_power = [16.0, 0.0, 0.0, 0.0];
        assert!(inv.power.iter().zip(expected_power).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!((inv.bispectrum_at(0, 0) - 64.0).norm() < 1e-12);
        for k in 0..4 {
            for l in 0..4 {
                if (k, l) != (0, 0) {
                    assert!(inv.bispectrum_at(k, l).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shift_invariance() {
        let x = Signal::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let a = fourier_invariants(&x).unwrap().to_features();
        let b = fourier_invariants(&cyclic_shift(1, &x)).unwrap().to_features();
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-12));
    }

    #[test]
    fn real_signal_symmetries() {
        for seed in 0..50 {
            let n = 3 + (seed as usize % 10);
            let inv = fourier_invariants(&random_real(n, seed)).unwrap();
            for k in 0..n {
                assert!(inv.power[k] >= 0.0);
                let scale = 1.0 + inv.power[k];
                assert!((inv.power[k] - inv.power[(n - k) % n]).abs() < 1e-10 * scale);
                for l in 0..n {
                    let (a, b) = (inv.bispectrum_at(k, l), inv.bispectrum_at(l, k));
                    assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
                }
            }
        }
    }

    #[test]
    fn too_short() {
        assert!(fourier_invariants(&Signal::from_real(&[1.0]).unwrap()).is_err());
        assert!(fourier_map(1).is_err());
        assert_eq!(fourier_map(4).unwrap().output_len(), 2 + 4 + 32);
    }

    proptest! {
        #[test]
        fn invariants_ignore_shifts(v in proptest::collection::vec(-3.0f64..3.0, 2..20), t in 0i64..40) {
            let x = Signal::from_real(&v).unwrap();
            let a = fourier_invariants(&x).unwrap();
            let b = fourier_invariants(&cyclic_shift(t, &x)).unwrap();
            let scale = 1.0 + a.power.iter().fold(0.0f64, |m, &p| m.max(p));
            prop_assert!(a.power_error(&b) <= 1e-12 * scale);
            prop_assert!(a.bispectrum_error(&b) <= 1e-9);
            prop_assert!((a.mean - b.mean).norm() <= 1e-12 * scale);
        }
    }
}
