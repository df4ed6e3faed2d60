//! Multi-reference alignment: recover a signal from noisy, randomly shifted
//! copies by estimating its shift-invariant Fourier moments and inverting
//! the bispectrum.
//!
//! Observation `i` of a run with seed `s` is drawn from its own generator
//! seeded by `(s, i)`, so any prefix of a stream is reproducible on its own
//! and sums over sample ranges can be extended without regenerating.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Dft, FourierInvariants};
use crate::group::{cyclic_shift, Signal};
use crate::seed::{child_rng, derive_seed};

/// Relative floor on power-spectrum bins used when none is given.
pub const DEFAULT_FLOOR_FRACTION: f64 = 1e-6;
/// Shift-grid subdivisions per unit shift in [`align_error`].
pub const ALIGN_GRID_PER_UNIT: usize = 64;
/// Samples per block when summing ranges; fixes the summation order.
const BLOCK: usize = 1 << 12;

/// One observation: `cyclic_shift(t, x) + sigma * noise` with `t` uniform.
pub fn observation_with_shift(x: &[f64], sigma: f64, seed: u64, index: u64) -> (usize, Vec<f64>) {
    let n = x.len();
    let mut rng = child_rng(seed, index);
    let t = rng.random_range(0..n);
    let y = (0..n)
        .map(|j| {
            let e: f64 = StandardNormal.sample(&mut rng);
            x[(j + n - t) % n] + sigma * e
        })
        .collect();
    (t, y)
}

pub fn generate_observations(x: &Signal, sigma: f64, count: usize, seed: u64) -> Result<Vec<Signal>> {
    let re = real_signal(x)?;
    check_sigma(sigma)?;
    if count < 1 {
        return Err(Error::InvalidArgument("need at least one observation".into()));
    }
    (0..count as u64)
        .map(|i| Signal::from_real(&observation_with_shift(&re, sigma, seed, i).1))
        .collect()
}

fn real_signal(x: &Signal) -> Result<Vec<f64>> {
    if x.entries().iter().any(|z| z.im != 0.0) {
        return Err(Error::InvalidArgument("observations are generated from real signals".into()));
    }
    Ok(x.real_parts())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level must be finite and >= 0, got {sigma}")));
    }
    Ok(())
}

/// Running sums of the raw (biased) Fourier invariants.
#[derive(Debug, Clone)]
pub struct InvariantAccumulator {
    dft: Dft,
    count: usize,
    mean: Complex64,
    power: Vec<f64>,
    bispectrum: Vec<Complex64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl InvariantAccumulator {
    pub fn new(n: usize) -> Self {
        let dft = Dft::new(n);
        let scratch = vec![Complex64::default(); dft.scratch_len()];
        Self {
            dft,
            count: 0,
            mean: Complex64::default(),
            power: vec![0.0; n],
            bispectrum: vec![Complex64::default(); n * n],
            buf: vec![Complex64::default(); n],
            scratch,
        }
    }

    pub fn n(&self) -> usize {
        self.power.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push_real(&mut self, y: &[f64]) {
        for (b, v) in self.buf.iter_mut().zip(y) {
            *b = Complex64::new(*v, 0.0);
        }
        self.push_buffer();
    }

    pub fn push(&mut self, y: &Signal) {
        self.buf.copy_from_slice(y.entries());
        self.push_buffer();
    }

    fn push_buffer(&mut self) {
        let n = self.n();
        self.dft.forward_in_place(&mut self.buf, &mut self.scratch);
        let s = &self.buf;
        self.mean += s[0];
        for k in 0..n {
            self.power[k] += s[k].norm_sqr();
            let row = &mut self.bispectrum[k * n..(k + 1) * n];
            for (l, b) in row.iter_mut().enumerate() {
                *b += s[k] * s[l] * s[(k + l) % n].conj();
            }
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.mean += other.mean;
        self.power.iter_mut().zip(&other.power).for_each(|(a, b)| *a += b);
        self.bispectrum.iter_mut().zip(&other.bispectrum).for_each(|(a, b)| *a += b);
    }

    /// Sample averages without bias correction.
    pub fn raw(&self) -> Result<FourierInvariants> {
        if self.count == 0 {
            return Err(Error::InvalidArgument("no samples accumulated".into()));
        }
        let c = 1.0 / self.count as f64;
        Ok(FourierInvariants {
            mean: self.mean * c,
            power: self.power.iter().map(|p| p * c).collect(),
            bispectrum: self.bispectrum.iter().map(|b| b * c).collect(),
        })
    }

    /// Sample averages with the additive noise bias removed.
    pub fn estimate(&self, sigma: f64) -> Result<FourierInvariants> {
        Ok(debias(self.raw()?, sigma))
    }

    /// Adds observations `start..end` of the stream `(x, sigma, seed)`.
    /// Blocks are summed in a fixed order, so the result does not depend on
    /// the number of worker threads.
    pub fn extend_range(&mut self, x: &[f64], sigma: f64, seed: u64, start: u64, end: u64) {
        let n = self.n();
        let blocks: Vec<(u64, u64)> = (start..end)
            .step_by(BLOCK)
            .map(|a| (a, (a + BLOCK as u64).min(end)))
            .collect();
        let partial: Vec<Self> = blocks
            .into_par_iter()
            .map(|(a, b)| {
                let mut acc = Self::new(n);
                for i in a..b {
                    acc.push_real(&observation_with_shift(x, sigma, seed, i).1);
                }
                acc
            })
            .collect();
        for p in &partial {
            self.merge(p);
        }
    }
}

/// Removes the noise bias from raw averages under the unnormalized DFT.
///
/// With real white noise of variance `sigma^2`, each noise coefficient has
/// `E|e_k|^2 = n sigma^2` and `E[e_k e_l] = n sigma^2` exactly when
/// `k + l = 0 (mod n)`. So the power bins gain `n sigma^2`, and bispectrum
/// entry `(k, l)` gains `n sigma^2 X0` once for each of `k = 0`, `l = 0` and
/// `k + l = 0 (mod n)` that holds.
pub fn debias(mut raw: FourierInvariants, sigma: f64) -> FourierInvariants {
    let n = raw.n();
    let s2 = n as f64 * sigma * sigma;
    for p in raw.power.iter_mut() {
        *p -= s2;
    }
    let m = raw.mean;
    for k in 0..n {
        for l in 0..n {
            let mut bias = Complex64::default();
            if k == 0 {
                bias += m;
            }
            if l == 0 {
                bias += m;
            }
            if (k + l) % n == 0 {
                bias += m.conj();
            }
            raw.bispectrum[k * n + l] -= bias * s2;
        }
    }
    raw
}

pub fn estimate_invariants(samples: &[Signal], sigma: f64) -> Result<FourierInvariants> {
    check_sigma(sigma)?;
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidArgument("no samples to estimate from".into()))?;
    let n = first.len();
    if n < 2 {
        return Err(Error::InvalidDimension(format!("signals of length {n}")));
    }
    let mut acc = InvariantAccumulator::new(n);
    for s in samples {
        if s.len() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("length {n}"),
                actual: format!("length {}", s.len()),
            });
        }
        acc.push(s);
    }
    acc.estimate(sigma)
}

/// Recovers a signal from its mean, power spectrum and bispectrum, up to a
/// (generally fractional) shift.
///
/// `magnitude_floor` defaults to `1e-6` times the largest power bin. Bin 0 is
/// exempt; when every other bin is below the floor the result is constant.
pub fn invert_bispectrum(inv: &FourierInvariants, magnitude_floor: Option<f64>) -> Result<Signal> {
    let n = inv.n();
    if n < 2 || inv.bispectrum.len() != n * n {
        return Err(Error::InvalidDimension(format!(
            "invariants with {n} power bins and {} bispectrum entries",
            inv.bispectrum.len()
        )));
    }
    let top = inv.power.iter().fold(0.0f64, |m, &p| m.max(p));
    let floor = magnitude_floor.unwrap_or(DEFAULT_FLOOR_FRACTION * top);
    let low: Vec<usize> = (1..n).filter(|&k| inv.power[k].is_nan() || inv.power[k] <= floor).collect();

    let mut spectrum = vec![Complex64::default(); n];
    let sign = if inv.mean.re < 0.0 { -1.0 } else { 1.0 };
    spectrum[0] = Complex64::new(sign * inv.power[0].max(0.0).sqrt(), 0.0);
    if low.len() == n - 1 {
        return Signal::new(Dft::new(n).inverse(&spectrum));
    }
    if let Some(&bin) = low.first() {
        return Err(Error::Genericity {
            bin,
            power: inv.power[bin],
            floor,
        });
    }

    let mut phase = vec![0.0; n];
    for k in 1..n - 1 {
        phase[k + 1] = phase[k] + phase[1] - inv.bispectrum_at(k, 1).arg();
    }
    // The gauge leaves a linear phase k*a with n*a pinned by any entry whose
    // indices wrap around; b[2, n-1] involves only bins 1, 2 and n-1.
    let a = (inv.bispectrum_at(2, n - 1).arg() - phase[2] - phase[n - 1]) / n as f64;
    for k in 1..n {
        spectrum[k] = Complex64::from_polar(inv.power[k].sqrt(), phase[k] + k as f64 * a);
    }
    Signal::new(Dft::new(n).inverse(&spectrum))
}

/// Relative L2 distance from `x_rec` to `x_true`, minimized over continuous
/// shifts of `x_rec`.
///
/// Shifts on a grid of `64 n` points are scanned, then the best one is
/// refined by golden-section search within one grid step.
pub fn align_error(x_true: &Signal, x_rec: &Signal) -> Result<f64> {
    let n = x_true.len();
    if x_rec.len() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("length {n}"),
            actual: format!("length {}", x_rec.len()),
        });
    }
    let dft = Dft::new(n);
    let a = dft.forward(x_true.entries());
    let b = dft.forward(x_rec.entries());
    let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    // Parseval: |modulate(b, t) - a|^2 summed over bins, over n
    let dist = |t: f64| -> f64 {
        b.iter()
            .zip(&a)
            .enumerate()
            .map(|(k, (bk, ak))| (bk * Complex64::from_polar(1.0, -2.0 * PI * k as f64 * t / n as f64) - ak).norm_sqr())
            .sum::<f64>()
    };
    let grid = ALIGN_GRID_PER_UNIT * n;
    let step = n as f64 / grid as f64;
    let (best_i, _) = (0..grid)
        .map(|i| (i, dist(i as f64 * step)))
        .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    let t0 = best_i as f64 * step;
    let refined = golden_section(&dist, t0 - step, t0 + step, 1e-13 * n as f64);
    let best = dist(refined).min(dist(t0));
    let scaled = if norm > 0.0 { best / norm } else { best / n as f64 };
    Ok(scaled.max(0.0).sqrt())
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Smallest `min |X[k]|` accepted for a sweep's test signal, relative to
/// `sqrt(n)`.
pub const SWEEP_MIN_BIN: f64 = 0.5;

/// A real standard-normal signal of length `n`, redrawn until every DFT bin
/// has magnitude above `min_bin`.
pub fn generic_signal(n: usize, min_bin: f64, seed: u64) -> Result<Signal> {
    let dft = Dft::new(n);
    for attempt in 0..10_000u64 {
        let mut rng = child_rng(seed, attempt);
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x = Signal::from_real(&v)?;
        if dft.forward(x.entries()).iter().all(|z| z.norm() > min_bin) {
            return Ok(x);
        }
    }
    Err(Error::InvalidArgument(format!(
        "no signal of length {n} with all bins above {min_bin} in 10000 draws"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MraConfig {
    pub n: usize,
    pub sigma_grid: Vec<f64>,
    pub target_error: f64,
    pub max_samples: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for MraConfig {
    fn default() -> Self {
        Self {
            n: 7,
            sigma_grid: vec![1.0, 1.4, 2.0, 2.8, 4.0],
            target_error: 0.3,
            max_samples: 1 << 28,
            trials: 5,
            seed: 0,
        }
    }
}

impl MraConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidDimension(format!("MRA needs n >= 3, got {}", self.n)));
        }
        if self.sigma_grid.is_empty() {
            return Err(Error::InvalidArgument("empty sigma grid".into()));
        }
        if let Some(s) = self.sigma_grid.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {s}")));
        }
        if !(self.target_error > 0.0 && self.target_error < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "target error must lie in (0, 1), got {}",
                self.target_error
            )));
        }
        if self.max_samples < 1 || self.trials < 1 {
            return Err(Error::InvalidArgument("max_samples and trials must be >= 1".into()));
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    /// Keys: `n`, `sigmas` (comma separated), `target_error`, `max_samples`,
    /// `trials`, `seed`.
    pub fn apply_key_values(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: String| Error::Parse(format!("line {}: {key}: {e}", lineno + 1));
            match key {
                "n" => self.n = parse(value).map_err(bad)?,
                "sigmas" | "sigma_grid" => {
                    self.sigma_grid = value
                        .split(',')
                        .map(|s| parse(s.trim()))
                        .collect::<std::result::Result<_, _>>()
                        .map_err(bad)?
                }
                "target_error" => self.target_error = parse(value).map_err(bad)?,
                "max_samples" => self.max_samples = parse(value).map_err(bad)?,
                "trials" => self.trials = parse(value).map_err(bad)?,
                "seed" => self.seed = parse(value).map_err(bad)?,
                _ => return Err(Error::Parse(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        Ok(())
    }

    /// The sweep's test signal: generic, with unit L2 norm.
    pub fn signal(&self) -> Result<Signal> {
        let x = generic_signal(self.n, SWEEP_MIN_BIN * (self.n as f64).sqrt(), derive_seed(self.seed, u64::MAX))?;
        let norm = x.norm();
        Signal::new(x.entries().iter().map(|z| z / norm).collect())
    }
}

fn parse<T: FromStr>(s: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

/// Outcome of one `(sigma, trial)` search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MraRow {
    pub sigma: f64,
    pub trial: usize,
    /// Smallest sample count reaching the target, or `max_samples` if censored.
    pub n_required: usize,
    pub censored: bool,
    pub mean_err: f64,
    pub power_err: f64,
    pub bispec_err: f64,
    pub align_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSummary {
    pub sigma: f64,
    /// Median over trials, counting censored trials as infinite.
    pub median_n: Option<f64>,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MraResult {
    pub config: MraConfig,
    pub rows: Vec<MraRow>,
    pub per_sigma: Vec<SigmaSummary>,
    /// Least-squares slope of `log N` against `log sigma` over uncensored
    /// grid points; `None` with fewer than two.
    pub slope: Option<f64>,
}

impl MraResult {
    /// Medians nondecreasing in sigma, allowing at most `allowed` inversions
    /// between consecutive grid points.
    pub fn is_monotone(&self, allowed: usize) -> bool {
        let medians: Vec<f64> = self.per_sigma.iter().map(|s| s.median_n.unwrap_or(f64::INFINITY)).collect();
        medians.windows(2).filter(|w| w[1] < w[0]).count() <= allowed
    }
}

struct Evaluation {
    ok: bool,
    mean_err: f64,
    power_err: f64,
    bispec_err: f64,
    align_err: f64,
}

fn evaluate(acc: &InvariantAccumulator, sigma: f64, x: &Signal, truth: &FourierInvariants, target: f64) -> Result<Evaluation> {
    let est = acc.estimate(sigma)?;
    let align_err = match invert_bispectrum(&est, None) {
        Ok(rec) => align_error(x, &rec)?,
        Err(Error::Genericity { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(Evaluation {
        ok: align_err <= target,
        mean_err: est.mean_error(truth),
        power_err: est.power_error(truth),
        bispec_err: est.bispectrum_error(truth),
        align_err,
    })
}

/// Smallest `N` whose estimate reaches the target: doubling, then bisection
/// on nested prefixes of one observation stream.
fn search_required(cfg: &MraConfig, x: &Signal, truth: &FourierInvariants, sigma: f64, seed: u64) -> Result<(usize, bool, Evaluation)> {
    let re = x.real_parts();
    let max = cfg.max_samples as u64;
    let mut acc = InvariantAccumulator::new(cfg.n);
    let mut lo_acc = InvariantAccumulator::new(cfg.n);
    let mut hi = 1u64;
    loop {
        acc.extend_range(&re, sigma, seed, acc.count() as u64, hi);
        let eval = evaluate(&acc, sigma, x, truth, cfg.target_error)?;
        if eval.ok {
            // bisect on (lo, hi]: lo fails, hi succeeds
            let mut lo = lo_acc.count() as u64;
            let mut best = (hi, eval);
            while best.0 - lo > 1 {
                let mid = lo + (best.0 - lo) / 2;
                let mut mid_acc = lo_acc.clone();
                mid_acc.extend_range(&re, sigma, seed, lo, mid);
                let e = evaluate(&mid_acc, sigma, x, truth, cfg.target_error)?;
                if e.ok {
                    best = (mid, e);
                } else {
                    lo = mid;
                    lo_acc = mid_acc;
                }
            }
            return Ok((best.0 as usize, false, best.1));
        }
        if hi >= max {
            return Ok((cfg.max_samples, true, eval));
        }
        lo_acc = acc.clone();
        hi = (hi * 2).min(max);
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn sample_complexity_sweep(cfg: &MraConfig) -> Result<MraResult> {
    cfg.validate()?;
    let x = cfg.signal()?;
    let truth = crate::families::fourier_invariants(&x)?;
    let jobs: Vec<(usize, usize)> = (0..cfg.sigma_grid.len())
        .flat_map(|s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let rows: Vec<MraRow> = jobs
        .into_par_iter()
        .map(|(s, trial)| {
            let sigma = cfg.sigma_grid[s];
            let seed = derive_seed(derive_seed(cfg.seed, s as u64), trial as u64);
            let (n_required, censored, e) = search_required(cfg, &x, &truth, sigma, seed)?;
            Ok(MraRow {
                sigma,
                trial,
                n_required,
                censored,
                mean_err: e.mean_err,
                power_err: e.power_err,
                bispec_err: e.bispec_err,
                align_err: e.align_err,
            })
        })
        .collect::<Result<_>>()?;

    let per_sigma: Vec<SigmaSummary> = cfg
        .sigma_grid
        .iter()
        .enumerate()
        .map(|(s, &sigma)| {
            let ns: Vec<f64> = rows[s * cfg.trials..(s + 1) * cfg.trials]
                .iter()
                .map(|r| if r.censored { f64::INFINITY } else { r.n_required as f64 })
                .collect();
            let m = median(ns);
            SigmaSummary {
                sigma,
                median_n: m.is_finite().then_some(m),
                censored: !m.is_finite(),
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = per_sigma
        .iter()
        .filter_map(|s| s.median_n.map(|m| (s.sigma.ln(), m.ln())))
        .unzip();
    Ok(MraResult {
        config: cfg.clone(),
        rows,
        slope: fit_slope(&xs, &ys),
        per_sigma,
    })
}

/// The worst case for degree-3 invariants: with `X[2] = 0` at `n = 4`, the
/// mean, power spectrum and bispectrum only see the phase of `X[1] X[3]`, so
/// turning the phase of `X[1]` by `a` and of `X[3]` by `-a` keeps every
/// invariant while leaving the orbit unless `a` is a multiple of `pi / 2`.
pub fn vanishing_bin_signal(rng: &mut crate::seed::Rng) -> Signal {
    let v: Vec<f64> = (0..4).map(|_| StandardNormal.sample(rng)).collect();
    // remove the component along (1, -1, 1, -1)
    let alt = (v[0] - v[1] + v[2] - v[3]) / 4.0;
    let w: Vec<f64> = v.iter().enumerate().map(|(j, x)| x - alt * if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    Signal::from_real(&w).expect("length 4")
}

/// Phase twists of bins `1` and `n - 1` in opposite directions.
pub fn phase_twists(count: usize) -> impl Fn(&Signal, &mut crate::seed::Rng) -> Vec<Signal> + Sync {
    move |x, rng| {
        let n = x.len();
        let dft = Dft::new(n);
        let spec = dft.forward(x.entries());
        (0..count)
            .map(|_| {
                let a: f64 = rng.random_range(0.0..2.0 * PI);
                let mut s = spec.clone();
                s[1] *= Complex64::from_polar(1.0, a);
                s[n - 1] *= Complex64::from_polar(1.0, -a);
                Signal::new(dft.inverse(&s)).expect("same length")
            })
            .collect()
    }
}

/// `cyclic_shift` on real parts, for callers holding plain vectors.
pub fn shift_real(t: i64, x: &[f64]) -> Vec<f64> {
    cyclic_shift(t, &Signal::from_real(x).expect("non-empty")).real_parts()
}
