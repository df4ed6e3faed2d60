use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use orbitsep::families::{
    conjugation_map, diag_offdiag_map, f_star_map, features_equal, fourier_map, generic_separator_count,
    raw_diagonal_map, sample_sort_separators, strong_separator_count, veronese_separator_map, FeatureMap,
    HasDomain,
};
use orbitsep::galois::{is_galois_distinguishing, BadSetChecker, DEFAULT_PIT_TRIALS};
use orbitsep::group::{embedded_symmetric, enumerate_product, group_order, GroupKind, DEFAULT_GROUP_CAP};
use orbitsep::mra::{sample_complexity_sweep, MraConfig};
use orbitsep::pointcloud::{
    best_alignment, center, cloud_invariant_map, cloud_invariants, gaussian_cloud, gram, read_cloud_file,
    PointCloud, RigidMotionAction,
};
use orbitsep::seed::{child_rng, derive_seed};
use orbitsep::separation::{
    all_root_twists, annulus_pair, column_shuffle, gaussian_matrix, gaussian_signal, gaussian_sym,
    product_group_twist, root_twist, BadSetFlag, ConjugationAction, CyclicShiftAction, Harness, OrbitAction,
    PairMaker, RowPermutationAction, Sampler, ScalarRootAction, SeparationReport, Witness, DEFAULT_TOL,
};
use orbitsep::SymMatrix;

use crate::report::{json_cell, opt_cell, CliError, Outcome, Status, Table};
use crate::{BadsetArgs, CloudArgs, Family, GaloisArgs, MraArgs, SortArgs, SuiteArgs, VeroneseArgs};

// Independent streams carved out of the user's seed.
const STREAM_TRIALS: u64 = 0;
const STREAM_PARAMS: u64 = 1;
const STREAM_BADSET: u64 = 2;
const STREAM_COLLISION: u64 = 3;
/// Moduli range for Veronese sample points.
const VERONESE_R_MIN: f64 = 0.5;
const VERONESE_R_MAX: f64 = 2.0;

const WITNESS_COLUMNS: &[&str] = &[
    "suite",
    "record",
    "trial",
    "kind",
    "feature_distance",
    "in_bad_set",
    "left",
    "right",
    "left_features",
    "right_features",
];

fn push_witness(table: &mut Table, suite: &str, record: &str, w: &Witness) {
    table.push(vec![
        suite.to_string(),
        record.to_string(),
        w.trial.to_string(),
        json_cell(&w.kind).trim_matches('"').to_string(),
        w.feature_distance.to_string(),
        opt_cell(w.in_bad_set),
        json_cell(&w.left),
        json_cell(&w.right),
        json_cell(&w.left_features),
        json_cell(&w.right_features),
    ]);
}

fn push_report(table: &mut Table, suite: &str, report: &SeparationReport) {
    for w in &report.false_splits {
        push_witness(table, suite, "false_split", w);
    }
    for w in &report.false_merges {
        push_witness(table, suite, "false_merge", w);
    }
}

fn describe(report: &SeparationReport) -> String {
    format!(
        "{} trials: {} same-orbit, {} distinct ({} hard negatives); {} false splits, {} false merges ({} uncertified)",
        report.trials,
        report.same_orbit_pairs,
        report.distinct_orbit_pairs,
        report.hard_negative_pairs,
        report.false_splits.len(),
        report.false_merges.len(),
        report.uncertified_merges
    )
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Violations
    }
}

/// A feature map with its action, sampler and optional helpers, ready to
/// build a [`Harness`].
struct Setup<'a, T> {
    features: FeatureMap<T>,
    action: Box<dyn OrbitAction<T> + 'a>,
    sampler: Box<Sampler<'a, T>>,
    hard_negative: Option<Box<PairMaker<'a, T>>>,
    bad_set: Option<Box<BadSetFlag<'a, T>>>,
    orbit_tol: f64,
}

impl<'a, T: HasDomain + Serialize + Send + Sync> Setup<'a, T> {
    fn harness(&self, tol: f64) -> Harness<'_, T> {
        let mut h = Harness::new(&self.features, self.action.as_ref(), self.sampler.as_ref())
            .with_tolerances(tol, self.orbit_tol);
        if let Some(m) = &self.hard_negative {
            h = h.with_hard_negatives(m.as_ref());
        }
        if let Some(b) = &self.bad_set {
            h = h.with_bad_set(b.as_ref());
        }
        h
    }

    fn run(&self, separation: bool, trials: usize, tol: f64, seed: u64) -> Result<Outcome, CliError> {
        let h = self.harness(tol);
        let seed = derive_seed(seed, STREAM_TRIALS);
        let (suite, report) = if separation {
            ("separation", h.separation_test(trials, seed)?)
        } else {
            ("invariance", h.invariance_test(trials, seed)?)
        };
        let ok = if separation { report.passed() } else { report.false_splits.is_empty() };
        let mut table = Table::new(WITNESS_COLUMNS);
        push_report(&mut table, suite, &report);
        Ok(Outcome {
            status: status(ok),
            summary: format!("{} on {}: {}", report.family, report.action, describe(&report)),
            table,
            json: json!({ "suite": suite, "domain": self.features.domain().to_string(), "report": report }),
        })
    }
}

/// Bad-set membership of `f*` on `n x n` symmetric matrices, when the
/// product group is small enough to enumerate.
fn f_star_checker(n: usize, seed: u64) -> Result<Option<BadSetChecker>, CliError> {
    if n < 2 || group_order(GroupKind::Product(n)) > DEFAULT_GROUP_CAP {
        return Ok(None);
    }
    let group = enumerate_product(n, DEFAULT_GROUP_CAP)?;
    let checker = BadSetChecker::new(&[f_star_map(n)?], &group, DEFAULT_PIT_TRIALS, derive_seed(seed, STREAM_BADSET))?;
    Ok(Some(checker))
}

fn sym_setup<'a>(
    features: FeatureMap<SymMatrix>,
    n: usize,
    checker: Option<&'a BadSetChecker>,
) -> Result<Setup<'a, SymMatrix>, CliError> {
    Ok(Setup {
        features,
        action: Box::new(ConjugationAction::new(n)?),
        sampler: Box::new(gaussian_sym(n)),
        hard_negative: Some(Box::new(product_group_twist(n))),
        bad_set: checker.map(|c| Box::new(move |x: &SymMatrix| Ok(c.check(x)?.member)) as Box<BadSetFlag<'a, SymMatrix>>),
        orbit_tol: DEFAULT_TOL,
    })
}

fn cloud_setup<'a>(d: usize, n: usize, align_tol: f64, checker: Option<&'a BadSetChecker>) -> Result<Setup<'a, PointCloud>, CliError> {
    Ok(Setup {
        features: cloud_invariant_map(d, n)?,
        action: Box::new(RigidMotionAction::new(d, n)?),
        sampler: Box::new(gaussian_cloud(d, n)),
        hard_negative: None,
        bad_set: checker.map(|c| {
            Box::new(move |p: &PointCloud| Ok(c.check(&gram(&center(p)))?.member)) as Box<BadSetFlag<'a, PointCloud>>
        }),
        orbit_tol: align_tol,
    })
}

fn sort_setup<'a>(n: usize, d: usize, count: usize, seed: u64) -> Result<Setup<'a, DMatrix<f64>>, CliError> {
    Ok(Setup {
        features: sample_sort_separators(n, d, Some(count), derive_seed(seed, STREAM_PARAMS))?,
        action: Box::new(RowPermutationAction::new(n)?),
        sampler: Box::new(gaussian_matrix(n, d)),
        hard_negative: Some(Box::new(column_shuffle())),
        bad_set: None,
        orbit_tol: DEFAULT_TOL,
    })
}

fn harness_suite(a: &SuiteArgs, separation: bool) -> Result<Outcome, CliError> {
    let seed = a.common.seed();
    let (n, d) = (a.n, a.d);
    match a.family {
        Family::Conjugation | Family::DiagOffdiag | Family::RawDiagonal => {
            let features = match a.family {
                Family::Conjugation => conjugation_map(n)?,
                Family::DiagOffdiag => diag_offdiag_map(n)?,
                _ => raw_diagonal_map(n),
            };
            let checker = if separation && a.family == Family::Conjugation {
                f_star_checker(n, seed)?
            } else {
                None
            };
            let setup = sym_setup(features, n, checker.as_ref())?;
            setup.run(separation, a.trials, a.tol, seed)
        }
        Family::Fourier => Setup {
            features: fourier_map(n)?,
            action: Box::new(CyclicShiftAction::new(n)?),
            sampler: Box::new(gaussian_signal(n)),
            hard_negative: None,
            bad_set: None,
            orbit_tol: DEFAULT_TOL,
        }
        .run(separation, a.trials, a.tol, seed),
        Family::Veronese => Setup {
            features: veronese_separator_map(n, a.j)?,
            action: Box::new(ScalarRootAction::new(n)?),
            sampler: Box::new(annulus_pair(VERONESE_R_MIN, VERONESE_R_MAX)),
            hard_negative: Some(Box::new(root_twist(n))),
            bad_set: None,
            orbit_tol: DEFAULT_TOL,
        }
        .run(separation, a.trials, a.tol, seed),
        Family::Sort => {
            let count = a.count.unwrap_or_else(|| strong_separator_count(n, d));
            sort_setup(n, d, count, seed)?.run(separation, a.trials, a.tol, seed)
        }
        Family::Cloud => {
            let checker = if separation && n <= 4 { f_star_checker(n, seed)? } else { None };
            let setup = cloud_setup(d, n, orbitsep::pointcloud::DEFAULT_ALIGN_TOL, checker.as_ref())?;
            setup.run(separation, a.trials, a.tol, seed)
        }
    }
}

pub fn invariance(a: &SuiteArgs) -> Result<Outcome, CliError> {
    harness_suite(a, false)
}

pub fn separation(a: &SuiteArgs) -> Result<Outcome, CliError> {
    harness_suite(a, true)
}

pub fn galois_check(a: &GaloisArgs) -> Result<Outcome, CliError> {
    let group = enumerate_product(a.n, DEFAULT_GROUP_CAP)?;
    let h = embedded_symmetric(a.n, DEFAULT_GROUP_CAP)?;
    let check = is_galois_distinguishing(&[f_star_map(a.n)?], &group, &h, a.trials, a.common.seed())?;
    let h_set: std::collections::HashSet<_> = h.iter().collect();

    let mut table = Table::new(&["element_index", "sigma", "tau", "embedded"]);
    let mut fixers = Vec::new();
    for &i in &check.common_fixer_indices {
        let g = &group[i];
        let embedded = h_set.contains(g);
        table.push(vec![
            i.to_string(),
            json_cell(g.sigma.image()),
            json_cell(g.tau.image()),
            embedded.to_string(),
        ]);
        fixers.push(json!({ "index": i, "sigma": g.sigma.image(), "tau": g.tau.image(), "embedded": embedded }));
    }
    let summary = format!(
        "{} fixers of f* among {} elements; embedded subgroup has {}; distinguishing: {}",
        check.common_fixer_indices.len(),
        group.len(),
        h.len(),
        check.distinguishing
    );
    Ok(Outcome {
        status: status(check.distinguishing),
        summary,
        table,
        json: json!({
            "n": a.n,
            "group_size": group.len(),
            "embedded_size": h.len(),
            "fixer_count": check.common_fixer_indices.len(),
            "distinguishing": check.distinguishing,
            "trials_per_element": a.trials,
            "fixers": fixers,
            "non_invariant": check.non_invariant,
        }),
    })
}

pub fn badset(a: &BadsetArgs) -> Result<Outcome, CliError> {
    let checker = f_star_checker(a.n, a.common.seed())?
        .ok_or(orbitsep::Error::SizeLimit {
            required: group_order(GroupKind::Product(a.n)),
            cap: DEFAULT_GROUP_CAP,
        })?
        .with_relative_tolerance(a.tol);
    let mut table = Table::new(&["trial", "matrix", "min_residual", "zero_tol", "witnesses"]);

    if let Some(text) = &a.matrix {
        let x: SymMatrix =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("--matrix: {e}")))?;
        if x.n() != a.n {
            return Err(CliError::Usage(format!("--matrix is {}x{}, but --n is {}", x.n(), x.n(), a.n)));
        }
        let v = checker.check(&x)?;
        table.push(vec![
            String::new(),
            json_cell(&x),
            v.min_residual.to_string(),
            v.zero_tol.to_string(),
            json_cell(&v.witnesses),
        ]);
        return Ok(Outcome {
            status: Status::Pass,
            summary: format!("member of bad set: {} (min residual {:e})", v.member, v.min_residual),
            json: json!({ "matrix": x, "verdict": v }),
            table,
        });
    }

    let seed = derive_seed(a.common.seed(), STREAM_TRIALS);
    let verdicts: Vec<_> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let x = SymMatrix::random_gaussian(a.n, &mut child_rng(seed, i as u64));
            let v = checker.check(&x)?;
            Ok((i, x, v))
        })
        .collect::<Result<_, orbitsep::Error>>()?;
    let min_residual = verdicts.iter().map(|(_, _, v)| v.min_residual / v.zero_tol.max(f64::MIN_POSITIVE)).fold(f64::INFINITY, f64::min);
    let members: Vec<_> = verdicts.into_iter().filter(|(_, _, v)| v.member).collect();
    for (i, x, v) in &members {
        table.push(vec![
            i.to_string(),
            json_cell(x),
            v.min_residual.to_string(),
            v.zero_tol.to_string(),
            json_cell(&v.witnesses),
        ]);
    }
    let witnesses: Vec<_> = members
        .iter()
        .map(|(i, x, v)| json!({ "trial": i, "matrix": x, "verdict": v }))
        .collect();
    Ok(Outcome {
        status: status(members.is_empty()),
        summary: format!(
            "{} of {} Gaussian matrices in the bad set; {} residual functions per matrix",
            members.len(),
            a.trials,
            checker.residual_count()
        ),
        table,
        json: json!({
            "n": a.n,
            "trials": a.trials,
            "relative_tolerance": a.tol,
            "members": members.len(),
            "smallest_residual_over_tolerance": min_residual,
            "witnesses": witnesses,
        }),
    })
}

pub fn veronese(a: &VeroneseArgs) -> Result<Outcome, CliError> {
    let seed = a.common.seed();
    let setup = Setup {
        features: veronese_separator_map(a.n, a.j)?,
        action: Box::new(ScalarRootAction::new(a.n)?),
        sampler: Box::new(annulus_pair(VERONESE_R_MIN, VERONESE_R_MAX)),
        hard_negative: Some(Box::new(root_twist(a.n))),
        bad_set: None,
        orbit_tol: DEFAULT_TOL,
    };
    let h = setup.harness(a.tol);
    let report = h.separation_test(a.trials, derive_seed(seed, STREAM_TRIALS))?;
    let collision = h.collision_search(&all_root_twists(a.n), a.budget, derive_seed(seed, STREAM_COLLISION))?;

    let mut table = Table::new(WITNESS_COLUMNS);
    push_report(&mut table, "separation", &report);
    if let Some(w) = &collision {
        push_witness(&mut table, "collision_search", "collision", w);
    }
    let ok = report.passed() && collision.is_none();
    Ok(Outcome {
        status: status(ok),
        summary: format!(
            "n={} j={}: {}; collision search ({} pairs): {}",
            a.n,
            a.j,
            describe(&report),
            a.budget,
            if collision.is_some() { "witness found" } else { "none" }
        ),
        table,
        json: json!({ "n": a.n, "j": a.j, "separation": report, "collision_budget": a.budget, "collision": collision }),
    })
}

pub fn sortsep(a: &SortArgs) -> Result<Outcome, CliError> {
    let count = if a.generic {
        generic_separator_count(a.n, a.d)
    } else {
        a.count.unwrap_or_else(|| strong_separator_count(a.n, a.d))
    };
    let seed = a.common.seed();
    let setup = sort_setup(a.n, a.d, count, seed)?;
    let invariance = setup.harness(0.0).invariance_test(a.trials, derive_seed(seed, STREAM_TRIALS))?;
    let separation = setup.harness(a.tol).separation_test(a.trials, derive_seed(seed, STREAM_TRIALS))?;
    let mut table = Table::new(WITNESS_COLUMNS);
    push_report(&mut table, "invariance", &invariance);
    push_report(&mut table, "separation", &separation);
    let ok = invariance.false_splits.is_empty() && separation.passed();
    Ok(Outcome {
        status: status(ok),
        summary: format!(
            "{count} separators, n={} d={}: exact invariance {} violations; separation {}",
            a.n,
            a.d,
            invariance.false_splits.len(),
            describe(&separation)
        ),
        table,
        json: json!({ "n": a.n, "d": a.d, "count": count, "invariance": invariance, "separation": separation }),
    })
}

pub fn pointcloud(a: &CloudArgs) -> Result<Outcome, CliError> {
    if let Some(path) = &a.cloud {
        return compare_clouds(a, path);
    }
    let seed = a.common.seed();
    let checker = if a.n <= 4 { f_star_checker(a.n, seed)? } else { None };
    let setup = cloud_setup(a.d, a.n, a.align_tol, checker.as_ref())?;
    let invariance = setup.harness(a.tol).invariance_test(a.trials, derive_seed(seed, STREAM_TRIALS))?;
    let separation = setup.harness(a.tol).separation_test(a.trials, derive_seed(seed, STREAM_TRIALS))?;
    let mut table = Table::new(WITNESS_COLUMNS);
    push_report(&mut table, "invariance", &invariance);
    push_report(&mut table, "separation", &separation);
    let ok = invariance.false_splits.is_empty() && separation.passed();
    Ok(Outcome {
        status: status(ok),
        summary: format!(
            "d={} n={}: invariance {} violations of {}; separation {}",
            a.d,
            a.n,
            invariance.false_splits.len(),
            a.trials,
            describe(&separation)
        ),
        table,
        json: json!({ "d": a.d, "n": a.n, "invariance": invariance, "separation": separation }),
    })
}

fn compare_clouds(a: &CloudArgs, path: &std::path::Path) -> Result<Outcome, CliError> {
    let p = read_cloud_file(path)?;
    let fp = cloud_invariants(&p)?;
    let mut table = Table::new(&["record", "value"]);
    table.push(vec!["invariants".into(), json_cell(&fp)]);
    let Some(other) = &a.compare else {
        return Ok(Outcome {
            status: Status::Pass,
            summary: format!("{} points in dimension {}", p.n(), p.d()),
            table,
            json: json!({ "d": p.d(), "n": p.n(), "invariants": fp }),
        });
    };
    let q = read_cloud_file(other)?;
    let fq = cloud_invariants(&q)?;
    let alignment = best_alignment(&p, &q)?;
    let same = alignment.residual <= a.align_tol * alignment.scale;
    let equal = features_equal(&fp, &fq, a.tol);
    for (k, v) in [
        ("compare_invariants", json_cell(&fq)),
        ("features_equal", equal.to_string()),
        ("same_orbit", same.to_string()),
        ("residual", alignment.residual.to_string()),
        ("scale", alignment.scale.to_string()),
        ("permutation", json_cell(alignment.permutation.image())),
        ("rotation", json_cell(&alignment.rotation)),
        ("translation", json_cell(&alignment.translation)),
    ] {
        table.push(vec![k.to_string(), v]);
    }
    Ok(Outcome {
        status: status(equal == same),
        summary: format!("features equal: {equal}; same orbit: {same} (residual {:e})", alignment.residual),
        table,
        json: json!({
            "invariants": fp,
            "compare_invariants": fq,
            "features_equal": equal,
            "same_orbit": same,
            "alignment": alignment,
        }),
    })
}

pub fn mra(a: &MraArgs) -> Result<Outcome, CliError> {
    let mut cfg = MraConfig::default();
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_key_values(&text)?;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(s) = &a.sigmas {
        cfg.sigma_grid = s.clone();
    }
    if let Some(t) = a.target_error {
        cfg.target_error = t;
    }
    if let Some(m) = a.max_samples {
        cfg.max_samples = m;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.common.seed {
        cfg.seed = s;
    }
    let result = sample_complexity_sweep(&cfg)?;

    let mut table = Table::new(&[
        "sigma",
        "N_required",
        "censored",
        "mean_err",
        "power_err",
        "bispec_err",
        "align_err",
        "kind",
        "trial",
        "slope",
    ]);
    for r in &result.rows {
        table.push(vec![
            r.sigma.to_string(),
            r.n_required.to_string(),
            r.censored.to_string(),
            r.mean_err.to_string(),
            r.power_err.to_string(),
            r.bispec_err.to_string(),
            r.align_err.to_string(),
            "trial".into(),
            r.trial.to_string(),
            String::new(),
        ]);
    }
    for s in &result.per_sigma {
        let mut row = vec![String::new(); 10];
        row[0] = s.sigma.to_string();
        row[1] = opt_cell(s.median_n);
        row[2] = s.censored.to_string();
        row[7] = "median".into();
        table.push(row);
    }
    let mut summary_row = vec![String::new(); 10];
    summary_row[7] = "summary".into();
    summary_row[9] = opt_cell(result.slope);
    table.push(summary_row);

    let censored = result.per_sigma.iter().any(|s| s.censored);
    let in_band = result.slope.is_some_and(|s| (a.slope_min..=a.slope_max).contains(&s));
    let status = if censored {
        Status::ResourceCap
    } else {
        status(in_band)
    };
    let medians: Vec<String> = result
        .per_sigma
        .iter()
        .map(|s| format!("{}:{}", s.sigma, opt_cell(s.median_n.map(|m| m.round()))))
        .collect();
    Ok(Outcome {
        status,
        summary: format!(
            "n={} medians [{}]; slope {} (band [{}, {}]){}",
            cfg.n,
            medians.join(" "),
            opt_cell(result.slope),
            a.slope_min,
            a.slope_max,
            if censored { "; some noise levels censored" } else { "" }
        ),
        table,
        json: json!({ "result": result, "slope_band": [a.slope_min, a.slope_max], "monotone": result.is_monotone(1) }),
    })
}
