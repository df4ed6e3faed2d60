use orbitsep::families::{
    conjugation_map, f_star_map, features_equal, fourier_map, sample_sort_separators, generic_separator_count,
};
use orbitsep::galois::{BadSetChecker, DEFAULT_PIT_TRIALS};
use orbitsep::group::{enumerate_product, DEFAULT_GROUP_CAP};
use orbitsep::mra::{phase_twists, vanishing_bin_signal};
use orbitsep::pointcloud::{cloud_invariant_map, gaussian_cloud, RigidMotionAction, DEFAULT_ALIGN_TOL};
use orbitsep::separation::{
    column_shuffle, gaussian_matrix, gaussian_sym, product_group_twist, BadSetFlag, ConjugationAction,
    CyclicShiftAction, Harness, OrbitAction, RowPermutationAction,
};
use orbitsep::{Signal, SymMatrix};

#[test]
fn degree_three_invariants_collide_on_a_vanishing_bin() {
    let f = fourier_map(4).unwrap();
    let action = CyclicShiftAction::new(4).unwrap();
    let sampler = vanishing_bin_signal;
    let twists = phase_twists(8);
    let witness = Harness::new(&f, &action, &sampler)
        .collision_search(&twists, 1000, 1)
        .unwrap()
        .expect("collision");
    let x: Signal = serde_json::from_value(witness.left).unwrap();
    let y: Signal = serde_json::from_value(witness.right).unwrap();
    assert!(!action.same_orbit(&x, &y, 1e-9).unwrap());
    assert!(features_equal(&f.evaluate(&x).unwrap(), &f.evaluate(&y).unwrap(), 1e-9));
}

#[test]
fn conjugation_invariants_separate_with_certified_merges() {
    for n in [3, 4] {
        let f = conjugation_map(n).unwrap();
        let action = ConjugationAction::new(n).unwrap();
        let sampler = gaussian_sym(n);
        let twist = product_group_twist(n);
        let group = enumerate_product(n, DEFAULT_GROUP_CAP).unwrap();
        let checker = BadSetChecker::new(&[f_star_map(n).unwrap()], &group, DEFAULT_PIT_TRIALS, 7).unwrap();
        let flag = |x: &SymMatrix| checker.check(x).map(|v| v.member);
        let flag: &BadSetFlag<SymMatrix> = &flag;
        let report = Harness::new(&f, &action, &sampler)
            .with_hard_negatives(&twist)
            .with_bad_set(flag)
            .separation_test(2000, n as u64)
            .unwrap();
        assert!(report.false_splits.is_empty(), "n={n}");
        assert_eq!(report.uncertified_merges, 0, "n={n}");
        assert!(report.hard_negative_pairs > 400);
    }
}

#[test]
fn sort_separators_separate_rows() {
    let action = RowPermutationAction::new(4).unwrap();
    let sampler = gaussian_matrix(4, 2);
    let shuffle = column_shuffle();
    for count in [None, Some(generic_separator_count(4, 2))] {
        let f = sample_sort_separators(4, 2, count, 11).unwrap();
        let harness = Harness::new(&f, &action, &sampler).with_hard_negatives(&shuffle);
        let inv = harness.with_tolerances(0.0, 1e-9).invariance_test(1000, 12).unwrap();
        assert!(inv.false_splits.is_empty());
        let sep = Harness::new(&f, &action, &sampler)
            .with_hard_negatives(&shuffle)
            .separation_test(2000, 13)
            .unwrap();
        assert!(sep.passed() && sep.false_merges.is_empty());
    }
}

#[test]
fn cloud_invariants_separate_generic_clouds() {
    let f = cloud_invariant_map(2, 4).unwrap();
    let action = RigidMotionAction::new(2, 4).unwrap();
    let sampler = gaussian_cloud(2, 4);
    let report = Harness::new(&f, &action, &sampler)
        .with_tolerances(1e-8, DEFAULT_ALIGN_TOL)
        .separation_test(1000, 14)
        .unwrap();
    assert!(report.false_splits.is_empty());
    assert!(report.false_merges.is_empty());
    assert_eq!(report.same_orbit_pairs, 500);
}
