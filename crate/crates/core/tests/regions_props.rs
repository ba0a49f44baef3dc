mod common;

use beurling::regions::{build_spiral_family, kernel_of_shrinking, schoenfliess_test};
use common::*;

fn property(check: fn(&NestedPair) -> Result<(), proptest::test_runner::TestCaseError>) {
    run_region_property(check).unwrap_or_else(|e| panic!("{e}"));
}

#[test]
fn extended_union_is_smallest_simply_connected_cover() {
    property(union_cover);
}

#[test]
fn extended_union_is_monotone() {
    property(union_monotone);
}

#[test]
fn extended_union_boundary_comes_from_inputs() {
    property(union_boundary);
}

#[test]
fn reduced_intersection_is_largest_simply_connected_part() {
    property(intersection_part);
}

#[test]
fn reduced_intersection_is_monotone() {
    property(intersection_monotone);
}

#[test]
fn reduced_intersection_boundary_comes_from_inputs() {
    property(intersection_boundary);
}

#[test]
fn generator_produces_holes_in_unions() {
    // The suite is only meaningful if unions regularly enclose holes.
    use proptest::strategy::{Strategy, ValueTree};
    use proptest::test_runner::{RngAlgorithm, TestRng, TestRunner};
    let mut runner = TestRunner::new_with_rng(Default::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let with_holes = (0..200)
        .filter(|_| {
            let p = nested_pair().new_tree(&mut runner).unwrap().current();
            holes(&combine(&p.d1, &p.d2, |a, b| a || b)) > 0
        })
        .count();
    assert!(with_holes >= 10, "only {with_holes} of 200 unions have holes");
}

#[test]
fn spiral_family_shrinks_strictly_and_stays_simply_connected() {
    let family = build_spiral_family(3, 512).unwrap();
    for (i, d) in family.iter().enumerate() {
        assert!(d.is_simply_connected(), "level {i}");
        if i > 0 {
            assert!(d.dilated().is_subset_of(&family[i - 1]));
            assert!(d.count() < family[i - 1].count());
        }
    }
    let kernel = kernel_of_shrinking(&family).unwrap();
    assert!(kernel.is_subset_of(family.last().unwrap()));
    // On a raster the kernel of this family is itself a corridor whose
    // complement stays connected; see the README.
    let report = schoenfliess_test(&kernel);
    assert_eq!(report.complement_components, 1);
}

#[test]
fn kernel_rejects_non_shrinking_sequences() {
    let family = build_spiral_family(3, 256).unwrap();
    let reversed: Vec<_> = family.iter().rev().cloned().collect();
    match kernel_of_shrinking(&reversed) {
        Err(beurling::Error::InvalidSequence { index, .. }) => assert_eq!(index, 1),
        other => panic!("expected InvalidSequence, got {other:?}"),
    }
}
