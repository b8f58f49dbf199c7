mod common;

#[test]
fn folding_is_confluent() {
    common::fold_confluence(256).unwrap();
}

#[test]
fn membership_matches_brute_force() {
    common::membership_vs_brute_force(256).unwrap();
}

#[test]
fn euler_characteristic_multiplies_under_covers() {
    common::euler_multiplicativity(128).unwrap();
}

#[test]
fn cleanliness_hierarchy_is_monotone() {
    assert!(common::hierarchy_monotonicity().unwrap() >= 9);
}

#[test]
fn pi1_presentation_euler_characteristic() {
    assert_eq!(common::pi1_euler_identity().unwrap(), 10);
}
