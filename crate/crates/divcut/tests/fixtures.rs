//! Committed fixture files stay stable.

use divcut::instance::Instance;

/// The 3x3 contrast-Potts grid serializes back to its committed golden
/// bytes: read, write, read, write all agree.
#[test]
fn grid3x3_golden_round_trip() {
    let golden = include_str!("fixtures/grid3x3_potts.divcut");
    let parsed = Instance::parse(golden).unwrap();
    assert_eq!(parsed.to_text(), golden);
    let twice = Instance::parse(&parsed.to_text()).unwrap();
    assert_eq!(twice.to_text(), golden);
    assert_eq!(parsed.grid, Some((3, 3)));
    assert!(parsed.model.is_submodular());
}

/// The DivMBest regression fixture parses to the intended instance.
#[test]
fn divmbest_fixture_parses() {
    let inst = Instance::parse(include_str!("fixtures/divmbest_strict.divcut")).unwrap();
    assert_eq!(inst.model.node_count(), 3);
    assert_eq!(inst.model.edge_count(), 2);
    assert_eq!(inst.m_count, Some(4));
    assert_eq!(inst.lambda, Some(1.0));
    assert!(inst.model.is_submodular());
}
