//! For a trivial hierarchy the general index inequality collapses to the
//! closed-surface index floor computed by the invariants crate. Both
//! routes are evaluated independently and must agree exactly.

use hierarchy::{correction_term, main_inequality, CorrectionVariant, DeltaNode, Hierarchy};
use invariants::{cm_index_lower_bound, TopologyProfile};

fn ceil3(x: i64) -> i64 {
    x.div_euclid(3) + i64::from(x.rem_euclid(3) != 0)
}

/// End multiset with `ends` entries summing to `spinning`.
fn end_multiset(ends: u32, spinning: u32) -> Vec<u32> {
    let mut v = vec![spinning - ends + 1];
    v.extend(std::iter::repeat(1).take(ends as usize - 1));
    v
}

#[test]
fn trivial_general_bound_equals_invariants_unified_floor() {
    for orientable in [true, false] {
        for genus in 0..=2u32 {
            for ends in 1..=3u32 {
                let spin_floor = if orientable { ends.max(2) } else { ends.max(3) };
                for spinning in spin_floor..=ends + 2 {
                    if ends + spinning < 4 {
                        continue;
                    }
                    let profile = TopologyProfile::new(
                        orientable,
                        genus,
                        end_multiset(ends, spinning),
                        Vec::new(),
                    )
                    .unwrap();
                    let floor = cm_index_lower_bound(&profile);
                    // with no branching the unified and split displays agree
                    assert_eq!(floor.unified, floor.split);

                    let index = floor.bound().max(if orientable { 1 } else { 2 });
                    let mut node = DeltaNode {
                        index,
                        ends,
                        spinning,
                        euler_char: 0,
                        genus,
                        orientable,
                        level: None,
                    };
                    node.euler_char = node.expected_euler();
                    let h = Hierarchy::new(node);

                    let r = main_inequality(&h);
                    assert!(r.pass(), "or={orientable} g={genus} e={ends} S={spinning}");
                    let general = r.find("index_bound_general").unwrap();
                    let correction =
                        correction_term(&h, CorrectionVariant::General).unwrap();
                    let base = general.bound as i64 - correction;
                    assert_eq!(
                        base,
                        -h.root.euler_char
                            + 2 * i64::from(spinning)
                            + i64::from(ends)
                    );
                    assert_eq!(
                        ceil3(base - 3).max(0),
                        i64::from(floor.unified),
                        "or={orientable} g={genus} e={ends} S={spinning}"
                    );
                }
            }
        }
    }
}

#[test]
fn model_pieces_sit_exactly_on_both_floors() {
    let cases = [
        (DeltaNode::catenoid_piece(), vec![1, 1]),
        (DeltaNode::enneper_piece(), vec![3]),
    ];
    for (node, end_spinnings) in cases {
        let profile = TopologyProfile::new(true, 0, end_spinnings, Vec::new()).unwrap();
        assert_eq!(cm_index_lower_bound(&profile).bound(), node.index);
        let r = main_inequality(&Hierarchy::new(node));
        assert_eq!(r.slack("index_bound_general"), Some(0.0));
    }
}
