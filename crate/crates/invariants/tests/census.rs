//! Exhaustive profile census over small topology: every parity-consistent
//! profile with genus <= 3, at most 4 ends of multiplicity <= 4 and total
//! branching <= 3 must give internally consistent index bounds.

use invariants::{cm_index_lower_bound, cm_index_lower_bound_even, TopologyProfile};

/// Sorted multisets of values in [1, max_val] with exactly `len` entries.
fn multisets(len: usize, max_val: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, lo: u32, max_val: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in lo..=max_val {
            prefix.push(v);
            rec(len - 1, v, max_val, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, 1, max_val, &mut Vec::new(), &mut out);
    out
}

/// Sorted multisets of positive integers with sum <= cap.
fn bounded_sum_multisets(cap: u32) -> Vec<Vec<u32>> {
    fn rec(cap: u32, lo: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(prefix.clone());
        for v in lo..=cap {
            prefix.push(v);
            rec(cap - v, v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(cap, 1, &mut Vec::new(), &mut out);
    out
}

#[test]
fn census_is_consistent() {
    let branch_lists = bounded_sum_multisets(3);
    let mut end_lists = Vec::new();
    for e in 1..=4 {
        end_lists.extend(multisets(e, 4));
    }

    let mut seen = 0u32;
    for orientable in [true, false] {
        for genus in 0..=3u32 {
            for ends in &end_lists {
                for branch in &branch_lists {
                    let p = TopologyProfile::new(orientable, genus, ends.clone(), branch.clone())
                        .expect("census profiles are structurally valid");
                    if !p.parity_ok() {
                        continue;
                    }
                    seen += 1;

                    let bound = cm_index_lower_bound(&p);
                    // the unified form is the split form rewritten through chi;
                    // both routes must agree exactly
                    assert_eq!(
                        bound.unified, bound.split,
                        "unified vs split mismatch on {p:?}"
                    );

                    let even = cm_index_lower_bound_even(&p);
                    assert!(even.unified >= bound.unified);
                    assert!(even.unified <= bound.unified + 1);
                }
            }
        }
    }
    // parity keeps roughly half of the raw combinations
    assert!(seen > 1000, "census unexpectedly small: {seen}");
}
