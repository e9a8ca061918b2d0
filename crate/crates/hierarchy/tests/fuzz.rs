//! Ten thousand seeded hierarchies: every one must validate cleanly and
//! satisfy the index inequality and the per-level floors.

use hierarchy::{
    main_inequality, per_level_bounds, random_hierarchy, validate, GeneratorCaps, Hierarchy,
};

#[test]
fn ten_thousand_seeds_pass_everything() {
    let caps = GeneratorCaps {
        max_depth: 3,
        max_children: 3,
        max_index: 6,
    };
    let mut trivial = 0u32;
    let mut branched = 0u32;
    let mut nonorientable_roots = 0u32;
    let mut deep = 0u32;
    for seed in 0..10_000u64 {
        let h = random_hierarchy(seed, caps);
        let violations = validate(&h);
        assert!(violations.is_empty(), "seed {seed}: {violations:?}");

        let main = main_inequality(&h);
        assert!(
            main.pass(),
            "seed {seed}: {:?}",
            main.failures().collect::<Vec<_>>()
        );
        let floors = per_level_bounds(&h);
        assert!(
            floors.pass(),
            "seed {seed}: {:?}",
            floors.failures().collect::<Vec<_>>()
        );

        if h.trivial() {
            trivial += 1;
        } else {
            branched += 1;
        }
        if !h.root.orientable {
            nonorientable_roots += 1;
        }
        if h.root.subtree_levels() >= 2 {
            deep += 1;
        }
    }
    // distribution sanity: the sweep must exercise all the shapes
    assert!(branched >= 3000, "only {branched} branched");
    assert!(trivial >= 1000, "only {trivial} trivial");
    assert!(
        nonorientable_roots >= 1000,
        "only {nonorientable_roots} non-orientable roots"
    );
    assert!(deep >= 300, "only {deep} with two or more levels");
}

#[test]
fn generated_trees_round_trip_through_json() {
    let caps = GeneratorCaps::default();
    for seed in 0..100u64 {
        let h = random_hierarchy(seed, caps);
        let text = serde_json::to_string(&h).unwrap();
        let back: Hierarchy = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h, "seed {seed}");
    }
}
