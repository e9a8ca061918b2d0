//! Seeded random hierarchies for property tests. Construction mirrors the
//! structural rules directly: child subtrees are built within an index
//! budget, levels get incidence patterns that are connected and covering by
//! construction, and each node's index is assigned to dominate the child
//! and component totals, the level count, and its own index inequality.

use crate::{DeltaNode, Hierarchy, LevelRecord, LimitComponent};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCaps {
    pub max_depth: u32,
    pub max_children: u32,
    pub max_index: u32,
}

impl Default for GeneratorCaps {
    fn default() -> GeneratorCaps {
        GeneratorCaps {
            max_depth: 3,
            max_children: 3,
            max_index: 6,
        }
    }
}

impl GeneratorCaps {
    fn normalized(self) -> GeneratorCaps {
        GeneratorCaps {
            max_depth: self.max_depth.max(1),
            max_children: self.max_children.max(1),
            max_index: self.max_index.max(1),
        }
    }
}

/// Deterministic-by-seed hierarchy within the caps. Every output passes
/// validation, the index inequality, and the per-level floors.
pub fn random_hierarchy(seed: u64, caps: GeneratorCaps) -> Hierarchy {
    let caps = caps.normalized();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // max of two draws biases toward roomy budgets and non-trivial trees
    let budget = rng
        .random_range(1..=caps.max_index)
        .max(rng.random_range(1..=caps.max_index));
    let tree_orientable = budget < 2 || rng.random_bool(0.7);
    let root = gen_node(&mut rng, &caps, caps.max_depth, budget, tree_orientable, true);
    Hierarchy::new(root)
}

fn gen_node(
    rng: &mut ChaCha8Rng,
    caps: &GeneratorCaps,
    depth_left: u32,
    budget: u32,
    tree_orientable: bool,
    is_root: bool,
) -> DeltaNode {
    if depth_left == 0 || budget < 2 || rng.random_bool(0.35) {
        return leaf(rng, budget, tree_orientable, is_root);
    }
    for attempt in 0..4 {
        let simple = attempt > 0;
        if let Some(node) = try_branch(rng, caps, depth_left, budget, tree_orientable, is_root, simple)
        {
            return node;
        }
    }
    leaf(rng, budget, tree_orientable, is_root)
}

/// A branched node, or None when its floor index would exceed the budget.
fn try_branch(
    rng: &mut ChaCha8Rng,
    caps: &GeneratorCaps,
    depth_left: u32,
    budget: u32,
    tree_orientable: bool,
    is_root: bool,
    simple: bool,
) -> Option<DeltaNode> {
    let k_cap = caps.max_children.min(budget.saturating_sub(2).max(1));
    let k = if simple {
        1
    } else {
        rng.random_range(1..=k_cap)
    };
    let child_budget = ((budget - 1) / k).max(1);
    let children: Vec<DeltaNode> = (0..k)
        .map(|_| gen_node(rng, caps, depth_left - 1, child_budget, tree_orientable, false))
        .collect();
    let (components, attachments) = level_components(rng, k as usize, tree_orientable, simple);

    let orientable = if is_root {
        tree_orientable
    } else {
        tree_orientable || rng.random_bool(0.5)
    };
    let (genus, ends, spinning) = node_shape(rng, simple);
    let mut node = DeltaNode {
        index: 1,
        ends,
        spinning,
        euler_char: 0,
        genus,
        orientable,
        level: Some(LevelRecord {
            singular_points: children,
            components,
            attachments,
            level_ends: ends,
            level_spinning: spinning,
        }),
    };
    node.euler_char = node.expected_euler();

    let floor = required_index(&node);
    if floor > budget {
        return None;
    }
    let bump = u32::from(floor < budget && rng.random_bool(0.3));
    node.index = floor + bump;
    Some(node)
}

/// Smallest admissible index for a branched node: the child-plus-component
/// total, the level count plus one, and the index inequality over its own
/// subtree all push it up.
fn required_index(node: &DeltaNode) -> u32 {
    let level = node.level.as_ref().expect("only branched nodes get sized");
    let sup: i64 = level
        .singular_points
        .iter()
        .map(|c| i64::from(c.index))
        .sum::<i64>()
        + level
            .components
            .iter()
            .map(|c| i64::from(c.index))
            .sum::<i64>();
    let levels_floor = i64::from(node.subtree_levels()) + 1;

    let summary = Hierarchy::new(node.clone()).summary();
    let base = -node.euler_char + 2 * i64::from(node.spinning) + i64::from(node.ends);
    let general = crate::general_correction(&summary);
    let correction = if node.orientable {
        general.max(crate::orientable_correction(&summary))
    } else {
        crate::nonorientable_correction(&summary)
    };
    let inequality_floor = (base + correction + 5) / 6;

    sup.max(levels_floor).max(inequality_floor).max(1) as u32
}

/// Connected covering incidence pattern on `points` singular points. A
/// single-point level always gets a non-flat one-point component, which
/// keeps the per-level floors and correction chains satisfied.
fn level_components(
    rng: &mut ChaCha8Rng,
    points: usize,
    tree_orientable: bool,
    simple: bool,
) -> (Vec<LimitComponent>, Vec<Vec<usize>>) {
    let mut components = Vec::new();
    let mut attachments = Vec::new();

    if points == 1 {
        let comp_orientable = tree_orientable || simple || rng.random_bool(0.6);
        let (disks, index) = if comp_orientable {
            (if simple { 1 } else { rng.random_range(1..=2) }, 1)
        } else {
            let disks = rng.random_range(1..=2);
            (disks, if disks > 1 { 2 } else { 1 })
        };
        components.push(LimitComponent {
            flat: false,
            orientable: comp_orientable,
            attached_singular: 1,
            boundary_disks: disks,
            own_ends: if simple { 1 } else { rng.random_range(0..=2) },
            index,
        });
        attachments.push(vec![0]);
    } else if simple || rng.random_bool(0.5) {
        // one star component through every point
        let extra_disk = u32::from(!simple && rng.random_bool(0.3));
        components.push(LimitComponent {
            flat: false,
            orientable: tree_orientable || rng.random_bool(0.5),
            attached_singular: points as u32,
            boundary_disks: points as u32 + extra_disk,
            own_ends: if simple { 1 } else { rng.random_range(0..=2) },
            index: 1,
        });
        attachments.push((0..points).collect());
    } else {
        // two-boundary chain along consecutive points
        for q in 0..points - 1 {
            components.push(LimitComponent {
                flat: false,
                orientable: tree_orientable || rng.random_bool(0.5),
                attached_singular: 2,
                boundary_disks: 2,
                own_ends: rng.random_range(0..=1),
                index: 1,
            });
            attachments.push(vec![q, q + 1]);
        }
    }

    if !simple && rng.random_bool(0.4) {
        // flat components are free: index 0, no correction weight beyond
        // the multi-point class
        if points >= 2 && rng.random_bool(0.5) {
            let q = rng.random_range(0..points - 1);
            components.push(LimitComponent {
                flat: true,
                orientable: true,
                attached_singular: 2,
                boundary_disks: 2,
                own_ends: rng.random_range(0..=1),
                index: 0,
            });
            attachments.push(vec![q, q + 1]);
        } else {
            components.push(LimitComponent {
                flat: true,
                orientable: true,
                attached_singular: 1,
                boundary_disks: 1,
                own_ends: rng.random_range(0..=2),
                index: 0,
            });
            attachments.push(vec![rng.random_range(0..points)]);
        }
    }
    if !simple && rng.random_bool(0.15) {
        components.push(LimitComponent {
            flat: true,
            orientable: true,
            attached_singular: 0,
            boundary_disks: 0,
            own_ends: 1,
            index: 0,
        });
        attachments.push(Vec::new());
    }

    (components, attachments)
}

/// Boundary data for a branched node; spinning never drops below the end
/// count, so parent branching orders stay non-negative.
fn node_shape(rng: &mut ChaCha8Rng, simple: bool) -> (u32, u32, u32) {
    if simple {
        return (0, 2, 2);
    }
    for _ in 0..16 {
        let genus = u32::from(rng.random_bool(0.2));
        let ends = rng.random_range(1..=3);
        let spinning = rng.random_range(ends.max(2)..=ends + 2);
        if ends + spinning >= 4 {
            return (genus, ends, spinning);
        }
    }
    (0, 2, 2)
}

fn leaf(rng: &mut ChaCha8Rng, budget: u32, tree_orientable: bool, is_root: bool) -> DeltaNode {
    let want_nonorientable =
        !tree_orientable && budget >= 2 && (is_root || rng.random_bool(0.4));

    if !want_nonorientable && rng.random_bool(0.5) {
        let mut node = if rng.random_bool(0.5) {
            DeltaNode::catenoid_piece()
        } else {
            DeltaNode::enneper_piece()
        };
        if budget >= 2 && rng.random_bool(0.25) {
            node.index = rng.random_range(2..=budget);
        }
        return node;
    }

    for _ in 0..24 {
        let genus = u32::from(rng.random_bool(0.25));
        let ends = rng.random_range(1..=3);
        let spinning = rng.random_range(ends.max(2)..=ends + 2);
        if ends + spinning < 4 {
            continue;
        }
        if want_nonorientable && spinning < 3 {
            continue;
        }
        // smallest index a lone piece of this shape can carry
        let floor = if want_nonorientable {
            (((i64::from(genus) + 2 * i64::from(ends) + 2 * i64::from(spinning) - 4) + 2) / 3)
                .max(2) as u32
        } else {
            ((2 * i64::from(genus) + 2 * i64::from(ends) + 2 * i64::from(spinning) - 5 + 2) / 3)
                .max(1) as u32
        };
        if floor > budget {
            continue;
        }
        let bump = u32::from(floor < budget && rng.random_bool(0.25));
        let mut node = DeltaNode {
            index: floor + bump,
            ends,
            spinning,
            euler_char: 0,
            genus,
            orientable: !want_nonorientable,
            level: None,
        };
        node.euler_char = node.expected_euler();
        return node;
    }

    if rng.random_bool(0.5) {
        DeltaNode::catenoid_piece()
    } else {
        DeltaNode::enneper_piece()
    }
}
