//! Bipartite incidence structures between limit components and singular
//! points, the lower bound their boundary-circle counts must satisfy, and an
//! exhaustive census over all small structures.

use crate::HierarchyError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One component of an incidence structure: the singular points it meets,
/// its total count of boundary circles over them, and annotations used by
/// the orientable refinement of the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceComponent {
    /// Sorted distinct point ids, 0-based.
    pub attached: Vec<u32>,
    /// Total boundary circles; at least one per attached point.
    pub disks: u32,
    pub flat: bool,
    pub index: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceStructure {
    pub points: u32,
    pub components: Vec<IncidenceComponent>,
}

/// Both sides of the circle-count bound, its equality diagnosis, and the
/// orientable refinement when the flat/index annotations are coherent
/// (flat components carry index 0, non-flat ones at least 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceBound {
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
    pub equality: bool,
    /// Equality shape: every multi-point component joins exactly two points
    /// by exactly two circles, and there are points-minus-one of them.
    pub two_boundary_chain: bool,
    pub oriented_lhs: Option<i64>,
    pub oriented_rhs: Option<i64>,
    pub oriented_pass: Option<bool>,
    /// Orientable equality shape: a two-boundary chain all of whose
    /// multi-point components are flat.
    pub oriented_flat_chain: Option<bool>,
}

fn check_structure(s: &IncidenceStructure) -> Result<(), HierarchyError> {
    if s.points == 0 {
        return Err(HierarchyError::MalformedIncidence(
            "no singular points".into(),
        ));
    }
    if s.components.is_empty() {
        return Err(HierarchyError::MalformedIncidence("no components".into()));
    }
    for c in &s.components {
        if c.attached.is_empty() {
            return Err(HierarchyError::MalformedIncidence(
                "component attached to no point".into(),
            ));
        }
        if !c.attached.windows(2).all(|w| w[0] < w[1]) {
            return Err(HierarchyError::MalformedIncidence(
                "attachment list not sorted and distinct".into(),
            ));
        }
        if c.attached.iter().any(|&q| q >= s.points) {
            return Err(HierarchyError::MalformedIncidence(
                "attachment refers to a missing point".into(),
            ));
        }
        if (c.disks as usize) < c.attached.len() {
            return Err(HierarchyError::MalformedIncidence(
                "fewer circles than attached points".into(),
            ));
        }
    }
    if !connected(s) {
        return Err(HierarchyError::DisconnectedIncidence);
    }
    Ok(())
}

fn connected(s: &IncidenceStructure) -> bool {
    let p = s.points as usize;
    let n = p + s.components.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in s.components.iter().enumerate() {
        for &q in &c.attached {
            adj[q as usize].push(p + i);
            adj[p + i].push(q as usize);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|v| v)
}

/// Evaluates the circle-count lower bound over the multi-point components,
/// with the equality-shape diagnosis and the orientable refinement.
pub fn incidence_lower_bound(s: &IncidenceStructure) -> Result<IncidenceBound, HierarchyError> {
    check_structure(s)?;
    let multi: Vec<&IncidenceComponent> = s
        .components
        .iter()
        .filter(|c| c.attached.len() >= 2)
        .collect();
    let lhs: i64 = multi.iter().map(|c| 2 * i64::from(c.disks) - 3).sum();
    let rhs = i64::from(s.points) - 1;
    let chain = if s.points == 1 {
        multi.is_empty()
    } else {
        multi.len() as i64 == rhs
            && multi
                .iter()
                .all(|c| c.attached.len() == 2 && c.disks == 2)
    };

    let annotations_coherent = s
        .components
        .iter()
        .all(|c| if c.flat { c.index == 0 } else { c.index >= 1 });
    let (oriented_lhs, oriented_rhs, oriented_pass, oriented_flat_chain) = if annotations_coherent {
        let olhs: i64 = multi
            .iter()
            .map(|c| 2 * i64::from(c.disks) - 3 + 3 * i64::from(c.index))
            .sum::<i64>()
            + multi.iter().filter(|c| c.flat).count() as i64;
        let orhs = 2 * rhs;
        let flat_chain = chain && multi.iter().all(|c| c.flat);
        (Some(olhs), Some(orhs), Some(olhs >= orhs), Some(flat_chain))
    } else {
        (None, None, None, None)
    };

    Ok(IncidenceBound {
        lhs,
        rhs,
        pass: lhs >= rhs,
        equality: lhs == rhs,
        two_boundary_chain: chain,
        oriented_lhs,
        oriented_rhs,
        oriented_pass,
        oriented_flat_chain,
    })
}

/// Result of the exhaustive census.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationOutcome {
    pub structures: u64,
    pub violations: u64,
    pub equality_cases: u64,
    /// Structures where equality and the two-boundary-chain shape disagree
    /// in either direction.
    pub mischaracterized_equalities: u64,
    pub first_violation: Option<IncidenceStructure>,
}

impl EnumerationOutcome {
    fn merge(mut self, other: EnumerationOutcome) -> EnumerationOutcome {
        self.structures += other.structures;
        self.violations += other.violations;
        self.equality_cases += other.equality_cases;
        self.mischaracterized_equalities += other.mischaracterized_equalities;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
        self
    }
}

/// Enumerates every connected incidence structure with up to `max_points`
/// labeled points, up to `max_components` components (as an unordered
/// multiset), and at most `max_disks` boundary circles in total, checking
/// the lower bound and the equality characterization on each.
pub fn enumerate_incidence_structures(
    max_points: u32,
    max_components: u32,
    max_disks: u32,
) -> Result<EnumerationOutcome, HierarchyError> {
    if max_points > 5 || max_components > 5 || max_disks > 8 {
        return Err(HierarchyError::CapsExceeded(
            max_points,
            max_components,
            max_disks,
        ));
    }
    let mut cells = Vec::new();
    for points in 1..=max_points {
        for n_components in 1..=max_components {
            cells.push((points, n_components));
        }
    }
    // cells are independent; per-cell outcomes merge in cell order
    let outcomes: Vec<EnumerationOutcome> = cells
        .par_iter()
        .map(|&(points, n_components)| enumerate_cell(points, n_components, max_disks))
        .collect();
    Ok(outcomes.into_iter().fold(
        EnumerationOutcome {
            structures: 0,
            violations: 0,
            equality_cases: 0,
            mischaracterized_equalities: 0,
            first_violation: None,
        },
        EnumerationOutcome::merge,
    ))
}

/// Component shapes ordered by (point mask, circle count); a structure is a
/// non-decreasing sequence of shapes, which kills component relabeling.
fn enumerate_cell(points: u32, n_components: u32, max_disks: u32) -> EnumerationOutcome {
    let mut outcome = EnumerationOutcome {
        structures: 0,
        violations: 0,
        equality_cases: 0,
        mischaracterized_equalities: 0,
        first_violation: None,
    };
    let mut shapes: Vec<(u32, u32)> = Vec::new(); // (mask, disks)
    for mask in 1..(1u32 << points) {
        let size = mask.count_ones();
        for disks in size..=max_disks {
            shapes.push((mask, disks));
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n_components as usize);
    descend(
        &shapes,
        points,
        n_components,
        max_disks,
        0,
        &mut chosen,
        &mut outcome,
    );
    outcome
}

fn descend(
    shapes: &[(u32, u32)],
    points: u32,
    remaining: u32,
    disk_budget: u32,
    min_shape: usize,
    chosen: &mut Vec<usize>,
    outcome: &mut EnumerationOutcome,
) {
    if remaining == 0 {
        let structure = IncidenceStructure {
            points,
            components: chosen
                .iter()
                .map(|&i| {
                    let (mask, disks) = shapes[i];
                    IncidenceComponent {
                        attached: (0..points).filter(|q| mask & (1 << q) != 0).collect(),
                        disks,
                        flat: false,
                        index: 1,
                    }
                })
                .collect(),
        };
        let bound = match incidence_lower_bound(&structure) {
            Ok(b) => b,
            Err(HierarchyError::DisconnectedIncidence) => return,
            Err(_) => unreachable!("enumeration builds well-formed structures"),
        };
        outcome.structures += 1;
        if !bound.pass {
            outcome.violations += 1;
            if outcome.first_violation.is_none() {
                outcome.first_violation = Some(structure);
            }
        }
        if bound.equality {
            outcome.equality_cases += 1;
        }
        if bound.equality != bound.two_boundary_chain {
            outcome.mischaracterized_equalities += 1;
        }
        return;
    }
    for i in min_shape..shapes.len() {
        let (_, disks) = shapes[i];
        if disks > disk_budget {
            continue;
        }
        chosen.push(i);
        descend(
            shapes,
            points,
            remaining - 1,
            disk_budget - disks,
            i,
            chosen,
            outcome,
        );
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn component(attached: &[u32], disks: u32) -> IncidenceComponent {
        IncidenceComponent {
            attached: attached.to_vec(),
            disks,
            flat: false,
            index: 1,
        }
    }

    #[test]
    fn single_point_star_is_vacuous() {
        let s = IncidenceStructure {
            points: 1,
            components: vec![component(&[0], 1), component(&[0], 2)],
        };
        let b = incidence_lower_bound(&s).unwrap();
        assert_eq!((b.lhs, b.rhs), (0, 0));
        assert!(b.pass && b.equality && b.two_boundary_chain);
    }

    #[test]
    fn five_point_chain_attains_equality() {
        let s = IncidenceStructure {
            points: 5,
            components: (0..4).map(|i| component(&[i, i + 1], 2)).collect(),
        };
        let b = incidence_lower_bound(&s).unwrap();
        assert_eq!((b.lhs, b.rhs), (4, 4));
        assert!(b.pass && b.equality && b.two_boundary_chain);
    }

    #[test]
    fn three_point_star_has_slack_one() {
        let s = IncidenceStructure {
            points: 3,
            components: vec![component(&[0, 1, 2], 3)],
        };
        let b = incidence_lower_bound(&s).unwrap();
        assert_eq!((b.lhs, b.rhs), (3, 2));
        assert!(b.pass && !b.equality && !b.two_boundary_chain);
    }

    #[test]
    fn disconnected_structures_are_rejected() {
        let s = IncidenceStructure {
            points: 2,
            components: vec![component(&[0], 1), component(&[1], 1)],
        };
        assert!(matches!(
            incidence_lower_bound(&s),
            Err(HierarchyError::DisconnectedIncidence)
        ));
    }

    #[test]
    fn incoherent_annotations_suppress_the_oriented_bound() {
        let mut c = component(&[0, 1], 2);
        c.index = 0; // non-flat with index 0
        let s = IncidenceStructure {
            points: 2,
            components: vec![c],
        };
        let b = incidence_lower_bound(&s).unwrap();
        assert!(b.oriented_pass.is_none());
    }

    #[test]
    fn oriented_bound_counts_flat_multi_components() {
        // flat two-point chain: lhs 1, oriented lhs (2*2-3+0)+1 = 2 = rhs
        let s = IncidenceStructure {
            points: 2,
            components: vec![IncidenceComponent {
                attached: vec![0, 1],
                disks: 2,
                flat: true,
                index: 0,
            }],
        };
        let b = incidence_lower_bound(&s).unwrap();
        assert_eq!(b.oriented_lhs, Some(2));
        assert_eq!(b.oriented_rhs, Some(2));
        assert_eq!(b.oriented_pass, Some(true));
        assert_eq!(b.oriented_flat_chain, Some(true));
    }

    #[test]
    fn smallest_cell_has_one_structure() {
        let outcome = enumerate_incidence_structures(1, 1, 1).unwrap();
        assert_eq!(outcome.structures, 1);
        assert_eq!(outcome.violations, 0);
        assert_eq!(outcome.mischaracterized_equalities, 0);
    }

    #[test]
    fn oversized_caps_are_refused() {
        assert!(matches!(
            enumerate_incidence_structures(6, 1, 1),
            Err(HierarchyError::CapsExceeded(6, 1, 1))
        ));
    }
}
