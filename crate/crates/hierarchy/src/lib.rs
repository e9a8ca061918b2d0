//! Rooted trees of compact surface pieces, the limit components attached at
//! their singular points, and the integer inequalities tying index to
//! topology across the whole tree.
//!
//! A [`DeltaNode`] records one compact piece: its Morse index, boundary
//! count, boundary spinning, Euler characteristic, genus, and orientability.
//! A non-minimal piece carries a [`LevelRecord`]: the singular points where
//! smaller pieces concentrate (each mapping to a child node), the limit
//! components that fill out the rest of the level, and the bipartite
//! attachment pattern between the two.

mod incidence;
mod random;

pub use incidence::{
    enumerate_incidence_structures, incidence_lower_bound, EnumerationOutcome, IncidenceBound,
    IncidenceComponent, IncidenceStructure,
};
pub use random::{random_hierarchy, GeneratorCaps};

use report::{Check, VerificationReport};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("correction variant requires an orientable root")]
    VariantNeedsOrientable,
    #[error("correction variant requires a non-orientable root")]
    VariantNeedsNonOrientable,
    #[error("multiplicity list is empty")]
    EmptyMultiplicities,
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("incidence structure is disconnected")]
    DisconnectedIncidence,
    #[error("malformed incidence structure: {0}")]
    MalformedIncidence(String),
    #[error("enumeration caps ({0}, {1}, {2}) exceed the supported (5, 5, 8)")]
    CapsExceeded(u32, u32, u32),
}

/// One limit component of a level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitComponent {
    pub flat: bool,
    pub orientable: bool,
    /// Number of distinct singular points of the level this component meets.
    pub attached_singular: u32,
    /// Number of boundary circles the component acquires at those points;
    /// several circles may sit over the same point.
    pub boundary_disks: u32,
    pub own_ends: u32,
    pub index: u32,
}

impl LimitComponent {
    /// Components meeting no singular point exist in the data model but are
    /// left out of every census.
    pub fn counted(&self) -> bool {
        self.attached_singular > 0
    }

    pub fn trivial(&self) -> bool {
        self.flat && self.attached_singular == 1
    }

    /// Non-orientable, one singular point, several boundary circles over it.
    /// Such a component must carry index at least 2.
    pub fn one_point_multi_disk(&self) -> bool {
        !self.orientable && self.attached_singular == 1 && self.boundary_disks > 1
    }
}

/// The data of one level: singular points (each owning a child piece), the
/// limit components, and which points each component meets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub singular_points: Vec<DeltaNode>,
    pub components: Vec<LimitComponent>,
    /// `attachments[i]` lists the singular-point indices met by
    /// `components[i]`, sorted and distinct; its length must equal that
    /// component's `attached_singular`.
    pub attachments: Vec<Vec<usize>>,
    /// Boundary count of the parent piece, repeated here for bookkeeping.
    pub level_ends: u32,
    /// Boundary spinning of the parent piece, repeated here for bookkeeping.
    pub level_spinning: u32,
}

impl LevelRecord {
    /// Total branching order the level surface must realize:
    /// child spinning minus child ends, summed over the children.
    pub fn branching_order(&self) -> i64 {
        self.singular_points
            .iter()
            .map(|c| i64::from(c.spinning) - i64::from(c.ends))
            .sum()
    }
}

/// One compact piece of the decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaNode {
    pub index: u32,
    pub ends: u32,
    pub spinning: u32,
    pub euler_char: i64,
    /// Genus of the surface when orientable; genus of the oriented double
    /// cover when not.
    pub genus: u32,
    pub orientable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<LevelRecord>,
}

impl DeltaNode {
    /// A piece with no level below it.
    pub fn minimal(&self) -> bool {
        self.level.is_none()
    }

    /// Euler characteristic implied by genus, ends, and orientability for a
    /// connected piece.
    pub fn expected_euler(&self) -> i64 {
        let g = i64::from(self.genus);
        let e = i64::from(self.ends);
        if self.orientable {
            2 - 2 * g - e
        } else {
            1 - g - e
        }
    }

    /// Minimal piece with two unit-spinning boundary curves.
    pub fn catenoid_piece() -> DeltaNode {
        DeltaNode {
            index: 1,
            ends: 2,
            spinning: 2,
            euler_char: 0,
            genus: 0,
            orientable: true,
            level: None,
        }
    }

    /// Minimal piece with one boundary curve of spinning three.
    pub fn enneper_piece() -> DeltaNode {
        DeltaNode {
            index: 1,
            ends: 1,
            spinning: 3,
            euler_char: 1,
            genus: 0,
            orientable: true,
            level: None,
        }
    }

    /// Number of non-minimal nodes in the subtree rooted here.
    pub fn subtree_levels(&self) -> u32 {
        match &self.level {
            None => 0,
            Some(level) => {
                1 + level
                    .singular_points
                    .iter()
                    .map(DeltaNode::subtree_levels)
                    .sum::<u32>()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub root: DeltaNode,
}

impl Hierarchy {
    pub fn new(root: DeltaNode) -> Hierarchy {
        Hierarchy { root }
    }

    pub fn trivial(&self) -> bool {
        self.root.minimal()
    }

    pub fn summary(&self) -> HierarchySummary {
        let mut s = HierarchySummary::default();
        accumulate(&self.root, &mut s);
        s
    }
}

/// Census of counted limit components over some scope (a level or a tree).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCensus {
    pub trivial: u32,
    /// Flat, meeting at least two singular points.
    pub nontrivial_flat: u32,
    /// Non-flat, meeting exactly one singular point.
    pub nonflat_one_point: u32,
    /// Non-flat, orientable, meeting at least two singular points.
    pub nonflat_multi_orientable: u32,
    /// Non-flat, non-orientable, meeting at least two singular points.
    pub nonflat_multi_nonorientable: u32,
    /// Non-orientable with one singular point but several circles over it.
    pub one_point_multi_disk_nonorientable: u32,
    pub unattached: u32,
}

impl ComponentCensus {
    pub fn add(&mut self, c: &LimitComponent) {
        if !c.counted() {
            self.unattached += 1;
            return;
        }
        if c.one_point_multi_disk() {
            self.one_point_multi_disk_nonorientable += 1;
        }
        if c.trivial() {
            self.trivial += 1;
        } else if c.flat {
            self.nontrivial_flat += 1;
        } else if c.attached_singular == 1 {
            self.nonflat_one_point += 1;
        } else if c.orientable {
            self.nonflat_multi_orientable += 1;
        } else {
            self.nonflat_multi_nonorientable += 1;
        }
    }

    pub fn of_level(level: &LevelRecord) -> ComponentCensus {
        let mut census = ComponentCensus::default();
        for c in &level.components {
            census.add(c);
        }
        census
    }

    fn absorb(&mut self, other: &ComponentCensus) {
        self.trivial += other.trivial;
        self.nontrivial_flat += other.nontrivial_flat;
        self.nonflat_one_point += other.nonflat_one_point;
        self.nonflat_multi_orientable += other.nonflat_multi_orientable;
        self.nonflat_multi_nonorientable += other.nonflat_multi_nonorientable;
        self.one_point_multi_disk_nonorientable += other.one_point_multi_disk_nonorientable;
        self.unattached += other.unattached;
    }

    /// Component contribution to the general correction term.
    pub fn correction_weight(&self) -> i64 {
        i64::from(self.nontrivial_flat)
            + 2 * i64::from(self.nonflat_one_point)
            + 3 * i64::from(self.nonflat_multi_orientable)
    }

    /// Component contribution to the orientable correction term.
    pub fn orientable_weight(&self) -> i64 {
        2 * i64::from(self.nonflat_one_point) + 3 * i64::from(self.nonflat_multi_orientable)
    }
}

/// Derived counts of a whole hierarchy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchySummary {
    pub nodes: u32,
    pub minimal_nodes: u32,
    pub nonminimal_nodes: u32,
    /// Equal to `nonminimal_nodes`: every non-minimal node owns one level.
    pub levels: u32,
    pub singular_points: u32,
    /// Levels whose singular set has exactly one point.
    pub unitary_levels: u32,
    /// Sum of (index - 1) over the minimal nodes.
    pub excess_index: u32,
    pub census: ComponentCensus,
}

fn accumulate(node: &DeltaNode, s: &mut HierarchySummary) {
    s.nodes += 1;
    match &node.level {
        None => {
            s.minimal_nodes += 1;
            s.excess_index += node.index.saturating_sub(1);
        }
        Some(level) => {
            s.nonminimal_nodes += 1;
            s.levels += 1;
            s.singular_points += level.singular_points.len() as u32;
            if level.singular_points.len() == 1 {
                s.unitary_levels += 1;
            }
            s.census.absorb(&ComponentCensus::of_level(level));
            for child in &level.singular_points {
                accumulate(child, s);
            }
        }
    }
}

pub fn excess_index(h: &Hierarchy) -> u32 {
    h.summary().excess_index
}

/// A broken structural rule, located by the path of singular-point indices
/// from the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub rule: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.rule)
    }
}

/// Checks every structural rule at every node; an empty list means the
/// hierarchy is admissible. Ownership makes cycles unrepresentable, so no
/// cycle detection is needed.
pub fn validate(h: &Hierarchy) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_node(&h.root, "root", &mut out);
    out
}

fn validate_node(node: &DeltaNode, path: &str, out: &mut Vec<Violation>) {
    let mut fail = |rule: &str| {
        out.push(Violation {
            path: path.to_owned(),
            rule: rule.to_owned(),
        })
    };
    if node.index == 0 {
        fail("index below 1");
    }
    if node.ends == 0 {
        fail("ends below 1");
    }
    if node.spinning < 2 {
        fail("spinning below 2");
    }
    if node.ends + node.spinning < 4 {
        fail("ends plus spinning below 4");
    }
    if node.minimal() && !node.orientable {
        if node.index < 2 {
            fail("non-orientable minimal piece needs index at least 2");
        }
        if node.spinning < 3 {
            fail("non-orientable minimal piece needs spinning at least 3");
        }
    }
    if node.euler_char != node.expected_euler() {
        fail("euler characteristic inconsistent with genus and ends");
    }
    if node.subtree_levels() + 1 > node.index {
        fail("index below level count plus 1");
    }

    let Some(level) = &node.level else {
        return;
    };

    if level.singular_points.is_empty() {
        fail("level has no singular points");
    }
    if level.components.is_empty() {
        fail("level has no components");
    }
    if level.level_ends != node.ends {
        fail("level ends differ from piece ends");
    }
    if level.level_spinning != node.spinning {
        fail("level spinning differs from piece spinning");
    }
    if level.branching_order() < 0 {
        fail("level branching order negative");
    }

    let child_and_component_index: u64 = level
        .singular_points
        .iter()
        .map(|c| u64::from(c.index))
        .sum::<u64>()
        + level.components.iter().map(|c| u64::from(c.index)).sum::<u64>();
    if u64::from(node.index) < child_and_component_index {
        fail("index below child and component index total");
    }

    if level.attachments.len() != level.components.len() {
        fail("attachment list count differs from component count");
    } else {
        let n_points = level.singular_points.len();
        let mut covered = vec![false; n_points];
        for (c, attached) in level.components.iter().zip(&level.attachments) {
            if attached.len() != c.attached_singular as usize {
                fail("attachment list length differs from attached count");
            }
            if !attached.windows(2).all(|w| w[0] < w[1]) {
                fail("attachment list not sorted and distinct");
            }
            for &q in attached {
                if q >= n_points {
                    fail("attachment refers to a missing singular point");
                } else {
                    covered[q] = true;
                }
            }
            if c.boundary_disks < c.attached_singular {
                fail("boundary circles fewer than attached points");
            }
            if c.flat && c.index != 0 {
                fail("flat component with positive index");
            }
            if !c.flat && c.orientable && c.index == 0 {
                fail("orientable non-flat component needs index at least 1");
            }
            if c.one_point_multi_disk() && c.index < 2 {
                fail("one-point multi-circle non-orientable component needs index at least 2");
            }
        }
        if covered.iter().any(|v| !v) {
            fail("singular point met by no component");
        }
        if !level_connected(level) {
            fail("level incidence disconnected");
        }
    }

    for (q, child) in level.singular_points.iter().enumerate() {
        let child_path = format!("{path}/q{q}");
        validate_node(child, &child_path, out);
    }
}

/// Connectivity of the bipartite graph on singular points and the components
/// attached to at least one of them. Unattached components are exempt.
fn level_connected(level: &LevelRecord) -> bool {
    let n_points = level.singular_points.len();
    let active: Vec<usize> = (0..level.components.len())
        .filter(|&i| !level.attachments[i].is_empty())
        .collect();
    if n_points == 0 {
        return true;
    }
    // vertices: points 0..n_points, then active components
    let n = n_points + active.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (slot, &ci) in active.iter().enumerate() {
        for &q in &level.attachments[ci] {
            if q < n_points {
                adj[q].push(n_points + slot);
                adj[n_points + slot].push(q);
            }
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

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrectionVariant {
    General,
    Orientable,
    NonOrientable,
}

fn general_correction(s: &HierarchySummary) -> i64 {
    3 * i64::from(s.excess_index) + i64::from(s.singular_points) - i64::from(s.levels)
        + s.census.correction_weight()
}

fn orientable_correction(s: &HierarchySummary) -> i64 {
    3 * i64::from(s.excess_index) + 2 * (i64::from(s.singular_points) - i64::from(s.levels))
        + s.census.orientable_weight()
}

fn nonorientable_correction(s: &HierarchySummary) -> i64 {
    general_correction(s) + 6 * i64::from(s.census.one_point_multi_disk_nonorientable)
}

/// Correction term of the index inequality. The orientable and
/// non-orientable variants demand a root of matching orientability.
pub fn correction_term(h: &Hierarchy, variant: CorrectionVariant) -> Result<i64, HierarchyError> {
    let s = h.summary();
    match variant {
        CorrectionVariant::General => Ok(general_correction(&s)),
        CorrectionVariant::Orientable => {
            if !h.root.orientable {
                return Err(HierarchyError::VariantNeedsOrientable);
            }
            Ok(orientable_correction(&s))
        }
        CorrectionVariant::NonOrientable => {
            if h.root.orientable {
                return Err(HierarchyError::VariantNeedsNonOrientable);
            }
            Ok(nonorientable_correction(&s))
        }
    }
}

fn validation_gate(h: &Hierarchy, r: &mut VerificationReport) -> bool {
    let violations = validate(h);
    let mut check = Check::at_most("validation", violations.len() as f64, 0.0);
    if let Some(first) = violations.first() {
        check = check.with_note(first.to_string());
    }
    let ok = check.passed;
    r.push(check);
    ok
}

/// Evaluates the index inequality in every variant the root admits, plus the
/// correction-term chains. An invalid hierarchy yields a single failed
/// validation check.
pub fn main_inequality(h: &Hierarchy) -> VerificationReport {
    let mut r = VerificationReport::new("index inequality");
    if !validation_gate(h, &mut r) {
        return r;
    }
    let s = h.summary();
    let root = &h.root;
    let six_i = 6 * i64::from(root.index);
    let base = -root.euler_char + 2 * i64::from(root.spinning) + i64::from(root.ends);
    let c = general_correction(&s);
    let excess3 = 3 * i64::from(s.excess_index);
    let points_minus_levels = i64::from(s.singular_points) - i64::from(s.levels);
    let two_o = 2 * i64::from(s.unitary_levels);

    r.push(Check::at_least("correction_nonnegative", c as f64, 0.0));
    r.push(Check::at_least(
        "index_bound_general",
        six_i as f64,
        (base + c) as f64,
    ));
    if h.trivial() {
        let identity = c - (3 * i64::from(root.index) - 3);
        r.push(Check::within_abs(
            "trivial_correction_identity",
            identity as f64,
            0.0,
        ));
    }
    if root.orientable {
        let cor = orientable_correction(&s);
        let mid = excess3 + 2 * points_minus_levels + two_o;
        r.push(Check::at_least(
            "index_bound_orientable",
            six_i as f64,
            (base + cor) as f64,
        ));
        r.push(Check::at_least(
            "orientable_chain_lower",
            cor as f64,
            mid as f64,
        ));
        r.push(Check::at_least(
            "orientable_chain_levels",
            mid as f64,
            2.0 * f64::from(s.levels),
        ));
    } else if !h.trivial() {
        let cno = nonorientable_correction(&s);
        let mid = excess3 + points_minus_levels + two_o;
        r.push(Check::at_least(
            "index_bound_nonorientable",
            six_i as f64,
            (base + cno) as f64,
        ));
        r.push(Check::at_least(
            "nonorientable_chain_lower",
            cno as f64,
            mid as f64,
        ));
        r.push(Check::at_least(
            "nonorientable_chain_levels",
            mid as f64,
            f64::from(s.levels),
        ));
    }
    r
}

struct LevelFloorData {
    path: String,
    excess3: i64,
    points: i64,
    unitary: bool,
    census: ComponentCensus,
}

fn collect_level_floors(node: &DeltaNode, path: &str, out: &mut Vec<LevelFloorData>) {
    let Some(level) = &node.level else {
        return;
    };
    let excess3: i64 = 3 * level
        .singular_points
        .iter()
        .filter(|c| c.minimal())
        .map(|c| i64::from(c.index) - 1)
        .sum::<i64>();
    out.push(LevelFloorData {
        path: path.to_owned(),
        excess3,
        points: level.singular_points.len() as i64,
        unitary: level.singular_points.len() == 1,
        census: ComponentCensus::of_level(level),
    });
    for (q, child) in level.singular_points.iter().enumerate() {
        collect_level_floors(child, &format!("{path}/q{q}"), out);
    }
}

/// Per-level floors for the correction term. A trivial hierarchy has no
/// levels and passes vacuously.
pub fn per_level_bounds(h: &Hierarchy) -> VerificationReport {
    let mut r = VerificationReport::new("per-level correction floors");
    if !validation_gate(h, &mut r) {
        return r;
    }
    let mut levels = Vec::new();
    collect_level_floors(&h.root, "root", &mut levels);
    for l in &levels {
        let two_o = if l.unitary { 2 } else { 0 };
        let cno = l.excess3 + (l.points - 1) + l.census.correction_weight()
            + 6 * i64::from(l.census.one_point_multi_disk_nonorientable);
        let mid = l.excess3 + (l.points - 1) + two_o;
        r.push(Check::at_least(
            format!("level_floor at {}", l.path),
            cno as f64,
            mid as f64,
        ));
        r.push(Check::at_least(
            format!("level_floor_positive at {}", l.path),
            mid as f64,
            1.0,
        ));
        if h.root.orientable {
            let cor = l.excess3 + 2 * (l.points - 1) + l.census.orientable_weight();
            let mid_or = l.excess3 + 2 * (l.points - 1) + two_o;
            r.push(Check::at_least(
                format!("level_floor_orientable at {}", l.path),
                cor as f64,
                mid_or as f64,
            ));
            r.push(Check::at_least(
                format!("level_floor_orientable_two at {}", l.path),
                mid_or as f64,
                2.0,
            ));
        }
    }
    r
}

/// Caps on genus, ends, and spinning of a single piece in terms of its index
/// and the number of levels below it.
pub fn delta_complexity_bounds(node: &DeltaNode) -> VerificationReport {
    let mut r = VerificationReport::new("piece complexity caps");
    let i = i64::from(node.index);
    let e = i64::from(node.ends);
    let s = i64::from(node.spinning);
    let g = i64::from(node.genus);
    let l = i64::from(node.subtree_levels());
    let trivial = l == 0;

    if i == 1 {
        r.push(Check::flag("index_one_trivial", trivial));
        r.push(Check::flag("index_one_orientable", node.orientable));
        r.push(Check::at_most("index_one_genus", g as f64, 0.0));
        let admitted = (e, s) == (2, 2) || (e, s) == (1, 3);
        r.push(
            Check::flag("index_one_ends_spinning", admitted)
                .with_note(format!("ends {e}, spinning {s}")),
        );
        return r;
    }

    if !node.orientable {
        r.push(Check::at_least("nonorientable_index_floor", i as f64, 2.0));
    }
    if trivial {
        if node.orientable {
            r.push(Check::at_most(
                "trivial_orientable_genus_cap",
                (2 * g) as f64,
                (3 * i - 3) as f64,
            ));
            r.push(Check::at_most(
                "trivial_orientable_ends_cap",
                (2 * e) as f64,
                (3 * i + 1) as f64,
            ));
            r.push(Check::at_most(
                "trivial_orientable_spinning_cap",
                (2 * s) as f64,
                (3 * i + 3) as f64,
            ));
        } else {
            r.push(Check::at_least(
                "trivial_nonorientable_spinning_floor",
                s as f64,
                3.0,
            ));
            r.push(Check::at_most(
                "trivial_nonorientable_genus_cap",
                g as f64,
                (3 * i - 4) as f64,
            ));
            r.push(Check::at_most(
                "trivial_nonorientable_ends_cap",
                (2 * e) as f64,
                (3 * i - 2) as f64,
            ));
            r.push(Check::at_most(
                "trivial_nonorientable_spinning_cap",
                (2 * s) as f64,
                (3 * i + 2) as f64,
            ));
        }
    } else {
        r.push(Check::at_least("nontrivial_spinning_floor", s as f64, 2.0));
        r.push(Check::at_least(
            "nontrivial_index_levels_floor",
            i as f64,
            (l + 1) as f64,
        ));
        if node.orientable {
            r.push(Check::at_most(
                "nontrivial_orientable_genus_cap",
                g as f64,
                (3 * i - l - 3) as f64,
            ));
            r.push(Check::at_most(
                "nontrivial_orientable_ends_cap",
                e as f64,
                (3 * i - l - 1) as f64,
            ));
            r.push(Check::at_most(
                "nontrivial_orientable_spinning_cap",
                s as f64,
                (3 * i - l) as f64,
            ));
        } else {
            r.push(Check::at_most(
                "nontrivial_nonorientable_genus_cap",
                g as f64,
                (6 * i - l - 7) as f64,
            ));
            r.push(Check::at_most(
                "nontrivial_nonorientable_ends_cap",
                (2 * e) as f64,
                (6 * i - l - 3) as f64,
            ));
            r.push(Check::at_most(
                "nontrivial_nonorientable_spinning_cap",
                (2 * s) as f64,
                (6 * i - l - 1) as f64,
            ));
        }
    }
    r.push(Check::at_most("global_spinning_cap", s as f64, (3 * i - 1) as f64));
    r.push(Check::at_most("global_ends_cap", e as f64, (3 * i - 2) as f64));
    let genus_cap = if node.orientable { 3 * i - 4 } else { 6 * i - 8 };
    r.push(Check::at_most("global_genus_cap", g as f64, genus_cap as f64));
    r
}

/// Spinning and branching order contributed by one group of boundary-curve
/// multiplicities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingContribution {
    pub spinning: u32,
    pub branching: u32,
}

pub fn branching_contribution(
    multiplicities: &[u32],
) -> Result<BranchingContribution, HierarchyError> {
    if multiplicities.is_empty() {
        return Err(HierarchyError::EmptyMultiplicities);
    }
    if multiplicities.contains(&0) {
        return Err(HierarchyError::ZeroMultiplicity);
    }
    let spinning: u32 = multiplicities.iter().sum();
    Ok(BranchingContribution {
        spinning,
        branching: spinning - multiplicities.len() as u32,
    })
}

/// One group of boundary multiplicities around a concentration point,
/// optionally with the index of the piece it bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchGroup {
    pub multiplicities: Vec<u32>,
    pub piece_index: Option<u32>,
}

/// Caps on group spinning and total branching across several groups, against
/// the ambient index budget.
pub fn branching_report(
    groups: &[BranchGroup],
    total_index: u32,
) -> Result<VerificationReport, HierarchyError> {
    if groups.is_empty() {
        return Err(HierarchyError::EmptyMultiplicities);
    }
    let mut r = VerificationReport::new("branching caps");
    let mut total_branching: i64 = 0;
    for (i, group) in groups.iter().enumerate() {
        let contrib = branching_contribution(&group.multiplicities)?;
        total_branching += i64::from(contrib.branching);
        if let Some(piece_index) = group.piece_index {
            r.push(Check::at_most(
                format!("group_spinning_cap at {i}"),
                f64::from(contrib.spinning),
                f64::from(3 * piece_index),
            ));
        }
    }
    let budget = 3 * i64::from(total_index);
    r.push(Check::at_most(
        "total_branching_cap",
        total_branching as f64,
        (budget - groups.len() as i64) as f64,
    ));
    r.push(Check::at_most(
        "stage_branching_cap",
        total_branching as f64,
        (budget - 1) as f64,
    ));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_point_hierarchy(child_index: u32, root_index: u32) -> Hierarchy {
        let child = DeltaNode {
            index: child_index,
            ends: 1,
            spinning: 3,
            euler_char: 1,
            genus: 0,
            orientable: true,
            level: None,
        };
        let root = DeltaNode {
            index: root_index,
            ends: 2,
            spinning: 2,
            euler_char: 0,
            genus: 0,
            orientable: true,
            level: Some(LevelRecord {
                singular_points: vec![child],
                components: vec![LimitComponent {
                    flat: false,
                    orientable: true,
                    attached_singular: 1,
                    boundary_disks: 1,
                    own_ends: 1,
                    index: 1,
                }],
                attachments: vec![vec![0]],
                level_ends: 2,
                level_spinning: 2,
            }),
        };
        Hierarchy::new(root)
    }

    #[test]
    fn trivial_pieces_validate_cleanly() {
        assert!(validate(&Hierarchy::new(DeltaNode::catenoid_piece())).is_empty());
        assert!(validate(&Hierarchy::new(DeltaNode::enneper_piece())).is_empty());
    }

    #[test]
    fn low_spinning_is_rejected() {
        let mut node = DeltaNode::catenoid_piece();
        node.spinning = 1;
        node.ends = 3;
        let violations = validate(&Hierarchy::new(node));
        assert!(violations.iter().any(|v| v.rule == "spinning below 2"));
        assert!(violations.iter().all(|v| v.path == "root"));
    }

    #[test]
    fn one_point_hierarchy_validates() {
        assert!(validate(&one_point_hierarchy(1, 2)).is_empty());
    }

    #[test]
    fn summary_counts_one_point_hierarchy() {
        let s = one_point_hierarchy(1, 2).summary();
        assert_eq!(s.nodes, 2);
        assert_eq!(s.minimal_nodes, 1);
        assert_eq!(s.levels, 1);
        assert_eq!(s.singular_points, 1);
        assert_eq!(s.unitary_levels, 1);
        assert_eq!(s.excess_index, 0);
        assert_eq!(s.census.nonflat_one_point, 1);
        assert_eq!(s.singular_points + 1, s.minimal_nodes + s.nonminimal_nodes);
    }

    #[test]
    fn excess_index_sums_minimal_surpluses() {
        let children: Vec<DeltaNode> = [2u32, 3]
            .iter()
            .map(|&i| DeltaNode {
                index: i,
                ..DeltaNode::catenoid_piece()
            })
            .collect();
        let root = DeltaNode {
            index: 7,
            ends: 2,
            spinning: 2,
            euler_char: 0,
            genus: 0,
            orientable: true,
            level: Some(LevelRecord {
                singular_points: children,
                components: vec![LimitComponent {
                    flat: false,
                    orientable: true,
                    attached_singular: 2,
                    boundary_disks: 2,
                    own_ends: 2,
                    index: 1,
                }],
                attachments: vec![vec![0, 1]],
                level_ends: 2,
                level_spinning: 2,
            }),
        };
        let h = Hierarchy::new(root);
        assert!(validate(&h).is_empty());
        assert_eq!(excess_index(&h), 3);
    }

    #[test]
    fn correction_variant_requires_matching_root() {
        let h = one_point_hierarchy(1, 2);
        assert!(correction_term(&h, CorrectionVariant::Orientable).is_ok());
        assert!(matches!(
            correction_term(&h, CorrectionVariant::NonOrientable),
            Err(HierarchyError::VariantNeedsNonOrientable)
        ));
    }

    #[test]
    fn invalid_hierarchy_stops_at_validation() {
        // index 1 with one level violates the level-count floor
        let h = one_point_hierarchy(1, 1);
        let r = main_inequality(&h);
        assert!(!r.pass());
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.checks[0].rule, "validation");
    }

    #[test]
    fn per_level_bounds_trivial_is_empty_pass() {
        let r = per_level_bounds(&Hierarchy::new(DeltaNode::catenoid_piece()));
        assert!(r.pass());
        assert_eq!(r.checks.len(), 1);
    }

    #[test]
    fn branching_contribution_basics() {
        assert_eq!(
            branching_contribution(&[3]).unwrap(),
            BranchingContribution {
                spinning: 3,
                branching: 2
            }
        );
        assert_eq!(
            branching_contribution(&[1, 1]).unwrap(),
            BranchingContribution {
                spinning: 2,
                branching: 0
            }
        );
        assert!(matches!(
            branching_contribution(&[]),
            Err(HierarchyError::EmptyMultiplicities)
        ));
        assert!(matches!(
            branching_contribution(&[2, 0]),
            Err(HierarchyError::ZeroMultiplicity)
        ));
    }

    #[test]
    fn branching_report_checks_caps() {
        let groups = vec![BranchGroup {
            multiplicities: vec![2, 2, 1],
            piece_index: Some(2),
        }];
        let r = branching_report(&groups, 2).unwrap();
        assert!(r.pass());
        let cap = r.find("group_spinning_cap at 0").unwrap();
        assert_eq!(cap.observed, 5.0);
        assert_eq!(cap.bound, 6.0);
        // total branching 2 against budget 6: caps 5 and 5
        assert_eq!(r.slack("total_branching_cap"), Some(3.0));
    }

    #[test]
    fn hierarchy_json_round_trip() {
        let h = one_point_hierarchy(1, 2);
        let text = serde_json::to_string(&h).unwrap();
        let back: Hierarchy = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }
}
