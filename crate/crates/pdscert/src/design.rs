//! Incidence structures built from the subgroup lattice: the 13-point
//! plane, point/block weights induced by a candidate set, and exhaustive
//! search over weight assignments.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::group::{GroupError, GroupSpec, Subgroup};
use crate::pds::CandidateSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("unsupported group {group}: {reason}")]
    UnsupportedGroup { group: String, reason: String },
    #[error("design axiom violated: {0}")]
    AxiomViolation(String),
    #[error("set belongs to {set_group}, the structure was built over {plane_group}")]
    GroupMismatch {
        set_group: String,
        plane_group: String,
    },
    #[error(
        "point {point} meets the set in {count} elements outside the order-2 part; \
         an odd count means the set is not closed under coprime powers"
    )]
    OddPointIntersection { point: usize, count: usize },
    #[error("weight list has {found} entries, the structure has {expected} points")]
    WrongWeightCount { expected: usize, found: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A point/block incidence structure whose points and blocks are subgroups,
/// with containment as incidence. For the order-216 group this is the
/// 2-(13,4,1) design on the products of the rank-1 and rank-2 subgroups of
/// the Sylow-3 part with the Sylow-2 part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceStructure {
    group: GroupSpec,
    points: Vec<Subgroup>,
    blocks: Vec<Subgroup>,
    /// `incidence[i][j]` is true when point `i` lies in block `j`.
    incidence: Vec<Vec<bool>>,
    /// The Sylow-2 part shared by every point and block.
    sylow2: Subgroup,
}

/// Counts verified by [`IncidenceStructure::check_design_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignSummary {
    pub points: usize,
    pub blocks: usize,
    pub block_size: usize,
    pub point_degree: usize,
    pub pair_coverage: usize,
}

/// Builds the plane on the rank-1 and rank-2 subgroups of the Sylow-3 part
/// (elementary of rank 3), each multiplied by the Sylow-2 part. Point and
/// block lists are in canonical subgroup order; all design axioms are
/// verified before returning.
pub fn build_plane(group: &GroupSpec) -> Result<IncidenceStructure, DesignError> {
    let unsupported = |reason: String| DesignError::UnsupportedGroup {
        group: group.to_string(),
        reason,
    };
    let rank1 = group
        .elementary_subgroups(3, 1)
        .map_err(|_| unsupported("the Sylow-3 part must be elementary Abelian".to_string()))?;
    if rank1.len() != 13 {
        return Err(unsupported(format!(
            "the Sylow-3 part must have rank 3 (found {} rank-1 subgroups, need 13)",
            rank1.len()
        )));
    }
    let rank2 = group
        .elementary_subgroups(3, 2)
        .expect("elementary structure was checked above");
    let sylow2 = if group.order().is_multiple_of(2) {
        group.sylow_subgroup(2)?
    } else {
        group.trivial_subgroup()
    };
    let points = rank1
        .iter()
        .map(|p| group.subgroup_product(p, &sylow2))
        .collect::<Result<Vec<_>, _>>()?;
    let blocks = rank2
        .iter()
        .map(|l| group.subgroup_product(l, &sylow2))
        .collect::<Result<Vec<_>, _>>()?;
    let incidence = points
        .iter()
        .map(|p| blocks.iter().map(|b| p.is_subset_of(b)).collect())
        .collect();
    let plane = IncidenceStructure {
        group: group.clone(),
        points,
        blocks,
        incidence,
        sylow2,
    };
    plane.check_design_axioms()?;
    Ok(plane)
}

impl IncidenceStructure {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn points(&self) -> &[Subgroup] {
        &self.points
    }

    pub fn blocks(&self) -> &[Subgroup] {
        &self.blocks
    }

    pub fn sylow2(&self) -> &Subgroup {
        &self.sylow2
    }

    pub fn incident(&self, point: usize, block: usize) -> bool {
        self.incidence[point][block]
    }

    pub fn incidence_matrix(&self) -> &[Vec<bool>] {
        &self.incidence
    }

    pub fn points_on(&self, block: usize) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| self.incidence[i][block])
            .collect()
    }

    pub fn blocks_through(&self, point: usize) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&j| self.incidence[point][j])
            .collect()
    }

    /// Verifies the 2-design axioms: 13 points and blocks, constant block
    /// size and point degree 4, and every point pair on exactly one block.
    pub fn check_design_axioms(&self) -> Result<DesignSummary, DesignError> {
        let n_points = self.points.len();
        let n_blocks = self.blocks.len();
        let mut block_sizes: BTreeSet<usize> =
            (0..n_blocks).map(|j| self.points_on(j).len()).collect();
        let block_size = match (block_sizes.len(), block_sizes.pop_first()) {
            (1, Some(s)) => s,
            _ => {
                return Err(DesignError::AxiomViolation(
                    "blocks have unequal sizes".to_string(),
                ))
            }
        };
        let mut degrees: BTreeSet<usize> = (0..n_points)
            .map(|i| self.blocks_through(i).len())
            .collect();
        let point_degree = match (degrees.len(), degrees.pop_first()) {
            (1, Some(d)) => d,
            _ => {
                return Err(DesignError::AxiomViolation(
                    "points have unequal degrees".to_string(),
                ))
            }
        };
        let mut coverages = BTreeSet::new();
        for i in 0..n_points {
            for j in i + 1..n_points {
                let common = (0..n_blocks)
                    .filter(|&b| self.incidence[i][b] && self.incidence[j][b])
                    .count();
                coverages.insert(common);
            }
        }
        let pair_coverage = match (coverages.len(), coverages.pop_first()) {
            (1, Some(c)) => c,
            _ => {
                return Err(DesignError::AxiomViolation(
                    "point pairs are covered unevenly".to_string(),
                ))
            }
        };
        if n_points != 13
            || n_blocks != 13
            || block_size != 4
            || point_degree != 4
            || pair_coverage != 1
        {
            return Err(DesignError::AxiomViolation(format!(
                "expected a 2-(13,4,1) design, found {n_points} points, {n_blocks} blocks, \
                 block size {block_size}, degree {point_degree}, coverage {pair_coverage}"
            )));
        }
        Ok(DesignSummary {
            points: n_points,
            blocks: n_blocks,
            block_size,
            point_degree,
            pair_coverage,
        })
    }

    /// Adjacency-list export: one block per line, listing its incident
    /// point indices (0-based) in increasing order.
    pub fn export_blocks(&self) -> String {
        let mut out = String::new();
        for j in 0..self.blocks.len() {
            let indices: Vec<String> = self.points_on(j).iter().map(usize::to_string).collect();
            out.push_str(&indices.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Nonnegative point weights with the derived block weights (sum of
/// incident point weights).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment {
    point_weights: Vec<u64>,
    block_weights: Vec<u64>,
}

impl WeightAssignment {
    pub fn new(plane: &IncidenceStructure, point_weights: Vec<u64>) -> Result<Self, DesignError> {
        if point_weights.len() != plane.points.len() {
            return Err(DesignError::WrongWeightCount {
                expected: plane.points.len(),
                found: point_weights.len(),
            });
        }
        let block_weights = (0..plane.blocks.len())
            .map(|j| plane.points_on(j).iter().map(|&i| point_weights[i]).sum())
            .collect();
        Ok(WeightAssignment {
            point_weights,
            block_weights,
        })
    }

    pub fn point_weights(&self) -> &[u64] {
        &self.point_weights
    }

    pub fn block_weights(&self) -> &[u64] {
        &self.block_weights
    }

    pub fn total(&self) -> u64 {
        self.point_weights.iter().sum()
    }
}

/// Derives point weights from a candidate set: half the number of elements
/// of `D` inside the point subgroup but outside the shared order-2 part.
/// An odd count is an integrity failure (the set is not closed under
/// coprime powers).
pub fn point_weights(
    d: &CandidateSet,
    plane: &IncidenceStructure,
) -> Result<WeightAssignment, DesignError> {
    if d.group() != &plane.group {
        return Err(DesignError::GroupMismatch {
            set_group: d.group().to_string(),
            plane_group: plane.group.to_string(),
        });
    }
    let mut weights = Vec::with_capacity(plane.points.len());
    for (i, point) in plane.points.iter().enumerate() {
        let count = d
            .elements()
            .iter()
            .filter(|x| point.contains(x) && !plane.sylow2.contains(x))
            .count();
        if count % 2 != 0 {
            return Err(DesignError::OddPointIntersection { point: i, count });
        }
        weights.push((count / 2) as u64);
    }
    WeightAssignment::new(plane, weights)
}

/// Structural identity relating the total weight to the weights of the
/// blocks through any one point. Holds in every 2-(13,4,1) design for every
/// assignment, so a `false` here signals a corrupted structure.
pub fn parity_identity_check(assignment: &WeightAssignment, plane: &IncidenceStructure) -> bool {
    let total = assignment.total();
    (0..plane.points.len()).all(|i| {
        let c_i = assignment.point_weights[i];
        let around: u64 = plane
            .blocks_through(i)
            .iter()
            .map(|&j| assignment.block_weights[j] - c_i)
            .sum();
        total == c_i + around
    })
}

/// Exhaustive search over all distinct placements of a weight multiset on
/// the plane points such that every block weight lands in `allowed`.
///
/// The output lists each qualifying weight vector exactly once, in
/// lexicographically descending order. An empty result is a certificate
/// that no placement works. With `prune_automorphisms` set (and the
/// structure verified point-transitive) the largest weight is pinned to
/// point 0; that restriction preserves emptiness but returns only orbit
/// representatives otherwise.
pub fn weight_assignment_search(
    plane: &IncidenceStructure,
    multiset: &[u64],
    allowed: &BTreeSet<u64>,
    prune_automorphisms: bool,
) -> Result<Vec<WeightAssignment>, DesignError> {
    let n_points = plane.points.len();
    if multiset.len() != n_points {
        return Err(DesignError::WrongWeightCount {
            expected: n_points,
            found: multiset.len(),
        });
    }
    let mut values: Vec<u64> = multiset.to_vec();
    values.sort_unstable_by(|a, b| b.cmp(a));
    let mut distinct: Vec<(u64, usize)> = Vec::new();
    for &v in &values {
        match distinct.last_mut() {
            Some((value, count)) if *value == v => *count += 1,
            _ => distinct.push((v, 1)),
        }
    }

    let pin_first_point = prune_automorphisms && distinct.len() > 1 && is_point_transitive(plane);

    let blocks_through: Vec<Vec<usize>> = (0..n_points).map(|i| plane.blocks_through(i)).collect();
    let block_sizes: Vec<usize> = (0..plane.blocks.len())
        .map(|j| plane.points_on(j).len())
        .collect();
    let min_value = *values.last().unwrap_or(&0);
    let max_value = *values.first().unwrap_or(&0);

    let mut state = AssignmentSearch {
        blocks_through,
        partial: vec![0u64; plane.blocks.len()],
        open_slots: block_sizes,
        assigned: Vec::with_capacity(n_points),
        distinct,
        allowed,
        min_value,
        max_value,
        min_allowed: allowed.first().copied(),
        max_allowed: allowed.last().copied(),
        n_points,
        pin_first_point,
        found: Vec::new(),
    };
    state.recurse(0);
    state
        .found
        .into_iter()
        .map(|weights| WeightAssignment::new(plane, weights))
        .collect()
}

struct AssignmentSearch<'a> {
    blocks_through: Vec<Vec<usize>>,
    partial: Vec<u64>,
    open_slots: Vec<usize>,
    assigned: Vec<u64>,
    distinct: Vec<(u64, usize)>,
    allowed: &'a BTreeSet<u64>,
    min_value: u64,
    max_value: u64,
    min_allowed: Option<u64>,
    max_allowed: Option<u64>,
    n_points: usize,
    pin_first_point: bool,
    found: Vec<Vec<u64>>,
}

impl AssignmentSearch<'_> {
    fn recurse(&mut self, point: usize) {
        if point == self.n_points {
            self.found.push(self.assigned.clone());
            return;
        }
        for vi in 0..self.distinct.len() {
            if self.distinct[vi].1 == 0 {
                continue;
            }
            if point == 0 && self.pin_first_point && vi > 0 {
                break;
            }
            let value = self.distinct[vi].0;
            if self.place(point, value) {
                self.distinct[vi].1 -= 1;
                self.assigned.push(value);
                self.recurse(point + 1);
                self.assigned.pop();
                self.distinct[vi].1 += 1;
            }
            self.unplace(point, value);
        }
    }

    /// Applies the placement to every block through the point and reports
    /// whether all touched blocks stay satisfiable. Effects are applied
    /// even on failure; the caller always unwinds with `unplace`.
    fn place(&mut self, point: usize, value: u64) -> bool {
        let mut viable = true;
        for bi in 0..self.blocks_through[point].len() {
            let j = self.blocks_through[point][bi];
            self.partial[j] += value;
            self.open_slots[j] -= 1;
            let slots = self.open_slots[j] as u64;
            if slots == 0 {
                if !self.allowed.contains(&self.partial[j]) {
                    viable = false;
                }
            } else {
                match (self.min_allowed, self.max_allowed) {
                    (Some(lo), Some(hi)) => {
                        if self.partial[j] + slots * self.min_value > hi
                            || self.partial[j] + slots * self.max_value < lo
                        {
                            viable = false;
                        }
                    }
                    _ => viable = false, // empty allowed set: no block can close
                }
            }
        }
        viable
    }

    fn unplace(&mut self, point: usize, value: u64) {
        for &j in &self.blocks_through[point] {
            self.partial[j] -= value;
            self.open_slots[j] += 1;
        }
    }
}

/// Incidence-preserving bijection between two point/block structures given
/// as point-row boolean matrices. Returns the point and block images, or
/// `None` when the structures are not isomorphic. Exhaustive backtracking
/// with degree and common-block-count pruning; sized for structures of a
/// couple dozen points.
pub fn incidence_isomorphism(a: &[Vec<bool>], b: &[Vec<bool>]) -> Option<(Vec<usize>, Vec<usize>)> {
    isomorphism_with_seed(a, b, None)
}

fn isomorphism_with_seed(
    a: &[Vec<bool>],
    b: &[Vec<bool>],
    seed: Option<(usize, usize)>,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = a.len();
    if n != b.len() || n == 0 {
        return None;
    }
    let width = a[0].len();
    if a.iter().any(|row| row.len() != width) || b.iter().any(|row| row.len() != width) {
        return None;
    }
    let degree = |m: &[Vec<bool>], i: usize| m[i].iter().filter(|&&x| x).count();
    let deg_a: Vec<usize> = (0..n).map(|i| degree(a, i)).collect();
    let deg_b: Vec<usize> = (0..n).map(|i| degree(b, i)).collect();
    {
        let mut sa = deg_a.clone();
        let mut sb = deg_b.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
    }
    let common = |m: &[Vec<bool>], i: usize, j: usize| (0..width).filter(|&c| m[i][c] && m[j][c]).count();
    let common_a: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| common(a, i, j)).collect())
        .collect();
    let common_b: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| common(b, i, j)).collect())
        .collect();

    let ctx = IsoContext {
        n,
        width,
        a,
        b,
        deg_a: &deg_a,
        deg_b: &deg_b,
        common_a: &common_a,
        common_b: &common_b,
        seed,
    };
    let mut state = IsoState {
        perm: Vec::with_capacity(n),
        used: vec![false; n],
        block_map: vec![None; width],
        block_taken: vec![false; width],
    };
    let block_map = ctx.backtrack(0, &mut state)?;
    Some((state.perm, block_map))
}

struct IsoContext<'a> {
    n: usize,
    width: usize,
    a: &'a [Vec<bool>],
    b: &'a [Vec<bool>],
    deg_a: &'a [usize],
    deg_b: &'a [usize],
    common_a: &'a [Vec<usize>],
    common_b: &'a [Vec<usize>],
    seed: Option<(usize, usize)>,
}

struct IsoState {
    perm: Vec<usize>,
    used: Vec<bool>,
    /// Partial column mapping forced so far by the mapped points.
    block_map: Vec<Option<usize>>,
    block_taken: Vec<bool>,
}

impl IsoContext<'_> {
    fn backtrack(&self, level: usize, state: &mut IsoState) -> Option<Vec<usize>> {
        if level == self.n {
            return self.match_blocks(&state.perm);
        }
        for image in 0..self.n {
            if state.used[image] || self.deg_a[level] != self.deg_b[image] {
                continue;
            }
            if let Some((from, to)) = self.seed {
                if level == from && image != to {
                    continue;
                }
            }
            if (0..level).any(|j| self.common_a[level][j] != self.common_b[image][state.perm[j]]) {
                continue;
            }
            state.perm.push(image);
            state.used[image] = true;
            if let Some(forced) = self.propagate_blocks(level, image, state) {
                if let Some(block_map) = self.backtrack(level + 1, state) {
                    return Some(block_map);
                }
                for c in forced {
                    let d = state.block_map[c].take().expect("forced above");
                    state.block_taken[d] = false;
                }
            }
            state.used[image] = false;
            state.perm.pop();
        }
        None
    }

    /// Extends the partial column mapping with every image forced by the
    /// new point: a column whose mapped incident points pin down a unique
    /// compatible column on the other side. Returns the newly forced
    /// columns for undo, or `None` on contradiction (with the state already
    /// unwound).
    fn propagate_blocks(&self, level: usize, image: usize, state: &mut IsoState) -> Option<Vec<usize>> {
        let mut forced = Vec::new();
        let fail = |state: &mut IsoState, forced: Vec<usize>| {
            for c in forced {
                let d = state.block_map[c].take().expect("forced in this call");
                state.block_taken[d] = false;
            }
            None
        };
        for c in 0..self.width {
            if !self.a[level][c] {
                continue;
            }
            if let Some(d) = state.block_map[c] {
                // already mapped: the image column must pass through the image point
                if !self.b[image][d] {
                    return fail(state, forced);
                }
                continue;
            }
            let mapped_points: Vec<usize> = (0..=level).filter(|&i| self.a[i][c]).collect();
            if mapped_points.len() < 2 {
                continue;
            }
            let mut candidates = (0..self.width).filter(|&d| {
                !state.block_taken[d] && mapped_points.iter().all(|&i| self.b[state.perm[i]][d])
            });
            match (candidates.next(), candidates.next()) {
                (None, _) => return fail(state, forced),
                (Some(d), None) => {
                    state.block_map[c] = Some(d);
                    state.block_taken[d] = true;
                    forced.push(c);
                }
                // ambiguous: leave it to deeper levels or the leaf check
                (Some(_), Some(_)) => {}
            }
        }
        Some(forced)
    }

    /// Given a complete point map, matches every column of `a` to the
    /// unique unused column of `b` with the same mapped incident point set.
    fn match_blocks(&self, perm: &[usize]) -> Option<Vec<usize>> {
        let mut block_map = Vec::with_capacity(self.width);
        let mut taken = vec![false; self.width];
        for c in 0..self.width {
            let matches = |d: &usize| {
                !taken[*d]
                    && perm
                        .iter()
                        .enumerate()
                        .all(|(i, &pi)| self.a[i][c] == self.b[pi][*d])
            };
            let d = (0..self.width).find(matches)?;
            taken[d] = true;
            block_map.push(d);
        }
        Some(block_map)
    }
}

/// True when for every point there is an automorphism moving point 0 to it.
fn is_point_transitive(plane: &IncidenceStructure) -> bool {
    let m = plane.incidence_matrix();
    (1..plane.points.len()).all(|t| isomorphism_with_seed(m, m, Some((0, t))).is_some())
}
