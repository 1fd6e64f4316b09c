//! Staged nonexistence certificates for partial difference sets, covering
//! the (216,40,4,8) and (216,43,10,8) parameter sets end to end.
//!
//! A certificate is an ordered list of stages, each recording its inputs,
//! outputs, and verdict; the overall verdict is NONEXISTENT only when every
//! case branch closes with an empty exhaustive weight search (parity
//! exclusions are recorded but always double-checked by the search). The
//! pipeline can only close cases; when a precondition fails the result is
//! INCONCLUSIVE, never an existence claim.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::design::{build_plane, weight_assignment_search, IncidenceStructure};
use crate::diophantine::{enumerate_solutions, CSystem, DiophantineError};
use crate::group::GroupSpec;
use crate::pds::{ma_exclusion, ma_subgroup_intersection, MaExclusionReport, PdsParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("integrity failure at stage {stage}: {message}")]
    Integrity { stage: String, message: String },
}

fn integrity(stage: &str, message: String) -> CertError {
    CertError::Integrity {
        stage: stage.to_string(),
        message,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "NONEXISTENT")]
    Nonexistent,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Worker threads for the per-multiset weight searches. The certificate
    /// is byte-identical for any value.
    pub jobs: usize,
    /// Forwarded to the weight-assignment search; emptiness results are
    /// unaffected.
    pub prune_automorphisms: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            jobs: 1,
            prune_automorphisms: false,
        }
    }
}

/// One pipeline stage: what ran, on what, what came out, and how it ended.
#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: String,
    pub inputs: Value,
    pub outputs: Value,
    pub verdict: String,
}

/// Outcome of one enumerated weight multiset within a case branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultisetCase {
    pub multiset: Vec<u64>,
    /// True when the multiset contains an odd value while every allowed
    /// block weight is even.
    pub parity_excluded: bool,
    pub odd_value: Option<u64>,
    pub assignments_found: usize,
    pub excluded: bool,
}

/// One case branch: a fixed number of order-2 elements in the set, the
/// induced Diophantine targets, the admissible block weights, and the
/// search outcome for every solution multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseBranch {
    pub order2_count: u64,
    pub sum_c: u64,
    pub sum_c_squares: u64,
    pub m_options: BTreeSet<u64>,
    pub allowed_block_weights: BTreeSet<u64>,
    pub multisets: Vec<Vec<u64>>,
    pub cases: Vec<MultisetCase>,
    pub closed: bool,
}

#[derive(Debug, Clone, Serialize)]
struct ParamsRecord {
    v: u64,
    k: u64,
    lambda: u64,
    mu: u64,
    beta: i64,
    delta: u64,
}

/// The full evidence trail. Serializes with fixed field order (`params`,
/// `group`, `stages`, `overall`) and canonical array orders, so two runs
/// produce byte-identical documents.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    params: ParamsRecord,
    group: Option<String>,
    stages: Vec<Stage>,
    overall: Verdict,
    #[serde(skip)]
    branches: Vec<CaseBranch>,
}

impl Certificate {
    pub fn overall(&self) -> Verdict {
        self.overall
    }

    pub fn group(&self) -> Option<&str> {
        self.group.as_deref()
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// Typed view of the case branches (empty when the pipeline stopped
    /// before branching).
    pub fn branches(&self) -> &[CaseBranch] {
        &self.branches
    }

    pub fn delta(&self) -> u64 {
        self.params.delta
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("certificate serializes");
        out.push('\n');
        out
    }
}

/// All Abelian groups of a given order, one per isomorphism type, in a
/// deterministic order (primes ascending, factor partitions largest-first).
pub fn abelian_groups_of_order(v: u64) -> Vec<GroupSpec> {
    let primes = crate::group::factorize(v);
    let mut shapes: Vec<Vec<u64>> = vec![Vec::new()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for partition in partitions(e) {
            for shape in &shapes {
                let mut extended = shape.clone();
                extended.extend(partition.iter().map(|&part| p.pow(part)));
                next.push(extended);
            }
        }
        shapes = next;
    }
    shapes
        .into_iter()
        .map(|factors| GroupSpec::new(&factors).expect("prime-power factors are valid"))
        .collect()
}

/// Partitions of `n` into positive parts, largest part first, in
/// lexicographically descending order.
fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            acc.push(part);
            rec(n - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Runs the exclusion criteria over every Abelian group of order `v` and
/// demands a unique survivor; anything else is a pipeline integrity error.
pub fn group_identification(v: u64) -> Result<GroupSpec, CertError> {
    let (reports, survivors) = identify_groups(v);
    match survivors.as_slice() {
        [one] => Ok(one.clone()),
        _ => Err(integrity(
            "group_identification",
            format!(
                "expected exactly one surviving group of order {v}, found {} of {} types",
                survivors.len(),
                reports.len()
            ),
        )),
    }
}

fn identify_groups(v: u64) -> (Vec<(GroupSpec, MaExclusionReport)>, Vec<GroupSpec>) {
    let reports: Vec<(GroupSpec, MaExclusionReport)> = abelian_groups_of_order(v)
        .into_iter()
        .map(|g| {
            let report = ma_exclusion(&g);
            (g, report)
        })
        .collect();
    let survivors = reports
        .iter()
        .filter(|(_, r)| !r.excluded())
        .map(|(g, _)| g.clone())
        .collect();
    (reports, survivors)
}

/// Diophantine targets for a branch with `n2` order-2 elements in the set:
/// the paired fiber values must sum to `(k - n2)/2`, and the involution
/// difference count pins their sum of squares. `involutions` is the number
/// of order-2 elements of the group.
pub fn c_system_targets(
    params: &PdsParams,
    n2: u64,
    involutions: u64,
) -> Result<(u64, u64), CertError> {
    let stage = "case_branch";
    if n2 > involutions {
        return Err(integrity(
            stage,
            format!("n2 = {n2} exceeds the {involutions} involutions of the group"),
        ));
    }
    let k = params.k();
    if n2 > k || !(k - n2).is_multiple_of(2) {
        return Err(integrity(
            stage,
            format!("k - n2 = {} is not an even nonnegative integer", k as i64 - n2 as i64),
        ));
    }
    let sum_c = (k - n2) / 2;
    // ordered pairs of distinct set elements whose difference has order 2:
    // lambda per order-2 element inside the set, mu per one outside,
    // minus the pairs of distinct order-2 set elements themselves
    let pair_count = params.lambda() as i64 * n2 as i64
        + params.mu() as i64 * (involutions - n2) as i64
        - (n2 * n2.saturating_sub(1)) as i64;
    if pair_count < 0 || pair_count % 2 != 0 {
        return Err(integrity(
            stage,
            format!("involution difference count {pair_count} is not an even nonnegative integer"),
        ));
    }
    let sum_c_squares = pair_count as u64 / 2 + sum_c;
    Ok((sum_c, sum_c_squares))
}

/// All integer contents `m` a block subgroup of the given order can have:
/// solutions of `2m(m-1) + (k-m)(k-m-2) = 2*lambda*m + 2*mu*(h-1-m)` with
/// `0 <= m <= min(k, h-1)`, where `h` is the block subgroup order.
pub fn line_content_options(params: &PdsParams, block_order: u64) -> BTreeSet<u64> {
    let k = params.k() as i128;
    let lambda = params.lambda() as i128;
    let mu = params.mu() as i128;
    let h = block_order as i128;
    (0..=params.k().min(block_order - 1))
        .filter(|&m| {
            let m = m as i128;
            let lhs = 2 * m * (m - 1) + (k - m) * (k - m - 2);
            let rhs = 2 * lambda * m + 2 * mu * (h - 1 - m);
            lhs == rhs
        })
        .collect()
}

/// Block weights induced by the content options: `(m - n2)/2` for each
/// admissible `m`. Order or parity violations are integrity errors.
pub fn allowed_line_weights(
    m_options: &BTreeSet<u64>,
    n2: u64,
) -> Result<BTreeSet<u64>, CertError> {
    m_options
        .iter()
        .map(|&m| {
            if m < n2 || !(m - n2).is_multiple_of(2) {
                Err(integrity(
                    "case_branch",
                    format!("line content m = {m} is incompatible with n2 = {n2}"),
                ))
            } else {
                Ok((m - n2) / 2)
            }
        })
        .collect()
}

/// Runs the staged pipeline and assembles the certificate. Integrity
/// errors (internal contradictions) abort; unmet preconditions end the
/// trail early with an INCONCLUSIVE verdict.
pub fn certify(params: &PdsParams, options: &CertifyOptions) -> Result<Certificate, CertError> {
    let params_record = ParamsRecord {
        v: params.v(),
        k: params.k(),
        lambda: params.lambda(),
        mu: params.mu(),
        beta: params.beta(),
        delta: params.delta(),
    };
    let mut cert = Certificate {
        params: params_record,
        group: None,
        stages: Vec::new(),
        overall: Verdict::Inconclusive,
        branches: Vec::new(),
    };

    // discriminant
    let sqrt_delta = params.sqrt_delta();
    let stage_inputs = json!({
        "v": params.v(), "k": params.k(), "lambda": params.lambda(), "mu": params.mu(),
    });
    let outputs = json!({
        "beta": params.beta(),
        "delta": params.delta(),
        "sqrt_delta": sqrt_delta,
        "perfect_square": sqrt_delta.is_some(),
    });
    let verdict = match sqrt_delta {
        Some(_) => "pass".to_string(),
        None => format!(
            "inapplicable: delta = {} is not a perfect square",
            params.delta()
        ),
    };
    let applicable = sqrt_delta.is_some();
    cert.stages.push(Stage {
        name: "discriminant".to_string(),
        inputs: stage_inputs,
        outputs,
        verdict,
    });
    if !applicable {
        return Ok(cert);
    }

    // group identification with the triviality screen
    let (reports, survivors) = identify_groups(params.v());
    let k_plus_1_divides = params.v().is_multiple_of(params.k() + 1);
    let complement_divides = params.v().is_multiple_of(params.v() - params.k());
    let candidates: Vec<Value> = reports
        .iter()
        .map(|(g, r)| json!({ "group": g.to_string(), "verdict": r.describe() }))
        .collect();
    let survivor_names: Vec<String> = survivors.iter().map(|g| g.to_string()).collect();
    let outputs = json!({
        "abelian_types": candidates,
        "survivors": survivor_names,
        "trivial_screen": {
            "k_plus_1_divides_v": k_plus_1_divides,
            "v_minus_k_divides_v": complement_divides,
        },
    });
    let verdict = if survivors.len() != 1 {
        format!("inapplicable: {} surviving group types", survivors.len())
    } else if k_plus_1_divides || complement_divides {
        "inapplicable: a trivial set is not ruled out by divisibility".to_string()
    } else {
        "pass".to_string()
    };
    let applicable = verdict == "pass";
    cert.stages.push(Stage {
        name: "group_identification".to_string(),
        inputs: json!({ "v": params.v() }),
        outputs,
        verdict,
    });
    if !applicable {
        return Ok(cert);
    }
    let group = survivors.into_iter().next().expect("one survivor");
    cert.group = Some(group.to_string());

    // intersection sizes with the Sylow-2 subgroup
    let sylow2 = if params.v().is_multiple_of(2) {
        group.sylow_subgroup(2).expect("2 divides the order")
    } else {
        group.trivial_subgroup()
    };
    let n = sylow2.order();
    let trace = match ma_subgroup_intersection(params, n) {
        Ok(trace) => trace,
        Err(err) => {
            cert.stages.push(Stage {
                name: "sylow_intersection".to_string(),
                inputs: json!({ "subgroup_order": n }),
                outputs: json!({}),
                verdict: err.to_string(),
            });
            return Ok(cert);
        }
    };
    cert.stages.push(Stage {
        name: "sylow_intersection".to_string(),
        inputs: json!({ "subgroup_order": n }),
        outputs: json!({
            "pi": trace.pi,
            "theta": trace.theta,
            "beta1": trace.beta1,
            "delta1": trace.delta1,
            "candidate_sizes": trace.candidate_sizes,
        }),
        verdict: "pass".to_string(),
    });

    // the 13-point plane
    let plane = match build_plane(&group) {
        Ok(plane) => plane,
        Err(err) => {
            cert.stages.push(Stage {
                name: "plane".to_string(),
                inputs: json!({ "group": group.to_string() }),
                outputs: json!({}),
                verdict: format!("inapplicable: {err}"),
            });
            return Ok(cert);
        }
    };
    let summary = plane
        .check_design_axioms()
        .map_err(|e| integrity("plane", e.to_string()))?;
    let block_lists: Vec<Vec<usize>> = (0..summary.blocks).map(|j| plane.points_on(j)).collect();
    cert.stages.push(Stage {
        name: "plane".to_string(),
        inputs: json!({ "group": group.to_string() }),
        outputs: json!({
            "points": summary.points,
            "blocks": summary.blocks,
            "block_size": summary.block_size,
            "point_degree": summary.point_degree,
            "pair_coverage": summary.pair_coverage,
            "blocks_as_point_indices": block_lists,
        }),
        verdict: "pass".to_string(),
    });

    // pairing of the fourth-power fibers
    let exponent = group.exponent();
    if 6 % exponent != 0 {
        cert.stages.push(Stage {
            name: "fiber_pairing".to_string(),
            inputs: json!({}),
            outputs: json!({ "exponent": exponent }),
            verdict: format!(
                "inapplicable: element orders must divide 6, the exponent is {exponent}"
            ),
        });
        return Ok(cert);
    }
    let order3 = group.elements_of_order(3).len() as u64;
    let involutions = n - 1;
    let paired = order3 / 2;
    if !order3.is_multiple_of(2) || paired != summary.points as u64 {
        return Err(integrity(
            "fiber_pairing",
            format!("{order3} order-3 elements do not pair onto {} points", summary.points),
        ));
    }
    cert.stages.push(Stage {
        name: "fiber_pairing".to_string(),
        inputs: json!({}),
        outputs: json!({
            "order3_elements": order3,
            "paired_values": paired,
            "involutions": involutions,
        }),
        verdict: "pass".to_string(),
    });

    // admissible block contents
    let block_order = plane.blocks()[0].order();
    if plane.blocks().iter().any(|b| b.order() != block_order) {
        return Err(integrity(
            "line_content",
            "block subgroups have unequal orders".to_string(),
        ));
    }
    let m_options = line_content_options(params, block_order);
    cert.stages.push(Stage {
        name: "line_content".to_string(),
        inputs: json!({ "block_subgroup_order": block_order }),
        outputs: json!({ "m_options": m_options }),
        verdict: "pass".to_string(),
    });

    // one branch per admissible order-2 count
    let mut all_closed = true;
    for &n2 in &trace.candidate_sizes {
        let branch = run_branch(
            params,
            n2,
            involutions,
            paired as usize,
            &m_options,
            &plane,
            options,
        )?;
        all_closed &= branch.closed;
        cert.stages.push(branch_stage(&branch));
        cert.branches.push(branch);
    }

    cert.overall = if all_closed && !cert.branches.is_empty() {
        Verdict::Nonexistent
    } else {
        Verdict::Inconclusive
    };
    Ok(cert)
}

fn run_branch(
    params: &PdsParams,
    n2: u64,
    involutions: u64,
    length: usize,
    m_options: &BTreeSet<u64>,
    plane: &IncidenceStructure,
    options: &CertifyOptions,
) -> Result<CaseBranch, CertError> {
    let (sum_c, sum_c_squares) = c_system_targets(params, n2, involutions)?;
    let multisets = match CSystem::new(length, sum_c, sum_c_squares) {
        Ok(system) => enumerate_solutions(&system),
        // infeasible targets leave no candidate profiles at all
        Err(DiophantineError::CauchySchwarz { .. }) => Vec::new(),
        Err(err) => return Err(integrity("case_branch", err.to_string())),
    };
    for multiset in &multisets {
        let s: u64 = multiset.iter().sum();
        let q: u64 = multiset.iter().map(|&x| x * x).sum();
        if s != sum_c || q != sum_c_squares {
            return Err(integrity(
                "case_branch",
                format!("enumerated multiset {multiset:?} misses the targets ({sum_c},{sum_c_squares})"),
            ));
        }
    }
    let allowed = allowed_line_weights(m_options, n2)?;
    let all_allowed_even = allowed.iter().all(|w| w % 2 == 0);

    let cases = search_cases(plane, &multisets, &allowed, all_allowed_even, options);
    let closed = cases.iter().all(|c| c.excluded);
    Ok(CaseBranch {
        order2_count: n2,
        sum_c,
        sum_c_squares,
        m_options: m_options.clone(),
        allowed_block_weights: allowed,
        multisets,
        cases,
        closed,
    })
}

/// Runs the weight search for every multiset, optionally across worker
/// threads; results are collected back in multiset order so the output is
/// independent of scheduling.
fn search_cases(
    plane: &IncidenceStructure,
    multisets: &[Vec<u64>],
    allowed: &BTreeSet<u64>,
    all_allowed_even: bool,
    options: &CertifyOptions,
) -> Vec<MultisetCase> {
    let run_one = |multiset: &Vec<u64>| {
        let assignments = weight_assignment_search(plane, multiset, allowed, options.prune_automorphisms)
            .expect("multiset length matches the plane");
        let odd_value = multiset.iter().copied().find(|v| v % 2 != 0);
        MultisetCase {
            multiset: multiset.clone(),
            parity_excluded: all_allowed_even && odd_value.is_some(),
            odd_value,
            assignments_found: assignments.len(),
            excluded: assignments.is_empty(),
        }
    };
    let jobs = options.jobs.max(1);
    if jobs == 1 || multisets.len() <= 1 {
        return multisets.iter().map(run_one).collect();
    }
    let slots: Mutex<Vec<Option<MultisetCase>>> = Mutex::new(vec![None; multisets.len()]);
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(multisets.len()) {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= multisets.len() {
                    break;
                }
                let case = run_one(&multisets[i]);
                slots.lock().expect("no poisoned workers")[i] = Some(case);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|slot| slot.expect("every index was processed"))
        .collect()
}

fn branch_stage(branch: &CaseBranch) -> Stage {
    let cases: Vec<Value> = branch
        .cases
        .iter()
        .map(|c| {
            json!({
                "multiset": c.multiset,
                "parity_excluded": c.parity_excluded,
                "odd_value": c.odd_value,
                "assignments_found": c.assignments_found,
                "verdict": if c.excluded { "excluded" } else { "open" },
            })
        })
        .collect();
    Stage {
        name: "case_branch".to_string(),
        inputs: json!({ "order2_count": branch.order2_count }),
        outputs: json!({
            "sum_c": branch.sum_c,
            "sum_c_squares": branch.sum_c_squares,
            "m_options": branch.m_options,
            "allowed_block_weights": branch.allowed_block_weights,
            "multisets": branch.multisets,
            "cases": cases,
        }),
        verdict: if branch.closed { "closed" } else { "open" }.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p40() -> PdsParams {
        PdsParams::new(216, 40, 4, 8).unwrap()
    }

    fn p43() -> PdsParams {
        PdsParams::new(216, 43, 10, 8).unwrap()
    }

    /// Independent partition counter for the type-count oracle.
    fn partition_count(n: u32) -> usize {
        fn count(n: i64, max: i64) -> usize {
            if n == 0 {
                return 1;
            }
            (1..=max.min(n)).map(|part| count(n - part, part)).sum()
        }
        count(n as i64, n as i64)
    }

    #[test]
    fn nine_abelian_types_of_order_216() {
        let groups = abelian_groups_of_order(216);
        assert_eq!(groups.len(), partition_count(3) * partition_count(3));
        assert_eq!(groups.len(), 9);
        let distinct: BTreeSet<String> = groups.iter().map(|g| g.to_string()).collect();
        assert_eq!(distinct.len(), 9);
    }

    #[test]
    fn identification_leaves_the_elementary_product() {
        let survivor = group_identification(216).unwrap();
        assert_eq!(survivor.to_string(), "Z2^3xZ3^3");
        let (reports, survivors) = identify_groups(216);
        assert_eq!(reports.len(), 9);
        assert_eq!(survivors.len(), 1);
        assert_eq!(reports.iter().filter(|(_, r)| r.excluded()).count(), 8);
    }

    #[test]
    fn identification_fails_when_survivors_are_not_unique() {
        // order 16 keeps Z4xZ4, Z4xZ2^2 and Z2^4
        let err = group_identification(16).unwrap_err();
        assert!(matches!(err, CertError::Integrity { ref stage, .. } if stage == "group_identification"));
        let (_, survivors) = identify_groups(16);
        assert_eq!(survivors.len(), 3);
    }

    #[test]
    fn branch_targets_match_the_two_parameter_sets() {
        assert_eq!(c_system_targets(&p40(), 0, 7).unwrap(), (20, 48));
        assert_eq!(c_system_targets(&p40(), 4, 7).unwrap(), (18, 32));
        assert_eq!(c_system_targets(&p43(), 3, 7).unwrap(), (20, 48));
        assert_eq!(c_system_targets(&p43(), 7, 7).unwrap(), (18, 32));
    }

    #[test]
    fn branch_targets_reject_parity_breaks() {
        // k - n2 odd
        assert!(c_system_targets(&p43(), 0, 7).is_err());
        // n2 beyond the involution count
        assert!(c_system_targets(&p40(), 8, 7).is_err());
    }

    #[test]
    fn line_contents_solve_the_counting_equation() {
        assert_eq!(
            line_content_options(&p40(), 72),
            BTreeSet::from([8, 16])
        );
        assert_eq!(
            line_content_options(&p43(), 72),
            BTreeSet::from([11, 19])
        );
        // spot arithmetic for m = 8, k = 40
        assert_eq!(8 * 7 + 32 * 15, 536);
        assert_eq!(4 * 8 + 8 * 63, 536);
    }

    #[test]
    fn allowed_weights_follow_the_case_table() {
        let m40 = BTreeSet::from([8, 16]);
        assert_eq!(allowed_line_weights(&m40, 0).unwrap(), BTreeSet::from([4, 8]));
        assert_eq!(allowed_line_weights(&m40, 4).unwrap(), BTreeSet::from([2, 6]));
        let m43 = BTreeSet::from([11, 19]);
        assert_eq!(allowed_line_weights(&m43, 3).unwrap(), BTreeSet::from([4, 8]));
        assert_eq!(allowed_line_weights(&m43, 7).unwrap(), BTreeSet::from([2, 6]));
        // parity violation: m - n2 odd
        assert!(allowed_line_weights(&m40, 1).is_err());
        // ordering violation: m below n2
        assert!(allowed_line_weights(&BTreeSet::from([2]), 4).is_err());
    }

    #[test]
    fn certificate_closes_the_first_parameter_set() {
        let cert = certify(&p40(), &CertifyOptions::default()).unwrap();
        assert_eq!(cert.overall(), Verdict::Nonexistent);
        assert_eq!(cert.group(), Some("Z2^3xZ3^3"));
        assert_eq!(cert.delta(), 144);
        let branches = cert.branches();
        assert_eq!(branches.len(), 2);
        assert_eq!(branches[0].order2_count, 0);
        assert_eq!(branches[0].multisets.len(), 8);
        assert_eq!(branches[1].order2_count, 4);
        assert_eq!(branches[1].multisets.len(), 3);
        for branch in branches {
            assert!(branch.closed);
            assert!(branch.cases.iter().all(|c| c.assignments_found == 0));
        }
        // the all-even multiset survives parity and dies by search alone
        let survivor = &branches[0].cases[5];
        assert_eq!(
            survivor.multiset,
            vec![4, 2, 2, 2, 2, 2, 2, 2, 2, 0, 0, 0, 0]
        );
        assert!(!survivor.parity_excluded);
        assert!(survivor.excluded);
        let parity_deaths = branches[0]
            .cases
            .iter()
            .filter(|c| c.parity_excluded)
            .count();
        assert_eq!(parity_deaths, 7);
        assert!(branches[1].cases.iter().all(|c| c.parity_excluded));
    }

    #[test]
    fn certificate_closes_the_second_parameter_set() {
        let cert = certify(&p43(), &CertifyOptions::default()).unwrap();
        assert_eq!(cert.overall(), Verdict::Nonexistent);
        let branches = cert.branches();
        assert_eq!(branches.len(), 2);
        assert_eq!(branches[0].order2_count, 3);
        assert_eq!(branches[1].order2_count, 7);
        assert_eq!(branches[0].m_options, BTreeSet::from([11, 19]));
        assert_eq!(
            branches[0].allowed_block_weights,
            BTreeSet::from([4, 8])
        );
        assert_eq!(
            branches[1].allowed_block_weights,
            BTreeSet::from([2, 6])
        );
    }

    #[test]
    fn the_two_certificates_share_their_stage_data() {
        let a = certify(&p40(), &CertifyOptions::default()).unwrap();
        let b = certify(&p43(), &CertifyOptions::default()).unwrap();
        assert_eq!(a.delta(), b.delta());
        assert_eq!(
            a.stage("plane").unwrap().outputs,
            b.stage("plane").unwrap().outputs
        );
        for (x, y) in a.branches().iter().zip(b.branches()) {
            assert_eq!((x.sum_c, x.sum_c_squares), (y.sum_c, y.sum_c_squares));
            assert_eq!(x.multisets, y.multisets);
            assert_eq!(x.allowed_block_weights, y.allowed_block_weights);
        }
    }

    #[test]
    fn out_of_scope_parameters_are_inconclusive() {
        let params = PdsParams::new(9, 4, 1, 2).unwrap();
        let cert = certify(&params, &CertifyOptions::default()).unwrap();
        assert_eq!(cert.overall(), Verdict::Inconclusive);
        // stops at the plane: the Sylow-3 part has rank 2
        let last = cert.stages().last().unwrap();
        assert_eq!(last.name, "plane");
        assert!(last.verdict.starts_with("inapplicable"));
    }

    #[test]
    fn rough_discriminants_stop_early_but_record_delta() {
        let params = PdsParams::new(216, 41, 4, 8).unwrap();
        let cert = certify(&params, &CertifyOptions::default()).unwrap();
        assert_eq!(cert.overall(), Verdict::Inconclusive);
        assert_eq!(cert.delta(), 148);
        assert_eq!(cert.stages().len(), 1);
        assert_eq!(
            cert.stage("discriminant").unwrap().outputs["delta"],
            json!(148)
        );
    }

    #[test]
    fn certificates_are_reproducible_across_runs_and_jobs() {
        let baseline = certify(&p40(), &CertifyOptions::default()).unwrap().to_json();
        for jobs in [1, 4] {
            let options = CertifyOptions {
                jobs,
                prune_automorphisms: false,
            };
            assert_eq!(certify(&p40(), &options).unwrap().to_json(), baseline);
        }
    }

    #[test]
    fn pruned_certification_still_closes() {
        let options = CertifyOptions {
            jobs: 2,
            prune_automorphisms: true,
        };
        let cert = certify(&p40(), &options).unwrap();
        assert_eq!(cert.overall(), Verdict::Nonexistent);
    }
}
