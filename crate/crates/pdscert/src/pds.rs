//! Partial difference sets: difference spectra, verification, parameter
//! arithmetic, exclusion criteria, multiplier orbits, and a small
//! brute-force search.
//!
//! All arithmetic is exact; perfect squares are detected with integer
//! square roots so that certificates never depend on floating point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("cannot parse parameters `{input}`: {reason}")]
    ParamsLiteral { input: String, reason: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("inapplicable: {condition}")]
    Inapplicable { condition: String },
    #[error("group order {group_order} does not match v={v}")]
    OrderMismatch { group_order: u64, v: u64 },
    #[error("unsupported group {group}: {reason}")]
    UnsupportedGroup { group: String, reason: String },
}

/// The parameter quadruple `(v, k, lambda, mu)` with its derived quantities
/// `beta = lambda - mu` and `delta = beta^2 + 4(k - mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PdsParams {
    v: u64,
    k: u64,
    lambda: u64,
    mu: u64,
}

impl PdsParams {
    pub fn new(v: u64, k: u64, lambda: u64, mu: u64) -> Result<Self, PdsError> {
        if k >= v {
            return Err(PdsError::InvalidParams(format!("k={k} must be below v={v}")));
        }
        if lambda > k {
            return Err(PdsError::InvalidParams(format!(
                "lambda={lambda} must not exceed k={k}"
            )));
        }
        if mu > k {
            return Err(PdsError::InvalidParams(format!(
                "mu={mu} must not exceed k={k}"
            )));
        }
        Ok(PdsParams { v, k, lambda, mu })
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn mu(&self) -> u64 {
        self.mu
    }

    pub fn beta(&self) -> i64 {
        self.lambda as i64 - self.mu as i64
    }

    pub fn delta(&self) -> u64 {
        let beta = self.beta();
        (beta * beta) as u64 + 4 * (self.k - self.mu)
    }

    /// Exact square root of `delta`, if `delta` is a perfect square.
    pub fn sqrt_delta(&self) -> Option<u64> {
        let delta = self.delta();
        let root = delta.isqrt();
        (root * root == delta).then_some(root)
    }
}

impl fmt::Display for PdsParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.v, self.k, self.lambda, self.mu)
    }
}

impl FromStr for PdsParams {
    type Err = PdsError;

    /// Parses a comma-joined quadruple such as `216,40,4,8`.
    fn from_str(s: &str) -> Result<Self, PdsError> {
        let err = |reason: &str| PdsError::ParamsLiteral {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = s.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err("expected four comma-separated integers v,k,lambda,mu"));
        }
        let mut values = [0u64; 4];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| err("fields must be nonnegative integers"))?;
        }
        PdsParams::new(values[0], values[1], values[2], values[3])
    }
}

/// A candidate subset `D` of a group, stored sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    group: GroupSpec,
    elements: Vec<GroupElement>,
}

impl CandidateSet {
    pub fn new(group: GroupSpec, mut elements: Vec<GroupElement>) -> Result<Self, PdsError> {
        for e in &elements {
            group.check_element(e)?;
        }
        elements.sort();
        elements.dedup();
        Ok(CandidateSet { group, elements })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&self.group.identity())
    }

    pub fn is_inverse_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|g| self.contains(&self.group.inverse(g)))
    }
}

/// On-disk shape of a candidate set: a group notation string plus one
/// exponent vector per element. Extra fields (such as the `trivial` marker
/// written by the search command) are tolerated on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetFile {
    pub group: String,
    pub elements: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trivial: Option<bool>,
}

impl CandidateSet {
    pub fn from_set_file(file: &SetFile) -> Result<Self, PdsError> {
        let group: GroupSpec = file.group.parse()?;
        let elements = file
            .elements
            .iter()
            .map(|coords| group.element(coords))
            .collect::<Result<Vec<_>, _>>()?;
        CandidateSet::new(group, elements)
    }

    pub fn to_set_file(&self, trivial: Option<bool>) -> SetFile {
        SetFile {
            group: self.group.to_string(),
            elements: self
                .elements
                .iter()
                .map(|e| e.exponents().iter().map(|&x| x as i64).collect())
                .collect(),
            trivial,
        }
    }
}

/// For each non-identity group element `x`, the number of ordered pairs
/// `(g, h)` of distinct elements of `D` with `g h^-1 = x`. Every
/// non-identity element appears as a key, with zero counts included.
pub fn difference_spectrum(d: &CandidateSet) -> BTreeMap<GroupElement, u64> {
    let group = d.group();
    let mut spectrum: BTreeMap<GroupElement, u64> = group
        .elements()
        .filter(|x| !x.is_identity())
        .map(|x| (x, 0))
        .collect();
    for g in d.elements() {
        for h in d.elements() {
            if g == h {
                continue;
            }
            let x = group
                .compose(g, &group.inverse(h))
                .expect("candidate elements share the group");
            *spectrum.get_mut(&x).expect("difference is non-identity") += 1;
        }
    }
    spectrum
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub pass: bool,
    pub failure: Option<VerifyFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    GroupOrder { expected: u64, actual: u64 },
    Cardinality { expected: u64, actual: u64 },
    Spectrum {
        element: GroupElement,
        in_set: bool,
        expected: u64,
        actual: u64,
    },
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::GroupOrder { expected, actual } => {
                write!(f, "group order is {actual}, parameters require v={expected}")
            }
            VerifyFailure::Cardinality { expected, actual } => {
                write!(f, "set has {actual} elements, parameters require k={expected}")
            }
            VerifyFailure::Spectrum {
                element,
                in_set,
                expected,
                actual,
            } => {
                let role = if *in_set { "lambda (in set)" } else { "mu (not in set)" };
                write!(
                    f,
                    "element {element} is covered {actual} times, expected {expected} = {role}"
                )
            }
        }
    }
}

/// Checks the defining count condition: every non-identity element of `D`
/// covered exactly `lambda` times, every non-identity element outside `D`
/// exactly `mu` times. The first violation in canonical element order is
/// reported.
pub fn verify_pds(d: &CandidateSet, params: &PdsParams) -> VerifyReport {
    let fail = |failure| VerifyReport {
        pass: false,
        failure: Some(failure),
    };
    if d.group().order() != params.v() {
        return fail(VerifyFailure::GroupOrder {
            expected: params.v(),
            actual: d.group().order(),
        });
    }
    if d.len() as u64 != params.k() {
        return fail(VerifyFailure::Cardinality {
            expected: params.k(),
            actual: d.len() as u64,
        });
    }
    for (x, &count) in &difference_spectrum(d) {
        let in_set = d.contains(x);
        let expected = if in_set { params.lambda() } else { params.mu() };
        if count != expected {
            return fail(VerifyFailure::Spectrum {
                element: x.clone(),
                in_set,
                expected,
                actual: count,
            });
        }
    }
    VerifyReport {
        pass: true,
        failure: None,
    }
}

/// Inverse-closed and identity-free.
pub fn is_regular(d: &CandidateSet) -> bool {
    !d.contains_identity() && d.is_inverse_closed()
}

/// True when `D + {e}` or the complement of `D` is a subgroup, verified by
/// explicit closure checking.
pub fn is_trivial(d: &CandidateSet) -> bool {
    let group = d.group();
    let mut with_identity: BTreeSet<GroupElement> = d.elements().iter().cloned().collect();
    with_identity.insert(group.identity());
    if group.is_subgroup_set(&with_identity) {
        return true;
    }
    let complement: BTreeSet<GroupElement> =
        group.elements().filter(|x| !d.contains(x)).collect();
    group.is_subgroup_set(&complement)
}

/// Per-prime verdict of the Sylow-structure exclusion criteria.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaPrimeVerdict {
    /// Sylow-p is cyclic and the group order is not p itself.
    CyclicSylow,
    /// Sylow-p is a product of exactly two cyclic factors of unequal order.
    UnequalTwoFactor { s: u32, t: u32 },
    NotExcluded,
}

impl MaPrimeVerdict {
    pub fn excludes(&self) -> bool {
        !matches!(self, MaPrimeVerdict::NotExcluded)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaExclusionReport {
    /// One verdict per prime dividing the group order, smallest prime first.
    pub verdicts: Vec<(u64, MaPrimeVerdict)>,
}

impl MaExclusionReport {
    pub fn excluded(&self) -> bool {
        self.verdicts.iter().any(|(_, v)| v.excludes())
    }

    pub fn describe(&self) -> String {
        let reasons: Vec<String> = self
            .verdicts
            .iter()
            .filter(|(_, v)| v.excludes())
            .map(|(p, v)| match v {
                MaPrimeVerdict::CyclicSylow => {
                    format!("Sylow-{p} is cyclic and the group order exceeds {p}")
                }
                MaPrimeVerdict::UnequalTwoFactor { s, t } => {
                    format!("Sylow-{p} is Z{}xZ{} with unequal exponents", p_pow(*p, *s), p_pow(*p, *t))
                }
                MaPrimeVerdict::NotExcluded => unreachable!(),
            })
            .collect();
        if reasons.is_empty() {
            "not excluded".to_string()
        } else {
            format!("excluded: {}", reasons.join("; "))
        }
    }
}

fn p_pow(p: u64, e: u32) -> u64 {
    p.pow(e)
}

/// Applies the two Sylow-structure exclusions for nontrivial regular PDS:
/// a cyclic Sylow-p-subgroup in a group of order other than p, or a
/// Sylow-p-subgroup that is a product of two cyclic factors of unequal
/// order.
pub fn ma_exclusion(group: &GroupSpec) -> MaExclusionReport {
    let order = group.order();
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &f in group.factors() {
        let (p, e) = crate::group::factorize(f)
            .pop()
            .expect("canonical factors are prime powers");
        by_prime.entry(p).or_default().push(e);
    }
    let verdicts = by_prime
        .into_iter()
        .map(|(p, exps)| {
            let verdict = if exps.len() == 1 && order != p {
                MaPrimeVerdict::CyclicSylow
            } else if exps.len() == 2 && exps[0] != exps[1] {
                MaPrimeVerdict::UnequalTwoFactor {
                    s: exps[0],
                    t: exps[1],
                }
            } else {
                MaPrimeVerdict::NotExcluded
            };
            (p, verdict)
        })
        .collect();
    MaExclusionReport { verdicts }
}

/// Intermediate values of the subgroup-intersection size formula, together
/// with the surviving candidate sizes `|D intersect N|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaIntersectionTrace {
    pub n: u64,
    pub pi: u64,
    pub theta: i64,
    pub beta1: i64,
    pub delta1: u64,
    pub candidate_sizes: BTreeSet<u64>,
}

/// Evaluates the intersection-size formula for a subgroup of order `n`,
/// keeping exactly the branches that land on nonnegative integers. Requires
/// `delta` to be a perfect square but performs no divisibility or parity
/// checks on `n`; use [`ma_subgroup_intersection`] for the checked variant.
pub fn ma_intersection_formula(params: &PdsParams, n: u64) -> Option<MaIntersectionTrace> {
    let sqrt_delta = params.sqrt_delta()?;
    let pi = gcd(n, sqrt_delta);
    if pi == 0 {
        return None; // n = 0 with a zero discriminant leaves theta undefined
    }
    let beta = params.beta();
    // theta is the unique integer with (2*theta - 1)*pi <= beta < (2*theta + 1)*pi
    let theta = (beta + pi as i64).div_euclid(2 * pi as i64);
    debug_assert!((2 * theta - 1) * pi as i64 <= beta && beta < (2 * theta + 1) * pi as i64);
    let beta1 = beta - 2 * theta * pi as i64;
    let delta1 = pi * pi;
    let base = n as i128 + beta1 as i128;
    let disc = base * base - (delta1 as i128 - (beta1 as i128).pow(2)) * (n as i128 - 1);
    let mut candidate_sizes = BTreeSet::new();
    if disc >= 0 {
        let root = (disc as u128).isqrt() as i128;
        if root * root == disc {
            for numerator in [base - root, base + root] {
                if numerator >= 0 && numerator % 2 == 0 {
                    candidate_sizes.insert((numerator / 2) as u64);
                }
            }
        }
    }
    Some(MaIntersectionTrace {
        n,
        pi,
        theta,
        beta1,
        delta1,
        candidate_sizes,
    })
}

/// Checked intersection-size computation for `D intersect N` where `N` is a
/// subgroup of order `n`. Preconditions: `delta` is a perfect square, `n`
/// divides `v`, `gcd(n, v/n) = 1`, and `v/n` is odd. Violations produce an
/// error naming the failed condition.
pub fn ma_subgroup_intersection(
    params: &PdsParams,
    n: u64,
) -> Result<MaIntersectionTrace, PdsError> {
    let inapplicable = |condition: String| PdsError::Inapplicable { condition };
    if params.sqrt_delta().is_none() {
        return Err(inapplicable(format!(
            "delta = {} is not a perfect square",
            params.delta()
        )));
    }
    let v = params.v();
    if n == 0 || !v.is_multiple_of(n) {
        return Err(inapplicable(format!("n = {n} does not divide v = {v}")));
    }
    let quotient = v / n;
    if gcd(n, quotient) != 1 {
        return Err(inapplicable(format!(
            "gcd(n, v/n) = {} is not 1",
            gcd(n, quotient)
        )));
    }
    if quotient.is_multiple_of(2) {
        return Err(inapplicable(format!("v/n = {quotient} is not odd")));
    }
    Ok(ma_intersection_formula(params, n).expect("delta squareness checked above"))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The coprime-power orbit of `g`: all `g^s` with `gcd(s, order(g)) = 1`.
pub fn lmt_orbit(group: &GroupSpec, g: &GroupElement) -> BTreeSet<GroupElement> {
    let order = group.order_of(g);
    (1..=order)
        .filter(|&s| gcd(s, order) == 1)
        .map(|s| group.power(g, s as i64))
        .collect()
}

/// True when `D` is a union of coprime-power orbits.
pub fn lmt_closed(d: &CandidateSet) -> bool {
    d.elements()
        .iter()
        .all(|g| lmt_orbit(d.group(), g).iter().all(|x| d.contains(x)))
}

/// Fiber sizes of `D` under the fourth-power map: for each element `g` of
/// order 3, the number of elements of `D` (necessarily of order 3 or 6)
/// whose fourth power is `g`. Supported in groups whose exponent divides 6.
pub fn b_profile(d: &CandidateSet) -> Result<BTreeMap<GroupElement, u64>, PdsError> {
    let group = d.group();
    if 6 % group.exponent() != 0 {
        return Err(PdsError::UnsupportedGroup {
            group: group.to_string(),
            reason: format!(
                "element orders must divide 6, but the exponent is {}",
                group.exponent()
            ),
        });
    }
    let mut profile: BTreeMap<GroupElement, u64> = group
        .elements_of_order(3)
        .into_iter()
        .map(|g| (g, 0))
        .collect();
    for x in d.elements() {
        let order = group.order_of(x);
        if order == 3 || order == 6 {
            let fiber = group.power(x, 4);
            *profile.get_mut(&fiber).expect("fourth power has order 3") += 1;
        }
    }
    Ok(profile)
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub timeout: Option<Duration>,
    pub max_sets: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdsHit {
    pub set: CandidateSet,
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Hits in canonical (element-list lexicographic) order.
    pub hits: Vec<PdsHit>,
    /// False when the search stopped early on a timeout or a hit cap.
    pub complete: bool,
}

/// Backtracking search for regular PDS with the given parameters.
///
/// Candidates are unions of inverse-closed atoms: coprime-power orbits when
/// `delta` is a perfect square (a sound restriction in that case), plain
/// inverse pairs otherwise. Output order is canonical regardless of the
/// exploration order.
pub fn search_pds(
    group: &GroupSpec,
    params: &PdsParams,
    options: &SearchOptions,
) -> Result<SearchOutcome, PdsError> {
    if group.order() != params.v() {
        return Err(PdsError::OrderMismatch {
            group_order: group.order(),
            v: params.v(),
        });
    }
    let all: Vec<GroupElement> = group.elements().collect();
    let index_of: BTreeMap<&GroupElement, usize> =
        all.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let n = all.len();

    // difference table: diff[a][b] = index of a * b^-1
    let inverse: Vec<usize> = all.iter().map(|g| index_of[&group.inverse(g)]).collect();
    let mut diff = vec![0usize; n * n];
    for (a, ga) in all.iter().enumerate() {
        for b in 0..n {
            let product = group
                .compose(ga, &all[inverse[b]])
                .expect("elements share the group");
            diff[a * n + b] = index_of[&product];
        }
    }

    let use_orbits = params.sqrt_delta().is_some();
    let mut atoms: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; n];
    for (i, g) in all.iter().enumerate() {
        if g.is_identity() || seen[i] {
            continue;
        }
        let members: BTreeSet<GroupElement> = if use_orbits {
            lmt_orbit(group, g)
        } else {
            [g.clone(), group.inverse(g)].into_iter().collect()
        };
        let atom: Vec<usize> = members.iter().map(|m| index_of[m]).collect();
        for &m in &atom {
            seen[m] = true;
        }
        atoms.push(atom);
    }
    atoms.sort();

    let mut suffix_sizes = vec![0usize; atoms.len() + 1];
    for i in (0..atoms.len()).rev() {
        suffix_sizes[i] = suffix_sizes[i + 1] + atoms[i].len();
    }

    let mut searcher = Searcher {
        n,
        diff: &diff,
        atoms: &atoms,
        suffix_sizes: &suffix_sizes,
        k: params.k() as usize,
        lambda: params.lambda(),
        mu: params.mu(),
        cap: params.lambda().max(params.mu()),
        counts: vec![0u64; n],
        chosen: Vec::new(),
        in_set: vec![false; n],
        found: Vec::new(),
        deadline: options.timeout.map(|t| Instant::now() + t),
        max_sets: options.max_sets,
        stopped: false,
    };
    searcher.recurse(0);

    let mut sets: Vec<Vec<usize>> = searcher.found;
    let stopped = searcher.stopped;
    sets.sort();
    let hits = sets
        .into_iter()
        .map(|indices| {
            let elements = indices.iter().map(|&i| all[i].clone()).collect();
            let set = CandidateSet::new(group.clone(), elements)?;
            let trivial = is_trivial(&set);
            Ok(PdsHit { set, trivial })
        })
        .collect::<Result<Vec<_>, PdsError>>()?;
    Ok(SearchOutcome {
        hits,
        complete: !stopped,
    })
}

struct Searcher<'a> {
    n: usize,
    diff: &'a [usize],
    atoms: &'a [Vec<usize>],
    suffix_sizes: &'a [usize],
    k: usize,
    lambda: u64,
    mu: u64,
    cap: u64,
    counts: Vec<u64>,
    chosen: Vec<usize>,
    in_set: Vec<bool>,
    found: Vec<Vec<usize>>,
    deadline: Option<Instant>,
    max_sets: Option<usize>,
    stopped: bool,
}

impl Searcher<'_> {
    fn recurse(&mut self, atom_idx: usize) {
        if self.stopped {
            return;
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                self.stopped = true;
                return;
            }
        }
        if self.chosen.len() == self.k {
            if self.is_exact() {
                let mut set = self.chosen.clone();
                set.sort();
                self.found.push(set);
                if self.max_sets == Some(self.found.len()) {
                    self.stopped = true;
                }
            }
            return;
        }
        if atom_idx == self.atoms.len()
            || self.chosen.len() + self.suffix_sizes[atom_idx] < self.k
        {
            return;
        }
        if self.chosen.len() + self.atoms[atom_idx].len() <= self.k {
            let viable = self.push_atom(atom_idx);
            if viable {
                self.recurse(atom_idx + 1);
            }
            self.pop_atom(atom_idx);
        }
        self.recurse(atom_idx + 1);
    }

    /// Adds an atom, updating pair counts; returns false when some count
    /// already exceeds max(lambda, mu), or exceeds lambda on a chosen
    /// element (counts only grow, so either dooms every extension).
    fn push_atom(&mut self, atom_idx: usize) -> bool {
        let mut viable = true;
        for &a in &self.atoms[atom_idx] {
            for i in 0..self.chosen.len() {
                let d = self.chosen[i];
                for x in [self.diff[a * self.n + d], self.diff[d * self.n + a]] {
                    self.counts[x] += 1;
                    if self.counts[x] > self.cap
                        || (self.in_set[x] && self.counts[x] > self.lambda)
                    {
                        viable = false;
                    }
                }
            }
            self.chosen.push(a);
            self.in_set[a] = true;
        }
        viable
    }

    fn pop_atom(&mut self, atom_idx: usize) {
        for &a in self.atoms[atom_idx].iter().rev() {
            self.in_set[a] = false;
            self.chosen.pop();
            for i in 0..self.chosen.len() {
                let d = self.chosen[i];
                self.counts[self.diff[a * self.n + d]] -= 1;
                self.counts[self.diff[d * self.n + a]] -= 1;
            }
        }
    }

    fn is_exact(&self) -> bool {
        (1..self.n).all(|x| {
            let expected = if self.in_set[x] { self.lambda } else { self.mu };
            self.counts[x] == expected
        })
    }
}
