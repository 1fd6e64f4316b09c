//! Exact arithmetic and subgroup enumeration for finite Abelian groups
//! presented as products of cyclic factors.
//!
//! Groups are normalized to their primary decomposition: every factor is a
//! prime power and factors are sorted by `(prime, exponent)`. Elements are
//! exponent vectors, one residue per factor, written additively internally
//! even though the notation elsewhere is multiplicative.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cyclic factor {0} is smaller than 2")]
    FactorTooSmall(u64),
    #[error("element has {found} coordinates but the group has {expected} factors")]
    ArityMismatch { expected: usize, found: usize },
    #[error("coordinate {value} at position {position} is not below the factor order {factor}")]
    CoordinateOutOfRange {
        position: usize,
        value: u64,
        factor: u64,
    },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{p} does not divide the group order {order}")]
    PrimeDoesNotDivide { p: u64, order: u64 },
    #[error("the Sylow-{p} part is not elementary Abelian")]
    NotElementaryAbelian { p: u64 },
    #[error("subgroups intersect nontrivially (shared order {shared})")]
    NontrivialIntersection { shared: u64 },
    #[error("cannot parse group notation `{input}`: {reason}")]
    Notation { input: String, reason: String },
    #[error("cannot parse element literal `{input}`: {reason}")]
    ElementLiteral { input: String, reason: String },
}

/// A finite Abelian group given as a product of cyclic factors.
///
/// The factor list is canonical: prime-power factors sorted by
/// `(prime, exponent)`, so `Z6` and `Z2xZ3` construct the same value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupSpec {
    factors: Vec<u64>,
}

/// An element of a [`GroupSpec`]: one residue per cyclic factor.
///
/// Elements are totally ordered lexicographically on their exponent vectors,
/// which fixes the canonical order used in subgroup listings and reports.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupElement {
    exponents: Vec<u64>,
}

/// A subgroup held as an explicit, sorted, duplicate-free element list.
///
/// Orders in this crate stay small (at most a few thousand), so the explicit
/// list buys O(log n) membership and byte-stable listings.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    generators: Vec<GroupElement>,
    elements: Vec<GroupElement>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, smallest prime first.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl GroupSpec {
    /// Builds a group from cyclic factor orders, normalizing to the primary
    /// decomposition. Every factor must be at least 2.
    pub fn new(factors: &[u64]) -> Result<Self, GroupError> {
        let mut primary: Vec<(u64, u32)> = Vec::new();
        for &f in factors {
            if f < 2 {
                return Err(GroupError::FactorTooSmall(f));
            }
            primary.extend(factorize(f));
        }
        primary.sort();
        let factors = primary.iter().map(|&(p, e)| p.pow(e)).collect();
        Ok(GroupSpec { factors })
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().copied().fold(1, lcm)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            exponents: vec![0; self.factors.len()],
        }
    }

    /// Mints an element from arbitrary integer coordinates, reducing each
    /// one modulo its factor order. Negative coordinates are allowed.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement, GroupError> {
        if coords.len() != self.factors.len() {
            return Err(GroupError::ArityMismatch {
                expected: self.factors.len(),
                found: coords.len(),
            });
        }
        let exponents = coords
            .iter()
            .zip(&self.factors)
            .map(|(&c, &f)| c.rem_euclid(f as i64) as u64)
            .collect();
        Ok(GroupElement { exponents })
    }

    /// Validates that an element structurally belongs to this group.
    pub fn check_element(&self, g: &GroupElement) -> Result<(), GroupError> {
        if g.exponents.len() != self.factors.len() {
            return Err(GroupError::ArityMismatch {
                expected: self.factors.len(),
                found: g.exponents.len(),
            });
        }
        for (position, (&value, &factor)) in g.exponents.iter().zip(&self.factors).enumerate() {
            if value >= factor {
                return Err(GroupError::CoordinateOutOfRange {
                    position,
                    value,
                    factor,
                });
            }
        }
        Ok(())
    }

    /// Group operation: componentwise sum of exponents modulo factor orders.
    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_element(g)?;
        self.check_element(h)?;
        let exponents = g
            .exponents
            .iter()
            .zip(&h.exponents)
            .zip(&self.factors)
            .map(|((&a, &b), &f)| (a + b) % f)
            .collect();
        Ok(GroupElement { exponents })
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        debug_assert!(self.check_element(g).is_ok());
        let exponents = g
            .exponents
            .iter()
            .zip(&self.factors)
            .map(|(&a, &f)| (f - a) % f)
            .collect();
        GroupElement { exponents }
    }

    /// `g` raised to an arbitrary (possibly negative) integer power.
    pub fn power(&self, g: &GroupElement, s: i64) -> GroupElement {
        debug_assert!(self.check_element(g).is_ok());
        let exponents = g
            .exponents
            .iter()
            .zip(&self.factors)
            .map(|(&a, &f)| {
                let f = f as i128;
                ((a as i128 * s as i128).rem_euclid(f)) as u64
            })
            .collect();
        GroupElement { exponents }
    }

    /// Multiplicative order: lcm over components of `factor / gcd(exp, factor)`.
    pub fn order_of(&self, g: &GroupElement) -> u64 {
        debug_assert!(self.check_element(g).is_ok());
        g.exponents
            .iter()
            .zip(&self.factors)
            .map(|(&a, &f)| f / gcd(a, f))
            .fold(1, lcm)
    }

    /// All elements, in lexicographic order on exponent vectors.
    pub fn elements(&self) -> GroupElements<'_> {
        GroupElements {
            group: self,
            next: Some(vec![0; self.factors.len()]),
        }
    }

    /// All elements of multiplicative order exactly `n`, in canonical order.
    pub fn elements_of_order(&self, n: u64) -> Vec<GroupElement> {
        self.elements().filter(|g| self.order_of(g) == n).collect()
    }

    /// The subgroup of all elements of `p`-power order.
    pub fn sylow_subgroup(&self, p: u64) -> Result<Subgroup, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        if !self.order().is_multiple_of(p) {
            return Err(GroupError::PrimeDoesNotDivide {
                p,
                order: self.order(),
            });
        }
        let elements: Vec<GroupElement> = self
            .elements()
            .filter(|g| {
                g.exponents
                    .iter()
                    .zip(&self.factors)
                    .all(|(&a, &f)| a == 0 || f % p == 0)
            })
            .collect();
        let generators = self
            .factors
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f % p == 0)
            .map(|(i, _)| self.unit_vector(i))
            .collect();
        Ok(Subgroup {
            generators,
            elements,
        })
    }

    /// Positions of factors equal to the prime `p` itself (exponent 1).
    fn elementary_positions(&self, p: u64) -> Option<Vec<usize>> {
        let mut positions = Vec::new();
        for (i, &f) in self.factors.iter().enumerate() {
            if f == p {
                positions.push(i);
            } else if f % p == 0 {
                return None; // some p-primary factor has exponent > 1
            }
        }
        Some(positions)
    }

    fn unit_vector(&self, position: usize) -> GroupElement {
        let mut exponents = vec![0; self.factors.len()];
        exponents[position] = 1;
        GroupElement { exponents }
    }

    /// All subgroups of the Sylow-`p` part isomorphic to `Z_p^rank`, provided
    /// that part is elementary Abelian. Subgroups are enumerated as subspaces
    /// of the rank-`r` space over the `p`-element field via row-reduced
    /// echelon bases; the count is the Gaussian binomial coefficient.
    pub fn elementary_subgroups(&self, p: u64, rank: usize) -> Result<Vec<Subgroup>, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        let positions = self
            .elementary_positions(p)
            .ok_or(GroupError::NotElementaryAbelian { p })?;
        let dim = positions.len();
        if rank > dim {
            return Ok(Vec::new());
        }
        let mut subgroups: Vec<Subgroup> = rref_bases(p, dim, rank)
            .into_iter()
            .map(|basis| {
                let generators: Vec<GroupElement> = basis
                    .iter()
                    .map(|row| self.embed_at_positions(row, &positions))
                    .collect();
                let elements = span_elements(p, &basis)
                    .into_iter()
                    .map(|row| self.embed_at_positions(&row, &positions))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                Subgroup {
                    generators,
                    elements,
                }
            })
            .collect();
        subgroups.sort_by(|a, b| a.elements.cmp(&b.elements));
        Ok(subgroups)
    }

    fn embed_at_positions(&self, row: &[u64], positions: &[usize]) -> GroupElement {
        let mut exponents = vec![0; self.factors.len()];
        for (&value, &pos) in row.iter().zip(positions) {
            exponents[pos] = value;
        }
        GroupElement { exponents }
    }

    /// Internal direct product of two subgroups with trivial intersection.
    pub fn subgroup_product(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup, GroupError> {
        let shared = a
            .elements
            .iter()
            .filter(|g| b.contains(g))
            .count() as u64;
        if shared != 1 {
            return Err(GroupError::NontrivialIntersection { shared });
        }
        let mut elements = BTreeSet::new();
        for x in &a.elements {
            for y in &b.elements {
                elements.insert(self.compose(x, y)?);
            }
        }
        debug_assert_eq!(elements.len() as u64, a.order() * b.order());
        let mut generators = a.generators.clone();
        generators.extend(b.generators.iter().cloned());
        Ok(Subgroup {
            generators,
            elements: elements.into_iter().collect(),
        })
    }

    /// Closure of a generating set.
    pub fn subgroup_from_generators(
        &self,
        generators: &[GroupElement],
    ) -> Result<Subgroup, GroupError> {
        for g in generators {
            self.check_element(g)?;
        }
        let mut elements = BTreeSet::new();
        elements.insert(self.identity());
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in generators {
                let y = self.compose(&x, g)?;
                if elements.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(Subgroup {
            generators: generators.to_vec(),
            elements: elements.into_iter().collect(),
        })
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            generators: Vec::new(),
            elements: vec![self.identity()],
        }
    }

    /// True if the given element set is closed under composition and inverse
    /// and contains the identity. Verified explicitly, not by order counting.
    pub fn is_subgroup_set(&self, set: &BTreeSet<GroupElement>) -> bool {
        if !set.contains(&self.identity()) {
            return false;
        }
        for x in set {
            if !set.contains(&self.inverse(x)) {
                return false;
            }
            for y in set {
                match self.compose(x, y) {
                    Ok(z) => {
                        if !set.contains(&z) {
                            return false;
                        }
                    }
                    Err(_) => return false,
                }
            }
        }
        true
    }

    /// Parses an element literal `(a1,...,an)` against this group's factors.
    pub fn parse_element(&self, input: &str) -> Result<GroupElement, GroupError> {
        let trimmed = input.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| GroupError::ElementLiteral {
                input: input.to_string(),
                reason: "expected a parenthesized comma list".to_string(),
            })?;
        let coords: Vec<i64> = inner
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<i64>()
                    .map_err(|e| GroupError::ElementLiteral {
                        input: input.to_string(),
                        reason: e.to_string(),
                    })
            })
            .collect::<Result<_, _>>()?;
        self.element(&coords)
    }
}

/// Iterator over all elements in lexicographic (mixed-radix odometer) order.
pub struct GroupElements<'a> {
    group: &'a GroupSpec,
    next: Option<Vec<u64>>,
}

impl Iterator for GroupElements<'_> {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.group.factors[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(GroupElement { exponents: current })
    }
}

impl GroupElement {
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl Subgroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }
}

/// Row-reduced echelon bases of all `rank`-dimensional subspaces of the
/// `dim`-dimensional space over the field with `p` elements.
fn rref_bases(p: u64, dim: usize, rank: usize) -> Vec<Vec<Vec<u64>>> {
    let mut bases = Vec::new();
    let mut pivots = Vec::new();
    choose_pivots(p, dim, rank, 0, &mut pivots, &mut bases);
    bases
}

fn choose_pivots(
    p: u64,
    dim: usize,
    rank: usize,
    start: usize,
    pivots: &mut Vec<usize>,
    bases: &mut Vec<Vec<Vec<u64>>>,
) {
    if pivots.len() == rank {
        // Free entries sit strictly right of each row's pivot, outside pivot columns.
        let mut free = Vec::new();
        for (row, &pc) in pivots.iter().enumerate() {
            for col in pc + 1..dim {
                if !pivots.contains(&col) {
                    free.push((row, col));
                }
            }
        }
        let mut values = vec![0u64; free.len()];
        loop {
            let mut basis = vec![vec![0u64; dim]; rank];
            for (row, &pc) in pivots.iter().enumerate() {
                basis[row][pc] = 1;
            }
            for (&(row, col), &v) in free.iter().zip(&values) {
                basis[row][col] = v;
            }
            bases.push(basis);
            // odometer over free values
            let mut i = values.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                values[i] += 1;
                if values[i] < p {
                    break;
                }
                values[i] = 0;
            }
        }
    }
    for c in start..dim {
        pivots.push(c);
        choose_pivots(p, dim, rank, c + 1, pivots, bases);
        pivots.pop();
    }
}

/// All vectors in the span of `basis` over the field with `p` elements.
fn span_elements(p: u64, basis: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let dim = basis.first().map_or(0, |row| row.len());
    let mut out = Vec::new();
    let mut coeffs = vec![0u64; basis.len()];
    loop {
        let mut v = vec![0u64; dim];
        for (&c, row) in coeffs.iter().zip(basis) {
            for (vi, &ri) in v.iter_mut().zip(row) {
                *vi = (*vi + c * ri) % p;
            }
        }
        out.push(v);
        let mut i = coeffs.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
        }
    }
}

impl fmt::Display for GroupSpec {
    /// Renders canonical notation such as `Z2^3xZ3^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Z1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.factors.len() {
            let n = self.factors[i];
            let mut count = 0;
            while i < self.factors.len() && self.factors[i] == n {
                count += 1;
                i += 1;
            }
            if !first {
                write!(f, "x")?;
            }
            first = false;
            if count == 1 {
                write!(f, "Z{n}")?;
            } else {
                write!(f, "Z{n}^{count}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    /// Parses notation like `Z2^3xZ3^3`. Case-insensitive on `Z` and `x`,
    /// whitespace-insensitive.
    fn from_str(s: &str) -> Result<Self, GroupError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: &str| GroupError::Notation {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if compact.is_empty() {
            return Err(err("empty notation"));
        }
        let mut factors = Vec::new();
        for term in compact.split(['x', 'X']) {
            let rest = term
                .strip_prefix(['z', 'Z'])
                .ok_or_else(|| err("each factor must start with Z"))?;
            let (base, exp) = match rest.split_once('^') {
                Some((b, e)) => (b, e),
                None => (rest, "1"),
            };
            let base: u64 = base
                .parse()
                .map_err(|_| err("factor order must be an integer"))?;
            let exp: u32 = exp
                .parse()
                .map_err(|_| err("factor exponent must be an integer"))?;
            if exp == 0 {
                return Err(err("factor exponent must be positive"));
            }
            for _ in 0..exp {
                factors.push(base);
            }
        }
        GroupSpec::new(&factors)
    }
}
