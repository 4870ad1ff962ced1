//! Finite abelian groups in invariant-factor form, their elements, and
//! subsets.
//!
//! A group is described by its invariant factors n_1 | n_2 | ... | n_r, so
//! G = Z/n_1 x ... x Z/n_r. This form is unique per isomorphism class, which
//! makes the factor list usable as a cache key. Elements are coordinate
//! vectors, always kept reduced modulo their factor so that equality and
//! hashing behave. Every element also has a canonical index in 0..|G| (mixed
//! radix, first coordinate most significant); the index order is the
//! canonical element order used everywhere in the search engine and for
//! reported witnesses.

use std::fmt;
use std::str::FromStr;

use crate::arith::{gcd, is_prime};
use crate::error::{Error, Result};

/// Sets switch from a dense bitmask to a sorted index list above this order.
const DENSE_LIMIT: u64 = 1 << 16;

/// A finite abelian group given by invariant factors n_1 | n_2 | ... | n_r.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    order: u64,
}

impl FiniteAbelianGroup {
    /// Build a group from its invariant factors. Each factor must be >= 2
    /// and divide the next one.
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(
                "a group needs at least one invariant factor".into(),
            ));
        }
        let mut order: u64 = 1;
        for (i, &f) in factors.iter().enumerate() {
            if f < 2 {
                return Err(Error::InvalidArgument(format!(
                    "invariant factor {f} is smaller than 2"
                )));
            }
            if i + 1 < factors.len() && !factors[i + 1].is_multiple_of(f) {
                return Err(Error::InvalidArgument(format!(
                    "invariant factor {f} does not divide {}",
                    factors[i + 1]
                )));
            }
            order = order.checked_mul(f).ok_or_else(|| {
                Error::InvalidArgument("group order overflows u64".into())
            })?;
        }
        Ok(Self { factors, order })
    }

    /// The cyclic group Z/nZ.
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn exponent(&self) -> u64 {
        *self.factors.last().unwrap()
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() == 1
    }

    /// Number of invariant factors divisible by the prime p.
    pub fn p_rank(&self, p: u64) -> Result<usize> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        Ok(self.factors.iter().filter(|&&f| f % p == 0).count())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.factors.len()],
        }
    }

    /// Make an element from (possibly unreduced, possibly negative) coords.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.factors.len() {
            return Err(Error::Structure(format!(
                "expected {} coordinates, got {}",
                self.factors.len(),
                coords.len()
            )));
        }
        let coords = coords
            .iter()
            .zip(&self.factors)
            .map(|(&c, &f)| c.rem_euclid(f as i64) as u64)
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.factors.len()
            && g.coords.iter().zip(&self.factors).all(|(&c, &f)| c < f)
    }

    fn check_member(&self, g: &GroupElement) -> Result<()> {
        if g.coords.len() != self.factors.len() {
            return Err(Error::Structure(format!(
                "element of rank {} used in group of rank {}",
                g.coords.len(),
                self.factors.len()
            )));
        }
        Ok(())
    }

    /// Coordinatewise sum, reduced modulo each invariant factor.
    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_member(g)?;
        self.check_member(h)?;
        let coords = g
            .coords
            .iter()
            .zip(&h.coords)
            .zip(&self.factors)
            .map(|((&a, &b), &f)| {
                let s = a + b;
                if s >= f { s - f } else { s }
            })
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_member(g)?;
        let coords = g
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&a, &f)| if a == 0 { 0 } else { f - a })
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let nh = self.neg(h)?;
        self.add(g, &nh)
    }

    /// t*g for any integer t (negative allowed), coordinatewise.
    pub fn scalar_mul(&self, t: i64, g: &GroupElement) -> Result<GroupElement> {
        self.check_member(g)?;
        let coords = g
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&a, &f)| ((t as i128 * a as i128).rem_euclid(f as i128)) as u64)
            .collect();
        Ok(GroupElement { coords })
    }

    /// Canonical index of an element: mixed radix, coords[0] most significant.
    pub fn index_of(&self, g: &GroupElement) -> u64 {
        debug_assert!(self.contains(g));
        let mut idx = 0u64;
        for (&c, &f) in g.coords.iter().zip(&self.factors) {
            idx = idx * f + c;
        }
        idx
    }

    pub fn element_at(&self, mut idx: u64) -> GroupElement {
        debug_assert!(idx < self.order);
        let mut coords = vec![0u64; self.factors.len()];
        for i in (0..self.factors.len()).rev() {
            coords[i] = idx % self.factors[i];
            idx /= self.factors[i];
        }
        GroupElement { coords }
    }

    /// All elements in canonical (index) order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    /// The value of summing every element of the group, from the structure
    /// of G alone: the unique element of order 2 if the 2-rank is 1, and the
    /// identity otherwise.
    pub fn sigma_group_formula(&self) -> GroupElement {
        let even: Vec<usize> = (0..self.factors.len())
            .filter(|&i| self.factors[i].is_multiple_of(2))
            .collect();
        let mut coords = vec![0u64; self.factors.len()];
        if even.len() == 1 {
            coords[even[0]] = self.factors[even[0]] / 2;
        }
        GroupElement { coords }
    }

    /// The subgroup 2*G = {2g : g in G}.
    pub fn double_image(&self) -> ElementSet {
        let mut set = ElementSet::new(self.clone());
        for g in self.elements() {
            let h = self.scalar_mul(2, &g).unwrap();
            set.insert_index(self.index_of(&h));
        }
        set
    }

    /// Parse an element in colon-separated coordinate syntax, e.g. "1:3".
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let coords: Vec<i64> = s
            .split(':')
            .map(|part| {
                part.trim().parse::<i64>().map_err(|_| {
                    Error::InvalidArgument(format!("bad element coordinate {part:?}"))
                })
            })
            .collect::<Result<_>>()?;
        let g = self.element(&coords)?;
        Ok(g)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    /// Comma-separated invariant factors, e.g. "11" or "2,4".
    fn from_str(s: &str) -> Result<Self> {
        let factors: Vec<u64> = s
            .split(',')
            .map(|part| {
                part.trim().parse::<u64>().map_err(|_| {
                    Error::InvalidArgument(format!("bad invariant factor {part:?}"))
                })
            })
            .collect::<Result<_>>()?;
        Self::new(factors)
    }
}

/// An element of a [`FiniteAbelianGroup`], as a reduced coordinate vector.
///
/// The element does not carry its group; the group's methods validate rank
/// on use. Ordering is lexicographic on coordinates, which coincides with
/// the canonical index order within one group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(":"))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// Multiplicative order of s modulo n: least t >= 1 with s^t = 1 (mod n).
/// Requires gcd(s, n) = 1 and n >= 2.
pub fn mult_order(s: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("modulus {n} must be >= 2")));
    }
    let s = s % n;
    if gcd(s, n) != 1 {
        return Err(Error::InvalidArgument(format!(
            "{s} is not invertible modulo {n}"
        )));
    }
    let mut cur = s;
    let mut t = 1u64;
    while cur != 1 {
        cur = cur * s % n;
        t += 1;
    }
    Ok(t)
}

fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(e, e, &mut Vec::new(), &mut out);
    out
}

/// All abelian groups of the given order, one per isomorphism class, in
/// canonical invariant-factor form, ordered by rank then lexicographically.
pub fn enumerate_groups(order: u64) -> Result<Vec<FiniteAbelianGroup>> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "order {order} must be >= 2"
        )));
    }
    // prime factorization by trial division
    let mut rest = order;
    let mut prime_powers: Vec<(u64, u32)> = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            prime_powers.push((p, e));
        }
        p += 1;
    }
    if rest > 1 {
        prime_powers.push((rest, 1));
    }

    let per_prime: Vec<(u64, Vec<Vec<u32>>)> = prime_powers
        .iter()
        .map(|&(p, e)| (p, partitions(e)))
        .collect();

    // one choice of partition per prime; align descending parts to build
    // the invariant-factor chain
    let mut groups = Vec::new();
    let mut choice = vec![0usize; per_prime.len()];
    loop {
        let max_len = per_prime
            .iter()
            .zip(&choice)
            .map(|((_, parts), &c)| parts[c].len())
            .max()
            .unwrap_or(0);
        let mut factors = vec![1u64; max_len];
        for ((p, parts), &c) in per_prime.iter().zip(&choice) {
            for (j, &e) in parts[c].iter().enumerate() {
                factors[j] *= p.pow(e);
            }
        }
        factors.reverse();
        groups.push(FiniteAbelianGroup::new(factors)?);

        // advance the mixed-radix choice vector
        let mut i = 0;
        loop {
            if i == choice.len() {
                groups.sort_by(|a, b| {
                    (a.rank(), &a.factors).cmp(&(b.rank(), &b.factors))
                });
                return Ok(groups);
            }
            choice[i] += 1;
            if choice[i] < per_prime[i].1.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum SetRepr {
    /// Bitmask indexed by canonical element index.
    Dense(Vec<u64>),
    /// Sorted list of canonical element indices.
    Sorted(Vec<u64>),
}

/// A subset of a finite abelian group.
///
/// Uses a dense bitmask for small groups (constant-time membership for the
/// search engine) and a sorted index list for large ones. Members are unique
/// and always valid in the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementSet {
    group: FiniteAbelianGroup,
    repr: SetRepr,
    len: usize,
}

impl ElementSet {
    pub fn new(group: FiniteAbelianGroup) -> Self {
        let repr = if group.order() <= DENSE_LIMIT {
            SetRepr::Dense(vec![0u64; (group.order() as usize).div_ceil(64)])
        } else {
            SetRepr::Sorted(Vec::new())
        };
        Self { group, repr, len: 0 }
    }

    pub fn from_indices<I: IntoIterator<Item = u64>>(
        group: FiniteAbelianGroup,
        indices: I,
    ) -> Self {
        let mut set = Self::new(group);
        for i in indices {
            set.insert_index(i);
        }
        set
    }

    pub fn from_elements(group: FiniteAbelianGroup, elements: &[GroupElement]) -> Result<Self> {
        let mut set = Self::new(group);
        for g in elements {
            set.insert(g)?;
        }
        Ok(set)
    }

    /// The whole group as a set.
    pub fn full(group: FiniteAbelianGroup) -> Self {
        let order = group.order();
        Self::from_indices(group, 0..order)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Insert by canonical index. Returns true if the index was new.
    pub fn insert_index(&mut self, idx: u64) -> bool {
        assert!(idx < self.group.order(), "index {idx} out of range");
        let added = match &mut self.repr {
            SetRepr::Dense(words) => {
                let (w, b) = (idx as usize / 64, idx as usize % 64);
                let was = words[w] >> b & 1 == 1;
                words[w] |= 1 << b;
                !was
            }
            SetRepr::Sorted(list) => match list.binary_search(&idx) {
                Ok(_) => false,
                Err(pos) => {
                    list.insert(pos, idx);
                    true
                }
            },
        };
        if added {
            self.len += 1;
        }
        added
    }

    pub fn insert(&mut self, g: &GroupElement) -> Result<bool> {
        self.group.check_member(g)?;
        Ok(self.insert_index(self.group.index_of(g)))
    }

    pub fn contains_index(&self, idx: u64) -> bool {
        match &self.repr {
            SetRepr::Dense(words) => {
                idx < self.group.order() && words[idx as usize / 64] >> (idx % 64) & 1 == 1
            }
            SetRepr::Sorted(list) => list.binary_search(&idx).is_ok(),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.group.contains(g) && self.contains_index(self.group.index_of(g))
    }

    /// Member indices in increasing (canonical) order.
    pub fn indices(&self) -> Vec<u64> {
        match &self.repr {
            SetRepr::Dense(words) => {
                let mut out = Vec::with_capacity(self.len);
                for (w, &word) in words.iter().enumerate() {
                    let mut rest = word;
                    while rest != 0 {
                        let b = rest.trailing_zeros() as u64;
                        out.push(w as u64 * 64 + b);
                        rest &= rest - 1;
                    }
                }
                out
            }
            SetRepr::Sorted(list) => list.clone(),
        }
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = GroupElement> + '_ {
        self.indices().into_iter().map(|i| self.group.element_at(i))
    }

    /// Sum of all members; the identity for the empty set.
    pub fn sum(&self) -> GroupElement {
        let mut acc = self.group.identity();
        for g in self.iter() {
            acc = self.group.add(&acc, &g).unwrap();
        }
        acc
    }

    /// Members serialized in element syntax, comma separated, e.g. "0,1,3"
    /// or "0:1,1:3". The empty set serializes as "-".
    pub fn element_list_string(&self) -> String {
        if self.is_empty() {
            return "-".to_string();
        }
        let parts: Vec<String> = self.iter().map(|g| g.to_string()).collect();
        parts.join(",")
    }

    /// Inverse of [`element_list_string`](Self::element_list_string).
    pub fn parse_element_list(group: FiniteAbelianGroup, s: &str) -> Result<Self> {
        let mut set = Self::new(group);
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(set);
        }
        for part in s.split(',') {
            let g = set.group.parse_element(part)?;
            set.insert(&g)?;
        }
        Ok(set)
    }
}

/// Sum of the elements of a subset; the identity for the empty set.
pub fn sigma_set(set: &ElementSet) -> GroupElement {
    set.sum()
}
