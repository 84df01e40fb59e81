//! Ground sets, subsets and families, plus the triple score `d` and its dual.
//!
//! A [`Subset`] is a single-word bit mask over `[n]` with `n <= 64`; element
//! `i` lives in bit `i - 1`. A [`Family`] keeps its members in canonical
//! order: by size, then lexicographically on the ascending element lists.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 64;

/// The universe `[n] = {1, ..., n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GroundSet(u8);

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if (1..=MAX_GROUND).contains(&n) {
            Ok(GroundSet(n as u8))
        } else {
            Err(Error::GroundSize(n))
        }
    }

    pub fn n(self) -> usize {
        self.0 as usize
    }

    /// Bit mask with one bit per element of `[n]`.
    pub fn mask(self) -> u64 {
        if self.0 as usize == MAX_GROUND {
            u64::MAX
        } else {
            (1u64 << self.0) - 1
        }
    }

    fn check(self, other: GroundSet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroundMismatch {
                left: self.n(),
                right: other.n(),
            })
        }
    }
}

impl TryFrom<usize> for GroundSet {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        GroundSet::new(n)
    }
}

impl From<GroundSet> for usize {
    fn from(g: GroundSet) -> usize {
        g.n()
    }
}

/// An immutable subset of `[n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    ground: GroundSet,
    bits: u64,
}

impl Subset {
    /// Builds a subset from its elements. Order does not matter; repeats are rejected.
    pub fn new(ground: GroundSet, elements: &[u32]) -> Result<Self> {
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e as usize > ground.n() {
                return Err(Error::ElementOutOfRange {
                    element: e as u64,
                    n: ground.n(),
                });
            }
            let bit = 1u64 << (e - 1);
            if bits & bit != 0 {
                return Err(Error::DuplicateElement(e));
            }
            bits |= bit;
        }
        Ok(Subset { ground, bits })
    }

    pub fn from_bits(ground: GroundSet, bits: u64) -> Result<Self> {
        let stray = bits & !ground.mask();
        if stray != 0 {
            return Err(Error::ElementOutOfRange {
                element: stray.trailing_zeros() as u64 + 1,
                n: ground.n(),
            });
        }
        Ok(Subset { ground, bits })
    }

    pub(crate) fn from_bits_unchecked(ground: GroundSet, bits: u64) -> Self {
        debug_assert_eq!(bits & !ground.mask(), 0);
        Subset { ground, bits }
    }

    pub fn empty(ground: GroundSet) -> Self {
        Subset { ground, bits: 0 }
    }

    pub fn full(ground: GroundSet) -> Self {
        Subset {
            ground,
            bits: ground.mask(),
        }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, element: u32) -> bool {
        element >= 1 && (element as usize) <= self.ground.n() && self.bits >> (element - 1) & 1 == 1
    }

    /// Elements in ascending order.
    pub fn elements(&self) -> Elements {
        Elements(self.bits)
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.elements().collect()
    }

    pub fn complement(&self) -> Subset {
        Subset {
            ground: self.ground,
            bits: !self.bits & self.ground.mask(),
        }
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.bits & !other.bits == 0
    }

    /// `self ∩ [m]`; the ground set is unchanged.
    pub fn restrict_to_prefix(&self, m: usize) -> Subset {
        let mask = if m >= MAX_GROUND {
            u64::MAX
        } else {
            (1u64 << m) - 1
        };
        Subset {
            ground: self.ground,
            bits: self.bits & mask,
        }
    }

    /// Element sum.
    pub fn weight(&self) -> u64 {
        self.elements().map(u64::from).sum()
    }
}

/// Ascending element iterator over a [`Subset`].
#[derive(Debug, Clone)]
pub struct Elements(u64);

impl Iterator for Elements {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() + 1;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Elements {}

/// Canonical member order on raw masks: size first, then lexicographic on
/// the ascending element lists.
pub(crate) fn canonical_cmp(a: u64, b: u64) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| {
        let diff = a ^ b;
        if diff == 0 {
            Ordering::Equal
        } else if a & (diff & diff.wrapping_neg()) != 0 {
            // `a` holds the smallest element where the two lists part ways.
            Ordering::Less
        } else {
            Ordering::Greater
        }
    })
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ground
            .cmp(&other.ground)
            .then_with(|| canonical_cmp(self.bits, other.bits))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// A finite collection of distinct subsets of one ground set.
#[derive(Debug, Clone)]
pub struct Family {
    ground: GroundSet,
    members: Vec<Subset>,
    uniform_size: Option<usize>,
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.members == other.members
    }
}

impl Eq for Family {}

impl Family {
    pub fn new(ground: GroundSet, members: impl IntoIterator<Item = Subset>) -> Result<Self> {
        let mut members: Vec<Subset> = members.into_iter().collect();
        for m in &members {
            ground.check(m.ground)?;
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMember(w[0].to_string()));
        }
        Ok(Family {
            ground,
            members,
            uniform_size: None,
        })
    }

    /// A family declared `k`-uniform; every member must have `k` elements.
    pub fn uniform(
        ground: GroundSet,
        k: usize,
        members: impl IntoIterator<Item = Subset>,
    ) -> Result<Self> {
        Family::new(ground, members)?.with_uniform_size(k)
    }

    pub fn empty(ground: GroundSet) -> Self {
        Family {
            ground,
            members: Vec::new(),
            uniform_size: None,
        }
    }

    /// Builds a family from raw masks already known to be distinct and inside `[n]`.
    pub(crate) fn from_masks(ground: GroundSet, masks: impl IntoIterator<Item = u64>) -> Self {
        let mut members: Vec<Subset> = masks
            .into_iter()
            .map(|b| Subset::from_bits_unchecked(ground, b))
            .collect();
        members.sort_unstable();
        debug_assert!(members.windows(2).all(|w| w[0] != w[1]));
        Family {
            ground,
            members,
            uniform_size: None,
        }
    }

    pub fn with_uniform_size(mut self, k: usize) -> Result<Self> {
        if let Some(bad) = self.members.iter().find(|m| m.len() != k) {
            return Err(Error::NotUniform {
                member: bad.to_string(),
                expected: k,
                actual: bad.len(),
            });
        }
        self.uniform_size = Some(k);
        Ok(self)
    }

    pub(crate) fn set_uniform_size(&mut self, k: Option<usize>) {
        debug_assert!(k.map_or(true, |k| self.members.iter().all(|m| m.len() == k)));
        self.uniform_size = k;
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn uniform_size(&self) -> Option<usize> {
        self.uniform_size
    }

    /// Members in canonical order.
    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Subset> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &Subset) -> bool {
        self.members.binary_search(s).is_ok()
    }

    pub(crate) fn masks(&self) -> Vec<u64> {
        self.members.iter().map(Subset::bits).collect()
    }

    pub(crate) fn mask_set(&self) -> HashSet<u64> {
        self.members.iter().map(Subset::bits).collect()
    }

    /// Sum of member weights.
    pub fn weight(&self) -> u64 {
        self.members.iter().map(Subset::weight).sum()
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a Subset;
    type IntoIter = std::slice::Iter<'a, Subset>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// Per-element coverage counts of a triple `(A, B, C)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleProfile {
    pub f0: usize,
    pub f1: usize,
    pub f2: usize,
    pub f3: usize,
    /// `|A| + |B| + |C|`.
    pub s: usize,
}

impl TripleProfile {
    pub(crate) fn from_masks(n: usize, a: u64, b: u64, c: u64) -> Self {
        let all = a & b & c;
        let at_least_two = (a & b) | (b & c) | (c & a);
        let f3 = all.count_ones() as usize;
        let f2 = (at_least_two & !all).count_ones() as usize;
        let f1 = ((a ^ b ^ c) & !all).count_ones() as usize;
        let s = (a.count_ones() + b.count_ones() + c.count_ones()) as usize;
        TripleProfile {
            f0: n - f1 - f2 - f3,
            f1,
            f2,
            f3,
            s,
        }
    }

    pub fn d(&self) -> usize {
        3 * self.f3 + self.f2
    }

    pub fn dual_d(&self) -> usize {
        2 * self.f1 + 3 * self.f2 + 3 * self.f3
    }
}

/// All `k`-subsets of `[n]` as masks, in canonical (lexicographic) order.
pub(crate) fn k_subset_masks(n: usize, k: usize) -> Vec<u64> {
    use itertools::Itertools;
    if k > n {
        return Vec::new();
    }
    (0..n as u32)
        .combinations(k)
        .map(|c| c.iter().fold(0u64, |acc, &b| acc | 1 << b))
        .collect()
}

/// All `k`-subsets of `[n]` in canonical order.
pub fn k_subsets(ground: GroundSet, k: usize) -> Vec<Subset> {
    k_subset_masks(ground.n(), k)
        .into_iter()
        .map(|b| Subset::from_bits_unchecked(ground, b))
        .collect()
}

/// Every subset of `[n]` in canonical order. Only sensible for small `n`.
pub fn all_subsets(ground: GroundSet) -> Vec<Subset> {
    (0..=ground.n()).flat_map(|k| k_subsets(ground, k)).collect()
}

/// `|A∩B| + |B∩C| + |C∩A|` on raw masks, no checks.
#[inline]
pub(crate) fn score(a: u64, b: u64, c: u64) -> u32 {
    (a & b).count_ones() + (b & c).count_ones() + (c & a).count_ones()
}

/// Dual score `2s - d` on raw masks, no checks.
#[inline]
pub(crate) fn dual_score(a: u64, b: u64, c: u64) -> u32 {
    2 * (a.count_ones() + b.count_ones() + c.count_ones()) - score(a, b, c)
}

/// A constraint every triple of distinct members must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TripleConstraint {
    /// `d(A, B, C) >= ell`.
    MinScore(usize),
    /// Dual score at most `x`.
    MaxDualScore(usize),
}

impl TripleConstraint {
    #[inline]
    pub(crate) fn allows(&self, a: u64, b: u64, c: u64) -> bool {
        match *self {
            TripleConstraint::MinScore(ell) => score(a, b, c) as usize >= ell,
            TripleConstraint::MaxDualScore(x) => dual_score(a, b, c) as usize <= x,
        }
    }

    /// Exhaustive check over all triples of distinct members.
    pub fn holds(&self, family: &Family) -> bool {
        match *self {
            TripleConstraint::MinScore(ell) => is_member_h(family, ell),
            TripleConstraint::MaxDualScore(x) => is_member_hbar(family, x),
        }
    }
}

pub fn intersection_size(a: &Subset, b: &Subset) -> Result<usize> {
    a.ground.check(b.ground)?;
    Ok((a.bits & b.bits).count_ones() as usize)
}

fn check_triple(a: &Subset, b: &Subset, c: &Subset) -> Result<()> {
    a.ground.check(b.ground)?;
    a.ground.check(c.ground)?;
    if a == b || b == c || a == c {
        return Err(Error::NonDistinctTriple);
    }
    Ok(())
}

/// The triple score `d(A, B, C)`. The three sets must be pairwise distinct.
pub fn d_triple(a: &Subset, b: &Subset, c: &Subset) -> Result<usize> {
    check_triple(a, b, c)?;
    Ok(score(a.bits, b.bits, c.bits) as usize)
}

pub fn triple_profile(a: &Subset, b: &Subset, c: &Subset) -> Result<TripleProfile> {
    check_triple(a, b, c)?;
    Ok(TripleProfile::from_masks(a.ground.n(), a.bits, b.bits, c.bits))
}

/// `2 f1 + 3 f2 + 3 f3`; equals `2s - d`.
pub fn dual_d(a: &Subset, b: &Subset, c: &Subset) -> Result<usize> {
    Ok(triple_profile(a, b, c)?.dual_d())
}

/// Replaces every member by its complement in `[n]`.
pub fn complement_family(family: &Family) -> Family {
    let mut out = Family::from_masks(
        family.ground,
        family.members.iter().map(|m| m.complement().bits),
    );
    out.set_uniform_size(family.uniform_size.map(|k| family.ground.n() - k));
    out
}

/// First triple (in canonical index order) whose score falls below `ell`.
pub fn find_h_violation(family: &Family, ell: usize) -> Option<[Subset; 3]> {
    let m = &family.members;
    let ell = ell as u32;
    let mut near: Vec<usize> = Vec::new();
    for i in 0..m.len() {
        let a = m[i].bits;
        // both other members of a bad triple meet `a` in fewer than `ell` points
        near.clear();
        near.extend((i + 1..m.len()).filter(|&j| (a & m[j].bits).count_ones() < ell));
        for (jj, &j) in near.iter().enumerate() {
            let b = m[j].bits;
            let need = ell - (a & b).count_ones();
            for &k in &near[jj + 1..] {
                let c = m[k].bits;
                if (c & a).count_ones() + (c & b).count_ones() < need {
                    return Some([m[i], m[j], m[k]]);
                }
            }
        }
    }
    None
}

/// First triple whose dual score exceeds `x`.
pub fn find_hbar_violation(family: &Family, x: usize) -> Option<[Subset; 3]> {
    let m = &family.members;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            for k in j + 1..m.len() {
                if dual_score(m[i].bits, m[j].bits, m[k].bits) as usize > x {
                    return Some([m[i], m[j], m[k]]);
                }
            }
        }
    }
    None
}

/// Whether every triple of distinct members has `d >= ell`. Vacuous below three members.
pub fn is_member_h(family: &Family, ell: usize) -> bool {
    find_h_violation(family, ell).is_none()
}

/// Whether every triple of distinct members has dual score `<= x`.
pub fn is_member_hbar(family: &Family, x: usize) -> bool {
    find_hbar_violation(family, x).is_none()
}

/// Smallest triple score any three sets with size sum `s` on `[n]` can have.
pub fn d_lower_bound_from_size(s: usize, n: usize) -> Result<usize> {
    if s > 3 * n {
        return Err(Error::SizeSumOutOfRange { s, n });
    }
    Ok(if s <= 2 * n {
        s.saturating_sub(n)
    } else {
        2 * s - 3 * n
    })
}
