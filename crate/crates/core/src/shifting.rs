//! Compression (shifting) of set families.
//!
//! `tau(F, (x, y))` moves `x` to `y < x` in every member that contains `x`
//! but not `y`, unless the moved set is already present. Repeated shifting
//! strictly lowers the family weight, so it reaches a fixed point: a family
//! that is closed downward under the coordinatewise dominance order within
//! each size level. The non-uniform variant interleaves upward shifting
//! (replace a member with an unused superset) until the family is both
//! shifted and upward-closed.

use std::collections::HashSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::sets::{score, Family, GroundSet, Subset};

/// A shift from `x` down to `y`, with `1 <= y < x <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftPair {
    x: u32,
    y: u32,
}

impl ShiftPair {
    pub fn new(ground: GroundSet, x: u32, y: u32) -> Result<Self> {
        if y >= 1 && y < x && x as usize <= ground.n() {
            Ok(ShiftPair { x, y })
        } else {
            Err(Error::InvalidShift { x, y, n: ground.n() })
        }
    }

    pub fn x(&self) -> u32 {
        self.x
    }

    pub fn y(&self) -> u32 {
        self.y
    }

    /// All valid pairs on `[n]`, ordered by `(y, x)`.
    pub fn all(ground: GroundSet) -> impl Iterator<Item = ShiftPair> {
        let n = ground.n() as u32;
        (1..n).flat_map(move |y| (y + 1..=n).map(move |x| ShiftPair { x, y }))
    }
}

fn tau_masks(members: &[u64], present: &HashSet<u64>, pair: ShiftPair) -> Option<Vec<u64>> {
    let xb = 1u64 << (pair.x - 1);
    let yb = 1u64 << (pair.y - 1);
    let mut changed = false;
    let out = members
        .iter()
        .map(|&m| {
            if m & xb != 0 && m & yb == 0 {
                let moved = m ^ xb ^ yb;
                if !present.contains(&moved) {
                    changed = true;
                    return moved;
                }
            }
            m
        })
        .collect();
    changed.then_some(out)
}

/// Applies the shift `pair` to every member of `family`.
pub fn tau(family: &Family, pair: ShiftPair) -> Result<Family> {
    if pair.x as usize > family.ground().n() {
        return Err(Error::InvalidShift {
            x: pair.x,
            y: pair.y,
            n: family.ground().n(),
        });
    }
    let masks = family.masks();
    Ok(match tau_masks(&masks, &family.mask_set(), pair) {
        Some(out) => {
            let mut f = Family::from_masks(family.ground(), out);
            f.set_uniform_size(family.uniform_size());
            f
        }
        None => family.clone(),
    })
}

pub fn weight(set: &Subset) -> u64 {
    set.weight()
}

pub fn family_weight(family: &Family) -> u64 {
    family.weight()
}

/// Coordinatewise comparison `I <= H` of two equal-size sets.
pub fn dominates(lower: &Subset, upper: &Subset) -> Result<bool> {
    if lower.ground() != upper.ground() {
        return Err(Error::GroundMismatch {
            left: lower.ground().n(),
            right: upper.ground().n(),
        });
    }
    if lower.len() != upper.len() {
        return Err(Error::SizeMismatch(lower.len(), upper.len()));
    }
    Ok(lower.elements().zip(upper.elements()).all(|(i, h)| i <= h))
}

/// Immediate predecessors of `m` in the dominance order: replace some
/// element `e` by `e - 1` when `e - 1` is missing.
pub(crate) fn lower_covers(m: u64) -> impl Iterator<Item = u64> {
    // bits b of m with b - 1 not in m, skipping element 1
    let mut movable = m & !(m << 1) & !1;
    std::iter::from_fn(move || {
        if movable == 0 {
            return None;
        }
        let bit = movable & movable.wrapping_neg();
        movable ^= bit;
        Some(m ^ bit ^ (bit >> 1))
    })
}

fn shifted_masks(present: &HashSet<u64>) -> bool {
    present
        .iter()
        .all(|&m| lower_covers(m).all(|c| present.contains(&c)))
}

/// Whether every level of the family is closed under dominance predecessors.
pub fn is_shifted(family: &Family) -> bool {
    shifted_masks(&family.mask_set())
}

/// Whether every superset of every member is a member.
pub fn is_upward_closed(family: &Family) -> bool {
    let present = family.mask_set();
    let full = family.ground().mask();
    present.iter().all(|&m| {
        let mut free = full & !m;
        while free != 0 {
            let b = free & free.wrapping_neg();
            if !present.contains(&(m | b)) {
                return false;
            }
            free ^= b;
        }
        true
    })
}

fn shift_until_stable(ground: GroundSet, mut masks: Vec<u64>) -> Vec<u64> {
    let mut present: HashSet<u64> = masks.iter().copied().collect();
    loop {
        let mut changed = false;
        for pair in ShiftPair::all(ground) {
            if let Some(out) = tau_masks(&masks, &present, pair) {
                masks = out;
                present = masks.iter().copied().collect();
                changed = true;
            }
        }
        if !changed {
            return masks;
        }
    }
}

/// Shifts along pairs in `(y, x)` order, full passes, until nothing moves.
pub fn canonical_shift(family: &Family) -> Family {
    let masks = shift_until_stable(family.ground(), family.masks());
    let mut out = Family::from_masks(family.ground(), masks);
    out.set_uniform_size(family.uniform_size());
    out
}

/// Largest superset of `m` outside `present` (maximal size, then
/// lexicographically smallest), if any.
fn largest_unused_superset(ground: GroundSet, m: u64, present: &HashSet<u64>) -> Option<u64> {
    let free: Vec<u32> = Subset::from_bits_unchecked(ground, ground.mask() & !m)
        .elements()
        .collect();
    for add in (1..=free.len()).rev() {
        for combo in free.iter().combinations(add) {
            let g = combo.iter().fold(m, |acc, &&e| acc | 1 << (e - 1));
            if !present.contains(&g) {
                return Some(g);
            }
        }
    }
    None
}

fn upward_close_masks(ground: GroundSet, mut masks: Vec<u64>) -> Vec<u64> {
    let mut present: HashSet<u64> = masks.iter().copied().collect();
    loop {
        masks.sort_unstable_by(|&a, &b| crate::sets::canonical_cmp(a, b));
        let next = masks.iter().enumerate().find_map(|(i, &m)| {
            largest_unused_superset(ground, m, &present).map(|g| (i, m, g))
        });
        match next {
            Some((i, m, g)) => {
                present.remove(&m);
                present.insert(g);
                masks[i] = g;
            }
            None => return masks,
        }
    }
}

/// Repeated upward shifting until the family is upward-closed.
///
/// At each step the first member in canonical order that still has an
/// unused superset is replaced by its largest unused superset.
pub fn upward_shift_closure(family: &Family) -> Family {
    let masks = upward_close_masks(family.ground(), family.masks());
    Family::from_masks(family.ground(), masks)
}

/// Alternates full upward closure and full shifting until the family is
/// both upward-closed and shifted.
pub fn canonical_upclosed_shifted(family: &Family) -> Family {
    let ground = family.ground();
    let mut masks = family.masks();
    loop {
        masks = upward_close_masks(ground, masks);
        masks = shift_until_stable(ground, masks);
        let f = Family::from_masks(ground, masks);
        if is_upward_closed(&f) {
            return f;
        }
        masks = f.masks();
    }
}

/// A triple of `family` whose traces on `[cutoff]` score below `ell`.
/// Traces may coincide as sets; the triple is still scored.
pub fn restriction_violation(family: &Family, cutoff: usize, ell: usize) -> Option<[Subset; 3]> {
    let m = family.members();
    let r: Vec<u64> = m.iter().map(|s| s.restrict_to_prefix(cutoff).bits()).collect();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            for k in j + 1..m.len() {
                if (score(r[i], r[j], r[k]) as usize) < ell {
                    return Some([m[i], m[j], m[k]]);
                }
            }
        }
    }
    None
}

/// Checks that the traces of all triples on `[3k - ell]` still score at
/// least `ell`. Only meaningful for `ell` in `{2, 3}`.
pub fn restriction_in_h(family: &Family, k: usize, ell: usize) -> Result<bool> {
    if !(2..=3).contains(&ell) {
        return Err(Error::Regime(format!(
            "restriction to [3k-ell] is only guaranteed for ell in {{2,3}}, got ell={ell}"
        )));
    }
    if 3 * k < ell {
        return Err(Error::Regime(format!("need 3k >= ell, got k={k}, ell={ell}")));
    }
    if let Some(bad) = family.iter().find(|m| m.len() != k) {
        return Err(Error::NotUniform {
            member: bad.to_string(),
            expected: k,
            actual: bad.len(),
        });
    }
    Ok(restriction_violation(family, 3 * k - ell, ell).is_none())
}

/// Calls `visit` on every shifted `k`-uniform family on `[n]` with at most
/// `max_members` members (the empty family included).
pub fn for_each_shifted_family(
    ground: GroundSet,
    k: usize,
    max_members: usize,
    mut visit: impl FnMut(&Family),
) {
    let cands = crate::sets::k_subset_masks(ground.n(), k);
    let index: std::collections::HashMap<u64, usize> =
        cands.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let covers: Vec<Vec<usize>> = cands
        .iter()
        .map(|&m| lower_covers(m).map(|c| index[&c]).collect())
        .collect();
    let mut chosen = vec![false; cands.len()];
    let mut stack = Vec::new();

    fn walk(
        i: usize,
        cands: &[u64],
        covers: &[Vec<usize>],
        chosen: &mut [bool],
        stack: &mut Vec<u64>,
        max_members: usize,
        ground: GroundSet,
        k: usize,
        visit: &mut dyn FnMut(&Family),
    ) {
        if i == cands.len() {
            let mut f = Family::from_masks(ground, stack.iter().copied());
            f.set_uniform_size(Some(k));
            visit(&f);
            return;
        }
        if stack.len() < max_members && covers[i].iter().all(|&c| chosen[c]) {
            chosen[i] = true;
            stack.push(cands[i]);
            walk(i + 1, cands, covers, chosen, stack, max_members, ground, k, visit);
            stack.pop();
            chosen[i] = false;
        }
        walk(i + 1, cands, covers, chosen, stack, max_members, ground, k, visit);
    }

    walk(
        0,
        &cands,
        &covers,
        &mut chosen,
        &mut stack,
        max_members,
        ground,
        k,
        &mut visit,
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{all_subsets, is_member_h, k_subsets};

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    fn fam(n: usize, sets: &[&[u32]]) -> Family {
        Family::new(g(n), sets.iter().map(|e| Subset::new(g(n), e).unwrap())).unwrap()
    }

    fn pair(n: usize, x: u32, y: u32) -> ShiftPair {
        ShiftPair::new(g(n), x, y).unwrap()
    }

    /// Direct reading of the definition: every same-size dominated set is present.
    fn shifted_by_definition(f: &Family) -> bool {
        f.iter().all(|h| {
            k_subsets(f.ground(), h.len())
                .iter()
                .filter(|i| dominates(i, h).unwrap())
                .all(|i| f.contains(i))
        })
    }

    #[test]
    fn shift_pair_validation() {
        assert!(ShiftPair::new(g(4), 2, 2).is_err());
        assert!(ShiftPair::new(g(4), 1, 2).is_err());
        assert!(ShiftPair::new(g(4), 5, 1).is_err());
        assert!(ShiftPair::new(g(4), 2, 0).is_err());
        assert_eq!(ShiftPair::all(g(4)).count(), 6);
        let big = pair(6, 6, 1);
        assert!(tau(&fam(4, &[&[1]]), big).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&fam(3, &[&[2, 3]]), pair(3, 2, 1)).unwrap(), fam(3, &[&[1, 3]]));
        let blocked = fam(3, &[&[2, 3], &[1, 3]]);
        assert_eq!(tau(&blocked, pair(3, 2, 1)).unwrap(), blocked);
        assert_eq!(
            tau(&fam(3, &[&[1, 2], &[2, 3]]), pair(3, 2, 1)).unwrap(),
            fam(3, &[&[1, 2], &[1, 3]])
        );
        let u = Family::uniform(g(3), 2, vec![Subset::new(g(3), &[2, 3]).unwrap()]).unwrap();
        assert_eq!(tau(&u, pair(3, 3, 1)).unwrap().uniform_size(), Some(2));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(&Subset::new(g(3), &[1, 3]).unwrap()), 4);
        assert_eq!(weight(&Subset::empty(g(3))), 0);
        assert_eq!(family_weight(&fam(3, &[&[1, 2], &[2, 3]])), 8);
    }

    #[test]
    fn dominance_examples() {
        let s = |e: &[u32]| Subset::new(g(6), e).unwrap();
        assert!(dominates(&s(&[1, 2]), &s(&[1, 3])).unwrap());
        assert!(!dominates(&s(&[2, 3]), &s(&[1, 4])).unwrap());
        assert!(dominates(&s(&[1, 2, 6]), &s(&[1, 2, 6])).unwrap());
        assert_eq!(dominates(&s(&[1]), &s(&[1, 2])), Err(Error::SizeMismatch(1, 2)));
    }

    #[test]
    fn lower_covers_match_definition() {
        for h in k_subsets(g(6), 3) {
            let mut got: Vec<u64> = lower_covers(h.bits()).collect();
            got.sort_unstable();
            let mut want: Vec<u64> = k_subsets(g(6), 3)
                .iter()
                .filter(|i| **i != h && dominates(i, &h).unwrap())
                .filter(|i| {
                    // covers: nothing strictly between
                    !k_subsets(g(6), 3).iter().any(|j| {
                        *j != h && j != *i && dominates(i, j).unwrap() && dominates(j, &h).unwrap()
                    })
                })
                .map(Subset::bits)
                .collect();
            want.sort_unstable();
            assert_eq!(got, want, "covers of {h}");
        }
    }

    #[test]
    fn is_shifted_examples() {
        assert!(is_shifted(&fam(3, &[&[1, 2], &[1, 3]])));
        assert!(!is_shifted(&fam(3, &[&[1, 3]])));
        assert!(is_shifted(&fam(3, &[&[1], &[1, 2]])));
        assert!(is_shifted(&Family::empty(g(3))));
    }

    #[test]
    fn canonical_shift_examples() {
        assert_eq!(canonical_shift(&fam(3, &[&[1, 3]])), fam(3, &[&[1, 2]]));
        let f = fam(3, &[&[2, 3], &[1, 3]]);
        let out = canonical_shift(&f);
        assert_eq!(out, fam(3, &[&[1, 2], &[1, 3]]));
        assert_eq!((f.weight(), out.weight()), (9, 7));
        let shifted = fam(5, &[&[1, 2], &[1, 3], &[2, 3], &[1, 4]]);
        assert_eq!(canonical_shift(&shifted), shifted);
    }

    #[test]
    fn upward_closure_examples() {
        assert_eq!(upward_shift_closure(&fam(2, &[&[1]])), fam(2, &[&[1, 2]]));
        let power = Family::new(g(2), all_subsets(g(2))).unwrap();
        assert_eq!(upward_shift_closure(&power), power);
        assert_eq!(upward_shift_closure(&fam(2, &[&[1], &[2]])), fam(2, &[&[2], &[1, 2]]));
        assert!(!is_upward_closed(&fam(2, &[&[1]])));
        assert!(is_upward_closed(&fam(3, &[&[1, 2], &[1, 2, 3]])));
    }

    #[test]
    fn upclosed_shifted_examples() {
        assert_eq!(canonical_upclosed_shifted(&fam(2, &[&[2]])), fam(2, &[&[1, 2]]));
        let power = Family::new(g(3), all_subsets(g(3))).unwrap();
        assert_eq!(canonical_upclosed_shifted(&power), power);
        let out = canonical_upclosed_shifted(&fam(2, &[&[1], &[2]]));
        assert_eq!(out.len(), 2);
        assert!(is_shifted(&out) && is_upward_closed(&out));
        assert_eq!(out, fam(2, &[&[1], &[1, 2]]));
    }

    #[test]
    fn restriction_examples() {
        let single = Family::uniform(g(6), 3, vec![Subset::new(g(6), &[4, 5, 6]).unwrap()]).unwrap();
        assert!(restriction_in_h(&single, 3, 2).unwrap());
        assert!(matches!(restriction_in_h(&single, 3, 4), Err(Error::Regime(_))));
        assert!(matches!(
            restriction_in_h(&fam(6, &[&[1]]), 3, 2),
            Err(Error::NotUniform { .. })
        ));
    }

    #[test]
    fn shifted_family_enumeration_matches_definition() {
        let mut count = 0;
        for_each_shifted_family(g(5), 2, usize::MAX, |f| {
            assert!(shifted_by_definition(f));
            count += 1;
        });
        // brute count: subfamilies of ([5] choose 2) that are shifted
        let all = k_subsets(g(5), 2);
        let brute = (0u32..1 << all.len())
            .filter(|mask| {
                let f = Family::new(
                    g(5),
                    (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]),
                )
                .unwrap();
                shifted_by_definition(&f)
            })
            .count();
        assert_eq!(count, brute);
    }

    #[test]
    fn claim_restriction_holds_on_small_shifted_families() {
        for n in 4..=6 {
            for k in 2..=3 {
                for_each_shifted_family(g(n), k, usize::MAX, |f| {
                    for ell in 2..=3 {
                        if 3 * k >= ell && is_member_h(f, ell) {
                            assert!(restriction_in_h(f, k, ell).unwrap(), "n={n} k={k} ell={ell}");
                        }
                    }
                });
            }
        }
    }

    #[test]
    fn shifted_iff_no_pair_lowers_weight() {
        for_each_shifted_family(g(4), 2, usize::MAX, |f| {
            for p in ShiftPair::all(g(4)) {
                assert_eq!(tau(f, p).unwrap().weight(), f.weight());
            }
        });
        let f = fam(4, &[&[2, 4]]);
        assert!(ShiftPair::all(g(4)).any(|p| tau(&f, p).unwrap().weight() < f.weight()));
    }
}
