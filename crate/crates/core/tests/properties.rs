use std::collections::HashSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use tri_intersect::bounds::{binom, f_j_ell, lower_g};
use tri_intersect::constructions::uniform_j_family;
use tri_intersect::format::{parse_family, write_family};
use tri_intersect::search::{exact_g, Method, SearchOptions};
use tri_intersect::sets::{
    complement_family, d_lower_bound_from_size, d_triple, dual_d, is_member_h, k_subsets,
    triple_profile,
};
use tri_intersect::shifting::{
    canonical_shift, canonical_upclosed_shifted, family_weight, is_shifted, is_upward_closed, tau,
    upward_shift_closure, ShiftPair,
};
use tri_intersect::{Family, GroundSet, Subset};

fn ground(n: usize) -> GroundSet {
    GroundSet::new(n).unwrap()
}

/// Three pairwise distinct subsets of `[n]`.
fn triple() -> impl Strategy<Value = (usize, [Subset; 3])> {
    (2usize..=24)
        .prop_flat_map(|n| {
            let lim = 1u64 << n;
            (Just(n), 0..lim, 0..lim, 0..lim)
        })
        .prop_filter("distinct", |(_, a, b, c)| a != b && b != c && a != c)
        .prop_map(|(n, a, b, c)| {
            let g = ground(n);
            let s = |m| Subset::from_bits(g, m).unwrap();
            (n, [s(a), s(b), s(c)])
        })
}

/// A family on `[n]`, `n <= 6`, either `k`-uniform or arbitrary.
fn family() -> impl Strategy<Value = Family> {
    (2usize..=6, any::<bool>(), any::<prop::sample::Index>())
        .prop_flat_map(|(n, uniform, kidx)| {
            let g = ground(n);
            let pool: Vec<Subset> = if uniform {
                k_subsets(g, 1 + kidx.index(n - 1))
            } else {
                (0..1u64 << n).map(|m| Subset::from_bits(g, m).unwrap()).collect()
            };
            let len = pool.len();
            (Just(g), Just(pool), prop::collection::btree_set(0..len, 0..=len.min(9)))
        })
        .prop_map(|(g, pool, picks)| Family::new(g, picks.into_iter().map(|i| pool[i])).unwrap())
}

fn family_with_ell() -> impl Strategy<Value = (Family, usize)> {
    (family(), 0usize..=6)
}

fn masks(f: &Family) -> HashSet<u64> {
    f.iter().map(|s| s.bits()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn profile_identities((n, [a, b, c]) in triple()) {
        let p = triple_profile(&a, &b, &c).unwrap();
        let s = a.len() + b.len() + c.len();
        prop_assert_eq!(p.f0 + p.f1 + p.f2 + p.f3, n);
        prop_assert_eq!(p.f1 + 2 * p.f2 + 3 * p.f3, s);
        prop_assert_eq!(p.s, s);
        let d = d_triple(&a, &b, &c).unwrap();
        let pairwise = (a.bits() & b.bits()).count_ones()
            + (b.bits() & c.bits()).count_ones()
            + (c.bits() & a.bits()).count_ones();
        prop_assert_eq!(d, pairwise as usize);
        prop_assert_eq!(p.d(), d);
    }

    #[test]
    fn duality_identities((n, [a, b, c]) in triple()) {
        let d = d_triple(&a, &b, &c).unwrap();
        let s = a.len() + b.len() + c.len();
        prop_assert_eq!(d + dual_d(&a, &b, &c).unwrap(), 2 * s);
        let comp = dual_d(&a.complement(), &b.complement(), &c.complement()).unwrap();
        prop_assert_eq!(d + comp, 3 * n);
        prop_assert!(d >= d_lower_bound_from_size(s, n).unwrap());
    }

    #[test]
    fn score_is_symmetric((_n, [a, b, c]) in triple()) {
        let d = d_triple(&a, &b, &c).unwrap();
        for (x, y, z) in [(&a, &c, &b), (&b, &a, &c), (&b, &c, &a), (&c, &a, &b), (&c, &b, &a)] {
            prop_assert_eq!(d_triple(x, y, z).unwrap(), d);
        }
    }

    #[test]
    fn complement_family_is_involution(f in family()) {
        let c = complement_family(&f);
        prop_assert_eq!(c.len(), f.len());
        prop_assert_eq!(complement_family(&c), f);
    }

    #[test]
    fn shifts_preserve_size_and_membership((f, ell) in family_with_ell()) {
        prop_assume!(is_member_h(&f, ell));
        let w = family_weight(&f);
        for pair in ShiftPair::all(f.ground()) {
            let g = tau(&f, pair).unwrap();
            prop_assert_eq!(g.len(), f.len());
            prop_assert!(is_member_h(&g, ell));
            if g != f {
                prop_assert!(family_weight(&g) < w);
            }
        }
    }

    #[test]
    fn canonical_shift_is_idempotent(f in family()) {
        let s = canonical_shift(&f);
        prop_assert_eq!(s.len(), f.len());
        prop_assert!(is_shifted(&s));
        prop_assert_eq!(canonical_shift(&s), s.clone());
        for pair in ShiftPair::all(f.ground()) {
            prop_assert_eq!(tau(&s, pair).unwrap(), s.clone());
        }
    }

    #[test]
    fn shifted_means_dominance_closed(f in family()) {
        // oracle: replacing any element e > 1 by a missing e - 1 stays inside the family
        let present = masks(&f);
        let closed = present.iter().all(|&m| {
            (1..f.ground().n()).all(|b| {
                let (hi, lo) = (1u64 << b, 1u64 << (b - 1));
                m & hi == 0 || m & lo != 0 || present.contains(&(m ^ hi ^ lo))
            })
        });
        prop_assert_eq!(is_shifted(&f), closed);
    }

    #[test]
    fn upward_closure_keeps_size_and_membership((f, ell) in family_with_ell()) {
        let up = upward_shift_closure(&f);
        prop_assert_eq!(up.len(), f.len());
        prop_assert!(is_upward_closed(&up));
        let both = canonical_upclosed_shifted(&f);
        prop_assert_eq!(both.len(), f.len());
        prop_assert!(is_upward_closed(&both) && is_shifted(&both));
        if is_member_h(&f, ell) {
            prop_assert!(is_member_h(&up, ell));
            prop_assert!(is_member_h(&both, ell));
        }
    }

    #[test]
    fn text_format_round_trips(f in family()) {
        let text = write_family(&f);
        prop_assert_eq!(parse_family(&text).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prefix_triples_score_at_least_ell(ell in 0usize..=9, extra in 0usize..=2) {
        // oracle: every triple of distinct j-subsets of [f(j, ell)]
        let j = ell.div_ceil(3).max(1) + extra;
        let f = f_j_ell(j, ell).unwrap();
        prop_assume!(f >= j && f <= 10);
        let sets = k_subsets(ground(f), j);
        for (i, a) in sets.iter().enumerate() {
            for (jj, b) in sets.iter().enumerate().skip(i + 1) {
                for c in sets.iter().skip(jj + 1) {
                    prop_assert!(d_triple(a, b, c).unwrap() >= ell);
                }
            }
        }
    }

    #[test]
    fn lower_bound_is_best_construction(n in 3usize..=10, k in 1usize..=5, ell in 0usize..=6) {
        prop_assume!(k <= n && 3 * k >= ell);
        let lb = lower_g(n, k, ell).unwrap();
        // oracle: build every admissible construction and count its members
        let best = (ell.div_ceil(3)..=k)
            .filter(|&j| f_j_ell(j, ell).unwrap() <= n)
            .map(|j| (uniform_j_family(n, k, ell, j).unwrap().len(), j))
            .fold(None::<(usize, usize)>, |acc, (size, j)| match acc {
                Some((s, _)) if s >= size => acc,
                _ => Some((size, j)),
            });
        if let Some((size, j)) = best {
            prop_assert_eq!(lb.value.clone(), BigUint::from(size));
            prop_assert_eq!(lb.best_j, j);
        }
        prop_assert!(lb.value <= binom(n as i64, k as i64));
    }

    #[test]
    fn search_methods_agree(n in 3usize..=7, k in 1usize..=4, ell in 0usize..=7) {
        prop_assume!(k <= n && binom(n as i64, k as i64) <= BigUint::from(35u32));
        let opts = SearchOptions::default();
        let b = exact_g(n, k, ell, Method::Brute, &opts).unwrap();
        let s = exact_g(n, k, ell, Method::ShiftedBb, &opts).unwrap();
        prop_assert_eq!(b.value, s.value);
        prop_assert!(is_member_h(&b.witness, ell) && is_member_h(&s.witness, ell));
        prop_assert!(is_shifted(&s.witness));
    }
}
