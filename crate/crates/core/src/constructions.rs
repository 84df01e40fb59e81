//! Generators for the extremal families and the `ell = 4` restriction
//! counterexample, each paired with its predicted size.

use num_bigint::BigUint;

use crate::bounds::{f_j_ell, h_construction_size, prefix_family_size, BinomialTable, HParams};
use crate::error::{Error, Result};
use crate::sets::{complement_family, k_subset_masks, Family, GroundSet, Subset, TripleConstraint};
use crate::shifting::dominates;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionSpec {
    /// k-sets meeting `[f(j, ell)]` in at least `j` elements.
    UniformJ { n: usize, k: usize, ell: usize, j: usize },
    /// All k-sets through element 1.
    Star { n: usize, k: usize },
    /// Sets of size at most `p`, plus a level-`(p+1)` part chosen by `q`.
    NonuniformDual { n: usize, x: usize },
    /// Complements of the dual construction.
    NonuniformPrimal { n: usize, x: usize },
    /// Dominance down-set of `{1,2,6}, {1,3,6}, {1,4,5}` on `[6]`.
    CounterexampleL4,
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<Family> {
        match *self {
            ConstructionSpec::UniformJ { n, k, ell, j } => uniform_j_family(n, k, ell, j),
            ConstructionSpec::Star { n, k } => star_family(n, k),
            ConstructionSpec::NonuniformDual { n, x } => nonuniform_dual_family(n, x),
            ConstructionSpec::NonuniformPrimal { n, x } => nonuniform_primal_family(n, x),
            ConstructionSpec::CounterexampleL4 => Ok(counterexample_l4()),
        }
    }

    /// Closed-form size of [`build`](Self::build)'s output.
    pub fn predicted_size(&self) -> Result<BigUint> {
        match *self {
            ConstructionSpec::UniformJ { n, k, ell, j } => {
                check_uniform_j(n, k, ell, j)?;
                let f = f_j_ell(j, ell)?;
                Ok(prefix_family_size(&BinomialTable::new(n, k), n, k, f, j))
            }
            ConstructionSpec::Star { n, k } => {
                GroundSet::new(n)?;
                Ok(crate::bounds::binom(n as i64 - 1, k as i64 - 1))
            }
            ConstructionSpec::NonuniformDual { n, x } | ConstructionSpec::NonuniformPrimal { n, x } => {
                let params = check_nonuniform(n, x)?;
                Ok(h_construction_size(n, params))
            }
            ConstructionSpec::CounterexampleL4 => Ok(BigUint::from(counterexample_l4().len())),
        }
    }

    pub fn guarantee(&self) -> TripleConstraint {
        match *self {
            ConstructionSpec::UniformJ { ell, .. } => TripleConstraint::MinScore(ell),
            ConstructionSpec::Star { .. } => TripleConstraint::MinScore(3),
            ConstructionSpec::NonuniformDual { x, .. } => TripleConstraint::MaxDualScore(x),
            ConstructionSpec::NonuniformPrimal { n, x } => {
                TripleConstraint::MinScore((3 * n).saturating_sub(x))
            }
            ConstructionSpec::CounterexampleL4 => TripleConstraint::MinScore(4),
        }
    }
}

fn check_uniform_j(n: usize, k: usize, ell: usize, j: usize) -> Result<usize> {
    GroundSet::new(n)?;
    if j < ell.div_ceil(3) || j > k {
        return Err(Error::Regime(format!(
            "need ceil(ell/3) <= j <= k, got j={j}, k={k}, ell={ell}"
        )));
    }
    let f = f_j_ell(j, ell)?;
    if f > n {
        return Err(Error::Regime(format!("need f(j,ell) = {f} <= n = {n}")));
    }
    Ok(f)
}

/// All `k`-subsets of `[n]` with at least `j` elements in `[f(j, ell)]`.
pub fn uniform_j_family(n: usize, k: usize, ell: usize, j: usize) -> Result<Family> {
    let f = check_uniform_j(n, k, ell, j)?;
    let ground = GroundSet::new(n)?;
    let prefix = if f == 64 { u64::MAX } else { (1u64 << f) - 1 };
    let masks = k_subset_masks(n, k)
        .into_iter()
        .filter(|m| (m & prefix).count_ones() as usize >= j);
    let mut fam = Family::from_masks(ground, masks);
    fam.set_uniform_size(Some(k));
    Ok(fam)
}

/// All `k`-subsets of `[n]` containing 1.
pub fn star_family(n: usize, k: usize) -> Result<Family> {
    let ground = GroundSet::new(n)?;
    let masks = k_subset_masks(n, k).into_iter().filter(|m| m & 1 == 1);
    let mut fam = Family::from_masks(ground, masks);
    fam.set_uniform_size(Some(k));
    Ok(fam)
}

fn check_nonuniform(n: usize, x: usize) -> Result<HParams> {
    GroundSet::new(n)?;
    let params = HParams::from_x(x);
    if params.p == 0 {
        return Err(Error::Regime(format!(
            "x = {x} gives p = 0; the level construction needs x >= 6"
        )));
    }
    if n < params.p + 2 {
        return Err(Error::Regime(format!("need n >= p+2 = {}, got n={n}", params.p + 2)));
    }
    Ok(params)
}

/// Every set of size at most `p`, plus these `(p+1)`-sets depending on `q`:
/// none for `q` in `{0,1}`, those containing `{1,2}` for `q = 2`, those
/// containing 1 for `q` in `{3,4}`, and those meeting `{1,2}` for `q = 5`.
pub fn nonuniform_dual_family(n: usize, x: usize) -> Result<Family> {
    let HParams { p, q, .. } = check_nonuniform(n, x)?;
    let ground = GroundSet::new(n)?;
    let low = (0..=p).flat_map(|i| k_subset_masks(n, i));
    let level: Box<dyn Fn(u64) -> bool> = match q {
        0 | 1 => Box::new(|_| false),
        2 => Box::new(|m| m & 0b11 == 0b11),
        3 | 4 => Box::new(|m| m & 1 == 1),
        _ => Box::new(|m| m & 0b11 != 0),
    };
    let top = k_subset_masks(n, p + 1).into_iter().filter(|&m| level(m));
    Ok(Family::from_masks(ground, low.chain(top)))
}

/// Complement family of [`nonuniform_dual_family`]; every triple scores at
/// least `3n - x`.
pub fn nonuniform_primal_family(n: usize, x: usize) -> Result<Family> {
    Ok(complement_family(&nonuniform_dual_family(n, x)?))
}

/// The three generators of [`counterexample_l4`].
pub fn counterexample_generators() -> [Subset; 3] {
    let g = GroundSet::new(6).expect("valid ground");
    [
        Subset::new(g, &[1, 2, 6]).expect("valid set"),
        Subset::new(g, &[1, 3, 6]).expect("valid set"),
        Subset::new(g, &[1, 4, 5]).expect("valid set"),
    ]
}

/// Every 3-subset of `[6]` dominated by one of the generators. It scores at
/// least 4 on every triple, yet its trace on `[5]` does not.
pub fn counterexample_l4() -> Family {
    let g = GroundSet::new(6).expect("valid ground");
    let gens = counterexample_generators();
    let members = crate::sets::k_subsets(g, 3)
        .into_iter()
        .filter(|h| gens.iter().any(|top| dominates(h, top).expect("same size")));
    let mut fam = Family::new(g, members).expect("distinct members");
    fam.set_uniform_size(Some(3));
    fam
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{binom, lower_g};
    use crate::sets::{is_member_h, is_member_hbar};
    use crate::shifting::{is_shifted, restriction_violation};

    #[test]
    fn uniform_j_examples() {
        let f = uniform_j_family(10, 3, 2, 2).unwrap();
        assert_eq!(f.len(), 40);
        assert_eq!(BigUint::from(f.len()), lower_g(10, 3, 2).unwrap().value);
        assert!(is_member_h(&f, 2));

        for n in 3..=9 {
            for k in 1..=3 {
                let s = uniform_j_family(n, k, 2, 1).unwrap();
                assert_eq!(BigUint::from(s.len()), binom(n as i64 - 1, k as i64 - 1));
                assert_eq!(s, star_family(n, k).unwrap());
            }
        }

        assert_eq!(uniform_j_family(6, 3, 3, 3).unwrap().len(), 20);
        assert!(uniform_j_family(5, 3, 3, 3).is_err());
        assert!(uniform_j_family(10, 3, 6, 1).is_err());
        assert!(uniform_j_family(10, 3, 2, 4).is_err());
    }

    #[test]
    fn uniform_j_is_shifted() {
        for (n, k, ell, j) in [(10, 3, 2, 2), (9, 4, 5, 3), (8, 3, 4, 2)] {
            assert!(is_shifted(&uniform_j_family(n, k, ell, j).unwrap()));
        }
    }

    #[test]
    fn dual_examples() {
        let f = nonuniform_dual_family(12, 6).unwrap();
        assert_eq!(f.len(), 13);
        assert!(f.iter().all(|m| m.len() <= 1));

        let f = nonuniform_dual_family(12, 8).unwrap();
        assert_eq!(f.len(), 14);
        assert!(f.contains(&Subset::new(GroundSet::new(12).unwrap(), &[1, 2]).unwrap()));

        let f = nonuniform_dual_family(12, 11).unwrap();
        assert_eq!(f.len(), 34);
        assert!(is_member_hbar(&f, 11));

        assert!(nonuniform_dual_family(12, 5).is_err());
        assert!(nonuniform_dual_family(3, 12).is_err());
    }

    #[test]
    fn primal_examples() {
        let f = nonuniform_primal_family(12, 6).unwrap();
        assert_eq!(f.len(), 13);
        assert!(f.iter().all(|m| m.len() >= 11));
        assert!(is_member_h(&f, 30));

        let f = nonuniform_primal_family(12, 8).unwrap();
        assert_eq!(f.len(), 14);
        let g = GroundSet::new(12).unwrap();
        let missing12: Vec<u32> = (3..=12).collect();
        assert!(f.contains(&Subset::new(g, &missing12).unwrap()));
        assert_eq!(f, complement_family(&nonuniform_dual_family(12, 8).unwrap()));
    }

    #[test]
    fn counterexample_properties() {
        let f = counterexample_l4();
        assert!(is_shifted(&f));
        assert!(is_member_h(&f, 4));
        let bad = restriction_violation(&f, 5, 4).unwrap();
        let r: Vec<u64> = bad.iter().map(|s| s.restrict_to_prefix(5).bits()).collect();
        assert!(crate::sets::score(r[0], r[1], r[2]) < 4);
        let [a, b, c] = counterexample_generators();
        assert!(f.contains(&a) && f.contains(&b) && f.contains(&c));
    }

    #[test]
    fn spec_predictions_match_builds() {
        let specs = [
            ConstructionSpec::UniformJ { n: 10, k: 3, ell: 2, j: 2 },
            ConstructionSpec::Star { n: 7, k: 3 },
            ConstructionSpec::NonuniformDual { n: 12, x: 11 },
            ConstructionSpec::NonuniformPrimal { n: 9, x: 14 },
            ConstructionSpec::CounterexampleL4,
        ];
        for s in specs {
            let f = s.build().unwrap();
            assert_eq!(BigUint::from(f.len()), s.predicted_size().unwrap(), "{s:?}");
            assert!(s.guarantee().holds(&f), "{s:?}");
        }
    }
}
