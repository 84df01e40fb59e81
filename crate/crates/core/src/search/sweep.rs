//! Sweep of the best prefix construction over `k` at fixed `n` and `ell`.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::bounds::{exact_g_closed, lower_g_with, upper_g, BinomialTable, ValueTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub lower: BigUint,
    /// Smallest `j` attaining `lower`.
    pub best_j: usize,
    pub exact: Option<BigUint>,
    pub upper: Option<BigUint>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// First `k` whose `best_j` reaches `j`, if any.
    pub fn transition(&self, j: usize) -> Option<usize> {
        self.rows.iter().find(|r| r.best_j >= j).map(|r| r.k)
    }

    /// Every `k` where `best_j` reaches a new value, paired with that value.
    pub fn transitions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut last = None;
        for r in &self.rows {
            if last.map_or(true, |j| r.best_j > j) {
                out.push((r.k, r.best_j));
                last = Some(r.best_j);
            }
        }
        out
    }

    /// Values of `k` where `best_j` is smaller than at `k - 1`.
    pub fn monotonicity_violations(&self) -> Vec<usize> {
        self.rows
            .windows(2)
            .filter(|w| w[1].best_j < w[0].best_j)
            .map(|w| w[1].k)
            .collect()
    }

    /// CSV with header `n,k,ell,lower,exact,upper,best_j`; unknown cells are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,ell,lower,exact,upper,best_j\n");
        let opt = |v: &Option<BigUint>| v.as_ref().map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n,
                r.k,
                r.ell,
                r.lower,
                opt(&r.exact),
                opt(&r.upper),
                r.best_j
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Evaluates the lower bound for each `k` in `k_from..=k_to`. Exact values
/// come from `table` or from a closed form when one applies.
pub fn m_sweep(
    ell: usize,
    n: usize,
    k_from: usize,
    k_to: usize,
    table: Option<&ValueTable>,
) -> Result<SweepReport> {
    if k_from > k_to || k_to > n {
        return Err(Error::Regime(format!(
            "need k_from <= k_to <= n, got {k_from}..={k_to} with n={n}"
        )));
    }
    if 3 * k_from < ell {
        return Err(Error::Regime(format!("need 3k >= ell, got k={k_from}, ell={ell}")));
    }
    let binoms = BinomialTable::new(n, k_to);
    let rows = (k_from..=k_to)
        .map(|k| {
            let lb = lower_g_with(&binoms, n, k, ell)?;
            let exact = table
                .and_then(|t| t.get(n, k, ell).cloned())
                .or_else(|| exact_g_closed(n, k, ell).map(|(v, _)| v));
            Ok(SweepRow {
                n,
                k,
                ell,
                lower: lb.value,
                best_j: lb.best_j,
                exact,
                upper: upper_g(n, k, ell).map(|(v, _)| v),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { rows })
}
