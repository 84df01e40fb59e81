//! Closed-form bounds for `g(n, k, ell)` and `h(n, ell)`.
//!
//! All values are exact big integers. Results that only hold in a parameter
//! regime either fail with [`Error::Regime`] or come back as `None`, never
//! as a guess.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `C(a, b)`, zero whenever `a < 0`, `b < 0` or `b > a`.
pub fn binom(a: i64, b: i64) -> BigUint {
    if a < 0 || b < 0 || b > a {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(a as u64), BigUint::from(b as u64))
}

/// Pascal's triangle `C(a, b)` for `a <= max_a`, `b <= max_b`, for repeated
/// evaluation of sums of products of binomials.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<BigUint>>,
    max_b: usize,
}

impl BinomialTable {
    pub fn new(max_a: usize, max_b: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_a + 1);
        for a in 0..=max_a {
            let width = a.min(max_b) + 1;
            let mut row = Vec::with_capacity(width);
            for b in 0..width {
                if b == 0 || b == a {
                    row.push(BigUint::one());
                } else {
                    let prev = &rows[a - 1];
                    let left = &prev[b - 1];
                    let right = prev.get(b).cloned().unwrap_or_default();
                    row.push(left + right);
                }
            }
            rows.push(row);
        }
        BinomialTable { rows, max_b }
    }

    pub fn get(&self, a: i64, b: i64) -> BigUint {
        if a < 0 || b < 0 || b > a {
            return BigUint::zero();
        }
        let (au, bu) = (a as usize, b as usize);
        if au < self.rows.len() && bu <= self.max_b {
            self.rows[au][bu].clone()
        } else {
            binom(a, b)
        }
    }
}

fn regime(msg: impl Into<String>) -> Error {
    Error::Regime(msg.into())
}

/// Upper bound for `ell = 2`: `C(n+1, k-1) + C(n, k-2)`, valid for `n >= 3k-2 >= 4`.
pub fn upper_g2(n: usize, k: usize) -> Result<BigUint> {
    if k < 2 {
        return Err(regime(format!("3k-2 >= 4 fails for k={k}")));
    }
    if n < 3 * k - 2 {
        return Err(regime(format!("n >= 3k-2 fails: n={n}, 3k-2={}", 3 * k - 2)));
    }
    let (n, k) = (n as i64, k as i64);
    Ok(binom(n + 1, k - 1) + binom(n, k - 2))
}

/// Upper bound for `ell = 3`: `C(n, k-1) + 2 C(n, k-3) + 3 C(n-1, k-3)`, valid
/// for `n >= 3k-3 >= 3`.
pub fn upper_g3(n: usize, k: usize) -> Result<BigUint> {
    if k < 2 {
        return Err(regime(format!("3k-3 >= 3 fails for k={k}")));
    }
    if n < 3 * k - 3 {
        return Err(regime(format!("n >= 3k-3 fails: n={n}, 3k-3={}", 3 * k - 3)));
    }
    let (n, k) = (n as i64, k as i64);
    Ok(binom(n, k - 1) + binom(n, k - 3) * 2u32 + binom(n - 1, k - 3) * 3u32)
}

/// The closed-form upper bound for `ell` in `{2, 3}` when its regime holds.
pub fn upper_g(n: usize, k: usize, ell: usize) -> Option<(BigUint, UpperSource)> {
    match ell {
        2 => upper_g2(n, k).ok().map(|v| (v, UpperSource::Thm1)),
        3 => upper_g3(n, k).ok().map(|v| (v, UpperSource::Thm2)),
        _ => None,
    }
}

/// Prefix length so that any three `j`-subsets of it score at least `ell`:
/// `2j - ceil(ell/3)` while `3j < 2 ell`, else `3j - ell`.
pub fn f_j_ell(j: usize, ell: usize) -> Result<usize> {
    if 3 * j < ell {
        return Err(regime(format!("need 3j >= ell, got j={j}, ell={ell}")));
    }
    Ok(if 3 * j < 2 * ell {
        2 * j - ell.div_ceil(3)
    } else {
        3 * j - ell
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBound {
    pub value: BigUint,
    /// Smallest maximizing `j`.
    pub best_j: usize,
}

/// Number of `k`-subsets of `[n]` meeting `[f]` in at least `j` elements.
pub fn prefix_family_size(table: &BinomialTable, n: usize, k: usize, f: usize, j: usize) -> BigUint {
    let (n, k, f) = (n as i64, k as i64, f as i64);
    (j as i64..=k)
        .map(|i| table.get(f, i) * table.get(n - f, k - i))
        .sum()
}

/// Best prefix construction: the maximum over `ceil(ell/3) <= j <= k` of
/// `sum_{i=j..k} C(f, i) C(n-f, k-i)` with `f = f_j_ell(j, ell)`.
pub fn lower_g(n: usize, k: usize, ell: usize) -> Result<LowerBound> {
    lower_g_with(&BinomialTable::new(n, k), n, k, ell)
}

/// [`lower_g`] against a caller-supplied binomial table.
pub fn lower_g_with(table: &BinomialTable, n: usize, k: usize, ell: usize) -> Result<LowerBound> {
    if 3 * k < ell {
        return Err(regime(format!("need 3k >= ell, got k={k}, ell={ell}")));
    }
    let mut best: Option<LowerBound> = None;
    for j in ell.div_ceil(3)..=k {
        let f = f_j_ell(j, ell)?;
        let value = prefix_family_size(table, n, k, f, j);
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(LowerBound { value, best_j: j });
        }
    }
    Ok(best.expect("j range is non-empty when 3k >= ell"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UpperSource {
    Thm1,
    Thm2,
    Recursion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactSource {
    /// `3k <= 2n` and `ell <= 3k - n`.
    Trivial,
    /// `2n < 3k` and `ell <= 6k - 3n`.
    Remark,
    /// `ell` in `{2, 3}`, `k >= 2` and `n >= 4k^3`.
    Thm4,
    /// `n = 3k - ell`.
    Base,
    /// Exhaustive search.
    Search,
    /// Non-uniform closed form above its threshold.
    Thm5,
}

fn trivial_regime(n: i64, k: i64, ell: i64) -> bool {
    3 * k <= 2 * n && ell <= 3 * k - n
}

/// Three `k`-sets on `[n]` with `3k > 2n` score at least `2·3k - 3n`.
fn dense_regime(n: i64, k: i64, ell: i64) -> bool {
    2 * n < 3 * k && ell <= 6 * k - 3 * n
}

/// At `k = 1` two disjoint singletons already beat `C(n-1, 0) = 1`.
fn thm4_regime(n: i64, k: i64, ell: i64) -> bool {
    (ell == 2 || ell == 3) && k >= 2 && n >= 4 * k * k * k
}

fn base_regime(n: i64, k: i64, ell: i64) -> bool {
    n == 3 * k - ell
}

/// Exact `g(n, k, ell)` where a closed form is known, tagged with its source.
/// Regimes are tried in the order trivial, dense, large-`n`, base.
pub fn exact_g_closed(n: usize, k: usize, ell: usize) -> Option<(BigUint, ExactSource)> {
    let (ni, ki, li) = (n as i64, k as i64, ell as i64);
    if k > n {
        return None;
    }
    if trivial_regime(ni, ki, li) {
        Some((binom(ni, ki), ExactSource::Trivial))
    } else if dense_regime(ni, ki, li) {
        Some((binom(ni, ki), ExactSource::Remark))
    } else if thm4_regime(ni, ki, li) {
        Some((binom(ni - 1, ki - 1), ExactSource::Thm4))
    } else if base_regime(ni, ki, li) {
        Some((binom(ni, ki), ExactSource::Base))
    } else {
        None
    }
}

/// Exact or upper values of `g(n, k, ell)` keyed by `(n, k, ell)`.
#[derive(Debug, Clone, Default)]
pub struct ValueTable {
    values: HashMap<(usize, usize, usize), BigUint>,
}

impl ValueTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, n: usize, k: usize, ell: usize, value: BigUint) {
        self.values.insert((n, k, ell), value);
    }

    pub fn get(&self, n: usize, k: usize, ell: usize) -> Option<&BigUint> {
        self.values.get(&(n, k, ell))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn recursion_regime(n: usize, k: usize, ell: usize) -> Result<()> {
    if !(ell == 2 || ell == 3) {
        return Err(regime(format!("recursion needs ell in {{2,3}}, got {ell}")));
    }
    if k < 3 {
        return Err(regime(format!("recursion needs k >= 3, got {k}")));
    }
    if n + ell <= 3 * k {
        return Err(regime(format!("recursion needs n > 3k-ell, got n={n}")));
    }
    Ok(())
}

/// `g(n-1, k, ell) + g(n-1, k-1, ell)` with both terms read from `table`.
pub fn recursion_upper(n: usize, k: usize, ell: usize, table: &ValueTable) -> Result<BigUint> {
    recursion_regime(n, k, ell)?;
    let left = table
        .get(n - 1, k, ell)
        .ok_or_else(|| regime(format!("table lacks g({}, {k}, {ell})", n - 1)))?;
    let right = table
        .get(n - 1, k - 1, ell)
        .ok_or_else(|| regime(format!("table lacks g({}, {}, {ell})", n - 1, k - 1)))?;
    Ok(left + right)
}

/// `x = 6p + q` with `0 <= q <= 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HParams {
    pub x: usize,
    pub p: usize,
    pub q: usize,
}

impl HParams {
    pub fn from_x(x: usize) -> Self {
        HParams { x, p: x / 6, q: x % 6 }
    }
}

/// `2^(3p+2) p^2 + p + 1`.
pub fn h_threshold(p: usize) -> BigUint {
    (BigUint::one() << (3 * p + 2)) * BigUint::from(p * p) + BigUint::from(p + 1)
}

/// Size of the level-`(p+1)` construction for `x = 6p + q`, `p >= 1`; this is
/// the closed-form value of `h(n, 3n - x)` above the threshold.
pub fn h_construction_size(n: usize, params: HParams) -> BigUint {
    let (n, p) = (n as i64, params.p as i64);
    let base: BigUint = (0..=p).map(|i| binom(n, i)).sum();
    match params.q {
        0 | 1 => base,
        2 => base + binom(n - 2, p - 1),
        3 | 4 => base + binom(n - 1, p),
        _ => base + binom(n - 1, p) + binom(n - 2, p),
    }
}

/// Closed-form `h(n, 3n - x)`: the small-`x` values for `p = 0`, and the
/// level-`(p+1)` formula for `p >= 1` once `n` reaches the threshold.
pub fn h_closed(n: usize, x: usize) -> Option<BigUint> {
    let params = HParams::from_x(x);
    if params.p == 0 {
        let value: u64 = if x <= 3 { 2 } else { 3 };
        // only 2^n subsets exist
        let cap = if n >= 63 { u64::MAX } else { 1u64 << n };
        return Some(BigUint::from(value.min(cap)));
    }
    if BigUint::from(n) >= h_threshold(params.p) {
        Some(h_construction_size(n, params))
    } else {
        None
    }
}

/// The root `(5 - sqrt 13) / 6` of `3γ³ - 8γ² + 6γ - 1` in `(0, 1/3)`.
pub fn alpha1() -> f64 {
    (5.0 - 13f64.sqrt()) / 6.0
}

pub fn alpha1_polynomial(gamma: f64) -> f64 {
    ((3.0 * gamma - 8.0) * gamma + 6.0) * gamma - 1.0
}

fn decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerEntry {
    #[serde(serialize_with = "decimal")]
    pub value: BigUint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpperEntry {
    #[serde(serialize_with = "decimal")]
    pub value: BigUint,
    pub source: UpperSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactEntry {
    #[serde(serialize_with = "decimal")]
    pub value: BigUint,
    pub source: ExactSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Precondition {
    pub name: String,
    pub holds: bool,
}

fn pre(name: &str, holds: bool) -> Precondition {
    Precondition {
        name: name.to_string(),
        holds,
    }
}

/// All closed-form information for one parameter point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub ell: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<LowerEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<UpperEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactEntry>,
    pub preconditions: Vec<Precondition>,
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Bound report for `g(n, k, ell)`. Exact and recursive values are taken
/// from `table` when it has them.
pub fn bound_report_g(n: usize, k: usize, ell: usize, table: Option<&ValueTable>) -> BoundReport {
    let (ni, ki, li) = (n as i64, k as i64, ell as i64);
    let lower = lower_g(n, k, ell).ok().map(|lb| LowerEntry {
        value: lb.value,
        j: Some(lb.best_j),
    });

    let mut upper = upper_g(n, k, ell).map(|(value, source)| UpperEntry { value, source });
    if let Some(t) = table {
        if let Ok(rec) = recursion_upper(n, k, ell, t) {
            if upper.as_ref().map_or(true, |u| rec < u.value) {
                upper = Some(UpperEntry {
                    value: rec,
                    source: UpperSource::Recursion,
                });
            }
        }
    }

    let exact = exact_g_closed(n, k, ell)
        .map(|(value, source)| ExactEntry { value, source })
        .or_else(|| {
            table.and_then(|t| t.get(n, k, ell)).map(|v| ExactEntry {
                value: v.clone(),
                source: ExactSource::Search,
            })
        });

    let preconditions = vec![
        pre("3k >= ell", 3 * k >= ell),
        pre("n >= 3k-2 >= 4", k >= 2 && n + 2 >= 3 * k),
        pre("n >= 3k-3 >= 3", k >= 2 && n + 3 >= 3 * k),
        pre("3k <= 2n and ell <= 3k-n", trivial_regime(ni, ki, li)),
        pre("2n < 3k and ell <= 6k-3n", dense_regime(ni, ki, li)),
        pre("ell in {2,3}, k >= 2 and n >= 4k^3", thm4_regime(ni, ki, li)),
        pre("n = 3k-ell", base_regime(ni, ki, li)),
        pre("ell in {2,3}, k >= 3, n > 3k-ell", recursion_regime(n, k, ell).is_ok()),
    ];

    BoundReport {
        n,
        k: Some(k),
        ell: li,
        x: None,
        lower,
        upper,
        exact,
        preconditions,
    }
}

/// Bound report for `h(n, 3n - x)`.
pub fn bound_report_h(n: usize, x: usize) -> BoundReport {
    let params = HParams::from_x(x);
    let exact = h_closed(n, x).map(|value| ExactEntry {
        value,
        source: if params.p == 0 {
            ExactSource::Remark
        } else {
            ExactSource::Thm5
        },
    });
    let constructible = params.p >= 1 && n >= params.p + 2;
    let lower = if constructible {
        Some(LowerEntry {
            value: h_construction_size(n, params),
            j: None,
        })
    } else {
        exact.as_ref().map(|e| LowerEntry {
            value: e.value.clone(),
            j: None,
        })
    };
    BoundReport {
        n,
        k: None,
        ell: 3 * n as i64 - x as i64,
        x: Some(x),
        lower,
        upper: None,
        exact,
        preconditions: vec![
            pre("p >= 1", params.p >= 1),
            pre("n >= p+2", n >= params.p + 2),
            pre(
                "n >= 2^(3p+2) p^2 + p + 1",
                params.p >= 1 && BigUint::from(n) >= h_threshold(params.p),
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(5, 2), big(10));
        assert_eq!(binom(3, 7), big(0));
        assert_eq!(binom(0, 0), big(1));
        assert_eq!(binom(-1, 0), big(0));
        assert_eq!(binom(4, -1), big(0));
        assert_eq!(binom(100, 50).to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn binomial_table_agrees_with_direct() {
        let t = BinomialTable::new(30, 12);
        for a in -2..=35 {
            for b in -2..=20 {
                assert_eq!(t.get(a, b), binom(a, b), "C({a},{b})");
            }
        }
    }

    #[test]
    fn upper_examples() {
        assert_eq!(upper_g2(10, 3).unwrap(), big(65));
        assert_eq!(upper_g2(4, 2).unwrap(), big(6));
        assert_eq!(upper_g2(7, 3).unwrap(), big(35));
        assert!(matches!(upper_g2(6, 3), Err(Error::Regime(_))));
        assert!(matches!(upper_g2(10, 1), Err(Error::Regime(_))));

        assert_eq!(upper_g3(10, 3).unwrap(), big(50));
        for n in 3..20 {
            assert_eq!(upper_g3(n, 2).unwrap(), big(n as u64));
        }
        assert_eq!(upper_g3(6, 3).unwrap(), big(20));
        assert!(upper_g3(5, 3).is_err());
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_j_ell(1, 2).unwrap(), 1);
        assert_eq!(f_j_ell(2, 2).unwrap(), 4);
        assert_eq!(f_j_ell(2, 3).unwrap(), 3);
        assert!(f_j_ell(1, 4).is_err());
        for ell in [3usize, 6, 9, 12] {
            let j = 2 * ell / 3;
            let first = 2 * j - ell.div_ceil(3);
            let second = 3 * j - ell;
            assert_eq!(first, second);
            assert_eq!(f_j_ell(j, ell).unwrap(), second);
        }
    }

    #[test]
    fn lower_examples() {
        assert_eq!(
            lower_g(10, 3, 2).unwrap(),
            LowerBound {
                value: big(40),
                best_j: 2
            }
        );
        let lb = lower_g(100, 5, 2).unwrap();
        assert_eq!(lb.best_j, 1);
        assert_eq!(lb.value, binom(99, 4));
        let lb = lower_g(6, 3, 3).unwrap();
        assert_eq!(lb.value, big(20));
        assert_eq!(lb.best_j, 3);
        assert_eq!(lower_g(5, 2, 3).unwrap().value, big(4));
        assert!(lower_g(5, 2, 7).is_err());
    }

    #[test]
    fn exact_closed_examples() {
        assert_eq!(exact_g_closed(4, 2, 2), Some((big(6), ExactSource::Trivial)));
        assert_eq!(exact_g_closed(32, 2, 2), Some((big(31), ExactSource::Thm4)));
        assert_eq!(exact_g_closed(32, 2, 3), Some((big(31), ExactSource::Thm4)));
        assert_eq!(exact_g_closed(7, 3, 2).map(|e| e.0), Some(big(35)));
        assert_eq!(exact_g_closed(4, 3, 6), Some((big(4), ExactSource::Remark)));
        // the looser condition ell <= 9k - 5n would claim C(4,3) here
        assert_eq!(exact_g_closed(4, 3, 7), None);
        assert_eq!(exact_g_closed(10, 3, 2), None);
        assert_eq!(exact_g_closed(3, 5, 2), None);
    }

    #[test]
    fn recursion_examples() {
        let mut t = ValueTable::new();
        t.insert(9, 3, 2, upper_g2(9, 3).unwrap());
        t.insert(9, 2, 2, upper_g2(9, 2).unwrap());
        assert_eq!(recursion_upper(10, 3, 2, &t).unwrap(), big(65));
        assert_eq!(recursion_upper(10, 3, 2, &t).unwrap(), upper_g2(10, 3).unwrap());
        assert!(recursion_upper(10, 3, 4, &t).is_err());
        assert!(recursion_upper(7, 3, 2, &t).is_err());
        assert!(recursion_upper(10, 2, 2, &t).is_err());
        assert!(recursion_upper(11, 3, 2, &t).is_err());
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_closed(40, 6), Some(big(41)));
        assert_eq!(h_closed(40, 11), Some(big(118)));
        assert_eq!(h_closed(100, 2), Some(big(2)));
        assert_eq!(h_closed(100, 5), Some(big(3)));
        assert_eq!(h_closed(1, 5), Some(big(2)));
        assert_eq!(h_closed(33, 6), None);
        assert_eq!(h_closed(34, 6), Some(big(35)));
        assert_eq!(h_threshold(1), big(34));
        assert_eq!(h_threshold(2), big(1027));
    }

    #[test]
    fn h_coincidence_and_monotone() {
        for p in 1..=2usize {
            let n = h_threshold(p).to_string().parse::<usize>().unwrap();
            assert_eq!(h_closed(n, 6 * p + 3), h_closed(n, 6 * p + 4));
        }
        let n = 1027;
        let vals: Vec<BigUint> = (6..=17).map(|x| h_closed(n, x).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn alpha1_root() {
        let a = alpha1();
        assert!(alpha1_polynomial(a).abs() < 1e-12);
        assert!(a > 0.0 && a < 1.0 / 3.0);
        assert!((a - 0.232408).abs() < 1e-6);
    }

    #[test]
    fn report_json() {
        let r = bound_report_g(10, 3, 2, None);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["lower"]["value"], "40");
        assert_eq!(v["lower"]["j"], 2);
        assert_eq!(v["upper"]["value"], "65");
        assert_eq!(v["upper"]["source"], "thm1");
        assert!(v.get("exact").is_none());

        let r = bound_report_g(4, 2, 2, None);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["exact"]["value"], "6");
        assert_eq!(v["exact"]["source"], "trivial");

        let r = bound_report_h(40, 11);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["exact"]["value"], "118");
        assert_eq!(v["exact"]["source"], "thm5");
        assert_eq!(v["ell"], 109);
    }

    #[test]
    fn report_prefers_tighter_recursion() {
        let mut t = ValueTable::new();
        t.insert(7, 3, 2, big(35));
        t.insert(7, 2, 2, big(6));
        let r = bound_report_g(8, 3, 2, Some(&t));
        let u = r.upper.unwrap();
        assert_eq!(u.source, UpperSource::Recursion);
        assert_eq!(u.value, big(41));
    }
}
