//! Exact `g(n, k, ell)` and `h(n, ell)` at small `n`.
//!
//! Two methods share one include/exclude engine. `Brute` searches every
//! subfamily of the candidates with no structural assumption. `ShiftedBb`
//! only visits shifted families (dominance down-sets, and for the
//! non-uniform case also upward-closed), which is enough to find the
//! maximum because shifting and upward closure both preserve membership.

mod engine;
mod sweep;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bounds::{binom, upper_g, ValueTable};
use crate::error::{Error, Result};
use crate::sets::{canonical_cmp, k_subset_masks, Family, GroundSet, Subset, TripleConstraint};
use crate::shifting::lower_covers;

use engine::{Bits, Problem, SplitBound};

pub use sweep::{m_sweep, SweepReport, SweepRow};

/// Default limit on the number of candidates for [`Method::Brute`].
pub const DEFAULT_CAP: usize = 40;

/// Hard limit on candidates for any method; the engine keeps an
/// `N x N` table of candidate bitsets.
pub const MAX_CANDIDATES: usize = 512;

/// Largest ground set for the non-uniform canonicalized search.
pub const MAX_H_SHIFTED: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "brute")]
    Brute,
    #[serde(rename = "shifted-bb")]
    ShiftedBb,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::ShiftedBb => "shifted-bb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "brute" => Ok(Method::Brute),
            "shifted-bb" => Ok(Method::ShiftedBb),
            other => Err(format!("unknown method '{other}', expected brute or shifted-bb")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions<'a> {
    /// Candidate limit for brute force.
    pub cap: usize,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
    /// Known values of `g`, used as pruning bounds by the shifted search.
    pub table: Option<&'a ValueTable>,
}

impl Default for SearchOptions<'_> {
    fn default() -> Self {
        SearchOptions {
            cap: DEFAULT_CAP,
            jobs: 1,
            table: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub value: usize,
    pub witness: Family,
    pub method: Method,
    pub nodes_explored: u64,
    pub wall_time: Duration,
}

#[derive(Serialize)]
struct SearchResultJson<'a> {
    value: usize,
    method: &'a str,
    witness: Vec<Vec<u32>>,
    nodes: u64,
    millis: u128,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        let j = SearchResultJson {
            value: self.value,
            method: self.method.as_str(),
            witness: self.witness.iter().map(|s| s.to_vec()).collect(),
            nodes: self.nodes_explored,
            millis: self.wall_time.as_millis(),
        };
        serde_json::to_string(&j).expect("plain data serializes")
    }
}

fn run(
    ground: GroundSet,
    problem: &Problem,
    method: Method,
    jobs: usize,
    started: Instant,
    uniform: Option<usize>,
) -> SearchResult {
    let out = engine::solve_parallel(problem, jobs);
    let mut witness = Family::from_masks(ground, out.chosen.iter().map(|&i| problem.cands[i]));
    if let Some(k) = uniform {
        witness.set_uniform_size(Some(k));
    }
    SearchResult {
        value: witness.len(),
        witness,
        method,
        nodes_explored: out.nodes,
        wall_time: started.elapsed(),
    }
}

fn check_cap(count: usize, cap: usize) -> Result<()> {
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    Ok(())
}

/// Largest subfamily of `candidates` in which every triple of distinct
/// members satisfies `constraint`. Ties go to the least family in canonical
/// member order.
pub fn brute_force_max(
    candidates: &[Subset],
    constraint: TripleConstraint,
    cap: usize,
) -> Result<SearchResult> {
    let started = Instant::now();
    let Some(first) = candidates.first() else {
        return Err(Error::Regime("no candidates".into()));
    };
    let ground = first.ground();
    let mut sorted: Vec<Subset> = candidates.to_vec();
    sorted.sort();
    sorted.dedup();
    for s in &sorted {
        if s.ground() != ground {
            return Err(Error::GroundMismatch {
                left: ground.n(),
                right: s.ground().n(),
            });
        }
    }
    check_cap(sorted.len(), cap.min(MAX_CANDIDATES))?;
    let cands: Vec<u64> = sorted.iter().map(|s| s.bits()).collect();
    let reqs = vec![Vec::new(); cands.len()];
    let problem = Problem::new(cands, reqs, constraint);
    Ok(run(ground, &problem, Method::Brute, 1, started, None))
}

fn to_usize(v: &BigUint) -> usize {
    v.to_usize().unwrap_or(usize::MAX)
}

/// Best known upper bound on `g(n, k, ell)`: a table value, then the
/// theorem bounds, then `C(n, k)`.
fn upper_estimate(n: usize, k: usize, ell: usize, table: Option<&ValueTable>) -> usize {
    let trivial = to_usize(&binom(n as i64, k as i64));
    let mut ub = trivial;
    if let Some(v) = table.and_then(|t| t.get(n, k, ell)) {
        ub = ub.min(to_usize(v));
    }
    if let Some((v, _)) = upper_g(n, k, ell) {
        ub = ub.min(to_usize(&v));
    }
    ub
}

fn check_uniform_args(n: usize, k: usize) -> Result<GroundSet> {
    let ground = GroundSet::new(n)?;
    if k > n {
        return Err(Error::Regime(format!("need k <= n, got k={k}, n={n}")));
    }
    Ok(ground)
}

/// Exact `g(n, k, ell)`, the size of the largest `ell`-good family of
/// `k`-subsets of `[n]`.
pub fn exact_g(
    n: usize,
    k: usize,
    ell: usize,
    method: Method,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let started = Instant::now();
    let ground = check_uniform_args(n, k)?;
    let cands = k_subset_masks(n, k);
    let constraint = TripleConstraint::MinScore(ell);
    let problem = match method {
        Method::Brute => {
            check_cap(cands.len(), opts.cap.min(MAX_CANDIDATES))?;
            let reqs = vec![Vec::new(); cands.len()];
            Problem::new(cands, reqs, constraint)
        }
        Method::ShiftedBb => {
            check_cap(cands.len(), MAX_CANDIDATES)?;
            shifted_uniform_problem(n, k, ell, cands, opts.table)
        }
    };
    Ok(run(ground, &problem, method, opts.jobs, started, Some(k)))
}

fn index_of(cands: &[u64]) -> std::collections::HashMap<u64, usize> {
    cands.iter().enumerate().map(|(i, &m)| (m, i)).collect()
}

/// Candidates in lex order, which extends the dominance order, so every
/// lower cover of a candidate comes before it.
fn shifted_uniform_problem(
    n: usize,
    k: usize,
    ell: usize,
    cands: Vec<u64>,
    table: Option<&ValueTable>,
) -> Problem {
    let idx = index_of(&cands);
    let reqs: Vec<Vec<usize>> = cands
        .iter()
        .map(|&m| lower_covers(m).map(|c| idx[&c]).collect())
        .collect();
    let len = cands.len();
    let top = 1u64 << (n - 1);
    let mut with_top = Bits::zeros(len);
    for (i, &m) in cands.iter().enumerate() {
        if m & top != 0 {
            with_top.set(i);
        }
    }
    let mut problem = Problem::new(cands, reqs, TripleConstraint::MinScore(ell));
    problem.global_cap = upper_estimate(n, k, ell, table).min(len);
    // for shifted families the two parts split by element n are
    // themselves ell-good on [n-1] when ell is 2 or 3
    if (ell == 2 || ell == 3) && k >= 3 && n + ell > 3 * k {
        problem.split = Some(SplitBound {
            with_top,
            cap_with: upper_estimate(n - 1, k - 1, ell, table),
            cap_without: upper_estimate(n - 1, k, ell, table),
        });
    }
    problem
}

/// Exact `h(n, ell)`, the size of the largest `ell`-good family of
/// arbitrary subsets of `[n]`.
pub fn exact_h(n: usize, ell: usize, method: Method, opts: &SearchOptions) -> Result<SearchResult> {
    let started = Instant::now();
    let ground = GroundSet::new(n)?;
    let constraint = TripleConstraint::MinScore(ell);
    let problem = match method {
        Method::Brute => {
            check_cap(1usize << n.min(63), opts.cap.min(MAX_CANDIDATES))?;
            let mut cands: Vec<u64> = (0..1u64 << n).collect();
            cands.sort_by(|&a, &b| canonical_cmp(a, b));
            let reqs = vec![Vec::new(); cands.len()];
            Problem::new(cands, reqs, constraint)
        }
        Method::ShiftedBb => {
            check_cap(n, MAX_H_SHIFTED)?;
            upclosed_shifted_problem(n, constraint)
        }
    };
    Ok(run(ground, &problem, method, opts.jobs, started, None))
}

/// All subsets, largest first and lex within a size. A candidate needs its
/// one-larger supersets (earlier level) and its lower covers (earlier in lex).
fn upclosed_shifted_problem(n: usize, constraint: TripleConstraint) -> Problem {
    let cands: Vec<u64> = (0..=n).rev().flat_map(|s| k_subset_masks(n, s)).collect();
    let idx = index_of(&cands);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let reqs = cands
        .iter()
        .map(|&m| {
            let mut r: Vec<usize> = lower_covers(m).map(|c| idx[&c]).collect();
            let mut missing = full & !m;
            while missing != 0 {
                let bit = missing & missing.wrapping_neg();
                missing ^= bit;
                r.push(idx[&(m | bit)]);
            }
            r
        })
        .collect();
    Problem::new(cands, reqs, constraint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{exact_g_closed, h_closed, lower_g};
    use crate::sets::{is_member_h, k_subsets};
    use crate::shifting::{is_shifted, is_upward_closed};

    fn opts() -> SearchOptions<'static> {
        SearchOptions::default()
    }

    #[test]
    fn brute_examples() {
        let g4 = GroundSet::new(4).unwrap();
        let r = brute_force_max(&k_subsets(g4, 2), TripleConstraint::MinScore(2), 40).unwrap();
        assert_eq!(r.value, 6);

        let g5 = GroundSet::new(5).unwrap();
        let r = brute_force_max(&k_subsets(g5, 2), TripleConstraint::MinScore(3), 40).unwrap();
        assert_eq!(r.value, 4);
        assert!(r.witness.iter().all(|s| s.contains(1)));

        let two = &k_subsets(g5, 2)[..2];
        let r = brute_force_max(two, TripleConstraint::MinScore(100), 40).unwrap();
        assert_eq!(r.value, 2);

        let g7 = GroundSet::new(7).unwrap();
        assert!(matches!(
            brute_force_max(&k_subsets(g7, 3), TripleConstraint::MinScore(2), 20),
            Err(Error::CapExceeded { count: 35, cap: 20 })
        ));
    }

    #[test]
    fn exact_g_examples() {
        for m in [Method::Brute, Method::ShiftedBb] {
            assert_eq!(exact_g(4, 2, 2, m, &opts()).unwrap().value, 6);
            assert_eq!(exact_g(7, 3, 2, m, &opts()).unwrap().value, 35);
            assert_eq!(exact_g(5, 2, 3, m, &opts()).unwrap().value, 4);
            assert_eq!(exact_g(4, 3, 7, m, &opts()).unwrap().value, 2);
        }
        assert_eq!(lower_g(5, 2, 3).unwrap().value, BigUint::from(4u32));
    }

    #[test]
    fn methods_agree_small() {
        for n in 3..=7 {
            for k in 1..=n.min(4) {
                if binom(n as i64, k as i64) > BigUint::from(20u32) {
                    continue;
                }
                for ell in 2..=6 {
                    let b = exact_g(n, k, ell, Method::Brute, &opts()).unwrap();
                    let s = exact_g(n, k, ell, Method::ShiftedBb, &opts()).unwrap();
                    assert_eq!(b.value, s.value, "({n},{k},{ell})");
                    assert!(is_member_h(&b.witness, ell));
                    assert!(is_member_h(&s.witness, ell));
                    assert!(is_shifted(&s.witness));
                    if let Some((v, _)) = exact_g_closed(n, k, ell) {
                        assert_eq!(BigUint::from(b.value), v, "closed ({n},{k},{ell})");
                    }
                }
            }
        }
    }

    #[test]
    fn witness_is_deterministic_across_jobs() {
        for (n, k, ell) in [(8, 3, 2), (7, 3, 3), (8, 2, 2)] {
            let a = exact_g(n, k, ell, Method::ShiftedBb, &opts()).unwrap();
            let o = SearchOptions { jobs: 4, ..opts() };
            let b = exact_g(n, k, ell, Method::ShiftedBb, &o).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.witness, b.witness);
        }
    }

    #[test]
    fn exact_h_examples() {
        for m in [Method::Brute, Method::ShiftedBb] {
            assert_eq!(exact_h(4, 10, m, &opts()).unwrap().value, 2);
            assert_eq!(exact_h(4, 7, m, &opts()).unwrap().value, 3);
            assert_eq!(exact_h(3, 0, m, &opts()).unwrap().value, 8);
        }
        assert!(exact_h(6, 3, Method::Brute, &opts()).is_err());
    }

    #[test]
    fn exact_h_methods_agree() {
        for n in 1..=5 {
            for ell in 0..=3 * n {
                let b = exact_h(n, ell, Method::Brute, &opts()).unwrap();
                let s = exact_h(n, ell, Method::ShiftedBb, &opts()).unwrap();
                assert_eq!(b.value, s.value, "h({n},{ell})");
                assert!(is_member_h(&s.witness, ell));
                assert!(is_upward_closed(&s.witness) && is_shifted(&s.witness));
                if let Some(v) = h_closed(n, 3 * n - ell) {
                    assert_eq!(BigUint::from(b.value), v, "closed h({n},{ell})");
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let r = exact_g(4, 2, 2, Method::Brute, &opts()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["value"], 6);
        assert_eq!(v["method"], "brute");
        assert_eq!(v["witness"][0], serde_json::json!([1, 2]));
        assert!(v["nodes"].as_u64().unwrap() > 0);
    }
}
