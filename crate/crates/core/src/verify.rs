//! Seeded verification suites over the invariants of the library.
//!
//! Every suite returns a [`SuiteReport`] listing named checks. A check that
//! fails carries a counterexample in the family text format, shrunk to a
//! minimal family where the failing property allows it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    binom, exact_g_closed, f_j_ell, h_closed, h_construction_size, lower_g, prefix_family_size,
    upper_g, BinomialTable, HParams, ValueTable,
};
use crate::constructions::{
    counterexample_l4, nonuniform_dual_family, nonuniform_primal_family, uniform_j_family,
};
use crate::error::{Error, Result};
use crate::format::write_family;
use crate::search::{exact_g, exact_h, Method, SearchOptions};
use crate::sets::{
    all_subsets, complement_family, d_lower_bound_from_size, d_triple, dual_d, find_h_violation,
    is_member_h, k_subsets, score, triple_profile, Family, GroundSet, Subset,
};
use crate::shifting::{
    canonical_shift, dominates, family_weight, for_each_shifted_family, is_shifted,
    restriction_in_h, restriction_violation, tau, ShiftPair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Shifting,
    Duality,
    Restriction,
    Constructions,
    Table,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Shifting,
        Suite::Duality,
        Suite::Restriction,
        Suite::Constructions,
        Suite::Table,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Shifting => "shifting",
            Suite::Duality => "duality",
            Suite::Restriction => "restriction",
            Suite::Constructions => "constructions",
            Suite::Table => "table",
        }
    }

    /// Trials used when the caller does not pick a number.
    pub fn default_trials(&self) -> usize {
        match self {
            Suite::Shifting => 1000,
            Suite::Duality => 10_000,
            Suite::Restriction => 200,
            Suite::Constructions | Suite::Table => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| {
                format!("unknown suite '{s}', expected shifting, duality, restriction, constructions or table")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// A known failure the library reproduces on purpose.
    #[serde(rename = "EXPECTED-FAIL")]
    ExpectedFail,
    /// Informational, never a failure.
    #[serde(rename = "INFO")]
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedFail => "EXPECTED-FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn pass_if(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check::new(name, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    fn with_family(mut self, family: Option<&Family>) -> Self {
        self.counterexample = family.map(write_family);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a SuiteReport,
            passed: bool,
        }
        serde_json::to_string_pretty(&Out {
            report: self,
            passed: self.passed(),
        })
        .expect("plain data serializes")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Shifting => shifting_suite(cfg)?,
        Suite::Duality => duality_suite(cfg)?,
        Suite::Restriction => restriction_suite(cfg)?,
        Suite::Constructions => constructions_suite()?,
        Suite::Table => table_suite()?,
    };
    Ok(SuiteReport {
        suite: suite.as_str().into(),
        seed: cfg.seed,
        trials: cfg.trials,
        checks,
    })
}

/// Membership of a user family in `H_ell`, with a violating triple as the
/// counterexample when it fails.
pub fn check_family(family: &Family, ell: usize) -> SuiteReport {
    let check = match find_h_violation(family, ell) {
        None => Check::new(
            format!("family in H_{ell}"),
            Status::Pass,
            format!("{} members, every triple scores at least {ell}", family.len()),
        ),
        Some(t) => {
            let d = score(t[0].bits(), t[1].bits(), t[2].bits());
            let triple = Family::new(family.ground(), t).expect("distinct members");
            Check::new(
                format!("family in H_{ell}"),
                Status::Fail,
                format!("{}, {}, {} score {d} < {ell}", t[0], t[1], t[2]),
            )
            .with_family(Some(&triple))
        }
    };
    SuiteReport {
        suite: "family".into(),
        seed: 0,
        trials: 1,
        checks: vec![check],
    }
}

/// Greedily drops members while `fails` keeps holding.
fn shrink(family: &Family, fails: impl Fn(&Family) -> bool) -> Family {
    let mut cur = family.clone();
    let mut i = 0;
    while i < cur.len() {
        let rest: Vec<Subset> = cur
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, s)| *s)
            .collect();
        let mut smaller = Family::new(cur.ground(), rest).expect("subfamily of a family");
        if let Some(k) = cur.uniform_size() {
            smaller = smaller.with_uniform_size(k).expect("uniform subfamily");
        }
        if fails(&smaller) {
            cur = smaller;
        } else {
            i += 1;
        }
    }
    cur
}

/// A uniformly chosen `m`-subset of `pool` as a family.
fn sample_family(rng: &mut ChaCha8Rng, ground: GroundSet, pool: &[Subset], m: usize) -> Family {
    let m = m.min(pool.len());
    let picks = sample(rng, pool.len(), m);
    Family::new(ground, picks.into_iter().map(|i| pool[i])).expect("distinct pool members")
}

/// Draws a random `ell`-good family on at most 7 points by rejection.
fn random_h_family(rng: &mut ChaCha8Rng) -> (Family, usize) {
    loop {
        let n = rng.gen_range(3..=7);
        let ground = GroundSet::new(n).expect("small ground");
        let uniform = rng.gen_bool(0.7);
        let (pool, max_ell) = if uniform {
            let k = rng.gen_range(1..n);
            (k_subsets(ground, k), 3 * k)
        } else {
            (all_subsets(ground), 3 * n)
        };
        let m = rng.gen_range(3..=pool.len().min(10));
        let fam = sample_family(rng, ground, &pool, m);
        let ell = rng.gen_range(0..=max_ell.min(6));
        if is_member_h(&fam, ell) {
            return (fam, ell);
        }
    }
}

fn shift_violation(family: &Family, ell: usize) -> Option<String> {
    let before = family_weight(family);
    for pair in ShiftPair::all(family.ground()) {
        let after = tau(family, pair).expect("same ground");
        let tag = format!("tau_({},{})", pair.x(), pair.y());
        if after.len() != family.len() {
            return Some(format!("{tag} changed the size"));
        }
        if !is_member_h(&after, ell) {
            return Some(format!("{tag} left H_{ell}"));
        }
        if after != *family && family_weight(&after) >= before {
            return Some(format!("{tag} changed the family without lowering its weight"));
        }
    }
    let stable = canonical_shift(family);
    if stable.len() != family.len() || !is_shifted(&stable) || !is_member_h(&stable, ell) {
        return Some("repeated shifting did not reach a shifted family in H_ell".into());
    }
    None
}

fn shifting_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut first: Option<(Family, usize, String)> = None;
    let mut violations = 0usize;
    let mut shifts = 0usize;
    for _ in 0..cfg.trials {
        let (fam, ell) = random_h_family(&mut rng);
        let n = fam.ground().n();
        shifts += n * (n - 1) / 2;
        if let Some(msg) = shift_violation(&fam, ell) {
            violations += 1;
            if first.is_none() {
                first = Some((fam, ell, msg));
            }
        }
    }
    let check = match first {
        None => Check::new(
            "shifts preserve size and H_ell, and lower the weight",
            Status::Pass,
            format!("{} random families, {shifts} shifts, 0 violations", cfg.trials),
        ),
        Some((fam, ell, msg)) => {
            let min = shrink(&fam, |f| shift_violation(f, ell).is_some());
            Check::new(
                "shifts preserve size and H_ell, and lower the weight",
                Status::Fail,
                format!("{violations} of {} families failed; first: {msg} (ell = {ell})", cfg.trials),
            )
            .with_family(Some(&min))
        }
    };
    Ok(vec![check])
}

fn random_distinct_triple(rng: &mut ChaCha8Rng) -> (GroundSet, [Subset; 3]) {
    loop {
        let n = rng.gen_range(2..=20);
        let ground = GroundSet::new(n).expect("small ground");
        let mut draw = || {
            Subset::from_bits(ground, rng.gen::<u64>() & ground.mask()).expect("masked to ground")
        };
        let t = [draw(), draw(), draw()];
        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
            return (ground, t);
        }
    }
}

fn duality_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names = [
        "d + dual d = 2s",
        "d(A,B,C) + dual d(complements) = 3n",
        "d >= lower bound from size sum",
    ];
    let mut failures: [Option<(GroundSet, [Subset; 3], String)>; 3] = [None, None, None];
    let mut counts = [0usize; 3];
    for _ in 0..cfg.trials {
        let (ground, [a, b, c]) = random_distinct_triple(&mut rng);
        let n = ground.n();
        let d = d_triple(&a, &b, &c)?;
        let dd = dual_d(&a, &b, &c)?;
        let s = a.len() + b.len() + c.len();
        let p = triple_profile(&a, &b, &c)?;
        let comp_dd = dual_d(&a.complement(), &b.complement(), &c.complement())?;
        let results = [
            (d + dd == 2 * s && p.d() == d, format!("d = {d}, dual = {dd}, s = {s}")),
            (d + comp_dd == 3 * n, format!("d = {d}, dual of complements = {comp_dd}, n = {n}")),
            {
                let lb = d_lower_bound_from_size(s, n)?;
                (d >= lb, format!("d = {d} < {lb} with s = {s}, n = {n}"))
            },
        ];
        for (i, (ok, msg)) in results.into_iter().enumerate() {
            if !ok {
                counts[i] += 1;
                if failures[i].is_none() {
                    failures[i] = Some((ground, [a, b, c], msg));
                }
            }
        }
    }
    let checks = names
        .iter()
        .zip(failures)
        .zip(counts)
        .map(|((name, fail), count)| match fail {
            None => Check::new(*name, Status::Pass, format!("{} random triples", cfg.trials)),
            Some((ground, t, msg)) => {
                let fam = Family::new(ground, t).expect("distinct triple");
                Check::new(*name, Status::Fail, format!("{count} failures; first: {msg}"))
                    .with_family(Some(&fam))
            }
        })
        .collect();
    Ok(checks)
}

/// Dominance down-set of a few random `k`-sets.
fn random_shifted_family(rng: &mut ChaCha8Rng) -> Family {
    let n = rng.gen_range(6..=9);
    let k = rng.gen_range(2..=4);
    let ground = GroundSet::new(n).expect("small ground");
    let level = k_subsets(ground, k);
    let gens: Vec<Subset> = (0..rng.gen_range(1..=3))
        .map(|_| level[rng.gen_range(0..level.len())])
        .collect();
    let members = level
        .iter()
        .filter(|s| gens.iter().any(|g| dominates(s, g).expect("same size")))
        .copied();
    Family::new(ground, members)
        .and_then(|f| f.with_uniform_size(k))
        .expect("level subfamily")
}

fn restriction_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let ground = GroundSet::new(6)?;

    for ell in [2usize, 3] {
        let mut good = 0usize;
        let mut bad: Option<Family> = None;
        let mut bad_count = 0usize;
        for_each_shifted_family(ground, 3, 6, |f| {
            if is_member_h(f, ell) {
                good += 1;
                if !restriction_in_h(f, 3, ell).expect("ell in {2,3}, uniform") {
                    bad_count += 1;
                    bad.get_or_insert_with(|| f.clone());
                }
            }
        });
        let name = format!("restriction to [3k-ell] stays in H_{ell} (n = 6, k = 3, at most 6 members)");
        let min = bad.map(|b| {
            shrink(&b, |f| {
                is_shifted(f) && is_member_h(f, ell) && !restriction_in_h(f, 3, ell).unwrap_or(true)
            })
        });
        checks.push(
            Check::pass_if(
                name,
                bad_count == 0,
                format!("{good} shifted families in H_{ell}, {bad_count} violations"),
            )
            .with_family(min.as_ref()),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tested = 0usize;
    let mut bad: Option<(Family, usize)> = None;
    for _ in 0..cfg.trials {
        let f = random_shifted_family(&mut rng);
        let k = f.uniform_size().expect("uniform");
        for ell in [2usize, 3] {
            if 3 * k - ell > f.ground().n() || !is_member_h(&f, ell) {
                continue;
            }
            tested += 1;
            if !restriction_in_h(&f, k, ell)? && bad.is_none() {
                bad = Some((f.clone(), ell));
            }
        }
    }
    checks.push(
        Check::pass_if(
            "restriction to [3k-ell] on random shifted families (n 6..9, k 2..4)",
            bad.is_none(),
            match &bad {
                None => format!("{tested} family/ell pairs, 0 violations"),
                Some((_, ell)) => format!("violation at ell = {ell}"),
            },
        )
        .with_family(bad.as_ref().map(|(f, _)| f)),
    );

    // ell = 4: the restriction property genuinely fails
    let f = counterexample_l4();
    let shape_ok = is_shifted(&f) && is_member_h(&f, 4);
    let name = "restriction at ell = 4 (dominance down-set of {1,2,6},{1,3,6},{1,4,5})";
    let check = match restriction_violation(&f, 5, 4) {
        Some(t) if shape_ok => {
            let r: Vec<Subset> = t.iter().map(|s| s.restrict_to_prefix(5)).collect();
            let d = score(r[0].bits(), r[1].bits(), r[2].bits());
            let mut exhaustive = 0usize;
            for_each_shifted_family(ground, 3, 8, |g| {
                if is_member_h(g, 4) && restriction_violation(g, 5, 4).is_some() {
                    exhaustive += 1;
                }
            });
            Check::new(
                name,
                if d == 3 { Status::ExpectedFail } else { Status::Fail },
                format!(
                    "traces {}, {}, {} of {}, {}, {} on [5] score {d} < 4; {exhaustive} shifted families with at most 8 members fail the same way",
                    r[0], r[1], r[2], t[0], t[1], t[2]
                ),
            )
            .with_family(Some(&f))
        }
        _ => Check::new(
            name,
            Status::Fail,
            "the ell = 4 family did not reproduce the restriction failure",
        )
        .with_family(Some(&f)),
    };
    checks.push(check);
    Ok(checks)
}

/// Parallel exhaustive `H_ell` scan. A triple below `ell` has
/// `|a∩b| < ell` and `|a∩c| < ell`, so for each `a` only members meeting it
/// in fewer than `ell` points need to be paired.
fn par_h_violation(masks: &[u64], ell: usize) -> Option<[u64; 3]> {
    let ell = ell as u32;
    (0..masks.len()).into_par_iter().find_map_first(|i| {
        let a = masks[i];
        let near: Vec<u64> = masks[i + 1..]
            .iter()
            .copied()
            .filter(|&c| (a & c).count_ones() < ell)
            .collect();
        for (jj, &b) in near.iter().enumerate() {
            let need = ell - (a & b).count_ones();
            for &c in &near[jj + 1..] {
                if (c & a).count_ones() + (c & b).count_ones() < need {
                    return Some([a, b, c]);
                }
            }
        }
        None
    })
}

fn par_hbar_violation(masks: &[u64], x: usize) -> Option<[u64; 3]> {
    (0..masks.len()).into_par_iter().find_map_first(|i| {
        let a = masks[i];
        for j in i + 1..masks.len() {
            for &c in &masks[j + 1..] {
                if crate::sets::dual_score(a, masks[j], c) as usize > x {
                    return Some([a, masks[j], c]);
                }
            }
        }
        None
    })
}

fn constructions_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let mut cases = 0usize;
    let mut bad: Option<(Family, String)> = None;
    for p in 1..=2usize {
        for q in 0..6usize {
            let x = 6 * p + q;
            for n in p + 2..=14 {
                cases += 1;
                let dual = nonuniform_dual_family(n, x)?;
                let want = h_construction_size(n, HParams::from_x(x));
                let masks = dual.masks();
                if BigUint::from(dual.len()) != want {
                    bad.get_or_insert((dual.clone(), format!("n={n}, x={x}: size {} != {want}", dual.len())));
                } else if par_hbar_violation(&masks, x).is_some() {
                    bad.get_or_insert((dual.clone(), format!("n={n}, x={x}: dual score above x")));
                } else {
                    let primal = nonuniform_primal_family(n, x)?;
                    if complement_family(&dual) != primal || par_h_violation(&primal.masks(), (3 * n).saturating_sub(x)).is_some() {
                        bad.get_or_insert((primal, format!("n={n}, x={x}: complement family not in H_(3n-x)")));
                    }
                }
            }
        }
    }
    let (fam, msg) = bad.map_or((None, String::new()), |(f, m)| (Some(f), m));
    checks.push(
        Check::pass_if(
            "level construction: dual score at most x and size formula (n <= 14, p in {1,2})",
            fam.is_none(),
            if fam.is_none() { format!("{cases} (n, x) cases") } else { msg },
        )
        .with_family(fam.as_ref()),
    );

    let (count, bad) = uniform_grid_check()?;
    let (fam, msg) = bad.map_or((None, String::new()), |(f, m)| (Some(f), m));
    checks.push(
        Check::pass_if(
            "prefix construction in H_ell with the predicted size (n <= 14, k <= 6, ell <= 6)",
            fam.is_none(),
            if fam.is_none() { format!("{count} (n, k, ell, j) cases") } else { msg },
        )
        .with_family(fam.as_ref()),
    );

    let opts = SearchOptions::default();
    let mut compared = 0usize;
    let mut mismatch = None;
    for n in 1..=5 {
        for x in 0..=5.min(3 * n) {
            let ell = 3 * n - x;
            if let Some(v) = h_closed(n, x) {
                let got = exact_h(n, ell, Method::Brute, &opts)?;
                compared += 1;
                if BigUint::from(got.value) != v && mismatch.is_none() {
                    mismatch = Some(format!("h({n},{ell}) = {} by search, closed form {v}", got.value));
                }
            }
        }
    }
    checks.push(Check::pass_if(
        "small-x closed form of h agrees with exhaustive search (n <= 5)",
        mismatch.is_none(),
        mismatch.unwrap_or_else(|| format!("{compared} values")),
    ));
    Ok(checks)
}

/// Applies the permutation `map` of ground positions to a mask.
fn permute(mask: u64, map: &[usize]) -> u64 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        out |= 1 << map[b];
    }
    out
}

/// `H_ell` scan for a family invariant under all permutations inside each
/// block of positions. Invariance is checked on the generators (a swap and
/// a full cycle per block); then only the first set of each triple is
/// restricted to orbit representatives, the sets that fill every block from
/// its start. Returns `Err` when the family is not invariant.
fn symmetric_h_violation(
    masks: &[u64],
    n: usize,
    blocks: &[std::ops::Range<usize>],
    ell: usize,
) -> std::result::Result<Option<[u64; 3]>, String> {
    let present: std::collections::HashSet<u64> = masks.iter().copied().collect();
    for block in blocks.iter().filter(|b| b.len() >= 2) {
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(block.start, block.start + 1);
        let mut cycle: Vec<usize> = (0..n).collect();
        for p in block.clone() {
            cycle[p] = if p + 1 == block.end { block.start } else { p + 1 };
        }
        for map in [&swap, &cycle] {
            if let Some(&m) = masks.iter().find(|&&m| !present.contains(&permute(m, map))) {
                return Err(format!("family not invariant on block {block:?} (mask {m:#b})"));
            }
        }
    }
    let block_mask = |b: &std::ops::Range<usize>| -> u64 {
        if b.is_empty() {
            0
        } else {
            (u64::MAX >> (64 - b.len())) << b.start
        }
    };
    let is_rep = |a: u64| {
        blocks.iter().all(|b| {
            let inside = (a & block_mask(b)) >> b.start;
            inside & (inside + 1) == 0
        })
    };
    let ell = ell as u32;
    Ok(masks.iter().copied().filter(|&a| is_rep(a)).find_map(|a| {
        let near: Vec<u64> = masks
            .iter()
            .copied()
            .filter(|&c| c != a && (a & c).count_ones() < ell)
            .collect();
        near.par_iter().enumerate().find_map_first(|(jj, &b)| {
            let need = ell - (a & b).count_ones();
            near[jj + 1..]
                .iter()
                .find(|&&c| (c & a).count_ones() + (c & b).count_ones() < need)
                .map(|&c| [a, b, c])
        })
    }))
}

/// Every prefix family on the grid: membership by a symmetry-reduced
/// exhaustive scan, size against the summand.
pub(crate) fn uniform_grid_check() -> Result<(usize, Option<(Family, String)>)> {
    let mut count = 0usize;
    for n in 1..=14usize {
        let binoms = BinomialTable::new(n, n);
        for k in 1..=n.min(6) {
            for ell in 0..=6usize {
                for j in ell.div_ceil(3)..=k {
                    let f = f_j_ell(j, ell)?;
                    if f > n {
                        continue;
                    }
                    count += 1;
                    let fam = uniform_j_family(n, k, ell, j)?;
                    let tag = format!("(n,k,ell,j)=({n},{k},{ell},{j})");
                    let want = prefix_family_size(&binoms, n, k, f, j);
                    if BigUint::from(fam.len()) != want {
                        let msg = format!("{tag}: size {} != {want}", fam.len());
                        return Ok((count, Some((fam, msg))));
                    }
                    match symmetric_h_violation(&fam.masks(), n, &[0..f, f..n], ell) {
                        Ok(None) => {}
                        Ok(Some(t)) => {
                            let tri = Family::from_masks(fam.ground(), t);
                            return Ok((count, Some((tri, format!("{tag}: triple below ell")))));
                        }
                        Err(msg) => return Ok((count, Some((fam, format!("{tag}: {msg}"))))),
                    }
                }
            }
        }
    }
    Ok((count, None))
}

/// One row of the small exact table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub exact: usize,
    pub brute: Option<usize>,
    pub lower: BigUint,
    pub upper: Option<BigUint>,
}

/// Grid of the table suite: `2 <= k <= 4`, `ell` in `2..=6`, `3k - ell <= n`
/// (below that `g` is at most 2), and `C(n, k) <= 220`.
pub fn table_grid() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n in 3..=12usize {
        for k in 2..=4usize {
            if binom(n as i64, k as i64) > BigUint::from(220u32) {
                continue;
            }
            for ell in 2..=6usize {
                if 3 * k >= ell && 3 * k - ell <= n {
                    out.push((n, k, ell));
                }
            }
        }
    }
    out
}

/// Exact values on [`table_grid`] by shifted search (fed the values found
/// so far) and by brute force where the candidate count allows.
pub fn compute_table() -> Result<Vec<TableRow>> {
    let mut known = ValueTable::new();
    let mut rows = Vec::new();
    for (n, k, ell) in table_grid() {
        let opts = SearchOptions {
            table: Some(&known),
            ..SearchOptions::default()
        };
        let s = exact_g(n, k, ell, Method::ShiftedBb, &opts)?;
        if !is_member_h(&s.witness, ell) || !is_shifted(&s.witness) {
            return Err(Error::Regime(format!("invalid shifted witness at ({n},{k},{ell})")));
        }
        let brute = match exact_g(n, k, ell, Method::Brute, &SearchOptions::default()) {
            Ok(b) => {
                if !is_member_h(&b.witness, ell) {
                    return Err(Error::Regime(format!("invalid brute witness at ({n},{k},{ell})")));
                }
                Some(b.value)
            }
            Err(Error::CapExceeded { .. }) => None,
            Err(e) => return Err(e),
        };
        known.insert(n, k, ell, BigUint::from(s.value));
        rows.push(TableRow {
            n,
            k,
            ell,
            exact: s.value,
            brute,
            lower: lower_g(n, k, ell)?.value,
            upper: upper_g(n, k, ell).map(|(v, _)| v),
        });
    }
    Ok(rows)
}

fn table_suite() -> Result<Vec<Check>> {
    let rows = compute_table()?;
    let lookup = |n: usize, k: usize, ell: usize| {
        rows.iter()
            .find(|r| (r.n, r.k, r.ell) == (n, k, ell))
            .map(|r| r.exact)
    };
    let mut checks = Vec::new();

    let disagree: Vec<String> = rows
        .iter()
        .filter(|r| r.brute.is_some_and(|b| b != r.exact))
        .map(|r| format!("({},{},{})", r.n, r.k, r.ell))
        .collect();
    let both = rows.iter().filter(|r| r.brute.is_some()).count();
    checks.push(Check::pass_if(
        "brute force and shifted search agree",
        disagree.is_empty(),
        format!("{both} instances run both ways; mismatches: [{}]", disagree.join(" ")),
    ));

    let bad: Vec<String> = rows
        .iter()
        .filter(|r| {
            let e = BigUint::from(r.exact);
            r.lower > e || r.upper.as_ref().is_some_and(|u| &e > u)
        })
        .map(|r| format!("({},{},{})", r.n, r.k, r.ell))
        .collect();
    checks.push(Check::pass_if(
        "lower bound <= exact <= upper bound",
        bad.is_empty(),
        format!("{} instances; violations: [{}]", rows.len(), bad.join(" ")),
    ));

    let mut closed = 0usize;
    let bad: Vec<String> = rows
        .iter()
        .filter_map(|r| {
            let (v, src) = exact_g_closed(r.n, r.k, r.ell)?;
            closed += 1;
            (v != BigUint::from(r.exact)).then(|| format!("({},{},{}) {src:?}", r.n, r.k, r.ell))
        })
        .collect();
    checks.push(Check::pass_if(
        "closed forms agree with search",
        bad.is_empty(),
        format!("{closed} instances in a closed regime; mismatches: [{}]", bad.join(" ")),
    ));

    let mut recursions = 0usize;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| (r.ell == 2 || r.ell == 3) && r.k >= 3 && r.n + r.ell > 3 * r.k)
        .filter_map(|r| {
            let a = lookup(r.n - 1, r.k, r.ell)?;
            let b = lookup(r.n - 1, r.k - 1, r.ell)?;
            recursions += 1;
            (r.exact > a + b).then(|| format!("({},{},{})", r.n, r.k, r.ell))
        })
        .collect();
    checks.push(Check::pass_if(
        "g(n,k) <= g(n-1,k) + g(n-1,k-1) for ell in {2,3}",
        bad.is_empty(),
        format!("{recursions} instances with both terms computed; violations: [{}]", bad.join(" ")),
    ));

    // any two sets form a good family, so g <= 2 says nothing about the construction
    let nontrivial: Vec<&TableRow> = rows.iter().filter(|r| r.exact > 2).collect();
    let gaps: Vec<String> = nontrivial
        .iter()
        .filter(|r| r.lower != BigUint::from(r.exact))
        .map(|r| format!("({},{},{}): {} < {}", r.n, r.k, r.ell, r.lower, r.exact))
        .collect();
    checks.push(Check::new(
        "prefix construction is optimal",
        Status::Info,
        format!(
            "{} of {} instances with g > 2 sharp; gaps: [{}]",
            nontrivial.len() - gaps.len(),
            nontrivial.len(),
            gaps.join(", ")
        ),
    ));
    Ok(checks)
}
