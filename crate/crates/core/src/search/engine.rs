//! Depth-first include/exclude search for the largest closed subfamily.
//!
//! Candidates are fixed masks in a fixed order. Each candidate may require
//! earlier candidates (dominance predecessors, supersets); a family is
//! admissible when it is closed under those requirements and every triple
//! of members satisfies the constraint. The DFS tries inclusion first, so
//! the first maximum leaf it meets is the lexicographically least maximum
//! family in candidate order.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::sets::TripleConstraint;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Bits(SmallVec<[u64; 4]>);

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits(SmallVec::from_elem(0, len.div_ceil(64)))
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Bits::zeros(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn count_and(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    #[inline]
    pub fn and_not(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    #[inline]
    pub fn or(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }

    /// `self \ other`.
    pub fn minus(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.and_not(other);
        out
    }
}

/// Per-branch bound from splitting members by whether they hold the top
/// element: each side is capped separately.
#[derive(Debug, Clone)]
pub(crate) struct SplitBound {
    pub with_top: Bits,
    pub cap_with: usize,
    pub cap_without: usize,
}

#[derive(Debug)]
pub(crate) struct Problem {
    pub cands: Vec<u64>,
    /// `forbid[i * N + j]`: candidates that break the constraint together with `i` and `j`.
    forbid: Vec<Bits>,
    /// Transitive dependents: candidates that cannot be chosen once `i` is out.
    up: Vec<Bits>,
    /// Direct requirements of each candidate (all earlier in order).
    reqs: Vec<Vec<usize>>,
    pub split: Option<SplitBound>,
    pub global_cap: usize,
}

impl Problem {
    pub fn new(cands: Vec<u64>, reqs: Vec<Vec<usize>>, constraint: TripleConstraint) -> Self {
        let n = cands.len();
        debug_assert_eq!(reqs.len(), n);
        debug_assert!(reqs.iter().enumerate().all(|(i, r)| r.iter().all(|&j| j < i)));

        let mut forbid = vec![Bits::zeros(n); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let mut row = Bits::zeros(n);
                for c in 0..n {
                    if c != i && c != j && !constraint.allows(cands[i], cands[j], cands[c]) {
                        row.set(c);
                    }
                }
                forbid[j * n + i] = row.clone();
                forbid[i * n + j] = row;
            }
        }

        // down[j]: everything j needs, transitively
        let mut down: Vec<Bits> = Vec::with_capacity(n);
        for j in 0..n {
            let mut d = Bits::zeros(n);
            for &r in &reqs[j] {
                d.set(r);
                let dr = down[r].clone();
                d.or(&dr);
            }
            down.push(d);
        }
        let mut up = vec![Bits::zeros(n); n];
        for (j, d) in down.iter().enumerate() {
            for i in d.ones_iter() {
                up[i].set(j);
            }
        }

        Problem {
            global_cap: n,
            cands,
            forbid,
            up,
            reqs,
            split: None,
        }
    }

    fn bound(&self, chosen: usize, chosen_top: usize, allowed: &Bits) -> usize {
        let open = allowed.count();
        let mut b = (chosen + open).min(self.global_cap);
        if let Some(s) = &self.split {
            let open_top = allowed.count_and(&s.with_top);
            let with = (chosen_top + open_top).min(s.cap_with);
            let without = (chosen - chosen_top + open - open_top).min(s.cap_without);
            b = b.min(with + without);
        }
        b
    }

    fn is_top(&self, i: usize) -> usize {
        self.split.as_ref().map_or(0, |s| s.with_top.get(i) as usize)
    }
}

#[derive(Debug, Clone)]
struct Node {
    chosen: Vec<usize>,
    chosen_top: usize,
    allowed: Bits,
}

struct Walker<'a> {
    p: &'a Problem,
    best: Option<Vec<usize>>,
    best_len: usize,
    nodes: u64,
    shared: Option<&'a AtomicUsize>,
    /// When set, stop at this many decisions and hand back the open nodes.
    frontier_depth: Option<usize>,
    frontier: Vec<Node>,
}

impl<'a> Walker<'a> {
    fn new(p: &'a Problem, shared: Option<&'a AtomicUsize>) -> Self {
        Walker {
            p,
            best: None,
            best_len: 0,
            nodes: 0,
            shared,
            frontier_depth: None,
            frontier: Vec::new(),
        }
    }

    fn walk(&mut self, node: &mut Node, depth: usize) {
        self.nodes += 1;
        if let Some(d) = self.frontier_depth {
            if depth == d || node.allowed.first().is_none() {
                self.frontier.push(node.clone());
                return;
            }
        }
        let bound = self.p.bound(node.chosen.len(), node.chosen_top, &node.allowed);
        if self.best.is_some() && bound <= self.best_len {
            return;
        }
        if let Some(shared) = self.shared {
            if bound < shared.load(Ordering::Relaxed) {
                return;
            }
        }

        let Some(v) = node.allowed.first() else {
            if self.best.is_none() || node.chosen.len() > self.best_len {
                self.best_len = node.chosen.len();
                self.best = Some(node.chosen.clone());
                if let Some(shared) = self.shared {
                    shared.fetch_max(self.best_len, Ordering::Relaxed);
                }
            }
            return;
        };
        debug_assert!(self.p.reqs[v].iter().all(|r| node.chosen.contains(r)));

        let n = self.p.cands.len();
        let mut inc = node.allowed.clone();
        inc.clear(v);
        for &u in &node.chosen {
            inc.and_not(&self.p.forbid[u * n + v]);
        }
        let mut lost = node.allowed.minus(&inc);
        lost.clear(v);
        for w in lost.ones_iter() {
            inc.and_not(&self.p.up[w]);
        }
        let mut child = Node {
            chosen: node.chosen.clone(),
            chosen_top: node.chosen_top + self.p.is_top(v),
            allowed: inc,
        };
        child.chosen.push(v);
        self.walk(&mut child, depth + 1);

        let mut exc = std::mem::replace(&mut node.allowed, Bits::zeros(0));
        exc.clear(v);
        exc.and_not(&self.p.up[v]);
        let mut child = Node {
            chosen: std::mem::take(&mut node.chosen),
            chosen_top: node.chosen_top,
            allowed: exc,
        };
        self.walk(&mut child, depth + 1);
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub chosen: Vec<usize>,
    pub nodes: u64,
}

fn root(p: &Problem) -> Node {
    Node {
        chosen: Vec::new(),
        chosen_top: 0,
        allowed: Bits::ones(p.cands.len()),
    }
}

/// Single-threaded search.
pub(crate) fn solve(p: &Problem) -> Outcome {
    let mut w = Walker::new(p, None);
    w.walk(&mut root(p), 0);
    Outcome {
        chosen: w.best.unwrap_or_default(),
        nodes: w.nodes,
    }
}

/// Splits the tree at a fixed depth and explores the subtrees on the rayon
/// pool with a shared incumbent size. Subtrees only prune strictly below the
/// shared value, so every subtree still finds its own first maximum and the
/// merge (earliest subtree among the largest) matches [`solve`].
pub(crate) fn solve_parallel(p: &Problem, jobs: usize) -> Outcome {
    if jobs <= 1 {
        return solve(p);
    }
    let mut w = Walker::new(p, None);
    w.frontier_depth = Some(12.min(p.cands.len()));
    w.walk(&mut root(p), 0);
    let frontier = std::mem::take(&mut w.frontier);
    let mut nodes = w.nodes;
    let mut best_len = 0;
    let mut best: Option<Vec<usize>> = None;

    let shared = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    let results: Vec<(Option<Vec<usize>>, u64)> = pool.install(|| {
        frontier
            .into_par_iter()
            .map(|mut node| {
                let mut sub = Walker::new(p, Some(&shared));
                sub.walk(&mut node, 0);
                (sub.best, sub.nodes)
            })
            .collect()
    });

    // frontier order is DFS order, so keeping the earliest among the largest
    // reproduces the serial answer
    for (cand, n) in results {
        nodes += n;
        if let Some(c) = cand {
            if best.is_none() || c.len() > best_len {
                best_len = c.len();
                best = Some(c);
            }
        }
    }
    Outcome {
        chosen: best.unwrap_or_default(),
        nodes,
    }
}
