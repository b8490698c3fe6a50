//! Exact avoidance numbers by backtracking over colorings of `1, 2, 3, ...`.
//!
//! Integers are colored in increasing order. Each pattern instance is filed under its
//! largest element, so coloring `m` only has to look at instances that `m` completes.
//! Colors are interchangeable, so a new color may only be the next unused one.

use std::collections::HashSet;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::{verify_nat_coloring, Outcome};
use super::{BruteError, PatternFamily};
use crate::coloring::NatColoring;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceReport {
    pub pattern: String,
    pub colors: u32,
    pub cap: u32,
    /// Least `N` such that every coloring of `[N]` has a monochromatic instance.
    pub min_n: u32,
    /// A coloring of `[min_n - 1]` with no monochromatic instance, colors `0..colors`.
    pub avoiding: Vec<u32>,
    pub nodes_explored: u64,
    /// Nodes visited by the independent refutation of `[min_n]`.
    pub certificate_nodes: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct AvoidOptions {
    pub jobs: usize,
}

impl Default for AvoidOptions {
    fn default() -> Self {
        AvoidOptions { jobs: 1 }
    }
}

/// Instances with largest element `m`, as the lists of their other distinct elements.
fn instances_by_max(f: &PatternFamily, cap: u32) -> Vec<Vec<Box<[u32]>>> {
    let mut by_max: Vec<HashSet<Box<[u32]>>> = vec![HashSet::new(); cap as usize + 1];
    let _ = f.for_each_nat_instance::<()>(cap as u64, |_, elements| {
        let mut set: Vec<u32> = elements.iter().map(|&e| e as u32).collect();
        set.sort_unstable();
        set.dedup();
        let max = set.pop().expect("nonempty pattern");
        by_max[max as usize].insert(set.into_boxed_slice());
        ControlFlow::Continue(())
    });
    by_max
        .into_iter()
        .map(|s| {
            let mut v: Vec<_> = s.into_iter().collect();
            v.sort();
            v
        })
        .collect()
}

struct Solver<'a> {
    by_max: &'a [Vec<Box<[u32]>>],
    colors: u32,
    cap: usize,
    col: Vec<u32>,
    best: Vec<u32>,
    nodes: u64,
    symmetry: bool,
}

impl Solver<'_> {
    fn new(by_max: &[Vec<Box<[u32]>>], colors: u32, cap: usize, symmetry: bool) -> Solver<'_> {
        Solver {
            by_max,
            colors,
            cap,
            col: vec![u32::MAX; cap + 1],
            best: Vec::new(),
            nodes: 0,
            symmetry,
        }
    }

    fn allowed(&self, m: usize, c: u32) -> bool {
        // An empty list means the instance is the singleton {m}.
        self.by_max[m]
            .iter()
            .all(|inst| inst.iter().any(|&e| self.col[e as usize] != c))
    }

    fn color_limit(&self, used: u32) -> u32 {
        if self.symmetry {
            self.colors.min(used + 1)
        } else {
            self.colors
        }
    }

    fn note(&mut self, m: usize) {
        if m - 1 > self.best.len() {
            self.best = self.col[1..m].to_vec();
        }
    }

    /// Colors `m, m+1, ...`; returns true once `[cap]` is fully colored.
    fn dfs(&mut self, m: usize, used: u32) -> bool {
        self.note(m);
        if m > self.cap {
            return true;
        }
        for c in 0..self.color_limit(used) {
            self.nodes += 1;
            if self.allowed(m, c) {
                self.col[m] = c;
                if self.dfs(m + 1, used.max(c + 1)) {
                    return true;
                }
            }
        }
        self.col[m] = u32::MAX;
        false
    }

    /// Valid prefixes of length `depth`, in search order.
    fn prefixes(&mut self, m: usize, used: u32, depth: usize, out: &mut Vec<(Vec<u32>, u32)>) {
        self.note(m);
        if m > depth {
            out.push((self.col[1..m].to_vec(), used));
            return;
        }
        for c in 0..self.color_limit(used) {
            self.nodes += 1;
            if self.allowed(m, c) {
                self.col[m] = c;
                self.prefixes(m + 1, used.max(c + 1), depth, out);
            }
        }
        self.col[m] = u32::MAX;
    }
}

/// Length of the colored prefixes handed to parallel workers.
const PREFIX_DEPTH: usize = 12;

struct Search {
    best: Vec<u32>,
    cap_reached: bool,
    nodes: u64,
}

fn search(by_max: &[Vec<Box<[u32]>>], colors: u32, cap: usize, jobs: usize) -> Search {
    let mut root = Solver::new(by_max, colors, cap, true);
    if jobs <= 1 || cap < 8 {
        let cap_reached = root.dfs(1, 0);
        return Search {
            best: root.best,
            cap_reached,
            nodes: root.nodes,
        };
    }
    let depth = PREFIX_DEPTH.min(cap);
    let mut prefixes = Vec::new();
    root.prefixes(1, 0, depth, &mut prefixes);
    let results: Vec<Search> = prefixes
        .par_iter()
        .map(|(prefix, used)| {
            let mut s = Solver::new(by_max, colors, cap, true);
            s.col[1..=prefix.len()].copy_from_slice(prefix);
            s.best = prefix.clone();
            let cap_reached = s.dfs(prefix.len() + 1, *used);
            Search {
                best: s.best,
                cap_reached,
                nodes: s.nodes,
            }
        })
        .collect();
    let nodes = root.nodes + results.iter().map(|r| r.nodes).sum::<u64>();
    // The earliest subtree that reaches the greatest depth is what the sequential
    // search would have kept.
    let mut best = Search {
        best: root.best,
        cap_reached: false,
        nodes,
    };
    for r in results {
        if r.cap_reached {
            best.best = r.best;
            best.cap_reached = true;
            break;
        }
        if r.best.len() > best.best.len() {
            best.best = r.best;
        }
    }
    best
}

/// Least `N <= cap` such that no `colors`-coloring of `[N]` avoids `f`.
pub fn min_unavoidable_n(
    f: &PatternFamily,
    colors: u32,
    cap: u32,
    opts: AvoidOptions,
) -> Result<AvoidanceReport, BruteError> {
    if colors == 0 {
        return Err(BruteError::InvalidArgument("at least one color is required".into()));
    }
    if cap == 0 {
        return Err(BruteError::InvalidArgument("cap must be at least 1".into()));
    }
    let by_max = instances_by_max(f, cap);
    let s = search(&by_max, colors, cap as usize, opts.jobs);
    if s.cap_reached {
        let coloring = s.best;
        check_avoids(f, colors, &coloring)?;
        return Err(BruteError::CapReached { cap, coloring });
    }
    let min_n = s.best.len() as u32 + 1;
    check_avoids(f, colors, &s.best)?;
    let certificate_nodes = refute(f, colors, min_n)?;
    Ok(AvoidanceReport {
        pattern: f.to_string(),
        colors,
        cap,
        min_n,
        avoiding: s.best,
        nodes_explored: s.nodes,
        certificate_nodes,
    })
}

/// Rechecks an avoiding coloring from scratch with a plain scan of every instance.
fn check_avoids(f: &PatternFamily, colors: u32, coloring: &[u32]) -> Result<(), BruteError> {
    if coloring.is_empty() {
        return Ok(());
    }
    let c = NatColoring::table_with_count(coloring.to_vec(), colors)?;
    match verify_nat_coloring(&c, f, coloring.len() as u64)? {
        Outcome::NoInstance { .. } => Ok(()),
        Outcome::Witness(w) => Err(BruteError::Unverified(format!(
            "avoiding coloring has a monochromatic instance {:?}",
            w.elements
        ))),
    }
}

/// Exhausts every coloring of `[n]`, without symmetry pruning, and fails if any
/// avoids `f`. Returns the number of nodes visited.
pub fn refute(f: &PatternFamily, colors: u32, n: u32) -> Result<u64, BruteError> {
    let by_max = instances_by_max(f, n);
    let mut s = Solver::new(&by_max, colors, n as usize, false);
    if s.dfs(1, 0) {
        return Err(BruteError::Unverified(format!(
            "[{n}] has an avoiding coloring {:?}",
            &s.col[1..]
        )));
    }
    Ok(s.nodes)
}
