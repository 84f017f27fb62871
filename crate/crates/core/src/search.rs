//! Exhaustive search for avoiding colorings, and two-sided certification
//! of the closed-form values.
//!
//! Cells are assigned in row-major order. Each color keeps incremental
//! structures: a union-find over the 2n vertices and bit-packed
//! adjacency rows. Adding an edge can only grow its color's components,
//! so a branch is cut as soon as the component receiving the new edge
//! holds a matching at the color's threshold; the cut is sound because
//! every completion of the branch keeps that matching.
//!
//! Symmetry restrictions (on by default) keep one representative per
//! orbit under row permutations, column permutations, and permutations
//! of equal-threshold colors: row 0 non-decreasing, column 0 below row 0
//! non-decreasing, and first occurrences of equal-threshold colors in
//! color order. The lexicographically smallest member of every orbit
//! satisfies all three, so no outcome is lost.

use crate::bits::Bits;
use crate::constructions::best_witness;
use crate::formula::{self, ThresholdVector};
use crate::graph::ColorMatrix;
use crate::matching::{self, meets_threshold};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Default node budget: generous for desk-scale sides.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    WitnessFound,
    ExhaustedNone,
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub kind: OutcomeKind,
    pub witness: Option<ColorMatrix>,
    pub nodes_visited: u64,
    pub prunes: u64,
    pub elapsed: Duration,
    /// True when the witness came from a parallel run, where which
    /// witness is found first depends on scheduling. The outcome kind is
    /// deterministic either way.
    pub nondeterministic_witness: bool,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub budget: u64,
    pub threads: usize,
    pub symmetry: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            threads: 1,
            symmetry: true,
        }
    }
}

// ==== union-find ====

#[derive(Clone)]
struct Dsu {
    parent: Vec<u32>,
}

impl Dsu {
    fn new(len: usize) -> Self {
        Dsu {
            parent: (0..len as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grandparent = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grandparent;
            x = grandparent;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[rb as usize] = ra;
        }
    }

    /// Partition as smallest-member labels, for representation-free
    /// comparison.
    #[cfg(test)]
    fn canonical(&mut self) -> Vec<u32> {
        let len = self.parent.len();
        let mut min_of_root = vec![u32::MAX; len];
        for x in 0..len as u32 {
            let r = self.find(x) as usize;
            min_of_root[r] = min_of_root[r].min(x);
        }
        (0..len as u32)
            .map(|x| {
                let r = self.find(x) as usize;
                min_of_root[r]
            })
            .collect()
    }
}

// ==== incremental search state ====

/// Partial coloring plus per-color incremental structures. The matrix
/// prefix in row-major order is the source of truth; everything else
/// always equals what `rebuild` of that prefix would produce.
pub struct SearchState {
    n: usize,
    thresholds: Vec<usize>,
    matrix: ColorMatrix,
    dsu: Vec<Dsu>,
    adj: Vec<Vec<Bits>>,
    used: Vec<bool>,
}

impl SearchState {
    fn new(n: usize, t: &ThresholdVector) -> Self {
        let colors = t.arity();
        SearchState {
            n,
            thresholds: t.entries().to_vec(),
            matrix: ColorMatrix::new_unassigned(n, colors).expect("valid dimensions"),
            dsu: vec![Dsu::new(2 * n); colors],
            adj: vec![vec![Bits::new(n); n]; colors],
            used: vec![false; colors],
        }
    }

    /// From-scratch state of a partial matrix (assigned cells must form a
    /// row-major prefix for search use; any partial works for checks).
    fn rebuild(matrix: &ColorMatrix, t: &ThresholdVector) -> Self {
        let mut st = SearchState::new(matrix.n(), t);
        for u in 0..matrix.n() {
            for w in 0..matrix.n() {
                if let Some(c) = matrix.get(u, w) {
                    st.matrix.set(u, w, c);
                    st.link(c as usize, u, w);
                    st.used[c as usize] = true;
                }
            }
        }
        st
    }

    fn link(&mut self, c: usize, u: usize, w: usize) {
        self.dsu[c].union(u as u32, (self.n + w) as u32);
        self.adj[c][u].set(w);
    }

    /// Matching size of color c's component containing side-one vertex u.
    fn component_matching_size(&mut self, c: usize, u: usize) -> usize {
        let root = self.dsu[c].find(u as u32);
        let left: Vec<usize> = (0..self.n)
            .filter(|&x| self.dsu[c].find(x as u32) == root)
            .collect();
        matching::matching_size(&left, &self.adj[c], self.n)
    }

    /// Full check over every component of every color. Redundant with the
    /// per-edge check, kept as the end-of-row safety net.
    fn any_color_meets(&mut self) -> bool {
        for c in 0..self.thresholds.len() {
            let mut claimed = vec![false; self.n];
            for u in 0..self.n {
                if claimed[u] || self.adj[c][u].is_empty() {
                    continue;
                }
                let root = self.dsu[c].find(u as u32);
                let left: Vec<usize> = (u..self.n)
                    .filter(|&x| self.dsu[c].find(x as u32) == root)
                    .collect();
                for &x in &left {
                    claimed[x] = true;
                }
                if matching::matching_size(&left, &self.adj[c], self.n) >= self.thresholds[c] {
                    return true;
                }
            }
        }
        false
    }
}

// ==== the search proper ====

struct Shared {
    budget: u64,
    found: AtomicBool,
    budget_hit: AtomicBool,
    nodes: AtomicU64,
    prunes: AtomicU64,
    witness: Mutex<Option<ColorMatrix>>,
}

enum Flow {
    Explored,
    Abort,
}

struct Worker<'a> {
    st: SearchState,
    shared: &'a Shared,
    t: &'a ThresholdVector,
    symmetry: bool,
    /// Equal-threshold colors below each color; all must appear before
    /// the color's own first occurrence.
    smaller_mates: Vec<Vec<usize>>,
}

fn smaller_mates(t: &ThresholdVector) -> Vec<Vec<usize>> {
    let e = t.entries();
    (0..e.len())
        .map(|c| (0..c).filter(|&c2| e[c2] == e[c]).collect())
        .collect()
}

impl Worker<'_> {
    fn dfs(&mut self, cell: usize) -> Flow {
        let n = self.st.n;
        if cell == n * n {
            // Independent re-verification before the witness escapes:
            // the matrix is complete, so the matching module recomputes
            // everything from scratch.
            let report = meets_threshold(&self.st.matrix, self.t).expect("arity matches");
            assert!(
                !report.any_met,
                "incremental state accepted a non-witness; report: {report:?}"
            );
            let mut slot = self.shared.witness.lock().expect("no poisoned locks");
            slot.get_or_insert_with(|| self.st.matrix.clone());
            self.shared.found.store(true, Ordering::Relaxed);
            return Flow::Abort;
        }
        let (u, w) = (cell / n, cell % n);
        let first = if self.symmetry {
            if u == 0 && w > 0 {
                self.st.matrix.get(0, w - 1).expect("prefix assigned") as usize
            } else if w == 0 && u >= 2 {
                self.st.matrix.get(u - 1, 0).expect("prefix assigned") as usize
            } else {
                0
            }
        } else {
            0
        };
        for c in first..self.st.thresholds.len() {
            if self.shared.found.load(Ordering::Relaxed) {
                return Flow::Abort;
            }
            if self.symmetry
                && !self.st.used[c]
                && !self.smaller_mates[c].iter().all(|&c2| self.st.used[c2])
            {
                continue;
            }
            let ticket = self.shared.nodes.fetch_add(1, Ordering::Relaxed);
            if ticket >= self.shared.budget {
                self.shared.budget_hit.store(true, Ordering::Relaxed);
                return Flow::Abort;
            }
            // Snapshot only what this branch mutates: color c's union-find.
            let saved = self.st.dsu[c].clone();
            let was_used = self.st.used[c];
            self.st.matrix.set(u, w, c as u8);
            self.st.link(c, u, w);
            self.st.used[c] = true;

            let mut cut = self.st.component_matching_size(c, u) >= self.st.thresholds[c];
            if !cut && w == n - 1 {
                cut = self.st.any_color_meets();
            }
            let flow = if cut {
                self.shared.prunes.fetch_add(1, Ordering::Relaxed);
                Flow::Explored
            } else {
                self.dfs(cell + 1)
            };

            self.st.dsu[c] = saved;
            self.st.adj[c][u].clear(w);
            self.st.matrix.unset(u, w);
            self.st.used[c] = was_used;
            if let Flow::Abort = flow {
                return Flow::Abort;
            }
        }
        Flow::Explored
    }

    /// Like dfs, but stops at `depth` and collects the prefixes reached.
    fn collect(&mut self, cell: usize, depth: usize, out: &mut Vec<ColorMatrix>) -> Flow {
        if cell == depth {
            out.push(self.st.matrix.clone());
            return Flow::Explored;
        }
        let n = self.st.n;
        let (u, w) = (cell / n, cell % n);
        let first = if self.symmetry {
            if u == 0 && w > 0 {
                self.st.matrix.get(0, w - 1).expect("prefix assigned") as usize
            } else if w == 0 && u >= 2 {
                self.st.matrix.get(u - 1, 0).expect("prefix assigned") as usize
            } else {
                0
            }
        } else {
            0
        };
        for c in first..self.st.thresholds.len() {
            if self.symmetry
                && !self.st.used[c]
                && !self.smaller_mates[c].iter().all(|&c2| self.st.used[c2])
            {
                continue;
            }
            let ticket = self.shared.nodes.fetch_add(1, Ordering::Relaxed);
            if ticket >= self.shared.budget {
                self.shared.budget_hit.store(true, Ordering::Relaxed);
                return Flow::Abort;
            }
            let saved = self.st.dsu[c].clone();
            let was_used = self.st.used[c];
            self.st.matrix.set(u, w, c as u8);
            self.st.link(c, u, w);
            self.st.used[c] = true;

            let mut cut = self.st.component_matching_size(c, u) >= self.st.thresholds[c];
            if !cut && w == n - 1 {
                cut = self.st.any_color_meets();
            }
            let flow = if cut {
                self.shared.prunes.fetch_add(1, Ordering::Relaxed);
                Flow::Explored
            } else {
                self.collect(cell + 1, depth, out)
            };

            self.st.dsu[c] = saved;
            self.st.adj[c][u].clear(w);
            self.st.matrix.unset(u, w);
            self.st.used[c] = was_used;
            if let Flow::Abort = flow {
                return Flow::Abort;
            }
        }
        Flow::Explored
    }
}

/// Searches side n for a complete coloring on which no color reaches its
/// threshold. WitnessFound returns such a coloring, re-verified from
/// scratch; ExhaustedNone proves none exists; BudgetExceeded says the
/// node budget ran out first.
pub fn search_avoiding(n: usize, t: &ThresholdVector, cfg: &SearchConfig) -> SearchOutcome {
    assert!(n >= 1, "side must be at least 1");
    let start = Instant::now();
    let shared = Shared {
        budget: cfg.budget,
        found: AtomicBool::new(false),
        budget_hit: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
        prunes: AtomicU64::new(0),
        witness: Mutex::new(None),
    };
    let mates = smaller_mates(t);
    let parallel = cfg.threads > 1 && n >= 3;

    if !parallel {
        let mut worker = Worker {
            st: SearchState::new(n, t),
            shared: &shared,
            t,
            symmetry: cfg.symmetry,
            smaller_mates: mates,
        };
        worker.dfs(0);
    } else {
        // Frontier: every surviving assignment of the top two rows, fanned
        // out to workers that share the found flag and node counter.
        let depth = 2 * n;
        let mut frontier = Vec::new();
        let mut enumerator = Worker {
            st: SearchState::new(n, t),
            shared: &shared,
            t,
            symmetry: cfg.symmetry,
            smaller_mates: mates.clone(),
        };
        enumerator.collect(0, depth, &mut frontier);
        if !shared.budget_hit.load(Ordering::Relaxed) {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .expect("thread pool");
            pool.install(|| {
                use rayon::prelude::*;
                frontier.par_iter().for_each(|prefix| {
                    if shared.found.load(Ordering::Relaxed)
                        || shared.budget_hit.load(Ordering::Relaxed)
                    {
                        return;
                    }
                    let mut worker = Worker {
                        st: SearchState::rebuild(prefix, t),
                        shared: &shared,
                        t,
                        symmetry: cfg.symmetry,
                        smaller_mates: mates.clone(),
                    };
                    worker.dfs(depth);
                });
            });
        }
    }

    let witness = shared.witness.into_inner().expect("no poisoned locks");
    let kind = if witness.is_some() {
        OutcomeKind::WitnessFound
    } else if shared.budget_hit.load(Ordering::Relaxed) {
        OutcomeKind::BudgetExceeded
    } else {
        OutcomeKind::ExhaustedNone
    };
    SearchOutcome {
        kind,
        nondeterministic_witness: witness.is_some() && parallel,
        witness,
        nodes_visited: shared.nodes.load(Ordering::Relaxed),
        prunes: shared.prunes.load(Ordering::Relaxed),
        elapsed: start.elapsed(),
    }
}

// ==== certification ====

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegStatus {
    /// Search produced an avoiding coloring.
    WitnessBySearch,
    /// Search ran out of budget, but the stock construction reaches the
    /// required side and verifies.
    WitnessByConstruction,
    /// Search exhausted every coloring without finding one.
    ExhaustedNone,
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct LegReport {
    pub side: usize,
    pub status: LegStatus,
    pub nodes_visited: u64,
    pub elapsed: Duration,
    pub witness: Option<ColorMatrix>,
}

/// Outcome of certifying the closed-form value v: the lower leg wants an
/// avoiding coloring at side v-1, the upper leg wants exhaustion at side
/// v. `certified` when both land.
#[derive(Clone, Debug)]
pub struct CertifyReport {
    pub thresholds: ThresholdVector,
    pub value: usize,
    pub lower: LegReport,
    pub upper: LegReport,
    pub certified: bool,
}

pub fn certify_value(t: &ThresholdVector, cfg: &SearchConfig) -> CertifyReport {
    let (value, _) = formula::evaluate(t);

    let lower_outcome = search_avoiding(value - 1, t, cfg);
    let lower_status = match lower_outcome.kind {
        OutcomeKind::WitnessFound => LegStatus::WitnessBySearch,
        OutcomeKind::ExhaustedNone => LegStatus::ExhaustedNone,
        OutcomeKind::BudgetExceeded => LegStatus::BudgetExceeded,
    };
    let mut lower = LegReport {
        side: value - 1,
        status: lower_status,
        nodes_visited: lower_outcome.nodes_visited,
        elapsed: lower_outcome.elapsed,
        witness: lower_outcome.witness,
    };
    if lower.status == LegStatus::BudgetExceeded {
        let w = best_witness(t);
        if w.matrix.n() == value - 1
            && !meets_threshold(&w.matrix, t)
                .expect("arity matches")
                .any_met
        {
            lower.status = LegStatus::WitnessByConstruction;
            lower.witness = Some(w.matrix);
        }
    }

    let upper_outcome = search_avoiding(value, t, cfg);
    let upper = LegReport {
        side: value,
        status: match upper_outcome.kind {
            OutcomeKind::WitnessFound => LegStatus::WitnessBySearch,
            OutcomeKind::ExhaustedNone => LegStatus::ExhaustedNone,
            OutcomeKind::BudgetExceeded => LegStatus::BudgetExceeded,
        },
        nodes_visited: upper_outcome.nodes_visited,
        elapsed: upper_outcome.elapsed,
        witness: upper_outcome.witness,
    };

    let certified = matches!(
        lower.status,
        LegStatus::WitnessBySearch | LegStatus::WitnessByConstruction
    ) && upper.status == LegStatus::ExhaustedNone;

    CertifyReport {
        thresholds: t.clone(),
        value,
        lower,
        upper,
        certified,
    }
}
