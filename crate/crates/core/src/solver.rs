//! Exact decision of the rainbow arrow relation: does every proper edge
//! coloring of a host graph contain a rainbow copy of a pattern?
//!
//! The engine enumerates proper colorings up to color renaming exactly once,
//! as set partitions of the host's edges into matchings in canonical
//! first-use order: edges are visited in a fixed branch order, and each edge
//! tries the existing compatible classes in id order, then one fresh class.
//! A branch is pruned as soon as some pattern copy is fully colored rainbow
//! (no completion can be a witness); once every copy carries a repeated
//! color, the canonically first completion is taken as a witness. A witness
//! is re-verified (properness and zero rainbow copies) before it is
//! returned.
//!
//! Verdicts are deterministic: fixed input yields the identical boolean and
//! identical witness bytes. The engine is single-threaded; a parallel
//! explorer would have to replay the canonical order to keep witness bytes
//! stable, so determinism of the boolean is the only guarantee that would
//! survive multi-worker search.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::coloring::{rainbow_census, ColoringError, ProperColoring};
use crate::graph::{enumerate_copies, Graph, GraphError};

/// Largest host edge count the unpruned oracle accepts.
pub const ORACLE_EDGE_BUDGET: usize = 10;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("pattern has no edges")]
    EmptyPattern,
    #[error("oracle budget exceeded: {edges} edges (limit {limit})")]
    OracleBudget { edges: usize, limit: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Node and wall-clock limits for the exponential search. Budgets are
/// mandatory in the signature; unlimited fields are allowed but the caller
/// owns that choice.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub max_wall: Option<Duration>,
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget { max_nodes: Some(max_nodes), max_wall: None }
    }

    pub fn unlimited() -> Self {
        SearchBudget::default()
    }

    pub fn with_wall(mut self, wall: Duration) -> Self {
        self.max_wall = Some(wall);
        self
    }
}

/// Search effort counters; for an exhausted search these are the
/// explored-space certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    /// Color assignments tried.
    pub nodes: u64,
    /// Branches cut because a copy was forced rainbow.
    pub prunes: u64,
    /// Wall-clock time spent, in microseconds.
    pub wall_micros: u128,
}

/// Outcome of an arrow decision. `NotArrowed` carries a verified witness
/// coloring; `Indeterminate` means the budget ran out before a verdict
/// (never a wrong answer).
#[derive(Debug, Clone)]
pub enum ArrowVerdict {
    Arrowed { stats: SearchStats },
    NotArrowed { witness: ProperColoring, stats: SearchStats },
    Indeterminate { stats: SearchStats },
}

impl ArrowVerdict {
    /// The boolean verdict, if decided.
    pub fn arrowed(&self) -> Option<bool> {
        match self {
            ArrowVerdict::Arrowed { .. } => Some(true),
            ArrowVerdict::NotArrowed { .. } => Some(false),
            ArrowVerdict::Indeterminate { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&ProperColoring> {
        match self {
            ArrowVerdict::NotArrowed { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            ArrowVerdict::Arrowed { stats }
            | ArrowVerdict::NotArrowed { stats, .. }
            | ArrowVerdict::Indeterminate { stats } => stats,
        }
    }
}

/// Fixed branch order: descending endpoint degree sum, ties by canonical
/// edge index.
fn branch_order(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by_key(|&i| {
        let (u, v) = g.edges()[i];
        (std::cmp::Reverse(g.degree(u) + g.degree(v)), i)
    });
    order
}

enum SearchOutcome {
    Exhausted,
    Witness,
    Aborted,
}

struct Searcher<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    /// Edge index -> class id (usize::MAX while uncolored).
    assignment: Vec<usize>,
    class_edges: Vec<Vec<usize>>,
    /// Per class, which vertices its edges cover (matching constraint).
    class_mask: Vec<Vec<bool>>,
    class_count: usize,
    /// Pattern copies as host edge index lists.
    copies: Vec<Vec<usize>>,
    edge_copies: Vec<Vec<usize>>,
    copy_colored: Vec<u32>,
    /// Branch position at which the copy first received a repeated color,
    /// or usize::MAX while it is still rainbow-savable.
    copy_dead_at: Vec<usize>,
    alive: usize,
    prune: bool,
    stats: SearchStats,
    budget: SearchBudget,
    started: Instant,
}

impl<'a> Searcher<'a> {
    fn new(g: &'a Graph, h: &Graph, prune: bool, budget: SearchBudget) -> Result<Self, SolverError> {
        if h.edge_count() == 0 {
            return Err(SolverError::EmptyPattern);
        }
        let m = g.edge_count();
        let copies: Vec<Vec<usize>> = enumerate_copies(g, h)?
            .into_iter()
            .map(|c| {
                c.edges
                    .iter()
                    .map(|&(u, v)| g.edge_index(u, v).expect("copy edge in host"))
                    .collect()
            })
            .collect();
        let mut edge_copies = vec![Vec::new(); m];
        for (k, copy) in copies.iter().enumerate() {
            for &e in copy {
                edge_copies[e].push(k);
            }
        }
        let alive = copies.len();
        Ok(Searcher {
            g,
            order: branch_order(g),
            assignment: vec![usize::MAX; m],
            class_edges: vec![Vec::new(); m + 1],
            class_mask: vec![vec![false; g.vertex_count()]; m + 1],
            class_count: 0,
            copy_colored: vec![0; copies.len()],
            copy_dead_at: vec![usize::MAX; copies.len()],
            copies,
            edge_copies,
            alive,
            prune,
            stats: SearchStats { nodes: 0, prunes: 0, wall_micros: 0 },
            budget,
            started: Instant::now(),
        })
    }

    fn compatible(&self, class: usize, e: usize) -> bool {
        let (u, v) = self.g.edges()[e];
        !(self.class_mask[class][u] || self.class_mask[class][v])
    }

    /// Colors edge `e` with `class` at branch position `pos`. Returns true
    /// iff some copy is now fully colored and rainbow.
    fn assign(&mut self, e: usize, class: usize, pos: usize) -> bool {
        let (u, v) = self.g.edges()[e];
        self.assignment[e] = class;
        self.class_edges[class].push(e);
        self.class_mask[class][u] = true;
        self.class_mask[class][v] = true;
        if class == self.class_count {
            self.class_count += 1;
        }
        let mut rainbow_complete = false;
        for ci in 0..self.edge_copies[e].len() {
            let k = self.edge_copies[e][ci];
            if self.copy_dead_at[k] != usize::MAX {
                continue;
            }
            let duplicate = self.copies[k]
                .iter()
                .any(|&f| f != e && self.assignment[f] == class);
            if duplicate {
                self.copy_dead_at[k] = pos;
                self.alive -= 1;
            } else {
                self.copy_colored[k] += 1;
                if self.copy_colored[k] as usize == self.copies[k].len() {
                    rainbow_complete = true;
                }
            }
        }
        rainbow_complete
    }

    fn unassign(&mut self, e: usize, class: usize, pos: usize) {
        for ci in 0..self.edge_copies[e].len() {
            let k = self.edge_copies[e][ci];
            if self.copy_dead_at[k] == pos {
                self.copy_dead_at[k] = usize::MAX;
                self.alive += 1;
            } else if self.copy_dead_at[k] == usize::MAX {
                self.copy_colored[k] -= 1;
            }
        }
        let (u, v) = self.g.edges()[e];
        self.assignment[e] = usize::MAX;
        self.class_edges[class].pop();
        self.class_mask[class][u] = false;
        self.class_mask[class][v] = false;
        if class + 1 == self.class_count && self.class_edges[class].is_empty() {
            self.class_count -= 1;
        }
    }

    fn over_budget(&self) -> bool {
        if let Some(max) = self.budget.max_nodes {
            if self.stats.nodes > max {
                return true;
            }
        }
        if let Some(max) = self.budget.max_wall {
            if self.stats.nodes % 4096 == 0 && self.started.elapsed() > max {
                return true;
            }
        }
        false
    }

    /// Canonically first completion of the current partial coloring; only
    /// valid when no copy can become rainbow any more.
    fn complete_greedily(&mut self, from: usize) {
        for pos in from..self.order.len() {
            let e = self.order[pos];
            let class = (0..self.class_count)
                .find(|&c| self.compatible(c, e))
                .unwrap_or(self.class_count);
            self.stats.nodes += 1;
            self.assign(e, class, pos);
        }
    }

    fn dfs(&mut self, pos: usize) -> SearchOutcome {
        if self.prune && self.alive == 0 {
            // Every copy already repeats a color: the canonically first
            // completion is a witness.
            self.complete_greedily(pos);
            return SearchOutcome::Witness;
        }
        if pos == self.order.len() {
            return if self.alive == 0 {
                SearchOutcome::Witness
            } else {
                SearchOutcome::Exhausted
            };
        }
        let e = self.order[pos];
        let limit = self.class_count;
        for class in 0..=limit {
            if class < limit && !self.compatible(class, e) {
                continue;
            }
            self.stats.nodes += 1;
            if self.over_budget() {
                return SearchOutcome::Aborted;
            }
            let rainbow_complete = self.assign(e, class, pos);
            if self.prune && rainbow_complete {
                self.stats.prunes += 1;
                self.unassign(e, class, pos);
                continue;
            }
            match self.dfs(pos + 1) {
                SearchOutcome::Exhausted => {
                    self.unassign(e, class, pos);
                }
                done => return done,
            }
        }
        SearchOutcome::Exhausted
    }

    fn run(mut self, h: &Graph) -> Result<ArrowVerdict, SolverError> {
        let outcome = self.dfs(0);
        self.stats.wall_micros = self.started.elapsed().as_micros();
        let stats = self.stats;
        match outcome {
            SearchOutcome::Aborted => Ok(ArrowVerdict::Indeterminate { stats }),
            SearchOutcome::Exhausted => Ok(ArrowVerdict::Arrowed { stats }),
            SearchOutcome::Witness => {
                let triples: Vec<(usize, usize, u32)> = self
                    .g
                    .edges()
                    .iter()
                    .enumerate()
                    .map(|(i, &(u, v))| (u, v, self.assignment[i] as u32))
                    .collect();
                let witness = ProperColoring::check_proper(self.g, &triples)?;
                let census = rainbow_census(&witness, h)?;
                if census.rainbow_copies != 0 {
                    return Err(SolverError::Internal(
                        "witness re-verification found a rainbow copy".into(),
                    ));
                }
                Ok(ArrowVerdict::NotArrowed { witness, stats })
            }
        }
    }
}

/// Decides whether every proper edge coloring of `g` contains a rainbow copy
/// of `h`, by exhaustive canonical search for a witness coloring with no
/// rainbow copy. Budget exhaustion yields `Indeterminate`, never a wrong
/// verdict.
pub fn decide_arrow(g: &Graph, h: &Graph, budget: SearchBudget) -> Result<ArrowVerdict, SolverError> {
    Searcher::new(g, h, true, budget)?.run(h)
}

/// Search-free verdicts: when the pattern is the triangle, the answer is
/// decided by triangle existence (every triangle is rainbow under a proper
/// coloring, and a triangle-free host is witnessed by the all-distinct
/// coloring). Returns nothing for any other pattern.
pub fn decide_arrow_fast_paths(g: &Graph, h: &Graph) -> Result<Option<ArrowVerdict>, SolverError> {
    if h.vertex_count() != 3 || h.edge_count() != 3 {
        return Ok(None);
    }
    let stats = SearchStats { nodes: 0, prunes: 0, wall_micros: 0 };
    if g.has_triangle() {
        return Ok(Some(ArrowVerdict::Arrowed { stats }));
    }
    let triples: Vec<(usize, usize, u32)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| (u, v, i as u32))
        .collect();
    let witness = ProperColoring::check_proper(g, &triples)?;
    Ok(Some(ArrowVerdict::NotArrowed { witness, stats }))
}

/// Unpruned reference oracle: enumerates every partition of the host's
/// edges into matchings and tests each for a rainbow copy. Only accepts
/// hosts with at most [`ORACLE_EDGE_BUDGET`] edges.
pub fn brute_force_oracle(g: &Graph, h: &Graph) -> Result<ArrowVerdict, SolverError> {
    if g.edge_count() > ORACLE_EDGE_BUDGET {
        return Err(SolverError::OracleBudget {
            edges: g.edge_count(),
            limit: ORACLE_EDGE_BUDGET,
        });
    }
    Searcher::new(g, h, false, SearchBudget::unlimited())?.run(h)
}
