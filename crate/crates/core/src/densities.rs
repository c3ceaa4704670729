//! Exact rational density functionals over subgraphs and bipartitions, and a
//! catalog of named threshold exponents.
//!
//! All values are exact `i64`-backed rationals; comparisons never pass through
//! floating point. Subset maxima are computed by exhaustive bitmask
//! enumeration over the vertex set, which bounds the supported graph size
//! (see [`MAX_DENSITY_VERTICES`]).

use num::rational::Ratio;
use num::Zero;
use thiserror::Error;

use crate::graph::{Graph, GraphError, SubgraphCopy};

/// Exact rational carrier for every density value: automatically kept in
/// lowest terms with a positive denominator.
pub type Rational = Ratio<i64>;

/// Convenience constructor for `n/d` in lowest terms.
pub fn rational(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

/// Parses `"a"` or `"a/b"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, DensityError> {
    let bad = || DensityError::BadRational(s.to_string());
    match s.split_once('/') {
        None => s.trim().parse::<i64>().map(Ratio::from_integer).map_err(|_| bad()),
        Some((a, b)) => {
            let n: i64 = a.trim().parse().map_err(|_| bad())?;
            let d: i64 = b.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
    }
}

/// Largest vertex count supported by the exhaustive subset enumerations here.
pub const MAX_DENSITY_VERTICES: usize = 16;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("density of the empty graph is undefined")]
    EmptyGraph,
    #[error("graph has {0} edges but at least 2 are required")]
    TooFewEdges(usize),
    #[error("no connected subgraph with at least 3 vertices and 2 edges exists")]
    NoValidSubgraph,
    #[error("graph has {vertices} vertices, exceeding the density enumeration limit {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("threshold case parameter out of range: {0}")]
    BadCaseParameter(String),
    #[error("unparsable rational {0:?} (expected `a` or `a/b`)")]
    BadRational(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Per-vertex adjacency bitmasks plus subset edge counts, the common substrate
/// for every subset enumeration below.
struct SubsetTable {
    n: usize,
    /// edge_count[mask] = number of edges with both endpoints in `mask`.
    edge_count: Vec<u32>,
    adj: Vec<u32>,
}

impl SubsetTable {
    fn new(g: &Graph) -> Result<Self, DensityError> {
        let n = g.vertex_count();
        if n > MAX_DENSITY_VERTICES {
            return Err(DensityError::TooLarge { vertices: n, limit: MAX_DENSITY_VERTICES });
        }
        let mut adj = vec![0u32; n];
        for &(u, v) in g.edges() {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        let mut edge_count = vec![0u32; 1usize << n];
        for mask in 1..(1usize << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            edge_count[mask] = edge_count[rest] + (adj[low] & rest as u32).count_ones();
        }
        Ok(SubsetTable { n, edge_count, adj })
    }

    fn connected(&self, mask: u32) -> bool {
        if mask == 0 {
            return false;
        }
        let mut reached = 1u32 << mask.trailing_zeros();
        loop {
            let mut next = reached;
            let mut bits = reached;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= self.adj[v] & mask;
            }
            if next == reached {
                return reached == mask;
            }
            reached = next;
        }
    }

    /// m1 per subset: m1_max[mask] = max over nonempty T ⊆ mask of e(T)/|T|.
    fn m1_table(&self) -> Vec<Rational> {
        let size = 1usize << self.n;
        let mut table = vec![Rational::zero(); size];
        for mask in 1..size {
            let own = Ratio::new(
                self.edge_count[mask] as i64,
                mask.count_ones() as i64,
            );
            let mut best = own;
            let mut bits = mask;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let sub = table[mask & !(1usize << v)];
                if sub > best {
                    best = sub;
                }
            }
            table[mask] = best;
        }
        table
    }
}

/// Maximum 2-density: the maximum of `(e(F) - 1)/(v(F) - 2)` over connected
/// subgraphs `F` with at least 2 edges and at least 3 vertices. The maximum is
/// attained on a connected induced subgraph, which is what the enumeration
/// scans.
pub fn m2(h: &Graph) -> Result<Rational, DensityError> {
    Ok(m2_with_argmax(h)?.0)
}

/// [`m2`] together with the lexicographically first vertex subset attaining it.
pub fn m2_with_argmax(h: &Graph) -> Result<(Rational, SubgraphCopy), DensityError> {
    if h.edge_count() < 2 {
        return Err(DensityError::TooFewEdges(h.edge_count()));
    }
    let table = SubsetTable::new(h)?;
    let mut best: Option<(Rational, u32)> = None;
    for mask in 1u32..(1u32 << table.n) {
        let v = mask.count_ones();
        if v < 3 {
            continue;
        }
        let e = table.edge_count[mask as usize];
        if e < 2 || !table.connected(mask) {
            continue;
        }
        let ratio = Ratio::new(e as i64 - 1, v as i64 - 2);
        if best.map_or(true, |(b, _)| ratio > b) {
            best = Some((ratio, mask));
        }
    }
    let (value, mask) = best.ok_or(DensityError::NoValidSubgraph)?;
    Ok((value, subset_copy(h, mask)))
}

fn subset_copy(h: &Graph, mask: u32) -> SubgraphCopy {
    let vertices: Vec<usize> = (0..h.vertex_count()).filter(|&v| mask & (1 << v) != 0).collect();
    let edges: Vec<(usize, usize)> = h
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| mask & (1 << u) != 0 && mask & (1 << v) != 0)
        .collect();
    SubgraphCopy { vertices, edges }
}

/// Maximum density: the maximum of `e(J')/v(J')` over nonempty subgraphs.
pub fn m1(h: &Graph) -> Result<Rational, DensityError> {
    if h.vertex_count() == 0 {
        return Err(DensityError::EmptyGraph);
    }
    let table = SubsetTable::new(h)?;
    let m1_max = table.m1_table();
    Ok(m1_max[(1usize << table.n) - 1])
}

/// Maximum bipartition density: the minimum over all bipartitions
/// `(V1, V2)` of `max(m1(h[V1]), m1(h[V2]))`, with an empty side contributing
/// density 0.
pub fn m_bip2(h: &Graph) -> Result<Rational, DensityError> {
    if h.vertex_count() == 0 {
        return Err(DensityError::EmptyGraph);
    }
    let table = SubsetTable::new(h)?;
    let m1_max = table.m1_table();
    let full = (1usize << table.n) - 1;
    let mut best: Option<Rational> = None;
    // Fix vertex 0 on side 1 to halve the symmetric scan.
    for half in 0..(1usize << (table.n - 1)) {
        let mask = (half << 1) | 1;
        let value = m1_max[mask].max(m1_max[full & !mask]);
        if best.map_or(true, |b| value < b) {
            best = Some(value);
        }
    }
    Ok(best.expect("at least one bipartition exists"))
}

/// True iff every proper subgraph `K` with at least 2 edges satisfies
/// `m2(K) < m2(h)`. Violations always appear on proper induced subgraphs, so
/// scanning proper vertex subsets is exhaustive.
pub fn strictly_2_balanced(h: &Graph) -> Result<bool, DensityError> {
    let (whole, _) = m2_with_argmax(h)?;
    let table = SubsetTable::new(h)?;
    let full = (1u32 << table.n) - 1;
    for mask in 1u32..full {
        let v = mask.count_ones();
        if v < 3 {
            continue;
        }
        let e = table.edge_count[mask as usize];
        if e < 2 || !table.connected(mask) {
            continue;
        }
        let ratio = Ratio::new(e as i64 - 1, v as i64 - 2);
        if ratio >= whole {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A full density report for one graph.
#[derive(Debug, Clone)]
pub struct DensityReport {
    pub m2: Rational,
    pub m1: Rational,
    /// Present only when bipartition search was requested.
    pub m_bip2: Option<Rational>,
    pub strictly_2_balanced: bool,
    /// Vertex subset (with its induced edges) attaining `m2`.
    pub argmax_subgraph: SubgraphCopy,
}

/// Computes every density functional for `h`; the bipartition minimum is
/// included only when `with_bip2` is set.
pub fn density_report(h: &Graph, with_bip2: bool) -> Result<DensityReport, DensityError> {
    let (m2_value, argmax) = m2_with_argmax(h)?;
    Ok(DensityReport {
        m2: m2_value,
        m1: m1(h)?,
        m_bip2: if with_bip2 { Some(m_bip2(h)?) } else { None },
        strictly_2_balanced: strictly_2_balanced(h)?,
        argmax_subgraph: argmax,
    })
}

// ---------------------------------------------------------------------------
// Threshold exponents
// ---------------------------------------------------------------------------

/// Named threshold cases for "dense bipartite seed plus binomial noise forces
/// a rainbow pattern". Each case maps to the exponent `a` of its threshold or
/// bound `n^{-a}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdCase {
    /// Odd cycle C_{2l+1}, parameterized by l >= 1.
    OddCycle(usize),
    K5,
    K7,
    K4,
    /// Complete graph on odd r >= 5: exponent 1/m2(K_r).
    OddComplete(usize),
    /// Upper-bound exponent for complete graphs on even r >= 4: (r-2)/C(r,2).
    EvenCompleteUpper(usize),
    /// Conjectured lower-bound exponent for even r >= 6: 1/m2(K_r).
    EvenLowerBound(usize),
}

/// Closed form for m2 of a complete graph: (C(r,2) - 1)/(r - 2).
pub fn m2_complete(r: usize) -> Rational {
    let binom = (r * (r - 1) / 2) as i64;
    Ratio::new(binom - 1, r as i64 - 2)
}

/// The exponent `a` with threshold (or bound) `n^{-a}` for the given case.
pub fn threshold_exponent(case: ThresholdCase) -> Result<Rational, DensityError> {
    match case {
        ThresholdCase::OddCycle(l) => {
            if l < 1 {
                return Err(DensityError::BadCaseParameter(
                    "odd cycle parameter must satisfy l >= 1".into(),
                ));
            }
            Ok(Ratio::from_integer(2))
        }
        ThresholdCase::K5 => Ok(Ratio::from_integer(1)),
        ThresholdCase::K7 => Ok(Ratio::new(7, 15)),
        ThresholdCase::K4 => Ok(Ratio::new(5, 4)),
        ThresholdCase::OddComplete(r) => {
            if r < 5 || r % 2 == 0 {
                return Err(DensityError::BadCaseParameter(format!(
                    "odd complete case requires odd r >= 5, got {r}"
                )));
            }
            Ok(m2_complete(r).recip())
        }
        ThresholdCase::EvenCompleteUpper(r) => {
            if r < 4 || r % 2 == 1 {
                return Err(DensityError::BadCaseParameter(format!(
                    "even complete upper case requires even r >= 4, got {r}"
                )));
            }
            Ok(Ratio::new(r as i64 - 2, (r * (r - 1) / 2) as i64))
        }
        ThresholdCase::EvenLowerBound(r) => {
            if r < 5 || r % 2 == 1 {
                return Err(DensityError::BadCaseParameter(format!(
                    "even lower-bound case requires even r >= 6, got {r}"
                )));
            }
            Ok(m2_complete(r).recip())
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
