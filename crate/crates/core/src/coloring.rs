//! Proper edge colorings in canonical form, rainbow detection and counting,
//! clash predicates, and exact counting bounds for bipartite copies.
//!
//! A proper coloring partitions the host's edges into matchings. Colorings
//! are stored canonically: class ids are dense and appear in first-use order
//! along the host's canonical edge ordering, so bijectively renamed colorings
//! collapse to identical values.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num::integer::binomial;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{enumerate_copies, GadgetSpec, Graph, GraphError, Side, SubgraphCopy};

/// Default cap on the number of rainbow witnesses retained by a census.
pub const DEFAULT_WITNESS_CAP: usize = 16;

#[derive(Debug, Error)]
pub enum ColoringError {
    #[error("assignment misses edge ({0}, {1})")]
    MissingEdge(usize, usize),
    #[error("assignment mentions ({0}, {1}), which is not a host edge")]
    UnknownEdge(usize, usize),
    #[error("assignment mentions edge ({0}, {1}) twice")]
    DuplicateAssignment(usize, usize),
    #[error("color {color} appears on two edges at vertex {vertex}")]
    Properness { vertex: usize, color: u32 },
    #[error("copy edge ({0}, {1}) does not lie in the host")]
    CopyNotInHost(usize, usize),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("host graph mismatch: {0}")]
    HostMismatch(String),
    #[error("inapplicable: {0}")]
    Inapplicable(String),
    #[error("pattern has no vertices")]
    PatternEmpty,
    #[error("anchor not in host: {0}")]
    AnchorNotInHost(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A total proper edge coloring of a fixed host graph, held in canonical
/// (first-use) form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperColoring {
    host: Graph,
    /// Color of edge `i` in the host's canonical edge order.
    colors: Vec<u32>,
    class_count: u32,
}

impl ProperColoring {
    /// Validates totality and properness of the raw assignment (triples
    /// `(u, v, color)`), then canonicalizes color ids into first-use order.
    pub fn check_proper(
        host: &Graph,
        assignment: &[(usize, usize, u32)],
    ) -> Result<Self, ColoringError> {
        let m = host.edge_count();
        let mut raw: Vec<Option<u32>> = vec![None; m];
        for &(u, v, c) in assignment {
            let idx = host
                .edge_index(u, v)
                .ok_or(ColoringError::UnknownEdge(u, v))?;
            if raw[idx].is_some() {
                return Err(ColoringError::DuplicateAssignment(u, v));
            }
            raw[idx] = Some(c);
        }
        let mut colors = Vec::with_capacity(m);
        for (idx, slot) in raw.iter().enumerate() {
            match slot {
                Some(c) => colors.push(*c),
                None => {
                    let (u, v) = host.edges()[idx];
                    return Err(ColoringError::MissingEdge(u, v));
                }
            }
        }
        // Properness: at every vertex, incident edges carry distinct colors.
        let mut seen_at: Vec<HashMap<u32, ()>> = vec![HashMap::new(); host.vertex_count()];
        for (idx, &(u, v)) in host.edges().iter().enumerate() {
            let c = colors[idx];
            for w in [u, v] {
                if seen_at[w].insert(c, ()).is_some() {
                    return Err(ColoringError::Properness { vertex: w, color: c });
                }
            }
        }
        Ok(Self::canonicalize(host.clone(), colors))
    }

    fn canonicalize(host: Graph, colors: Vec<u32>) -> Self {
        let mut rename: HashMap<u32, u32> = HashMap::new();
        let mut canonical = Vec::with_capacity(colors.len());
        for c in colors {
            let next = rename.len() as u32;
            canonical.push(*rename.entry(c).or_insert(next));
        }
        let class_count = rename.len() as u32;
        ProperColoring { host, colors: canonical, class_count }
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    /// Canonical color of edge `(u, v)`.
    pub fn color(&self, u: usize, v: usize) -> Option<u32> {
        self.host.edge_index(u, v).map(|i| self.colors[i])
    }

    /// Colors by canonical edge index.
    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn class_count(&self) -> u32 {
        self.class_count
    }

    /// Color classes in id order; each class is a matching.
    pub fn classes(&self) -> Vec<Vec<(usize, usize)>> {
        let mut classes = vec![Vec::new(); self.class_count as usize];
        for (idx, &(u, v)) in self.host.edges().iter().enumerate() {
            classes[self.colors[idx] as usize].push((u, v));
        }
        classes
    }

    /// The set of colors used on the given edges (each must be a host edge).
    pub fn color_set(&self, edges: &[(usize, usize)]) -> Result<HashSet<u32>, ColoringError> {
        let mut set = HashSet::new();
        for &(u, v) in edges {
            let idx = self
                .host
                .edge_index(u, v)
                .ok_or(ColoringError::CopyNotInHost(u, v))?;
            set.insert(self.colors[idx]);
        }
        Ok(set)
    }

    /// Pulls the coloring back through an embedding of `sub` into the host:
    /// `vertex_map[i]` is the host image of sub-vertex `i`. Every sub-edge
    /// must map to a host edge. The result is canonicalized.
    pub fn restricted(
        &self,
        sub: &Graph,
        vertex_map: &[usize],
    ) -> Result<ProperColoring, ColoringError> {
        if vertex_map.len() != sub.vertex_count() {
            return Err(ColoringError::HostMismatch(format!(
                "vertex map covers {} vertices but the subgraph has {}",
                vertex_map.len(),
                sub.vertex_count()
            )));
        }
        let mut colors = Vec::with_capacity(sub.edge_count());
        for &(a, b) in sub.edges() {
            let (u, v) = (vertex_map[a], vertex_map[b]);
            let idx = self
                .host
                .edge_index(u, v)
                .ok_or(ColoringError::CopyNotInHost(u, v))?;
            colors.push(self.colors[idx]);
        }
        Ok(Self::canonicalize(sub.clone(), colors))
    }

    /// Serializes as one line `u v c` per edge, in canonical edge order.
    pub fn write_text(&self) -> String {
        let mut out = String::new();
        for (idx, &(u, v)) in self.host.edges().iter().enumerate() {
            writeln!(out, "{u} {v} {}", self.colors[idx]).expect("string write");
        }
        out
    }

    /// Parses the `u v c` line format against a known host and validates it.
    pub fn parse_text(host: &Graph, text: &str) -> Result<ProperColoring, ColoringError> {
        let mut triples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut field = |what: &str| -> Result<usize, ColoringError> {
                parts
                    .next()
                    .ok_or_else(|| ColoringError::Format { line: i + 1, msg: format!("missing {what}") })?
                    .parse()
                    .map_err(|_| ColoringError::Format { line: i + 1, msg: format!("unparsable {what}") })
            };
            let u = field("endpoint")?;
            let v = field("endpoint")?;
            let c = field("color")?;
            if parts.next().is_some() {
                return Err(ColoringError::Format { line: i + 1, msg: "trailing tokens".into() });
            }
            let c: u32 = c
                .try_into()
                .map_err(|_| ColoringError::Format { line: i + 1, msg: "color out of range".into() })?;
            triples.push((u, v, c));
        }
        Self::check_proper(host, &triples)
    }

    /// Samples a random proper coloring: edges are visited in a random order
    /// and each reuses a random compatible existing class with probability
    /// `reuse_bias` (when one exists), otherwise opens a fresh class. The
    /// result is canonical, so equal partitions compare equal.
    pub fn random<R: Rng>(host: &Graph, rng: &mut R, reuse_bias: f64) -> ProperColoring {
        let m = host.edge_count();
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let mut colors = vec![u32::MAX; m];
        let mut at_vertex: Vec<HashSet<u32>> = vec![HashSet::new(); host.vertex_count()];
        let mut class_count = 0u32;
        for &idx in &order {
            let (u, v) = host.edges()[idx];
            let compatible: Vec<u32> = (0..class_count)
                .filter(|c| !at_vertex[u].contains(c) && !at_vertex[v].contains(c))
                .collect();
            let choice = if !compatible.is_empty() && rng.gen_bool(reuse_bias) {
                compatible[rng.gen_range(0..compatible.len())]
            } else {
                class_count += 1;
                class_count - 1
            };
            colors[idx] = choice;
            at_vertex[u].insert(choice);
            at_vertex[v].insert(choice);
        }
        Self::canonicalize(host.clone(), colors)
    }
}

// ---------------------------------------------------------------------------
// Rainbow predicates and censuses
// ---------------------------------------------------------------------------

/// True iff the copy's image edges all carry distinct colors.
pub fn is_rainbow(coloring: &ProperColoring, copy: &SubgraphCopy) -> Result<bool, ColoringError> {
    let mut seen = HashSet::with_capacity(copy.edges.len());
    for &(u, v) in &copy.edges {
        let idx = coloring
            .host()
            .edge_index(u, v)
            .ok_or(ColoringError::CopyNotInHost(u, v))?;
        if !seen.insert(coloring.colors()[idx]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact rainbow census of all pattern copies in the coloring's host.
#[derive(Debug, Clone)]
pub struct RainbowReport {
    pub total_copies: u64,
    pub rainbow_copies: u64,
    pub non_rainbow_copies: u64,
    /// Up to `witness_cap` rainbow copies, in enumeration order.
    pub witnesses: Vec<SubgraphCopy>,
    pub witness_cap: usize,
}

/// Censuses every copy of `pattern` with the default witness cap.
pub fn rainbow_census(
    coloring: &ProperColoring,
    pattern: &Graph,
) -> Result<RainbowReport, ColoringError> {
    rainbow_census_with_cap(coloring, pattern, DEFAULT_WITNESS_CAP)
}

/// Censuses every copy of `pattern`, retaining at most `witness_cap` rainbow
/// witnesses.
pub fn rainbow_census_with_cap(
    coloring: &ProperColoring,
    pattern: &Graph,
    witness_cap: usize,
) -> Result<RainbowReport, ColoringError> {
    if pattern.vertex_count() == 0 {
        return Err(ColoringError::PatternEmpty);
    }
    let copies = enumerate_copies(coloring.host(), pattern)?;
    let mut rainbow = 0u64;
    let mut witnesses = Vec::new();
    for copy in &copies {
        if is_rainbow(coloring, copy)? {
            rainbow += 1;
            if witnesses.len() < witness_cap {
                witnesses.push(copy.clone());
            }
        }
    }
    Ok(RainbowReport {
        total_copies: copies.len() as u64,
        rainbow_copies: rainbow,
        non_rainbow_copies: copies.len() as u64 - rainbow,
        witnesses,
        witness_cap,
    })
}

/// True iff the two copies' edge-color sets intersect.
pub fn clash(
    coloring: &ProperColoring,
    copy_a: &SubgraphCopy,
    copy_b: &SubgraphCopy,
) -> Result<bool, ColoringError> {
    let a = coloring.color_set(&copy_a.edges)?;
    let b = coloring.color_set(&copy_b.edges)?;
    Ok(!a.is_disjoint(&b))
}

/// Anchor for [`copies_through`].
#[derive(Debug, Clone, Copy)]
pub enum Anchor {
    Vertex(usize),
    Edge(usize, usize),
}

/// Number of pattern copies whose image contains the anchor.
pub fn copies_through(g: &Graph, pattern: &Graph, anchor: Anchor) -> Result<u64, ColoringError> {
    match anchor {
        Anchor::Vertex(v) if v >= g.vertex_count() => {
            return Err(ColoringError::AnchorNotInHost(format!("vertex {v}")));
        }
        Anchor::Edge(u, v) if !g.has_edge(u, v) => {
            return Err(ColoringError::AnchorNotInHost(format!("edge ({u}, {v})")));
        }
        _ => {}
    }
    let copies = enumerate_copies(g, pattern)?;
    Ok(copies
        .iter()
        .filter(|c| match anchor {
            Anchor::Vertex(v) => c.vertices.contains(&v),
            Anchor::Edge(u, v) => {
                let key = if u < v { (u, v) } else { (v, u) };
                c.edges.binary_search(&key).is_ok()
            }
        })
        .count() as u64)
}

// ---------------------------------------------------------------------------
// Counting bounds
// ---------------------------------------------------------------------------

/// The product bound `e(G) * v(G) * max_extensions`, where `max_extensions`
/// ranges over unordered independent edge pairs of `G` and counts the pattern
/// copies whose image contains both edges of the pair.
#[derive(Debug, Clone)]
pub struct ExtensionBound {
    pub bound: u128,
    pub max_extensions: u64,
    /// An independent pair attaining the maximum.
    pub argmax_pair: ((usize, usize), (usize, usize)),
}

/// Computes the non-rainbow-count bound by exhaustive extension counting.
/// Requires the pattern to contain two independent edges, and the host to
/// contain at least one independent edge pair.
pub fn extension_bound(g: &Graph, pattern: &Graph) -> Result<ExtensionBound, ColoringError> {
    if !has_independent_pair(pattern) {
        return Err(ColoringError::Inapplicable(
            "pattern has no two independent edges".into(),
        ));
    }
    if !has_independent_pair(g) {
        return Err(ColoringError::Inapplicable(
            "host has no two independent edges".into(),
        ));
    }
    let copies = enumerate_copies(g, pattern)?;
    let edge_sets: Vec<&[(usize, usize)]> = copies.iter().map(|c| c.edges.as_slice()).collect();
    let mut best: Option<(u64, ((usize, usize), (usize, usize)))> = None;
    let edges = g.edges();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            let (e, f) = (edges[i], edges[j]);
            if !edges_independent(e, f) {
                continue;
            }
            let count = edge_sets
                .iter()
                .filter(|set| set.binary_search(&e).is_ok() && set.binary_search(&f).is_ok())
                .count() as u64;
            if best.map_or(true, |(b, _)| count > b) {
                best = Some((count, (e, f)));
            }
        }
    }
    let (max_extensions, argmax_pair) = best.expect("independent pair exists");
    let bound = g.edge_count() as u128 * g.vertex_count() as u128 * max_extensions as u128;
    Ok(ExtensionBound { bound, max_extensions, argmax_pair })
}

fn has_independent_pair(g: &Graph) -> bool {
    let edges = g.edges();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            if edges_independent(edges[i], edges[j]) {
                return true;
            }
        }
    }
    false
}

fn edges_independent(e: (usize, usize), f: (usize, usize)) -> bool {
    e.0 != f.0 && e.0 != f.1 && e.1 != f.0 && e.1 != f.1
}

/// Exact non-rainbow count over complete bipartite sub-copies pinned to the
/// small side, together with the product upper bound
/// `r * n * (r-1) * C(n-2, s-2)`.
#[derive(Debug, Clone, Copy)]
pub struct BipartiteNonRainbow {
    pub non_rainbow: u64,
    pub bound: u128,
}

/// Counts non-rainbow copies of `K_{r,s}` inside a properly colored `K_{r,n}`
/// whose size-`r` class is exactly the size-`r` side. The coloring's host must
/// be the canonical complete bipartite gadget on classes `0..r` and `r..r+n`.
pub fn count_non_rainbow_bipartite(
    coloring: &ProperColoring,
    r: usize,
    s: usize,
) -> Result<BipartiteNonRainbow, ColoringError> {
    let host = coloring.host();
    if r < 1 || host.vertex_count() <= r {
        return Err(ColoringError::HostMismatch(format!(
            "host cannot be a complete bipartite graph with a size-{r} side"
        )));
    }
    let n = host.vertex_count() - r;
    let expected = GadgetSpec::CompleteBipartite(r, n)
        .build()
        .map_err(ColoringError::Graph)?;
    if host.edges() != expected.edges() || n < r {
        return Err(ColoringError::HostMismatch(format!(
            "host is not the canonical complete bipartite graph with classes {r} and {n}"
        )));
    }
    if s < 2 || s > n {
        return Err(ColoringError::Inapplicable(format!(
            "subcopy class size s={s} must satisfy 2 <= s <= n={n}"
        )));
    }

    let mut non_rainbow = 0u64;
    let mut subset: Vec<usize> = (0..s).collect();
    loop {
        // Colors of the r*s edges between the full left side and the chosen
        // right-side subset.
        let mut seen = HashSet::with_capacity(r * s);
        let mut rainbow = true;
        'scan: for left in 0..r {
            for &offset in &subset {
                let c = coloring.color(left, r + offset).expect("edge of K_{r,n}");
                if !seen.insert(c) {
                    rainbow = false;
                    break 'scan;
                }
            }
        }
        if !rainbow {
            non_rainbow += 1;
        }
        if !advance_combination(&mut subset, n) {
            break;
        }
    }

    let bound = r as u128
        * n as u128
        * (r as u128 - 1)
        * binomial((n - 2) as u128, s.saturating_sub(2) as u128);
    if r > 1 && non_rainbow as u128 > bound {
        return Err(ColoringError::Internal(format!(
            "non-rainbow count {non_rainbow} exceeds the product bound {bound}"
        )));
    }
    Ok(BipartiteNonRainbow { non_rainbow, bound })
}

/// Advances `subset` to the next s-combination of `0..n`; false at the end.
fn advance_combination(subset: &mut [usize], n: usize) -> bool {
    let s = subset.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (s - i) {
            subset[i] += 1;
            for j in (i + 1)..s {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Convenience: vertices of the host on the given side (for gadgets carrying
/// side labels).
pub fn side_vertices(g: &Graph, side: Side) -> Vec<usize> {
    g.side_vertices(side)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
