//! Finite simple graphs with optional bipartition side labels, a family of
//! parameterized gadget constructors, and exact subgraph-copy enumeration.
//!
//! Vertices are `0..n`. Edges are unordered pairs stored in normalized form
//! `(u, v)` with `u < v`, sorted ascending lexicographically; this ordering is
//! the canonical edge order used everywhere (file formats, colorings, search).

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Largest pattern (in vertices) accepted by [`enumerate_copies`].
pub const MAX_PATTERN_VERTICES: usize = 10;
/// Largest graph (in vertices) accepted by automorphism enumeration, unless a
/// closed form applies (complete and empty graphs).
pub const MAX_AUTOMORPHISM_VERTICES: usize = 10;

/// Errors produced by graph construction, parsing, and enumeration.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop edge ({0}, {0}) is not allowed")]
    LoopEdge(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("side labels must cover all {n} vertices, got {got}")]
    SideCoverage { n: usize, got: usize },
    #[error("bad gadget parameter: {0}")]
    BadParameter(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("bad gadget spec string {input:?}: {msg} (at byte {at})")]
    Spec {
        input: String,
        msg: String,
        at: usize,
    },
    #[error("pattern has {vertices} vertices, exceeding the copy-enumeration limit {limit}")]
    PatternTooLarge { vertices: usize, limit: usize },
    #[error("graph has {vertices} vertices, exceeding the automorphism limit {limit}")]
    AutomorphismTooLarge { vertices: usize, limit: usize },
}

/// Bipartition side label carried by bipartite-flavored gadgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// An immutable finite simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    sides: Option<Vec<Side>>,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge list. Edge endpoints may be
    /// given in either order; loops and duplicates are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        Self::build_internal(n, edges, None)
    }

    /// Builds a graph together with a total side labeling.
    pub fn with_sides(
        n: usize,
        edges: Vec<(usize, usize)>,
        sides: Vec<Side>,
    ) -> Result<Self, GraphError> {
        if sides.len() != n {
            return Err(GraphError::SideCoverage { n, got: sides.len() });
        }
        Self::build_internal(n, edges, Some(sides))
    }

    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            sides: None,
        }
    }

    fn build_internal(
        n: usize,
        edges: Vec<(usize, usize)>,
        sides: Option<Vec<Side>>,
    ) -> Result<Self, GraphError> {
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::LoopEdge(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            normalized.push((u, v));
        }
        normalized.sort_unstable();
        for w in normalized.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: normalized,
            adj,
            sides,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order: normalized `(u, v)` with `u < v`, sorted
    /// ascending lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a == b || a >= self.n || b >= self.n {
            return false;
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Position of edge `(a, b)` in the canonical edge order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search(&(u, v)).ok()
    }

    /// Side labels, if this graph carries a bipartition.
    pub fn sides(&self) -> Option<&[Side]> {
        self.sides.as_deref()
    }

    pub fn side(&self, v: usize) -> Option<Side> {
        self.sides.as_ref().map(|s| s[v])
    }

    /// Vertices carrying the given side label, ascending.
    pub fn side_vertices(&self, side: Side) -> Vec<usize> {
        match &self.sides {
            None => Vec::new(),
            Some(s) => (0..self.n).filter(|&v| s[*&v] == side).collect(),
        }
    }

    /// Returns a copy of this graph with `extra` edges added (duplicates of
    /// existing edges are ignored). Side labels are preserved.
    pub fn union_with_edges(&self, extra: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut seen: HashSet<(usize, usize)> = self.edges.iter().copied().collect();
        let mut all = self.edges.clone();
        for &(a, b) in extra {
            if a == b {
                return Err(GraphError::LoopEdge(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            if seen.insert((u, v)) {
                all.push((u, v));
            }
        }
        Self::build_internal(self.n, all, self.sides.clone())
    }

    /// True iff the graph is connected (the empty graph counts as connected).
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// True iff the graph contains at least one triangle.
    pub fn has_triangle(&self) -> bool {
        for &(u, v) in &self.edges {
            let (mut i, mut j) = (0, 0);
            let (a, b) = (&self.adj[u], &self.adj[v]);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => return true,
                }
            }
        }
        false
    }
}

/// Disjoint union of the given graphs, vertices relabeled by shifting each
/// part past its predecessors. Side labels are dropped.
pub fn disjoint_union(parts: &[Graph]) -> Graph {
    let n: usize = parts.iter().map(|g| g.n).sum();
    let mut edges = Vec::new();
    let mut offset = 0;
    for g in parts {
        for &(u, v) in &g.edges {
            edges.push((u + offset, v + offset));
        }
        offset += g.n;
    }
    Graph::build_internal(n, edges, None).expect("disjoint union of valid graphs is valid")
}

/// Join of two graphs: a disjoint union plus all edges between the parts.
/// Vertices of `l` keep their labels; vertices of `r` are shifted by `v(l)`.
/// The result carries side labels: `l`-vertices are `Left`, `r`-vertices `Right`.
pub fn join(l: &Graph, r: &Graph) -> Graph {
    let n = l.n + r.n;
    let mut edges = Vec::new();
    for &(u, v) in &l.edges {
        edges.push((u, v));
    }
    for &(u, v) in &r.edges {
        edges.push((u + l.n, v + l.n));
    }
    for u in 0..l.n {
        for v in 0..r.n {
            edges.push((u, l.n + v));
        }
    }
    let sides = (0..n)
        .map(|v| if v < l.n { Side::Left } else { Side::Right })
        .collect();
    Graph::build_internal(n, edges, Some(sides)).expect("join of valid graphs is valid")
}

/// Vertices adjacent to every vertex of `xs` and not themselves in `xs`,
/// ascending. An empty `xs` yields every vertex.
pub fn common_neighborhood(g: &Graph, xs: &[usize]) -> Result<Vec<usize>, GraphError> {
    for &x in xs {
        if x >= g.n {
            return Err(GraphError::VertexOutOfRange { vertex: x, n: g.n });
        }
    }
    if xs.is_empty() {
        return Ok((0..g.n).collect());
    }
    Ok((0..g.n)
        .filter(|&v| !xs.contains(&v) && xs.iter().all(|&x| g.has_edge(x, v)))
        .collect())
}

// ---------------------------------------------------------------------------
// Gadget constructors
// ---------------------------------------------------------------------------

/// A parameterized gadget. Each variant builds a concrete graph with a fixed
/// canonical vertex labeling (construction-stage order), so equal specs build
/// byte-identical graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetSpec {
    /// Complete graph on `r` vertices.
    Complete(usize),
    /// Cycle on `l >= 3` vertices, edges `(i, i+1 mod l)`.
    Cycle(usize),
    /// Complete bipartite graph; left class `0..r`, right class `r..r+s`.
    CompleteBipartite(usize, usize),
    /// Star with `k` leaves: center `0`, leaves `1..=k`.
    Star(usize),
    /// Path on `k` vertices in label order.
    Path(usize),
    /// Complete bipartite graph with classes of sizes `r < n`, plus a complete
    /// graph on the size-`r` class. Class `0..r` is the clique side (`Left`).
    HatK(usize, usize),
    /// `HatK(3, 5)` plus a 4-leaf star on the size-5 class centered at its
    /// lowest-indexed vertex (vertex 3).
    TildeK35,
    /// Join of two gadgets: all edges between the parts are added.
    Join(Box<GadgetSpec>, Box<GadgetSpec>),
    /// Star with `k` leaves where every star edge carries `t` triangles, each
    /// through a fresh apex: `1 + k + k*t` vertices and `k + 2*k*t` edges.
    /// Center `0`, leaves `1..=k`, apexes `k+1..=k+k*t` grouped by leaf.
    TriangleStar(usize, usize),
}

impl GadgetSpec {
    /// Builds the concrete graph for this spec with its canonical labeling.
    pub fn build(&self) -> Result<Graph, GraphError> {
        match *self {
            GadgetSpec::Complete(r) => {
                require_positive(r, "complete graph order")?;
                let mut edges = Vec::new();
                for u in 0..r {
                    for v in (u + 1)..r {
                        edges.push((u, v));
                    }
                }
                Graph::new(r, edges)
            }
            GadgetSpec::Cycle(l) => {
                if l < 3 {
                    return Err(GraphError::BadParameter(format!(
                        "cycle length must be at least 3, got {l}"
                    )));
                }
                let edges = (0..l).map(|i| (i, (i + 1) % l)).collect();
                Graph::new(l, edges)
            }
            GadgetSpec::CompleteBipartite(r, s) => {
                require_positive(r, "bipartite class size")?;
                require_positive(s, "bipartite class size")?;
                Ok(join(&Graph::empty(r), &Graph::empty(s)))
            }
            GadgetSpec::Star(k) => {
                require_positive(k, "star leaf count")?;
                Graph::new(k + 1, (1..=k).map(|i| (0, i)).collect())
            }
            GadgetSpec::Path(k) => {
                require_positive(k, "path order")?;
                Graph::new(k, (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect())
            }
            GadgetSpec::HatK(r, n) => {
                require_positive(r, "clique side size")?;
                if n <= r {
                    return Err(GraphError::BadParameter(format!(
                        "HatK requires n > r, got r={r}, n={n}"
                    )));
                }
                let clique = GadgetSpec::Complete(r).build()?;
                Ok(join(&clique, &Graph::empty(n)))
            }
            GadgetSpec::TildeK35 => {
                let base = GadgetSpec::HatK(3, 5).build()?;
                base.union_with_edges(&[(3, 4), (3, 5), (3, 6), (3, 7)])
            }
            GadgetSpec::Join(ref a, ref b) => Ok(join(&a.build()?, &b.build()?)),
            GadgetSpec::TriangleStar(k, t) => {
                require_positive(k, "triangle-star leaf count")?;
                require_positive(t, "triangles per edge")?;
                let n = 1 + k + k * t;
                let mut edges = Vec::new();
                for i in 1..=k {
                    edges.push((0, i));
                    for j in 1..=t {
                        let apex = k + (i - 1) * t + j;
                        edges.push((0, apex));
                        edges.push((i, apex));
                    }
                }
                Graph::new(n, edges)
            }
        }
    }
}

fn require_positive(x: usize, what: &str) -> Result<(), GraphError> {
    if x == 0 {
        Err(GraphError::BadParameter(format!("{what} must be positive")))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Gadget spec strings
// ---------------------------------------------------------------------------

impl fmt::Display for GadgetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetSpec::Complete(r) => write!(f, "K{r}"),
            GadgetSpec::Cycle(l) => write!(f, "C{l}"),
            GadgetSpec::CompleteBipartite(r, s) => write!(f, "Kb({r},{s})"),
            GadgetSpec::Star(k) => write!(f, "S{k}"),
            GadgetSpec::Path(k) => write!(f, "P{k}"),
            GadgetSpec::HatK(r, n) => write!(f, "Khat({r},{n})"),
            GadgetSpec::TildeK35 => write!(f, "Ktilde35"),
            GadgetSpec::Join(a, b) => write!(f, "Kjoin({a},{b})"),
            GadgetSpec::TriangleStar(k, t) => write!(f, "Kdelta({k},{t})"),
        }
    }
}

impl std::str::FromStr for GadgetSpec {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        let spec = parse_spec(s, bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(GraphError::Spec {
                input: s.to_string(),
                msg: "trailing characters after spec".into(),
                at: pos,
            });
        }
        Ok(spec)
    }
}

fn spec_err(input: &str, msg: &str, at: usize) -> GraphError {
    GraphError::Spec {
        input: input.to_string(),
        msg: msg.to_string(),
        at,
    }
}

fn parse_spec(input: &str, b: &[u8], pos: &mut usize) -> Result<GadgetSpec, GraphError> {
    let rest = &b[*pos..];
    let take = |pos: &mut usize, kw: &str| -> bool {
        if rest.starts_with(kw.as_bytes()) {
            *pos += kw.len();
            true
        } else {
            false
        }
    };
    if take(pos, "Ktilde35") {
        return Ok(GadgetSpec::TildeK35);
    }
    if take(pos, "Khat(") {
        let (r, n) = parse_two_args(input, b, pos)?;
        return Ok(GadgetSpec::HatK(r, n));
    }
    if take(pos, "Kb(") {
        let (r, s) = parse_two_args(input, b, pos)?;
        return Ok(GadgetSpec::CompleteBipartite(r, s));
    }
    if take(pos, "Kdelta(") {
        let (k, t) = parse_two_args(input, b, pos)?;
        return Ok(GadgetSpec::TriangleStar(k, t));
    }
    if take(pos, "Kjoin(") {
        let a = parse_spec(input, b, pos)?;
        expect_byte(input, b, pos, b',')?;
        let c = parse_spec(input, b, pos)?;
        expect_byte(input, b, pos, b')')?;
        return Ok(GadgetSpec::Join(Box::new(a), Box::new(c)));
    }
    match b.get(*pos) {
        Some(b'K') => {
            *pos += 1;
            Ok(GadgetSpec::Complete(parse_number(input, b, pos)?))
        }
        Some(b'C') => {
            *pos += 1;
            Ok(GadgetSpec::Cycle(parse_number(input, b, pos)?))
        }
        Some(b'S') => {
            *pos += 1;
            Ok(GadgetSpec::Star(parse_number(input, b, pos)?))
        }
        Some(b'P') => {
            *pos += 1;
            Ok(GadgetSpec::Path(parse_number(input, b, pos)?))
        }
        _ => Err(spec_err(input, "expected a gadget keyword", *pos)),
    }
}

fn parse_two_args(input: &str, b: &[u8], pos: &mut usize) -> Result<(usize, usize), GraphError> {
    let a = parse_number(input, b, pos)?;
    expect_byte(input, b, pos, b',')?;
    let c = parse_number(input, b, pos)?;
    expect_byte(input, b, pos, b')')?;
    Ok((a, c))
}

fn expect_byte(input: &str, b: &[u8], pos: &mut usize, byte: u8) -> Result<(), GraphError> {
    if b.get(*pos) == Some(&byte) {
        *pos += 1;
        Ok(())
    } else {
        Err(spec_err(input, &format!("expected {:?}", byte as char), *pos))
    }
}

fn parse_number(input: &str, b: &[u8], pos: &mut usize) -> Result<usize, GraphError> {
    let start = *pos;
    while matches!(b.get(*pos), Some(c) if c.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start {
        return Err(spec_err(input, "expected a number", start));
    }
    input[start..*pos]
        .parse()
        .map_err(|_| spec_err(input, "number out of range", start))
}

// ---------------------------------------------------------------------------
// Graph text format
// ---------------------------------------------------------------------------

/// Serializes a graph in the line-oriented text format:
/// `graph <n> <m>`, then `m` edge lines `<u> <v>` with `u < v` ascending
/// lexicographically, then (only when sides are present) `n` lines
/// `side <v> <0|1>` where `0` means `Left`.
pub fn write_graph_text(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph {} {}\n", g.vertex_count(), g.edge_count()));
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    if let Some(sides) = g.sides() {
        for (v, side) in sides.iter().enumerate() {
            let bit = match side {
                Side::Left => 0,
                Side::Right => 1,
            };
            out.push_str(&format!("side {v} {bit}\n"));
        }
    }
    out
}

/// Parses the graph text format, rejecting malformed input with the offending
/// line number. Edge lines must be normalized (`u < v`) and ascending; side
/// lines, when present, must cover every vertex exactly once.
pub fn parse_graph_text(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate();
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| GraphError::Format { line: 1, msg: "empty input".into() })?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("graph") {
        return Err(GraphError::Format {
            line: header_line + 1,
            msg: "expected header `graph <n> <m>`".into(),
        });
    }
    let n: usize = parse_field(parts.next(), header_line + 1, "vertex count")?;
    let m: usize = parse_field(parts.next(), header_line + 1, "edge count")?;
    if parts.next().is_some() {
        return Err(GraphError::Format {
            line: header_line + 1,
            msg: "trailing tokens in header".into(),
        });
    }

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (idx, line) = lines.next().ok_or_else(|| GraphError::Format {
            line: header_line + 2 + edges.len(),
            msg: "missing edge line".into(),
        })?;
        let mut parts = line.split_whitespace();
        let u: usize = parse_field(parts.next(), idx + 1, "edge endpoint")?;
        let v: usize = parse_field(parts.next(), idx + 1, "edge endpoint")?;
        if parts.next().is_some() {
            return Err(GraphError::Format { line: idx + 1, msg: "trailing tokens in edge line".into() });
        }
        if u >= v {
            return Err(GraphError::Format {
                line: idx + 1,
                msg: format!("edge ({u}, {v}) must satisfy u < v"),
            });
        }
        if let Some(&prev) = edges.last() {
            if prev >= (u, v) {
                return Err(GraphError::Format {
                    line: idx + 1,
                    msg: "edges must be strictly ascending lexicographically".into(),
                });
            }
        }
        edges.push((u, v));
    }

    let mut sides: Option<Vec<Option<Side>>> = None;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        if parts.next() != Some("side") {
            return Err(GraphError::Format {
                line: idx + 1,
                msg: "expected `side <v> <0|1>` or end of file".into(),
            });
        }
        let v: usize = parse_field(parts.next(), idx + 1, "side vertex")?;
        let bit: usize = parse_field(parts.next(), idx + 1, "side label")?;
        if parts.next().is_some() {
            return Err(GraphError::Format { line: idx + 1, msg: "trailing tokens in side line".into() });
        }
        if v >= n {
            return Err(GraphError::Format {
                line: idx + 1,
                msg: format!("side vertex {v} out of range"),
            });
        }
        let side = match bit {
            0 => Side::Left,
            1 => Side::Right,
            other => {
                return Err(GraphError::Format {
                    line: idx + 1,
                    msg: format!("side label must be 0 or 1, got {other}"),
                })
            }
        };
        let slot = &mut sides.get_or_insert_with(|| vec![None; n])[v];
        if slot.is_some() {
            return Err(GraphError::Format {
                line: idx + 1,
                msg: format!("duplicate side line for vertex {v}"),
            });
        }
        *slot = Some(side);
    }

    match sides {
        None => Graph::new(n, edges),
        Some(partial) => {
            let total: Option<Vec<Side>> = partial.into_iter().collect();
            match total {
                Some(all) => Graph::with_sides(n, edges, all),
                None => Err(GraphError::SideCoverage { n, got: 0 }),
            }
        }
    }
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, GraphError> {
    field
        .ok_or_else(|| GraphError::Format { line, msg: format!("missing {what}") })?
        .parse()
        .map_err(|_| GraphError::Format { line, msg: format!("unparsable {what}") })
}

// ---------------------------------------------------------------------------
// Subgraph copies and automorphisms
// ---------------------------------------------------------------------------

/// One subgraph copy of a pattern inside a host: `vertices[i]` is the host
/// image of pattern vertex `i`, and `edges` are the normalized, sorted host
/// images of the pattern edges. Copies are deduplicated modulo pattern
/// automorphisms, so distinct copies have distinct edge images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphCopy {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl SubgraphCopy {
    /// Builds the copy induced by a vertex map, mapping each pattern edge.
    pub fn from_map(pattern: &Graph, map: Vec<usize>) -> Self {
        let mut edges: Vec<(usize, usize)> = pattern
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (map[a], map[b]);
                if x < y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        edges.sort_unstable();
        SubgraphCopy { vertices: map, edges }
    }
}

/// All automorphisms of `g` (adjacency-preserving vertex bijections), each as
/// a permutation vector. Rejects graphs larger than
/// [`MAX_AUTOMORPHISM_VERTICES`].
pub fn automorphisms(g: &Graph) -> Result<Vec<Vec<usize>>, GraphError> {
    if g.vertex_count() > MAX_AUTOMORPHISM_VERTICES {
        return Err(GraphError::AutomorphismTooLarge {
            vertices: g.vertex_count(),
            limit: MAX_AUTOMORPHISM_VERTICES,
        });
    }
    let n = g.vertex_count();
    let mut result = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn recurse(
        g: &Graph,
        v: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        result: &mut Vec<Vec<usize>>,
    ) {
        let n = g.vertex_count();
        if v == n {
            result.push(map.clone());
            return;
        }
        for w in 0..n {
            if used[w] || g.degree(w) != g.degree(v) {
                continue;
            }
            let consistent = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(map[u], w));
            if consistent {
                map[v] = w;
                used[w] = true;
                recurse(g, v + 1, map, used, result);
                used[w] = false;
                map[v] = usize::MAX;
            }
        }
    }
    recurse(g, 0, &mut map, &mut used, &mut result);
    Ok(result)
}

/// Number of automorphisms of `g`. Complete and edgeless graphs use the
/// closed form `n!`; other graphs are enumerated (subject to the size limit).
pub fn automorphism_count(g: &Graph) -> Result<u128, GraphError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(GraphError::BadParameter(
            "automorphism count of the null graph is not defined".into(),
        ));
    }
    let max_edges = n * (n - 1) / 2;
    if g.edge_count() == 0 || g.edge_count() == max_edges {
        let mut f: u128 = 1;
        for i in 2..=n as u128 {
            f *= i;
        }
        return Ok(f);
    }
    Ok(automorphisms(g)?.len() as u128)
}

/// Enumerates every subgraph copy of `pattern` inside `host`, deduplicated
/// modulo pattern automorphisms, in ascending order of the vertex-map vector.
/// A copy requires every pattern edge to map to a host edge; host non-edges
/// between image vertices are allowed.
pub fn enumerate_copies(host: &Graph, pattern: &Graph) -> Result<Vec<SubgraphCopy>, GraphError> {
    let pv = pattern.vertex_count();
    if pv > MAX_PATTERN_VERTICES {
        return Err(GraphError::PatternTooLarge {
            vertices: pv,
            limit: MAX_PATTERN_VERTICES,
        });
    }
    if pv == 0 {
        return Ok(vec![SubgraphCopy { vertices: Vec::new(), edges: Vec::new() }]);
    }
    if pv > host.vertex_count() {
        return Ok(Vec::new());
    }
    let auts = automorphisms(pattern)?;
    let order = pattern_order(pattern);

    // placed_neighbors[d] = pattern neighbors of order[d] among order[0..d],
    // stored as positions into `order`.
    let mut pos_of = vec![usize::MAX; pv];
    for (d, &q) in order.iter().enumerate() {
        pos_of[q] = d;
    }
    let placed_neighbors: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(d, &q)| {
            pattern
                .neighbors(q)
                .iter()
                .filter(|&&u| pos_of[u] < d)
                .map(|&u| pos_of[u])
                .collect()
        })
        .collect();

    let mut images = vec![usize::MAX; pv];
    let mut used = vec![false; host.vertex_count()];
    let mut found = Vec::new();

    fn recurse(
        host: &Graph,
        pattern: &Graph,
        order: &[usize],
        placed_neighbors: &[Vec<usize>],
        auts: &[Vec<usize>],
        d: usize,
        images: &mut Vec<usize>,
        used: &mut Vec<bool>,
        found: &mut Vec<SubgraphCopy>,
    ) {
        if d == order.len() {
            let mut map = vec![usize::MAX; order.len()];
            for (pos, &q) in order.iter().enumerate() {
                map[q] = images[pos];
            }
            if is_orbit_minimal(&map, auts) {
                found.push(SubgraphCopy::from_map(pattern, map));
            }
            return;
        }
        let anchors = &placed_neighbors[d];
        if anchors.is_empty() {
            for w in 0..host.vertex_count() {
                if !used[w] {
                    images[d] = w;
                    used[w] = true;
                    recurse(host, pattern, order, placed_neighbors, auts, d + 1, images, used, found);
                    used[w] = false;
                }
            }
        } else {
            // Iterate over the neighbor list of the smallest-degree anchor image
            // and filter against the rest.
            let base = anchors
                .iter()
                .copied()
                .min_by_key(|&a| host.degree(images[a]))
                .unwrap();
            let base_image = images[base];
            for &w in host.neighbors(base_image) {
                if used[w] {
                    continue;
                }
                if anchors
                    .iter()
                    .all(|&a| a == base || host.has_edge(images[a], w))
                {
                    images[d] = w;
                    used[w] = true;
                    recurse(host, pattern, order, placed_neighbors, auts, d + 1, images, used, found);
                    used[w] = false;
                }
            }
        }
    }

    recurse(
        host,
        pattern,
        &order,
        &placed_neighbors,
        &auts,
        0,
        &mut images,
        &mut used,
        &mut found,
    );
    found.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(found)
}

/// Number of subgraph copies of `pattern` in `host`.
pub fn count_copies(host: &Graph, pattern: &Graph) -> Result<u64, GraphError> {
    Ok(enumerate_copies(host, pattern)?.len() as u64)
}

/// A vertex map is kept iff it is lexicographically minimal in its orbit
/// under the pattern automorphism group.
fn is_orbit_minimal(map: &[usize], auts: &[Vec<usize>]) -> bool {
    auts.iter().all(|sigma| {
        for i in 0..map.len() {
            let permuted = map[sigma[i]];
            match map[i].cmp(&permuted) {
                std::cmp::Ordering::Less => return true,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => continue,
            }
        }
        true
    })
}

/// Pattern vertex assignment order: start at a maximum-degree vertex, then
/// repeatedly take the vertex with the most already-placed neighbors
/// (ties: larger degree, then smaller index).
fn pattern_order(pattern: &Graph) -> Vec<usize> {
    let n = pattern.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for _ in 0..n {
        let mut best: Option<usize> = None;
        let mut best_key = (0usize, 0usize);
        for v in 0..n {
            if placed[v] {
                continue;
            }
            let anchored = pattern.neighbors(v).iter().filter(|&&u| placed[u]).count();
            let key = (anchored, pattern.degree(v));
            if best.is_none() || key > best_key {
                best = Some(v);
                best_key = key;
            }
        }
        let v = best.unwrap();
        placed[v] = true;
        order.push(v);
    }
    order
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn build(s: &str) -> Graph {
        s.parse::<GadgetSpec>().unwrap().build().unwrap()
    }

    /// The Petersen graph: outer 5-cycle 0-4, inner pentagram 5-9, spokes.
    fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new(10, edges).unwrap()
    }

    /// Independent oracle: counts injective homomorphisms pattern -> host by
    /// plain backtracking over all assignments, with no deduplication.
    fn injective_hom_count(host: &Graph, pattern: &Graph) -> u64 {
        fn recurse(host: &Graph, pattern: &Graph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
            let v = map.len();
            if v == pattern.vertex_count() {
                return 1;
            }
            let mut total = 0;
            for w in 0..host.vertex_count() {
                if used[w] {
                    continue;
                }
                let ok = (0..v).all(|u| !pattern.has_edge(u, v) || host.has_edge(map[u], w));
                if ok {
                    map.push(w);
                    used[w] = true;
                    total += recurse(host, pattern, map, used);
                    used[w] = false;
                    map.pop();
                }
            }
            total
        }
        recurse(host, pattern, &mut Vec::new(), &mut vec![false; host.vertex_count()])
    }

    // ---- construction and validation ----

    #[test]
    fn rejects_loops_duplicates_and_range() {
        assert!(matches!(Graph::new(3, vec![(1, 1)]), Err(GraphError::LoopEdge(1))));
        assert!(matches!(
            Graph::new(3, vec![(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(2, vec![(0, 5)]),
            Err(GraphError::VertexOutOfRange { vertex: 5, n: 2 })
        ));
    }

    #[test]
    fn normalizes_edge_order() {
        let g = Graph::new(4, vec![(3, 1), (2, 0), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 3)]);
        assert!(g.has_edge(1, 3));
        assert!(g.has_edge(3, 1));
        assert!(!g.has_edge(2, 3));
        assert_eq!(g.edge_index(3, 1), Some(2));
    }

    #[test]
    fn gadget_sizes_match_closed_forms() {
        let cases = [
            ("K4", 4, 6),
            ("K7", 7, 21),
            ("C5", 5, 5),
            ("S3", 4, 3),
            ("P4", 4, 3),
            ("Kb(3,5)", 8, 15),
            ("Khat(3,4)", 7, 15),
            ("Khat(3,5)", 8, 18),
            ("Ktilde35", 8, 22),
            ("Kjoin(S3,P4)", 8, 22),
            ("Kdelta(25,49)", 1251, 2475),
        ];
        for (spec, v, e) in cases {
            let g = build(spec);
            assert_eq!(g.vertex_count(), v, "{spec} vertices");
            assert_eq!(g.edge_count(), e, "{spec} edges");
        }
    }

    #[test]
    fn triangle_star_size_formulas_hold_for_all_small_parameters() {
        for k in 1..=50 {
            for t in 1..=50 {
                let g = GadgetSpec::TriangleStar(k, t).build().unwrap();
                assert_eq!(g.vertex_count(), 1 + k + k * t);
                assert_eq!(g.edge_count(), k + 2 * k * t);
            }
        }
    }

    #[test]
    fn tilde_k35_star_sits_at_lowest_index_of_the_size_5_class() {
        let g = build("Ktilde35");
        // Clique side 0..3; size-5 class 3..8; extra star centered at vertex 3.
        assert_eq!(g.degree(3), 3 + 4);
        for v in 4..8 {
            assert_eq!(g.degree(v), 3 + 1);
        }
        assert!(g.has_edge(0, 1) && g.has_edge(0, 2) && g.has_edge(1, 2));
    }

    #[test]
    fn join_labels_sides_and_adds_all_cross_edges() {
        let g = build("Kjoin(S3,P4)");
        assert_eq!(g.side(0), Some(Side::Left));
        assert_eq!(g.side(7), Some(Side::Right));
        assert_eq!(g.side_vertices(Side::Left), vec![0, 1, 2, 3]);
        for u in 0..4 {
            for v in 4..8 {
                assert!(g.has_edge(u, v));
            }
        }
        // Star edges and path edges survive inside the sides.
        assert!(g.has_edge(0, 3) && g.has_edge(4, 5) && g.has_edge(6, 7));
        assert!(!g.has_edge(1, 2));
    }

    #[test]
    fn gadget_parameter_validation() {
        assert!(GadgetSpec::Cycle(2).build().is_err());
        assert!(GadgetSpec::Complete(0).build().is_err());
        assert!(GadgetSpec::HatK(3, 3).build().is_err());
        assert!(GadgetSpec::TriangleStar(0, 1).build().is_err());
        assert!(GadgetSpec::HatK(3, 4).build().is_ok());
    }

    #[test]
    fn union_with_edges_preserves_sides_and_dedupes() {
        let g = build("Kb(2,2)");
        let h = g.union_with_edges(&[(0, 1), (0, 2)]).unwrap();
        assert_eq!(h.edge_count(), g.edge_count() + 1);
        assert_eq!(h.sides(), g.sides());
    }

    // ---- spec strings ----

    #[test]
    fn spec_string_round_trips() {
        let samples = [
            "K4",
            "C5",
            "Kb(3,5)",
            "S3",
            "P4",
            "Khat(3,5)",
            "Ktilde35",
            "Kjoin(S3,P4)",
            "Kjoin(Kjoin(K2,P3),S1)",
            "Kdelta(25,49)",
        ];
        for s in samples {
            let spec: GadgetSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }

    #[test]
    fn spec_string_rejects_malformed_input() {
        for bad in ["", "K", "Q4", "Kb(3)", "Kb(3,5", "Kjoin(K4)", "K4x", "Kb(3,5))"] {
            assert!(bad.parse::<GadgetSpec>().is_err(), "{bad:?} should fail");
        }
    }

    // ---- text format ----

    #[test]
    fn text_format_round_trips_with_sides() {
        let g = build("Khat(3,4)");
        let text = write_graph_text(&g);
        let back = parse_graph_text(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn text_format_golden_bytes() {
        let g = build("Kb(2,2)");
        let expected = "graph 4 4\n0 2\n0 3\n1 2\n1 3\nside 0 0\nside 1 0\nside 2 1\nside 3 1\n";
        assert_eq!(write_graph_text(&g), expected);
    }

    #[test]
    fn text_format_rejects_with_line_numbers() {
        let err = parse_graph_text("graph 3 2\n1 0\n1 2\n").unwrap_err();
        match err {
            GraphError::Format { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_graph_text("graph 3 2\n0 1\n0 1\n").unwrap_err();
        match err {
            GraphError::Format { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_graph_text("graph 2 1\n0 1\nside 0 0\n").unwrap_err();
        match err {
            GraphError::SideCoverage { .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    // ---- copy enumeration ----

    #[test]
    fn copy_counts_match_injective_hom_oracle() {
        let cases = [
            ("K6", "K4"),
            ("K5", "K3"),
            ("K5", "C4"),
            ("Kb(3,3)", "Kb(2,2)"),
            ("C4", "P4"),
            ("Khat(3,4)", "K4"),
            ("Kjoin(S3,S4)", "K4"),
        ];
        for (host_s, pat_s) in cases {
            let host = build(host_s);
            let pattern = build(pat_s);
            let copies = enumerate_copies(&host, &pattern).unwrap();
            let auts = automorphisms(&pattern).unwrap().len() as u64;
            let homs = injective_hom_count(&host, &pattern);
            assert_eq!(
                copies.len() as u64 * auts,
                homs,
                "copies * |Aut| == injective homs for {pat_s} in {host_s}"
            );
            // Distinct copies have distinct edge images.
            let mut images: Vec<_> = copies.iter().map(|c| c.edges.clone()).collect();
            images.sort();
            images.dedup();
            assert_eq!(images.len(), copies.len());
        }
    }

    #[test]
    fn known_copy_counts() {
        assert_eq!(count_copies(&build("K6"), &build("K4")).unwrap(), 15);
        assert_eq!(count_copies(&build("K5"), &build("K3")).unwrap(), 10);
        assert_eq!(count_copies(&build("Kb(3,3)"), &build("Kb(2,2)")).unwrap(), 9);
        assert_eq!(count_copies(&build("Khat(3,4)"), &build("K4")).unwrap(), 4);
        assert_eq!(count_copies(&build("C4"), &build("P4")).unwrap(), 4);
        // Joins of two 4-vertex trees hold one copy per (left edge, right edge) pair.
        assert_eq!(count_copies(&build("Kjoin(P4,P4)"), &build("K4")).unwrap(), 9);
        assert_eq!(count_copies(&build("Kjoin(S3,S4)"), &build("K4")).unwrap(), 12);
    }

    #[test]
    fn petersen_five_cycles() {
        let p = petersen();
        let c5 = build("C5");
        let copies = enumerate_copies(&p, &c5).unwrap();
        let homs = injective_hom_count(&p, &c5);
        assert_eq!(homs % 10, 0);
        assert_eq!(copies.len() as u64, homs / 10, "Aut(C5) has order 10");
        assert_eq!(copies.len(), 12);
    }

    #[test]
    fn copies_are_sorted_and_deterministic() {
        let host = build("K5");
        let pattern = build("K3");
        let copies = enumerate_copies(&host, &pattern).unwrap();
        let again = enumerate_copies(&host, &pattern).unwrap();
        assert_eq!(copies, again);
        let mut sorted = copies.clone();
        sorted.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        assert_eq!(copies, sorted);
        // Each canonical map is ascending for complete patterns.
        for c in &copies {
            assert!(c.vertices.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphism_count(&build("P4")).unwrap(), 2);
        assert_eq!(automorphism_count(&build("C5")).unwrap(), 10);
        assert_eq!(automorphism_count(&build("K4")).unwrap(), 24);
        assert_eq!(automorphism_count(&build("S3")).unwrap(), 6);
        assert_eq!(automorphism_count(&build("Kb(2,3)")).unwrap(), 12);
        assert_eq!(automorphism_count(&petersen()).unwrap(), 120);
        // Closed-form shortcut for complete graphs beyond the enumeration limit.
        assert_eq!(automorphism_count(&build("K12")).unwrap(), 479001600);
    }

    #[test]
    fn oversized_patterns_are_rejected() {
        let host = build("K12");
        let pattern = build("K11");
        assert!(matches!(
            enumerate_copies(&host, &pattern),
            Err(GraphError::PatternTooLarge { .. })
        ));
        assert!(matches!(
            automorphisms(&build("Kb(6,6)")),
            Err(GraphError::AutomorphismTooLarge { .. })
        ));
    }

    // ---- neighborhoods and predicates ----

    #[test]
    fn common_neighborhood_examples() {
        let g = build("Khat(3,4)");
        assert_eq!(common_neighborhood(&g, &[0, 1, 2]).unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(common_neighborhood(&g, &[]).unwrap(), (0..7).collect::<Vec<_>>());
        assert_eq!(common_neighborhood(&g, &[3, 4]).unwrap(), vec![0, 1, 2]);
        assert!(common_neighborhood(&g, &[99]).is_err());
    }

    #[test]
    fn triangle_and_connectivity_predicates() {
        assert!(build("K3").has_triangle());
        assert!(!build("Kb(3,3)").has_triangle());
        assert!(build("Khat(3,4)").has_triangle());
        assert!(build("C5").is_connected());
        assert!(!disjoint_union(&[build("K2"), build("K2")]).is_connected());
    }

    #[test]
    fn disjoint_union_shifts_labels() {
        let g = disjoint_union(&[build("K3"), build("K3")]);
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 6);
        assert!(g.has_edge(3, 4) && !g.has_edge(2, 3));
    }
}
