//! Explicit colorings and deterministic extraction procedures: the published
//! cross-coloring tables for joins of small trees, the global bipartite
//! zero-witness coloring, rainbow-K5 extraction from the decorated bipartite
//! gadget, greedy interest/compatible vertex sets, triangle survival under
//! matching removal, the staged rainbow-K7 assembly, and a greedy rainbow
//! odd-cycle builder.
//!
//! All procedures are deterministic: ties break by canonical vertex/edge
//! order, and fresh colors come from monotone counters.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::coloring::{is_rainbow, ColoringError, ProperColoring};
use crate::graph::{GadgetSpec, Graph, GraphError, Side, SubgraphCopy};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("unsupported shape: {0}")]
    BadShape(String),
    #[error("invalid component structure: {0}")]
    Structure(String),
    #[error("gadget mismatch: {0}")]
    GadgetMismatch(String),
    #[error("gadget state: {0}")]
    GadgetState(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("inapplicable parameters (k={k}, t={t}, m={m}): no triangle survived")]
    NoSurvivingTriangle { k: usize, t: usize, m: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

// ---------------------------------------------------------------------------
// Shapes and cross-coloring tables
// ---------------------------------------------------------------------------

/// The four tree shapes allowed as intra-side components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    K2,
    P3,
    P4,
    K13,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::K2, Shape::P3, Shape::P4, Shape::K13];

    pub fn vertex_count(self) -> usize {
        match self {
            Shape::K2 => 2,
            Shape::P3 => 3,
            Shape::P4 | Shape::K13 => 4,
        }
    }

    /// The shape's graph in canonical labels: paths in path order, the star
    /// with its center at index 0.
    pub fn graph(self) -> Graph {
        let spec = match self {
            Shape::K2 => GadgetSpec::Path(2),
            Shape::P3 => GadgetSpec::Path(3),
            Shape::P4 => GadgetSpec::Path(4),
            Shape::K13 => GadgetSpec::Star(3),
        };
        spec.build().expect("valid fixed shape")
    }

    /// Internal edges with their reserved colors: single edges use color 1,
    /// paths use 1,2,3 along the path (color 2 on the middle edge of the
    /// 3-edge path), the star uses 1,2,3 off its center.
    fn internal_edges(self) -> Vec<((usize, usize), u32)> {
        match self {
            Shape::K2 => vec![((0, 1), 1)],
            Shape::P3 => vec![((0, 1), 1), ((1, 2), 2)],
            Shape::P4 => vec![((0, 1), 1), ((1, 2), 2), ((2, 3), 3)],
            Shape::K13 => vec![((0, 1), 1), ((0, 2), 2), ((0, 3), 3)],
        }
    }

    /// The base shape whose published cross table covers this shape: the
    /// two shorter paths embed into the 3-edge path on its first vertices.
    fn base(self) -> BaseShape {
        match self {
            Shape::K13 => BaseShape::Star,
            Shape::K2 | Shape::P3 | Shape::P4 => BaseShape::Path,
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Shape::K2 => "K2",
            Shape::P3 => "P3",
            Shape::P4 => "P4",
            Shape::K13 => "K13",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Shape {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "K2" => Ok(Shape::K2),
            "P3" => Ok(Shape::P3),
            "P4" => Ok(Shape::P4),
            "K13" | "K1,3" | "S3" => Ok(Shape::K13),
            other => Err(ConstructionError::BadShape(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BaseShape {
    Star,
    Path,
}

/// Cross-edge color class: a shared table color (4..=7) or a fresh color
/// unique to that edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CrossClass {
    Named(u8),
    Fresh,
}

use CrossClass::{Fresh, Named};

/// Star-vs-star cross table. Row/column index 0 is the star center, 1..=3
/// are the leaves whose center edge carries the matching color.
const TABLE_STAR_STAR: [[CrossClass; 4]; 4] = [
    [Named(4), Named(7), Named(5), Named(6)],
    [Named(6), Fresh, Named(4), Fresh],
    [Named(7), Fresh, Fresh, Named(4)],
    [Named(5), Named(4), Fresh, Fresh],
];

/// Star-vs-path cross table. Rows: star center then leaves; columns: path
/// vertices in path order.
const TABLE_STAR_PATH: [[CrossClass; 4]; 4] = [
    [Named(4), Named(6), Named(7), Named(5)],
    [Fresh, Fresh, Named(6), Named(7)],
    [Fresh, Named(4), Named(5), Fresh],
    [Named(6), Named(7), Fresh, Fresh],
];

/// Path-vs-path cross table; both sides indexed in path order.
const TABLE_PATH_PATH: [[CrossClass; 4]; 4] = [
    [Fresh, Named(5), Named(4), Fresh],
    [Named(6), Fresh, Named(5), Named(4)],
    [Named(4), Named(6), Fresh, Named(5)],
    [Fresh, Named(4), Named(6), Fresh],
];

/// Cross class of the edge between local vertex `a` of the left shape and
/// local vertex `b` of the right shape. Shorter paths read the path table on
/// their first rows/columns; the mixed star/path table is transposed when the
/// star sits on the right.
fn cross_class(left: Shape, right: Shape, a: usize, b: usize) -> CrossClass {
    debug_assert!(a < left.vertex_count() && b < right.vertex_count());
    match (left.base(), right.base()) {
        (BaseShape::Star, BaseShape::Star) => TABLE_STAR_STAR[a][b],
        (BaseShape::Star, BaseShape::Path) => TABLE_STAR_PATH[a][b],
        (BaseShape::Path, BaseShape::Star) => TABLE_STAR_PATH[b][a],
        (BaseShape::Path, BaseShape::Path) => TABLE_PATH_PATH[a][b],
    }
}

/// Builds the join `K_{L,R}` of the two shapes and the published proper
/// coloring of it that admits no rainbow `K4`: internal edges use the
/// reserved colors 1..3, cross edges follow the shape-pair table with shared
/// colors 4..7, and the remaining cross edges receive fresh unique colors
/// (counting up from 8) in canonical edge order.
pub fn cross_table_coloring(left: Shape, right: Shape) -> Result<ProperColoring, ConstructionError> {
    let join = GadgetSpec::Join(
        Box::new(shape_spec(left)),
        Box::new(shape_spec(right)),
    )
    .build()?;
    let shift = left.vertex_count();

    let mut assignment: Vec<(usize, usize, u32)> = Vec::with_capacity(join.edge_count());
    for ((u, v), c) in left.internal_edges() {
        assignment.push((u, v, c));
    }
    for ((u, v), c) in right.internal_edges() {
        assignment.push((u + shift, v + shift, c));
    }
    let mut fresh = 8u32;
    for a in 0..left.vertex_count() {
        for b in 0..right.vertex_count() {
            let color = match cross_class(left, right, a, b) {
                Named(c) => u32::from(c),
                Fresh => {
                    fresh += 1;
                    fresh - 1
                }
            };
            assignment.push((a, b + shift, color));
        }
    }
    Ok(ProperColoring::check_proper(&join, &assignment)?)
}

fn shape_spec(shape: Shape) -> GadgetSpec {
    match shape {
        Shape::K2 => GadgetSpec::Path(2),
        Shape::P3 => GadgetSpec::Path(3),
        Shape::P4 => GadgetSpec::Path(4),
        Shape::K13 => GadgetSpec::Star(3),
    }
}

// ---------------------------------------------------------------------------
// Zero-statement coloring
// ---------------------------------------------------------------------------

/// One intra-side tree component: a shape together with its vertices, listed
/// in the shape's canonical order (path order, or star center first).
#[derive(Debug, Clone)]
pub struct Component {
    pub shape: Shape,
    pub vertices: Vec<usize>,
}

impl Component {
    fn edges(&self) -> Vec<((usize, usize), u32)> {
        self.shape
            .internal_edges()
            .into_iter()
            .map(|((a, b), c)| {
                let (u, v) = (self.vertices[a], self.vertices[b]);
                (if u < v { (u, v) } else { (v, u) }, c)
            })
            .collect()
    }
}

/// Vertex-disjoint tree components inside the two sides of a bipartite seed.
#[derive(Debug, Clone, Default)]
pub struct ComponentStructure {
    pub left: Vec<Component>,
    pub right: Vec<Component>,
}

impl ComponentStructure {
    fn validate(&self, seed: &Graph) -> Result<(), ConstructionError> {
        let mut used: HashSet<usize> = HashSet::new();
        for (components, side) in [(&self.left, Side::Left), (&self.right, Side::Right)] {
            for component in components {
                if component.vertices.len() != component.shape.vertex_count() {
                    return Err(ConstructionError::Structure(format!(
                        "component {} needs {} vertices, got {}",
                        component.shape,
                        component.shape.vertex_count(),
                        component.vertices.len()
                    )));
                }
                for &v in &component.vertices {
                    if v >= seed.vertex_count() {
                        return Err(ConstructionError::Structure(format!(
                            "vertex {v} outside the seed"
                        )));
                    }
                    if seed.side(v) != Some(side) {
                        return Err(ConstructionError::Structure(format!(
                            "vertex {v} is not on the required side"
                        )));
                    }
                    if !used.insert(v) {
                        return Err(ConstructionError::Structure(format!(
                            "vertex {v} appears in two components"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds the union of a balanced complete bipartite seed with the given
/// intra-side tree components, and colors it so that no copy of `K4` is
/// rainbow: each component uses the reserved colors 1..3 internally, each
/// component pair is joined through its own disjoint color block via the
/// published cross tables, and every remaining edge gets a fresh unique
/// color. The returned coloring's host is the union graph.
pub fn zero_statement_coloring(
    seed: &Graph,
    random_part: &ComponentStructure,
) -> Result<ProperColoring, ConstructionError> {
    let n = seed.vertex_count();
    let a = n / 2;
    let b = n - a;
    let expected = GadgetSpec::CompleteBipartite(a, b).build()?;
    if seed.edges() != expected.edges() || seed.sides() != expected.sides() {
        return Err(ConstructionError::GadgetMismatch(format!(
            "seed is not the canonical balanced complete bipartite graph on {n} vertices"
        )));
    }
    random_part.validate(seed)?;

    let mut extra: Vec<(usize, usize)> = Vec::new();
    let mut internal: Vec<(usize, usize, u32)> = Vec::new();
    for component in random_part.left.iter().chain(random_part.right.iter()) {
        for ((u, v), c) in component.edges() {
            extra.push((u, v));
            internal.push((u, v, c));
        }
    }
    let union = seed.union_with_edges(&extra)?;

    // The added components are vertex-disjoint trees, so each side stays a
    // forest; verify anyway.
    for side in [Side::Left, Side::Right] {
        let vertices = union.side_vertices(side);
        let inside: HashSet<usize> = vertices.iter().copied().collect();
        let side_edges: Vec<(usize, usize)> = union
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| inside.contains(&u) && inside.contains(&v))
            .collect();
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        for &v in &vertices {
            let next = relabel.len();
            relabel.insert(v, next);
        }
        let side_graph = Graph::new(
            vertices.len(),
            side_edges
                .iter()
                .map(|&(u, v)| (relabel[&u], relabel[&v]))
                .collect(),
        )?;
        if side_graph.has_triangle() {
            return Err(ConstructionError::Structure(
                "a side of the union contains a triangle".into(),
            ));
        }
    }

    let mut assignment = internal;
    let mut colored: HashSet<(usize, usize)> = assignment.iter().map(|&(u, v, _)| (u, v)).collect();

    // Disjoint color blocks per component pair, allocated in (i, j)
    // lexicographic order; within a block, shared table classes claim slots
    // in first-use order and fresh cross edges take the following slots.
    let mut counter = 4u32;
    for li in &random_part.left {
        for rj in &random_part.right {
            let block_base = counter;
            let block_size = (li.vertices.len() * rj.vertices.len()) as u32;
            counter += block_size;
            let mut slot: HashMap<u8, u32> = HashMap::new();
            let mut next_slot = 0u32;
            for (a_idx, &u) in li.vertices.iter().enumerate() {
                for (b_idx, &w) in rj.vertices.iter().enumerate() {
                    let color = match cross_class(li.shape, rj.shape, a_idx, b_idx) {
                        Named(c) => *slot.entry(c).or_insert_with(|| {
                            next_slot += 1;
                            block_base + next_slot - 1
                        }),
                        Fresh => {
                            next_slot += 1;
                            block_base + next_slot - 1
                        }
                    };
                    if next_slot > block_size {
                        return Err(ConstructionError::Internal(
                            "color block overflow".into(),
                        ));
                    }
                    let (u, w) = if u < w { (u, w) } else { (w, u) };
                    assignment.push((u, w, color));
                    colored.insert((u, w));
                }
            }
        }
    }

    // Every remaining edge gets a fresh unique color, in canonical order.
    for &(u, v) in union.edges() {
        if !colored.contains(&(u, v)) {
            assignment.push((u, v, counter));
            counter += 1;
        }
    }

    Ok(ProperColoring::check_proper(&union, &assignment)?)
}

// ---------------------------------------------------------------------------
// Rainbow K5 extraction
// ---------------------------------------------------------------------------

/// Result of [`extract_rainbow_k5`]: the chosen pendant index `t` in 2..=5
/// (counting the size-5 class as y1..y5 with y1 the attached star's center)
/// and the rainbow `K5` on the triangle, the star center, and `y_t`.
#[derive(Debug, Clone)]
pub struct K5Extraction {
    pub t: usize,
    pub copy: SubgraphCopy,
}

/// Extracts a rainbow `K5` from the decorated gadget (the 3-by-5 complete
/// bipartite graph with a triangle on its small side and a 4-edge star on its
/// large side). Requires the triangle-plus-cross subgraph to be rainbow; then
/// some star edge avoids all three triangle colors and the five vertices
/// {triangle, star center, other star endpoint} span a rainbow `K5`, which is
/// re-verified before returning.
pub fn extract_rainbow_k5(
    gadget: &Graph,
    coloring: &ProperColoring,
) -> Result<K5Extraction, ConstructionError> {
    let expected = GadgetSpec::TildeK35.build()?;
    if gadget.edges() != expected.edges() || coloring.host().edges() != expected.edges() {
        return Err(ConstructionError::GadgetMismatch(
            "expected the canonical decorated 3-by-5 bipartite gadget".into(),
        ));
    }

    // The bipartite-plus-triangle part: triangle 0,1,2 and all cross edges.
    let mut hat_edges = vec![(0, 1), (0, 2), (1, 2)];
    for x in 0..3 {
        for y in 3..8 {
            hat_edges.push((x, y));
        }
    }
    let mut seen = HashSet::new();
    for &(u, v) in &hat_edges {
        if !seen.insert(coloring.color(u, v).expect("gadget edge")) {
            return Err(ConstructionError::GadgetState(
                "the bipartite part with its triangle is not rainbow".into(),
            ));
        }
    }

    let triangle_colors: HashSet<u32> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(u, v)| coloring.color(u, v).expect("triangle edge"))
        .collect();
    // Star center is vertex 3; its pendant edges go to 4..8. Pendant index
    // t in 2..=5 corresponds to vertex t + 2.
    let t = (2..=5)
        .find(|t| {
            let c = coloring.color(3, t + 2).expect("star edge");
            !triangle_colors.contains(&c)
        })
        .ok_or_else(|| {
            ConstructionError::Internal(
                "a proper coloring cannot place all four star colors in a 3-set".into(),
            )
        })?;

    let vertices = vec![0, 1, 2, 3, t + 2];
    let mut edges = Vec::new();
    for i in 0..5 {
        for j in (i + 1)..5 {
            edges.push((vertices[i].min(vertices[j]), vertices[i].max(vertices[j])));
        }
    }
    edges.sort_unstable();
    let copy = SubgraphCopy { vertices, edges };
    if !is_rainbow(coloring, &copy)? {
        return Err(ConstructionError::Internal(
            "extracted K5 failed rainbow re-verification".into(),
        ));
    }
    Ok(K5Extraction { t, copy })
}

// ---------------------------------------------------------------------------
// Greedy interest set (K5 side)
// ---------------------------------------------------------------------------

/// Result of [`greedy_interest_set`]: the admitted vertices, plus the sizes
/// of the independent-side class and of the clash-filtered subset, for the
/// size guarantee `7 * selected >= filtered >= n - 3`.
#[derive(Debug, Clone)]
pub struct InterestSet {
    pub selected: Vec<usize>,
    pub n_size: usize,
    pub filtered_size: usize,
}

/// Greedy selection inside the gadget joining a triangle to an independent
/// side: first drop vertices whose three connecting colors clash with the
/// triangle's colors (at most 3 are dropped), then admit vertices in
/// ascending order whenever their three connecting colors avoid those of all
/// previously admitted vertices. Every admitted subset keeps the triangle
/// plus its connections rainbow, so every 5 admitted vertices span a rainbow
/// copy of the triangle-decorated 3-by-5 gadget.
pub fn greedy_interest_set(
    gadget: &Graph,
    coloring: &ProperColoring,
) -> Result<InterestSet, ConstructionError> {
    if gadget.vertex_count() < 4 {
        return Err(ConstructionError::GadgetMismatch(
            "gadget too small for a triangle with an independent side".into(),
        ));
    }
    let n = gadget.vertex_count() - 3;
    let expected = GadgetSpec::HatK(3, n).build()?;
    if gadget.edges() != expected.edges() || coloring.host().edges() != expected.edges() {
        return Err(ConstructionError::GadgetMismatch(
            "expected the canonical triangle-plus-independent-side gadget".into(),
        ));
    }

    let triangle_colors: HashSet<u32> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(u, v)| coloring.color(u, v).expect("triangle edge"))
        .collect();
    if triangle_colors.len() != 3 {
        return Err(ConstructionError::GadgetState(
            "the triangle is not rainbow".into(),
        ));
    }

    let star_colors = |u: usize| -> [u32; 3] {
        [
            coloring.color(0, u).expect("cross edge"),
            coloring.color(1, u).expect("cross edge"),
            coloring.color(2, u).expect("cross edge"),
        ]
    };

    let filtered: Vec<usize> = (3..3 + n)
        .filter(|&u| star_colors(u).iter().all(|c| !triangle_colors.contains(c)))
        .collect();

    let mut selected = Vec::new();
    let mut used: HashSet<u32> = HashSet::new();
    for &u in &filtered {
        let colors = star_colors(u);
        if colors.iter().all(|c| !used.contains(c)) {
            selected.push(u);
            used.extend(colors);
        }
    }

    let result = InterestSet { selected, n_size: n, filtered_size: filtered.len() };
    // Clash-filtering drops at most 3 vertices; each admitted vertex blocks
    // at most 6 later ones, so 7 * |selected| >= |filtered|.
    if result.filtered_size + 3 < n || 7 * result.selected.len() < result.filtered_size {
        return Err(ConstructionError::Internal(
            "greedy size guarantee violated".into(),
        ));
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// Compatible set (K7 side)
// ---------------------------------------------------------------------------

/// Number of left-side vertices in the four-block gadget.
pub const QUAD_BLOCK_VERTICES: usize = 16;

/// Bound on how many vertices the interest filter can drop: each of the 16
/// block vertices has at most 24 connecting edges colored like a block edge.
pub const INTEREST_REJECTION_BOUND: usize = 16 * 24;

/// Greedy exclusion factor: one admitted vertex's 16 connecting colors can
/// block at most 16 * 16 later vertices, so (n - 384) / 257 <= |selected|.
pub const GREEDY_EXCLUSION_FACTOR: usize = 16 * 16 + 1;

/// Vertices of block `b` (0..4) on the left side.
pub fn block_vertices(b: usize) -> [usize; 4] {
    [4 * b, 4 * b + 1, 4 * b + 2, 4 * b + 3]
}

/// The gadget joining four disjoint `K4` blocks (vertices 0..16) completely
/// to an independent side of `n` vertices (16..16+n). Sides are labeled.
pub fn quad_block_gadget(n: usize) -> Result<Graph, ConstructionError> {
    let mut edges = Vec::new();
    for b in 0..4 {
        let vs = block_vertices(b);
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((vs[i], vs[j]));
            }
        }
    }
    for x in 0..QUAD_BLOCK_VERTICES {
        for u in 0..n {
            edges.push((x, QUAD_BLOCK_VERTICES + u));
        }
    }
    let mut sides = vec![Side::Left; QUAD_BLOCK_VERTICES];
    sides.extend(std::iter::repeat(Side::Right).take(n));
    Ok(Graph::with_sides(QUAD_BLOCK_VERTICES + n, edges, sides)?)
}

fn validate_quad_layout(coloring: &ProperColoring) -> Result<usize, ConstructionError> {
    let host = coloring.host();
    if host.vertex_count() < QUAD_BLOCK_VERTICES {
        return Err(ConstructionError::GadgetMismatch(
            "host too small for the four-block gadget".into(),
        ));
    }
    let n = host.vertex_count() - QUAD_BLOCK_VERTICES;
    let expected = quad_block_gadget(n)?;
    if host.edges() != expected.edges() {
        return Err(ConstructionError::GadgetMismatch(
            "expected the canonical four-block gadget".into(),
        ));
    }
    Ok(n)
}

/// Colors on the 24 block edges.
fn block_edge_colors(coloring: &ProperColoring) -> Result<HashSet<u32>, ConstructionError> {
    let mut colors = HashSet::new();
    for b in 0..4 {
        let vs = block_vertices(b);
        let mut block = HashSet::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let c = coloring.color(vs[i], vs[j]).expect("block edge");
                block.insert(c);
                colors.insert(c);
            }
        }
        if block.len() != 6 {
            return Err(ConstructionError::GadgetState(format!(
                "block {b} is not rainbow"
            )));
        }
    }
    Ok(colors)
}

fn connecting_colors(coloring: &ProperColoring, u: usize) -> Vec<u32> {
    (0..QUAD_BLOCK_VERTICES)
        .map(|x| coloring.color(x, u).expect("connecting edge"))
        .collect()
}

/// True iff every edge connecting `u` to the 16 block vertices avoids all
/// block-edge colors. Assumes the canonical four-block layout.
pub fn of_interest(coloring: &ProperColoring, u: usize) -> Result<bool, ConstructionError> {
    let blocked = block_edge_colors(coloring)?;
    Ok(connecting_colors(coloring, u).iter().all(|c| !blocked.contains(c)))
}

/// True iff `u` and `v` see pairwise distinct colors on their edges into the
/// block side: the two 16-color palettes are disjoint. This implies the
/// per-endpoint condition (their colors differ at every shared block vertex)
/// and is what the downstream rainbow-K7 assembly relies on.
pub fn compatible_pair(
    coloring: &ProperColoring,
    u: usize,
    v: usize,
) -> Result<bool, ConstructionError> {
    let a: HashSet<u32> = connecting_colors(coloring, u).into_iter().collect();
    let b: HashSet<u32> = connecting_colors(coloring, v).into_iter().collect();
    Ok(a.is_disjoint(&b))
}

/// Result of [`greedy_compatible_set`], with the exact rejection accounting.
#[derive(Debug, Clone)]
pub struct CompatibleSet {
    pub selected: Vec<usize>,
    pub interest_rejected: Vec<usize>,
    pub greedy_rejected: Vec<usize>,
}

/// Greedy selection on the independent side of the four-block gadget: keep
/// vertices of interest (connecting colors avoid block-edge colors), then
/// admit vertices in ascending order whenever their 16 connecting colors
/// avoid those of every previously admitted vertex. Admitted vertices are
/// pairwise compatible in the strong palette-disjoint sense.
pub fn greedy_compatible_set(
    gadget: &Graph,
    coloring: &ProperColoring,
) -> Result<CompatibleSet, ConstructionError> {
    if gadget.edges() != coloring.host().edges() {
        return Err(ConstructionError::GadgetMismatch(
            "coloring host differs from the gadget".into(),
        ));
    }
    let n = validate_quad_layout(coloring)?;
    let blocked = block_edge_colors(coloring)?;

    let mut selected = Vec::new();
    let mut interest_rejected = Vec::new();
    let mut greedy_rejected = Vec::new();
    let mut used: HashSet<u32> = HashSet::new();
    for u in QUAD_BLOCK_VERTICES..QUAD_BLOCK_VERTICES + n {
        let colors = connecting_colors(coloring, u);
        if colors.iter().any(|c| blocked.contains(c)) {
            interest_rejected.push(u);
        } else if colors.iter().any(|c| used.contains(c)) {
            greedy_rejected.push(u);
        } else {
            used.extend(colors);
            selected.push(u);
        }
    }

    let set = CompatibleSet { selected, interest_rejected, greedy_rejected };
    if set.interest_rejected.len() > INTEREST_REJECTION_BOUND
        || set.selected.len() * GREEDY_EXCLUSION_FACTOR + INTEREST_REJECTION_BOUND < n
    {
        return Err(ConstructionError::Internal(
            "compatible-set size guarantee violated".into(),
        ));
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// Matching removal
// ---------------------------------------------------------------------------

/// Finds a triangle of the triangle-star gadget that survives the removal of
/// the given matchings. Scans skeleton edges in canonical order: each
/// matching deletes at most one skeleton edge and hits at most two of a
/// surviving skeleton edge's attached triangles, so with `k >= m+1` and
/// `t >= 2m+1` a triangle always survives. Outside those bounds the scan is
/// still attempted and failure is reported as an error.
pub fn matching_removal_triangle(
    gadget: &Graph,
    matchings: &[Vec<(usize, usize)>],
) -> Result<SubgraphCopy, ConstructionError> {
    // Infer (k, t) from the vertex/edge counts, then insist on the canonical
    // construction.
    let v = gadget.vertex_count();
    let e = gadget.edge_count();
    if 2 * v < e + 3 {
        return Err(ConstructionError::GadgetMismatch(
            "not a triangle-star gadget".into(),
        ));
    }
    let k = 2 * v - e - 2;
    if k == 0 || (e + 1).saturating_sub(v) % k != 0 {
        return Err(ConstructionError::GadgetMismatch(
            "not a triangle-star gadget".into(),
        ));
    }
    let t = (e + 1 - v) / k;
    let expected = GadgetSpec::TriangleStar(k, t).build()?;
    if gadget.edges() != expected.edges() {
        return Err(ConstructionError::GadgetMismatch(format!(
            "expected the canonical triangle-star gadget with {k} skeleton edges and {t} triangles each"
        )));
    }

    let mut removed: HashSet<(usize, usize)> = HashSet::new();
    for (idx, matching) in matchings.iter().enumerate() {
        let mut touched: HashSet<usize> = HashSet::new();
        for &(u, v) in matching {
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            if !gadget.has_edge(u, v) {
                return Err(ConstructionError::Parameter(format!(
                    "matching {idx} lists ({u}, {v}), which is not a gadget edge"
                )));
            }
            if !touched.insert(u) || !touched.insert(v) {
                return Err(ConstructionError::Parameter(format!(
                    "edge set {idx} is not a matching"
                )));
            }
            removed.insert((u, v));
        }
    }

    let alive = |u: usize, v: usize| -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        !removed.contains(&key)
    };

    for leaf in 1..=k {
        if !alive(0, leaf) {
            continue;
        }
        for j in 1..=t {
            let apex = k + (leaf - 1) * t + j;
            if alive(0, apex) && alive(leaf, apex) {
                let mut edges = vec![(0, leaf), (0, apex), (leaf, apex)];
                edges.sort_unstable();
                return Ok(SubgraphCopy { vertices: vec![0, leaf, apex], edges });
            }
        }
    }

    let m = matchings.len();
    if k >= m + 1 && t >= 2 * m + 1 {
        return Err(ConstructionError::Internal(format!(
            "no surviving triangle despite k={k} >= {} and t={t} >= {}",
            m + 1,
            2 * m + 1
        )));
    }
    Err(ConstructionError::NoSurvivingTriangle { k, t, m })
}

// ---------------------------------------------------------------------------
// Rainbow K7 assembly
// ---------------------------------------------------------------------------

/// Skeleton size of the triangle-star copy used in the K7 instance.
pub const K7_STAR_LEAVES: usize = 25;
/// Triangles per skeleton edge in the K7 instance.
pub const K7_STAR_TRIANGLES: usize = 49;

/// The canonical K7 assembly instance: four `K4` blocks (vertices 0..16)
/// joined completely to a triangle-star copy with 25 skeleton edges and 49
/// triangles each (vertices 16..1267, center at 16).
pub fn k7_instance_graph() -> Result<Graph, ConstructionError> {
    let star = GadgetSpec::TriangleStar(K7_STAR_LEAVES, K7_STAR_TRIANGLES).build()?;
    let right = star.vertex_count();
    let mut edges = Vec::new();
    for b in 0..4 {
        let vs = block_vertices(b);
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((vs[i], vs[j]));
            }
        }
    }
    for &(u, v) in star.edges() {
        edges.push((u + QUAD_BLOCK_VERTICES, v + QUAD_BLOCK_VERTICES));
    }
    for x in 0..QUAD_BLOCK_VERTICES {
        for u in 0..right {
            edges.push((x, QUAD_BLOCK_VERTICES + u));
        }
    }
    let mut sides = vec![Side::Left; QUAD_BLOCK_VERTICES];
    sides.extend(std::iter::repeat(Side::Right).take(right));
    Ok(Graph::with_sides(QUAD_BLOCK_VERTICES + right, edges, sides)?)
}

/// Result of [`assemble_rainbow_k7`]: the selected block index (0..4), the
/// surviving triangle, and the rainbow `K7`.
#[derive(Debug, Clone)]
pub struct K7Assembly {
    pub block_index: usize,
    pub triangle: SubgraphCopy,
    pub k7: SubgraphCopy,
}

/// Assembles a rainbow `K7` from a proper coloring of the canonical K7
/// instance. Stages, each validated: the four blocks must be rainbow; every
/// triangle-star vertex must be of interest and the star vertices pairwise
/// compatible (palette-disjoint); star edges colored like a block edge are
/// removed (at most 24 matchings, one per color), leaving a surviving
/// triangle; finally some block shares no color with the triangle (each
/// triangle color can reach the block side only through the triangle's third
/// vertex, so at most 3 of the 4 blocks are excluded). The result is
/// re-verified rainbow.
pub fn assemble_rainbow_k7(
    instance: &Graph,
    coloring: &ProperColoring,
) -> Result<K7Assembly, ConstructionError> {
    let expected = k7_instance_graph()?;
    if instance.edges() != expected.edges() || coloring.host().edges() != expected.edges() {
        return Err(ConstructionError::GadgetMismatch(
            "stage layout: expected the canonical K7 assembly instance".into(),
        ));
    }
    let star = GadgetSpec::TriangleStar(K7_STAR_LEAVES, K7_STAR_TRIANGLES).build()?;
    let right = star.vertex_count();

    let blocked = block_edge_colors(coloring).map_err(|e| match e {
        ConstructionError::GadgetState(msg) => {
            ConstructionError::GadgetState(format!("stage block-rainbow: {msg}"))
        }
        other => other,
    })?;

    // Interest: all connecting colors of every star vertex avoid block-edge
    // colors.
    let palettes: Vec<Vec<u32>> = (0..right)
        .map(|u| connecting_colors(coloring, QUAD_BLOCK_VERTICES + u))
        .collect();
    for (u, palette) in palettes.iter().enumerate() {
        if palette.iter().any(|c| blocked.contains(c)) {
            return Err(ConstructionError::GadgetState(format!(
                "stage interest: star vertex {} clashes with a block color",
                QUAD_BLOCK_VERTICES + u
            )));
        }
    }

    // Compatibility: no connecting color may appear at two star vertices.
    let mut owner: HashMap<u32, usize> = HashMap::new();
    for (u, palette) in palettes.iter().enumerate() {
        for &c in palette {
            if let Some(&prev) = owner.get(&c) {
                if prev != u {
                    return Err(ConstructionError::GadgetState(format!(
                        "stage compatibility: star vertices {} and {} share a connecting color",
                        QUAD_BLOCK_VERTICES + prev,
                        QUAD_BLOCK_VERTICES + u
                    )));
                }
            } else {
                owner.insert(c, u);
            }
        }
    }

    // Remove star edges whose color appears on a block edge; properness
    // makes each color class a matching, so this removes <= 24 matchings.
    let mut by_color: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
    for &(u, v) in star.edges() {
        let c = coloring
            .color(u + QUAD_BLOCK_VERTICES, v + QUAD_BLOCK_VERTICES)
            .expect("star edge");
        if blocked.contains(&c) {
            by_color.entry(c).or_default().push((u, v));
        }
    }
    let mut colors: Vec<u32> = by_color.keys().copied().collect();
    colors.sort_unstable();
    let matchings: Vec<Vec<(usize, usize)>> = colors.iter().map(|c| by_color[c].clone()).collect();

    let triangle_local = matching_removal_triangle(&star, &matchings)?;
    let triangle = SubgraphCopy {
        vertices: triangle_local
            .vertices
            .iter()
            .map(|v| v + QUAD_BLOCK_VERTICES)
            .collect(),
        edges: triangle_local
            .edges
            .iter()
            .map(|&(u, v)| (u + QUAD_BLOCK_VERTICES, v + QUAD_BLOCK_VERTICES))
            .collect(),
    };
    let triangle_colors: HashSet<u32> = triangle
        .edges
        .iter()
        .map(|&(u, v)| coloring.color(u, v).expect("triangle edge"))
        .collect();

    // Pick a block none of whose connecting edges to the triangle reuses a
    // triangle color.
    let block_index = (0..4)
        .find(|&b| {
            block_vertices(b).iter().all(|&x| {
                triangle.vertices.iter().all(|&tv| {
                    let c = coloring.color(x, tv).expect("connecting edge");
                    !triangle_colors.contains(&c)
                })
            })
        })
        .ok_or_else(|| {
            ConstructionError::Internal(
                "stage block-selection: every triangle color blocks at most one block, \
                 so a clash-free block must exist"
                    .into(),
            )
        })?;

    let mut vertices = block_vertices(block_index).to_vec();
    vertices.extend(triangle.vertices.iter().copied());
    let mut edges = Vec::new();
    for i in 0..7 {
        for j in (i + 1)..7 {
            let (u, v) = (vertices[i].min(vertices[j]), vertices[i].max(vertices[j]));
            edges.push((u, v));
        }
    }
    edges.sort_unstable();
    let k7 = SubgraphCopy { vertices, edges };
    if !is_rainbow(coloring, &k7)? {
        return Err(ConstructionError::Internal(
            "stage final-verification: assembled K7 is not rainbow".into(),
        ));
    }
    Ok(K7Assembly { block_index, triangle, k7 })
}

// ---------------------------------------------------------------------------
// Greedy rainbow odd cycle
// ---------------------------------------------------------------------------

/// Greedily builds a rainbow odd cycle of length `2*ell + 1` through an
/// intra-side edge of a side-labeled perturbed graph. For `ell = 1` any
/// common neighbor closes a (necessarily rainbow) triangle. For larger `ell`
/// the path alternates sides away from the edge's side, taking the first
/// vertex whose new edge colors avoid everything used so far; the closing
/// vertex must clear both its edges at once. Greedy failure returns `None`;
/// any returned cycle has been re-verified rainbow.
pub fn greedy_rainbow_odd_cycle(
    perturbed: &Graph,
    cross_edge: (usize, usize),
    coloring: &ProperColoring,
    ell: usize,
) -> Result<Option<SubgraphCopy>, ConstructionError> {
    if coloring.host().edges() != perturbed.edges() {
        return Err(ConstructionError::GadgetMismatch(
            "coloring host differs from the graph".into(),
        ));
    }
    if ell == 0 {
        return Err(ConstructionError::Parameter("cycle parameter must be >= 1".into()));
    }
    let (x, y) = cross_edge;
    if !perturbed.has_edge(x, y) {
        return Err(ConstructionError::Parameter(format!(
            "({x}, {y}) is not an edge"
        )));
    }
    let (sx, sy) = (perturbed.side(x), perturbed.side(y));
    let home = match (sx, sy) {
        (Some(a), Some(b)) if a == b => a,
        (None, _) | (_, None) => {
            return Err(ConstructionError::Parameter(
                "graph carries no bipartition sides".into(),
            ))
        }
        _ => {
            return Err(ConstructionError::Parameter(
                "the edge must lie inside one side".into(),
            ))
        }
    };

    if ell == 1 {
        for w in 0..perturbed.vertex_count() {
            if w != x && w != y && perturbed.has_edge(x, w) && perturbed.has_edge(y, w) {
                let mut edges = vec![
                    (x.min(y), x.max(y)),
                    (x.min(w), x.max(w)),
                    (y.min(w), y.max(w)),
                ];
                edges.sort_unstable();
                let copy = SubgraphCopy { vertices: vec![x, y, w], edges };
                if is_rainbow(coloring, &copy)? {
                    return Ok(Some(copy));
                }
            }
        }
        return Ok(None);
    }

    let away = match home {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    };
    let steps = 2 * ell - 1;
    let mut path = vec![x, y];
    let mut used: HashSet<u32> = HashSet::new();
    used.insert(coloring.color(x, y).expect("cross edge"));

    for s in 0..steps {
        let want = if s % 2 == 0 { away } else { home };
        let closing = s == steps - 1;
        let current = *path.last().expect("nonempty path");
        let mut found = None;
        for v in 0..perturbed.vertex_count() {
            if path.contains(&v) || perturbed.side(v) != Some(want) {
                continue;
            }
            if !perturbed.has_edge(current, v) {
                continue;
            }
            let c = coloring.color(current.min(v), current.max(v)).expect("edge");
            if used.contains(&c) {
                continue;
            }
            if closing {
                if !perturbed.has_edge(v, x) {
                    continue;
                }
                let close = coloring.color(v.min(x), v.max(x)).expect("edge");
                if used.contains(&close) || close == c {
                    continue;
                }
            }
            found = Some((v, c));
            break;
        }
        match found {
            Some((v, c)) => {
                used.insert(c);
                if closing {
                    used.insert(coloring.color(v.min(x), v.max(x)).expect("edge"));
                }
                path.push(v);
            }
            None => return Ok(None),
        }
    }

    let mut edges = Vec::new();
    for i in 0..path.len() {
        let (u, v) = (path[i], path[(i + 1) % path.len()]);
        edges.push((u.min(v), u.max(v)));
    }
    edges.sort_unstable();
    let copy = SubgraphCopy { vertices: path, edges };
    if !is_rainbow(coloring, &copy)? {
        return Err(ConstructionError::Internal(
            "greedy cycle failed rainbow re-verification".into(),
        ));
    }
    Ok(Some(copy))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
