//! Shared fixtures for the integration suites: exhaustive small-graph
//! enumeration with isomorphism dedup, maximal-matching enumeration, and
//! randomized coloring generators for the gadget pipelines.

#![allow(dead_code)]

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use rainbow_core::coloring::ProperColoring;
use rainbow_core::constructions::{Component, ComponentStructure, Shape};
use rainbow_core::graph::{GadgetSpec, Graph, Side};

// ---------------------------------------------------------------------------
// Exhaustive connected-graph enumeration (up to isomorphism)
// ---------------------------------------------------------------------------

/// Bit index of edge (a, b), a < b, inside a canonical u64 mask; supports up
/// to 11 vertices (55 pairs).
fn edge_bit(a: usize, b: usize) -> u64 {
    debug_assert!(a < b && b < 11);
    let pair = b * (b - 1) / 2 + a;
    1u64 << pair
}

fn mask_of(edges: &[(usize, usize)]) -> u64 {
    edges.iter().map(|&(a, b)| edge_bit(a, b)).sum()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Minimum edge mask over all vertex relabelings: a graph invariant.
fn canonical_mask(edges: &[(usize, usize)], perms: &[Vec<usize>]) -> u64 {
    let mut best = u64::MAX;
    for perm in perms {
        let mut mask = 0u64;
        for &(u, v) in edges {
            let (a, b) = (perm[u], perm[v]);
            mask |= edge_bit(a.min(b), a.max(b));
        }
        best = best.min(mask);
    }
    best
}

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    for b in 1..n {
        for a in 0..b {
            if mask & edge_bit(a, b) != 0 {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, edges).expect("mask edges are valid")
}

/// All connected graphs with 1..=max_edges edges, one representative per
/// isomorphism class. Grown by edge augmentation from a single edge; every
/// connected graph admits a build order that stays connected (spanning tree
/// first), so the enumeration is complete. Classes with m edges for
/// m = 1..=7: 1, 1, 3, 5, 12, 30, 79.
pub fn connected_graphs_with_edges(max_edges: usize) -> Vec<Graph> {
    assert!(max_edges <= 7, "vertex bound 8 only covers up to 7 edges");
    let perm_cache: Vec<Vec<Vec<usize>>> = (0..=(max_edges + 1)).map(permutations).collect();
    let expected = [0usize, 1, 1, 3, 5, 12, 30, 79];

    let mut all = Vec::new();
    // Keys (n, canonical mask): vertex count matters for padding-free dedup.
    let mut seen: HashSet<(usize, u64)> = HashSet::new();
    let k2 = Graph::new(2, vec![(0, 1)]).unwrap();
    seen.insert((2, canonical_mask(k2.edges(), &perm_cache[2])));
    let mut level = vec![k2.clone()];
    all.push(k2);

    for m in 2..=max_edges {
        let mut next = Vec::new();
        for g in &level {
            let n = g.vertex_count();
            let mut candidates: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
            // New edge between existing vertices.
            for a in 0..n {
                for b in (a + 1)..n {
                    if g.edge_index(a, b).is_none() {
                        let mut edges = g.edges().to_vec();
                        edges.push((a, b));
                        candidates.push((n, edges));
                    }
                }
            }
            // New pendant vertex.
            if n < max_edges + 1 {
                for a in 0..n {
                    let mut edges = g.edges().to_vec();
                    edges.push((a, n));
                    candidates.push((n + 1, edges));
                }
            }
            for (nv, edges) in candidates {
                let key = (nv, canonical_mask(&edges, &perm_cache[nv]));
                if seen.insert(key) {
                    next.push(graph_from_mask(nv, key.1));
                }
            }
        }
        assert_eq!(
            next.len(),
            expected[m],
            "connected-graph count mismatch at {m} edges"
        );
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

/// A uniform-ish random connected graph: a random spanning tree on `n`
/// vertices plus random extra edges, capped at `max_edges` total.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, max_edges: usize) -> Graph {
    assert!(n >= 2 && max_edges >= n - 1);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut present: HashSet<(usize, usize)> = HashSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
        present.insert((u, v));
    }
    let mut pool: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .filter(|pair| !present.contains(pair))
        .collect();
    pool.shuffle(rng);
    let extra = rng.gen_range(0..=(max_edges - (n - 1)).min(pool.len()));
    edges.extend(pool.into_iter().take(extra));
    Graph::new(n, edges).expect("generated edges are simple")
}

// ---------------------------------------------------------------------------
// Matchings
// ---------------------------------------------------------------------------

/// Every maximal matching of `g` (no edge addable), enumerated by pivoting on
/// the first edge with two free endpoints: either some edge at its first
/// endpoint is in the matching, or that endpoint stays exposed (and the leaf
/// check rejects branches where an addable edge survives).
pub fn maximal_matchings(g: &Graph) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut matched = vec![false; g.vertex_count()];
    let mut excluded = vec![false; g.vertex_count()];
    let mut current = Vec::new();
    recurse_matchings(g, &mut matched, &mut excluded, &mut current, &mut out);
    out
}

fn recurse_matchings(
    g: &Graph,
    matched: &mut Vec<bool>,
    excluded: &mut Vec<bool>,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    let pivot = g.edges().iter().find(|&&(a, b)| {
        !matched[a] && !matched[b] && !excluded[a] && !excluded[b]
    });
    let Some(&(a, _)) = pivot else {
        // No usable edge left; keep the branch only if truly maximal.
        if g.edges().iter().all(|&(x, y)| matched[x] || matched[y]) {
            out.push(current.clone());
        }
        return;
    };
    for &w in g.neighbors(a) {
        if matched[w] || excluded[w] {
            continue;
        }
        matched[a] = true;
        matched[w] = true;
        current.push((a.min(w), a.max(w)));
        recurse_matchings(g, matched, excluded, current, out);
        current.pop();
        matched[a] = false;
        matched[w] = false;
    }
    excluded[a] = true;
    recurse_matchings(g, matched, excluded, current, out);
    excluded[a] = false;
}

/// A random maximal matching: greedy over a shuffled edge order.
pub fn random_maximal_matching<R: Rng>(rng: &mut R, g: &Graph) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = g.edges().to_vec();
    order.shuffle(rng);
    let mut used = vec![false; g.vertex_count()];
    let mut matching = Vec::new();
    for (u, v) in order {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            matching.push((u, v));
        }
    }
    matching
}

// ---------------------------------------------------------------------------
// Randomized gadget colorings
// ---------------------------------------------------------------------------

/// A random proper coloring of the decorated 3-by-5 gadget whose 18-edge
/// core (triangle plus complete bipartite part) is rainbow. Star edges reuse
/// core colors with probability `reuse_bias`, biased toward triangle colors
/// so the extraction's skip logic gets exercised.
pub fn random_tilde_coloring<R: Rng>(rng: &mut R, reuse_bias: f64) -> ProperColoring {
    let host = GadgetSpec::TildeK35.build().expect("canonical gadget");
    let mut assignment: Vec<(usize, usize, u32)> = Vec::new();
    let mut next = 0u32;
    // Rainbow core: triangle {0,1,2} and all cross edges.
    for &(u, v) in host.edges() {
        if !(u == 3 && v >= 4) {
            assignment.push((u, v, next));
            next += 1;
        }
    }
    let core = assignment.clone();
    let mut star_used: HashSet<u32> = HashSet::new();
    for x in 4..8 {
        let mut choice = None;
        if rng.gen_bool(reuse_bias) {
            // Colors legal on (3, x): not at vertex 3, not at x, not already
            // on a star edge. Triangle colors always qualify; so do cross
            // colors avoiding both endpoints.
            let mut legal: Vec<u32> = core
                .iter()
                .filter(|&&(a, b, _)| a != 3 && b != 3 && a != x && b != x)
                .map(|&(_, _, c)| c)
                .filter(|c| !star_used.contains(c))
                .collect();
            // Bias toward the triangle colors at the front of the core list.
            if !legal.is_empty() {
                let idx = if rng.gen_bool(0.5) {
                    rng.gen_range(0..legal.len().min(3))
                } else {
                    rng.gen_range(0..legal.len())
                };
                choice = Some(legal.swap_remove(idx));
            }
        }
        let color = choice.unwrap_or_else(|| {
            let c = next;
            next += 1;
            c
        });
        star_used.insert(color);
        assignment.push((3, x, color));
    }
    ProperColoring::check_proper(&host, &assignment).expect("generator keeps properness")
}

/// The four-block assembly instance plus a random proper coloring of it with
/// rainbow blocks and pairwise-disjoint connecting palettes. `reuse` colors
/// from the blocks are re-painted onto random matchings inside the
/// triangle-star part so the pruning stage has work to do.
pub fn random_k7_coloring<R: Rng>(rng: &mut R, instance: &Graph, reuse: usize) -> ProperColoring {
    let star_base = 100u32;
    let cross_base = 1_000_000u32;
    let mut colors: Vec<u32> = Vec::with_capacity(instance.edge_count());
    let mut block_colors = Vec::new();
    let mut star_edges: Vec<usize> = Vec::new();
    let mut next_block = 0u32;
    let mut next_star = star_base;
    for (idx, &(u, v)) in instance.edges().iter().enumerate() {
        if v < 16 {
            // Block edge: 24 distinct colors below 100.
            block_colors.push(next_block);
            colors.push(next_block);
            next_block += 1;
        } else if u >= 16 {
            // Triangle-star edge: fresh colors from 100.
            star_edges.push(idx);
            colors.push(next_star);
            next_star += 1;
        } else {
            // Connecting edge (u < 16 <= v): palette slot of the right vertex,
            // filled below with a random permutation per vertex.
            colors.push(0);
        }
    }
    // Disjoint 16-color palettes: right vertex w uses cross_base + 16w + i,
    // with the 16 slots randomly assigned to its 16 connecting edges.
    let mut per_vertex: Vec<Vec<usize>> = vec![Vec::new(); instance.vertex_count()];
    for (idx, &(u, v)) in instance.edges().iter().enumerate() {
        if u < 16 && v >= 16 {
            per_vertex[v].push(idx);
        }
    }
    for (w, slots) in per_vertex.iter().enumerate() {
        if slots.is_empty() {
            continue;
        }
        let mut offsets: Vec<u32> = (0..16).collect();
        offsets.shuffle(rng);
        for (slot, offset) in slots.iter().zip(offsets) {
            colors[*slot] = cross_base + 16 * (w as u32 - 16) + offset;
        }
    }
    // Re-paint some block colors onto random matchings of the star part.
    let mut seen_at: Vec<HashSet<u32>> = vec![HashSet::new(); instance.vertex_count()];
    for (idx, &(u, v)) in instance.edges().iter().enumerate() {
        seen_at[u].insert(colors[idx]);
        seen_at[v].insert(colors[idx]);
    }
    let mut repainted: HashSet<usize> = HashSet::new();
    for j in 0..reuse {
        let c = block_colors[j % block_colors.len()];
        let mut order = star_edges.clone();
        order.shuffle(rng);
        let mut taken = 0;
        for idx in order {
            if taken >= 20 {
                break;
            }
            let (u, v) = instance.edges()[idx];
            if repainted.contains(&idx) || seen_at[u].contains(&c) || seen_at[v].contains(&c) {
                continue;
            }
            seen_at[u].insert(c);
            seen_at[v].insert(c);
            colors[idx] = c;
            repainted.insert(idx);
            taken += 1;
        }
    }
    let assignment: Vec<(usize, usize, u32)> = instance
        .edges()
        .iter()
        .zip(&colors)
        .map(|(&(u, v), &c)| (u, v, c))
        .collect();
    ProperColoring::check_proper(instance, &assignment).expect("generator keeps properness")
}

/// A random vertex-disjoint tree-component structure inside the two sides of
/// the canonical balanced bipartite seed on `n` vertices.
pub fn random_structure<R: Rng>(rng: &mut R, seed: &Graph) -> ComponentStructure {
    let mut structure = ComponentStructure::default();
    for side in [Side::Left, Side::Right] {
        let mut pool: Vec<usize> = (0..seed.vertex_count())
            .filter(|&v| seed.side(v) == Some(side))
            .collect();
        pool.shuffle(rng);
        let components = match side {
            Side::Left => &mut structure.left,
            Side::Right => &mut structure.right,
        };
        while pool.len() >= 2 && rng.gen_bool(0.7) {
            let candidates: Vec<Shape> = Shape::ALL
                .into_iter()
                .filter(|s| s.vertex_count() <= pool.len())
                .collect();
            let shape = *candidates.choose(rng).expect("K2 always fits");
            let vertices: Vec<usize> = pool.split_off(pool.len() - shape.vertex_count());
            components.push(Component { shape, vertices });
        }
    }
    structure
}

/// All k-element subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let needed = k - current.len();
        for v in start..=(n - needed) {
            current.push(v);
            go(v + 1, n, k, current, out);
            current.pop();
        }
    }
    if k <= n {
        go(0, n, k, &mut current, &mut out);
    }
    out
}
