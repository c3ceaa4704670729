//! Exact combinatorics for rainbow subgraphs of properly edge-colored graphs.
//!
//! The crate provides, in dependency order:
//!
//! - [`graph`]: finite simple graphs, parameterized gadget constructors with
//!   canonical labelings, a line-oriented text format, and exact subgraph-copy
//!   enumeration deduplicated modulo pattern automorphisms.
//! - [`densities`]: exact rational density functionals over subgraphs and
//!   bipartitions, plus a catalog of threshold exponents.
//! - [`janson`]: exact moment polynomials for pattern counts in a random
//!   subgraph of a complete graph and the classical correlation-bound forms.
//! - [`coloring`]: proper edge colorings in canonical form, rainbow-copy
//!   censuses, clash tests, and counting bounds.
//! - [`solver`]: an exact decision procedure for "every proper edge coloring
//!   of the host admits a rainbow copy of the pattern", with budgets, a
//!   witness coloring on the negative side, and a brute-force cross-check.
//! - [`constructions`]: explicit witness colorings of joins, the blown-up
//!   zero-statement coloring, and deterministic extraction and greedy
//!   procedures that locate rainbow cliques inside structured gadgets.
//! - [`sim`]: a seeded Monte Carlo simulator estimating how often a perturbed
//!   seed graph forces a rainbow pattern copy.
//!
//! All randomized components draw from explicit seeds with counter-based
//! per-trial substreams, so every experiment is reproducible bit-for-bit.

pub mod coloring;
pub mod constructions;
pub mod densities;
pub mod graph;
pub mod janson;
pub mod sim;
pub mod solver;
