//! Exact moment polynomials for pattern counts in a binomial random subgraph
//! of a complete graph, and the classical exponential correlation bounds.
//!
//! For a pattern `H` and host `K_n`, let the copy family be all subgraph
//! copies of `H` (optionally restricted to prescribed vertex supports). With
//! each potential edge present independently with probability `p`:
//!
//! - `lambda(p)` = expected number of copies = Σ_A p^{e(A)};
//! - `delta_bar(p)` = Σ over *ordered* pairs (A, B) sharing at least one edge
//!   (including A = B) of p^{e(A ∪ B)};
//! - `delta(p)` = the same sum over unordered pairs of *distinct* copies,
//!   i.e. `(delta_bar - lambda) / 2` coefficient-wise.
//!
//! All coefficients are exact nonnegative integers obtained by enumeration —
//! no closed-form shortcuts.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, ToPrimitive, Zero};
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::densities::Rational;
use crate::graph::{enumerate_copies, GadgetSpec, Graph, GraphError};

/// Default host budget for copy-pair enumeration.
pub const DEFAULT_MAX_N: usize = 9;
/// Hard ceiling: potential edges of `K_n` must fit one 128-bit mask.
pub const HARD_MAX_N: usize = 16;

#[derive(Debug, Error)]
pub enum JansonError {
    #[error("host order {n} exceeds the enumeration budget {budget}")]
    OverBudget { n: usize, budget: usize },
    #[error("probability must satisfy 0 < p <= 1, got {0}")]
    BadProbability(Rational),
    #[error("deviation t must satisfy 0 < t <= lambda(p) = {lambda}, got {t}")]
    BadDeviation { t: Rational, lambda: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A polynomial in `p` with nonnegative integer coefficients;
/// `coeffs[k]` is the coefficient of `p^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u128>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    fn add_term(&mut self, power: usize, count: u128) {
        if self.coeffs.len() <= power {
            self.coeffs.resize(power + 1, 0);
        }
        self.coeffs[power] += count;
    }

    pub fn coeff(&self, power: usize) -> u128 {
        self.coeffs.get(power).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Nonzero terms as `(power, coefficient)`, ascending by power.
    pub fn terms(&self) -> Vec<(usize, u128)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (k, c))
            .collect()
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, p: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * p + BigRational::from_integer(BigInt::from(c));
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = terms
            .iter()
            .map(|&(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*p"),
                _ => format!("{c}*p^{k}"),
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

/// Exact moment polynomials for one (pattern, n) pair.
#[derive(Debug, Clone)]
pub struct JansonQuantities {
    pub pattern: Graph,
    pub n: usize,
    pub copy_count: u64,
    pub lambda: Poly,
    pub delta_bar: Poly,
    pub delta: Poly,
}

/// Numeric values of the three exponential bounds.
#[derive(Debug, Clone, Copy)]
pub struct JansonBounds {
    /// exp(-t^2 / (2 delta_bar(p))): lower-tail deviation bound.
    pub lower_tail: f64,
    /// exp(-lambda(p) + delta(p)): nonexistence bound in mean-gap form.
    /// Exceeds 1 (vacuous) whenever delta(p) > lambda(p).
    pub nonexistence_mean_gap: f64,
    /// exp(-lambda(p)^2 / (lambda(p) + 2 delta(p))): nonexistence bound in
    /// ratio form; always at most 1 under the preconditions.
    pub nonexistence_ratio: f64,
}

/// Enumerates copies of `pattern` in `K_n` (optionally restricted to the given
/// vertex supports) and assembles the moment polynomials, under the default
/// budget [`DEFAULT_MAX_N`].
pub fn janson_quantities(
    pattern: &Graph,
    n: usize,
    restrict: Option<&[Vec<usize>]>,
) -> Result<JansonQuantities, JansonError> {
    janson_quantities_with_budget(pattern, n, restrict, DEFAULT_MAX_N)
}

/// As [`janson_quantities`] with an explicit budget (hard cap [`HARD_MAX_N`]).
pub fn janson_quantities_with_budget(
    pattern: &Graph,
    n: usize,
    restrict: Option<&[Vec<usize>]>,
    max_n: usize,
) -> Result<JansonQuantities, JansonError> {
    let budget = max_n.min(HARD_MAX_N);
    if n > budget {
        return Err(JansonError::OverBudget { n, budget });
    }
    let host = GadgetSpec::Complete(n.max(1)).build()?;
    let allowed: Option<HashSet<Vec<usize>>> = restrict.map(|sets| {
        sets.iter()
            .map(|s| {
                let mut v = s.clone();
                v.sort_unstable();
                v
            })
            .collect()
    });

    let mut masks: Vec<u128> = Vec::new();
    if pattern.vertex_count() <= n {
        for copy in enumerate_copies(&host, pattern)? {
            if let Some(allowed) = &allowed {
                let mut support = copy.vertices.clone();
                support.sort_unstable();
                if !allowed.contains(&support) {
                    continue;
                }
            }
            let mut mask: u128 = 0;
            for &(u, v) in &copy.edges {
                let idx = host.edge_index(u, v).expect("copy edge lies in the host");
                mask |= 1u128 << idx;
            }
            masks.push(mask);
        }
    }

    let mut lambda = Poly::zero();
    let mut delta_bar = Poly::zero();
    for &a in &masks {
        lambda.add_term(a.count_ones() as usize, 1);
    }
    for &a in &masks {
        for &b in &masks {
            if a & b != 0 {
                delta_bar.add_term((a | b).count_ones() as usize, 1);
            }
        }
    }
    // delta = (delta_bar - diagonal) / 2, where the diagonal contribution is
    // exactly lambda; every coefficient of the difference is even because
    // off-diagonal ordered pairs come in mirrored twos.
    let mut delta = Poly::zero();
    let top = delta_bar.coeffs.len();
    for k in 0..top {
        let diff = delta_bar.coeff(k) - lambda.coeff(k);
        debug_assert!(diff % 2 == 0, "off-diagonal pair counts must be even");
        if diff > 0 {
            delta.add_term(k, diff / 2);
        }
    }

    Ok(JansonQuantities {
        pattern: pattern.clone(),
        n,
        copy_count: masks.len() as u64,
        lambda,
        delta_bar,
        delta,
    })
}

fn to_big(p: Rational) -> BigRational {
    Ratio::new(BigInt::from(*p.numer()), BigInt::from(*p.denom()))
}

/// Evaluates the three exponential bounds at edge probability `p` and
/// lower-tail deviation `t`. Requires `0 < p <= 1`; when `lambda(p) = 0` the
/// copy family is empty and all bounds are trivially 1, otherwise `t` must
/// satisfy `0 < t <= lambda(p)`.
pub fn janson_bounds(
    q: &JansonQuantities,
    p: Rational,
    t: Rational,
) -> Result<JansonBounds, JansonError> {
    let zero = Rational::zero();
    if p <= zero || p > Ratio::from_integer(1) {
        return Err(JansonError::BadProbability(p));
    }
    let p_big = to_big(p);
    let lambda = q.lambda.eval(&p_big);
    if lambda.is_zero() {
        return Ok(JansonBounds {
            lower_tail: 1.0,
            nonexistence_mean_gap: 1.0,
            nonexistence_ratio: 1.0,
        });
    }
    let t_big = to_big(t);
    if t <= zero || t_big > lambda {
        return Err(JansonError::BadDeviation { t, lambda: lambda.to_string() });
    }
    let delta_bar = q.delta_bar.eval(&p_big);
    let delta = q.delta.eval(&p_big);

    let lower_exp = -(&t_big * &t_big) / (BigRational::from_integer(BigInt::from(2)) * &delta_bar);
    let mean_gap_exp = -(&lambda - &delta);
    let ratio_exp = -(&lambda * &lambda)
        / (&lambda + BigRational::from_integer(BigInt::from(2)) * &delta);

    Ok(JansonBounds {
        lower_tail: exp_of(lower_exp),
        nonexistence_mean_gap: exp_of(mean_gap_exp),
        nonexistence_ratio: exp_of(ratio_exp),
    })
}

fn exp_of(x: BigRational) -> f64 {
    x.to_f64().map(f64::exp).unwrap_or_else(|| {
        // Conversion can only fail on astronomically large magnitudes.
        if x < BigRational::zero() {
            0.0
        } else {
            f64::INFINITY
        }
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::rational;

    fn build(s: &str) -> Graph {
        s.parse::<GadgetSpec>().unwrap().build().unwrap()
    }

    // ---- quantities ----

    #[test]
    fn triangle_in_k4_moments() {
        let q = janson_quantities(&build("K3"), 4, None).unwrap();
        assert_eq!(q.copy_count, 4);
        assert_eq!(q.lambda.terms(), vec![(3, 4)]);
        // Ordered pairs: 4 diagonal at p^3 plus 12 sharing one edge at p^5.
        assert_eq!(q.delta_bar.terms(), vec![(3, 4), (5, 12)]);
        assert_eq!(q.delta.terms(), vec![(5, 6)]);
    }

    #[test]
    fn single_triangle_host() {
        let q = janson_quantities(&build("K3"), 3, None).unwrap();
        assert_eq!(q.copy_count, 1);
        assert_eq!(q.lambda.terms(), vec![(3, 1)]);
        assert_eq!(q.delta_bar.terms(), vec![(3, 1)]);
        assert!(q.delta.is_zero());
    }

    #[test]
    fn disjoint_edges_never_intersect() {
        let q = janson_quantities(&build("K2"), 3, None).unwrap();
        assert_eq!(q.copy_count, 3);
        assert_eq!(q.lambda.terms(), vec![(1, 3)]);
        assert_eq!(q.delta_bar.terms(), vec![(1, 3)]);
        assert!(q.delta.is_zero());
    }

    #[test]
    fn delta_bar_at_one_counts_ordered_intersecting_pairs() {
        for n in 3..=7 {
            let q = janson_quantities(&build("K3"), n, None).unwrap();
            let one = BigRational::from_integer(BigInt::from(1));
            let total = q.delta_bar.eval(&one);
            // Independent double-loop enumeration over explicit triangle lists.
            let mut triangles: Vec<[usize; 3]> = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    for c in (b + 1)..n {
                        triangles.push([a, b, c]);
                    }
                }
            }
            let mut count = 0u64;
            for x in &triangles {
                for y in &triangles {
                    let shared = x.iter().filter(|v| y.contains(v)).count();
                    if shared >= 2 {
                        count += 1;
                    }
                }
            }
            assert_eq!(total, BigRational::from_integer(BigInt::from(count)), "n={n}");
        }
    }

    #[test]
    fn restriction_filters_copy_supports() {
        let allowed = vec![vec![0, 1, 2], vec![0, 1, 3]];
        let q = janson_quantities(&build("K3"), 4, Some(&allowed)).unwrap();
        assert_eq!(q.copy_count, 2);
        assert_eq!(q.lambda.terms(), vec![(3, 2)]);
        // The two triangles share edge (0,1): 2 diagonal + 2 cross pairs.
        assert_eq!(q.delta_bar.terms(), vec![(3, 2), (5, 2)]);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            janson_quantities(&build("K3"), 10, None),
            Err(JansonError::OverBudget { .. })
        ));
        assert!(janson_quantities_with_budget(&build("K3"), 10, None, 12).is_ok());
        assert!(matches!(
            janson_quantities_with_budget(&build("K3"), 17, None, 20),
            Err(JansonError::OverBudget { .. })
        ));
    }

    // ---- bounds ----

    #[test]
    fn empty_family_gives_vacuous_bounds() {
        // Pattern larger than the host: no copies at all.
        let q = janson_quantities(&build("K3"), 2, None).unwrap();
        assert!(q.lambda.is_zero());
        let b = janson_bounds(&q, rational(1, 2), rational(1, 1)).unwrap();
        assert_eq!(b.lower_tail, 1.0);
        assert_eq!(b.nonexistence_mean_gap, 1.0);
        assert_eq!(b.nonexistence_ratio, 1.0);
    }

    #[test]
    fn single_edge_pattern_bounds_at_half() {
        // 3 potential edges, each a copy with probability 1/2: lambda = 3/2,
        // delta = 0, so both nonexistence forms equal exp(-3/2).
        let q = janson_quantities(&build("K2"), 3, None).unwrap();
        let b = janson_bounds(&q, rational(1, 2), rational(1, 1)).unwrap();
        let expected = (-1.5f64).exp();
        assert!((b.nonexistence_mean_gap - expected).abs() < 1e-12);
        assert!((b.nonexistence_ratio - expected).abs() < 1e-12);
        // Lower tail at t=1: exp(-1 / (2 * 3/2)) = exp(-1/3).
        assert!((b.lower_tail - (-1.0f64 / 3.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn triangle_in_k4_bounds_at_one() {
        let q = janson_quantities(&build("K3"), 4, None).unwrap();
        let lambda = rational(4, 1);
        let b = janson_bounds(&q, rational(1, 1), lambda).unwrap();
        // delta_bar(1) = 16, so the lower tail at t = lambda is exp(-16/32).
        assert!((b.lower_tail - (-0.5f64).exp()).abs() < 1e-12);
        // delta(1) = 6 > lambda = 4: the mean-gap form is vacuous here.
        assert!((b.nonexistence_mean_gap - 2.0f64.exp()).abs() < 1e-9);
        assert!((b.nonexistence_ratio - (-1.0f64).exp()).abs() < 1e-12);
        assert!(b.lower_tail <= 1.0 && b.nonexistence_ratio <= 1.0);
    }

    #[test]
    fn bound_parameter_validation() {
        let q = janson_quantities(&build("K3"), 4, None).unwrap();
        assert!(janson_bounds(&q, rational(0, 1), rational(1, 1)).is_err());
        assert!(janson_bounds(&q, rational(3, 2), rational(1, 1)).is_err());
        assert!(janson_bounds(&q, rational(1, 2), rational(0, 1)).is_err());
        // t exceeding lambda(p) = 4 at p = 1 is rejected.
        assert!(janson_bounds(&q, rational(1, 1), rational(5, 1)).is_err());
    }

    #[test]
    fn poly_display_renders_sparse_terms() {
        let q = janson_quantities(&build("K3"), 4, None).unwrap();
        assert_eq!(q.lambda.to_string(), "4*p^3");
        assert_eq!(q.delta_bar.to_string(), "4*p^3 + 12*p^5");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
