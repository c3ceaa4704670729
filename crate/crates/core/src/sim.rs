//! Monte Carlo machinery for random perturbations: sampling the union of a
//! seed graph with a binomial random graph, estimating the probability that
//! the perturbed graph arrows a pattern, and sweeping a probability grid.
//!
//! Randomness policy: all draws come from counter-based substreams of a
//! single ChaCha12 master seed. Trial `t` uses stream `t`; in independent
//! sweep mode, grid point `i` and trial `t` use stream `i * 2^32 + t`;
//! random seed graphs are realized on stream `u64::MAX`. Fixed inputs
//! therefore produce byte-identical records regardless of scheduling.
//!
//! Sweeps default to common random numbers: each trial draws one uniform per
//! missing vertex pair and reuses it across the whole grid, so the sampled
//! graphs are nested as `p` grows and per-trial outcomes are exactly
//! monotone (adding edges preserves arrowing).

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{parse_graph_text, GadgetSpec, Graph, GraphError};
use crate::solver::{
    decide_arrow, decide_arrow_fast_paths, ArrowVerdict, SearchBudget, SolverError,
};

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z: f64 = 1.959963984540054;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("degenerate record: all {trials} trials were indeterminate")]
    Degenerate { trials: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

/// How a seed graph is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeedSpec {
    /// Balanced complete bipartite graph on `n` vertices.
    CompleteBipartiteHalf(usize),
    /// Balanced bipartition on `n` vertices; each cross pair appears
    /// independently with probability `d` (realized on RNG stream
    /// `u64::MAX` of the master seed).
    DenseBipartiteRandom { n: usize, d: f64 },
    /// Graph read from a text file (side labels honored when present).
    FromFile(PathBuf),
}

impl SeedSpec {
    /// Builds the concrete seed graph. `master_seed` only matters for the
    /// random variant.
    pub fn realize(&self, master_seed: u64) -> Result<Graph, SimError> {
        match self {
            SeedSpec::CompleteBipartiteHalf(n) => {
                if *n < 2 {
                    return Err(SimError::Parameter("seed needs n >= 2".into()));
                }
                Ok(GadgetSpec::CompleteBipartite(n / 2, n - n / 2).build()?)
            }
            SeedSpec::DenseBipartiteRandom { n, d } => {
                if *n < 2 {
                    return Err(SimError::Parameter("seed needs n >= 2".into()));
                }
                if !(*d > 0.0 && *d <= 1.0) {
                    return Err(SimError::Parameter("seed density must satisfy 0 < d <= 1".into()));
                }
                let a = n / 2;
                let mut rng = substream(master_seed, u64::MAX);
                let template = GadgetSpec::CompleteBipartite(a, n - a).build()?;
                let edges: Vec<(usize, usize)> = template
                    .edges()
                    .iter()
                    .copied()
                    .filter(|_| rng.gen::<f64>() < *d)
                    .collect();
                let sides = template.sides().expect("bipartite template").to_vec();
                Ok(Graph::with_sides(*n, edges, sides)?)
            }
            SeedSpec::FromFile(path) => {
                let text = std::fs::read_to_string(path)?;
                Ok(parse_graph_text(&text)?)
            }
        }
    }
}

/// The derived RNG for a given substream of the master seed.
pub fn substream(master_seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Vertex pairs of the seed's vertex set that are not seed edges, in
/// canonical order; these are the candidate perturbation edges.
fn missing_pairs(seed: &Graph) -> Vec<(usize, usize)> {
    let n = seed.vertex_count();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if !seed.has_edge(u, v) {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

fn union_with(seed: &Graph, added: &[(usize, usize)]) -> Result<Graph, SimError> {
    Ok(seed.union_with_edges(added)?)
}

/// Samples the union of the seed with an independent Bernoulli(`p`) graph on
/// the same vertex set (one uniform per missing pair, included when it falls
/// below `p`). Side labels are preserved from the seed.
pub fn sample_perturbation<R: Rng>(
    seed: &Graph,
    p: f64,
    rng: &mut R,
) -> Result<Graph, SimError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SimError::Parameter(format!("p={p} outside [0, 1]")));
    }
    let added: Vec<(usize, usize)> = missing_pairs(seed)
        .into_iter()
        .filter(|_| rng.gen::<f64>() < p)
        .collect();
    union_with(seed, &added)
}

/// One persisted Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub seed_spec: SeedSpec,
    pub n: usize,
    pub p: f64,
    /// Pattern as a spec string.
    pub pattern: String,
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    pub indeterminates: u64,
    pub rng_seed: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub budget_nodes: Option<u64>,
    pub budget_wall_micros: Option<u128>,
}

impl ExperimentRecord {
    pub fn decided(&self) -> u64 {
        self.successes + self.failures
    }
}

/// Wilson 95% score interval for `successes` out of `decided`.
pub fn wilson_interval(successes: u64, decided: u64) -> (f64, f64) {
    assert!(decided > 0 && successes <= decided);
    let n = decided as f64;
    let phat = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = (WILSON_Z / denom) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    // Clamp against rounding so the interval always brackets the estimate.
    ((center - half).clamp(0.0, phat), (center + half).clamp(phat, 1.0))
}

/// Runs `f` over `0..count`, optionally on several worker threads with
/// contiguous index chunks; the assembled output is in index order either
/// way, so results do not depend on scheduling.
fn parallel_map<T, F>(count: u64, threads: usize, f: F) -> Result<Vec<T>, SimError>
where
    T: Send,
    F: Fn(u64) -> Result<T, SimError> + Sync,
{
    let workers = threads.max(1).min(count.max(1) as usize);
    if workers <= 1 {
        return (0..count).map(f).collect();
    }
    let chunk = (count as usize).div_ceil(workers);
    let chunks: Vec<Vec<Result<T, SimError>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(count as usize);
                    (lo..hi).map(|t| f(t as u64)).collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(count as usize);
    for chunk in chunks {
        for r in chunk {
            out.push(r?);
        }
    }
    Ok(out)
}

fn decide(g: &Graph, pattern: &Graph, budget: SearchBudget) -> Result<Option<bool>, SimError> {
    let verdict = match decide_arrow_fast_paths(g, pattern)? {
        Some(v) => v,
        None => decide_arrow(g, pattern, budget)?,
    };
    Ok(match verdict {
        ArrowVerdict::Arrowed { .. } => Some(true),
        ArrowVerdict::NotArrowed { .. } => Some(false),
        ArrowVerdict::Indeterminate { .. } => None,
    })
}

fn make_record(
    seed_spec: &SeedSpec,
    n: usize,
    p: f64,
    pattern: &GadgetSpec,
    rng_seed: u64,
    budget: SearchBudget,
    tally: (u64, u64, u64),
) -> Result<ExperimentRecord, SimError> {
    let (successes, failures, indeterminates) = tally;
    let trials = successes + failures + indeterminates;
    let decided = successes + failures;
    if decided == 0 {
        return Err(SimError::Degenerate { trials });
    }
    let estimate = successes as f64 / decided as f64;
    let (ci_low, ci_high) = wilson_interval(successes, decided);
    Ok(ExperimentRecord {
        seed_spec: seed_spec.clone(),
        n,
        p,
        pattern: pattern.to_string(),
        trials,
        successes,
        failures,
        indeterminates,
        rng_seed,
        estimate,
        ci_low,
        ci_high,
        budget_nodes: budget.max_nodes,
        budget_wall_micros: budget.max_wall.map(|w| w.as_micros()),
    })
}

/// Monte Carlo estimate of the probability that the perturbed seed arrows
/// the pattern at a single `p`. Trial `t` samples on stream `t`; verdicts
/// use the triangle fast path when it applies, else the exact solver under
/// the per-trial budget. Indeterminate trials are excluded from the
/// estimate; if every trial is indeterminate the record is refused.
pub fn estimate_arrow_probability(
    seed_spec: &SeedSpec,
    p: f64,
    pattern: &GadgetSpec,
    trials: u64,
    rng_seed: u64,
    budget: SearchBudget,
) -> Result<ExperimentRecord, SimError> {
    estimate_arrow_probability_threaded(seed_spec, p, pattern, trials, rng_seed, budget, 1)
}

/// As [`estimate_arrow_probability`], with trials spread over worker
/// threads. Identical output for any thread count.
pub fn estimate_arrow_probability_threaded(
    seed_spec: &SeedSpec,
    p: f64,
    pattern: &GadgetSpec,
    trials: u64,
    rng_seed: u64,
    budget: SearchBudget,
    threads: usize,
) -> Result<ExperimentRecord, SimError> {
    let seed = seed_spec.realize(rng_seed)?;
    let pattern_graph = pattern.build()?;
    let outcomes = parallel_map(trials, threads, |t| {
        let mut rng = substream(rng_seed, t);
        let g = sample_perturbation(&seed, p, &mut rng)?;
        decide(&g, &pattern_graph, budget)
    })?;
    let mut tally = (0u64, 0u64, 0u64);
    for outcome in outcomes {
        match outcome {
            Some(true) => tally.0 += 1,
            Some(false) => tally.1 += 1,
            None => tally.2 += 1,
        }
    }
    make_record(seed_spec, seed.vertex_count(), p, pattern, rng_seed, budget, tally)
}

/// Whether sweep grid points share per-trial uniforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// One uniform per missing pair per trial, reused across the grid:
    /// sampled graphs are nested in `p` and per-trial outcomes are exactly
    /// monotone.
    CommonRandomNumbers,
    /// Fresh draws per grid point (stream `i * 2^32 + t`).
    Independent,
}

/// A sweep's records plus the per-point, per-trial verdicts
/// (`outcomes[i][t]`; `None` = indeterminate), kept for exact monotonicity
/// checks under common random numbers.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<ExperimentRecord>,
    pub outcomes: Vec<Vec<Option<bool>>>,
}

/// Runs one estimate per grid point (ascending grid required) under a shared
/// master seed.
pub fn threshold_sweep(
    seed_spec: &SeedSpec,
    pattern: &GadgetSpec,
    p_grid: &[f64],
    trials: u64,
    rng_seed: u64,
    budget: SearchBudget,
    mode: SweepMode,
) -> Result<SweepResult, SimError> {
    threshold_sweep_threaded(seed_spec, pattern, p_grid, trials, rng_seed, budget, mode, 1)
}

/// As [`threshold_sweep`], with trials spread over worker threads.
/// Identical output for any thread count.
#[allow(clippy::too_many_arguments)]
pub fn threshold_sweep_threaded(
    seed_spec: &SeedSpec,
    pattern: &GadgetSpec,
    p_grid: &[f64],
    trials: u64,
    rng_seed: u64,
    budget: SearchBudget,
    mode: SweepMode,
    threads: usize,
) -> Result<SweepResult, SimError> {
    if p_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(SimError::Parameter("p grid must be ascending".into()));
    }
    if let Some(p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(SimError::Parameter(format!("p={p} outside [0, 1]")));
    }
    let seed = seed_spec.realize(rng_seed)?;
    let pattern_graph = pattern.build()?;
    let pairs = missing_pairs(&seed);

    let mut outcomes: Vec<Vec<Option<bool>>> = vec![Vec::with_capacity(trials as usize); p_grid.len()];
    match mode {
        SweepMode::CommonRandomNumbers => {
            let per_trial = parallel_map(trials, threads, |t| {
                let mut rng = substream(rng_seed, t);
                let uniforms: Vec<f64> = pairs.iter().map(|_| rng.gen::<f64>()).collect();
                let mut row = Vec::with_capacity(p_grid.len());
                for &p in p_grid {
                    let added: Vec<(usize, usize)> = pairs
                        .iter()
                        .zip(&uniforms)
                        .filter(|&(_, &u)| u < p)
                        .map(|(&pair, _)| pair)
                        .collect();
                    let g = union_with(&seed, &added)?;
                    row.push(decide(&g, &pattern_graph, budget)?);
                }
                Ok(row)
            })?;
            for row in per_trial {
                for (i, outcome) in row.into_iter().enumerate() {
                    outcomes[i].push(outcome);
                }
            }
        }
        SweepMode::Independent => {
            for (i, &p) in p_grid.iter().enumerate() {
                outcomes[i] = parallel_map(trials, threads, |t| {
                    let mut rng = substream(rng_seed, (i as u64) << 32 | t);
                    let g = sample_perturbation(&seed, p, &mut rng)?;
                    decide(&g, &pattern_graph, budget)
                })?;
            }
        }
    }

    let mut records = Vec::with_capacity(p_grid.len());
    for (i, &p) in p_grid.iter().enumerate() {
        let mut tally = (0u64, 0u64, 0u64);
        for outcome in &outcomes[i] {
            match outcome {
                Some(true) => tally.0 += 1,
                Some(false) => tally.1 += 1,
                None => tally.2 += 1,
            }
        }
        records.push(make_record(
            seed_spec,
            seed.vertex_count(),
            p,
            pattern,
            rng_seed,
            budget,
            tally,
        )?);
    }
    Ok(SweepResult { records, outcomes })
}

/// CSV summary of sweep records.
pub fn sweep_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from("p,trials,decided,successes,indeterminates,estimate,ci_low,ci_high\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.p,
            r.trials,
            r.decided(),
            r.successes,
            r.indeterminates,
            r.estimate,
            r.ci_low,
            r.ci_high
        ));
    }
    out
}

/// JSONL serialization: one record per line.
pub fn records_jsonl(records: &[ExperimentRecord]) -> Result<String, SimError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}
