//! `rbw` — command-line laboratory for the rainbow-arrow relation.
//!
//! Exposes the library's gadget builders, density functionals, arrow-decision
//! solver, explicit coloring constructions, and seeded Monte Carlo simulator
//! behind one binary. Graphs are named by spec strings (`K4`, `C5`, `Kb(3,5)`,
//! `S3`, `P4`, `Khat(3,5)`, `Ktilde35`, `Kjoin(S3,P4)`, `Kdelta(25,49)`) or by
//! graph text files; one grammar serves every subcommand.
//!
//! Exit codes: `arrow` returns 0 (arrowed), 1 (not arrowed), or 2
//! (indeterminate under the given budget). Every other subcommand returns 0 on
//! success, 64 on usage errors, 65 on bad input data, and 70 on internal
//! errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational, ToPrimitive};

use rainbow_core::coloring::{rainbow_census, ProperColoring, RainbowReport};
use rainbow_core::constructions::{
    assemble_rainbow_k7, cross_table_coloring, extract_rainbow_k5, k7_instance_graph,
    zero_statement_coloring, Component, ComponentStructure, ConstructionError, Shape,
};
use rainbow_core::densities::{density_report, parse_rational, DensityError, Rational};
use rainbow_core::graph::{
    parse_graph_text, write_graph_text, GadgetSpec, Graph, SubgraphCopy,
};
use rainbow_core::janson::{janson_bounds, janson_quantities, JansonError};
use rainbow_core::sim::{
    estimate_arrow_probability_threaded, records_jsonl, sweep_csv, threshold_sweep_threaded,
    ExperimentRecord, SeedSpec, SimError, SweepMode,
};
use rainbow_core::solver::{
    decide_arrow, decide_arrow_fast_paths, ArrowVerdict, SearchBudget, SearchStats, SolverError,
};

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

/// Error channel deciding the process exit code.
#[derive(Debug)]
enum CliError {
    /// Malformed command line: bad flags, bad spec strings, bad parameters.
    Usage(String),
    /// Well-formed invocation over unreadable or invalid input data.
    Data(String),
    /// Invariant violation inside the library.
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

/// Classifies a construction failure: mismatched or malformed *inputs* are
/// data errors, anything flagged internal is a library bug.
fn construction_err(e: ConstructionError) -> CliError {
    match e {
        ConstructionError::Internal(_) => CliError::Internal(e.to_string()),
        _ => CliError::Data(e.to_string()),
    }
}

fn solver_err(e: SolverError) -> CliError {
    match e {
        SolverError::Internal(_) => CliError::Internal(e.to_string()),
        SolverError::EmptyPattern | SolverError::OracleBudget { .. } => usage(e),
        _ => CliError::Data(e.to_string()),
    }
}

fn sim_err(e: SimError) -> CliError {
    match e {
        SimError::Parameter(_) | SimError::Degenerate { .. } => usage(e),
        SimError::Io(_) | SimError::Graph(_) => data(e),
        SimError::Solver(inner) => solver_err(inner),
        SimError::Serde(_) => CliError::Internal(e.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "rbw",
    version,
    about = "Rainbow-arrow laboratory: gadgets, densities, solver, constructions, simulator",
    propagate_version = true
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker-thread cap for simulate/sweep trials.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a gadget from a spec string and print or save its text form.
    Gadget {
        /// Gadget spec string, e.g. K4, Kb(3,5), Kdelta(25,49).
        spec: String,
        /// Write the graph text here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report exact density functionals of a pattern graph.
    Density {
        /// Gadget spec string for the pattern.
        spec: String,
        /// Also minimize the side-wise density over all vertex bipartitions.
        #[arg(long)]
        bip: bool,
    },
    /// Decide whether every proper edge coloring of the host contains a
    /// rainbow copy of the pattern. Exit 0 = arrowed, 1 = not arrowed
    /// (witness available), 2 = budget exhausted.
    Arrow {
        /// Host graph: spec string or graph text file.
        #[arg(long)]
        graph: String,
        /// Pattern spec string.
        #[arg(long)]
        pattern: String,
        /// Abort after this many search nodes.
        #[arg(long)]
        budget_nodes: Option<u64>,
        /// Abort after this many seconds of wall time.
        #[arg(long)]
        budget_secs: Option<u64>,
        /// On a not-arrowed verdict, write the witness coloring here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Validate a proper-coloring file against a host and report its rainbow
    /// census for a pattern.
    VerifyColoring {
        /// Host graph: spec string or graph text file.
        #[arg(long)]
        graph: String,
        /// Coloring file: one `u v c` line per edge.
        #[arg(long)]
        coloring: PathBuf,
        /// Pattern spec string.
        #[arg(long)]
        pattern: String,
    },
    /// Run one of the explicit constructions and write graph + coloring files.
    Construct(ConstructArgs),
    /// Estimate the arrow probability of a randomly perturbed seed at one p.
    Simulate {
        /// Seed graph: half:N | random:N:D | graph text file.
        #[arg(long)]
        seed_graph: String,
        /// Pattern spec string.
        #[arg(long)]
        pattern: String,
        /// Perturbation edge probability in [0, 1].
        #[arg(long)]
        p: f64,
        /// Number of Monte Carlo trials.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Master seed; fully determines the output.
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Per-trial solver node budget.
        #[arg(long)]
        budget_nodes: Option<u64>,
        /// Append the experiment record to this JSONL file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the perturbation probability over a grid.
    Sweep {
        /// Seed graph: half:N | random:N:D | graph text file.
        #[arg(long)]
        seed_graph: String,
        /// Pattern spec string.
        #[arg(long)]
        pattern: String,
        /// Ascending comma-separated probabilities, e.g. 0.0,0.1,0.5,1.0.
        #[arg(long)]
        p_grid: String,
        /// Trials per grid point.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Master seed; fully determines the output.
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Per-trial solver node budget.
        #[arg(long)]
        budget_nodes: Option<u64>,
        /// Redraw randomness per grid point instead of sharing per-trial
        /// uniforms across the grid.
        #[arg(long)]
        independent: bool,
        /// Write the CSV summary here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write one experiment record per grid point to this JSONL file.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Moment quantities for pattern copies in a perturbed complete graph,
    /// with optional exponential bounds at a rational edge probability.
    Janson {
        /// Pattern spec string.
        #[arg(long)]
        pattern: String,
        /// Host size n (copies live in K_n).
        #[arg(long)]
        n: usize,
        /// Edge probability as a rational, e.g. 1, 1/2, 3/10.
        #[arg(long)]
        p: Option<String>,
        /// Lower-tail deviation as a rational; defaults to the mean.
        #[arg(long)]
        t: Option<String>,
    },
}

#[derive(Args)]
struct ConstructArgs {
    /// Which construction to run.
    #[arg(long, value_enum)]
    what: What,
    /// Left shape for the cross-table coloring (K2 | P3 | P4 | S3).
    #[arg(long)]
    left: Option<String>,
    /// Right shape for the cross-table coloring (K2 | P3 | P4 | S3).
    #[arg(long)]
    right: Option<String>,
    /// Seed size for the zero-statement coloring.
    #[arg(long)]
    n: Option<usize>,
    /// Input file: component structure (zero-statement) or coloring
    /// (k5-extract, k7-assemble).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output prefix; writes <prefix>.graph.txt and <prefix>.coloring.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the canonical K7 assembly instance graph here (k7-assemble).
    #[arg(long)]
    emit_instance: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    /// Rainbow-K4-free coloring of the join of two small shapes, from the
    /// published cross-color tables.
    #[value(name = "appendixB", alias = "appendix-b")]
    CrossTable,
    /// Rainbow-K4-free coloring of a bipartite seed plus sparse tree
    /// components.
    ZeroStatement,
    /// Rainbow K5 inside a decorated 3-by-5 gadget coloring.
    K5Extract,
    /// Rainbow K7 from a four-block instance coloring.
    K7Assemble,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage error carrying clap's rendered help text.
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = e.print();
                    ExitCode::from(EXIT_USAGE)
                }
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("rbw: error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if cli.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let format = cli.format;
    match cli.command {
        Command::Gadget { spec, out } => cmd_gadget(&spec, out.as_deref()),
        Command::Density { spec, bip } => cmd_density(&spec, bip, format),
        Command::Arrow { graph, pattern, budget_nodes, budget_secs, witness } => {
            cmd_arrow(&graph, &pattern, budget_nodes, budget_secs, witness.as_deref(), format)
        }
        Command::VerifyColoring { graph, coloring, pattern } => {
            cmd_verify_coloring(&graph, &coloring, &pattern, format)
        }
        Command::Construct(args) => cmd_construct(&args, format),
        Command::Simulate { seed_graph, pattern, p, trials, rng_seed, budget_nodes, out } => {
            cmd_simulate(
                &seed_graph,
                &pattern,
                p,
                trials,
                rng_seed,
                budget_nodes,
                out.as_deref(),
                cli.threads,
                format,
            )
        }
        Command::Sweep {
            seed_graph,
            pattern,
            p_grid,
            trials,
            rng_seed,
            budget_nodes,
            independent,
            out,
            records,
        } => cmd_sweep(
            &seed_graph,
            &pattern,
            &p_grid,
            trials,
            rng_seed,
            budget_nodes,
            independent,
            out.as_deref(),
            records.as_deref(),
            cli.threads,
            format,
        ),
        Command::Janson { pattern, n, p, t } => {
            cmd_janson(&pattern, n, p.as_deref(), t.as_deref(), format)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared input plumbing
// ---------------------------------------------------------------------------

/// Parses a pattern argument, which must be a spec string.
fn pattern_spec(s: &str) -> Result<GadgetSpec, CliError> {
    GadgetSpec::from_str(s).map_err(usage)
}

fn build_spec(spec: &GadgetSpec) -> Result<Graph, CliError> {
    spec.build().map_err(usage)
}

/// Resolves a host argument: a spec string first, otherwise a graph text file.
fn resolve_graph(s: &str) -> Result<Graph, CliError> {
    match GadgetSpec::from_str(s) {
        Ok(spec) => spec.build().map_err(usage),
        Err(spec_err) => {
            if Path::new(s).exists() {
                let text = fs::read_to_string(s).map_err(data)?;
                parse_graph_text(&text)
                    .map_err(|e| CliError::Data(format!("graph file {s}: {e}")))
            } else {
                Err(CliError::Usage(format!(
                    "{s} is neither a gadget spec ({spec_err}) nor an existing file"
                )))
            }
        }
    }
}

fn read_coloring(host: &Graph, path: &Path) -> Result<ProperColoring, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("coloring file {}: {e}", path.display())))?;
    ProperColoring::parse_text(host, &text)
        .map_err(|e| CliError::Data(format!("coloring file {}: {e}", path.display())))
}

/// Parses the seed mini-grammar: `half:N`, `random:N:D`, or a graph file path.
fn parse_seed_spec(s: &str) -> Result<SeedSpec, CliError> {
    if let Some(rest) = s.strip_prefix("half:") {
        let n: usize = rest
            .parse()
            .map_err(|e| CliError::Usage(format!("seed graph {s}: bad size: {e}")))?;
        return Ok(SeedSpec::CompleteBipartiteHalf(n));
    }
    if let Some(rest) = s.strip_prefix("random:") {
        let (n_str, d_str) = rest.split_once(':').ok_or_else(|| {
            CliError::Usage(format!("seed graph {s}: expected random:N:D"))
        })?;
        let n: usize = n_str
            .parse()
            .map_err(|e| CliError::Usage(format!("seed graph {s}: bad size: {e}")))?;
        let d: f64 = d_str
            .parse()
            .map_err(|e| CliError::Usage(format!("seed graph {s}: bad density: {e}")))?;
        return Ok(SeedSpec::DenseBipartiteRandom { n, d });
    }
    if Path::new(s).exists() {
        Ok(SeedSpec::FromFile(PathBuf::from(s)))
    } else {
        Err(CliError::Usage(format!(
            "seed graph {s}: expected half:N, random:N:D, or an existing graph file"
        )))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Data(format!("writing {}: {e}", path.display())))
}

fn vertex_list(vertices: &[usize]) -> String {
    vertices
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn reject_csv(format: Format, what: &str) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::Usage(format!("--format csv is not available for {what}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gadget / density
// ---------------------------------------------------------------------------

fn cmd_gadget(spec: &str, out: Option<&Path>) -> Result<u8, CliError> {
    let g = build_spec(&pattern_spec(spec)?)?;
    let text = write_graph_text(&g);
    match out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn rational_str(r: Rational) -> String {
    r.to_string()
}

fn cmd_density(spec: &str, bip: bool, format: Format) -> Result<u8, CliError> {
    reject_csv(format, "density")?;
    let g = build_spec(&pattern_spec(spec)?)?;
    let report = density_report(&g, bip).map_err(usage)?;
    match format {
        Format::Json => {
            let json = serde_json::json!({
                "spec": spec,
                "m2": rational_str(report.m2),
                "m1": rational_str(report.m1),
                "m_bip2": report.m_bip2.map(rational_str),
                "strictly_2_balanced": report.strictly_2_balanced,
                "argmax_vertices": report.argmax_subgraph.vertices,
            });
            println!("{json}");
        }
        Format::Text | Format::Csv => {
            println!("m2={}", rational_str(report.m2));
            println!("m1={}", rational_str(report.m1));
            if let Some(b) = report.m_bip2 {
                println!("m_bip2={}", rational_str(b));
            }
            println!("strictly_2_balanced={}", report.strictly_2_balanced);
            println!("argmax_vertices={}", vertex_list(&report.argmax_subgraph.vertices));
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// arrow
// ---------------------------------------------------------------------------

fn print_arrow(
    verdict_name: &str,
    stats: &SearchStats,
    witness_path: Option<&Path>,
    format: Format,
) {
    match format {
        Format::Json => {
            let json = serde_json::json!({
                "verdict": verdict_name,
                "nodes": stats.nodes,
                "prunes": stats.prunes,
                "wall_micros": stats.wall_micros as u64,
                "witness": witness_path.map(|p| p.display().to_string()),
            });
            println!("{json}");
        }
        Format::Text | Format::Csv => {
            println!("verdict={verdict_name}");
            println!("nodes={}", stats.nodes);
            println!("prunes={}", stats.prunes);
            println!("wall_micros={}", stats.wall_micros);
            if let Some(p) = witness_path {
                println!("witness={}", p.display());
            }
        }
    }
}

fn cmd_arrow(
    graph: &str,
    pattern: &str,
    budget_nodes: Option<u64>,
    budget_secs: Option<u64>,
    witness_out: Option<&Path>,
    format: Format,
) -> Result<u8, CliError> {
    reject_csv(format, "arrow")?;
    let g = resolve_graph(graph)?;
    let h = build_spec(&pattern_spec(pattern)?)?;
    let budget = SearchBudget {
        max_nodes: budget_nodes,
        max_wall: budget_secs.map(Duration::from_secs),
    };
    let verdict = match decide_arrow_fast_paths(&g, &h).map_err(solver_err)? {
        Some(v) => v,
        None => decide_arrow(&g, &h, budget).map_err(solver_err)?,
    };
    match verdict {
        ArrowVerdict::Arrowed { stats } => {
            print_arrow("arrowed", &stats, None, format);
            Ok(0)
        }
        ArrowVerdict::NotArrowed { witness, stats } => {
            let mut written = None;
            if let Some(path) = witness_out {
                write_file(path, &witness.write_text())?;
                written = Some(path);
            }
            print_arrow("not-arrowed", &stats, written, format);
            Ok(1)
        }
        ArrowVerdict::Indeterminate { stats } => {
            print_arrow("indeterminate", &stats, None, format);
            Ok(2)
        }
    }
}

// ---------------------------------------------------------------------------
// verify-coloring
// ---------------------------------------------------------------------------

fn print_census(report: &RainbowReport, classes: u32, format: Format) {
    match format {
        Format::Json => {
            let witnesses: Vec<_> =
                report.witnesses.iter().map(|w| w.vertices.clone()).collect();
            let json = serde_json::json!({
                "proper": true,
                "classes": classes,
                "total_copies": report.total_copies,
                "rainbow_copies": report.rainbow_copies,
                "non_rainbow_copies": report.non_rainbow_copies,
                "witnesses": witnesses,
                "witness_cap": report.witness_cap,
            });
            println!("{json}");
        }
        Format::Text | Format::Csv => {
            println!("proper=true");
            println!("classes={classes}");
            println!("total_copies={}", report.total_copies);
            println!("rainbow_copies={}", report.rainbow_copies);
            println!("non_rainbow_copies={}", report.non_rainbow_copies);
            for w in &report.witnesses {
                println!("rainbow_witness={}", vertex_list(&w.vertices));
            }
        }
    }
}

fn cmd_verify_coloring(
    graph: &str,
    coloring_path: &Path,
    pattern: &str,
    format: Format,
) -> Result<u8, CliError> {
    reject_csv(format, "verify-coloring")?;
    let g = resolve_graph(graph)?;
    let h = build_spec(&pattern_spec(pattern)?)?;
    let coloring = read_coloring(&g, coloring_path)?;
    let report = rainbow_census(&coloring, &h).map_err(data)?;
    print_census(&report, coloring.class_count(), format);
    Ok(0)
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

fn parse_shape(flag: &str, value: Option<&String>) -> Result<Shape, CliError> {
    let s = value.ok_or_else(|| {
        CliError::Usage(format!("--{flag} is required for this construction"))
    })?;
    Shape::from_str(s).map_err(usage)
}

/// Parses a component-structure file: one `left|right SHAPE v1 v2 ...` line
/// per tree component; `#` starts a comment.
fn parse_structure(path: &Path) -> Result<ComponentStructure, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("structure file {}: {e}", path.display())))?;
    let mut structure = ComponentStructure::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let fail = |msg: String| CliError::Data(format!("structure line {}: {msg}", idx + 1));
        let side = parts.next().expect("non-empty line has a first token");
        let shape_token =
            parts.next().ok_or_else(|| fail("missing shape token".into()))?;
        let shape = Shape::from_str(shape_token).map_err(|e| fail(e.to_string()))?;
        let vertices = parts
            .map(|t| t.parse::<usize>().map_err(|e| fail(format!("bad vertex {t}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let component = Component { shape, vertices };
        match side {
            "left" => structure.left.push(component),
            "right" => structure.right.push(component),
            other => return Err(fail(format!("side must be left or right, got {other}"))),
        }
    }
    Ok(structure)
}

/// Writes `<prefix>.graph.txt` and `<prefix>.coloring.txt`.
fn write_pair(
    prefix: &Path,
    coloring: &ProperColoring,
) -> Result<(PathBuf, PathBuf), CliError> {
    let graph_path = PathBuf::from(format!("{}.graph.txt", prefix.display()));
    let coloring_path = PathBuf::from(format!("{}.coloring.txt", prefix.display()));
    write_file(&graph_path, &write_graph_text(coloring.host()))?;
    write_file(&coloring_path, &coloring.write_text())?;
    Ok((graph_path, coloring_path))
}

/// Key/value lines (text) or one JSON object (json) for construct output.
struct Report {
    fields: Vec<(String, serde_json::Value)>,
}

impl Report {
    fn new(what: &str) -> Self {
        Report { fields: vec![("what".into(), what.into())] }
    }

    fn push(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.fields.push((key.into(), value.into()));
    }

    fn push_files(&mut self, files: Option<(PathBuf, PathBuf)>) {
        if let Some((g, c)) = files {
            self.push("graph_file", g.display().to_string());
            self.push("coloring_file", c.display().to_string());
        }
    }

    fn print(&self, format: Format) {
        match format {
            Format::Json => {
                let map: serde_json::Map<String, serde_json::Value> =
                    self.fields.iter().cloned().collect();
                println!("{}", serde_json::Value::Object(map));
            }
            Format::Text | Format::Csv => {
                for (key, value) in &self.fields {
                    match value {
                        serde_json::Value::String(s) => println!("{key}={s}"),
                        serde_json::Value::Array(items) => {
                            let rendered: Vec<String> =
                                items.iter().map(|v| v.to_string()).collect();
                            println!("{key}={}", rendered.join(" "));
                        }
                        other => println!("{key}={other}"),
                    }
                }
            }
        }
    }
}

/// Restricts `coloring` to the subgraph spanned by a clique copy, relabeling
/// the copy's vertices to 0..k in ascending order.
fn clique_restriction(
    coloring: &ProperColoring,
    copy: &SubgraphCopy,
) -> Result<ProperColoring, CliError> {
    let k = copy.vertices.len();
    let sub = build_spec(&GadgetSpec::Complete(k))?;
    coloring
        .restricted(&sub, &copy.vertices)
        .map_err(|e| CliError::Internal(format!("restricting to the output copy: {e}")))
}

fn cmd_construct(args: &ConstructArgs, format: Format) -> Result<u8, CliError> {
    reject_csv(format, "construct")?;
    let mut report;
    match args.what {
        What::CrossTable => {
            let left = parse_shape("left", args.left.as_ref())?;
            let right = parse_shape("right", args.right.as_ref())?;
            let coloring = cross_table_coloring(left, right).map_err(construction_err)?;
            let k4 = build_spec(&GadgetSpec::Complete(4))?;
            let census = rainbow_census(&coloring, &k4).map_err(data)?;
            report = Report::new("appendixB");
            report.push("left", left.to_string());
            report.push("right", right.to_string());
            report.push("vertices", coloring.host().vertex_count());
            report.push("edges", coloring.host().edge_count());
            report.push("classes", coloring.class_count());
            report.push("k4_copies", census.total_copies);
            report.push("rainbow_k4", census.rainbow_copies);
            let files = args.out.as_deref().map(|p| write_pair(p, &coloring)).transpose()?;
            report.push_files(files);
        }
        What::ZeroStatement => {
            let n = args.n.ok_or_else(|| {
                CliError::Usage("--n is required for zero-statement".into())
            })?;
            let seed = build_spec(&GadgetSpec::CompleteBipartite(n / 2, n - n / 2))?;
            let structure = match args.input.as_deref() {
                Some(path) => parse_structure(path)?,
                None => ComponentStructure::default(),
            };
            let coloring =
                zero_statement_coloring(&seed, &structure).map_err(construction_err)?;
            let k4 = build_spec(&GadgetSpec::Complete(4))?;
            let census = rainbow_census(&coloring, &k4).map_err(data)?;
            report = Report::new("zero-statement");
            report.push("n", n);
            report.push("components_left", structure.left.len());
            report.push("components_right", structure.right.len());
            report.push("vertices", coloring.host().vertex_count());
            report.push("edges", coloring.host().edge_count());
            report.push("classes", coloring.class_count());
            report.push("k4_copies", census.total_copies);
            report.push("rainbow_k4", census.rainbow_copies);
            let files = args.out.as_deref().map(|p| write_pair(p, &coloring)).transpose()?;
            report.push_files(files);
        }
        What::K5Extract => {
            let input = args.input.as_deref().ok_or_else(|| {
                CliError::Usage("--in COLORING is required for k5-extract".into())
            })?;
            let host = build_spec(&GadgetSpec::TildeK35)?;
            let coloring = read_coloring(&host, input)?;
            let extraction =
                extract_rainbow_k5(&host, &coloring).map_err(construction_err)?;
            report = Report::new("k5-extract");
            report.push("t", extraction.t);
            report.push("vertices", vertex_list(&extraction.copy.vertices));
            let restricted = clique_restriction(&coloring, &extraction.copy)?;
            let files =
                args.out.as_deref().map(|p| write_pair(p, &restricted)).transpose()?;
            report.push_files(files);
        }
        What::K7Assemble => {
            let instance = k7_instance_graph().map_err(construction_err)?;
            if let Some(path) = args.emit_instance.as_deref() {
                write_file(path, &write_graph_text(&instance))?;
            }
            let Some(input) = args.input.as_deref() else {
                // Emitting the instance graph alone is a complete request.
                if args.emit_instance.is_some() {
                    return Ok(0);
                }
                return Err(CliError::Usage(
                    "--in COLORING is required for k7-assemble (or pass --emit-instance)"
                        .into(),
                ));
            };
            let coloring = read_coloring(&instance, input)?;
            let assembly =
                assemble_rainbow_k7(&instance, &coloring).map_err(construction_err)?;
            report = Report::new("k7-assemble");
            report.push("block_index", assembly.block_index);
            report.push("triangle", vertex_list(&assembly.triangle.vertices));
            report.push("k7", vertex_list(&assembly.k7.vertices));
            let restricted = clique_restriction(&coloring, &assembly.k7)?;
            let files =
                args.out.as_deref().map(|p| write_pair(p, &restricted)).transpose()?;
            report.push_files(files);
        }
    }
    report.print(format);
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate / sweep
// ---------------------------------------------------------------------------

fn print_record(record: &ExperimentRecord, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => {
            let line = serde_json::to_string(record)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            println!("{line}");
        }
        Format::Csv => print!("{}", sweep_csv(std::slice::from_ref(record))),
        Format::Text => {
            println!("pattern={}", record.pattern);
            println!("n={}", record.n);
            println!("p={}", record.p);
            println!("trials={}", record.trials);
            println!("successes={}", record.successes);
            println!("failures={}", record.failures);
            println!("indeterminates={}", record.indeterminates);
            println!("estimate={}", record.estimate);
            println!("ci_low={}", record.ci_low);
            println!("ci_high={}", record.ci_high);
            println!("rng_seed={}", record.rng_seed);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    seed_graph: &str,
    pattern: &str,
    p: f64,
    trials: u64,
    rng_seed: u64,
    budget_nodes: Option<u64>,
    out: Option<&Path>,
    threads: usize,
    format: Format,
) -> Result<u8, CliError> {
    let seed_spec = parse_seed_spec(seed_graph)?;
    let pattern = pattern_spec(pattern)?;
    let budget = match budget_nodes {
        Some(n) => SearchBudget::nodes(n),
        None => SearchBudget::unlimited(),
    };
    let record = estimate_arrow_probability_threaded(
        &seed_spec, p, &pattern, trials, rng_seed, budget, threads,
    )
    .map_err(sim_err)?;
    if let Some(path) = out {
        let line = records_jsonl(std::slice::from_ref(&record)).map_err(sim_err)?;
        append_file(path, &line)?;
    }
    print_record(&record, format)?;
    Ok(0)
}

fn append_file(path: &Path, contents: &str) -> Result<(), CliError> {
    use std::io::Write as _;
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Data(format!("opening {}: {e}", path.display())))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| CliError::Data(format!("writing {}: {e}", path.display())))
}

fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("p grid entry {t}: {e}")))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    seed_graph: &str,
    pattern: &str,
    p_grid: &str,
    trials: u64,
    rng_seed: u64,
    budget_nodes: Option<u64>,
    independent: bool,
    out: Option<&Path>,
    records_out: Option<&Path>,
    threads: usize,
    format: Format,
) -> Result<u8, CliError> {
    let seed_spec = parse_seed_spec(seed_graph)?;
    let pattern = pattern_spec(pattern)?;
    let grid = parse_grid(p_grid)?;
    let budget = match budget_nodes {
        Some(n) => SearchBudget::nodes(n),
        None => SearchBudget::unlimited(),
    };
    let mode = if independent {
        SweepMode::Independent
    } else {
        SweepMode::CommonRandomNumbers
    };
    let sweep = threshold_sweep_threaded(
        &seed_spec, &pattern, &grid, trials, rng_seed, budget, mode, threads,
    )
    .map_err(sim_err)?;
    let csv = sweep_csv(&sweep.records);
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    if let Some(path) = records_out {
        write_file(path, &records_jsonl(&sweep.records).map_err(sim_err)?)?;
    }
    match format {
        Format::Json => print!("{}", records_jsonl(&sweep.records).map_err(sim_err)?),
        Format::Text | Format::Csv => print!("{csv}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// janson
// ---------------------------------------------------------------------------

fn to_big(p: Rational) -> BigRational {
    BigRational::new(BigInt::from(*p.numer()), BigInt::from(*p.denom()))
}

fn from_big(r: &BigRational, what: &str) -> Result<Rational, CliError> {
    let numer = r.numer().to_i64();
    let denom = r.denom().to_i64();
    match (numer, denom) {
        (Some(n), Some(d)) => Ok(Rational::new(n, d)),
        _ => Err(CliError::Usage(format!(
            "{what} = {r} does not fit a 64-bit rational; pass --t explicitly"
        ))),
    }
}

fn parse_rational_arg(flag: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e: DensityError| {
        CliError::Usage(format!("--{flag} {s}: {e}"))
    })
}

fn janson_err(e: JansonError) -> CliError {
    match e {
        JansonError::BadProbability(_) | JansonError::BadDeviation { .. } => usage(e),
        JansonError::OverBudget { .. } => usage(e),
        _ => CliError::Data(e.to_string()),
    }
}

fn cmd_janson(
    pattern: &str,
    n: usize,
    p: Option<&str>,
    t: Option<&str>,
    format: Format,
) -> Result<u8, CliError> {
    reject_csv(format, "janson")?;
    if t.is_some() && p.is_none() {
        return Err(CliError::Usage("--t requires --p".into()));
    }
    let spec = pattern_spec(pattern)?;
    let h = build_spec(&spec)?;
    let q = janson_quantities(&h, n, None).map_err(janson_err)?;

    let mut bounds = None;
    if let Some(p_str) = p {
        let p_rat = parse_rational_arg("p", p_str)?;
        let t_rat = match t {
            Some(t_str) => parse_rational_arg("t", t_str)?,
            // Default deviation: the full mean, i.e. the nonexistence case.
            None => from_big(&q.lambda.eval(&to_big(p_rat)), "lambda(p)")?,
        };
        let b = janson_bounds(&q, p_rat, t_rat).map_err(janson_err)?;
        bounds = Some((p_rat, t_rat, b));
    }

    match format {
        Format::Json => {
            let mut json = serde_json::json!({
                "pattern": spec.to_string(),
                "n": q.n,
                "copy_count": q.copy_count,
                "lambda": q.lambda.to_string(),
                "delta_bar": q.delta_bar.to_string(),
                "delta": q.delta.to_string(),
            });
            if let Some((p_rat, t_rat, b)) = &bounds {
                let obj = json.as_object_mut().expect("constructed as an object");
                obj.insert("p".into(), rational_str(*p_rat).into());
                obj.insert("t".into(), rational_str(*t_rat).into());
                obj.insert("lower_tail".into(), b.lower_tail.into());
                obj.insert("nonexistence_mean_gap".into(), b.nonexistence_mean_gap.into());
                obj.insert("nonexistence_ratio".into(), b.nonexistence_ratio.into());
            }
            println!("{json}");
        }
        Format::Text | Format::Csv => {
            println!("pattern={spec}");
            println!("n={}", q.n);
            println!("copy_count={}", q.copy_count);
            println!("lambda={}", q.lambda);
            println!("delta_bar={}", q.delta_bar);
            println!("delta={}", q.delta);
            if let Some((p_rat, t_rat, b)) = &bounds {
                println!("p={}", rational_str(*p_rat));
                println!("t={}", rational_str(*t_rat));
                println!("lower_tail={}", b.lower_tail);
                println!("nonexistence_mean_gap={}", b.nonexistence_mean_gap);
                println!("nonexistence_ratio={}", b.nonexistence_ratio);
            }
        }
    }
    Ok(0)
}
