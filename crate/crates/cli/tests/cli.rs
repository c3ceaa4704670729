//! End-to-end tests driving the compiled `rbw` binary: spec-string parsing,
//! exit-code contract, file round trips, and deterministic simulator output.

use std::path::Path;
use std::process::{Command, Output};
use std::str::FromStr;

use rainbow_core::coloring::ProperColoring;
use rainbow_core::constructions::k7_instance_graph;
use rainbow_core::graph::{parse_graph_text, write_graph_text, GadgetSpec, Graph};
use rainbow_core::sim::ExperimentRecord;

fn rbw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbw"))
        .args(args)
        .output()
        .expect("spawning the rbw binary")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn assert_code(output: &Output, expected: i32) {
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout:\n{}\nstderr:\n{}",
        stdout_of(output),
        stderr_of(output)
    );
}

/// Writes the all-distinct coloring (edge index = color) for `g`.
fn fresh_coloring_file(g: &Graph, path: &Path) {
    let assignment: Vec<(usize, usize, u32)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| (u, v, i as u32))
        .collect();
    let coloring = ProperColoring::check_proper(g, &assignment).expect("distinct colors are proper");
    std::fs::write(path, coloring.write_text()).expect("writing coloring fixture");
}

// ---------------------------------------------------------------------------
// gadget / density
// ---------------------------------------------------------------------------

#[test]
fn density_k4_reports_the_known_two_density() {
    let out = rbw(&["density", "K4"]);
    assert_code(&out, 0);
    let stdout = stdout_of(&out);
    assert!(stdout.starts_with("m2=5/2\n"), "unexpected output: {stdout}");
    assert!(stdout.contains("strictly_2_balanced=true"));
}

#[test]
fn density_join_with_bipartition_flag() {
    let out = rbw(&["density", "Kjoin(S3,S4)", "--bip"]);
    assert_code(&out, 0);
    assert!(stdout_of(&out).contains("m_bip2=4/5"));
}

#[test]
fn density_json_output_is_valid_json() {
    let out = rbw(&["density", "K4", "--format", "json"]);
    assert_code(&out, 0);
    let value: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(value["m2"], "5/2");
    assert_eq!(value["strictly_2_balanced"], true);
}

#[test]
fn gadget_writes_the_triangle_star_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let out = rbw(&["gadget", "Kdelta(25,49)", "--out", path.to_str().unwrap()]);
    assert_code(&out, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("graph 1251 2475\n"), "bad header: {}", &text[..40]);
    let parsed = parse_graph_text(&text).unwrap();
    let direct = GadgetSpec::from_str("Kdelta(25,49)").unwrap().build().unwrap();
    assert_eq!(parsed, direct);
    assert_eq!(write_graph_text(&parsed), text);
}

#[test]
fn gadget_without_out_prints_to_stdout() {
    let out = rbw(&["gadget", "C5"]);
    assert_code(&out, 0);
    assert!(stdout_of(&out).starts_with("graph 5 5\n"));
}

// ---------------------------------------------------------------------------
// exit-code contract
// ---------------------------------------------------------------------------

#[test]
fn bad_spec_string_is_a_usage_error() {
    let out = rbw(&["density", "K4x"]);
    assert_code(&out, 64);
    assert!(stderr_of(&out).contains("gadget spec"));
}

#[test]
fn unknown_flag_is_a_usage_error_with_help_text() {
    let out = rbw(&["gadget", "K4", "--frobnicate"]);
    assert_code(&out, 64);
    assert!(stderr_of(&out).contains("--help"));
}

#[test]
fn missing_input_file_is_a_data_error() {
    let out = rbw(&[
        "verify-coloring",
        "--graph",
        "K4",
        "--coloring",
        "/nonexistent/missing.col",
        "--pattern",
        "K3",
    ]);
    assert_code(&out, 65);
}

#[test]
fn csv_format_is_rejected_outside_the_simulator() {
    let out = rbw(&["density", "K4", "--format", "csv"]);
    assert_code(&out, 64);
}

#[test]
fn help_and_version_exit_zero() {
    assert_code(&rbw(&["--help"]), 0);
    assert_code(&rbw(&["--version"]), 0);
}

// ---------------------------------------------------------------------------
// arrow
// ---------------------------------------------------------------------------

#[test]
fn hat_gadget_arrows_k4_with_exit_zero() {
    let out = rbw(&["arrow", "--graph", "Khat(3,4)", "--pattern", "K4"]);
    assert_code(&out, 0);
    assert!(stdout_of(&out).starts_with("verdict=arrowed\n"));
}

#[test]
fn join_of_paths_yields_a_witness_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("w.txt");
    let out = rbw(&[
        "arrow",
        "--graph",
        "Kjoin(P4,P4)",
        "--pattern",
        "K4",
        "--witness",
        witness.to_str().unwrap(),
    ]);
    assert_code(&out, 1);
    assert!(stdout_of(&out).starts_with("verdict=not-arrowed\n"));

    let verify = rbw(&[
        "verify-coloring",
        "--graph",
        "Kjoin(P4,P4)",
        "--coloring",
        witness.to_str().unwrap(),
        "--pattern",
        "K4",
    ]);
    assert_code(&verify, 0);
    let stdout = stdout_of(&verify);
    assert!(stdout.contains("rainbow_copies=0"), "witness admits a rainbow K4:\n{stdout}");
    assert!(stdout.contains("total_copies=9"));
}

#[test]
fn exhausted_budget_exits_two() {
    let out = rbw(&[
        "arrow",
        "--graph",
        "Kjoin(S3,S4)",
        "--pattern",
        "K4",
        "--budget-nodes",
        "50",
    ]);
    assert_code(&out, 2);
    assert!(stdout_of(&out).starts_with("verdict=indeterminate\n"));
}

#[test]
fn arrow_accepts_a_graph_file_for_the_host() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("host.txt");
    assert_code(&rbw(&["gadget", "Khat(3,4)", "--out", path.to_str().unwrap()]), 0);
    let out = rbw(&["arrow", "--graph", path.to_str().unwrap(), "--pattern", "K4"]);
    assert_code(&out, 0);
}

#[test]
fn improper_coloring_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.col");
    // Triangle with two edges sharing vertex 0 given the same color.
    std::fs::write(&path, "0 1 5\n0 2 5\n1 2 6\n").unwrap();
    let out = rbw(&[
        "verify-coloring",
        "--graph",
        "K3",
        "--coloring",
        path.to_str().unwrap(),
        "--pattern",
        "K3",
    ]);
    assert_code(&out, 65);
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

fn verify_pair(prefix: &Path, pattern: &str, expect_rainbow_zero: bool) {
    let graph = format!("{}.graph.txt", prefix.display());
    let coloring = format!("{}.coloring.txt", prefix.display());
    let out = rbw(&[
        "verify-coloring",
        "--graph",
        &graph,
        "--coloring",
        &coloring,
        "--pattern",
        pattern,
    ]);
    assert_code(&out, 0);
    let stdout = stdout_of(&out);
    if expect_rainbow_zero {
        assert!(stdout.contains("rainbow_copies=0"), "{stdout}");
    } else {
        assert!(stdout.contains("non_rainbow_copies=0"), "{stdout}");
    }
}

#[test]
fn construct_cross_table_coloring_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("ab");
    let out = rbw(&[
        "construct",
        "--what",
        "appendixB",
        "--left",
        "S3",
        "--right",
        "P4",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("rainbow_k4=0"), "{stdout}");
    verify_pair(&prefix, "K4", true);
}

#[test]
fn construct_cross_table_requires_both_shapes() {
    let out = rbw(&["construct", "--what", "appendixB", "--left", "S3"]);
    assert_code(&out, 64);
}

#[test]
fn construct_zero_statement_with_structure_file() {
    let dir = tempfile::tempdir().unwrap();
    let structure = dir.path().join("structure.txt");
    std::fs::write(&structure, "# sparse part\nleft P3 0 1 2\nright K2 10 11\n").unwrap();
    let prefix = dir.path().join("zs");
    let out = rbw(&[
        "construct",
        "--what",
        "zero-statement",
        "--n",
        "20",
        "--in",
        structure.to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert!(stdout_of(&out).contains("rainbow_k4=0"));
    verify_pair(&prefix, "K4", true);
}

#[test]
fn construct_zero_statement_rejects_overlapping_components() {
    let dir = tempfile::tempdir().unwrap();
    let structure = dir.path().join("structure.txt");
    std::fs::write(&structure, "left P3 0 1 2\nleft K2 2 3\n").unwrap();
    let out = rbw(&[
        "construct",
        "--what",
        "zero-statement",
        "--n",
        "20",
        "--in",
        structure.to_str().unwrap(),
    ]);
    assert_code(&out, 65);
}

#[test]
fn construct_k5_extract_from_a_fresh_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let coloring = dir.path().join("kt.col");
    let host = GadgetSpec::from_str("Ktilde35").unwrap().build().unwrap();
    fresh_coloring_file(&host, &coloring);
    let prefix = dir.path().join("k5");
    let out = rbw(&[
        "construct",
        "--what",
        "k5-extract",
        "--in",
        coloring.to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("t=2"), "{stdout}");
    assert!(stdout.contains("vertices=0 1 2 3 4"), "{stdout}");
    // The extracted clique coloring must itself be rainbow.
    verify_pair(&prefix, "K5", false);
}

#[test]
fn construct_k5_extract_skips_a_clashing_star_edge() {
    let dir = tempfile::tempdir().unwrap();
    let coloring_path = dir.path().join("kt.col");
    let host = GadgetSpec::from_str("Ktilde35").unwrap().build().unwrap();
    // All-distinct except the first star edge (3,4), recolored like the
    // disjoint triangle edge (0,1): the extractor must move to t=3.
    let clash_color = host.edge_index(0, 1).unwrap() as u32;
    let assignment: Vec<(usize, usize, u32)> = host
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| {
            let c = if (u, v) == (3, 4) { clash_color } else { i as u32 };
            (u, v, c)
        })
        .collect();
    let coloring = ProperColoring::check_proper(&host, &assignment).unwrap();
    std::fs::write(&coloring_path, coloring.write_text()).unwrap();
    let out = rbw(&[
        "construct",
        "--what",
        "k5-extract",
        "--in",
        coloring_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("t=3"), "{stdout}");
    assert!(stdout.contains("vertices=0 1 2 3 5"), "{stdout}");
}

#[test]
fn construct_k7_assemble_from_a_fresh_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let instance_path = dir.path().join("instance.txt");
    let emit = rbw(&[
        "construct",
        "--what",
        "k7-assemble",
        "--emit-instance",
        instance_path.to_str().unwrap(),
    ]);
    assert_code(&emit, 0);
    let text = std::fs::read_to_string(&instance_path).unwrap();
    assert!(text.starts_with("graph 1267 22515\n"));
    assert_eq!(parse_graph_text(&text).unwrap(), k7_instance_graph().unwrap());

    let coloring = dir.path().join("inst.col");
    fresh_coloring_file(&k7_instance_graph().unwrap(), &coloring);
    let prefix = dir.path().join("k7");
    let out = rbw(&[
        "construct",
        "--what",
        "k7-assemble",
        "--in",
        coloring.to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("block_index=0"), "{stdout}");
    assert!(stdout.contains("k7=0 1 2 3 "), "{stdout}");
    verify_pair(&prefix, "K7", false);
}

// ---------------------------------------------------------------------------
// simulate / sweep
// ---------------------------------------------------------------------------

#[test]
fn simulate_output_is_seed_determined_and_thread_invariant() {
    let args = |threads: &str| {
        vec![
            "simulate".to_string(),
            "--seed-graph".into(),
            "half:4".into(),
            "--pattern".into(),
            "K3".into(),
            "--p".into(),
            "0.3".into(),
            "--trials".into(),
            "300".into(),
            "--rng-seed".into(),
            "11".into(),
            "--format".into(),
            "json".into(),
            "--threads".into(),
            threads.into(),
        ]
    };
    let run = |threads: &str| {
        let owned = args(threads);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        let out = rbw(&refs);
        assert_code(&out, 0);
        stdout_of(&out)
    };
    let first = run("1");
    assert_eq!(first, run("1"), "same seed must give byte-equal output");
    assert_eq!(first, run("4"), "thread count must not change output");
    let record: ExperimentRecord = serde_json::from_str(first.trim()).unwrap();
    assert_eq!(record.trials, 300);
    assert_eq!(record.rng_seed, 11);
    assert_eq!(record.pattern, "K3");
}

#[test]
fn simulate_appends_a_record_line() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("runs.jsonl");
    for _ in 0..2 {
        let out = rbw(&[
            "simulate", "--seed-graph", "half:4", "--pattern", "K3", "--p", "0.5",
            "--trials", "50", "--rng-seed", "1", "--out", log.to_str().unwrap(),
        ]);
        assert_code(&out, 0);
    }
    let text = std::fs::read_to_string(&log).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "two runs must append two records");
    for line in lines {
        let record: ExperimentRecord = serde_json::from_str(line).unwrap();
        assert_eq!(record.trials, 50);
    }
}

#[test]
fn sweep_csv_has_exact_endpoints_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let records_path = dir.path().join("sweep.jsonl");
    let out = rbw(&[
        "sweep",
        "--seed-graph",
        "half:6",
        "--pattern",
        "K3",
        "--p-grid",
        "0.0,0.5,1.0",
        "--trials",
        "80",
        "--rng-seed",
        "2",
        "--out",
        csv_path.to_str().unwrap(),
        "--records",
        records_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(stdout_of(&out), csv, "stdout and --out must agree");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,trials,decided,successes,indeterminates,estimate,ci_low,ci_high"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("0,80,80,0,"), "p=0 must never arrow: {}", rows[0]);
    assert!(rows[2].starts_with("1,80,80,80,"), "p=1 must always arrow: {}", rows[2]);
    let jsonl = std::fs::read_to_string(&records_path).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
}

#[test]
fn sweep_rejects_a_descending_grid() {
    let out = rbw(&[
        "sweep", "--seed-graph", "half:4", "--pattern", "K3", "--p-grid", "0.5,0.1",
        "--trials", "10",
    ]);
    assert_code(&out, 64);
}

#[test]
fn bad_seed_grammar_is_a_usage_error() {
    let out = rbw(&[
        "simulate", "--seed-graph", "half:x", "--pattern", "K3", "--p", "0.5",
    ]);
    assert_code(&out, 64);
    let out = rbw(&[
        "simulate", "--seed-graph", "no/such/file.txt", "--pattern", "K3", "--p", "0.5",
    ]);
    assert_code(&out, 64);
}

#[test]
fn random_seed_grammar_is_accepted() {
    let out = rbw(&[
        "simulate", "--seed-graph", "random:8:0.9", "--pattern", "K3", "--p", "1.0",
        "--trials", "20", "--rng-seed", "3",
    ]);
    assert_code(&out, 0);
    assert!(stdout_of(&out).contains("estimate=1"));
}

// ---------------------------------------------------------------------------
// janson
// ---------------------------------------------------------------------------

#[test]
fn janson_reports_triangle_polynomials() {
    let out = rbw(&["janson", "--pattern", "K3", "--n", "5"]);
    assert_code(&out, 0);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("copy_count=10"), "{stdout}");
    assert!(stdout.contains("lambda=10*p^3"), "{stdout}");
}

#[test]
fn janson_bounds_default_to_the_nonexistence_deviation() {
    let out = rbw(&["janson", "--pattern", "K3", "--n", "5", "--p", "1", "--format", "json"]);
    assert_code(&out, 0);
    let value: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(value["t"], "10", "default t must equal lambda(1)");
    let lower = value["lower_tail"].as_f64().unwrap();
    assert!(lower > 0.0 && lower <= 1.0);
}

#[test]
fn janson_t_without_p_is_a_usage_error() {
    let out = rbw(&["janson", "--pattern", "K3", "--n", "5", "--t", "1"]);
    assert_code(&out, 64);
}
