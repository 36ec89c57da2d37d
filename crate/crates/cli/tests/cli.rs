//! End-to-end runs of the compiled binary: output schemas, anchor values,
//! determinism, and the exit-code policy.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_feynman-checkers"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().skip(2).collect()
}

#[test]
fn amplitudes_emits_schema_header_and_anchor_row() {
    let out = run(&["amplitudes", "--t-max", "3", "--mu", "1", "--mode", "exact"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema: amplitudes-v1"));
    assert_eq!(lines.next(), Some("t,x,a1,a2,P"));
    assert!(text.contains("3,1,5.0000000000000000e-1,-5.0000000000000000e-1,5.0000000000000000e-1"));
}

#[test]
fn amplitudes_at_t1_has_exactly_one_nonzero_row() {
    let out = run(&["amplitudes", "--t-max", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let nonzero: Vec<&str> = data_rows(&text)
        .into_iter()
        .filter(|row| {
            row.split(',')
                .skip(2)
                .any(|cell| cell.parse::<f64>().unwrap() != 0.0)
        })
        .collect();
    assert_eq!(
        nonzero,
        vec!["1,1,0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0"]
    );
}

#[test]
fn probability_slices_sum_to_one() {
    let out = run(&["probabilities", "--t-max", "40", "--mu", "0.7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut sums = std::collections::BTreeMap::new();
    for row in data_rows(&text) {
        let mut cells = row.split(',');
        let t: i64 = cells.next().unwrap().parse().unwrap();
        let p: f64 = cells.nth(1).unwrap().parse().unwrap();
        *sums.entry(t).or_insert(0.0) += p;
    }
    assert_eq!(sums.len(), 40);
    for (t, sum) in sums {
        assert!((sum - 1.0).abs() < 1e-12, "t={t} sum={sum}");
    }
}

#[test]
fn exact_mode_output_is_byte_identical_across_runs() {
    let args = [
        "amplitudes",
        "--t-max",
        "40",
        "--mu",
        "3/4",
        "--mode",
        "exact",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn json_format_carries_schema_and_rows() {
    let out = run(&["probabilities", "--t-max", "2", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(doc["schema"], "probabilities-v1");
    let rows = doc["rows"].as_array().expect("rows array");
    assert_eq!(rows.len(), 2 + 3);
    assert_eq!(rows[1]["t"], 1);
    assert_eq!(rows[1]["x"], 1);
    assert_eq!(rows[1]["P"], 1.0);
}

#[test]
fn reversal_columns_hold_their_identities() {
    let out = run(&["reversal", "--t-max", "60", "--mu", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.starts_with("# schema: reversal-v1\nt,s1_direct,s1_series,limit,scaled_deviation\n")
    );
    for row in data_rows(&text) {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let (s1d, s1s, limit, dev) = (cells[1], cells[2], cells[3], cells[4]);
        assert!((s1d - s1s).abs() < 1e-10);
        assert_eq!(limit, 0.35355339059327373);
        assert!((dev - (s1d - limit).abs() * cells[0].sqrt()).abs() < 1e-15);
    }
}

#[test]
fn reversal_at_mu_zero_never_reverses() {
    let out = run(&["reversal", "--t-max", "20", "--mu", "0"]);
    assert!(out.status.success());
    for row in data_rows(&stdout(&out)) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[1], "0.0000000000000000e0");
        assert_eq!(cells[2], "0.0000000000000000e0");
    }
}

#[test]
fn field_homogeneous_carries_reference_columns() {
    let out = run(&["field", "--t-max", "12"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# schema: field-homogeneous-v1\nt,p_left,even_ref,odd_ref\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 12);
    let cells: Vec<f64> = rows[3].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cells[2] - 3f64.sqrt() / 3.0).abs() < 1e-15);
    assert!((cells[3] - 3f64.sqrt() / 6.0).abs() < 1e-15);
}

#[test]
fn identity_field_matches_reversal_at_mass_one() {
    let field = run(&["field", "--field", "identity", "--t-max", "30"]);
    let reversal = run(&["reversal", "--t-max", "30", "--mu", "1"]);
    assert!(field.status.success() && reversal.status.success());
    let p_left: Vec<f64> = data_rows(&stdout(&field))
        .iter()
        .map(|row| row.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let s1: Vec<f64> = data_rows(&stdout(&reversal))
        .iter()
        .map(|row| row.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for (p, s) in p_left.iter().zip(&s1) {
        assert!((p - s).abs() < 1e-12);
    }
}

#[test]
fn custom_field_file_loads_and_drives_the_walk() {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    writeln!(file, "0.5 1.5 -1").unwrap();
    writeln!(file, "# a comment").unwrap();
    writeln!(file, "-0.5 2.5 -1").unwrap();
    let spec = format!("custom:{}", file.path().display());
    let out = run(&["field", "--field", &spec, "--t-max", "6", "--mode", "exact"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# schema: field-v1\nt,p_left\n"));
    assert_eq!(data_rows(&text).len(), 6);
}

#[test]
fn blattice_exact_and_float_agree() {
    let float = run(&["blattice", "--t-max", "20"]);
    let exact = run(&["blattice", "--t-max", "20", "--mode", "exact"]);
    assert!(float.status.success() && exact.status.success());
    let f = stdout(&float);
    let e = stdout(&exact);
    assert!(f.starts_with("# schema: blattice-v1\nt,q_left,ref_limit\n"));
    assert!(data_rows(&f)[0].starts_with("1,0.0000000000000000e0,"));
    for (rf, re) in data_rows(&f).iter().zip(data_rows(&e)) {
        let qf: f64 = rf.split(',').nth(1).unwrap().parse().unwrap();
        let qe: f64 = re.split(',').nth(1).unwrap().parse().unwrap();
        assert!((qf - qe).abs() < 1e-12);
    }
}

#[test]
fn verify_fast_passes_and_reports_json() {
    let out = run(&["verify", "--fast"]);
    assert!(
        out.status.success(),
        "verify exited {:?}",
        out.status.code()
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let results = doc["results"].as_array().expect("results array");
    assert!(results.len() >= 20);
    for r in results {
        assert!(r["id"].is_string());
        assert!(r["statement"].is_string());
        assert!(r["class"].is_string());
        assert!(r["passed"].is_boolean());
    }
    let summary = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(summary.contains("theorems (0 failed)"));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("table.csv");
    let to_stdout = run(&["blattice", "--t-max", "8"]);
    let to_file = run(&["blattice", "--t-max", "8", "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn validation_failures_exit_one() {
    for args in [
        vec!["amplitudes", "--t-max", "0"],
        vec!["reversal", "--mu", "1.5"],
        vec!["asymptote", "--mu", "1"],
        vec!["asymptote", "--t-max", "3"],
        vec!["amplitudes", "--mu", "x/y"],
        vec!["amplitudes", "--mu", "1/0", "--mode", "exact"],
        vec!["field", "--field", "bogus"],
        vec!["amplitudes", "--no-such-flag"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}");
        assert!(out.stdout.is_empty(), "args {args:?} wrote to stdout");
    }
}

#[test]
fn missing_field_file_exits_three() {
    let out = run(&["field", "--field", "custom:/nonexistent/edges.txt"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("/nonexistent/edges.txt"));
}

#[test]
fn malformed_field_file_exits_one() {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    writeln!(file, "0.5 1.5 7").unwrap();
    let spec = format!("custom:{}", file.path().display());
    let out = run(&["field", "--field", &spec]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    for args in [
        vec!["--help"],
        vec!["--version"],
        vec!["amplitudes", "--help"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "args {args:?}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn asymptote_residuals_stay_bounded() {
    let out = run(&["asymptote", "--mu", "0.5", "--t-max", "400"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# schema: asymptote-v1\nn,t,a1,main_term,scaled_residual\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 400 / 2 - 1);
    for row in rows {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[1], 2.0 * cells[0] + 2.0);
        assert!(
            cells[4] < 1.0,
            "scaled residual {} at n={}",
            cells[4],
            cells[0]
        );
    }
}
