use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn cscap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cscap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Leading number of the `key: value` line.
fn field(out: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    let line = out
        .lines()
        .find(|l| l.starts_with(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in\n{out}"));
    line[prefix.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn capacity_of_run_length_and_binary_systems() {
    let o = cscap(&["capacity", "--jk", "2", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((field(&stdout(&o), "capacity") - 0.4812).abs() < 1e-4);

    let o = cscap(&["capacity", "--jk", "2", "2", "--units", "bits"]);
    let out = stdout(&o);
    assert!((field(&out, "capacity") - 0.6942).abs() < 1e-4);
    assert!(out.contains("bits"));

    let o = cscap(&["capacity", "--system", &data("sbin.cs")]);
    assert!((field(&stdout(&o), "capacity") - std::f64::consts::LN_2).abs() < 1e-9);

    let o = cscap(&["capacity", "--jk", "1", "1"]);
    assert!(field(&stdout(&o), "capacity").abs() < 1e-11);
}

#[test]
fn system_choice_is_exclusive_and_required() {
    assert_eq!(cscap(&["capacity"]).status.code(), Some(1));
    let o = cscap(&["capacity", "--jk", "1", "1", "--system", &data("sbin.cs")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        cscap(&["capacity", "--jk", "0", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(cscap(&["--help"]).status.code(), Some(0));
}

#[test]
fn syntax_errors_report_a_position() {
    let dir = std::env::temp_dir().join("cscap-cli-syntax");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.cs");
    std::fs::write(&path, "sym a=1;\nexpr: (a|b)*;\n").unwrap();
    let o = cscap(&["capacity", "--system", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`b`") && err.contains("2:"), "{err}");
}

#[test]
fn spectrum_estimates_and_export() {
    let dir = std::env::temp_dir().join("cscap-cli-spectrum");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("sbin.txt");
    let o = cscap(&[
        "spectrum",
        "--system",
        &data("sbin.cs"),
        "--max-weight",
        "12",
        "--output",
        file.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!((field(&out, "c0_estimate") - std::f64::consts::LN_2).abs() < 1e-12);
    assert!(out.contains("density: satisfied"));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.contains("# horizon 12"));
    assert!(text.lines().any(|l| l == "12 4096 8190"));

    let o = cscap(&["spectrum", "--jk", "1", "1", "--max-weight", "12"]);
    let out = stdout(&o);
    assert!(field(&out, "c0_estimate") < 0.06);
    assert!(field(&out, "capacity_estimate") < 0.3);
}

#[test]
fn exhausted_budget_has_its_own_exit_code() {
    let o = cscap(&[
        "spectrum",
        "--system",
        &data("sbin.cs"),
        "--max-weight",
        "14",
        "--max-strings",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("complete: false"));
}

#[test]
fn crosscheck_flags_ambiguity() {
    let o = cscap(&[
        "crosscheck",
        "--system",
        &data("ambiguous.cs"),
        "--max-weight",
        "30",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict: AMBIGUOUS"));

    let o = cscap(&["crosscheck", "--jk", "2", "2", "--max-weight", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: CONSISTENT"));
}

#[test]
fn validate_pitfall_process() {
    let o = cscap(&[
        "validate",
        "--system",
        &data("sbin.cs"),
        "--pmf",
        &data("pitfall.pmf"),
        "--depth",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict: INVALID overlap levels=1,2 witness=01"));

    let o = cscap(&[
        "validate",
        "--system",
        &data("sbin.cs"),
        "--pmf",
        &data("pitfall-truncated.pmf"),
        "--depth",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verdict: VALID depth=4"));
    assert!(out.contains("level_sizes: 2,4,8,16"));
}

#[test]
fn validate_source_levels() {
    let o = cscap(&[
        "validate",
        "--system",
        &data("sbin.cs"),
        "--source-level",
        &data("pitfall-level1.support"),
        "--source-level",
        &data("pitfall-level2.support"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("witness=01"));

    let o = cscap(&[
        "validate",
        "--system",
        &data("sbin.cs"),
        "--source-level",
        &data("empty.support"),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn maxentropic_phrase_process_round_trip() {
    let dir = std::env::temp_dir().join("cscap-cli-maxent");
    std::fs::create_dir_all(&dir).unwrap();
    let pmf = dir.join("jk22.pmf");
    let o = cscap(&[
        "maxent",
        "--jk",
        "2",
        "2",
        "--output",
        pmf.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!((field(&out, "rate") - field(&out, "capacity")).abs() < 2e-12);

    let o = cscap(&[
        "validate",
        "--jk",
        "2",
        "2",
        "--pmf",
        pmf.to_str().unwrap(),
        "--depth",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verdict: VALID depth=3"));
    assert!(field(&out, "rate_bound") <= field(&out, "capacity") + 2e-12);

    let o = cscap(&[
        "validate",
        "--jk",
        "3",
        "3",
        "--pmf",
        pmf.to_str().unwrap(),
        "--depth",
        "8",
        "--max-tuples",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("partial"));
}

#[test]
fn simulation_is_reproducible() {
    let args = [
        "simulate",
        "--jk",
        "2",
        "2",
        "--blocks",
        "20000",
        "--seed",
        "5",
        "--replicas",
        "2",
    ];
    let a = cscap(&args);
    let b = cscap(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(out.contains("5 0.48"));
    assert!(out.lines().filter(|l| l.ends_with(" true")).count() == 2);
}

#[test]
fn jk_table_shape() {
    let o = cscap(&["jk-table", "--j-max", "5", "--k-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('j'))
        .map(|l| l.split('\t').skip(1).map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], 0.0);
    for j in 0..5 {
        for k in 0..5 {
            assert_eq!(rows[j][k], rows[k][j]);
            if k > 0 {
                assert!(rows[j][k] >= rows[j][k - 1]);
            }
        }
    }
    assert_eq!(cscap(&["jk-table", "--j-max", "65"]).status.code(), Some(1));
}
