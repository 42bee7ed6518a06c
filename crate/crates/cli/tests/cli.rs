use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superteach"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text.trim()).unwrap()
}

fn gen_file(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let file = path(dir, name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &file]);
    ok(&full);
    file
}

#[test]
fn gen_writes_reproducible_csv() {
    let dir = TempDir::new().unwrap();
    let a = gen_file(&dir, "a.csv", &["--task", "margin1d", "--n", "16", "--seed", "4"]);
    let b = gen_file(&dir, "b.csv", &["--task", "margin1d", "--n", "16", "--seed", "4"]);
    let text = fs::read_to_string(&a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x0,y");
    assert_eq!(lines.len(), 17);
    assert!(lines[1..].iter().all(|l| l.ends_with(",1") || l.ends_with(",-1")));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = gen_file(&dir, "c.csv", &["--task", "margin1d", "--n", "16", "--seed", "5"]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn gen_vector_and_unlabeled_headers() {
    let header = |args: &[&str]| {
        let mut full = vec!["gen"];
        full.extend_from_slice(args);
        ok(&full).lines().next().unwrap().to_string()
    };
    assert_eq!(header(&["--task", "linreg", "--n", "3", "--d", "3"]), "x0,x1,x2,y");
    assert_eq!(header(&["--task", "halfspace", "--n", "3"]), "x0,x1,y");
    assert_eq!(header(&["--task", "gauss1d", "--n", "3"]), "x0");
    assert_eq!(header(&["--task", "interval", "--n", "3"]), "x0");
}

#[test]
fn gen_rejects_bad_arguments() {
    assert_eq!(code(&["gen", "--task", "gauss1d", "--n", "0"]), 1);
    assert_eq!(code(&["gen", "--task", "nonsense", "--n", "4"]), 1);
    assert_eq!(code(&["gen", "--task", "gauss1d", "--n", "4", "--d", "2"]), 1);
    assert_eq!(
        code(&["gen", "--task", "linreg", "--n", "4", "--theta-star", "1,2,3"]),
        1
    );
    assert_eq!(code(&["gen", "--task", "consistent", "--n", "4", "--domain", "5,1"]), 1);
    assert_eq!(code(&["gen", "--n", "4"]), 1);
}

#[test]
fn teach_single_item_and_most_symmetric() {
    let dir = TempDir::new().unwrap();
    let gauss = gen_file(&dir, "g.csv", &["--task", "gauss1d", "--n", "16", "--seed", "1"]);
    let out = json(&ok(&[
        "teach",
        "--task",
        "gauss1d",
        "--in",
        &gauss,
        "--teacher",
        "bk",
        "--k",
        "1",
    ]));
    assert_eq!(out["indices"].as_array().unwrap().len(), 1);
    assert!(out["risk_subset"].as_f64().unwrap() <= out["risk_full"].as_f64().unwrap());
    assert_eq!(out["evaluations"], 16);

    let margin = gen_file(&dir, "m.csv", &["--task", "margin1d", "--n", "16", "--seed", "2"]);
    let out = json(&ok(&[
        "teach",
        "--task",
        "margin1d",
        "--in",
        &margin,
        "--teacher",
        "bms",
    ]));
    let k = out["indices"].as_array().unwrap().len();
    assert!((1..=2).contains(&k));
    assert!(out["risk_subset"].as_f64().unwrap() <= out["risk_full"].as_f64().unwrap());
}

#[test]
fn teach_search_writes_plot_files() {
    let dir = TempDir::new().unwrap();
    let data = gen_file(&dir, "lr.csv", &["--task", "linreg", "--n", "10", "--seed", "3"]);
    let prefix = path(&dir, "plot");
    let result = path(&dir, "result.json");
    ok(&[
        "teach",
        "--task",
        "linreg",
        "--in",
        &data,
        "--teacher",
        "search",
        "--strategy",
        "exhaustive",
        "--out",
        &result,
        "--emit-plot",
        &prefix,
    ]);
    let out = json(&fs::read_to_string(&result).unwrap());
    assert_eq!(out["evaluations"], 1 << 10);
    let ratio = out["ratio"].as_f64().unwrap();
    assert!(ratio <= 1.0);

    let points = fs::read_to_string(format!("{prefix}_points.csv")).unwrap();
    assert!(points.starts_with("x0,x1,y,selected\n"));
    let selected = points.lines().skip(1).filter(|l| l.ends_with(",1")).count();
    assert_eq!(selected, out["indices"].as_array().unwrap().len());
    let lines = fs::read_to_string(format!("{prefix}_lines.csv")).unwrap();
    let names: Vec<&str> = lines.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["line", "full", "subset", "target"]);
}

#[test]
fn teach_reports_usage_errors() {
    let dir = TempDir::new().unwrap();
    let big = gen_file(&dir, "big.csv", &["--task", "linreg", "--n", "30", "--seed", "4"]);
    let out = run(&[
        "teach",
        "--task",
        "linreg",
        "--in",
        &big,
        "--teacher",
        "search",
        "--strategy",
        "exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));

    let gauss = gen_file(&dir, "g.csv", &["--task", "gauss1d", "--n", "5"]);
    assert_eq!(
        code(&["teach", "--task", "linreg", "--in", &gauss, "--teacher", "identity"]),
        1
    );
    assert_eq!(
        code(&["teach", "--task", "gauss1d", "--in", &gauss, "--teacher", "bk"]),
        1
    );
    assert_eq!(
        code(&["teach", "--task", "gauss1d", "--in", &gauss, "--teacher", "bms"]),
        1
    );
    assert_eq!(
        code(&["teach", "--task", "gauss1d", "--in", &gauss, "--teacher", "unknown"]),
        1
    );
    let missing = path(&dir, "missing.csv");
    assert_eq!(
        code(&["teach", "--task", "gauss1d", "--in", &missing, "--teacher", "identity"]),
        1
    );
    let garbled = path(&dir, "garbled.csv");
    fs::write(&garbled, "a,b\n1,2\n").unwrap();
    assert_eq!(
        code(&["teach", "--task", "gauss1d", "--in", &garbled, "--teacher", "identity"]),
        1
    );
}

fn experiment(dir: &TempDir, name: &str, extra: &[&str]) -> (String, String) {
    let results = path(dir, &format!("{name}.csv"));
    let medians = path(dir, &format!("{name}_medians.csv"));
    let mut args = vec!["experiment", "--out", &results, "--medians", &medians, "--omit-timing"];
    args.extend_from_slice(extra);
    ok(&args);
    (
        fs::read_to_string(&results).unwrap(),
        fs::read_to_string(&medians).unwrap(),
    )
}

#[test]
fn identity_experiment_has_unit_ratios() {
    let dir = TempDir::new().unwrap();
    let args = [
        "--task",
        "gauss1d",
        "--teacher",
        "identity",
        "--n-list",
        "4,8",
        "--trials",
        "5",
        "--seed",
        "9",
    ];
    let (results, medians) = experiment(&dir, "a", &args);
    let mut reader = csv::Reader::from_reader(results.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[..3], ["task", "teacher", "n"]);
    let ratio_col = header.iter().position(|h| h == "ratio").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[ratio_col].parse::<f64>().unwrap() == 1.0));
    assert!(medians.starts_with("n_or_d,median_ratio,median_subset_fraction,median_time_s\n"));
    assert_eq!(medians.lines().count(), 3);

    let (again, medians_again) = experiment(&dir, "b", &args);
    assert_eq!(results, again);
    assert_eq!(medians, medians_again);
}

#[test]
fn dimension_sweep_and_jobs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let base = [
        "--task",
        "halfspace",
        "--teacher",
        "search",
        "--strategy",
        "greedy",
        "--n",
        "8",
        "--d-list",
        "2,3",
    ];
    let (a, medians) = experiment(&dir, "a", &[&base[..], &["--trials", "3", "--jobs", "1"]].concat());
    let (b, _) = experiment(&dir, "b", &[&base[..], &["--trials", "3", "--jobs", "2"]].concat());
    assert_eq!(a, b);
    let keys: Vec<&str> = medians.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(keys, ["2", "3"]);

    assert_eq!(
        code(&[
            "experiment",
            "--task",
            "halfspace",
            "--teacher",
            "identity",
            "--d-list",
            "2,3"
        ]),
        1
    );
    assert_eq!(code(&["experiment", "--task", "gauss1d", "--teacher", "identity"]), 1);
    assert_eq!(
        code(&[
            "experiment",
            "--task",
            "gauss1d",
            "--teacher",
            "identity",
            "--n-list",
            "8,4"
        ]),
        1
    );
}

fn write_rates(dir: &TempDir, rows: &[(usize, f64, f64)]) -> String {
    let file = path(dir, "rates.csv");
    let mut text = String::from("task,n,risk_full,risk_subset\n");
    for (n, full, subset) in rows {
        text.push_str(&format!("x,{n},{full:e},{subset:e}\n"));
    }
    fs::write(&file, text).unwrap();
    file
}

#[test]
fn rates_recovers_exact_power_laws() {
    let dir = TempDir::new().unwrap();
    let rows: Vec<(usize, f64, f64)> = [10usize, 20, 40, 80, 160]
        .iter()
        .map(|&n| (n, 3.0 / n as f64, 1.0 / (n * n) as f64))
        .collect();
    let out = json(&ok(&["rates", "--in", &write_rates(&dir, &rows)]));
    assert!((out["risk_full"]["slope"].as_f64().unwrap() + 1.0).abs() <= 1e-9);
    assert!((out["risk_subset"]["slope"].as_f64().unwrap() + 2.0).abs() <= 1e-9);
    assert!((out["risk_full"]["intercept"].as_f64().unwrap() - 3f64.ln()).abs() <= 1e-9);

    let flat: Vec<(usize, f64, f64)> = [10usize, 20, 40].iter().map(|&n| (n, 0.25, 0.5)).collect();
    let out = json(&ok(&["rates", "--in", &write_rates(&dir, &flat)]));
    assert_eq!(out["risk_full"]["slope"].as_f64().unwrap(), 0.0);
    assert_eq!(out["risk_subset"]["slope"].as_f64().unwrap(), 0.0);
}

#[test]
fn rates_rejects_unusable_input() {
    let dir = TempDir::new().unwrap();
    let two = write_rates(&dir, &[(10, 0.1, 0.01), (20, 0.05, 0.002)]);
    assert_eq!(code(&["rates", "--in", &two]), 1);
    let file = path(&dir, "nocol.csv");
    fs::write(&file, "n,risk_full\n10,0.1\n20,0.05\n40,0.025\n").unwrap();
    assert_eq!(code(&["rates", "--in", &file]), 1);
    assert!(!Path::new(&path(&dir, "absent.csv")).exists());
    assert_eq!(code(&["rates", "--in", &path(&dir, "absent.csv")]), 1);
}

#[test]
fn experiment_output_feeds_rates() {
    let dir = TempDir::new().unwrap();
    let (results, _) = experiment(
        &dir,
        "m",
        &[
            "--task",
            "margin1d",
            "--teacher",
            "bms",
            "--n-list",
            "16,64,256",
            "--trials",
            "15",
            "--seed",
            "2",
        ],
    );
    let file = path(&dir, "m.csv");
    assert!(!results.is_empty());
    let out = json(&ok(&["rates", "--in", &file]));
    assert_eq!(out["points"], 3);
    assert!(out["risk_subset"]["slope"].as_f64().unwrap() < out["risk_full"]["slope"].as_f64().unwrap());
}

#[test]
fn tail_matches_closed_form() {
    let out = json(&ok(&[
        "tail", "--n", "2", "--eps", "0.5", "--trials", "100000", "--seed", "1",
    ]));
    assert_eq!(out["exact"].as_f64().unwrap(), 0.5);
    assert_eq!(out["pass"], true);

    let out = json(&ok(&["tail", "--n", "5", "--eps", "1", "--trials", "1000"]));
    assert_eq!(out["exact"].as_f64().unwrap(), 0.0);
    assert_eq!(out["estimate"].as_f64().unwrap(), 0.0);
    assert_eq!(out["pass"], true);

    assert_eq!(code(&["tail", "--n", "5", "--eps", "1.5"]), 1);
    assert_eq!(code(&["tail", "--n", "5", "--eps", "-0.1"]), 1);
    assert_eq!(code(&["tail", "--n", "5", "--eps", "0.5", "--trials", "0"]), 1);
}

#[test]
fn help_and_unknown_commands() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&[]), 1);
}
