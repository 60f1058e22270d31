use std::path::Path;
use std::process::Command;

use tempfile::TempDir;
use tvprox_bench::config::ExperimentConfig;
use tvprox_bench::experiment::run_experiment;
use tvprox_bench::trace_csv::TraceTable;

const SMALL: &str = r#"
[problem]
generator = "quadratic-box"
dimension = 3
horizon = 100
mu = 0.5
lipschitz = 2.0
seed = 1
drift = { kind = "random-walk", step = 0.05 }

[solver]
step_size = 0.5
seed = 2

[gradient]
model = "bounded-noise"
level = 0.1

[prox]
mode = "perturbed"
eps = 0.02
"#;

fn bench(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tvprox-bench"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_one_row_per_step_and_exits_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = tmp.path().join("run");
    let (code, stdout, stderr) = bench(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert!(text.starts_with("k,x_0,x_1,x_2,y_0,y_1,y_2,err_norm_e,eps_k,eps_gap,f_xk,track_err,run_avg,regret,rhs_"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["exit_code"], 0);
    assert_eq!(summary["runs"][0]["steps"], 100);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let mut traces = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let (code, _, stderr) = bench(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"]);
        assert_eq!(code, 0, "{stderr}");
        traces.push(std::fs::read(out.join("trace.csv")).unwrap());
    }
    assert_eq!(traces[0], traces[1]);

    // A different seed changes the trace.
    let out = tmp.path().join("c");
    bench(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "77", "--quiet"]);
    assert_ne!(traces[0], std::fs::read(out.join("trace.csv")).unwrap());
}

#[test]
fn trace_round_trips_through_the_parser() {
    let cfg = ExperimentConfig::from_toml(SMALL).unwrap();
    let outcome = run_experiment(&cfg).unwrap();
    let table = outcome.inexact.table();
    let text = table.to_csv_string();
    let back = TraceTable::parse(&text).unwrap();
    assert_eq!(back, table);
    assert_eq!(back.to_csv_string(), text);
}

#[test]
fn configuration_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let unknown = write_config(tmp.path(), "bad.toml", &format!("{SMALL}\n[extra]\nfoo = 1\n"));
    assert_eq!(bench(&["run", "--config", &unknown, "--quiet"]).0, 2);
    let bad_step = write_config(tmp.path(), "step.toml", &SMALL.replace("step_size = 0.5", "step_size = -1.0"));
    assert_eq!(bench(&["run", "--config", &bad_step, "--quiet"]).0, 2);
    assert_eq!(bench(&["run", "--quiet"]).0, 2);
}

#[test]
fn runtime_errors_exit_three() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let missing = tmp.path().join("missing.csv");
    assert_eq!(bench(&["bounds", "--config", &cfg, "--trace", missing.to_str().unwrap(), "--quiet"]).0, 3);
    let garbage = write_config(tmp.path(), "garbage.csv", "k,x_0\n1,abc\n");
    assert_eq!(bench(&["bounds", "--config", &cfg, "--trace", &garbage, "--quiet"]).0, 3);
}

#[test]
fn bounds_subcommand_reproduces_and_detects_violations() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = tmp.path().join("run");
    assert_eq!(bench(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"]).0, 0);
    let trace = out.join("trace.csv");
    let (code, stdout, stderr) = bench(&["bounds", "--config", &cfg, "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert!(!stdout.is_empty());

    // Move one iterate to a far corner of the box while keeping its recorded
    // precision: the per-step tracking bound must now fail.
    let mut table = TraceTable::read_file(&trace).unwrap();
    let row = &mut table.rows[60].record;
    row.x = row.x.iter().map(|&v| if v < 0.5 { 1.0 } else { 0.0 }).collect();
    let tampered = tmp.path().join("tampered.csv");
    table.write_file(&tampered).unwrap();
    let (code, _, _) = bench(&["bounds", "--config", &cfg, "--trace", tampered.to_str().unwrap(), "--quiet"]);
    assert_eq!(code, 1);
}

#[test]
fn make_problem_emits_a_loadable_problem_section() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let (code, stdout, _) = bench(&["make-problem", "--config", &cfg]);
    assert_eq!(code, 0);
    assert!(stdout.contains("generator = \"quadratic-box\""));
    let rest = SMALL.split("[solver]").nth(1).unwrap();
    let rebuilt = ExperimentConfig::from_toml(&format!("{stdout}\n[solver]{rest}")).unwrap();
    assert_eq!(rebuilt.problem, ExperimentConfig::from_toml(SMALL).unwrap().problem);
}

#[test]
fn sweep_writes_one_directory_per_grid_point() {
    let tmp = TempDir::new().unwrap();
    let text = format!("{}\n[sweep]\nseeds = [1, 2]\neps = [0.0, 0.05]\n", SMALL.replace("horizon = 100", "horizon = 20"));
    let cfg = write_config(tmp.path(), "sweep.toml", &text);
    let out = tmp.path().join("sweep");
    let (code, stdout, stderr) = bench(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert_eq!(stdout.lines().count(), 4);
    let dirs = std::fs::read_dir(&out).unwrap().count();
    assert_eq!(dirs, 4);
}
