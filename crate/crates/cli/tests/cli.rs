use std::path::Path;
use std::process::{Command, Output};

fn dpbandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpbandit")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

const CONFIG: &str = r#"
K = 3
T = 3000
num_instances = 2
seed = 11
checkpoints = [100, 1000, 3000]

[[algorithm]]
label = "Dist-DP-SE"
trust = "distributed"
mechanism = "discrete-laplace-polya"
epsilon = 1.0
"#;

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CONFIG);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let run_a = dpbandit(&["simulate", "--config", &config, "--jobs", "1", "--out", a.to_str().unwrap()]);
    assert!(run_a.status.success(), "{}", String::from_utf8_lossy(&run_a.stderr));
    let run_b = dpbandit(&["simulate", "--config", &config, "--jobs", "4", "--out", b.to_str().unwrap()]);
    assert!(run_b.status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().next(), Some("schema=dpbandit.v1"));
    assert_eq!(text.lines().count(), 2 + 2 * 3);

    let to_stdout = dpbandit(&["simulate", "--config", &config]);
    assert_eq!(stdout(&to_stdout), text);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), &format!("{CONFIG}\nunknown_key = 1\n"));
    assert_eq!(dpbandit(&["simulate", "--config", &bad]).status.code(), Some(2));
    let missing = dir.path().join("none.toml");
    assert_eq!(dpbandit(&["simulate", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(dpbandit(&["account", "compose", "--params", "epsilon=2", "delta=1e-6", "k=3"]).status.code(), Some(2));
    assert_eq!(dpbandit(&["noise", "tail", "--mechanism", "polya", "--params", "r=1"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CONFIG);
    let unwritable = dir.path().join("no_such_dir").join("out.csv");
    let out = dpbandit(&["simulate", "--config", &config, "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    // n = 4 is past the exact auditor's limit
    assert_eq!(dpbandit(&["audit", "--epsilon", "1", "--n", "4", "--g", "1"]).status.code(), Some(2));
    let skellam = dpbandit(&["account", "rdp", "--params", "mechanism=skellam", "epsilon=1", "alpha=1.5"]);
    assert_eq!(skellam.status.code(), Some(3));
}

#[test]
fn account_values() {
    let rdp = dpbandit(&["account", "rdp", "--params", "mechanism=skellam", "epsilon=1", "s=1"]);
    assert_eq!(value(&stdout(&rdp), "rdp_alpha_2"), 2.5);
    let dg = dpbandit(&["account", "rdp", "--params", "mechanism=discrete-gaussian", "epsilon=1", "s=1", "T=4"]);
    assert!((value(&stdout(&dg), "cdp_eps") - 1.000129).abs() < 1e-5);
    let comp = dpbandit(&["account", "compose", "--params", "epsilon=0.5", "delta=1e-6", "k=10"]);
    assert!((value(&stdout(&comp), "per_step_eps") - 0.01504).abs() < 1e-5);
    let ret = dpbandit(&["account", "returning", "--params", "B=1", "epsilon=1", "delta=1e-6"]);
    assert!((value(&stdout(&ret), "ratio") - 1e6f64.ln()).abs() < 1e-9);
    let conv = dpbandit(&["account", "convert", "--params", "epsilon=1", "delta=1e-6"]);
    assert!(value(&stdout(&conv), "approx_eps") <= 0.5 + 2.0 * (1e6f64.ln() * 0.5).sqrt());
}

#[test]
fn noise_and_audit() {
    let draws = dpbandit(&["noise", "sample", "--mechanism", "skellam", "--params", "sigma2=4", "count=50", "seed=3"]);
    assert!(draws.status.success());
    let text = stdout(&draws);
    assert_eq!(text.lines().count(), 50);
    assert!(text.lines().all(|l| l.parse::<i64>().is_ok()));
    let again = dpbandit(&["noise", "sample", "--mechanism", "skellam", "--params", "sigma2=4", "count=50", "seed=3"]);
    assert_eq!(stdout(&again), text);

    let tail = dpbandit(&["noise", "tail", "--mechanism", "discrete-laplace", "--params", "b=2", "m=3"]);
    let expected = (-1.5f64).exp() / (0.5f64.exp() + 1.0);
    assert!((value(&stdout(&tail), "tail") - expected).abs() < 1e-15);

    let audit = dpbandit(&["audit", "--epsilon", "0.5", "--n", "3", "--g", "1"]);
    assert!(audit.status.success());
    assert!(value(&stdout(&audit), "max_llr") <= 0.5 + 1e-6);
}
