use std::path::Path;
use std::process::{Command, Output};

fn iad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_is_deterministic_per_seed() {
    let a = iad(&[
        "generate", "--kind", "er", "--n", "15", "--p", "0.3", "--seed", "7",
    ]);
    let b = iad(&[
        "generate", "--kind", "er", "--n", "15", "--p", "0.3", "--seed", "7",
    ]);
    let c = iad(&[
        "generate", "--kind", "er", "--n", "15", "--p", "0.3", "--seed", "8",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("source,target,rating\n"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",-1")).count(), 1);
}

#[test]
fn census_and_identify_read_generated_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    let part = dir.path().join("roles.csv");
    let out = iad(&[
        "generate",
        "--kind",
        "planted",
        "--n-honest",
        "6",
        "--n-cheaters",
        "3",
        "--honest",
        "random:3,coverage",
        "--cheater",
        "mixed:0.3:0.2",
        "--seed",
        "1",
        "--output",
        path(&g),
        "--partition",
        path(&part),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let census = iad(&["census", "--input", path(&g)]);
    assert!(census.status.success());
    let text = String::from_utf8(census.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# ")));
    assert!(text.contains("1a"));
    assert_eq!(
        iad(&["census", "--input", path(&g)]).stdout,
        text.as_bytes()
    );

    let roles = std::fs::read_to_string(&part).unwrap();
    let honest: Vec<String> = roles
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",honest"))
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(honest.len(), 6);

    // Two disjoint honest accusers per cheater: the largest self-consistent
    // set is exactly the honest set.
    let id = iad(&[
        "identify",
        "--input",
        path(&g),
        "--strategy",
        "self-consistent",
    ]);
    assert!(id.status.success());
    let text = String::from_utf8(id.stdout).unwrap();
    let credible: Vec<String> = text
        .lines()
        .filter(|l| l.ends_with(",credible_h"))
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    let mut want = honest.clone();
    want.sort_by_key(|s| s.parse::<usize>().unwrap());
    let mut got = credible;
    got.sort_by_key(|s| s.parse::<usize>().unwrap());
    assert_eq!(got, want);
}

#[test]
fn simulate_writes_trajectory_and_final_graph() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("t.csv");
    let last = dir.path().join("last.csv");
    let args = [
        "simulate",
        "--n",
        "20",
        "--p",
        "0.3",
        "--steps",
        "400",
        "--seed",
        "3",
        "--output",
        path(&traj),
        "--final-graph",
        path(&last),
    ];
    assert!(iad(&args).status.success());
    let first = std::fs::read_to_string(&traj).unwrap();
    assert!(iad(&args).status.success());
    assert_eq!(std::fs::read_to_string(&traj).unwrap(), first);
    assert!(first.contains("step"));
    assert!(std::fs::read_to_string(&last)
        .unwrap()
        .starts_with("source,target,rating"));
}

#[test]
fn sweep_is_deterministic() {
    let args = [
        "sweep",
        "--n",
        "10",
        "--p-grid",
        "0.2,0.4",
        "--replicates",
        "5",
        "--steps",
        "100",
        "--seed",
        "2",
    ];
    let a = iad(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, iad(&args).stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn runtime_errors_exit_one_with_one_line() {
    let out = iad(&["census", "--input", "/definitely/not/here.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1);
    assert!(err.starts_with("error: "));

    let out = iad(&["simulate", "--alpha", "1.5", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(iad(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(iad(&["census"]).status.code(), Some(2));
    assert_eq!(
        iad(&["generate", "--kind", "er", "--n", "x"]).status.code(),
        Some(2)
    );
}

#[test]
fn duplicate_policy_error_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("dup.csv");
    std::fs::write(&g, "a,b,1\nb,c,1\na,b,-2\n").unwrap();
    assert!(iad(&["census", "--input", path(&g)]).status.success());
    let out = iad(&["census", "--input", path(&g), "--dedup", "error"]);
    assert_eq!(out.status.code(), Some(1));
}
