use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn drep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drep"))
        .args(args)
        .env_remove("DREP_CACHE")
        .output()
        .expect("drep runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Nonzero `(hdeg, weight, dim)` cells of a Betti JSON document.
fn cells(v: &Value) -> Vec<(i64, i64, i64)> {
    v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["hdeg"].as_i64().unwrap(),
                c["weight"].as_i64().unwrap(),
                c["dim"].as_i64().unwrap(),
            )
        })
        .filter(|c| c.2 > 0)
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "generator x hdeg 0 weight 1\ngenerator y hdeg 1 weight 2\nd y = x*x\n";

#[test]
fn identity_cid1_passes() {
    let o = drep(&["identities", "--which", "cid1", "--terms", "30", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["verified"], Value::Bool(true));
    assert_eq!(v["first_mismatch"], Value::Null);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 31);
    // partitions into distinct parts: 1, 1, 1, 2, 2, 3, 4, 5, 6, 8
    let head: Vec<&str> = v["coefficients"].as_array().unwrap()[..10]
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(head, ["1", "1", "1", "2", "2", "3", "4", "5", "6", "8"]);
}

#[test]
fn dual_numbers_rank_one_betti_json() {
    let o = drep(&[
        "homology",
        "builtin:dual-numbers",
        "-n",
        "1",
        "--max-weight",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(cells(&v), vec![(0, 0, 1), (0, 1, 1), (2, 3, 1)]);
    assert_eq!(v["meta"]["command"], "homology");
}

#[test]
fn table_format_is_a_grid() {
    let o = drep(&["homology", "builtin:dual-numbers", "-n", "1", "--max-weight", "3"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("h\\w | 0 1 2 3"), "{s}");
    assert!(s.contains("  2 | . . . 1"), "{s}");
}

#[test]
fn reproduce_prints_a_scoreboard() {
    let o = drep(&["reproduce", "--suite", "paper"]);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().filter(|l| l.starts_with("criterion")).collect();
    assert_eq!(lines.len(), 14, "{s}");
    assert!(s.contains("of 14 criteria passed"), "{s}");
    let all_pass = lines.iter().all(|l| l.contains(" PASS "));
    assert_eq!(code(&o), if all_pass { 0 } else { 1 });
}

#[test]
fn reproduce_single_criterion() {
    let o = drep(&["reproduce", "--criterion", "9", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["total"], 1);
    assert_eq!(v["results"][0]["passed"], Value::Bool(true));
    assert_eq!(code(&drep(&["reproduce", "--criterion", "15"])), 2);
}

#[test]
fn property_suites_pass() {
    let o = drep(&["reproduce", "--suite", "properties", "--cases", "32", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

#[test]
fn usage_errors_exit_two() {
    let o = drep(&["homology", "--max-weight", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Usage"));
    let o = drep(&[
        "homology",
        "builtin:dual-numbers",
        "-n",
        "1",
        "--max-weight",
        "3",
        "--bogus",
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&drep(&["frobnicate"])), 2);
    assert_eq!(
        code(&drep(&["homology", "builtin:nope", "-n", "1", "--max-weight", "2"])),
        2
    );
    assert_eq!(
        code(&drep(&["homology", "/no/such/file", "-n", "1", "--max-weight", "2"])),
        2
    );
    // sandwich is only complete to weight 4
    assert_eq!(code(&drep(&["cyclic", "builtin:sandwich", "--max-weight", "6"])), 2);
    assert_eq!(
        code(&drep(&["zeta", "builtin:commuting-plane", "--terms", "4", "--trains"])),
        2
    );
}

#[test]
fn check_reports_clean_and_dirty_presentations() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.dga", SMALL);
    let o = drep(&["check", &good, "--max-weight", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["clean"], Value::Bool(true));
    // d(d z) = d(x y) = x·x·x
    let bad = write(
        dir.path(),
        "bad.dga",
        &format!("{SMALL}generator z hdeg 2 weight 3\nd z = x*y\n"),
    );
    let o = drep(&["check", &bad, "--max-weight", "3", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["violations"][0]["generator"], "z");
}

#[test]
fn rep_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = drep(&["rep", "builtin:dual-numbers", "-n", "1", "--max-weight", "5"]);
    assert_eq!(code(&o), 0);
    let file = write(dir.path(), "r1.dga", &stdout(&o));
    assert_eq!(code(&drep(&["check", &file, "--max-weight", "5"])), 0);
    let direct = drep(&[
        "homology",
        "builtin:dual-numbers",
        "-n",
        "1",
        "--max-weight",
        "5",
        "--format",
        "json",
    ]);
    let via = drep(&["homology", &file, "-n", "1", "--max-weight", "5", "--format", "json"]);
    assert_eq!(code(&via), 0, "{}", stderr(&via));
    assert_eq!(cells(&json(&direct)), cells(&json(&via)));
}

#[test]
fn json_output_is_deterministic_and_independent_of_jobs() {
    let args = [
        "stable",
        "builtin:commuting-plane",
        "--max-weight",
        "5",
        "--format",
        "json",
    ];
    let a = drep(&args);
    let b = drep(&args);
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "1"]);
    let c = drep(&with_jobs);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn cache_replays_and_misses_on_edits() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    let file = write(dir.path(), "a.dga", SMALL);
    let run = |extra: &[&str]| {
        let mut args = vec![
            "homology",
            file.as_str(),
            "-n",
            "1",
            "--max-weight",
            "4",
            "--format",
            "json",
        ];
        args.extend_from_slice(extra);
        drep(&args)
    };
    let first = run(&["--cache-dir", cache]);
    assert!(!stderr(&first).contains("served from cache"));
    let second = run(&["--cache-dir", cache]);
    assert!(stderr(&second).contains("served from cache"));
    assert_eq!(first.stdout, second.stdout);

    let uncached = run(&["--cache-dir", cache, "--no-cache"]);
    assert!(!stderr(&uncached).contains("served from cache"));
    assert_eq!(first.stdout, uncached.stdout);

    let from_env = Command::new(env!("CARGO_BIN_EXE_drep"))
        .args(["homology", &file, "-n", "1", "--max-weight", "4", "--format", "json"])
        .env("DREP_CACHE", cache)
        .output()
        .unwrap();
    assert!(stderr(&from_env).contains("served from cache"));

    // comments and spacing do not change the digest
    std::fs::write(&file, format!("# a comment\n\n{}", SMALL.replace("x*x", "x * x"))).unwrap();
    assert!(stderr(&run(&["--cache-dir", cache])).contains("served from cache"));

    // an edited differential does
    std::fs::write(&file, SMALL.replace("x*x", "2*x*x")).unwrap();
    let edited = run(&["--cache-dir", cache]);
    assert!(!stderr(&edited).contains("served from cache"));
    assert_ne!(json(&first)["meta"]["digest"], json(&edited)["meta"]["digest"]);
}

#[test]
fn corrupt_cache_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "cyclic",
        "builtin:dual-numbers",
        "--max-weight",
        "5",
        "--format",
        "json",
        "--cache-dir",
        cache.to_str().unwrap(),
    ];
    let first = drep(&args);
    let entries: Vec<_> = std::fs::read_dir(&cache).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    std::fs::write(&entries[0], "not json").unwrap();
    let second = drep(&args);
    assert_eq!(code(&second), 0);
    assert!(stderr(&second).contains("corrupt cache entry"));
    assert_eq!(first.stdout, second.stdout);
    let third = drep(&args);
    assert!(stderr(&third).contains("served from cache"));
    assert_eq!(first.stdout, third.stdout);
}

#[test]
fn series_commands() {
    let o = drep(&[
        "zeta",
        "builtin:truncated:3",
        "--terms",
        "12",
        "--trains",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verified"], Value::Bool(true));

    let o = drep(&[
        "molien",
        "builtin:dual-numbers",
        "-n",
        "1",
        "--terms",
        "8",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verified"], Value::Bool(true));

    let o = drep(&["necklace", "--alphabet", "2", "--max-len", "10", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verified"], Value::Bool(true));
    // binary necklaces of length 1..6: 2, 3, 4, 6, 8, 14
    let head: Vec<&str> = v["coefficients"].as_array().unwrap()[..6]
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(head, ["2", "3", "4", "6", "8", "14"]);

    let o = drep(&["identities", "--which", "cidd1:2", "--terms", "10"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn koszul_and_derham_commands() {
    let o = drep(&[
        "twist",
        "--example",
        "dual-numbers",
        "-n",
        "1",
        "-r",
        "1",
        "--max-degree",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["verified"], Value::Bool(true));
    assert_eq!(v["tau"]["passed"], Value::Bool(true));

    let o = drep(&[
        "ce",
        "--algebra",
        "square-zero:1",
        "-r",
        "2",
        "--max-wedge",
        "3",
        "--max-weight",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    assert!(cells(&json(&o)).contains(&(0, 0, 1)));

    let o = drep(&[
        "derham",
        "builtin:commuting-plane",
        "--max-weight",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    assert!(cells(&json(&o)).is_empty());

    let o = drep(&[
        "derham",
        "builtin:dual-numbers",
        "--stable",
        "--max-weight",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(cells(&json(&o)), vec![(0, 0, 1)]);

    let o = drep(&[
        "derham",
        "builtin:commuting-plane",
        "--commutative",
        "-n",
        "2",
        "--max-weight",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&o)["forms_comparison"]["passed"], Value::Bool(true));
}

#[test]
fn commutative_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "b.dga",
        "commutative\ngenerator x hdeg 0 weight 1\ngenerator e hdeg 1 weight 2\nd e = x*x\n",
    );
    assert_eq!(code(&drep(&["check", &file, "--max-weight", "4"])), 0);
    // k[x, e] with de = x² resolves k[x]/(x²)
    let o = drep(&["homology", &file, "-n", "1", "--max-weight", "5", "--format", "json"]);
    assert_eq!(cells(&json(&o)), vec![(0, 0, 1), (0, 1, 1)]);
    assert_eq!(code(&drep(&["homology", &file, "-n", "2", "--max-weight", "5"])), 2);
    assert_eq!(code(&drep(&["cyclic", &file, "--max-weight", "3"])), 2);
}
