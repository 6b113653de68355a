use std::path::Path;
use std::process::{Command, Output};

fn momab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momab")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn body_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn gen_then_run_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let out = momab(&["gen", "--n", "6", "--D", "2", "--seed", "9", "--out", inst.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&read(&inst)).unwrap();
    assert_eq!(json["D"], 2);
    assert_eq!(json["means"].as_array().unwrap().len(), 6);

    let out = momab(&["run", "--instance", inst.to_str().unwrap(), "--T", "1e5", "--seed", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!v["run"]["exploited"].as_array().unwrap().is_empty());
    assert!(v["report"]["coverage_max"].is_number());
    assert!(v["run"]["timings"].is_null());
}

#[test]
fn exit_codes() {
    assert_eq!(momab(&["run", "--n", "10", "--D", "2", "--T", "5"]).status.code(), Some(2));
    assert_eq!(momab(&["run", "--n", "10", "--D", "2", "--T", "1e5", "--variant", "nope"]).status.code(), Some(2));
    assert_eq!(momab(&["sweep", "--T", "1e5,1e4", "--reps", "1"]).status.code(), Some(2));
    let refused = momab(&["run", "--n", "60", "--D", "5", "--T", "1e6", "--cover", "exact", "--exact-limit", "2"]);
    assert_eq!(refused.status.code(), Some(3));
}

#[test]
fn threads_env_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_momab"))
        .args(["gen", "--n", "2", "--D", "2"])
        .env("MOMAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_momab"))
        .args(["counterexample", "--T", "100", "--reps", "2"])
        .env("MOMAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn variants_run() {
    for variant in ["full", "epo", "single"] {
        let out = momab(&["run", "--n", "12", "--D", "3", "--T", "1e5", "--variant", variant]);
        assert!(out.status.success(), "{variant}");
    }
    let out = momab(&["run", "--n", "12", "--D", "3", "--T", "1e5", "--t-prime", "500"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["run"]["t_prime"], 500);
}

#[test]
fn scatter_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = momab(&["export-front", "--n", "100", "--D", "2", "--T", "1e6", "--seed", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = read(&dir.path().join("front.csv"));
    let lines = body_lines(&text);
    assert_eq!(lines[0], "arm_id,mean_1,mean_2,is_true_po,in_B,in_epo");
    assert_eq!(lines.len(), 101);
    let mut in_b = 0;
    for (i, line) in lines[1..].iter().enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0], i.to_string());
        for m in &f[1..3] {
            let x: f64 = m.parse().unwrap();
            assert!((0.0..=1.0).contains(&x));
        }
        for flag in &f[3..] {
            assert!(*flag == "0" || *flag == "1");
        }
        in_b += (f[4] == "1") as usize;
    }
    assert!(in_b >= 1);
}

#[test]
fn sweep_schema() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--n", "10", "--D", "2", "--T", "1e4,1e5,1e6,1e7", "--reps", "2", "--out", dir.path().to_str().unwrap()];
    assert!(momab(&args).status.success());
    let first = read(&dir.path().join("sweep.csv"));
    assert!(momab(&args).status.success());
    let second = read(&dir.path().join("sweep.csv"));
    assert_eq!(first, second);
    let lines = body_lines(&first);
    let header: Vec<&str> = lines[0].split(',').collect();
    for col in ["T", "coverage_max", "adjustment_normalized", "bound_envelope"] {
        assert!(header.contains(&col), "{col}");
    }
    assert_eq!(lines.len(), 5);
}

#[test]
fn table1_and_counterexample_schema() {
    let out = momab(&["table1", "--n", "20", "--D", "2,3", "--T", "1e7", "--reps", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines = body_lines(&text);
    assert_eq!(lines[0], "n,D,replications,avg_true_po,exact_B,greedy_B,exact_refused");
    assert_eq!(lines.len(), 3);
    assert!(text.lines().any(|l| l.starts_with("# timing,20,2,")));

    let out = momab(&["counterexample", "--T", "1000", "--reps", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines = body_lines(&text);
    assert!(lines[0].starts_with("seed,ucb_frac_0,ucb_frac_1,ucb_frac_2"));
    assert_eq!(lines.len(), 4);
}
