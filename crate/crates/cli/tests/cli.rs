use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).display().to_string()
}

fn locasim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locasim"))
        .args(args)
        .env("LOCASIM_WORKERS", "1")
        .output()
        .expect("spawn locasim")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn verify_exit_codes() {
    let seed = data("seed-6state.ca");
    let ok = locasim(&["verify", "--ca", &seed, "--seq", "cube", "--horizon", "130"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let rec: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(rec["generator_times"], serde_json::json!([1, 8, 27, 64, 125]));
    assert_eq!(rec["column"], 1);

    let wrong = locasim(&["verify", "--ca", &seed, "--seq", "square", "--horizon", "130"]);
    assert_eq!(code(&wrong), 1);
    assert_eq!(code(&locasim(&["verify", "--ca", &seed, "--seq", "nonsense"])), 2);
    assert_eq!(code(&locasim(&["verify"])), 2);
    assert_eq!(code(&locasim(&["verify", "--ca", "/nonexistent.ca"])), 3);
}

#[test]
fn simulate_is_deterministic_and_marks_cubes() {
    let seed = data("seed-6state.ca");
    let a = locasim(&["simulate", "--ca", &seed, "--horizon", "70", "--glyphs", "A=@"]);
    let b = locasim(&["simulate", "--ca", &seed, "--horizon", "70", "--glyphs", "A=@"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 71);
    assert!(lines.iter().all(|l| l.chars().count() == 72));
    let fired: Vec<usize> = lines.iter().enumerate().filter(|(_, l)| l.starts_with('@')).map(|(t, _)| t).collect();
    assert_eq!(fired, vec![1, 8, 27, 64]);

    let zero = locasim(&["simulate", "--ca", &seed, "--horizon", "0"]);
    assert_eq!(String::from_utf8(zero.stdout).unwrap().lines().count(), 1);
    assert_eq!(code(&locasim(&["simulate", "--ca", &seed, "--glyphs", "A=x,C=x"])), 2);
}

#[test]
fn ppm_output() {
    let dir = tempfile::tempdir().unwrap();
    let img = path(dir.path(), "d.ppm");
    let o = locasim(&["simulate", "--ca", &data("seed-6state.ca"), "--horizon", "9", "--format", "ppm", "--cell-size", "2", "--out", &img]);
    assert_eq!(code(&o), 0);
    let bytes = std::fs::read(img).unwrap();
    assert!(bytes.starts_with(b"P6\n22 20\n255\n"));
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

#[test]
fn handcraft_round_trips_through_map_apply() {
    let dir = tempfile::tempdir().unwrap();
    let seed = fixture("odd-seed.ca");
    let (map, ca) = (path(dir.path(), "h.map"), path(dir.path(), "h.ca"));
    let args = ["handcraft", "--seed", &seed, "--seq", "linear:2,-1", "--mapping-out", &map, "--ca-out", &ca];
    let o = locasim(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rec["states"], 5);
    assert_eq!(rec["conflicts"], 0);
    let first = std::fs::read(&ca).unwrap();
    assert_eq!(code(&locasim(&args)), 0);
    assert_eq!(std::fs::read(&ca).unwrap(), first);

    let again = path(dir.path(), "again.ca");
    let o = locasim(&["map-apply", "--source", &seed, "--mapping", &map, "--seq", "linear:2,-1", "--out", &again]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&again).unwrap(), first);
    assert_eq!(code(&locasim(&["verify", "--ca", &again, "--seq", "linear:2,-1"])), 0);

    // An override that sends a leftmost entry to a non-generator state.
    let patch = path(dir.path(), "bad.patch");
    std::fs::write(&patch, "smap: * C Q -> E\n").unwrap();
    let o = locasim(&["handcraft", "--seed", &seed, "--seq", "linear:2,-1", "--patch", &patch]);
    assert_eq!(code(&o), 1);
}

#[test]
fn handcraft_reports_conflicts_on_the_shipped_seed() {
    let o = locasim(&["handcraft", "--seed", &data("seed-6state.ca"), "--patch", &data("handcraft.patch")]);
    assert_eq!(code(&o), 1);
    let rec: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rec["compliant"], true);
    assert!(rec["conflicts"].as_u64().unwrap() > 0);
}

#[test]
fn explore_checkpoint_resume_and_reverify() {
    let dir = tempfile::tempdir().unwrap();
    let start = data("seed-6state.ca");
    let whole = path(dir.path(), "whole.ndjson");
    let o = locasim(&["explore", "--ca", &start, "--states", "6", "--budget-nodes", "6000", "--out", &whole]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));

    let part = path(dir.path(), "part.ndjson");
    let cp = path(dir.path(), "cp.bin");
    let o = locasim(&["explore", "--ca", &start, "--budget-nodes", "2000", "--out", &part, "--checkpoint", &cp]);
    assert_eq!(code(&o), 4);
    assert!(std::fs::read(&cp).unwrap().starts_with(b"LSIM"));
    let stats = path(dir.path(), "stats.json");
    let o = locasim(&["explore", "--ca", &start, "--budget-nodes", "6000", "--out", &part, "--resume", &cp, "--stats-out", &stats]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&part).unwrap(), std::fs::read(&whole).unwrap());

    let st: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    let total: u64 = st["histogram"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, st["distinct"].as_u64().unwrap());

    let v = locasim(&["verify", "--solutions", &whole, "--horizon", "130"]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
    let s = locasim(&["stats", "--solutions", &whole, "--reference", &data("reference-histogram.tsv")]);
    assert_eq!(code(&s), 0);
    let rep: serde_json::Value = serde_json::from_slice(&s.stdout).unwrap();
    assert_eq!(rep["reference"]["total"], 32379);
    assert_eq!(rep["distinct"], total);

    let other = locasim(&["explore", "--ca", &start, "--k", "1", "--resume", &cp, "--out", &path(dir.path(), "x.ndjson")]);
    assert_eq!(code(&other), 3);
}

#[test]
fn enumerate_one_state() {
    let o = locasim(&["enumerate", "--states", "1", "--horizon", "16"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<serde_json::Value> = String::from_utf8(o.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["prefix"], "ffff01");
    assert_eq!(code(&locasim(&["enumerate", "--states", "3"])), 2);
}

#[test]
fn collect_supers_records() {
    let o = locasim(&["collect-supers", "--ca", &data("seed-6state.ca"), "--horizon", "50", "--window", "10"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.contains("\"quint\"")));
    assert!(text.lines().all(|l| serde_json::from_str::<serde_json::Value>(l).is_ok()));
}
