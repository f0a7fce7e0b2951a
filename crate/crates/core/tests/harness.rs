use std::path::Path;

use nsuq::harness::{
    emit_report, parse_report_csv, report_csv, run_gl_study, run_mc_study, run_qmc_study, ExperimentConfig, SolutionCache,
    Solver, CSV_HEADER,
};

const SMALL_GL: &str = r#"
[mesh]
m = 6

[family]
kind = "gl1"

[study]
rule = "gauss"
n = [2, 4, 6]
reference_n = 10
"#;

const SMALL_QMC: &str = r#"
[mesh]
m = 4

[family]
kind = "qmc1"
s = 3

[study]
rule = "lattice"
level_min = 1
level_max = 4
shifts = 3
seed = 7
"#;

/// The CSV with the runtime column dropped.
fn without_runtime(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string()).collect()
}

fn gl_csv(cfg: &ExperimentConfig, cache: Option<&Path>) -> (String, usize) {
    let solver = Solver::new(cfg, cache.map(|p| SolutionCache::new(p).unwrap())).unwrap();
    let report = run_gl_study(cfg, &solver).unwrap();
    (report_csv(&report), solver.stats().cache_hits)
}

#[test]
fn gl_study_is_deterministic_and_cache_transparent() {
    let cfg = ExperimentConfig::from_toml_str(SMALL_GL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (plain, _) = gl_csv(&cfg, None);
    let (first, hits_first) = gl_csv(&cfg, Some(dir.path()));
    let (second, hits_second) = gl_csv(&cfg, Some(dir.path()));
    assert_eq!(without_runtime(&plain), without_runtime(&first));
    assert_eq!(without_runtime(&first), without_runtime(&second));
    assert_eq!(hits_first, 0);
    assert!(hits_second > 0);
    assert!(plain.starts_with(CSV_HEADER));
}

#[test]
fn corrupt_cache_entries_are_recomputed() {
    let cfg = ExperimentConfig::from_toml_str(SMALL_GL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (clean, _) = gl_csv(&cfg, Some(dir.path()));
    let mut files = Vec::new();
    for sub in std::fs::read_dir(dir.path()).unwrap() {
        for f in std::fs::read_dir(sub.unwrap().path()).unwrap() {
            files.push(f.unwrap().path());
        }
    }
    assert!(!files.is_empty());
    for f in &files {
        let mut bytes = std::fs::read(f).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0xff;
        std::fs::write(f, bytes).unwrap();
    }
    let (again, hits) = gl_csv(&cfg, Some(dir.path()));
    assert_eq!(hits, 0);
    assert_eq!(without_runtime(&clean), without_runtime(&again));
}

#[test]
fn lattice_and_mc_studies_repeat_exactly() {
    let cfg = ExperimentConfig::from_toml_str(SMALL_QMC).unwrap();
    let run = || {
        let solver = Solver::new(&cfg, None).unwrap();
        let q = run_qmc_study(&cfg, &solver).unwrap();
        let m = run_mc_study(&cfg, &solver, Some(q.reference)).unwrap();
        (report_csv(&q.report), report_csv(&m), q.reference)
    };
    let (q1, m1, r1) = run();
    let (q2, m2, r2) = run();
    assert_eq!(r1.to_bits(), r2.to_bits());
    assert_eq!(without_runtime(&q1), without_runtime(&q2));
    assert_eq!(without_runtime(&m1), without_runtime(&m2));
    // levels 1..=4 give sizes 2, 4, 8, 16
    let rows = parse_report_csv(&q1).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![2, 4, 8, 16]);
    assert!(rows.iter().all(|r| r.rel_error.is_finite() && r.rel_error >= 0.0));

    let mut reseeded = cfg.clone();
    reseeded.study.seed = 8;
    let solver = Solver::new(&reseeded, None).unwrap();
    let other = run_qmc_study(&reseeded, &solver).unwrap();
    assert_ne!(other.reference.to_bits(), r1.to_bits());
}

#[test]
fn emitted_report_round_trips() {
    let cfg = ExperimentConfig::from_toml_str(SMALL_GL).unwrap();
    let solver = Solver::new(&cfg, None).unwrap();
    let report = run_gl_study(&cfg, &solver).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out/gl.csv");
    emit_report(&report, &path).unwrap();
    let rows = parse_report_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), report.rows.len());
    for (a, b) in rows.iter().zip(&report.rows) {
        assert_eq!((a.n, a.value.to_bits(), a.rel_error.to_bits()), (b.n, b.value.to_bits(), b.rel_error.to_bits()));
    }
    let meta = std::fs::read_to_string(dir.path().join("out/gl.csv.meta")).unwrap();
    assert!(meta.contains(&cfg.digest()));
}
