//! Loading a TOML experiment with environment overrides, its digest, and the
//! on-disk solution cache.

use nsuq::harness::{cache_key, ExperimentConfig, SolutionCache, Solver};

const CONFIG: &str = r#"
[mesh]
m = 16

[family]
kind = "gl1"
amplitude = 0.15

[solver]
tol = 1e-9
"#;

fn main() {
    let dir = std::env::temp_dir().join(format!("nsuq-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("experiment.toml");
    std::fs::write(&path, CONFIG).expect("write config");

    let env = [("NSUQ_MESH_M".to_string(), "12".to_string())];
    let cfg = ExperimentConfig::load(&path, env).expect("valid config");
    println!("mesh.m after override: {}", cfg.mesh.m);
    println!("digest {}", cfg.digest());
    println!("canonical form:\n{}", cfg.canonical());

    let cache = SolutionCache::new(&dir.join("cache")).expect("cache dir");
    let y = [0.25];
    println!("cache key for y = {y:?}: {}", cache_key(&cfg.solve_scope(), &y));
    for pass in 1..=2 {
        let solver = Solver::new(&cfg, Some(cache.clone())).expect("solver");
        let t = std::time::Instant::now();
        let e = solver.solve(&y).expect("solve");
        println!(
            "pass {pass}: |u|_H = {:.12}, {} Picard solves, cache hits {}, {:.3} s",
            e.norm_u,
            e.iterations,
            solver.stats().cache_hits,
            t.elapsed().as_secs_f64()
        );
    }
    std::fs::remove_dir_all(&dir).ok();
}
