//! Experiment configuration: a TOML file with sections, `NSUQ_<SECTION>_<KEY>`
//! environment overrides, and a canonical serialization that feeds digests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::fem::{DiscretizationOptions, StabScaling, DEFAULT_MAX_ITER, DEFAULT_PICARD_TOL};
use crate::geometry::PerturbationFamily;

pub const ENV_PREFIX: &str = "NSUQ_";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Elements per side.
    pub m: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { m: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Picard tolerance on the H-norm increment.
    pub tol: f64,
    pub max_iter: usize,
    pub beta_stab: f64,
    pub stab_scaling: StabScaling,
    /// Gauss points per direction on each element.
    pub quad_order: usize,
    /// Multiplier on the manufactured forcing.
    pub force_scale: f64,
    /// False drops the convection term (Stokes).
    pub convection: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = DiscretizationOptions::default();
        Self {
            tol: DEFAULT_PICARD_TOL,
            max_iter: DEFAULT_MAX_ITER,
            beta_stab: d.beta_stab,
            stab_scaling: d.stab_scaling,
            quad_order: d.quad_order,
            force_scale: 1.0,
            convection: true,
        }
    }
}

impl SolverConfig {
    pub fn discretization(&self) -> DiscretizationOptions {
        DiscretizationOptions { quad_order: self.quad_order, beta_stab: self.beta_stab, stab_scaling: self.stab_scaling }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Gauss,
    Lattice,
    Mc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub rule: RuleKind,
    /// Gauss study sizes, ascending.
    pub n: Vec<usize>,
    /// Gauss reference size, above every study size.
    pub reference_n: usize,
    /// Lattice and MC study sizes are 2^level for level in [level_min, level_max].
    pub level_min: u32,
    pub level_max: u32,
    /// Random shifts (QMC) or independent replicates (MC).
    pub shifts: usize,
    pub seed: u64,
    /// Rows with relative error below this are left out of rate fits.
    pub error_floor: f64,
    /// Mesh sizes of the manufactured-solution study.
    pub mms_m: Vec<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            rule: RuleKind::Gauss,
            n: (1..=16).map(|k| 2 * k).collect(),
            reference_n: 64,
            level_min: 3,
            level_max: 10,
            shifts: 8,
            seed: 2024,
            error_floor: 1e-9,
            mms_m: vec![8, 16, 32, 64],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub cache: Option<PathBuf>,
    /// One positive integer per line; a Korobov search is used when absent.
    pub generating_vector: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsConfig {
    /// H¹₀ ↪ L⁴ embedding constant. Required by `verify-bounds`.
    pub c4: Option<f64>,
    pub beta: Option<f64>,
    pub delta: f64,
    pub force_scale: Option<f64>,
    /// Derivative multi-index in dense form.
    pub nu: Vec<u32>,
    pub points: Vec<Vec<f64>>,
    pub fd_h: f64,
    pub richardson: bool,
    pub picard_tol: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            c4: None,
            beta: None,
            delta: 1.0,
            force_scale: None,
            nu: vec![1],
            points: vec![vec![-0.8], vec![-0.35], vec![0.1], vec![0.5], vec![0.9]],
            fd_h: 1e-2,
            richardson: true,
            picard_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub mesh: MeshConfig,
    pub family: PerturbationFamily,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub study: StudyConfig,
    #[serde(default)]
    pub paths: PathsConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub solve: SolveConfig,
}

impl ExperimentConfig {
    pub fn new(family: PerturbationFamily) -> Self {
        Self {
            mesh: MeshConfig::default(),
            family,
            solver: SolverConfig::default(),
            study: StudyConfig::default(),
            paths: PathsConfig::default(),
            bounds: BoundsConfig::default(),
            solve: SolveConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let table: toml::Table = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<Self, HarnessError> {
        let cfg: Self = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a file and applies environment overrides from `env`.
    pub fn load<I>(path: &Path, env: I) -> Result<Self, HarnessError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        let mut table: toml::Table = toml::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?;
        apply_env_overrides(&mut table, env)?;
        Self::from_table(table)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.mesh.m < 2 {
            return bad(format!("mesh.m = {} must be at least 2", self.mesh.m));
        }
        self.family.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let s = &self.solver;
        for (name, v) in [("solver.tol", s.tol), ("solver.beta_stab", s.beta_stab)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if !(s.force_scale >= 0.0 && s.force_scale.is_finite()) {
            return bad(format!("solver.force_scale = {} must be nonnegative", s.force_scale));
        }
        if s.max_iter == 0 {
            return bad("solver.max_iter must be positive".into());
        }
        let st = &self.study;
        if st.n.is_empty() || st.n.contains(&0) || st.n.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("study.n = {:?} must be positive and strictly ascending", st.n));
        }
        if st.reference_n <= *st.n.last().expect("nonempty") {
            return bad(format!("study.reference_n = {} must exceed every study n", st.reference_n));
        }
        if st.level_min > st.level_max || st.level_max > 40 {
            return bad(format!("study levels {}..={} are not a valid range", st.level_min, st.level_max));
        }
        if st.shifts == 0 {
            return bad("study.shifts must be positive".into());
        }
        if !(st.error_floor > 0.0) {
            return bad("study.error_floor must be positive".into());
        }
        if st.mms_m.iter().any(|&m| m < 2) || st.mms_m.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("study.mms_m = {:?} must be at least 2 and strictly ascending", st.mms_m));
        }
        let b = &self.bounds;
        if let Some(c4) = b.c4 {
            if !(c4 > 0.0 && c4.is_finite()) {
                return bad(format!("bounds.c4 = {c4} must be positive"));
            }
        }
        if !(b.fd_h > 0.0 && b.picard_tol > 0.0 && b.delta >= 1.0) {
            return bad("bounds.fd_h and bounds.picard_tol must be positive and bounds.delta at least 1".into());
        }
        Ok(())
    }

    /// Sorted-key TOML with every float written as its 17-significant-digit
    /// scientific form.
    pub fn canonical(&self) -> String {
        let v = toml::Value::try_from(self).expect("config serializes");
        let mut out = String::new();
        write_canonical(&v, "", &mut out);
        out
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    /// Canonical form of only what determines a single solve: mesh, family
    /// and solver sections.
    pub fn solve_scope(&self) -> String {
        let scoped = toml::Value::try_from(SolveScope { mesh: &self.mesh, family: &self.family, solver: &self.solver })
            .expect("config serializes");
        let mut out = String::new();
        write_canonical(&scoped, "", &mut out);
        out
    }
}

#[derive(Serialize)]
struct SolveScope<'a> {
    mesh: &'a MeshConfig,
    family: &'a PerturbationFamily,
    solver: &'a SolverConfig,
}

fn write_canonical(v: &toml::Value, path: &str, out: &mut String) {
    match v {
        toml::Value::Table(t) => {
            let sorted: BTreeMap<_, _> = t.iter().collect();
            for (k, val) in sorted {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                write_canonical(val, &p, out);
            }
        }
        toml::Value::Array(a) => {
            out.push_str(path);
            out.push_str("=[");
            for (i, val) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let mut inner = String::new();
                write_canonical(val, "", &mut inner);
                out.push_str(inner.trim_start_matches('=').trim_end());
            }
            out.push_str("]\n");
        }
        toml::Value::Float(f) => out.push_str(&format!("{path}={f:.16e}\n")),
        toml::Value::Integer(i) => out.push_str(&format!("{path}={i}\n")),
        toml::Value::String(s) => out.push_str(&format!("{path}={s:?}\n")),
        toml::Value::Boolean(b) => out.push_str(&format!("{path}={b}\n")),
        toml::Value::Datetime(d) => out.push_str(&format!("{path}={d}\n")),
    }
}

/// `NSUQ_STUDY_SHIFTS=16` sets `study.shifts`; `NSUQ_FAMILY_KIND=qmc2` sets
/// `family.kind`. The section is the first underscore-separated word after
/// the prefix; values are parsed as TOML and fall back to strings.
pub fn apply_env_overrides<I>(table: &mut toml::Table, env: I) -> Result<(), HarnessError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut pairs: Vec<(String, String)> = env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    pairs.sort();
    for (key, raw) in pairs {
        let rest = &key[ENV_PREFIX.len()..];
        let Some((section, field)) = rest.split_once('_') else {
            return Err(HarnessError::Config(format!("environment override {key} has no field")));
        };
        let (section, field) = (section.to_ascii_lowercase(), field.to_ascii_lowercase());
        let value = parse_env_value(&raw);
        let entry = table.entry(section.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        match entry {
            toml::Value::Table(t) => {
                t.insert(field, value);
            }
            _ => return Err(HarnessError::Config(format!("{section} is not a section"))),
        }
    }
    Ok(())
}

fn parse_env_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GL1: &str = r#"
[mesh]
m = 16

[family]
kind = "gl1"
amplitude = 0.15

[study]
rule = "gauss"
n = [2, 4, 8]
reference_n = 16
"#;

    #[test]
    fn parses_and_fills_defaults() {
        let cfg = ExperimentConfig::from_toml_str(GL1).unwrap();
        assert_eq!(cfg.mesh.m, 16);
        assert_eq!(cfg.family, PerturbationFamily::gl1());
        assert_eq!(cfg.solver, SolverConfig::default());
        assert_eq!(cfg.study.n, vec![2, 4, 8]);
        assert_eq!(cfg.study.shifts, 8);
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(ExperimentConfig::from_toml_str(&GL1.replace("reference_n = 16", "reference_n = 8")).is_err());
        assert!(ExperimentConfig::from_toml_str(&GL1.replace("[2, 4, 8]", "[4, 2, 8]")).is_err());
        assert!(ExperimentConfig::from_toml_str(&GL1.replace("m = 16", "m = 16\nbogus = 1")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{GL1}\n[solver]\ntol = -1.0\n")).is_err());
    }

    #[test]
    fn environment_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, GL1).unwrap();
        let env = vec![
            ("NSUQ_STUDY_SHIFTS".to_string(), "16".to_string()),
            ("NSUQ_SOLVER_TOL".to_string(), "1e-9".to_string()),
            ("NSUQ_PATHS_OUTPUT".to_string(), "out/x.csv".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ];
        let cfg = ExperimentConfig::load(&p, env).unwrap();
        assert_eq!(cfg.study.shifts, 16);
        assert_eq!(cfg.solver.tol, 1e-9);
        assert_eq!(cfg.paths.output, Some(PathBuf::from("out/x.csv")));
        let bad = vec![("NSUQ_STUDY".to_string(), "1".to_string())];
        assert!(ExperimentConfig::load(&p, bad).is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = ExperimentConfig::from_toml_str(GL1).unwrap();
        let reordered = "[family]\namplitude = 0.15\nkind = \"gl1\"\n[study]\nreference_n = 16\nn = [2, 4, 8]\nrule = \"gauss\"\n[mesh]\nm = 16\n";
        let b = ExperimentConfig::from_toml_str(reordered).unwrap();
        assert_eq!(a.digest(), b.digest());
        let mut c = a.clone();
        c.solver.tol = 1e-8;
        assert_ne!(a.digest(), c.digest());
        assert_ne!(a.solve_scope(), c.solve_scope());
        let mut d = a.clone();
        d.study.seed = 1;
        assert_ne!(a.digest(), d.digest());
        assert_eq!(a.solve_scope(), d.solve_scope());
        let line = a.canonical().lines().find(|l| l.starts_with("solver.tol=")).unwrap().to_string();
        assert_eq!(line["solver.tol=".len()..].parse::<f64>().unwrap(), 1e-7);
    }
}
