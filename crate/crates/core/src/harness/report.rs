//! Study tables, rate fits and their CSV, metadata and gnuplot outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    /// log ε against n.
    N,
    /// log ε against n^{2/3}.
    NTwoThirds,
    /// log ε against log n.
    LogN,
}

impl Abscissa {
    pub fn transform(self, n: f64) -> f64 {
        match self {
            Abscissa::N => n,
            Abscissa::NTwoThirds => n.powf(2.0 / 3.0),
            Abscissa::LogN => n.ln(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Abscissa::N => "n",
            Abscissa::NTwoThirds => "n^(2/3)",
            Abscissa::LogN => "log n",
        }
    }
}

/// Least-squares line with Pearson correlation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r: f64,
    pub points: usize,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r = if syy == 0.0 { 0.0 } else { sxy / (sxx * syy).sqrt() };
    Some(LineFit { slope, intercept: my - slope * mx, r, points: n })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: u64,
    /// Quadrature value, or the error itself for discretization studies.
    pub value: f64,
    pub rel_error: f64,
    pub runtime_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub name: String,
    pub rows: Vec<StudyRow>,
    pub abscissa: Abscissa,
    pub error_floor: f64,
    pub fit: Option<LineFit>,
    pub reference: Option<f64>,
    pub config_digest: String,
    pub seed: Option<u64>,
    /// Free-form observations (monotonicity violations and similar).
    pub notes: Vec<String>,
}

impl StudyReport {
    pub fn new(name: &str, abscissa: Abscissa, error_floor: f64, config_digest: &str, seed: Option<u64>) -> Self {
        Self {
            name: name.to_string(),
            rows: Vec::new(),
            abscissa,
            error_floor,
            fit: None,
            reference: None,
            config_digest: config_digest.to_string(),
            seed,
            notes: Vec::new(),
        }
    }

    /// Fits log(rel_error) against the abscissa over rows at or above the floor.
    pub fn refit(&mut self) {
        self.fit = self.fit_with(self.abscissa);
    }

    pub fn fit_with(&self, abscissa: Abscissa) -> Option<LineFit> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| r.rel_error >= self.error_floor && r.rel_error > 0.0)
            .map(|r| (abscissa.transform(r.n as f64), r.rel_error.ln()))
            .unzip();
        least_squares(&x, &y)
    }

    pub fn last_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.rel_error)
    }
}

/// 17 significant digits: enough to round-trip every f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const CSV_HEADER: &str = "n,value,rel_error,runtime_s";

pub fn report_csv(report: &StudyReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in &report.rows {
        let _ = writeln!(s, "{},{},{},{}", r.n, fmt_f64(r.value), fmt_f64(r.rel_error), fmt_f64(r.runtime_s));
    }
    s
}

pub fn parse_report_csv(text: &str) -> Result<Vec<StudyRow>, HarnessError> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(HarnessError::Parse("missing CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let bad = || HarnessError::Parse(format!("bad row {l:?}"));
            if f.len() != 4 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(StudyRow { n: f[0].parse().map_err(|_| bad())?, value: num(f[1])?, rel_error: num(f[2])?, runtime_s: num(f[3])? })
        })
        .collect()
}

fn sidecar(path: &Path, ext: &str) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(ext);
    PathBuf::from(p)
}

fn meta_text(report: &StudyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "study = {:?}", report.name);
    let _ = writeln!(s, "abscissa = {:?}", report.abscissa.label());
    let _ = writeln!(s, "error_floor = {}", fmt_f64(report.error_floor));
    match report.fit {
        Some(f) => {
            let _ = writeln!(s, "slope = {}", fmt_f64(f.slope));
            let _ = writeln!(s, "intercept = {}", fmt_f64(f.intercept));
            let _ = writeln!(s, "correlation = {}", fmt_f64(f.r));
            let _ = writeln!(s, "fit_points = {}", f.points);
        }
        None => {
            let _ = writeln!(s, "slope = nan");
        }
    }
    if let Some(r) = report.reference {
        let _ = writeln!(s, "reference = {}", fmt_f64(r));
    }
    match report.seed {
        Some(seed) => {
            let _ = writeln!(s, "seed = {seed}");
        }
        None => {
            let _ = writeln!(s, "seed = none");
        }
    }
    let _ = writeln!(s, "config_digest = {:?}", report.config_digest);
    for n in &report.notes {
        let _ = writeln!(s, "note = {n:?}");
    }
    s
}

fn gnuplot_text(report: &StudyReport, csv: &Path) -> String {
    let file = csv.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let logx = if report.abscissa == Abscissa::LogN { "set logscale x\n" } else { "" };
    let using = match report.abscissa {
        Abscissa::NTwoThirds => "($1**(2.0/3.0)):3",
        _ => "1:3",
    };
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset logscale y\n{logx}set xlabel '{}'\nset ylabel 'relative error'\nset title '{}'\nplot '{file}' using {using} with linespoints title '{}'\n",
        report.abscissa.label(),
        report.name,
        report.name
    )
}

/// Writes `path` (CSV), `path.meta` and `path.gp`.
pub fn emit_report(report: &StudyReport, path: &Path) -> Result<(), HarnessError> {
    let io = |p: &Path, e: std::io::Error| HarnessError::Io(format!("{}: {e}", p.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
    }
    std::fs::write(path, report_csv(report)).map_err(|e| io(path, e))?;
    let meta = sidecar(path, ".meta");
    std::fs::write(&meta, meta_text(report)).map_err(|e| io(&meta, e))?;
    let gp = sidecar(path, ".gp");
    std::fs::write(&gp, gnuplot_text(report, path)).map_err(|e| io(&gp, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_lines() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = least_squares(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-15 && (f.intercept - 2.0).abs() < 1e-14);
        assert!((f.r + 1.0).abs() < 1e-15);
        assert!(least_squares(&[1.0], &[1.0]).is_none());
        assert!(least_squares(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn fit_respects_the_floor() {
        let mut r = StudyReport::new("t", Abscissa::LogN, 1e-9, "d", None);
        for (n, e) in [(8u64, 1e-2), (16, 2.5e-3), (32, 6.25e-4), (64, 1e-12)] {
            r.rows.push(StudyRow { n, value: 0.0, rel_error: e, runtime_s: 0.0 });
        }
        r.refit();
        let f = r.fit.unwrap();
        assert_eq!(f.points, 3);
        assert!((f.slope + 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_and_sidecars() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/study.csv");
        let mut r = StudyReport::new("gl1", Abscissa::N, 1e-9, "abc", Some(7));
        emit_report(&r, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{CSV_HEADER}\n"));
        r.rows.push(StudyRow { n: 2, value: 0.1 + 0.2, rel_error: 1.0 / 3.0, runtime_s: 1e-300 });
        r.rows.push(StudyRow { n: 4, value: std::f64::consts::PI, rel_error: 5e-324, runtime_s: 0.0 });
        r.refit();
        emit_report(&r, &path).unwrap();
        let back = parse_report_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, r.rows);
        let meta = std::fs::read_to_string(dir.path().join("sub/study.csv.meta")).unwrap();
        assert!(meta.contains("slope = ") && meta.contains("seed = 7") && meta.contains("config_digest = \"abc\""));
        assert!(dir.path().join("sub/study.csv.gp").exists());
    }
}
