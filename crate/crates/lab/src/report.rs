use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::StudyConfig;
use crate::error::{io_err, LabError, Result};

/// One pass/fail property with its measured value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check_name: String,
    pub value: f64,
    /// Upper bound, lower bound or upper end of the interval, per `kind`.
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    pub kind: CheckKind,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    AtMost,
    AtLeast,
    Within,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            value,
            tolerance,
            lower: None,
            kind: CheckKind::AtMost,
            pass: value <= tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            check_name: name.into(),
            value,
            tolerance: bound,
            lower: None,
            kind: CheckKind::AtLeast,
            pass: value >= bound,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            check_name: name.into(),
            value,
            tolerance: hi,
            lower: Some(lo),
            kind: CheckKind::Within,
            pass: value >= lo && value <= hi,
        }
    }

    pub fn describe(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let bound = match self.kind {
            CheckKind::AtMost => format!("<= {:e}", self.tolerance),
            CheckKind::AtLeast => format!(">= {:e}", self.tolerance),
            CheckKind::Within => format!("in [{}, {}]", self.lower.unwrap_or(f64::NAN), self.tolerance),
        };
        format!("{verdict} {}: {:e} {bound}", self.check_name, self.value)
    }
}

/// A numeric table written as CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| fmt_num(*x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:e}")
}

/// The outcome of one sweep point or one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub id: String,
    pub params: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    /// Per-snapshot (or per-row) data, written as the point's `report.csv`.
    pub table: Table,
}

impl PointResult {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            params: BTreeMap::new(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            table: Table::default(),
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
    /// Slopes between consecutive points, coarsest first.
    pub local_slopes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: String,
    pub kind: String,
    pub config_hash: String,
    pub points: Vec<PointResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl StudyReport {
    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks
            .iter()
            .chain(self.points.iter().flat_map(|p| &p.checks))
            .filter(|c| !c.pass)
            .collect()
    }
}

#[derive(Serialize)]
struct Environment {
    package: &'static str,
    version: &'static str,
    os: &'static str,
    arch: &'static str,
}

fn environment() -> Environment {
    Environment {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        os: std::env::consts::OS,
        arch: std::env::consts::ARCH,
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    report: &'a StudyReport,
    config: &'a StudyConfig,
    environment: Environment,
}

#[derive(Serialize)]
struct PointSummary<'a> {
    study: &'a str,
    config_hash: &'a str,
    point: &'a PointResult,
}

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub plot: PathBuf,
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

/// The study-level CSV: one row per point, parameters then metrics in key order.
pub fn study_table(points: &[PointResult]) -> Table {
    let mut params: Vec<&String> = points.iter().flat_map(|p| p.params.keys()).collect();
    params.sort();
    params.dedup();
    let mut metrics: Vec<&String> = points.iter().flat_map(|p| p.metrics.keys()).collect();
    metrics.sort();
    metrics.dedup();
    let mut table = Table {
        columns: params.iter().chain(&metrics).map(|s| s.to_string()).collect(),
        rows: Vec::new(),
    };
    for p in points {
        let row = params
            .iter()
            .map(|k| p.params.get(*k).copied().unwrap_or(f64::NAN))
            .chain(metrics.iter().map(|k| p.metrics.get(*k).copied().unwrap_or(f64::NAN)))
            .collect();
        table.rows.push(row);
    }
    table
}

fn study_csv(points: &[PointResult]) -> String {
    let table = study_table(points);
    let mut s = String::from("id,");
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for (p, row) in points.iter().zip(&table.rows) {
        s.push_str(&p.id);
        for x in row {
            s.push(',');
            s.push_str(&fmt_num(*x));
        }
        s.push('\n');
    }
    s
}

fn study_plot(report: &StudyReport, cfg: &StudyConfig) -> String {
    let table = study_table(&report.points);
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 900,650\n");
    s.push_str(&format!("set output '{}.png'\n", cfg.study_name()));
    s.push_str("set datafile separator ','\nset key left top\nset grid\n");
    match (table.column("eps"), table.column("error")) {
        (Some(x), Some(y)) => {
            s.push_str("set logscale xy\nset xlabel 'epsilon'\nset ylabel 'error at tau_eval'\n");
            let mut plot = format!(
                "plot 'report.csv' skip 1 using {}:{} with linespoints pt 7 title 'measured'",
                x + 2,
                y + 2
            );
            if let Some(fit) = &report.fit {
                let _ = writeln!(s, "slope = {}\nintercept = {}", fit.slope, fit.intercept);
                plot.push_str(", exp(intercept) * x**slope with lines title sprintf('fit, slope %.3f', slope)");
            }
            s.push_str(&plot);
            s.push('\n');
        }
        _ => {
            let _ = writeln!(s, "# {} has no rate data; see report.csv", cfg.study.tag());
        }
    }
    s
}

/// Time-series plot of a per-point table against its first column.
pub fn point_plot(point: &PointResult) -> String {
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 900,650\n");
    s.push_str(&format!("set output '{}.png'\n", point.id));
    s.push_str("set datafile separator ','\nset key autotitle columnhead\nset grid\nset logscale y\n");
    let cols = &point.table.columns;
    if cols.len() >= 2 {
        let _ = writeln!(s, "set xlabel '{}'", cols[0]);
        let series: Vec<String> = (2..=cols.len())
            .map(|c| format!("'report.csv' using 1:(abs(${c})) with linespoints"))
            .collect();
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    s
}

/// Writes a point's `report.csv`, `summary.json` and `plot.gp` into `dir`.
pub fn emit_point(dir: &Path, study: &str, config_hash: &str, point: &PointResult) -> Result<ReportFiles> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let files = ReportFiles {
        csv: dir.join("report.csv"),
        json: dir.join("summary.json"),
        plot: dir.join("plot.gp"),
    };
    write(&files.csv, &point.table.to_csv())?;
    write(
        &files.json,
        &to_json(&PointSummary {
            study,
            config_hash,
            point,
        }),
    )?;
    write(&files.plot, &point_plot(point))?;
    Ok(files)
}

/// Reads back a point written by [`emit_point`], if it was produced under `config_hash`.
pub fn load_point(dir: &Path, config_hash: &str) -> Result<Option<PointResult>> {
    #[derive(Deserialize)]
    struct Stored {
        config_hash: String,
        point: PointResult,
    }
    let path = dir.join("summary.json");
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    let stored: Stored = serde_json::from_str(&text).map_err(|e| LabError::Parse {
        path: path.clone(),
        message: e.to_string(),
    })?;
    Ok((stored.config_hash == config_hash).then_some(stored.point))
}

/// Writes the study-level `report.csv`, `summary.json` and `plot.gp` into `dir`.
pub fn emit_report(dir: &Path, cfg: &StudyConfig, report: &StudyReport) -> Result<ReportFiles> {
    if report.points.is_empty() {
        return Err(LabError::EmptyResults);
    }
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let files = ReportFiles {
        csv: dir.join("report.csv"),
        json: dir.join("summary.json"),
        plot: dir.join("plot.gp"),
    };
    write(&files.csv, &study_csv(&report.points))?;
    write(
        &files.json,
        &to_json(&Summary {
            report,
            config: cfg,
            environment: environment(),
        }),
    )?;
    write(&files.plot, &study_plot(report, cfg))?;
    Ok(files)
}
