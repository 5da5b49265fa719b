use std::fmt;
use std::path::Path;

use landau_core::kinetic::{InitialMode, KineticRunConfig, TimeStepPolicy};
use landau_core::phase_space::{build_velocity_grid, SpatialGrid};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_err, LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    EulerLimit,
    AcousticLimit,
    VerifyOperators,
    BurnettTable,
    FluidRun,
}

impl StudyKind {
    pub fn tag(&self) -> &'static str {
        match self {
            StudyKind::EulerLimit => "euler-limit",
            StudyKind::AcousticLimit => "acoustic-limit",
            StudyKind::VerifyOperators => "verify-operators",
            StudyKind::BurnettTable => "burnett-table",
            StudyKind::FluidRun => "fluid-run",
        }
    }

    pub fn is_sweep(&self) -> bool {
        matches!(self, StudyKind::EulerLimit | StudyKind::AcousticLimit)
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// How `δ` is chosen per sweep point in acoustic studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaRule {
    Fixed,
    SqrtEpsilon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub eps: Vec<f64>,
    pub delta_rule: DeltaRule,
    /// Used by the `fixed` rule.
    pub delta: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            eps: vec![0.16, 0.08, 0.04, 0.02],
            delta_rule: DeltaRule::SqrtEpsilon,
            delta: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub space_dim: usize,
    pub n_x: usize,
    pub period: f64,
    pub n_v: usize,
    pub extent: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            space_dim: 1,
            n_x: 32,
            period: 2.0 * std::f64::consts::PI,
            n_v: 21,
            extent: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tau: f64,
    /// Time at which rate-fit errors are taken.
    pub tau_eval: f64,
    pub output_times: Vec<f64>,
    /// Euler background amplitude.
    pub amplitude: f64,
    pub cfl: f64,
    pub eps_fraction: f64,
    pub fixed_dt: Option<f64>,
    pub penalty_factor: f64,
    pub negativity_tolerance: f64,
    pub write_snapshots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tau: 0.3,
            tau_eval: 0.3,
            output_times: vec![0.1, 0.2],
            amplitude: 0.01,
            cfl: 0.9,
            eps_fraction: 0.1,
            fixed_dt: None,
            penalty_factor: 2.0,
            negativity_tolerance: 1e-6,
            write_snapshots: true,
        }
    }
}

/// Acoustic initial data `ϱ_0 = a_ρ cos kx_1`, `φ_0 = a_φ cos kx_1 e_1`, `ϑ_0 = a_θ cos kx_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcousticConfig {
    pub mode: usize,
    pub rho: f64,
    pub phi: f64,
    pub theta: f64,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        Self {
            mode: 1,
            rho: 1.0,
            phi: 0.0,
            theta: 2.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub energy_order: usize,
    pub max_velocity_order: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            energy_order: 3,
            max_velocity_order: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceConfig {
    /// Accepted fitted-slope interval; the study kind supplies the default.
    pub slope: Option<[f64; 2]>,
    pub drift_max: f64,
    /// `K = energy_margin · max_t E_N/ε²` at the coarsest `ε`.
    pub energy_margin: f64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            slope: None,
            drift_max: 1e-9,
            energy_margin: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BurnettConfig {
    /// Grid of the full Burnett set; the first entry of `richardson` sizes may differ.
    pub n_v: usize,
    pub richardson: Vec<usize>,
    pub theta: Vec<f64>,
    pub tolerance: f64,
    pub max_drift: f64,
    pub identity_tolerance: f64,
    pub transport_identity_tolerance: f64,
}

impl Default for BurnettConfig {
    fn default() -> Self {
        Self {
            n_v: 27,
            richardson: vec![23, 25, 27],
            theta: vec![1.2, 1.5, 1.8],
            tolerance: 1e-6,
            max_drift: 0.02,
            identity_tolerance: 1e-6,
            transport_identity_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub n_v: usize,
    /// Coarse and fine grid for the `Q(M, M)` refinement check (`h` halves).
    pub refinement: [usize; 2],
    pub sigma_n_v: usize,
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_v: 17,
            refinement: [13, 25],
            sigma_n_v: 49,
            samples: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluidModel {
    Euler,
    Acoustic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluidConfig {
    pub model: FluidModel,
    pub tau: f64,
    pub output_times: Vec<f64>,
    pub cfl: f64,
    pub steepening_factor: f64,
    pub sobolev_order: f64,
}

impl Default for FluidConfig {
    fn default() -> Self {
        Self {
            model: FluidModel::Euler,
            tau: 1.0,
            output_times: vec![0.25, 0.5, 0.75],
            cfl: 0.4,
            steepening_factor: 20.0,
            sobolev_order: 2.0,
        }
    }
}

/// A complete study description, read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Runs sweep points concurrently.
    #[serde(default)]
    pub parallel_points: bool,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub acoustic: AcousticConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub acceptance: AcceptanceConfig,
    #[serde(default)]
    pub burnett: BurnettConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub fluid: FluidConfig,
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub eps: f64,
    pub delta: f64,
}

impl Point {
    pub fn id(&self, kind: StudyKind) -> String {
        match kind {
            StudyKind::AcousticLimit => format!("eps-{}_delta-{}", self.eps, self.delta),
            _ => format!("eps-{}", self.eps),
        }
    }
}

impl StudyConfig {
    /// Defaults for `kind`; the acoustic sweep uses `ε ∈ {0.16, 0.04, 0.01}`.
    pub fn new(kind: StudyKind) -> Self {
        let mut cfg = Self {
            study: kind,
            name: None,
            seed: 0,
            parallel_points: false,
            sweep: SweepConfig::default(),
            grid: GridConfig::default(),
            run: RunConfig::default(),
            acoustic: AcousticConfig::default(),
            diagnostics: DiagnosticsConfig::default(),
            acceptance: AcceptanceConfig::default(),
            burnett: BurnettConfig::default(),
            verify: VerifyConfig::default(),
            fluid: FluidConfig::default(),
        };
        if kind == StudyKind::AcousticLimit {
            cfg.sweep.eps = vec![0.16, 0.04, 0.01];
            cfg.run.negativity_tolerance = 1e-4;
        }
        cfg
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Parse {
            path: "<string>".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| LabError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Directory name under the output root.
    pub fn study_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.study.tag().to_string())
    }

    pub fn slope_bracket(&self) -> [f64; 2] {
        self.acceptance.slope.unwrap_or(match self.study {
            StudyKind::AcousticLimit => [0.35, 0.65],
            _ => [0.7, 1.3],
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(LabError::Config(m.to_string()));
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
                return bad("name must be a plain directory name");
            }
        }
        if self.study.is_sweep() {
            if self.sweep.eps.is_empty() {
                return bad("sweep.eps must not be empty");
            }
            if self.sweep.eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
                return bad("sweep.eps entries must be positive");
            }
            let mut sorted = self.sweep.eps.clone();
            sorted.sort_by(|a, b| a.total_cmp(b));
            sorted.dedup();
            if sorted.len() != self.sweep.eps.len() {
                return bad("sweep.eps entries must be distinct");
            }
            if self.study == StudyKind::AcousticLimit
                && self.sweep.delta_rule == DeltaRule::Fixed
                && !(self.sweep.delta > 0.0)
            {
                return bad("sweep.delta must be positive");
            }
            if !(self.run.tau > 0.0) {
                return bad("run.tau must be positive");
            }
            if !(self.run.tau_eval > 0.0 && self.run.tau_eval <= self.run.tau) {
                return bad("run.tau_eval must lie in (0, tau]");
            }
            if self.run.output_times.iter().any(|&t| !(t >= 0.0 && t <= self.run.tau)) {
                return bad("run.output_times must lie in [0, tau]");
            }
            let [lo, hi] = self.slope_bracket();
            if !(lo < hi) {
                return bad("acceptance.slope must be an increasing pair");
            }
            if !(self.acceptance.energy_margin >= 1.0) {
                return bad("acceptance.energy_margin must be at least 1");
            }
        }
        if self.study == StudyKind::FluidRun {
            if !(self.fluid.tau > 0.0) {
                return bad("fluid.tau must be positive");
            }
            if self.fluid.output_times.iter().any(|&t| !(t >= 0.0 && t <= self.fluid.tau)) {
                return bad("fluid.output_times must lie in [0, tau]");
            }
        }
        if self.study == StudyKind::BurnettTable {
            if self.burnett.richardson.len() < 2 {
                return bad("burnett.richardson needs at least two grids");
            }
            if self.burnett.theta.iter().any(|&t| !(t > 0.0)) {
                return bad("burnett.theta entries must be positive");
            }
        }
        if self.acoustic.mode == 0 {
            return bad("acoustic.mode must be at least 1");
        }
        self.spatial_grid()?;
        build_velocity_grid(self.grid.extent, self.grid.n_v)?;
        Ok(())
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        Ok(SpatialGrid::new(self.grid.space_dim, self.grid.n_x, self.grid.period)?)
    }

    pub fn points(&self) -> Vec<Point> {
        self.sweep
            .eps
            .iter()
            .map(|&eps| Point {
                eps,
                delta: match (self.study, self.sweep.delta_rule) {
                    (StudyKind::AcousticLimit, DeltaRule::SqrtEpsilon) => eps.sqrt(),
                    (StudyKind::AcousticLimit, DeltaRule::Fixed) => self.sweep.delta,
                    _ => 0.0,
                },
            })
            .collect()
    }

    /// Output times of a sweep run, always containing `tau_eval`.
    pub fn run_output_times(&self) -> Vec<f64> {
        let mut t = self.run.output_times.clone();
        t.push(self.run.tau_eval);
        t.sort_by(|a, b| a.total_cmp(b));
        t.dedup();
        t
    }

    pub fn kinetic_config(&self, point: Point) -> Result<KineticRunConfig> {
        let cfg = KineticRunConfig {
            eps: point.eps,
            delta: point.delta,
            amplitude: self.run.amplitude,
            tau: self.run.tau,
            output_times: self.run_output_times(),
            step: TimeStepPolicy {
                cfl: self.run.cfl,
                eps_fraction: self.run.eps_fraction,
                fixed_dt: self.run.fixed_dt,
            },
            mode: if self.study == StudyKind::AcousticLimit {
                InitialMode::AcousticLimit
            } else {
                InitialMode::EulerLimit
            },
            space: self.spatial_grid()?,
            velocity: build_velocity_grid(self.grid.extent, self.grid.n_v)?,
            penalty_factor: self.run.penalty_factor,
            negativity_tolerance: self.run.negativity_tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configuration serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
