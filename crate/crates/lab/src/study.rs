use std::path::{Path, PathBuf};

use landau_core::collision::{CollisionOperator, SigmaField};
use landau_core::diagnostics::{
    convergence_fit, energy_functionals, entropy_pair, l2_norm, EnergyInput, EnergyOptions,
};
use landau_core::fluid::{euler_solve, simple_wave, AcousticState, EulerOptions, EulerSolution, Spectral};
use landau_core::kinetic::{run_acoustic_limit, run_euler_limit};
use landau_core::macro_micro::{BurnettTable, InverseOptions};
use landau_core::maxwellian::FluidState;
use rayon::prelude::*;

use crate::config::{Point, StudyConfig, StudyKind};
use crate::error::{io_err, LabError, Result};
use crate::report::{emit_point, emit_report, load_point, Check, FitSummary, PointResult, StudyReport, Table};
use crate::snapshot::{write_field, write_fluid};
use crate::suites;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Reuse points whose on-disk summary was produced by the same configuration.
    pub resume: bool,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            resume: false,
        }
    }
}

/// Runs every point of `cfg`, writes per-point and study-level reports under
/// `<out>/<study>/`, and evaluates the acceptance checks.
pub fn run_study(cfg: &StudyConfig, opts: &RunOptions) -> Result<StudyReport> {
    cfg.validate()?;
    let root = opts.out.join(cfg.study_name());
    std::fs::create_dir_all(&root).map_err(io_err(&root))?;
    let hash = cfg.hash();
    let points = match cfg.study {
        StudyKind::EulerLimit | StudyKind::AcousticLimit => run_sweep(cfg, &root, &hash, opts.resume)?,
        StudyKind::VerifyOperators => vec![single(cfg, &root, &hash, opts.resume, "suite", suites::verify_operators)?],
        StudyKind::BurnettTable => {
            let id = format!("n_v-{}", cfg.burnett.n_v);
            vec![single(cfg, &root, &hash, opts.resume, &id, suites::burnett_table)?]
        }
        StudyKind::FluidRun => {
            let id = match cfg.fluid.model {
                crate::config::FluidModel::Euler => "euler",
                crate::config::FluidModel::Acoustic => "acoustic",
            };
            vec![single(cfg, &root, &hash, opts.resume, id, suites::fluid_run)?]
        }
    };
    let (fit, checks) = if cfg.study.is_sweep() {
        sweep_checks(cfg, &points)?
    } else {
        (None, Vec::new())
    };
    let pass = checks.iter().chain(points.iter().flat_map(|p| &p.checks)).all(|c| c.pass)
        && fit.as_ref().is_none_or(|f| f.pass);
    let report = StudyReport {
        study: cfg.study_name(),
        kind: cfg.study.tag().into(),
        config_hash: hash,
        points,
        fit,
        checks,
        pass,
    };
    emit_report(&root, cfg, &report)?;
    Ok(report)
}

type SuiteFn = fn(&StudyConfig, &Path) -> Result<PointResult>;

fn single(cfg: &StudyConfig, root: &Path, hash: &str, resume: bool, id: &str, run: SuiteFn) -> Result<PointResult> {
    let dir = root.join(id);
    if resume {
        if let Some(p) = load_point(&dir, hash)? {
            return Ok(p);
        }
    }
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut p = run(cfg, &dir)?;
    p.id = id.to_string();
    emit_point(&dir, &cfg.study_name(), hash, &p)?;
    Ok(p)
}

/// Inputs shared by all points of a sweep.
struct SweepContext {
    op: CollisionOperator,
    sigma: SigmaField,
    spectral: Spectral,
    background: Option<EulerSolution>,
    table: Option<BurnettTable>,
}

fn context(cfg: &StudyConfig) -> Result<SweepContext> {
    let kc = cfg.kinetic_config(cfg.points()[0])?;
    let op = CollisionOperator::new(&kc.velocity)?;
    let sigma = op.sigma_field();
    let spectral = Spectral::new(&kc.space);
    let (background, table) = if cfg.study == StudyKind::EulerLimit {
        let bg = euler_solve(
            &simple_wave(&kc.space, cfg.run.amplitude),
            cfg.run.tau,
            &kc.space,
            &EulerOptions {
                output_times: cfg.run_output_times(),
                ..Default::default()
            },
        )?;
        let table = BurnettTable::compute(&op, InverseOptions::default())?;
        (Some(bg), Some(table))
    } else {
        (None, None)
    };
    Ok(SweepContext {
        op,
        sigma,
        spectral,
        background,
        table,
    })
}

fn run_sweep(cfg: &StudyConfig, root: &Path, hash: &str, resume: bool) -> Result<Vec<PointResult>> {
    let points = cfg.points();
    let mut done: Vec<Option<PointResult>> = vec![None; points.len()];
    if resume {
        for (slot, p) in done.iter_mut().zip(&points) {
            *slot = load_point(&root.join(p.id(cfg.study)), hash)?;
        }
    }
    if done.iter().all(Option::is_some) {
        return Ok(done.into_iter().flatten().collect());
    }
    let ctx = context(cfg)?;
    let compute = |i: usize| -> Result<PointResult> {
        if let Some(p) = &done[i] {
            return Ok(p.clone());
        }
        let point = points[i];
        let id = point.id(cfg.study);
        let dir = root.join(&id);
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let result = match cfg.study {
            StudyKind::EulerLimit => euler_point(cfg, &ctx, point, &dir),
            _ => acoustic_point(cfg, &ctx, point, &dir),
        };
        let mut p = result.map_err(|e| match e {
            LabError::Core(source) => LabError::Point { point: id.clone(), source },
            other => other,
        })?;
        p.id = id;
        emit_point(&dir, &cfg.study_name(), hash, &p)?;
        Ok(p)
    };
    if cfg.parallel_points {
        (0..points.len()).into_par_iter().map(compute).collect()
    } else {
        (0..points.len()).map(compute).collect()
    }
}

fn perturbation(state: &FluidState, background: &FluidState) -> [Vec<f64>; 5] {
    let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<f64>>();
    [
        d(&state.rho, &background.rho),
        d(&state.u[0], &background.u[0]),
        d(&state.u[1], &background.u[1]),
        d(&state.u[2], &background.u[2]),
        d(&state.theta, &background.theta),
    ]
}

fn is_eval_time(cfg: &StudyConfig, t: f64) -> bool {
    (t - cfg.run.tau_eval).abs() <= 1e-12 * (1.0 + t)
}

fn snapshot_dir(dir: &Path) -> Result<PathBuf> {
    let s = dir.join("snapshots");
    std::fs::create_dir_all(&s).map_err(io_err(&s))?;
    Ok(s)
}

fn euler_point(cfg: &StudyConfig, ctx: &SweepContext, point: Point, dir: &Path) -> Result<PointResult> {
    let kc = cfg.kinetic_config(point)?;
    let background = ctx.background.as_ref().expect("euler sweep has a background");
    let table = ctx.table.as_ref().expect("euler sweep has a Burnett table");
    let run = run_euler_limit(&ctx.op, &kc, background, table)?;
    let eps = point.eps;
    let energy_opts = EnergyOptions {
        order: cfg.diagnostics.energy_order,
        max_velocity_order: cfg.diagnostics.max_velocity_order,
    };
    let snaps = if cfg.run.write_snapshots { Some(snapshot_dir(dir)?) } else { None };
    let mut table_out = Table::new(&[
        "time",
        "distance_l2",
        "distance_linf",
        "e_n",
        "d_n",
        "e_n_over_eps2",
        "g_norm",
        "gbar_norm",
        "f_norm",
        "micro_defect",
        "entropy",
    ]);
    let mut p = PointResult::new(point.id(cfg.study));
    p.params.insert("eps".into(), eps);
    let mut error = None;
    let mut sup: f64 = 0.0;
    let mut e_ratio: f64 = 0.0;
    let mut micro: f64 = 0.0;
    for (i, s) in run.snapshots.iter().enumerate() {
        let pert = perturbation(&s.fluid, &s.background);
        let input = EnergyInput {
            fluid: [&pert[0], &pert[1], &pert[2], &pert[3], &pert[4]],
            f: &s.f,
            eps,
        };
        let energy = energy_functionals(&input, &ctx.op, &ctx.sigma, &ctx.spectral, energy_opts)?;
        let eta = entropy_pair(&s.fluid, &s.background)?;
        let entropy = kc.space.quad(&eta.eta);
        table_out.push(vec![
            s.time,
            s.distance.0,
            s.distance.1,
            energy.e_n,
            energy.d_n,
            energy.e_n / (eps * eps),
            l2_norm(&s.g),
            l2_norm(&s.gbar),
            l2_norm(&s.f),
            s.micro_defect,
            entropy,
        ]);
        sup = sup.max(s.distance.0);
        e_ratio = e_ratio.max(energy.e_n / (eps * eps));
        micro = micro.max(s.micro_defect);
        if is_eval_time(cfg, s.time) {
            error = Some(s.distance);
        }
        if let Some(sd) = &snaps {
            write_field(&sd.join(format!("total-{i:03}.llsnap")), &s.total, &format!("F at t={}", s.time))?;
            write_fluid(
                &sd.join(format!("fluid-{i:03}.llsnap")),
                &s.fluid,
                &kc.space,
                s.time,
                "kinetic moments",
            )?;
            write_fluid(
                &sd.join(format!("background-{i:03}.llsnap")),
                &s.background,
                &kc.space,
                s.time,
                "Euler background",
            )?;
        }
    }
    let error = error.ok_or_else(|| LabError::Config("tau_eval is not an output time".into()))?;
    p.metrics.insert("error".into(), error.0);
    p.metrics.insert("error_linf".into(), error.1);
    p.metrics.insert("error_sup".into(), sup);
    p.metrics.insert("e_n_over_eps2".into(), e_ratio);
    p.metrics.insert("micro_defect".into(), micro);
    p.metrics.insert("drift".into(), run.conservation_drift);
    p.metrics.insert("steps".into(), run.steps as f64);
    p.metrics.insert("dt".into(), run.dt);
    p.metrics.insert("min_ratio".into(), run.min_ratio);
    p.checks.push(Check::at_most("conservation drift", run.conservation_drift, cfg.acceptance.drift_max));
    p.checks.push(Check::at_most("microscopic moments of G", micro, 1e-10));
    p.table = table_out;
    Ok(p)
}

fn acoustic_point(cfg: &StudyConfig, ctx: &SweepContext, point: Point, dir: &Path) -> Result<PointResult> {
    let kc = cfg.kinetic_config(point)?;
    let a = &cfg.acoustic;
    let k = a.mode as f64;
    let init = AcousticState::from_fn(&kc.space, point.delta, |x| {
        let c = (k * x[0]).cos();
        (a.rho * c, [a.phi * c, 0.0, 0.0], a.theta * c)
    });
    let run = run_acoustic_limit(&ctx.op, &kc, &init)?;
    let snaps = if cfg.run.write_snapshots { Some(snapshot_dir(dir)?) } else { None };
    let mut table_out = Table::new(&["time", "error_l2", "error_linf", "fluctuation_norm", "target_norm"]);
    let mut p = PointResult::new(point.id(cfg.study));
    p.params.insert("eps".into(), point.eps);
    p.params.insert("delta".into(), point.delta);
    let mut error = None;
    let mut sup: f64 = 0.0;
    for (i, s) in run.snapshots.iter().enumerate() {
        table_out.push(vec![s.time, s.error.0, s.error.1, l2_norm(&s.fluctuation), l2_norm(&s.target)]);
        sup = sup.max(s.error.0);
        if is_eval_time(cfg, s.time) {
            error = Some(s.error);
        }
        if let Some(sd) = &snaps {
            write_field(
                &sd.join(format!("fluctuation-{i:03}.llsnap")),
                &s.fluctuation,
                &format!("(F - mu)/(delta sqrt mu) at t={}", s.time),
            )?;
        }
    }
    let error = error.ok_or_else(|| LabError::Config("tau_eval is not an output time".into()))?;
    p.metrics.insert("error".into(), error.0);
    p.metrics.insert("error_linf".into(), error.1);
    p.metrics.insert("error_sup".into(), sup);
    p.metrics.insert("drift".into(), run.conservation_drift);
    p.metrics.insert("steps".into(), run.steps as f64);
    p.metrics.insert("dt".into(), run.dt);
    p.metrics.insert("min_ratio".into(), run.min_ratio);
    p.checks.push(Check::at_most("conservation drift", run.conservation_drift, cfg.acceptance.drift_max));
    p.table = table_out;
    Ok(p)
}

fn sweep_checks(cfg: &StudyConfig, points: &[PointResult]) -> Result<(Option<FitSummary>, Vec<Check>)> {
    let mut checks = Vec::new();
    let data: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.params["eps"], p.metrics["error"]))
        .collect();
    let [lo, hi] = cfg.slope_bracket();
    let fit = if data.len() >= 3 {
        let f = convergence_fit(&data)?;
        let mut sorted = data.clone();
        sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        Some(FitSummary {
            local_slopes: sorted
                .windows(2)
                .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
                .collect(),
            slope: f.slope,
            intercept: f.intercept,
            residual: f.residual,
            lower: lo,
            upper: hi,
            pass: f.slope >= lo && f.slope <= hi,
        })
    } else {
        None
    };
    if let Some(f) = &fit {
        checks.push(Check::within("fitted slope", f.slope, lo, hi));
    }
    if cfg.study == StudyKind::EulerLimit && points.len() >= 2 {
        let mut by_eps: Vec<&PointResult> = points.iter().collect();
        by_eps.sort_by(|a, b| b.params["eps"].total_cmp(&a.params["eps"]));
        let k = cfg.acceptance.energy_margin * by_eps[0].metrics["e_n_over_eps2"];
        let worst = by_eps[1..]
            .iter()
            .map(|p| p.metrics["e_n_over_eps2"])
            .fold(0.0f64, f64::max);
        checks.push(Check::at_most("energy envelope max E_N/eps^2 vs frozen K", worst, k));
    }
    let drift = points.iter().map(|p| p.metrics["drift"]).fold(0.0f64, f64::max);
    checks.push(Check::at_most("max conservation drift", drift, cfg.acceptance.drift_max));
    Ok((fit, checks))
}
