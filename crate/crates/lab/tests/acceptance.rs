//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Rate sweeps resume from `<target>/tmp/acceptance` when a previous run with
//! the same configuration left its point summaries there; everything else is
//! recomputed on every run.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use landau_core::diagnostics::convergence_fit;
use landau_lab::{run_study, RunOptions, StudyConfig, StudyReport};

const EULER_SLOPE: [f64; 2] = [0.7, 1.3];
const ACOUSTIC_SLOPE: [f64; 2] = [0.35, 0.65];
const DRIFT_MAX: f64 = 1e-9;
const ENERGY_MARGIN: f64 = 1.0;
const BURNETT_TOLERANCE: f64 = 1e-6;
const BURNETT_DRIFT: f64 = 0.02;
const BURNETT_IDENTITY: f64 = 1e-6;
const TRANSPORT_IDENTITY: f64 = 1e-8;

fn config(name: &str) -> StudyConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    let mut cfg = StudyConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    cfg.acceptance.drift_max = DRIFT_MAX;
    cfg.acceptance.energy_margin = ENERGY_MARGIN;
    cfg.burnett.tolerance = BURNETT_TOLERANCE;
    cfg.burnett.max_drift = BURNETT_DRIFT;
    cfg.burnett.identity_tolerance = BURNETT_IDENTITY;
    cfg.burnett.transport_identity_tolerance = TRANSPORT_IDENTITY;
    cfg
}

fn out_dir() -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance")
}

fn run(cfg: &StudyConfig, out: &Path, resume: bool) -> StudyReport {
    let opts = RunOptions {
        out: out.to_path_buf(),
        resume,
    };
    run_study(cfg, &opts).unwrap_or_else(|e| panic!("{}: {e}", cfg.study_name()))
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn checks_with_prefix(report: &StudyReport, prefix: &str) -> Verdict {
    let checks: Vec<_> = report
        .points
        .iter()
        .flat_map(|p| &p.checks)
        .filter(|c| c.check_name.starts_with(prefix))
        .collect();
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.describe()).collect();
    Verdict {
        pass: !checks.is_empty() && failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} checks", checks.len())
        } else {
            failed.join("; ")
        },
    }
}

fn slope(report: &StudyReport, bracket: [f64; 2]) -> Verdict {
    let data: Vec<(f64, f64)> = report
        .points
        .iter()
        .map(|p| (p.params["eps"], p.metrics["error"]))
        .collect();
    let fit = convergence_fit(&data).expect("sweep errors admit a fit");
    let errors: Vec<String> = data.iter().map(|(e, r)| format!("{e}:{r:.4e}")).collect();
    Verdict {
        pass: fit.slope >= bracket[0] && fit.slope <= bracket[1],
        detail: format!(
            "slope {:.4} in [{}, {}], errors {}",
            fit.slope,
            bracket[0],
            bracket[1],
            errors.join(" ")
        ),
    }
}

fn energy_envelope(report: &StudyReport) -> Verdict {
    let mut points: Vec<_> = report.points.iter().collect();
    points.sort_by(|a, b| b.params["eps"].total_cmp(&a.params["eps"]));
    let k = ENERGY_MARGIN * points[0].metrics["e_n_over_eps2"];
    let worst = points[1..]
        .iter()
        .map(|p| p.metrics["e_n_over_eps2"])
        .fold(0.0f64, f64::max);
    Verdict {
        pass: points.len() >= 2 && worst <= k,
        detail: format!("max E_N/eps^2 {worst:.4} <= K {k:.4}"),
    }
}

fn same_bytes(a: &Path, b: &Path) -> bool {
    let same = matches!((std::fs::read(a), std::fs::read(b)), (Ok(x), Ok(y)) if x == y);
    if !same {
        eprintln!("differs: {} vs {}", a.display(), b.display());
    }
    same
}

fn tree(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if let Ok(rel) = path.strip_prefix(root) {
                out.push(rel.to_path_buf());
            }
        }
    }
    out.sort();
    out
}

/// Reruns studies in a fresh directory and compares every file byte for byte.
fn determinism(out: &Path, euler: &StudyConfig, fresh_studies: &[&StudyConfig]) -> (bool, usize) {
    let scratch = tempfile::tempdir().expect("temporary directory");
    let mut compared = 0;
    let mut ok = true;
    for cfg in fresh_studies {
        run(cfg, scratch.path(), false);
        let name = cfg.study_name();
        let files = tree(&out.join(&name));
        ok &= !files.is_empty() && files == tree(&scratch.path().join(&name));
        for f in files {
            ok &= same_bytes(&out.join(&name).join(&f), &scratch.path().join(&name).join(&f));
            compared += 1;
        }
    }
    // One sweep point rerun alone must reproduce the sweep's table and snapshots.
    let mut single = euler.clone();
    let eps = single.sweep.eps[0];
    single.sweep.eps = vec![eps];
    single.name = Some("euler-single".into());
    run(&single, scratch.path(), false);
    let point = format!("eps-{eps}");
    let sweep_dir = out.join(euler.study_name()).join(&point);
    let rerun_dir = scratch.path().join("euler-single").join(&point);
    let files: Vec<PathBuf> = tree(&sweep_dir)
        .into_iter()
        .filter(|f| f.extension().is_some_and(|e| e == "csv" || e == "llsnap"))
        .collect();
    ok &= !files.is_empty();
    for f in files {
        ok &= same_bytes(&sweep_dir.join(&f), &rerun_dir.join(&f));
        compared += 1;
    }
    (ok, compared)
}

fn main() -> ExitCode {
    let out = out_dir();
    let verify_cfg = config("verify-operators.toml");
    let burnett_cfg = config("burnett-table.toml");
    let fluid_cfg = config("fluid-acoustic.toml");
    let mut euler_cfg = config("euler-limit.toml");
    euler_cfg.acceptance.slope = Some(EULER_SLOPE);
    let mut acoustic_cfg = config("acoustic-limit.toml");
    acoustic_cfg.acceptance.slope = Some(ACOUSTIC_SLOPE);

    let verify = run(&verify_cfg, &out, false);
    let burnett = run(&burnett_cfg, &out, false);
    let fluid = run(&fluid_cfg, &out, false);
    let euler = run(&euler_cfg, &out, true);
    let acoustic = run(&acoustic_cfg, &out, true);

    let drift = euler
        .points
        .iter()
        .chain(&acoustic.points)
        .map(|p| p.metrics["drift"])
        .fold(0.0f64, f64::max);
    let (identical, compared) = determinism(&out, &euler_cfg, &[&verify_cfg, &fluid_cfg]);

    let verdicts = [
        ("operator property suite", checks_with_prefix(&verify, "operators:")),
        ("Burnett suite", checks_with_prefix(&burnett, "burnett:")),
        ("entropy and identity suite", checks_with_prefix(&verify, "entropy:")),
        ("acoustic solver invariants", checks_with_prefix(&fluid, "fluid:")),
        ("Euler-limit rate", slope(&euler, EULER_SLOPE)),
        ("acoustic-limit rate", slope(&acoustic, ACOUSTIC_SLOPE)),
        ("energy-functional envelope", energy_envelope(&euler)),
        (
            "conservation and determinism",
            Verdict {
                pass: drift <= DRIFT_MAX && identical,
                detail: format!("max drift {drift:.3e} <= {DRIFT_MAX:e}, {compared} files byte-identical: {identical}"),
            },
        ),
    ];
    let mut all = true;
    for (i, (name, v)) in verdicts.iter().enumerate() {
        all &= v.pass;
        println!("{} {}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("results under {}", out.display());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
