//! The single-run studies: operator properties, the Burnett table, and the
//! standalone fluid solvers.

use std::path::Path;

use landau_core::collision::{CollisionOperator, ConvolutionPath};
use landau_core::diagnostics::{entropy_equivalence_check, entropy_pair, entropy_balance_residual};
use landau_core::fluid::{acoustic_exact, acoustic_speed, euler_solve, simple_wave, AcousticState, EulerOptions, Spectral};
use landau_core::macro_micro::{
    correction_gbar, correction_gbar_direct, hydrodynamic_identities, p1_transport_identity_check,
    transport_coefficients, BurnettSet, Gradients, InverseOptions, LmInverse, MacroBasis,
};
use landau_core::maxwellian::{invariant_defect, maxwellian, FluidState, MaxwellState};
use landau_core::phase_space::{SpatialGrid, VelocityGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{FluidModel, StudyConfig};
use crate::error::{io_err, Result};
use crate::report::{fmt_num, Check, PointResult, Table};
use crate::snapshot::write_fluid;

/// `σ(0)` of the continuum operator at the global Maxwellian.
pub const SIGMA_ORIGIN: f64 = 0.5319;

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    max_abs(&sub(a, b)) / max_abs(a).max(max_abs(b)).max(1e-300)
}

fn velocity(extent: f64, n: usize) -> Result<VelocityGrid> {
    Ok(VelocityGrid::new(extent, n)?)
}

/// `M (1 + a·noise)` with uniform noise in `[−1, 1]`.
fn perturbed(m: &[f64], a: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    m.iter().map(|x| x * (1.0 + a * rng.gen_range(-1.0..=1.0))).collect()
}

fn test_state() -> MaxwellState {
    MaxwellState::new(1.1, [0.3, -0.2, 0.1], 1.3)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

/// Conservation, refinement, symmetry, kernel, projector, `σ` and entropy checks.
pub fn verify_operators(cfg: &StudyConfig, _dir: &Path) -> Result<PointResult> {
    let v = &cfg.verify;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut p = PointResult::new("suite");
    let extent = cfg.grid.extent;
    let grid = velocity(extent, v.n_v)?;
    let op = CollisionOperator::new(&grid)?;
    let mu = op.mu().to_vec();
    p.params.insert("n_v".into(), v.n_v as f64);

    let mut defect: f64 = 0.0;
    for _ in 0..v.samples {
        let f1 = perturbed(&mu, 0.5, &mut rng);
        let f2 = perturbed(&maxwellian(&test_state(), &grid)?, 0.5, &mut rng);
        let q = op.collision_q(&f1, &f2)?;
        let d = invariant_defect(&q, &grid);
        for (l, psi) in op.invariants().all().iter().enumerate() {
            let scale: f64 = q.iter().zip(psi).map(|(a, b)| (a * b).abs()).sum::<f64>() * grid.weight();
            defect = defect.max(d[l].abs() / scale.max(1e-300));
        }
    }
    p.checks.push(Check::at_most("operators: invariant defect of Q", defect, 1e-12));

    let mut refinement = Table::new(&["n_v", "h", "residual"]);
    let mut residuals = Vec::new();
    for &n in &v.refinement {
        let g = velocity(extent, n)?;
        let o = CollisionOperator::new(&g)?;
        let m = maxwellian(&test_state(), &g)?;
        let r = max_abs(&o.collision_q(&m, &m)?);
        refinement.push(vec![n as f64, g.spacing(), r]);
        residuals.push(r);
    }
    let ratio = residuals[0] / residuals[1];
    p.metrics.insert("q_mm_ratio".into(), ratio);
    p.checks.push(Check::within("operators: Q(M,M) refinement ratio", ratio, 2.8, 5.2));

    let state = test_state();
    let m = maxwellian(&state, &grid)?;
    let mut sym: f64 = 0.0;
    let mut sign: f64 = f64::NEG_INFINITY;
    for _ in 0..v.samples {
        let g = perturbed(&m, 1.0, &mut rng);
        let h = perturbed(&m, 1.0, &mut rng);
        let lg = op.linearized_lm(&g, &state)?;
        let lh = op.linearized_lm(&h, &state)?;
        let a = grid.dot_weighted(&lg, &h, &m);
        let b = grid.dot_weighted(&g, &lh, &m);
        let scale = grid.dot_weighted(&lg, &lg, &m).sqrt() * grid.dot_weighted(&h, &h, &m).sqrt();
        sym = sym.max((a - b).abs() / scale.max(1e-300));
        sign = sign.max(grid.dot_weighted(&lg, &g, &m) / scale.max(1e-300));
    }
    p.checks.push(Check::at_most("operators: L_M self-adjointness", sym, 1e-8));
    p.checks.push(Check::at_most("operators: <L_M g, g/M> relative", sign, 1e-12));

    let sqrt_mu: Vec<f64> = mu.iter().map(|x| x.sqrt()).collect();
    let comps = grid.components();
    let mut kernel = vec![sqrt_mu.clone()];
    for c in &comps {
        kernel.push(c.iter().zip(&sqrt_mu).map(|(a, b)| a * b).collect());
    }
    kernel.push(
        (0..grid.len())
            .map(|q| (comps[0][q].powi(2) + comps[1][q].powi(2) + comps[2][q].powi(2)) * sqrt_mu[q])
            .collect(),
    );
    let mut kernel_res: f64 = 0.0;
    for phi in &kernel {
        kernel_res = kernel_res.max(max_abs(&op.script_l(phi)?) / max_abs(phi));
    }
    let h2 = grid.spacing().powi(2);
    p.checks.push(Check::at_most("operators: script-L kernel residual", kernel_res, h2));

    let shift: Vec<f64> = m.iter().zip(&mu).map(|(a, b)| (a - b) / b.sqrt()).collect();
    let mut ident: f64 = 0.0;
    for _ in 0..v.samples {
        let f: Vec<f64> = sqrt_mu.iter().map(|s| s * rng.gen_range(-1.0..=1.0)).collect();
        let sf: Vec<f64> = f.iter().zip(&sqrt_mu).map(|(a, b)| a * b).collect();
        let lhs: Vec<f64> = op
            .linearized_general(&sf, &m, op.mu_reference())?
            .iter()
            .zip(&sqrt_mu)
            .map(|(a, b)| a / b)
            .collect();
        let l = op.script_l(&f)?;
        let g1 = op.gamma(&shift, &f)?;
        let g2 = op.gamma(&f, &shift)?;
        let rhs: Vec<f64> = (0..f.len()).map(|q| l[q] + g1[q] + g2[q]).collect();
        ident = ident.max(rel(&lhs, &rhs));
    }
    p.checks.push(Check::at_most("operators: L_M versus script-L plus Gamma", ident, 1e-10));

    let basis = MacroBasis::new(state, &grid)?;
    let mut proj: f64 = 0.0;
    for _ in 0..v.samples {
        let h = perturbed(&m, 1.0, &mut rng);
        let p0 = basis.project_p0(&h);
        let p1 = basis.project_p1(&h);
        let scale = max_abs(&h);
        proj = proj
            .max(max_abs(&sub(&basis.project_p0(&p0), &p0)) / scale)
            .max(max_abs(&basis.project_p0(&p1)) / scale)
            .max(max_abs(&basis.project_p1(&p0)) / scale)
            .max(max_abs(&sub(&h, &p0.iter().zip(&p1).map(|(a, b)| a + b).collect::<Vec<_>>())) / scale);
    }
    p.checks.push(Check::at_most("operators: projector algebra", proj, 1e-10));

    let sg = velocity(extent, v.sigma_n_v)?;
    let sigma = CollisionOperator::new(&sg)?.sigma_field();
    let c = sg.n() / 2;
    let s0 = sigma.at(sg.index(c, c, c));
    let mut s_err: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { SIGMA_ORIGIN } else { 0.0 };
            s_err = s_err.max((s0[i][j] - target).abs());
        }
    }
    p.metrics.insert("sigma_origin".into(), s0[0][0]);
    p.checks.push(Check::at_most("operators: sigma(0) - 0.5319 I", s_err, 1e-3));
    p.checks.push(Check::at_most(
        "operators: nodes where sigma is not positive definite",
        op.sigma_field().non_positive_nodes().len() as f64,
        0.0,
    ));

    let small = velocity(3.0, 7)?;
    let fft = CollisionOperator::new(&small)?;
    let direct = fft.clone().with_path(ConvolutionPath::Direct);
    let sm = maxwellian(&MaxwellState::global(), &small)?;
    let a = perturbed(&sm, 0.5, &mut rng);
    let b = perturbed(&sm, 0.5, &mut rng);
    let path = rel(&fft.collision_q(&a, &b)?, &direct.collision_q(&a, &b)?);
    p.checks.push(Check::at_most("operators: FFT versus direct convolution", path, 1e-10));

    entropy_checks(cfg, &mut rng, &mut p)?;
    p.table = refinement;
    Ok(p)
}

fn entropy_checks(cfg: &StudyConfig, rng: &mut ChaCha8Rng, p: &mut PointResult) -> Result<()> {
    let space = SpatialGrid::line(cfg.grid.n_x)?;
    let n = space.len();
    let mut box_state = |lo: f64, hi: f64, ulim: f64| -> MaxwellState {
        MaxwellState::new(
            rng.gen_range(lo..=hi),
            [0; 3].map(|_| rng.gen_range(-ulim..=ulim)),
            1.5 * rng.gen_range(lo..=hi),
        )
    };
    let states: Vec<MaxwellState> = (0..n).map(|_| box_state(0.5, 2.0, 1.0)).collect();
    let others: Vec<MaxwellState> = (0..n).map(|_| box_state(0.5, 2.0, 1.0)).collect();
    let a = FluidState::from_states(&states);
    let b = FluidState::from_states(&others);
    let same = max_abs(&entropy_pair(&a, &a)?.eta);
    let apart = entropy_pair(&a, &b)?.eta.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    p.checks.push(Check::at_most("entropy: eta of equal states", same, 0.0));
    p.checks.push(Check::at_least("entropy: smallest eta of distinct states", apart, f64::MIN_POSITIVE));

    let bg = FluidState::uniform(&space, MaxwellState::global());
    let near: Vec<MaxwellState> = (0..n).map(|_| box_state(0.9, 1.1, 0.05)).collect();
    let (lo, hi) = entropy_equivalence_check(&FluidState::from_states(&near), &bg)?;
    p.metrics.insert("entropy_ratio_min".into(), lo);
    p.metrics.insert("entropy_ratio_max".into(), hi);
    p.checks.push(Check::at_most("entropy: equivalence ratio spread", hi / lo, 3.0));

    let sp = Spectral::new(&space);
    let background = FluidState::from_fn(&space, |x| {
        MaxwellState::new(1.0 + 0.2 * x[0].sin(), [0.1 * x[0].cos(), 0.0, 0.0], 1.5 + 0.1 * (2.0 * x[0]).sin())
    });
    let state = FluidState::from_fn(&space, |x| {
        MaxwellState::new(1.05 + 0.1 * x[0].cos(), [0.05 * x[0].sin(), 0.02, -0.01], 1.4 + 0.1 * x[0].cos())
    });
    let residual = max_abs(&entropy_balance_residual(&state, &background, &sp)?);
    p.checks.push(Check::at_most("entropy: relative-entropy balance identity", residual, 1e-8));
    Ok(())
}

/// A microscopic source `P_1(M·poly)` with a random quadratic polynomial in `w`.
fn random_source(basis: &MacroBasis, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let coef: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let grid = basis.grid();
    let raw: Vec<f64> = (0..grid.len())
        .map(|q| {
            let w = basis.state.reduced(grid.velocity(q));
            let w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
            let poly = coef[0] * w[0] * w2
                + coef[1] * w[1] * w2
                + coef[2] * w[2] * w2
                + coef[3] * w[0] * w[1]
                + coef[4] * w[0] * w[2]
                + coef[5] * w[1] * w[2]
                + coef[6] * (w[0] * w[0] - w[1] * w[1])
                + coef[7] * w2 * w2
                + coef[8] * w[0] * w[1] * w[2]
                + coef[9] * w[2] * w[2];
            poly * basis.m[q]
        })
        .collect();
    basis.project_p1(&raw)
}

fn sample_gradients() -> Gradients {
    Gradients {
        grad_theta: [0.3, -0.1, 0.2],
        grad_u: [[0.2, -0.4, 0.1], [0.3, -0.1, 0.05], [-0.2, 0.15, -0.1]],
    }
}

/// Gram tables, structure checks, transport coefficients and their grid drift,
/// and the identities of the Burnett inverses.
pub fn burnett_table(cfg: &StudyConfig, dir: &Path) -> Result<PointResult> {
    let b = &cfg.burnett;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let extent = cfg.grid.extent;
    let opts = InverseOptions::default();
    let grid = velocity(extent, b.n_v)?;
    let op = CollisionOperator::new(&grid)?;
    let inv = LmInverse::new(&op, MaxwellState::global(), opts)?;
    let set = BurnettSet::with_inverse(&inv)?;
    let mut p = PointResult::new(format!("n_v-{}", b.n_v));
    p.params.insert("n_v".into(), b.n_v as f64);

    for g in set.lemma_checks(b.tolerance) {
        let mut c = Check::at_most(
            format!("burnett: bullet {} {}", g.bullet, g.name),
            g.value.abs() / g.scale.max(1e-300),
            b.tolerance,
        );
        c.pass = g.pass;
        p.checks.push(c);
    }
    let worst = set.reports.iter().map(|r| r.residual).fold(0.0f64, f64::max);
    p.metrics.insert("solve_residual".into(), worst);

    let mut gram = String::from("table,i,j,k,l,value\n");
    for i in 0..3 {
        for j in 0..3 {
            gram.push_str(&format!("a,{i},{j},,,{}\n", fmt_num(set.a_gram(i, j))));
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    gram.push_str(&format!("b,{i},{j},{k},{l},{}\n", fmt_num(set.b_gram(i, j, k, l))));
                }
            }
        }
    }
    write_text(&dir.join("gram.csv"), &gram)?;

    let own = set.transport();
    let mut table = Table::new(&["n_v", "h", "mu", "kappa"]);
    let mut values = Vec::new();
    for &n in &b.richardson {
        let t = if n == b.n_v {
            own
        } else {
            let g = velocity(extent, n)?;
            transport_coefficients(&CollisionOperator::new(&g)?, MaxwellState::global(), opts)?
        };
        table.push(vec![n as f64, 2.0 * extent / (n - 1) as f64, t.mu_ref, t.kappa_ref]);
        values.push((t.mu_ref, t.kappa_ref));
    }
    let min_mu = values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let min_kappa = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let drift = |f: fn(&(f64, f64)) -> f64| {
        values
            .windows(2)
            .map(|w| (f(&w[1]) - f(&w[0])).abs() / f(&w[1]).abs())
            .fold(0.0f64, f64::max)
    };
    let (mu_drift, kappa_drift) = (drift(|v| v.0), drift(|v| v.1));
    p.metrics.insert("mu".into(), own.mu_ref);
    p.metrics.insert("kappa".into(), own.kappa_ref);
    p.checks.push(Check::at_least("burnett: smallest mu(3/2)", min_mu, f64::MIN_POSITIVE));
    p.checks.push(Check::at_least("burnett: smallest kappa(3/2)", min_kappa, f64::MIN_POSITIVE));
    p.checks.push(Check::at_most("burnett: mu grid drift", mu_drift, b.max_drift));
    p.checks.push(Check::at_most("burnett: kappa grid drift", kappa_drift, b.max_drift));

    let mut sweep = String::from("theta,mu_direct,mu_scaled,kappa_direct,kappa_scaled\n");
    for &theta in &b.theta {
        let t = transport_coefficients(&op, MaxwellState::new(1.0, [0.0; 3], theta), opts)?;
        sweep.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_num(theta),
            fmt_num(t.mu_ref),
            fmt_num(own.mu(theta)),
            fmt_num(t.kappa_ref),
            fmt_num(own.kappa(theta))
        ));
    }
    write_text(&dir.join("theta.csv"), &sweep)?;

    let grads = sample_gradients();
    let eps = 0.1;
    let table_route = correction_gbar(&grads, set.state.theta, eps, &set.a, &set.b);
    let direct_route = correction_gbar_direct(&inv, &grads, eps)?;
    let basis = inv.basis();
    let two_route = basis.norm(&sub(&table_route, &direct_route)) / basis.norm(&direct_route);
    p.checks.push(Check::at_most("burnett: two-route correction agreement", two_route, b.tolerance));

    let mut err_b: f64 = 0.0;
    let mut err_a: f64 = 0.0;
    for _ in 0..2 {
        let (eb, ea) = hydrodynamic_identities(&inv, &set, &random_source(basis, &mut rng))?;
        err_b = err_b.max(eb);
        err_a = err_a.max(ea);
    }
    p.checks.push(Check::at_most("burnett: stress identity", err_b, b.identity_tolerance));
    p.checks.push(Check::at_most("burnett: heat-flux identity", err_a, b.identity_tolerance));
    let transport = p1_transport_identity_check(basis, &set, &grads);
    p.checks.push(Check::at_most("burnett: P1 transport identity", transport, b.transport_identity_tolerance));

    p.table = table;
    Ok(p)
}

fn acoustic_as_fluid(s: &AcousticState) -> FluidState {
    FluidState {
        rho: s.rho.clone(),
        u: s.phi.clone(),
        theta: s.theta.clone(),
    }
}

fn fluid_times(cfg: &StudyConfig) -> Vec<f64> {
    let mut t: Vec<f64> = std::iter::once(0.0)
        .chain(cfg.fluid.output_times.iter().copied())
        .chain(std::iter::once(cfg.fluid.tau))
        .filter(|&t| t <= cfg.fluid.tau)
        .collect();
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

/// Runs the Euler or acoustic solver alone and checks its invariants.
pub fn fluid_run(cfg: &StudyConfig, dir: &Path) -> Result<PointResult> {
    let f = &cfg.fluid;
    let space = cfg.spatial_grid()?;
    let sp = Spectral::new(&space);
    let snaps = dir.join("snapshots");
    if cfg.run.write_snapshots {
        std::fs::create_dir_all(&snaps).map_err(io_err(&snaps))?;
    }
    let mut p = PointResult::new("fluid");
    p.params.insert("tau".into(), f.tau);
    match f.model {
        FluidModel::Euler => {
            let sol = euler_solve(
                &simple_wave(&space, cfg.run.amplitude),
                f.tau,
                &space,
                &EulerOptions {
                    cfl: f.cfl,
                    fixed_dt: cfg.run.fixed_dt,
                    steepening_factor: f.steepening_factor,
                    output_times: f.output_times.clone(),
                },
            )?;
            let mut table = Table::new(&["time", "mass", "momentum_1", "momentum_2", "momentum_3", "energy"]);
            for (i, (t, tot)) in sol.times.iter().zip(&sol.totals).enumerate() {
                table.push(vec![*t, tot[0], tot[1], tot[2], tot[3], tot[4]]);
                if cfg.run.write_snapshots {
                    write_fluid(&snaps.join(format!("euler-{i:03}.llsnap")), &sol.states[i], &space, *t, "Euler")?;
                }
            }
            let drift = sol.conservation_drift();
            p.metrics.insert("drift".into(), drift);
            p.metrics.insert("steps".into(), sol.steps as f64);
            p.metrics.insert("horizon".into(), sol.horizon);
            p.checks.push(Check::at_most("fluid: Euler conservation drift", drift, 1e-10));
            p.table = table;
        }
        FluidModel::Acoustic => {
            let c = acoustic_speed();
            let k = cfg.acoustic.mode as f64;
            let init = AcousticState::from_fn(&space, 1.0, |x| {
                let w = (k * x[0]).cos();
                (w, [c * w, 0.0, 0.0], 2.0 / 3.0 * w)
            });
            let s = f.sobolev_order;
            let q0 = init.quadratic_form(&sp, s);
            let z0 = sp.forward(&init.rho)[cfg.acoustic.mode];
            let mut table = Table::new(&["time", "quadratic_form"]);
            let mut drift: f64 = 0.0;
            let mut dispersion: f64 = 0.0;
            for (i, t) in fluid_times(cfg).into_iter().enumerate() {
                let st = acoustic_exact(&init, t, &sp);
                let q = st.quadratic_form(&sp, s);
                drift = drift.max((q - q0).abs() / q0);
                if t > 0.0 && k * c * t < std::f64::consts::PI {
                    let z = sp.forward(&st.rho)[cfg.acoustic.mode];
                    dispersion = dispersion.max((-(z / z0).arg() / (k * t) - c).abs());
                }
                table.push(vec![t, q]);
                if cfg.run.write_snapshots {
                    write_fluid(&snaps.join(format!("acoustic-{i:03}.llsnap")), &acoustic_as_fluid(&st), &space, t, "acoustic")?;
                }
            }
            p.metrics.insert("drift".into(), drift);
            p.metrics.insert("phase_speed_error".into(), dispersion);
            p.checks.push(Check::at_most("fluid: acoustic quadratic form drift", drift, 1e-12));
            p.checks.push(Check::at_most("fluid: plane-wave speed versus sqrt(5/3)", dispersion, 1e-10));
            p.table = table;
        }
    }
    Ok(p)
}
