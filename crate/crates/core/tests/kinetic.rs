use landau_core::collision::CollisionOperator;
use landau_core::fluid::{euler_solve, simple_wave, AcousticState, EulerOptions};
use landau_core::kinetic::{
    run_acoustic_limit, run_euler_limit, InitialMode, KineticRunConfig, KineticSolver, TimeStepPolicy,
};
use landau_core::macro_micro::{BurnettTable, InverseOptions};
use landau_core::maxwellian::{global_maxwellian, local_maxwellians, maxwellian, moments};
use landau_core::phase_space::{build_velocity_grid, DistributionField, Role, SpatialGrid, VelocityGrid};
use landau_core::LandauError;

fn velocity() -> VelocityGrid {
    build_velocity_grid(4.5, 11).unwrap()
}

fn config(eps: f64, mode: InitialMode) -> KineticRunConfig {
    KineticRunConfig {
        eps,
        delta: 0.1,
        amplitude: 0.01,
        tau: 0.2,
        output_times: vec![0.1],
        step: TimeStepPolicy::default(),
        mode,
        space: SpatialGrid::line(8).unwrap(),
        velocity: velocity(),
        penalty_factor: 2.0,
        negativity_tolerance: 1e-6,
    }
}

fn uniform(cfg: &KineticRunConfig, node: Vec<f64>) -> DistributionField {
    DistributionField::from_nodes(cfg.space, cfg.velocity.clone(), Role::Total, |_| node.clone())
}

/// Spatially uniform two-temperature Gaussian: a positive non-Maxwellian.
fn anisotropic(grid: &VelocityGrid) -> Vec<f64> {
    let (tx, tp): (f64, f64) = (1.4, 0.8);
    let norm = (2.0 * std::f64::consts::PI).powf(-1.5) / (tx * tp * tp).sqrt();
    grid.sample(|v| norm * (-(v[0] - 0.1) * (v[0] - 0.1) / (2.0 * tx) - (v[1] * v[1] + v[2] * v[2]) / (2.0 * tp)).exp())
}

/// Non-equilibrium starts undershoot slightly in the corner tails of the coarse box.
fn relaxed(mut cfg: KineticRunConfig) -> KineticRunConfig {
    cfg.negativity_tolerance = 1e-4;
    cfg
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn global_maxwellian_is_a_fixed_point() {
    let cfg = config(0.1, InitialMode::EulerLimit);
    let op = CollisionOperator::new(&cfg.velocity).unwrap();
    let solver = KineticSolver::new(&op, &cfg).unwrap();
    let mu = global_maxwellian(&cfg.velocity);
    let mut f = uniform(&cfg, mu.clone());
    for _ in 0..3 {
        solver.kinetic_step(&mut f, solver.max_dt()).unwrap();
    }
    for node in f.nodes() {
        for (a, b) in node.iter().zip(&mu) {
            assert!((a - b).abs() <= 1e-8);
        }
    }
}

#[test]
fn uniform_relaxation_conserves_moments() {
    let cfg = relaxed(config(0.1, InitialMode::EulerLimit));
    let op = CollisionOperator::new(&cfg.velocity).unwrap();
    let solver = KineticSolver::new(&op, &cfg).unwrap();
    let start = anisotropic(&cfg.velocity);
    let m0 = moments(&start, &cfg.velocity);
    let mut f = uniform(&cfg, start);
    solver.kinetic_step(&mut f, solver.max_dt()).unwrap();
    for node in f.nodes() {
        let m = moments(node, &cfg.velocity);
        for c in 0..5 {
            assert!((m[c] - m0[c]).abs() <= 1e-12 * m0[0].max(m0[4]), "{c}: {} vs {}", m[c], m0[c]);
        }
    }
}

#[test]
fn splitting_is_second_order() {
    let cfg = relaxed(config(0.1, InitialMode::EulerLimit));
    let op = CollisionOperator::new(&cfg.velocity).unwrap();
    let grid = SpatialGrid::line(8).unwrap();
    let init = simple_wave(&grid, 0.05);
    let start = DistributionField::from_nodes(grid, cfg.velocity.clone(), Role::Total, |k| {
        let s = init.node(k);
        let mut m = maxwellian(&s, &cfg.velocity).unwrap();
        let aniso = anisotropic(&cfg.velocity);
        m.iter_mut().zip(aniso).for_each(|(a, b)| *a = 0.8 * *a + 0.2 * b);
        m
    });
    let run = |dt: f64| {
        let c = KineticRunConfig {
            step: TimeStepPolicy {
                fixed_dt: Some(dt),
                ..TimeStepPolicy::default()
            },
            ..cfg.clone()
        };
        let solver = KineticSolver::new(&op, &c).unwrap();
        let mut f = start.clone();
        solver.advance(&mut f, 0.2).unwrap();
        f.values
    };
    let (a, b, c) = (run(0.1), run(0.05), run(0.025));
    let e1: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let e2: Vec<f64> = b.iter().zip(&c).map(|(x, y)| x - y).collect();
    let ratio = max_abs(&e1) / max_abs(&e2);
    assert!(ratio >= 3.5, "ratio {ratio}");
}

#[test]
fn cfl_violation_rejected() {
    let cfg = config(0.1, InitialMode::EulerLimit);
    let op = CollisionOperator::new(&cfg.velocity).unwrap();
    let solver = KineticSolver::new(&op, &cfg).unwrap();
    let mut f = uniform(&cfg, global_maxwellian(&cfg.velocity));
    let dt = 2.0 * solver.transport_limit();
    assert!(matches!(solver.kinetic_step(&mut f, dt), Err(LandauError::Cfl { .. })));
}

#[test]
fn euler_limit_decomposition() {
    let cfg = config(0.08, InitialMode::EulerLimit);
    let op = CollisionOperator::new(&cfg.velocity).unwrap();
    let table = BurnettTable::compute(&op, InverseOptions::default()).unwrap();
    let background = euler_solve(
        &simple_wave(&cfg.space, cfg.amplitude),
        cfg.tau,
        &cfg.space,
        &EulerOptions {
            output_times: cfg.output_times.clone(),
            ..EulerOptions::default()
        },
    )
    .unwrap();
    let run = run_euler_limit(&op, &cfg, &background, &table).unwrap();
    let first = &run.snapshots[0];
    assert_eq!(first.time, 0.0);
    let scale = max_abs(&first.total.values);
    assert!(max_abs(&first.g.values) <= 1e-13 * scale);
    let mu = global_maxwellian(&cfg.velocity);
    let nv = mu.len();
    for (i, (f, gb)) in first.f.values.iter().zip(&first.gbar.values).enumerate() {
        let expected = -gb / mu[i % nv].sqrt();
        let g = first.g.values[i] / mu[i % nv].sqrt();
        assert!((f - expected - g).abs() <= 1e-12 * expected.abs().max(1.0));
    }
    for s in &run.snapshots {
        assert!(s.micro_defect <= 1e-10, "{}", s.micro_defect);
    }
    assert!(run.min_ratio >= -1e-8);
    assert!(run.conservation_drift <= 1e-9);
}

#[test]
fn acoustic_initial_error_is_first_order_in_delta() {
    let space = SpatialGrid::line(8).unwrap();
    let init = AcousticState::from_fn(&space, 1.0, |x| (x[0].cos(), [0.0; 3], 2.0 / 3.0 * x[0].cos()));
    let op = CollisionOperator::new(&velocity()).unwrap();
    let err = |delta: f64| {
        let cfg = KineticRunConfig {
            delta,
            tau: 0.01,
            output_times: vec![],
            negativity_tolerance: 1e-4,
            ..config(0.04, InitialMode::AcousticLimit)
        };
        let run = run_acoustic_limit(&op, &cfg, &init).unwrap();
        assert!(run.conservation_drift <= 1e-9);
        run.snapshots[0].error.0
    };
    let (e1, e2) = (err(0.1), err(0.05));
    assert!(e1 <= 2.0 * 0.1, "{e1}");
    let ratio = e1 / e2;
    assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn relaxation_speeds_up_as_eps_decreases() {
    let grid = velocity();
    let op = CollisionOperator::new(&grid).unwrap();
    let mu = global_maxwellian(&grid);
    let energy = |eps: f64| {
        let cfg = relaxed(config(eps, InitialMode::EulerLimit));
        let solver = KineticSolver::new(&op, &cfg).unwrap();
        let mut f = uniform(&cfg, anisotropic(&grid));
        solver.advance(&mut f, 0.05).unwrap();
        let (_, m) = local_maxwellians(&f, op.invariants()).unwrap();
        f.values
            .iter()
            .zip(&m.values)
            .enumerate()
            .map(|(i, (a, b))| (a - b).powi(2) / mu[i % mu.len()])
            .sum::<f64>()
    };
    let e: Vec<f64> = [0.16, 0.08, 0.04].iter().map(|&eps| energy(eps)).collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
}

#[test]
fn mismatched_operator_grid_rejected() {
    let cfg = config(0.1, InitialMode::EulerLimit);
    let op = CollisionOperator::new(&build_velocity_grid(4.5, 9).unwrap()).unwrap();
    assert!(KineticSolver::new(&op, &cfg).is_err());
    let bad = KineticRunConfig { eps: 0.0, ..cfg };
    let op = CollisionOperator::new(&velocity()).unwrap();
    assert!(KineticSolver::new(&op, &bad).is_err());
}
