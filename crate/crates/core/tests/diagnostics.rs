use landau_core::collision::CollisionOperator;
use landau_core::diagnostics::{
    convergence_fit, energy_functionals, entropy_balance_residual, entropy_equivalence_check, entropy_pair,
    mu_weighted_distance, psi, EnergyInput, EnergyOptions,
};
use landau_core::fluid::Spectral;
use landau_core::maxwellian::{global_maxwellian, FluidState, MaxwellState};
use landau_core::phase_space::{build_velocity_grid, DistributionField, Role, SpatialGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn field(space: SpatialGrid, n: usize, f: impl Fn(usize, [f64; 3]) -> f64) -> DistributionField {
    let grid = build_velocity_grid(4.0, n).unwrap();
    let g = grid.clone();
    DistributionField::from_nodes(space, grid, Role::Perturbation, move |k| {
        (0..g.len()).map(|p| f(k, g.velocity(p))).collect()
    })
}

#[test]
fn distance_to_itself_is_zero() {
    let space = SpatialGrid::line(8).unwrap();
    let m = field(space, 7, |k, v| (1.0 + 0.1 * k as f64) * (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / 2.0).exp());
    let mu = global_maxwellian(&m.velocity);
    assert_eq!(mu_weighted_distance(&m, &m, &mu).unwrap(), (0.0, 0.0));
}

#[test]
fn distance_of_uniform_offset() {
    let space = SpatialGrid::line(8).unwrap();
    let m = field(space, 9, |_, v| (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / 2.0).exp());
    let grid = m.velocity.clone();
    let mu = global_maxwellian(&grid);
    let raw: Vec<f64> = (0..grid.len()).map(|p| 1.0 + grid.velocity(p)[0]).collect();
    let norm = grid.quad(&raw.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    let c = 0.3;
    let mut f = m.clone();
    for k in 0..space.len() {
        for p in 0..grid.len() {
            f.node_mut(k)[p] += c * mu[p].sqrt() * raw[p] / norm;
        }
    }
    let (l2, sup) = mu_weighted_distance(&f, &m, &mu).unwrap();
    assert!((l2 - c * space.volume().sqrt()).abs() <= 1e-12);
    assert!((sup - c).abs() <= 1e-12);
}

#[test]
fn distance_is_a_norm_on_samples() {
    let space = SpatialGrid::line(4).unwrap();
    let zero = field(space, 5, |_, _| 0.0);
    let mu = global_maxwellian(&zero.velocity);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let a: Vec<f64> = (0..zero.values.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let b: Vec<f64> = (0..zero.values.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let s = rng.gen_range(-3.0..=3.0);
        let with = |v: Vec<f64>| DistributionField { values: v, ..zero.clone() };
        let na = mu_weighted_distance(&with(a.clone()), &zero, &mu).unwrap();
        let nb = mu_weighted_distance(&with(b.clone()), &zero, &mu).unwrap();
        let nsum = mu_weighted_distance(&with(a.iter().zip(&b).map(|(x, y)| x + y).collect()), &zero, &mu).unwrap();
        let nscaled = mu_weighted_distance(&with(a.iter().map(|x| s * x).collect()), &zero, &mu).unwrap();
        assert!(nsum.0 <= na.0 + nb.0 + 1e-12 && nsum.1 <= na.1 + nb.1 + 1e-12);
        assert!((nscaled.0 - s.abs() * na.0).abs() <= 1e-12 * na.0);
        assert!((nscaled.1 - s.abs() * na.1).abs() <= 1e-12 * na.1);
    }
}

struct EnergySetup {
    op: CollisionOperator,
    sp: Spectral,
    f: DistributionField,
    fluid: [Vec<f64>; 5],
}

fn energy_setup() -> EnergySetup {
    let space = SpatialGrid::line(8).unwrap();
    let f = field(space, 7, |k, v| {
        let x = space.position(k)[0];
        0.01 * (x.cos() * v[0] + x.sin() * (v[1] * v[2])) * (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / 4.0).exp()
    });
    let op = CollisionOperator::new(&f.velocity).unwrap();
    let sp = Spectral::new(&space);
    let fluid = [0, 1, 2, 3, 4].map(|c| space.sample(|x| 0.01 * ((c + 1) as f64 * x[0]).sin()));
    EnergySetup { op, sp, f, fluid }
}

#[test]
fn energy_of_zero_perturbation_vanishes() {
    let s = energy_setup();
    let sigma = s.op.sigma_field();
    let zero_f = DistributionField {
        values: vec![0.0; s.f.values.len()],
        ..s.f.clone()
    };
    let zero = vec![0.0; s.f.space.len()];
    let input = EnergyInput {
        fluid: [&zero, &zero, &zero, &zero, &zero],
        f: &zero_f,
        eps: 0.1,
    };
    let r = energy_functionals(&input, &s.op, &sigma, &s.sp, EnergyOptions::default()).unwrap();
    assert_eq!((r.e_n, r.d_n), (0.0, 0.0));
}

#[test]
fn energy_is_quadratic_and_decomposes() {
    let s = energy_setup();
    let sigma = s.op.sigma_field();
    let zero = vec![0.0; s.f.space.len()];
    let doubled = DistributionField {
        values: s.f.values.iter().map(|x| 2.0 * x).collect(),
        ..s.f.clone()
    };
    let run = |f: &DistributionField, fluid: [&[f64]; 5]| {
        energy_functionals(&EnergyInput { fluid, f, eps: 0.1 }, &s.op, &sigma, &s.sp, EnergyOptions::default()).unwrap()
    };
    let base = run(&s.f, [&zero, &zero, &zero, &zero, &zero]);
    let twice = run(&doubled, [&zero, &zero, &zero, &zero, &zero]);
    assert!(base.e_n > 0.0);
    assert!((twice.e_n - 4.0 * base.e_n).abs() <= 1e-12 * twice.e_n);
    assert!((twice.d_n - 4.0 * base.d_n).abs() <= 1e-12 * twice.d_n);

    let fluid = [&s.fluid[0][..], &s.fluid[1], &s.fluid[2], &s.fluid[3], &s.fluid[4]];
    let full = run(&s.f, fluid);
    let e_sum: f64 = full.e_terms.iter().map(|t| t.value).sum();
    let d_sum: f64 = full.d_terms.iter().map(|t| t.value).sum();
    assert!((full.e_n - e_sum).abs() <= 1e-12 * full.e_n);
    assert!((full.d_n - d_sum).abs() <= 1e-12 * full.d_n);
    assert!(full.e_terms.iter().chain(&full.d_terms).all(|t| t.value >= 0.0));
    assert_eq!(full.fluid_by_order.len(), EnergyOptions::default().order + 1);
}

fn manufactured(space: &SpatialGrid, shift: f64) -> (FluidState, FluidState) {
    let a = 0.05;
    let bg = FluidState::from_fn(space, |x| {
        let y = x[0] + shift;
        MaxwellState::new(1.0 + a * y.cos(), [a * y.sin(), 0.0, 0.0], 1.5 + a * (2.0 * y).cos())
    });
    let st = FluidState::from_fn(space, |x| {
        let y = x[0] + shift;
        MaxwellState::new(1.0 + a * (y + 0.3).sin(), [a * (2.0 * y).cos(), a * y.sin(), 0.0], 1.5 + a * y.sin())
    });
    (st, bg)
}

#[test]
fn entropy_of_equal_states() {
    let space = SpatialGrid::line(8).unwrap();
    let (_, bg) = manufactured(&space, 0.0);
    let pair = entropy_pair(&bg, &bg).unwrap();
    assert!(pair.eta.iter().all(|&e| e == 0.0));
    assert!(pair.q.iter().flatten().all(|&q| q == 0.0));
    let sp = Spectral::new(&space);
    // Both sides vanish; what remains is roundoff against the absolute floor.
    assert!(entropy_balance_residual(&bg, &bg, &sp).unwrap().iter().all(|&r| r <= 1e-3));
}

#[test]
fn entropy_of_velocity_offset() {
    let space = SpatialGrid::line(4).unwrap();
    let bg = FluidState::uniform(&space, MaxwellState::new(1.2, [0.1, 0.0, 0.0], 1.4));
    let st = FluidState::uniform(&space, MaxwellState::new(1.2, [0.4, 0.0, 0.0], 1.4));
    let eta = entropy_pair(&st, &bg).unwrap().eta;
    assert!(eta.iter().all(|&e| (e - 0.75 * 1.2 * 0.09).abs() <= 1e-15));
}

#[test]
fn entropy_equivalence_on_small_perturbations() {
    let space = SpatialGrid::line(16).unwrap();
    let bg = FluidState::uniform(&space, MaxwellState::new(1.0, [0.0; 3], 1.5));
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let st = FluidState::from_fn(&space, |_| MaxwellState::new(1.0, [0.0; 3], 1.5));
    let st = FluidState {
        rho: st.rho.iter().map(|r| r * (1.0 + 0.01 * rng.gen_range(-1.0..=1.0))).collect(),
        u: [0; 3].map(|_| (0..space.len()).map(|_| 0.01 * rng.gen_range(-1.0..=1.0)).collect()),
        theta: st.theta.iter().map(|t| t * (1.0 + 0.01 * rng.gen_range(-1.0..=1.0))).collect(),
    };
    let (lo, hi) = entropy_equivalence_check(&st, &bg).unwrap();
    assert!(lo > 0.0 && hi.is_finite());
    assert!(hi / lo <= 3.0, "{lo} {hi}");
    assert!((psi(1.0)).abs() == 0.0 && psi(0.5) > 0.0 && psi(2.0) > 0.0);
}

#[test]
fn entropy_balance_on_manufactured_fields() {
    let space = SpatialGrid::line(32).unwrap();
    let sp = Spectral::new(&space);
    let (st, bg) = manufactured(&space, 0.0);
    let r = entropy_balance_residual(&st, &bg, &sp).unwrap();
    let worst = r.iter().fold(0.0f64, |m, x| m.max(*x));
    assert!(worst <= 1e-8, "{worst}");

    let shift = 4;
    let (st2, bg2) = manufactured(&space, shift as f64 * space.spacing());
    let r2 = entropy_balance_residual(&st2, &bg2, &sp).unwrap();
    for k in 0..space.len() {
        assert!((r2[k] - r[(k + shift) % space.len()]).abs() <= 1e-12);
    }
}

#[test]
fn fit_examples() {
    let f = convergence_fit(&[(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)]).unwrap();
    assert_eq!(f.slope, 1.0);
    let f = convergence_fit(&[(1.0, 1.0), (2.0, 4.0), (4.0, 16.0)]).unwrap();
    assert!((f.slope - 2.0).abs() <= 1e-15);
    assert!(convergence_fit(&[(1.0, 1.0), (2.0, 0.0), (4.0, 4.0)]).is_err());
    assert!(convergence_fit(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
}
