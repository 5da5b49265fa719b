use landau_core::collision::CollisionOperator;
use landau_core::macro_micro::{
    correction_gbar, correction_gbar_direct, decay_envelope, decomposition_check, hydrodynamic_identities,
    p1_transport_identity_check, project_p0, project_p1, theta_consistency_check, BurnettSet, Gradients,
    InverseMethod, InverseOptions, LmInverse, MacroBasis,
};
use landau_core::maxwellian::{invariant_defect, maxwellian, MaxwellState};
use landau_core::phase_space::{build_velocity_grid, DistributionField, Role, SpatialGrid, VelocityGrid};
use landau_core::LandauError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn state() -> MaxwellState {
    MaxwellState::new(1.1, [0.0; 3], 1.4)
}

fn drifting() -> MaxwellState {
    MaxwellState::new(1.1, [0.2, -0.1, 0.0], 1.4)
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn rel(basis: &MacroBasis, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    basis.norm(&d) / basis.norm(b).max(1e-300)
}

/// Random cubic polynomial in `v` times `M`: smooth, with a random direction in
/// the low moments.
fn smooth_random(grid: &VelocityGrid, m: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let c: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    (0..grid.len())
        .map(|p| {
            let [x, y, z] = grid.velocity(p);
            let monomials = [
                1.0, x, y, z, x * x, y * y, z * z, x * y, y * z, x * z, x * x * x, y * y * y, z * z * z, x * y * z,
                x * x * y, y * y * z, z * z * x, x * y * y, y * z * z, z * x * x,
            ];
            c.iter().zip(monomials).map(|(a, b)| a * b).sum::<f64>() * m[p]
        })
        .collect()
}

fn random_gradients(rng: &mut ChaCha8Rng) -> Gradients {
    Gradients {
        grad_theta: [0; 3].map(|_| rng.gen_range(-1.0..=1.0)),
        grad_u: [[0; 3]; 3].map(|r| r.map(|_| rng.gen_range(-1.0..=1.0))),
    }
}

/// Removes the macroscopic span and the seven lattice parity modes `±M`, the
/// directions the constrained inverse deflates.
fn discrete_microscopic(basis: &MacroBasis, h: &[f64]) -> Vec<f64> {
    let grid = basis.grid();
    let mut modes: Vec<Vec<f64>> = Vec::new();
    for e in 0..5 {
        let mut probe = vec![0.0; grid.len()];
        probe.iter_mut().zip(&basis.m).enumerate().for_each(|(p, (x, m))| {
            let v = grid.velocity(p);
            *x = [1.0, v[0], v[1], v[2], v[0] * v[0] + v[1] * v[1] + v[2] * v[2]][e] * m;
        });
        modes.push(probe);
    }
    for mask in 1..8usize {
        modes.push(
            (0..grid.len())
                .map(|p| {
                    let t = grid.triple(p);
                    let parity: usize = (0..3).filter(|&d| mask >> d & 1 == 1).map(|d| t[d]).sum();
                    if parity.is_multiple_of(2) { basis.m[p] } else { -basis.m[p] }
                })
                .collect(),
        );
    }
    let ip = |a: &[f64], b: &[f64]| grid.dot_weighted(a, b, &basis.m);
    for k in 0..modes.len() {
        for _ in 0..2 {
            for j in 0..k {
                let c = ip(&modes[k], &modes[j]);
                let (head, tail) = modes.split_at_mut(k);
                tail[0].iter_mut().zip(&head[j]).for_each(|(a, b)| *a -= c * b);
            }
        }
        let n = ip(&modes[k], &modes[k]).sqrt();
        modes[k].iter_mut().for_each(|a| *a /= n);
    }
    let mut out = h.to_vec();
    for e in &modes {
        let c = ip(&out, e);
        out.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
    }
    out
}

struct Fixture {
    op: CollisionOperator,
    set: BurnettSet,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let g = build_velocity_grid(5.0, 19).unwrap();
        let op = CollisionOperator::new(&g).unwrap();
        let set = BurnettSet::compute(&op, state(), InverseOptions::default()).unwrap();
        Fixture { op, set }
    })
}

#[test]
fn maxwellian_is_purely_macroscopic() {
    let g = build_velocity_grid(6.0, 15).unwrap();
    let s = drifting();
    let m = maxwellian(&s, &g).unwrap();
    let p1 = project_p1(&m, &s, &g).unwrap();
    assert!(max_abs(&p1) <= 1e-12 * max_abs(&m));
    for i in 0..3 {
        let vm: Vec<f64> = (0..g.len()).map(|p| g.velocity(p)[i] * m[p]).collect();
        assert!(max_abs(&project_p1(&vm, &s, &g).unwrap()) <= 1e-12 * max_abs(&vm));
    }
}

#[test]
fn projectors_are_complementary_idempotents() {
    let g = build_velocity_grid(5.0, 11).unwrap();
    let s = drifting();
    let basis = MacroBasis::new(s, &g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let h: Vec<f64> = basis.m.iter().map(|m| m * rng.gen_range(-2.0..=2.0)).collect();
        let p0 = project_p0(&h, &s, &g).unwrap();
        let p0p0 = basis.project_p0(&p0);
        let p1p0 = basis.project_p1(&p0);
        let p0p1 = basis.project_p0(&basis.project_p1(&h));
        let scale = basis.norm(&h);
        assert!(rel(&basis, &p0p0, &p0) <= 1e-10);
        assert!(basis.norm(&p1p0) <= 1e-10 * scale);
        assert!(basis.norm(&p0p1) <= 1e-10 * scale);
    }
    assert!(basis.gram_deviation() <= 1e-3);
}

#[test]
fn inverse_round_trip_on_microscopic_fields() {
    let g = build_velocity_grid(6.0, 15).unwrap();
    let op = CollisionOperator::new(&g).unwrap();
    let inv = LmInverse::new(&op, state(), InverseOptions::default()).unwrap();
    let basis = inv.basis();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..3 {
        let g0 = discrete_microscopic(basis, &smooth_random(basis.grid(), &basis.m, &mut rng));
        let rhs = inv.linearized().apply(&g0);
        let (g, report) = inv.solve(&rhs).unwrap();
        let e = rel(basis, &g, &g0);
        assert!(e <= 1e-6, "round trip {e}");
        assert!(report.residual <= 1e-9);
        assert!(report.conditioning() >= 1e-10);
    }
}

#[test]
fn macroscopic_right_hand_side_rejected() {
    let f = fixture();
    let inv = LmInverse::new(&f.op, state(), InverseOptions::default()).unwrap();
    let basis = inv.basis();
    let s = state();
    let chi1: Vec<f64> = (0..basis.grid().len())
        .map(|p| (basis.grid().velocity(p)[0] - s.u[0]) * basis.m[p])
        .collect();
    assert!(matches!(inv.solve(&chi1), Err(LandauError::NotMicroscopic { .. })));
}

#[test]
fn heat_flux_inverse_decays_like_a_gaussian() {
    let f = fixture();
    let basis = MacroBasis::new(state(), &f.op.grid().clone()).unwrap();
    let (c, outer) = decay_envelope(&basis, &f.set.a[0], 2.0, 0.9);
    assert!(c.is_finite() && c > 0.0);
    assert!(outer <= c);
}

#[test]
fn gram_structure_holds() {
    let f = fixture();
    let checks = f.set.lemma_checks(1e-6);
    assert_eq!(checks.len(), 8);
    for c in checks.iter().filter(|c| c.bullet <= 7) {
        assert!(c.pass, "bullet {} {}: {} (scale {})", c.bullet, c.name, c.value, c.scale);
    }
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert!(f.set.a_gram(i, j).abs() <= 1e-6 * f.set.a_gram(i, i).abs());
            }
        }
    }
    let t = f.set.transport();
    assert!(t.mu(1.4) > 0.0 && t.kappa(1.4) > 0.0);
}

#[test]
fn correction_vanishes_is_microscopic_and_linear() {
    let f = fixture();
    let s = f.set.state;
    let zero = correction_gbar(&Gradients::default(), s.theta, 0.1, &f.set.a, &f.set.b);
    assert!(zero.iter().all(|&x| x == 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let grads = random_gradients(&mut rng);
    let g1 = correction_gbar(&grads, s.theta, 0.05, &f.set.a, &f.set.b);
    let g2 = correction_gbar(&grads, s.theta, 0.1, &f.set.a, &f.set.b);
    for (a, b) in g1.iter().zip(&g2) {
        assert_eq!(2.0 * a, *b);
    }
    let d = invariant_defect(&g2, &f.set.grid);
    let scale = max_abs(&g2) * f.set.grid.extent().powi(2);
    assert!(d.iter().all(|x| x.abs() <= 1e-10 * scale), "{d:?}");
}

#[test]
fn closed_expansion_matches_direct_solve() {
    let f = fixture();
    let inv = LmInverse::new(&f.op, state(), InverseOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let grads = random_gradients(&mut rng);
    let closed = correction_gbar(&grads, state().theta, 0.1, &f.set.a, &f.set.b);
    let direct = correction_gbar_direct(&inv, &grads, 0.1).unwrap();
    assert!(rel(inv.basis(), &closed, &direct) <= 1e-6);
}

#[test]
fn transport_identity_is_exact_and_homogeneous() {
    let f = fixture();
    let basis = MacroBasis::new(state(), f.op.grid()).unwrap();
    assert_eq!(p1_transport_identity_check(&basis, &f.set, &Gradients::default()), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let grads = random_gradients(&mut rng);
    let r1 = p1_transport_identity_check(&basis, &f.set, &grads);
    let r10 = p1_transport_identity_check(&basis, &f.set, &grads.scaled(10.0));
    assert!(r1 <= 1e-8, "{r1}");
    assert!((r1 - r10).abs() <= 1e-12);
}

#[test]
fn streaming_of_maxwellian_decomposes() {
    let f = fixture();
    let inv = LmInverse::new(&f.op, state(), InverseOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let background = random_gradients(&mut rng);
    let perturbation = random_gradients(&mut rng).scaled(0.3);
    let r = decomposition_check(&inv, &f.set, [0.4, -0.2, 0.1], &background, &perturbation, 0.05);
    // Parity-mode aliasing of M on the 19-point lattice bounds the residual.
    assert!(r <= 1e-3, "{r}");
}

#[test]
fn moment_identities_for_synthetic_source() {
    let f = fixture();
    let inv = LmInverse::new(&f.op, state(), InverseOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let basis = inv.basis();
    let src = basis.project_p1(&smooth_random(basis.grid(), &basis.m, &mut rng));
    let (eb, ea) = hydrodynamic_identities(&inv, &f.set, &src).unwrap();
    assert!(eb <= 1e-6 && ea <= 1e-6, "{eb} {ea}");
}

#[test]
fn dense_and_iterative_inverses_agree() {
    let g = build_velocity_grid(4.0, 7).unwrap();
    let op = CollisionOperator::new(&g).unwrap();
    let s = MaxwellState::new(1.0, [0.0; 3], 1.5);
    let it = LmInverse::new(&op, s, InverseOptions::default()).unwrap();
    let dense = LmInverse::new(
        &op,
        s,
        InverseOptions {
            method: InverseMethod::Dense,
            ..InverseOptions::default()
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let basis = it.basis();
    let rhs = basis.project_p1(&smooth_random(&g, &basis.m, &mut rng));
    let (a, _) = it.solve(&rhs).unwrap();
    let (b, _) = dense.solve(&rhs).unwrap();
    assert!(rel(basis, &a, &b) <= 1e-8);
}

#[test]
fn equilibrium_history_is_consistent() {
    let f = fixture();
    let space = SpatialGrid::line(4).unwrap();
    let mu = f.op.mu().to_vec();
    let snap = |t: f64| {
        let mut d = DistributionField::from_nodes(space, f.op.grid().clone(), Role::Total, |_| mu.clone());
        d.time = t;
        d
    };
    let (a, b, c) = (snap(0.0), snap(0.1), snap(0.2));
    let r = theta_consistency_check(&f.op, [&a, &b, &c], 0.1, &[0, 2], InverseOptions::default()).unwrap();
    assert_eq!(r.residual, 0.0);
}
