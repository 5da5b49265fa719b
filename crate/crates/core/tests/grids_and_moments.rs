use landau_core::maxwellian::{
    fluid_from_moments, global_maxwellian, invariant_defect, maxwellian, moments, CollisionInvariantSet, MaxwellState,
};
use landau_core::phase_space::{build_velocity_grid, integrate_v, VelocityGrid};
use landau_core::LandauError;
use proptest::prelude::*;

/// One-dimensional trapezoid sum of a Gaussian on the lattice axis, used to build
/// the three-dimensional lattice integral as a product.
fn axis_gaussian_sum(grid: &VelocityGrid, mean: f64, var: f64, power: i32) -> f64 {
    let h = grid.spacing();
    grid.axis()
        .iter()
        .map(|&v| h * (v - mean).powi(power) * (-(v - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
        .sum()
}

#[test]
fn three_node_grid() {
    let g = build_velocity_grid(1.0, 3).unwrap();
    assert_eq!(g.axis(), &[-1.0, 0.0, 1.0]);
    assert_eq!(g.spacing(), 1.0);
}

#[test]
fn standard_grid_spacing_and_size() {
    let g = build_velocity_grid(6.0, 25).unwrap();
    assert_eq!(g.spacing(), 0.5);
    assert_eq!(g.len(), 15625);
}

#[test]
fn even_node_count_rejected() {
    assert!(build_velocity_grid(6.0, 24).is_err());
}

#[test]
fn constant_field_integrates_to_node_volume() {
    let g = build_velocity_grid(6.0, 25).unwrap();
    assert_eq!(integrate_v(&vec![1.0; g.len()], &g).unwrap(), 1953.125);
}

#[test]
fn global_maxwellian_has_unit_mass_on_fine_grid() {
    let g = build_velocity_grid(6.0, 49).unwrap();
    let mass = integrate_v(&global_maxwellian(&g), &g).unwrap();
    let oracle = axis_gaussian_sum(&g, 0.0, 1.0, 0).powi(3);
    assert!((mass - 1.0).abs() <= 1e-6, "{mass}");
    assert!((mass - oracle).abs() <= 1e-13);
}

#[test]
fn odd_integrands_vanish_exactly() {
    let g = build_velocity_grid(6.0, 25).unwrap();
    let mu = global_maxwellian(&g);
    let f: Vec<f64> = (0..g.len()).map(|p| g.velocity(p)[0] * mu[p]).collect();
    assert_eq!(integrate_v(&f, &g).unwrap(), 0.0);
}

#[test]
fn non_finite_entry_names_node() {
    let g = build_velocity_grid(2.0, 5).unwrap();
    let mut f = vec![0.0; g.len()];
    f[17] = f64::NAN;
    match integrate_v(&f, &g) {
        Err(LandauError::NonFinite { node, .. }) => assert_eq!(node, 17),
        other => panic!("{other:?}"),
    }
}

#[test]
fn integration_is_bit_reproducible() {
    let g = build_velocity_grid(6.0, 21).unwrap();
    let f: Vec<f64> = (0..g.len()).map(|p| (p as f64 * 0.37).sin()).collect();
    assert_eq!(integrate_v(&f, &g).unwrap().to_bits(), integrate_v(&f, &g).unwrap().to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integration_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
        let g = build_velocity_grid(3.0, 7).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|p| ((p as u64 * 31 + seed) as f64).sin()).collect();
        let h: Vec<f64> = (0..g.len()).map(|p| ((p as u64 * 17 + seed) as f64).cos()).collect();
        let mix: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
        let lhs = integrate_v(&mix, &g).unwrap();
        let rhs = a * integrate_v(&f, &g).unwrap() + b * integrate_v(&h, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn antisymmetric_fields_integrate_to_zero(seed in 0u64..1000) {
        let g = build_velocity_grid(3.0, 7).unwrap();
        let mut f = vec![0.0; g.len()];
        for p in 0..g.len() {
            let q = g.mirror(p);
            if p < q {
                let x = ((p as u64 * 13 + seed) as f64).sin();
                f[p] = x;
                f[q] = -x;
            }
        }
        prop_assert_eq!(integrate_v(&f, &g).unwrap(), 0.0);
    }
}

#[test]
fn reference_state_is_the_global_maxwellian() {
    let g = build_velocity_grid(6.0, 13).unwrap();
    let m = maxwellian(&MaxwellState::new(1.0, [0.0; 3], 1.5), &g).unwrap();
    assert_eq!(m, global_maxwellian(&g));
}

#[test]
fn peak_value_at_bulk_velocity() {
    let g = build_velocity_grid(2.0, 5).unwrap();
    let s = MaxwellState::new(1.3, [1.0, 0.0, -1.0], 1.2);
    let m = maxwellian(&s, &g).unwrap();
    let peak = 1.3 * (2.0 * std::f64::consts::PI * (2.0 / 3.0) * 1.2).powf(-1.5);
    assert!((m[g.index(3, 2, 1)] - peak).abs() <= 1e-15 * peak);
}

#[test]
fn moments_match_closed_form_gaussian() {
    let g = build_velocity_grid(6.0, 49).unwrap();
    let s = MaxwellState::new(1.1, [0.2, 0.0, 0.0], 1.4);
    let m = moments(&maxwellian(&s, &g).unwrap(), &g);
    let var = s.r_theta();
    let z0 = axis_gaussian_sum(&g, 0.0, var, 0);
    let zu = axis_gaussian_sum(&g, 0.2, var, 0);
    let oracle_mass = 1.1 * zu * z0 * z0;
    assert!((m[0] - oracle_mass).abs() <= 1e-12);
    let r = fluid_from_moments(&m, 0).unwrap();
    assert!((r.rho - 1.1).abs() <= 1e-5);
    assert!((r.u[0] - 0.2).abs() <= 1e-5 && r.u[1].abs() <= 1e-12 && r.u[2].abs() <= 1e-12);
    assert!((r.theta - 1.4).abs() <= 1e-5);
}

#[test]
fn doubled_maxwellian_doubles_density_only() {
    let g = build_velocity_grid(6.0, 25).unwrap();
    let two: Vec<f64> = global_maxwellian(&g).iter().map(|x| 2.0 * x).collect();
    let r = fluid_from_moments(&moments(&two, &g), 0).unwrap();
    assert!((r.rho - 2.0).abs() <= 1e-6);
    assert!(r.u.iter().all(|u| u.abs() <= 1e-14));
    assert!((r.theta - 1.5).abs() <= 1e-6);
}

#[test]
fn shifted_maxwellian_velocity_recovered() {
    let g = build_velocity_grid(6.0, 49).unwrap();
    let m = maxwellian(&MaxwellState::new(1.0, [0.3, 0.0, 0.0], 1.5), &g).unwrap();
    let r = fluid_from_moments(&moments(&m, &g), 0).unwrap();
    assert!((r.u[0] - 0.3).abs() <= 1e-5);
}

#[test]
fn invariant_defect_of_zero_and_of_mu() {
    let g = build_velocity_grid(6.0, 25).unwrap();
    assert_eq!(invariant_defect(&vec![0.0; g.len()], &g), [0.0; 5]);
    let d = invariant_defect(&global_maxwellian(&g), &g);
    assert!((d[0] - 1.0).abs() <= 1e-6);
    assert!(d[1..4].iter().all(|x| x.abs() <= 1e-15));
    assert!((d[4] - 1.5).abs() <= 1e-6);
}

#[test]
fn energy_invariant_is_half_speed_squared() {
    let g = build_velocity_grid(3.0, 7).unwrap();
    let inv = CollisionInvariantSet::new(&g);
    for p in 0..g.len() {
        let s = (inv.get(1)[p].powi(2) + inv.get(2)[p].powi(2) + inv.get(3)[p].powi(2)) / 2.0;
        assert_eq!(inv.get(4)[p], s);
    }
}

#[test]
fn round_trip_in_the_regime_box() {
    let g = build_velocity_grid(6.0, 33).unwrap();
    for s in [
        MaxwellState::new(0.8, [0.5, -0.4, 0.2], 1.1),
        MaxwellState::new(1.4, [-1.0, 0.3, 1.5], 1.9),
    ] {
        let r = fluid_from_moments(&moments(&maxwellian(&s, &g).unwrap(), &g), 0).unwrap();
        let h2 = g.spacing().powi(2);
        assert!((r.rho - s.rho).abs() <= h2 && (r.theta - s.theta).abs() <= h2);
        assert!((0..3).all(|i| (r.u[i] - s.u[i]).abs() <= h2));
    }
}

#[test]
fn invalid_states_rejected() {
    let g = build_velocity_grid(2.0, 5).unwrap();
    assert!(maxwellian(&MaxwellState::new(1.0, [0.0; 3], 0.0), &g).is_err());
    assert!(maxwellian(&MaxwellState::new(-1.0, [0.0; 3], 1.0), &g).is_err());
    assert!(matches!(
        fluid_from_moments(&[1.0, 0.0, 0.0, 0.0, -1.0], 4),
        Err(LandauError::MomentRecovery { x_node: 4, .. })
    ));
}
