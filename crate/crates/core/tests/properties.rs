#![allow(clippy::type_complexity, clippy::excessive_precision)]

use std::f64::consts::FRAC_1_SQRT_2;

use proptest::prelude::*;
use qes_core::exact::{self, Poly};
use qes_core::verify::{self, Tolerances};
use qes_core::{ks, series, sl2, Couplings, RadialGrid, Spin};

fn couplings() -> impl Strategy<Value = Couplings> {
    (0.25f64..6.0, 0.0f64..4.0, -4i32..=4).prop_map(|(w, k, m)| Couplings::new(w, k, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spin_half_spectrum_is_real_and_closed_form(c in couplings()) {
        let sol = sl2::solve_admissible_z(Spin::from_twice(1), &c, 1e-10).unwrap();
        prop_assert!(sol.diagnostics.is_empty());
        let s = c.abs_m() as f64;
        let root = (c.k * c.k / 4.0 + c.omega_l.powi(3) * (0.5 + s)).sqrt();
        let expected = [(c.k * (s + 1.0) - root) / c.omega_l, (c.k * (s + 1.0) + root) / c.omega_l];
        for (st, e) in sol.states.iter().zip(expected) {
            prop_assert!((st.z - e).abs() <= 1e-12 * e.abs().max(1.0), "{} vs {}", st.z, e);
        }
    }

    #[test]
    fn both_routes_agree(c in couplings(), level in 1usize..=9) {
        let rep = verify::cross_validate(Spin::from_level(level).unwrap(), &c, 1e-9).unwrap();
        prop_assert!(rep.exact_polynomials_equal);
        prop_assert!(rep.passed, "{:?}", rep);
    }

    #[test]
    fn eigenvectors_solve_the_recurrence(c in couplings(), level in 1usize..=8) {
        let sol = sl2::solve_admissible_z(Spin::from_level(level).unwrap(), &c, 1e-10).unwrap();
        prop_assert_eq!(sol.states.len(), level);
        for st in &sol.states {
            prop_assert!(series::termination_defect(level, &c, st.z).unwrap() < 1e-9);
            let mut rec = series::RecurrenceState::new(c, st.energy, st.z, 1.0);
            for _ in 1..level {
                rec.advance();
            }
            let scale = st.poly.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in rec.coeffs.iter().zip(&st.poly) {
                prop_assert!((a - b).abs() <= 1e-8 * scale, "{:?} vs {:?}", rec.coeffs, st.poly);
            }
        }
    }

    #[test]
    fn spectra_scale_covariantly(c in couplings(), level in 1usize..=6, lambda in 0.3f64..3.0) {
        let rep = verify::scaling_audit(Spin::from_level(level).unwrap(), &c, lambda, 1e-9).unwrap();
        prop_assert!(rep.ordering_preserved);
        prop_assert!(rep.max_z_relative < 1e-9, "{:?}", rep);
        prop_assert!(rep.max_energy_relative < 1e-12, "{:?}", rep);
    }

    #[test]
    fn energy_identity(c in couplings(), level in 1usize..=13) {
        let spin = Spin::from_level(level).unwrap();
        prop_assert_eq!(c.level_energy_exact(level), sl2::energy_x_exact(spin, &c));
    }

    #[test]
    fn sextic_eigenvalue_is_four_z(c in couplings(), level in 1usize..=4) {
        let sol = series::solve_series_states(level, &c, 1e-8).unwrap();
        for st in &sol.states {
            let sx = ks::to_sextic(st);
            prop_assert!(sx.eigenvalue_is_exact());
            prop_assert!(sx.degree_mapping_holds());
            prop_assert_eq!(sx.m_tilde, 2 * c.m);
        }
    }
}

#[test]
fn reference_characteristic_polynomials() {
    // monic, highest power first, from an independent symbolic derivation
    let cases: &[(u32, i32, f64, f64, &[(i64, i64)])] = &[
        (1, 0, 1.0, 1.0, &[(1, 1), (-2, 1), (1, 4)]),
        (1, 0, 1.0, 0.0, &[(1, 1), (0, 1), (-1, 2)]),
        (2, 0, 1.0, 2.0, &[(1, 1), (-9, 1), (20, 1), (-8, 1)]),
        (
            6,
            1,
            1.0,
            2.0,
            &[(1, 1), (-63, 1), (1491, 1), (-16317, 1), (79362, 1), (-105246, 1), (-229536, 1), (352944, 1)],
        ),
        (4, -2, 2.0, 1.0, &[(1, 1), (-45, 4), (-645, 8), (24033, 32), (233865, 256), (-4498965, 1024)]),
    ];
    for &(twice, m, w, k, coeffs) in cases {
        let c = Couplings::new(w, k, m).unwrap();
        let expected = Poly::from_coeffs(coeffs.iter().rev().map(|&(n, d)| exact::frac(n, d)).collect());
        let spin = Spin::from_twice(twice);
        assert_eq!(sl2::build_qes_matrix(spin, &c).characteristic_polynomial(), expected);
        assert_eq!(series::constraint_polynomial(spin.level(), &c).unwrap().monic(), expected);
    }
}

#[test]
fn reference_roots() {
    let cases: &[(u32, i32, f64, f64, &[f64])] = &[
        (1, 0, 1.0, 0.0, &[-FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        (2, 0, 1.0, 2.0, &[0.51071142818992123721, 2.7108314535516900309, 5.7784571182583887319]),
        (
            4,
            -2,
            2.0,
            1.0,
            &[-7.9268099580770510422, -2.8400586343140670862, 2.1326775163991072314, 7.2334602653952266883, 12.650730810596784209],
        ),
    ];
    for &(twice, m, w, k, roots) in cases {
        let c = Couplings::new(w, k, m).unwrap();
        let sol = series::solve_series_states(twice as usize + 1, &c, 1e-8).unwrap();
        let zs: Vec<f64> = sol.states.iter().map(|s| s.z).collect();
        assert_eq!(zs.len(), roots.len());
        for (z, r) in zs.iter().zip(roots) {
            assert!((z - r).abs() <= 2.0 * f64::EPSILON * r.abs(), "{z} vs {r}");
        }
    }
}

#[test]
fn node_order_at_level_two() {
    for &(w, k, m) in &[(1.0, 1.0, 0), (0.5, 3.0, -2), (4.0, 0.0, 1), (2.0, 0.25, 3)] {
        let c = Couplings::new(w, k, m).unwrap();
        let sol = series::solve_series_states(2, &c, 1e-8).unwrap();
        let nodes: Vec<usize> = sol.states.iter().map(|s| verify::node_count(&s.poly)).collect();
        assert_eq!(nodes, vec![0, 1], "{w} {k} {m}");
    }
}

#[test]
fn level_one_matches_closed_form_pointwise() {
    let c = Couplings::new(1.5, 0.75, -2).unwrap();
    let st = &series::solve_series_states(1, &c, 1e-8).unwrap().states[0];
    assert_eq!(st.z, 2.5 * 0.5);
    for r in [0.01, 0.4, 1.0, 2.2] {
        let expected = st.norm_constant * r * r * (-0.75 * r * r - 0.5 * r).exp();
        assert!((st.radial_value(r) - expected).abs() <= 1e-15 * st.norm_constant);
    }
}

#[test]
fn low_lying_states_verify_on_the_default_grid() {
    let c = Couplings::new(1.0, 1.0, 0).unwrap();
    for level in 1..=3 {
        for st in series::solve_series_states(level, &c, 1e-8).unwrap().states {
            let grid = RadialGrid::default_for_state(&st).unwrap();
            let rep = verify::verify_state(&st, &grid, &Tolerances::default()).unwrap();
            assert!(rep.norm_error < 1e-8, "{rep:?}");
            let ratio = verify::residual_convergence(&st, &grid).unwrap();
            assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        }
    }
}
