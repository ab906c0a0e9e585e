use std::f64::consts::PI;

use nalgebra::Vector2;
use proptest::prelude::*;
use sphere_blowup::ansatz::*;
use sphere_blowup::diagnostics::log_log_slope;
use sphere_blowup::field::{fd_gradient, fd_laplacian, ScalarField};
use sphere_blowup::geometry::{Chart, SpherePoint};
use sphere_blowup::symmetry::td_group;

fn point() -> impl Strategy<Value = SpherePoint> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let s = (1.0 - z * z).sqrt();
        SpherePoint::from_xyz(s * phi.cos(), s * phi.sin(), z)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_laplacian_and_gradient_match_finite_differences(y in point(), lam in 0.02f64..0.2) {
        let a = Ansatz::new(AnsatzParams::tetrahedral(0.5, lam).unwrap(), Mode::Exact);
        let h = 1e-3f64.min(a.length_scale(&y) / 20.0);
        let lap = a.laplacian(&y);
        let fd = fd_laplacian(&a, &y, h);
        prop_assert!((lap - fd).abs() <= 1e-5 * (1.0 + lap.abs()), "{} vs {}", lap, fd);
        let g = a.gradient(&y);
        let gfd = fd_gradient(&a, &y, h);
        prop_assert!((g - gfd).norm() <= 1e-6 * (1.0 + g.norm()));
    }

    #[test]
    fn ansatz_is_td_invariant(y in point(), lam in 0.01f64..0.2) {
        for mode in [Mode::Exact, Mode::Glued] {
            let a = Ansatz::new(AnsatzParams::tetrahedral(0.5, lam).unwrap(), mode);
            let v = a.value(&y);
            for t in &td_group().elements {
                prop_assert!((a.value(&SpherePoint::new(t * y.v())) - v).abs() <= 1e-9 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn bubble_value_matches_chart_formula(lam in 0.01f64..0.5, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let p = SpherePoint::from_xyz(0.2, -0.5, 0.8);
        let x = Vector2::new(a, b);
        let y = Chart::new(p).inverse(&x);
        let r2 = x.norm_squared();
        let want = (8.0 * lam * lam / (lam * lam + r2).powi(2)).ln() - (4.0 / (1.0 + r2).powi(2)).ln();
        prop_assert!((bubble_u(lam, &p, &y).unwrap() - want).abs() < 1e-9);
    }
}

#[test]
fn bubble_solves_its_equation() {
    // Δ_g U = 2 − e^U for U_{λ,p}
    let b = BubbleField { lambda: 0.1, center: SpherePoint::from_xyz(0.0, 0.6, 0.8) };
    for (t, f) in [(0.3, 0.1), (1.0, 2.0), (2.5, -1.0)] {
        let y = SpherePoint::from_angles(t, f);
        let lhs = fd_laplacian(&b, &y, 1e-3);
        assert!((lhs - (2.0 - b.value(&y).exp())).abs() < 1e-6);
    }
}

#[test]
fn gluing_gap_decays_with_a_positive_power() {
    let lams = [0.1, 0.05, 0.025];
    let gaps: Vec<f64> = lams
        .iter()
        .map(|&l| {
            let a = Ansatz::new(AnsatzParams::tetrahedral(0.5, l).unwrap(), Mode::Exact);
            let chart = Chart::new(a.centers()[0]);
            (0..=1000)
                .map(|i| {
                    let y = chart.inverse(&Vector2::new(2.0 * (i as f64 / 1000.0).powi(3), 0.0));
                    (a.w_component(0, &y, Mode::Exact) - a.w_component(0, &y, Mode::Glued)).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(log_log_slope(&lams, &gaps) > 0.5, "{gaps:?}");
}

#[test]
fn kernel_functions_solve_the_linearized_equation() {
    // Δφ + 8/(1+|z|²)² φ = 0 in the plane
    let h = 1e-3;
    for i in 0..3 {
        for &(a, b) in &[(0.0, 0.0), (0.5, 0.2), (-2.0, 1.0), (6.0, -7.0)] {
            let z = Vector2::new(a, b);
            let f = |dz: Vector2<f64>| kernel_phi(i, &(z + dz));
            let lap = |h: f64| {
                (f(Vector2::new(h, 0.0))
                    + f(Vector2::new(-h, 0.0))
                    + f(Vector2::new(0.0, h))
                    + f(Vector2::new(0.0, -h))
                    - 4.0 * f(Vector2::zeros()))
                    / (h * h)
            };
            let rich = (4.0 * lap(h / 2.0) - lap(h)) / 3.0;
            let q = 1.0 + z.norm_squared();
            assert!((rich + 8.0 / (q * q) * f(Vector2::zeros())).abs() < 1e-6);
        }
    }
}

#[test]
fn cutoffs_have_the_stated_support() {
    assert_eq!(eta(0.5), 1.0);
    assert_eq!(eta(1.0), 1.0);
    assert_eq!(eta(2.0), 0.0);
    assert_eq!(chi(5.0, 10.0), 1.0);
    assert_eq!(chi(25.0, 10.0), 0.0);
    for k in 0..=100 {
        let s = 1.0 + k as f64 / 100.0;
        assert!((0.0..=1.0).contains(&eta(s)));
    }
}

#[test]
fn m0_tends_to_two() {
    let ratios: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&l| {
            let p = AnsatzParams::tetrahedral(0.5, l).unwrap();
            (mass_m0(&p) - 2.0).abs() / (l * l)
        })
        .collect();
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread <= 3.0, "{ratios:?}");
}

#[test]
fn rho_and_eps_round_trip() {
    assert!((rho_from_eps(0.5) - (32.0 * PI + 0.5)).abs() < 1e-14);
    assert!(AnsatzParams::tetrahedral(0.5, 0.6).is_err());
    assert!(AnsatzParams::tetrahedral(-0.1, 0.01).is_err());
}
