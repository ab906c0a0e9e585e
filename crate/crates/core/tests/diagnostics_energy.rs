use std::f64::consts::PI;

use proptest::prelude::*;
use sphere_blowup::ansatz::{Ansatz, AnsatzParams, Mode};
use sphere_blowup::diagnostics::*;
use sphere_blowup::field::ScalarField;
use sphere_blowup::geometry::SpherePoint;
use sphere_blowup::harmonics::real_harmonics;
use sphere_blowup::quadrature::build_rule;
use sphere_blowup::symmetry::reference_tetrahedron;

/// `Σ a_{ℓm} Y_{ℓm} + shift` with its exact Laplacian.
struct Harmonic {
    lmax: usize,
    coeffs: Vec<f64>,
    shift: f64,
}

impl ScalarField for Harmonic {
    fn value(&self, y: &SpherePoint) -> f64 {
        real_harmonics(self.lmax, y).iter().zip(&self.coeffs).map(|(a, b)| a * b).sum::<f64>() + self.shift
    }
    fn laplacian(&self, y: &SpherePoint) -> f64 {
        let ys = real_harmonics(self.lmax, y);
        (0..=self.lmax)
            .flat_map(|l| (l * l..(l + 1) * (l + 1)).map(move |k| (l, k)))
            .map(|(l, k)| -((l * (l + 1)) as f64) * ys[k] * self.coeffs[k])
            .sum()
    }
}

fn harmonic(lmax: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-0.5f64..0.5, (lmax + 1) * (lmax + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn residual_has_zero_mean(coeffs in harmonic(4), rho in 1.0f64..120.0) {
        let u = Harmonic { lmax: 4, coeffs, shift: 0.0 };
        let rule = build_rule(24, &reference_tetrahedron(), 0.1).unwrap();
        let res = Residual::new(rho, &u, &rule).unwrap();
        let vals: Vec<f64> = rule.nodes.iter().map(|y| res.at(y).unwrap()).collect();
        prop_assert!(rule.sum_values(&vals).abs() < 1e-10);
    }

    #[test]
    fn constants_do_not_change_residual_or_energy(coeffs in harmonic(3), c in -5.0f64..5.0) {
        let rule = build_rule(24, &reference_tetrahedron(), 0.1).unwrap();
        let u = Harmonic { lmax: 3, coeffs: coeffs.clone(), shift: 0.0 };
        let v = Harmonic { lmax: 3, coeffs, shift: c };
        let rho = 32.0 * PI + 0.3;
        let (ru, rv) = (Residual::new(rho, &u, &rule).unwrap(), Residual::new(rho, &v, &rule).unwrap());
        for y in rule.nodes.iter().step_by(97) {
            prop_assert!((ru.at(y).unwrap() - rv.at(y).unwrap()).abs() <= 1e-10);
        }
        let (ju, jv) = (energy_j(rho, &u, &rule).unwrap(), energy_j(rho, &v, &rule).unwrap());
        prop_assert!((ju.total - jv.total).abs() <= 1e-8);
    }

    #[test]
    fn dirichlet_energy_two_routes(coeffs in harmonic(3)) {
        let rule = build_rule(24, &reference_tetrahedron(), 0.1).unwrap();
        let u = Harmonic { lmax: 3, coeffs: coeffs.clone(), shift: 0.0 };
        let by_grad = energy_j(8.0 * PI, &u, &rule).unwrap().dirichlet;
        let by_pair = dirichlet_by_pairing(&u, &rule).unwrap();
        // ½ Σ ℓ(ℓ+1) a² for orthonormal harmonics
        let spectral: f64 = (0..=3usize).flat_map(|l| (l * l..(l + 1) * (l + 1)).map(move |k| (l, k)))
            .map(|(l, k)| 0.5 * (l * (l + 1)) as f64 * coeffs[k] * coeffs[k]).sum();
        prop_assert!((by_pair - spectral).abs() < 1e-10 * (1.0 + spectral));
        prop_assert!((by_grad - spectral).abs() < 1e-6 * (1.0 + spectral));
    }
}

#[test]
fn ansatz_dirichlet_energy_two_routes() {
    let params = AnsatzParams::tetrahedral(0.5, 0.05).unwrap();
    let rule = build_rule(48, &params.config, 0.05).unwrap();
    let a = Ansatz::new(params, Mode::Exact);
    let g = energy_j(32.0 * PI + 0.5, &a, &rule).unwrap().dirichlet;
    let p = dirichlet_by_pairing(&a, &rule).unwrap();
    assert!((g - p).abs() < 1e-7 * g, "{g} vs {p}");
}

#[test]
fn expansions_have_bounded_remainders() {
    let lams = [0.1, 0.05, 0.025];
    let samples: Vec<ExpansionSample> = lams.iter().map(|&l| expansion_sample(0.5, l, 48).unwrap()).collect();
    let check = |name: &str, f: &dyn Fn(&ExpansionSample) -> (f64, f64)| {
        let m: Vec<f64> = samples.iter().map(|s| f(s).0).collect();
        let p: Vec<f64> = samples.iter().map(|s| f(s).1).collect();
        let rep = ExpansionReport::new(lams.to_vec(), m, p);
        assert!(rep.bounded(3.0), "{name}: {:?}", rep.remainder_ratio);
    };
    check("center", &|s| (s.component_center, s.component_center_pred));
    check("outer component", &|s| (s.component_outer, s.component_outer_pred));
    check("peak", &|s| (s.ansatz_peak, s.ansatz_peak_pred));
    check("outer", &|s| (s.ansatz_outer, s.ansatz_outer_pred));
    check("integral", &|s| (s.integral_exp, s.integral_exp_pred));
    check("energy", &|s| (s.energy, s.energy_pred));
}

#[test]
fn residual_bounds_and_symmetry() {
    let reports: Vec<ResidualBoundReport> =
        [0.1, 0.05, 0.025].iter().map(|&l| residual_bound_report(stationary_eps(l), l, 48, 12).unwrap()).collect();
    let inner: Vec<f64> = reports.iter().map(|r| r.inner_ratio_max).collect();
    let outer: Vec<f64> = reports.iter().map(|r| r.outer_ratio_max).collect();
    assert!(spread(&inner) <= 3.0, "{inner:?}");
    assert!(spread(&outer) <= 3.0, "{outer:?}");
    assert!(reports.iter().all(|r| r.symmetry_defect <= 1e-8));
}

#[test]
fn reduced_lambda_satisfies_the_stationarity_relation() {
    let mut ratios = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let c = reduced_lambda(eps, DEFAULT_EPS0).unwrap();
        assert!((stationary_eps(c.lambda_star) / eps - 1.0).abs() < 1e-8);
        assert!(c.bracket.0 < c.lambda_star && c.lambda_star < c.bracket.1);
        // the critical point maximizes the sampled reduced energy
        let jmax = c.j_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let jstar = 2.0 * eps * c.lambda_star.ln() + 384.0 * PI * c.lambda_star.powi(2) * c.lambda_star.ln();
        assert!(jstar >= jmax - 1e-15);
        ratios.push(c.eps_ratio);
    }
    assert!(ratios[0] < ratios[1] && ratios[1] < ratios[2] && ratios[2] < 384.0 * PI);
}

#[test]
fn reduced_lambda_validates_eps() {
    assert!(reduced_lambda(0.0, DEFAULT_EPS0).is_err());
    assert!(reduced_lambda(0.2, DEFAULT_EPS0).is_err());
    assert!(reduced_lambda(0.2, 1.0).is_ok());
}

#[test]
fn reduction_constants_are_nondegenerate() {
    let k = reduction_constants(0.01, 0.25, 10.0).unwrap();
    assert!(k.nondegeneracy().abs() > 1e-3, "{k:?}");
}

#[test]
fn star_norm_weights_the_core_down() {
    let params = AnsatzParams::tetrahedral(0.5, 0.01).unwrap();
    let xi = params.config.points()[0];
    let far = xi.antipode();
    assert!(star_weight(&params, &xi) < 1.0);
    assert!(star_weight(&params, &far) > 100.0);
    let one = |_: &SpherePoint| 1.0;
    let (star, inf) = norm_star(&one, &params, &[xi, far]);
    assert_eq!(inf, 1.0);
    assert!((star - star_weight(&params, &far)).abs() < 1e-12);
}
