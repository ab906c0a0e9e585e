use nalgebra::{Vector2, Vector3};
use proptest::prelude::*;
use sphere_blowup::geometry::*;

fn point() -> impl Strategy<Value = SpherePoint> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let s = (1.0 - z * z).sqrt();
        SpherePoint::from_xyz(s * phi.cos(), s * phi.sin(), z)
    })
}

proptest! {
    #[test]
    fn project_inverse_round_trip(p in point(), y in point()) {
        prop_assume!(chordal_distance(&p, &y.antipode()) > 1e-3);
        let chart = Chart::new(p);
        let x = chart.project(&y).unwrap();
        prop_assert!((chart.inverse(&x).v() - y.v()).norm() < 1e-10);
    }

    #[test]
    fn chart_radius_agrees_with_projection_and_chordal_route(p in point(), y in point()) {
        prop_assume!(chordal_distance(&p, &y.antipode()) > 1e-3);
        let r = Chart::new(p).project(&y).unwrap().norm();
        let r1 = chart_radius(&p, &y);
        let r2 = chart_radius_from_chordal(chordal_distance(&p, &y));
        prop_assert!((r - r1).abs() <= 1e-9 * (1.0 + r));
        prop_assert!((r - r2).abs() <= 1e-6 * (1.0 + r * r));
    }

    #[test]
    fn chordal_distance_from_chart_coordinates(p in point(), a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0) {
        // |y − y′|² = 4|x − x′|² / ((1+|x|²)(1+|x′|²))
        let chart = Chart::new(p);
        let (x, xp) = (Vector2::new(a, b), Vector2::new(c, d));
        let lhs = chordal_distance(&chart.inverse(&x), &chart.inverse(&xp)).powi(2);
        let rhs = 4.0 * (x - xp).norm_squared() / ((1.0 + x.norm_squared()) * (1.0 + xp.norm_squared()));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn charts_are_conformal(p in point(), a in -2.0f64..2.0, b in -2.0f64..2.0, t in 0.0f64..std::f64::consts::TAU) {
        let chart = Chart::new(p);
        let x = Vector2::new(a, b);
        let dx = Vector2::new(t.cos(), t.sin());
        let v: Vector3<f64> = chart.push_forward(&x, &dx);
        prop_assert!((v.norm_squared() - conformal_factor(&x)).abs() < 1e-12);
        prop_assert!(v.dot(chart.inverse(&x).v()).abs() < 1e-12);
    }
}

#[test]
fn antipode_has_no_chart_image() {
    let p = SpherePoint::from_xyz(0.3, -0.4, 0.5);
    assert!(Chart::new(p).project(&p.antipode()).is_err());
    assert!(chart_radius(&p, &p.antipode()).is_infinite());
}
