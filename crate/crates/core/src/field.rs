//! Scalar fields on the sphere and their finite-difference derivatives.
//!
//! Derivatives are taken in the stereographic chart centered at the
//! evaluation point, where the metric is `4|dx|²` at the origin, so
//! `Δ_g u(y) = ¼ Δ_x (u ∘ Π_y⁻¹)(0)`.

use nalgebra::{Vector2, Vector3};

use crate::geometry::{Chart, SpherePoint};

/// Which representation produced a field value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Direct evaluation of the defining formula.
    Exact,
    /// Inner expansion around center `k`.
    Inner(usize),
    /// Blend of inner and outer expansions around center `k`.
    Glued(usize),
    /// Outer (Green's function) expansion.
    Outer,
}

/// A real function on S².
pub trait ScalarField: Sync {
    fn value(&self, y: &SpherePoint) -> f64;

    fn branch(&self, _y: &SpherePoint) -> Branch {
        Branch::Exact
    }

    /// Length of the finest structure near `y`; sets finite-difference steps.
    fn length_scale(&self, _y: &SpherePoint) -> f64 {
        1.0
    }

    /// Laplace–Beltrami operator at `y`.
    fn laplacian(&self, y: &SpherePoint) -> f64 {
        fd_laplacian(self, y, fd_step(self.length_scale(y)))
    }

    /// Riemannian gradient at `y` as a tangent vector of ℝ³.
    fn gradient(&self, y: &SpherePoint) -> Vector3<f64> {
        fd_gradient(self, y, fd_step(self.length_scale(y)))
    }
}

/// Chart step `min(1e−3, scale/20)`.
pub fn fd_step(scale: f64) -> f64 {
    (scale / 20.0).min(1e-3)
}

impl<F: Fn(&SpherePoint) -> f64 + Sync> ScalarField for F {
    fn value(&self, y: &SpherePoint) -> f64 {
        self(y)
    }
}

fn five_point<F: ScalarField + ?Sized>(f: &F, chart: &Chart, center: f64, h: f64) -> f64 {
    let s = f.value(&chart.inverse(&Vector2::new(h, 0.0)))
        + f.value(&chart.inverse(&Vector2::new(-h, 0.0)))
        + f.value(&chart.inverse(&Vector2::new(0.0, h)))
        + f.value(&chart.inverse(&Vector2::new(0.0, -h)));
    (s - 4.0 * center) / (h * h)
}

/// Five-point Laplacian in the chart at `y` with two Richardson levels
/// (steps `h`, `h/2`, `h/4`; sixth order).
pub fn fd_laplacian<F: ScalarField + ?Sized>(f: &F, y: &SpherePoint, h: f64) -> f64 {
    let chart = Chart::new(*y);
    let c = f.value(y);
    let l1 = five_point(f, &chart, c, h);
    let l2 = five_point(f, &chart, c, h / 2.0);
    let l3 = five_point(f, &chart, c, h / 4.0);
    let r1 = (4.0 * l2 - l1) / 3.0;
    let r2 = (4.0 * l3 - l2) / 3.0;
    0.25 * (16.0 * r2 - r1) / 15.0
}

/// Plain five-point Laplacian with a single step.
pub fn fd_laplacian_plain<F: ScalarField + ?Sized>(f: &F, y: &SpherePoint, h: f64) -> f64 {
    let chart = Chart::new(*y);
    0.25 * five_point(f, &chart, f.value(y), h)
}

/// Central-difference gradient in the chart at `y` with one Richardson level.
pub fn fd_gradient<F: ScalarField + ?Sized>(f: &F, y: &SpherePoint, h: f64) -> Vector3<f64> {
    let chart = Chart::new(*y);
    let d =
        |e: Vector2<f64>, h: f64| (f.value(&chart.inverse(&(e * h))) - f.value(&chart.inverse(&(-e * h)))) / (2.0 * h);
    let partial = |e: Vector2<f64>| (4.0 * d(e, h / 2.0) - d(e, h)) / 3.0;
    let gx = partial(Vector2::new(1.0, 0.0));
    let gy = partial(Vector2::new(0.0, 1.0));
    // push_forward(0, e_i) = 2 e_i and g^{ij} = δ^{ij}/4 at the chart origin
    (chart.e1 * gx + chart.e2 * gy) * 0.5
}
