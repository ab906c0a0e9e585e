//! Composite quadrature on the sphere: a global Gauss–Legendre × trapezoid
//! product rule blended with graded polar rules around concentration points.
//!
//! The blend uses a polynomial partition of unity. Around center `ξ_k` the
//! window is `B_k(y) = I_u(48, 8)` with `u = (1 + y·ξ_k)/2`, a polynomial of
//! degree 55 in `y`; the local share is `ψ_k = B_k Π_{j≠k}(1 − B_j)`. The
//! global rule integrates `(1 − Σψ_k) f` and each local rule integrates `ψ_k f`.

use std::f64::consts::PI;

use nalgebra::Vector2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Chart, SpherePoint};
use crate::symmetry::Configuration;

const WINDOW_A: usize = 48;
const WINDOW_B: usize = 8;
/// Outer chart radius covered by each local rule.
const LOCAL_RMAX: f64 = 4.0;
/// Maximum panel width in the sinh-graded radial variable.
const PANEL_WIDTH: f64 = 0.75;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (h, c) = (0.5 * (b - a), 0.5 * (a + b));
    x.iter().zip(&w).map(|(xi, wi)| (c + h * xi, h * wi)).collect()
}

/// Regularized incomplete beta `I_u(A, B)` for the integer window parameters,
/// evaluated as a Bernstein tail sum.
pub fn window(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let n = WINDOW_A + WINDOW_B - 1;
    let v = 1.0 - u;
    let mut binom = 1.0f64;
    let mut sum = 0.0;
    for j in 0..=n {
        if j > 0 {
            binom = binom * (n - j + 1) as f64 / j as f64;
        }
        if j >= WINDOW_A {
            sum += binom * u.powi(j as i32) * v.powi((n - j) as i32);
        }
    }
    sum.min(1.0)
}

/// Partition-of-unity shares `ψ_k(y)` for every center.
pub fn partition(y: &SpherePoint, centers: &[SpherePoint]) -> Vec<f64> {
    let b: Vec<f64> = centers.iter().map(|c| window(0.5 * (1.0 + y.dot(c)))).collect();
    (0..b.len())
        .map(|k| b.iter().enumerate().fold(b[k], |acc, (j, bj)| if j == k { acc } else { acc * (1.0 - bj) }))
        .collect()
}

/// Compensated summation of `Σ a_i` in index order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in it {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Weighted node set on the sphere.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    pub refinement_centers: Vec<SpherePoint>,
    pub base_order: usize,
    pub lambda: f64,
    pub level: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i v_i` for precomputed node values.
    pub fn sum_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        neumaier_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }
}

/// Gauss–Legendre in `cos θ` times trapezoid in `φ`, padded by the window
/// degree so that windowed integrands keep the accuracy of the base order.
fn global_nodes(base_order: usize) -> Vec<(SpherePoint, f64)> {
    let ng = base_order + (WINDOW_A + WINDOW_B) / 2 + 1;
    let na = base_order + WINDOW_A + WINDOW_B + 1;
    let (x, w) = gauss_legendre(ng);
    let mut out = Vec::with_capacity(ng * na);
    for (ct, wt) in x.iter().zip(&w) {
        let st = (1.0 - ct * ct).sqrt();
        for j in 0..na {
            let ph = 2.0 * PI * j as f64 / na as f64;
            out.push((SpherePoint::from_xyz(st * ph.cos(), st * ph.sin(), *ct), wt * 2.0 * PI / na as f64));
        }
    }
    out
}

/// Polar rule in the chart at `center` with radial nodes `r = λ sinh t`.
fn local_nodes(center: &SpherePoint, lambda: f64, base_order: usize, level: usize) -> Vec<(SpherePoint, f64)> {
    let chart = Chart::new(*center);
    let tmax = (LOCAL_RMAX / lambda).asinh();
    let width = PANEL_WIDTH / level as f64;
    let npan = (tmax / width).ceil() as usize;
    let nper = (base_order / 3).max(14) * level;
    let na = base_order + WINDOW_A + WINDOW_B + 1;
    let mut out = Vec::with_capacity(npan * nper * na);
    for p in 0..npan {
        let a = tmax * p as f64 / npan as f64;
        let b = tmax * (p + 1) as f64 / npan as f64;
        for (t, wt) in gauss_legendre_on(nper, a, b) {
            let r = lambda * t.sinh();
            let drdt = lambda * t.cosh();
            let d = 1.0 + r * r;
            let wr = wt * drdt * r * 4.0 / (d * d);
            for j in 0..na {
                let ph = 2.0 * PI * j as f64 / na as f64;
                let x = Vector2::new(r * ph.cos(), r * ph.sin());
                out.push((chart.inverse(&x), wr * 2.0 * PI / na as f64));
            }
        }
    }
    out
}

/// Composite rule of order `base_order` refined around `centers` at scale `lambda`.
pub fn build_rule(base_order: usize, centers: &Configuration, lambda: f64) -> Result<QuadratureRule> {
    build_rule_level(base_order, centers, lambda, 1)
}

/// As [`build_rule`], with `level` times denser local rules.
pub fn build_rule_level(
    base_order: usize,
    centers: &Configuration,
    lambda: f64,
    level: usize,
) -> Result<QuadratureRule> {
    if base_order < 8 {
        return Err(Error::InvalidParameter(format!("base_order = {base_order} must be at least 8")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
    }
    if level < 1 {
        return Err(Error::InvalidParameter("level must be at least 1".into()));
    }
    let cs: Vec<SpherePoint> = centers.points().to_vec();
    let mut layers: Vec<Vec<(SpherePoint, f64)>> = Vec::with_capacity(cs.len() + 1);
    let global = global_nodes(base_order);
    layers.push(
        global
            .into_par_iter()
            .map(|(y, w)| {
                let share: f64 = partition(&y, &cs).iter().sum();
                (y, w * (1.0 - share))
            })
            .collect(),
    );
    for (k, c) in cs.iter().enumerate() {
        layers.push(
            local_nodes(c, lambda, base_order, level)
                .into_par_iter()
                .map(|(y, w)| (y, w * partition(&y, &cs)[k]))
                .collect(),
        );
    }
    let (nodes, weights): (Vec<SpherePoint>, Vec<f64>) =
        layers.into_iter().flatten().filter(|(_, w)| *w > 1e-300).unzip();
    Ok(QuadratureRule { nodes, weights, refinement_centers: cs, base_order, lambda, level })
}

/// `Σ w_i f(y_i)`; fails if any value is not finite.
pub fn integrate<F>(rule: &QuadratureRule, f: F) -> Result<f64>
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    let values: Vec<f64> = rule.nodes.par_iter().map(&f).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue(format!("integrand at node {i} is {}", values[i])));
    }
    Ok(rule.sum_values(&values))
}
