//! Points on the unit sphere and stereographic charts.
//!
//! The chart `Π_p` sends `p` to the origin and `-p` to infinity; the round
//! metric pulls back to `4/(1+|x|²)² |dx|²`.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for `|y + base|` below which a point counts as the chart antipode.
pub const ANTIPODE_TOL: f64 = 1e-9;

/// A unit vector in ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpherePoint(Vector3<f64>);

impl SpherePoint {
    /// Normalizes `v`; panics on the zero vector.
    pub fn new(v: Vector3<f64>) -> Self {
        let n = v.norm();
        assert!(n > 0.0 && n.is_finite(), "cannot normalize {v:?}");
        SpherePoint(v / n)
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Self {
        Self::new(Vector3::new(x, y, z))
    }

    /// Polar angle θ ∈ [0, π] and azimuth φ ∈ (−π, π].
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        SpherePoint(Vector3::new(st * phi.cos(), st * phi.sin(), ct))
    }

    pub fn v(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn angles(&self) -> (f64, f64) {
        (self.0.z.clamp(-1.0, 1.0).acos(), self.0.y.atan2(self.0.x))
    }

    pub fn antipode(&self) -> Self {
        SpherePoint(-self.0)
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.0.dot(&other.0)
    }
}

impl From<[f64; 3]> for SpherePoint {
    fn from(a: [f64; 3]) -> Self {
        SpherePoint::new(Vector3::new(a[0], a[1], a[2]))
    }
}

impl From<SpherePoint> for [f64; 3] {
    fn from(p: SpherePoint) -> Self {
        [p.0.x, p.0.y, p.0.z]
    }
}

/// Isothermal coordinates of a point in the chart centered at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub base: SpherePoint,
    pub x: Vector2<f64>,
}

/// A stereographic chart with a fixed orthonormal tangent frame `(e1, e2)` at the base.
#[derive(Debug, Clone, Copy)]
pub struct Chart {
    pub base: SpherePoint,
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
}

impl Chart {
    pub fn new(base: SpherePoint) -> Self {
        let c = base.0;
        let a = if c.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let e1 = (a - c * a.dot(&c)).normalize();
        let e2 = c.cross(&e1);
        Chart { base, e1, e2 }
    }

    /// Chart coordinates of `y`; fails at the antipode of the base.
    pub fn project(&self, y: &SpherePoint) -> Result<Vector2<f64>> {
        let v = y.0;
        let denom = 1.0 + v.dot(&self.base.0);
        if (v + self.base.0).norm() < ANTIPODE_TOL {
            return Err(Error::AntipodalPoint);
        }
        Ok(Vector2::new(v.dot(&self.e1), v.dot(&self.e2)) / denom)
    }

    pub fn inverse(&self, x: &Vector2<f64>) -> SpherePoint {
        let r2 = x.norm_squared();
        let d = 1.0 + r2;
        let v = self.base.0 * ((1.0 - r2) / d) + self.e1 * (2.0 * x.x / d) + self.e2 * (2.0 * x.y / d);
        SpherePoint::new(v)
    }

    /// Pushes a chart vector `dx` at `x` forward to a tangent vector of ℝ³.
    pub fn push_forward(&self, x: &Vector2<f64>, dx: &Vector2<f64>) -> Vector3<f64> {
        let r2 = x.norm_squared();
        let d = 1.0 + r2;
        let d2 = d * d;
        let xd = x.dot(dx);
        self.base.0 * (-4.0 * xd / d2)
            + self.e1 * (2.0 * dx.x / d - 4.0 * x.x * xd / d2)
            + self.e2 * (2.0 * dx.y / d - 4.0 * x.y * xd / d2)
    }
}

/// `Π_base(y)` in the chart with the canonical frame of [`Chart::new`].
pub fn stereo_project(base: &SpherePoint, y: &SpherePoint) -> Result<ChartPoint> {
    let x = Chart::new(*base).project(y)?;
    Ok(ChartPoint { base: *base, x })
}

/// `Π_base⁻¹(x)`.
pub fn stereo_inverse(base: &SpherePoint, x: &Vector2<f64>) -> SpherePoint {
    Chart::new(*base).inverse(x)
}

/// Area density `4/(1+|x|²)²` of the round metric in a stereographic chart.
pub fn conformal_factor(x: &Vector2<f64>) -> f64 {
    let d = 1.0 + x.norm_squared();
    4.0 / (d * d)
}

/// Euclidean distance in ℝ³.
pub fn chordal_distance(y: &SpherePoint, yp: &SpherePoint) -> f64 {
    (y.0 - yp.0).norm()
}

/// Chart radius `|Π_p(y)|` from the chordal distance `d = |y − p|`.
pub fn chart_radius_from_chordal(d: f64) -> f64 {
    let d2 = d * d;
    if d2 >= 4.0 {
        f64::INFINITY
    } else {
        (d2 / (4.0 - d2)).sqrt()
    }
}

/// Chart radius `|Π_p(y)|` computed from `cos ∠(p, y)`.
pub fn chart_radius(p: &SpherePoint, y: &SpherePoint) -> f64 {
    // tan(θ/2) = sin θ / (1 + cos θ), with sin θ taken from the cross product for accuracy
    let s = p.0.cross(&y.0).norm();
    let c = p.0.dot(&y.0);
    if 1.0 + c <= 0.0 {
        return f64::INFINITY;
    }
    if c >= 0.0 {
        s / (1.0 + c)
    } else {
        (1.0 - c) / s
    }
}
