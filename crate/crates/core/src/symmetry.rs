//! Green's function, the configuration energy `F`, the tetrahedral group and
//! the catalogue of symmetric point configurations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{chordal_distance, SpherePoint};

const COINCIDENT_TOL: f64 = 1e-12;

/// `G(y, y′) = −(1/2π) ln|y − y′|`.
pub fn green(y: &SpherePoint, yp: &SpherePoint) -> Result<f64> {
    let d = chordal_distance(y, yp);
    if d < COINCIDENT_TOL {
        return Err(Error::CoincidentPoints(d));
    }
    Ok(-d.ln() / (2.0 * PI))
}

/// An ordered list of distinct points on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigJson", into = "ConfigJson")]
pub struct Configuration {
    points: Vec<SpherePoint>,
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    m: usize,
    points: Vec<[f64; 3]>,
}

impl TryFrom<ConfigJson> for Configuration {
    type Error = Error;
    fn try_from(j: ConfigJson) -> Result<Self> {
        if j.m != j.points.len() {
            return Err(Error::InvalidParameter(format!("m = {} but {} points given", j.m, j.points.len())));
        }
        if j.points.iter().any(|p| p.iter().any(|c| !c.is_finite()) || p.iter().all(|c| *c == 0.0)) {
            return Err(Error::InvalidParameter("points must be finite and nonzero".into()));
        }
        Configuration::new(j.points.into_iter().map(SpherePoint::from).collect())
    }
}

impl From<Configuration> for ConfigJson {
    fn from(c: Configuration) -> Self {
        ConfigJson { m: c.m(), points: c.points.into_iter().map(Into::into).collect() }
    }
}

impl Configuration {
    /// Validates that all points are pairwise distinct.
    pub fn new(points: Vec<SpherePoint>) -> Result<Self> {
        for i in 0..points.len() {
            for j in 0..i {
                let d = chordal_distance(&points[i], &points[j]);
                if d < COINCIDENT_TOL {
                    return Err(Error::CoincidentPoints(d));
                }
            }
        }
        Ok(Configuration { points })
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Applies the orthogonal matrix `t` to every point.
    pub fn transform(&self, t: &Matrix3<f64>) -> Configuration {
        Configuration { points: self.points.iter().map(|p| SpherePoint::new(t * p.v())).collect() }
    }

    /// Pairwise chordal distances sorted ascending.
    pub fn sorted_distances(&self) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.m() * (self.m() - 1) / 2);
        for i in 0..self.m() {
            for j in 0..i {
                d.push(chordal_distance(&self.points[i], &self.points[j]));
            }
        }
        d.sort_by(f64::total_cmp);
        d
    }

    pub fn min_distance(&self) -> f64 {
        self.sorted_distances().first().copied().unwrap_or(f64::INFINITY)
    }

    /// `Σ_{j<k} G(p_j, p_k)`.
    pub fn green_sum(&self) -> f64 {
        -self.log_distance_sum() / (2.0 * PI)
    }

    fn log_distance_sum(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.m() {
            for j in 0..i {
                s += chordal_distance(&self.points[i], &self.points[j]).ln();
            }
        }
        s
    }
}

/// `F = 4π Σ_{j<k} G(p_j,p_k) = −2 Σ_{j<k} ln|p_j − p_k|`.
pub fn config_energy(c: &Configuration) -> f64 {
    -2.0 * c.log_distance_sum()
}

/// Riemannian gradient of `F`: the ℝ³ gradient in each `p_i` projected onto `p_i⊥`.
pub fn config_gradient(c: &Configuration) -> Vec<Vector3<f64>> {
    let pts = c.points();
    pts.iter()
        .enumerate()
        .map(|(i, pi)| {
            let mut g = Vector3::zeros();
            for (j, pj) in pts.iter().enumerate() {
                if j != i {
                    let d = pi.v() - pj.v();
                    g -= d * (2.0 / d.norm_squared());
                }
            }
            g - pi.v() * g.dot(pi.v())
        })
        .collect()
}

/// Euclidean norm of the stacked Riemannian gradient.
pub fn gradient_norm(grad: &[Vector3<f64>]) -> f64 {
    grad.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt()
}

/// Retraction `p ↦ (p + v)/|p + v|` applied pointwise.
pub fn retract(c: &Configuration, step: &[Vector3<f64>]) -> Vec<SpherePoint> {
    c.points().iter().zip(step).map(|(p, v)| SpherePoint::new(p.v() + v)).collect()
}

/// Riemannian Hessian of `F` by central differences of [`config_gradient`]
/// with step `h`, in the tangent basis returned alongside it (2m columns).
pub fn config_hessian_fd(c: &Configuration, h: f64) -> (DMatrix<f64>, Vec<[Vector3<f64>; 2]>) {
    let m = c.m();
    let frames: Vec<[Vector3<f64>; 2]> = c
        .points()
        .iter()
        .map(|p| {
            let ch = crate::geometry::Chart::new(*p);
            [ch.e1, ch.e2]
        })
        .collect();
    let mut hess = DMatrix::zeros(2 * m, 2 * m);
    for col in 0..2 * m {
        let (i, a) = (col / 2, col % 2);
        let shifted = |s: f64| {
            let mut pts = c.points().to_vec();
            pts[i] = SpherePoint::new(pts[i].v() + frames[i][a] * s);
            config_gradient(&Configuration { points: pts })
        };
        let gp = shifted(h);
        let gm = shifted(-h);
        for row in 0..2 * m {
            let (j, b) = (row / 2, row % 2);
            hess[(row, col)] = (gp[j] - gm[j]).dot(&frames[j][b]) / (2.0 * h);
        }
    }
    let sym = (&hess + hess.transpose()) * 0.5;
    (sym, frames)
}

/// A finite group of orthogonal 3×3 matrices.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    pub elements: Vec<Matrix3<f64>>,
}

impl SymmetryGroup {
    /// Index of the element equal to `t` within `tol` (max-abs entry difference).
    pub fn find(&self, t: &Matrix3<f64>, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| (e - t).abs().max() <= tol)
    }
}

/// The full tetrahedral group `T_d` fixing [`reference_tetrahedron`]:
/// permutation matrices composed with sign patterns of product +1.
pub fn td_group() -> SymmetryGroup {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    const SIGNS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let mut elements = Vec::with_capacity(24);
    for p in PERMS {
        for s in SIGNS {
            let mut t = Matrix3::zeros();
            for (row, &col) in p.iter().enumerate() {
                t[(row, col)] = s[row];
            }
            elements.push(t);
        }
    }
    SymmetryGroup { elements }
}

/// Named configurations inscribed in the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfigKind {
    Triangle3,
    Tetrahedron4,
    Octahedron6,
    Cube8,
    /// Two square rings at heights ±h, the upper one rotated by `theta`.
    TwistedCuboid8 {
        theta: f64,
        h: f64,
    },
    Icosahedron12,
    Dodecahedron20,
}

impl ConfigKind {
    pub fn label(&self) -> &'static str {
        match self {
            ConfigKind::Triangle3 => "triangle3",
            ConfigKind::Tetrahedron4 => "tetrahedron4",
            ConfigKind::Octahedron6 => "octahedron6",
            ConfigKind::Cube8 => "cube8",
            ConfigKind::TwistedCuboid8 { .. } => "twisted_cuboid8",
            ConfigKind::Icosahedron12 => "icosahedron12",
            ConfigKind::Dodecahedron20 => "dodecahedron20",
        }
    }
}

/// The four vertices `(1,1,1)/√3, (1,−1,−1)/√3, (−1,1,−1)/√3, (−1,−1,1)/√3`.
pub fn reference_tetrahedron() -> Configuration {
    reference_config(ConfigKind::Tetrahedron4).expect("tetrahedron is valid")
}

pub fn reference_config(kind: ConfigKind) -> Result<Configuration> {
    let from = |v: Vec<[f64; 3]>| Configuration::new(v.into_iter().map(SpherePoint::from).collect());
    match kind {
        ConfigKind::Triangle3 => from(
            (0..3)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / 3.0;
                    [a.cos(), a.sin(), 0.0]
                })
                .collect(),
        ),
        ConfigKind::Tetrahedron4 => {
            from(vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
        }
        ConfigKind::Octahedron6 => from(vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ]),
        ConfigKind::Cube8 => reference_config(ConfigKind::TwistedCuboid8 { theta: 0.0, h: 1.0 / 3f64.sqrt() }),
        ConfigKind::TwistedCuboid8 { theta, h } => {
            if !(0.0..=PI / 4.0).contains(&theta) {
                return Err(Error::InvalidParameter(format!("twist angle {theta} outside [0, π/4]")));
            }
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::InvalidParameter(format!("ring height {h} outside (0, 1)")));
            }
            let rr = (1.0 - h * h).sqrt();
            let mut pts = Vec::with_capacity(8);
            for (z, shift) in [(h, theta), (-h, 0.0)] {
                for k in 0..4 {
                    let a = PI / 4.0 + PI / 2.0 * k as f64 + shift;
                    pts.push([rr * a.cos(), rr * a.sin(), z]);
                }
            }
            from(pts)
        }
        ConfigKind::Icosahedron12 => {
            let g = (1.0 + 5f64.sqrt()) / 2.0;
            let mut pts = Vec::with_capacity(12);
            for s1 in [-1.0, 1.0] {
                for s2 in [-1.0, 1.0] {
                    pts.push([0.0, s1, s2 * g]);
                    pts.push([s1, s2 * g, 0.0]);
                    pts.push([s2 * g, 0.0, s1]);
                }
            }
            from(pts)
        }
        ConfigKind::Dodecahedron20 => {
            let g = (1.0 + 5f64.sqrt()) / 2.0;
            let ig = 1.0 / g;
            let mut pts = Vec::with_capacity(20);
            for s1 in [-1.0, 1.0] {
                for s2 in [-1.0, 1.0] {
                    for s3 in [-1.0, 1.0] {
                        pts.push([s1, s2, s3]);
                    }
                    pts.push([0.0, s1 * ig, s2 * g]);
                    pts.push([s1 * ig, s2 * g, 0.0]);
                    pts.push([s2 * g, 0.0, s1 * ig]);
                }
            }
            from(pts)
        }
    }
}

/// Minimizes `F(twisted_cuboid8(θ, h))` over `h ∈ (0,1)` by golden-section search.
pub fn optimal_twisted_height(theta: f64) -> Result<f64> {
    let f = |h: f64| reference_config(ConfigKind::TwistedCuboid8 { theta, h }).map(|c| config_energy(&c));
    let (mut a, mut b) = (0.05, 0.95);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}
