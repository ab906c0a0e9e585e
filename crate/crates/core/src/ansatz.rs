//! The approximate blow-up solution: cut-offs, bubbles, the truncated-bubble
//! components `w_{λ,k}`, their glued approximations, the full ansatz `w_λ`
//! and the kernel functions of the linearized Liouville operator.
//!
//! Each component is the logarithmic potential
//! `w_{λ,k}(y) = ∫ G(y,y′) e^{U_{λ,ξ_k}} η_{R₀,ξ_k}(y′) dA(y′)` of a radial
//! density in the chart at `ξ_k`. With `G = −(1/4π) ln(4|x−x′|²/((1+|x|²)(1+|x′|²)))`
//! in chart coordinates the angular average of `ln|x−x′|` is `ln max(r, s)`,
//! which reduces the potential to one-dimensional integrals of the mass
//! profile `M(r)` and of `μ(s) ln s`. These are closed form on `[0, R₀]` and
//! Gauss–Legendre quadratures on the blend annulus `[R₀, 2R₀]`.

use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};
use crate::field::{Branch, ScalarField};
use crate::geometry::{chart_radius, chordal_distance, Chart, SpherePoint};
use crate::quadrature::gauss_legendre;
use crate::symmetry::{reference_tetrahedron, Configuration};

pub const DEFAULT_R0: f64 = 0.25;
pub const DEFAULT_R1: f64 = 10.0;
pub const DEFAULT_ALPHA: f64 = 0.5;
/// Points of the Gauss–Legendre rule used on the blend annulus.
const ANNULUS_GL: usize = 40;

/// Quintic smoothstep `t³(10 − 15t + 6t²)` clamped to `[0, 1]`.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

pub fn smoothstep_d1(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    30.0 * t * t * (1.0 - t) * (1.0 - t)
}

pub fn smoothstep_d2(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
}

/// Cut-off profile: 1 on `s ≤ 1`, 0 on `s ≥ 2`, `|η′| ≤ 15/8`.
pub fn eta(s: f64) -> f64 {
    1.0 - smoothstep(s - 1.0)
}

pub fn eta_d1(s: f64) -> f64 {
    -smoothstep_d1(s - 1.0)
}

/// `χ_R(s)`: 1 on `s ≤ R`, 0 on `s ≥ R + 1`.
pub fn chi(s: f64, r: f64) -> f64 {
    1.0 - smoothstep(s - r)
}

/// `η(|Π_ξ(y)|/t)`, zero at the antipode of `ξ`.
pub fn cutoff_eta(t: f64, xi: &SpherePoint, y: &SpherePoint) -> f64 {
    let r = chart_radius(xi, y);
    if r.is_finite() {
        eta(r / t)
    } else {
        0.0
    }
}

/// `V_λ(r) + 2 ln(1+r²) − ln 4` as a function of the chart radius.
pub fn bubble_radial(lambda: f64, r: f64) -> f64 {
    let l2 = lambda * lambda;
    (8.0 * l2).ln() - 2.0 * (l2 + r * r).ln() + 2.0 * (r * r).ln_1p() - 4f64.ln()
}

/// `e^{U_{λ,p}}` as a function of the chart radius (density with respect to area).
pub fn bubble_density(lambda: f64, r: f64) -> f64 {
    let l2 = lambda * lambda;
    if !r.is_finite() {
        return 2.0 * l2;
    }
    let q = (1.0 + r * r) / (l2 + r * r);
    2.0 * l2 * q * q
}

/// The ρ = 8π bubble `U_{λ,p}(y)`.
pub fn bubble_u(lambda: f64, p: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
    }
    if (y.v() + p.v()).norm() < crate::geometry::ANTIPODE_TOL {
        return Err(Error::AntipodalPoint);
    }
    Ok(bubble_radial(lambda, chart_radius(p, y)))
}

/// `U_{λ,p}` as a field; it satisfies `Δ_g U = 2 − e^U`.
#[derive(Debug, Clone, Copy)]
pub struct BubbleField {
    pub lambda: f64,
    pub center: SpherePoint,
}

impl ScalarField for BubbleField {
    fn value(&self, y: &SpherePoint) -> f64 {
        bubble_radial(self.lambda, chart_radius(&self.center, y))
    }

    fn length_scale(&self, y: &SpherePoint) -> f64 {
        self.lambda + chart_radius(&self.center, y)
    }
}

/// Parameters of the ansatz.
#[derive(Debug, Clone)]
pub struct AnsatzParams {
    pub rho: f64,
    pub eps: f64,
    pub lambda: f64,
    pub config: Configuration,
    pub r0: f64,
    pub r1: f64,
    pub r3: f64,
    pub alpha: f64,
}

/// `ρ = 32π + ε`.
pub fn rho_from_eps(eps: f64) -> f64 {
    32.0 * PI + eps
}

/// Endpoints of the admissible ε-window `192π λ² ln(1/λ) < ε < 768π λ² ln(1/λ)`.
pub fn eps_bracket(lambda: f64) -> (f64, f64) {
    let q = lambda * lambda * (1.0 / lambda).ln();
    (192.0 * PI * q, 768.0 * PI * q)
}

impl AnsatzParams {
    /// Tetrahedral configuration with default constants.
    pub fn tetrahedral(eps: f64, lambda: f64) -> Result<Self> {
        Self::with_config(eps, lambda, reference_tetrahedron())
    }

    pub fn with_config(eps: f64, lambda: f64, config: Configuration) -> Result<Self> {
        let p = AnsatzParams {
            rho: rho_from_eps(eps),
            eps,
            lambda,
            config,
            r0: DEFAULT_R0,
            r1: DEFAULT_R1,
            r3: DEFAULT_R0,
            alpha: DEFAULT_ALPHA,
        };
        p.validate()?;
        Ok(p)
    }

    /// Positivity, `λ < 1/2`, `α ∈ (0,1)` and disjointness of the chart balls `B(ξ_k, 2R₀)`.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.lambda > 0.0 && self.lambda < 0.5) {
            return bad(format!("lambda = {} must lie in (0, 0.5)", self.lambda));
        }
        if !(self.eps > 0.0 && self.eps.is_finite() && self.rho.is_finite()) {
            return bad(format!("eps = {} must be positive and finite", self.eps));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} must lie in (0, 1)", self.alpha));
        }
        if !(self.r0 > 0.0 && self.r1 > 0.0 && self.r3 > 0.0) {
            return bad("radii must be positive".into());
        }
        // chart radius 2R₀ is the angle 2·atan(2R₀); balls are disjoint when
        // the centers are more than twice that apart
        let ang = 2.0 * (2.0 * self.r0).atan();
        let pts = self.config.points();
        for i in 0..pts.len() {
            for j in 0..i {
                if pts[i].dot(&pts[j]).clamp(-1.0, 1.0).acos() <= 2.0 * ang {
                    return bad(format!("chart balls of radius 2R0 = {} overlap", 2.0 * self.r0));
                }
            }
        }
        Ok(())
    }

    /// Whether `ε` lies strictly inside the admissible window for `λ`.
    pub fn in_bracket(&self) -> bool {
        let (lo, hi) = eps_bracket(self.lambda);
        lo < self.eps && self.eps < hi
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        AnsatzParams { lambda, ..self.clone() }
    }

    /// `w̄_λ = 2 ln λ + 5 ln 2 − 4π Σ_{j<k} G(ξ_j, ξ_k)`.
    pub fn wbar(&self) -> f64 {
        2.0 * self.lambda.ln() + 5.0 * 2f64.ln() - 4.0 * PI * self.config.green_sum()
    }
}

/// The radial potential `w_{λ,k}` of one truncated bubble, in chart radius `r`.
#[derive(Debug, Clone)]
pub struct BubbleComponent {
    pub lambda: f64,
    pub r0: f64,
    /// Total mass `∫ e^U η_{R₀} = 4π m₀`.
    pub m_tot: f64,
    m_r0: f64,
    /// `∫ μ(s) ln(1+s²) ds`.
    k_const: f64,
    /// `∫_{R₀}^{2R₀} μ(s) ln s ds`.
    t_r0: f64,
    gl: Vec<(f64, f64)>,
}

impl BubbleComponent {
    pub fn new(lambda: f64, r0: f64) -> Self {
        let (x, w) = gauss_legendre(ANNULUS_GL);
        let gl: Vec<(f64, f64)> = x.into_iter().zip(w).collect();
        let mut c = BubbleComponent { lambda, r0, m_tot: 0.0, m_r0: 0.0, k_const: 0.0, t_r0: 0.0, gl };
        let l2 = lambda * lambda;
        let u0 = r0 * r0;
        c.m_r0 = 8.0 * PI * u0 / (l2 + u0);
        c.m_tot = c.m_r0 + c.annulus(r0, 2.0 * r0, |s| c.mu(s));
        let fk = |u: f64| -(u.ln_1p()) / (l2 + u) + ((l2 + u) / (1.0 + u)).ln() / (1.0 - l2);
        c.k_const = 8.0 * PI * l2 * (fk(u0) - fk(0.0)) + c.annulus(r0, 2.0 * r0, |s| c.mu(s) * (s * s).ln_1p());
        c.t_r0 = c.annulus(r0, 2.0 * r0, |s| c.mu(s) * s.ln());
        c
    }

    /// Radial mass density `μ(s) = 8λ²/(λ²+s²)² η(s/R₀) 2πs`.
    pub fn mu(&self, s: f64) -> f64 {
        let l2 = self.lambda * self.lambda;
        let d = l2 + s * s;
        8.0 * l2 / (d * d) * eta(s / self.r0) * 2.0 * PI * s
    }

    fn annulus<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let (h, c) = (0.5 * (b - a), 0.5 * (a + b));
        h * self.gl.iter().map(|(x, w)| w * f(c + h * x)).sum::<f64>()
    }

    /// `m₀ = (1/4π) ∫ e^U η_{R₀}`.
    pub fn m0(&self) -> f64 {
        self.m_tot / (4.0 * PI)
    }

    /// Mass inside chart radius `r`.
    pub fn mass_profile(&self, r: f64) -> f64 {
        let l2 = self.lambda * self.lambda;
        if r <= self.r0 {
            8.0 * PI * r * r / (l2 + r * r)
        } else if r >= 2.0 * self.r0 {
            self.m_tot
        } else {
            self.m_r0 + self.annulus(self.r0, r, |s| self.mu(s))
        }
    }

    /// `T(r) = ∫_r^{2R₀} μ(s) ln s ds`.
    fn log_tail(&self, r: f64) -> f64 {
        if r >= 2.0 * self.r0 {
            return 0.0;
        }
        if r >= self.r0 {
            return self.annulus(r, 2.0 * self.r0, |s| self.mu(s) * s.ln());
        }
        let l2 = self.lambda * self.lambda;
        // 4π[u ln u/(λ²+u) − ln(λ²+u)] is an antiderivative in u = s²
        let ft = |u: f64| {
            let a = if u > 0.0 { u * u.ln() / (l2 + u) } else { 0.0 };
            4.0 * PI * (a - (l2 + u).ln())
        };
        ft(self.r0 * self.r0) - ft(r * r) + self.t_r0
    }

    /// `w_{λ,k}` at chart radius `r` (chordal distance `d` to the center).
    pub fn value(&self, r: f64, d: f64) -> f64 {
        if r >= 2.0 * self.r0 || !r.is_finite() {
            return -(2.0 * self.m_tot * d.ln() - self.k_const) / (4.0 * PI);
        }
        let lnr_m = if r > 0.0 { r.ln() * self.mass_profile(r) } else { 0.0 };
        -((4f64.ln() - (r * r).ln_1p()) * self.m_tot - self.k_const + 2.0 * lnr_m + 2.0 * self.log_tail(r)) / (4.0 * PI)
    }

    /// `dw/dr`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if !r.is_finite() {
            return 0.0;
        }
        -(self.mass_profile(r) - self.m_tot * r * r / (1.0 + r * r)) / (2.0 * PI * r)
    }

    /// `e^U η_{R₀}` at chart radius `r`.
    pub fn density(&self, r: f64) -> f64 {
        bubble_density(self.lambda, r) * if r.is_finite() { eta(r / self.r0) } else { 0.0 }
    }

    /// `Δ_g w_{λ,k} = m₀ − e^U η_{R₀}`.
    pub fn laplacian(&self, r: f64) -> f64 {
        self.m0() - self.density(r)
    }
}

/// `m₀` for the given parameters.
pub fn mass_m0(params: &AnsatzParams) -> f64 {
    BubbleComponent::new(params.lambda, params.r0).m0()
}

/// Evaluation mode for the components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Exact potential of the truncated bubble density.
    Exact,
    /// Inner and outer expansions blended by `η_{λ^α}`.
    Glued,
}

/// Inner expansion `w_i` of one component at chart radius `r`.
pub fn glue_inner(lambda: f64, r: f64) -> f64 {
    let z2 = (r / lambda).powi(2);
    -4.0 * lambda.ln() - 4.0 * 2f64.ln() - 4.0 * lambda * lambda * lambda.ln() - 2.0 * z2.ln_1p()
        + 2.0 * (r * r).ln_1p()
}

/// Outer expansion `w_o = 8πG(y, ξ_k) − 4λ² ln λ` from the chordal distance.
pub fn glue_outer(lambda: f64, d: f64) -> f64 {
    -4.0 * d.ln() - 4.0 * lambda * lambda * lambda.ln()
}

/// The ansatz `w_λ = Σ_k w_{λ,k} + w̄_λ` and its components.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub params: AnsatzParams,
    pub mode: Mode,
    pub component: BubbleComponent,
    pub charts: Vec<Chart>,
    wbar: f64,
}

impl Ansatz {
    pub fn new(params: AnsatzParams, mode: Mode) -> Self {
        let component = BubbleComponent::new(params.lambda, params.r0);
        let charts = params.config.points().iter().map(|p| Chart::new(*p)).collect();
        let wbar = params.wbar();
        Ansatz { params, mode, component, charts, wbar }
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    pub fn centers(&self) -> &[SpherePoint] {
        self.params.config.points()
    }

    pub fn wbar(&self) -> f64 {
        self.wbar
    }

    pub fn m0(&self) -> f64 {
        self.component.m0()
    }

    /// Gluing cut-off `η(|x|/λ^α)`.
    fn glue_eta(&self, r: f64) -> f64 {
        if !r.is_finite() {
            return 0.0;
        }
        eta(r / self.params.lambda.powf(self.params.alpha))
    }

    /// `w_{λ,k}(y)` in the requested mode.
    pub fn w_component(&self, k: usize, y: &SpherePoint, mode: Mode) -> f64 {
        let c = &self.centers()[k];
        let r = chart_radius(c, y);
        let d = chordal_distance(c, y);
        match mode {
            Mode::Exact => self.component.value(r, d),
            Mode::Glued => {
                let lam = self.params.lambda;
                let e = self.glue_eta(r);
                let inner = if e > 0.0 { glue_inner(lam, r) } else { 0.0 };
                let outer = if e < 1.0 { glue_outer(lam, d) } else { 0.0 };
                inner * e + outer * (1.0 - e)
            }
        }
    }

    /// `Σ_k e^{U_{λ,ξ_k}} η_{R₀,ξ_k}` at `y`.
    pub fn source_density(&self, y: &SpherePoint) -> f64 {
        self.centers().iter().map(|c| self.component.density(chart_radius(c, y))).sum()
    }

    /// Dilation kernel `Σ_j χ_{R₁}(|z_j|) φ₀(z_j)` with `z_j = Π_{ξ_j}(y)/λ`.
    pub fn dilation_test(&self, y: &SpherePoint) -> f64 {
        let lam = self.params.lambda;
        self.centers()
            .iter()
            .map(|c| {
                let z = chart_radius(c, y) / lam;
                if z.is_finite() {
                    chi(z, self.params.r1) * 2.0 * (z * z - 1.0) / (1.0 + z * z)
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `χ_{R₁} φ_{i,j}` at `y` for kernel index `i` and center `j`.
    pub fn kernel_test(&self, i: usize, j: usize, y: &SpherePoint) -> f64 {
        match self.charts[j].project(y) {
            Ok(x) => {
                let z = x / self.params.lambda;
                chi(z.norm(), self.params.r1) * kernel_phi(i, &z)
            }
            Err(_) => 0.0,
        }
    }
}

impl ScalarField for Ansatz {
    fn value(&self, y: &SpherePoint) -> f64 {
        (0..self.centers().len()).map(|k| self.w_component(k, y, self.mode)).sum::<f64>() + self.wbar
    }

    fn branch(&self, y: &SpherePoint) -> Branch {
        if self.mode == Mode::Exact {
            return Branch::Exact;
        }
        for (k, c) in self.centers().iter().enumerate() {
            let e = self.glue_eta(chart_radius(c, y));
            if e >= 1.0 {
                return Branch::Inner(k);
            }
            if e > 0.0 {
                return Branch::Glued(k);
            }
        }
        Branch::Outer
    }

    fn length_scale(&self, y: &SpherePoint) -> f64 {
        let rmin = self.centers().iter().map(|c| chart_radius(c, y)).fold(f64::INFINITY, f64::min);
        self.params.lambda + rmin
    }

    fn laplacian(&self, y: &SpherePoint) -> f64 {
        match self.mode {
            Mode::Exact => self.centers().iter().map(|c| self.component.laplacian(chart_radius(c, y))).sum(),
            Mode::Glued => crate::field::fd_laplacian(self, y, crate::field::fd_step(self.length_scale(y))),
        }
    }

    fn gradient(&self, y: &SpherePoint) -> Vector3<f64> {
        match self.mode {
            Mode::Exact => {
                let mut g = Vector3::zeros();
                for c in self.centers() {
                    let r = chart_radius(c, y);
                    if r == 0.0 || !r.is_finite() {
                        continue;
                    }
                    let ct = c.dot(y).clamp(-1.0, 1.0);
                    let away = y.v() * ct - c.v();
                    let n = away.norm();
                    if n == 0.0 {
                        continue;
                    }
                    // dr/dθ = (1 + r²)/2 along the unit tangent pointing away from c
                    g += away / n * (self.component.radial_derivative(r) * (1.0 + r * r) / 2.0);
                }
                g
            }
            Mode::Glued => crate::field::fd_gradient(self, y, crate::field::fd_step(self.length_scale(y))),
        }
    }
}

/// `∂w_λ/∂λ` by centered difference with relative step `1e−4`.
pub fn ansatz_dlambda(params: &AnsatzParams, y: &SpherePoint, mode: Mode) -> f64 {
    let h = params.lambda * 1e-4;
    let wp = Ansatz::new(params.with_lambda(params.lambda + h), mode).value(y);
    let wm = Ansatz::new(params.with_lambda(params.lambda - h), mode).value(y);
    (wp - wm) / (2.0 * h)
}

/// Analytic `∂/∂λ` of the glued ansatz.
pub fn glued_dlambda(params: &AnsatzParams, y: &SpherePoint) -> f64 {
    let lam = params.lambda;
    let la = lam.powf(params.alpha);
    let common = -8.0 * lam * lam.ln() - 4.0 * lam;
    let mut total = 2.0 / lam;
    for c in params.config.points() {
        let r = chart_radius(c, y);
        let d = chordal_distance(c, y);
        let s = r / la;
        let e = if r.is_finite() { eta(s) } else { 0.0 };
        let de = if r.is_finite() { eta_d1(s) * (-params.alpha * s / lam) } else { 0.0 };
        let wi = if e > 0.0 || de != 0.0 { glue_inner(lam, r) } else { 0.0 };
        let wo = if e < 1.0 { glue_outer(lam, d) } else { 0.0 };
        let dwi = -4.0 / lam + common + 4.0 * r * r / (lam * (lam * lam + r * r));
        total += e * dwi + (1.0 - e) * common + de * (wi - wo);
    }
    total
}

/// Kernel functions `φ₀ = 2(|z|²−1)/(1+|z|²)`, `φ_k = −4z_k/(1+|z|²)`.
pub fn kernel_phi(i: usize, z: &Vector2<f64>) -> f64 {
    let q = 1.0 + z.norm_squared();
    match i {
        0 => 2.0 * (z.norm_squared() - 1.0) / q,
        1 => -4.0 * z.x / q,
        2 => -4.0 * z.y / q,
        _ => panic!("kernel index {i} out of range 0..=2"),
    }
}

/// `∇²_x Σ_{j≠k} G(Π⁻¹_{ξ_k}(x), ξ_j)` at `x = 0` by central differences.
pub fn green_hessian_at_center(config: &Configuration, k: usize, h: f64) -> [[f64; 2]; 2] {
    let chart = Chart::new(config.points()[k]);
    let f = |x: Vector2<f64>| -> f64 {
        let y = chart.inverse(&x);
        config
            .points()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, p)| -chordal_distance(&y, p).ln() / (2.0 * PI))
            .sum()
    };
    let f0 = f(Vector2::zeros());
    let e1 = Vector2::new(h, 0.0);
    let e2 = Vector2::new(0.0, h);
    let fxx = (f(e1) - 2.0 * f0 + f(-e1)) / (h * h);
    let fyy = (f(e2) - 2.0 * f0 + f(-e2)) / (h * h);
    let fxy = (f(e1 + e2) - f(e1 - e2) - f(-e1 + e2) + f(-e1 - e2)) / (4.0 * h * h);
    [[fxx, fxy], [fxy, fyy]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fd_laplacian;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cutoff_profile() {
        let xi = SpherePoint::from_xyz(0.0, 0.0, 1.0);
        let ch = Chart::new(xi);
        let t = 0.3;
        assert_eq!(cutoff_eta(t, &xi, &ch.inverse(&Vector2::new(t / 2.0, 0.0))), 1.0);
        assert_eq!(cutoff_eta(t, &xi, &ch.inverse(&Vector2::new(0.0, 3.0 * t))), 0.0);
        assert_eq!(cutoff_eta(t, &xi, &xi.antipode()), 0.0);
        let max_d = (0..=20_000).map(|i| eta_d1(i as f64 * 1e-4).abs()).fold(0.0, f64::max);
        assert!(max_d <= 2.0);
        assert_abs_diff_eq!(max_d, 15.0 / 8.0, epsilon = 1e-6);
    }

    #[test]
    fn bubble_peak_and_symmetry() {
        let p = SpherePoint::from_xyz(1.0, -2.0, 0.5);
        let lam = 0.05;
        assert_abs_diff_eq!(bubble_u(lam, &p, &p).unwrap(), (2.0 / (lam * lam)).ln(), epsilon = 1e-12);
        let ch = Chart::new(p);
        let a = bubble_u(lam, &p, &ch.inverse(&Vector2::new(0.3, 0.4))).unwrap();
        let b = bubble_u(lam, &p, &ch.inverse(&Vector2::new(-0.5, 0.0))).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        assert_eq!(bubble_u(lam, &p, &p.antipode()), Err(Error::AntipodalPoint));
    }

    #[test]
    fn component_closed_forms_match_brute_force() {
        // brute-force radial integrals with a fine composite midpoint rule
        let c = BubbleComponent::new(0.1, DEFAULT_R0);
        let n = 400_000;
        let b = 2.0 * DEFAULT_R0;
        let h = b / n as f64;
        let (mut m, mut k, mut t) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let s = (i as f64 + 0.5) * h;
            m += c.mu(s) * h;
            k += c.mu(s) * (s * s).ln_1p() * h;
            t += c.mu(s) * s.ln() * h;
        }
        assert_abs_diff_eq!(c.m_tot, m, epsilon = 1e-7);
        assert_abs_diff_eq!(c.k_const, k, epsilon = 1e-7);
        assert_abs_diff_eq!(c.log_tail(0.0), t, epsilon = 1e-6);
    }

    #[test]
    fn component_solves_its_poisson_equation() {
        let params = AnsatzParams::tetrahedral(0.5, 0.08).unwrap();
        let a = Ansatz::new(params, Mode::Exact);
        let c = &a.component;
        let xi = a.centers()[0];
        let ch = &a.charts[0];
        let single = |y: &SpherePoint| c.value(chart_radius(&xi, y), chordal_distance(&xi, y));
        for r in [0.0, 0.03, 0.1, 0.3, 0.4, 0.7, 3.0] {
            let y = ch.inverse(&Vector2::new(r * 0.8, r * 0.6));
            let fd = fd_laplacian(&single, &y, crate::field::fd_step(0.08 + r));
            assert_abs_diff_eq!(fd, c.laplacian(r), epsilon = 1e-5 * (1.0 + c.laplacian(r).abs()));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let params = AnsatzParams::tetrahedral(0.5, 0.1).unwrap();
        let a = Ansatz::new(params, Mode::Exact);
        for y in [
            SpherePoint::from_xyz(0.5, 0.6, 0.62),
            SpherePoint::from_xyz(-0.1, 0.2, -0.9),
            SpherePoint::from_xyz(0.7, -0.55, -0.45),
        ] {
            let g = a.gradient(&y);
            let fd = crate::field::fd_gradient(&a, &y, 1e-4);
            assert_abs_diff_eq!(g, fd, epsilon = 1e-6 * (1.0 + g.norm()));
        }
    }

    #[test]
    fn kernel_closed_forms() {
        assert_eq!(kernel_phi(0, &Vector2::zeros()), -2.0);
        assert_abs_diff_eq!(kernel_phi(0, &Vector2::new(1e8, 0.0)), 2.0, epsilon = 1e-12);
        let z = Vector2::new(0.7, -1.3);
        let zf = Vector2::new(-0.7, -1.3);
        let zg = Vector2::new(0.7, 1.3);
        assert_eq!(kernel_phi(1, &zf), -kernel_phi(1, &z));
        assert_eq!(kernel_phi(1, &zg), kernel_phi(1, &z));
        assert_eq!(kernel_phi(2, &zg), -kernel_phi(2, &z));
    }

    #[test]
    fn glued_derivative_matches_centered_difference() {
        let params = AnsatzParams::tetrahedral(0.5, 0.05).unwrap();
        let ch = Chart::new(params.config.points()[1]);
        for r in [0.0, 0.02, 0.25, 0.35, 1.5] {
            let y = ch.inverse(&Vector2::new(r, 0.0));
            let fd = ansatz_dlambda(&params, &y, Mode::Glued);
            let an = glued_dlambda(&params, &y);
            assert_abs_diff_eq!(fd, an, epsilon = 1e-4 * an.abs());
        }
    }

    #[test]
    fn params_validation() {
        assert!(AnsatzParams::tetrahedral(0.5, 0.0).is_err());
        assert!(AnsatzParams::tetrahedral(0.5, 0.7).is_err());
        let mut p = AnsatzParams::tetrahedral(0.5, 0.01).unwrap();
        assert!(p.in_bracket());
        p.r0 = 0.3;
        assert!(p.validate().is_err());
    }
}
