//! Galerkin–Newton refinement of the ansatz to a numerical solution and
//! continuation in ρ.
//!
//! The unknown is `u = w_λ + φ` with `φ` in the span of a symmetry-adapted,
//! mean-zero harmonic basis. The Galerkin equations are `⟨S_ρ(u), b_i⟩ = 0`.
//! When the scale is free, `λ` is an additional unknown fixed by the
//! dilation condition `⟨S_ρ(u), Σ_j χ_{R₁}φ_{0,j}⟩ = 0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::{bubble_density, bubble_radial, chi, kernel_phi, Ansatz, AnsatzParams, Mode};
use crate::diagnostics::{cap_mass, reduced_lambda};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{chart_radius, Chart, SpherePoint};
use crate::harmonics::{build_symmetric_basis, SymmetricBasis};
use crate::quadrature::{build_rule, QuadratureRule};
use crate::symmetry::{td_group, Configuration};

/// Largest ε accepted when deriving the initial scale from the reduced relation.
pub const NEWTON_EPS0: f64 = 10.0;
/// Condition-number estimate above which the Jacobian counts as singular.
pub const MAX_CONDITION: f64 = 1e12;
/// Consecutive step halvings allowed before declaring divergence.
pub const MAX_HALVINGS: usize = 5;

/// Values of the base field `w_λ` and related functions at the quadrature nodes.
pub struct BaseSample {
    pub value: Vec<f64>,
    pub laplacian: Vec<f64>,
    /// Dilation test function `Σ_j χ_{R₁}φ_{0,j}`.
    pub dilation: Vec<f64>,
}

/// A one-parameter family of base fields `λ ↦ w_λ`.
pub trait AnsatzFamily: Sync {
    fn centers(&self) -> Vec<SpherePoint>;
    fn value(&self, lambda: f64, y: &SpherePoint) -> f64;
    fn sample(&self, lambda: f64, nodes: &[SpherePoint]) -> BaseSample;
    /// `χ_{R₁}φ_{i,j}` at `y`.
    fn kernel_test(&self, lambda: f64, i: usize, j: usize, y: &SpherePoint) -> f64;
}

/// The tetrahedral ansatz with exact components.
pub struct TetrahedralFamily {
    pub template: AnsatzParams,
}

impl AnsatzFamily for TetrahedralFamily {
    fn centers(&self) -> Vec<SpherePoint> {
        self.template.config.points().to_vec()
    }

    fn value(&self, lambda: f64, y: &SpherePoint) -> f64 {
        Ansatz::new(self.template.with_lambda(lambda), Mode::Exact).value(y)
    }

    fn sample(&self, lambda: f64, nodes: &[SpherePoint]) -> BaseSample {
        let a = Ansatz::new(self.template.with_lambda(lambda), Mode::Exact);
        let triples: Vec<(f64, f64, f64)> =
            nodes.par_iter().map(|y| (a.value(y), a.laplacian(y), a.dilation_test(y))).collect();
        BaseSample {
            value: triples.iter().map(|t| t.0).collect(),
            laplacian: triples.iter().map(|t| t.1).collect(),
            dilation: triples.iter().map(|t| t.2).collect(),
        }
    }

    fn kernel_test(&self, lambda: f64, i: usize, j: usize, y: &SpherePoint) -> f64 {
        Ansatz::new(self.template.with_lambda(lambda), Mode::Exact).kernel_test(i, j, y)
    }
}

/// A single bubble `U_{λ,p}`, an exact solution for `ρ = 8π`.
pub struct SingleBubbleFamily {
    pub center: SpherePoint,
    pub r1: f64,
}

impl AnsatzFamily for SingleBubbleFamily {
    fn centers(&self) -> Vec<SpherePoint> {
        vec![self.center]
    }

    fn value(&self, lambda: f64, y: &SpherePoint) -> f64 {
        bubble_radial(lambda, chart_radius(&self.center, y))
    }

    fn sample(&self, lambda: f64, nodes: &[SpherePoint]) -> BaseSample {
        let v: Vec<(f64, f64, f64)> = nodes
            .par_iter()
            .map(|y| {
                let r = chart_radius(&self.center, y);
                let z = r / lambda;
                let dil = if z.is_finite() { chi(z, self.r1) * 2.0 * (z * z - 1.0) / (1.0 + z * z) } else { 0.0 };
                (bubble_radial(lambda, r), 2.0 - bubble_density(lambda, r), dil)
            })
            .collect();
        BaseSample {
            value: v.iter().map(|t| t.0).collect(),
            laplacian: v.iter().map(|t| t.1).collect(),
            dilation: v.iter().map(|t| t.2).collect(),
        }
    }

    fn kernel_test(&self, lambda: f64, i: usize, _j: usize, y: &SpherePoint) -> f64 {
        match Chart::new(self.center).project(y) {
            Ok(x) => {
                let z = x / lambda;
                chi(z.norm(), self.r1) * kernel_phi(i, &z)
            }
            Err(_) => 0.0,
        }
    }
}

/// Quadrature rule with the basis tabulated at its nodes.
pub struct Discretization {
    pub rule: QuadratureRule,
    pub basis: SymmetricBasis,
    /// Basis values, one column per node.
    pub table: DMatrix<f64>,
    pub eigen: Vec<f64>,
}

impl Discretization {
    pub fn new(rule: QuadratureRule, basis: SymmetricBasis) -> Self {
        let table = basis.eval_nodes(&rule.nodes);
        let eigen = basis.laplace_eigenvalues();
        Discretization { rule, basis, table, eigen }
    }

    /// Tetrahedral basis of degree `≤ degree_cap` on a rule of order `2L + 16`.
    pub fn tetrahedral(config: &Configuration, lambda: f64, degree_cap: usize) -> Result<Self> {
        if degree_cap < 4 {
            return Err(Error::InvalidParameter(format!("L = {degree_cap} must be at least 4")));
        }
        let rule = build_rule(2 * degree_cap + 16, config, lambda)?;
        let basis = build_symmetric_basis(degree_cap, &td_group())?;
        Ok(Discretization::new(rule, basis))
    }

    pub fn n(&self) -> usize {
        self.basis.count()
    }

    /// `Σ_i c_i b_i` at the nodes.
    pub fn synthesize(&self, c: &DVector<f64>) -> Vec<f64> {
        self.table.tr_mul(c).iter().copied().collect()
    }

    /// `⟨f, b_i⟩` for node values `f`.
    pub fn project(&self, f: &[f64]) -> DVector<f64> {
        let wf = DVector::from_iterator(f.len(), f.iter().zip(&self.rule.weights).map(|(a, w)| a * w));
        &self.table * wf
    }
}

/// Node-level fields of `u = w_λ + φ`.
pub struct Evaluation {
    pub u: Vec<f64>,
    pub eu: Vec<f64>,
    pub integral: f64,
    pub residual: Vec<f64>,
    pub dilation: Vec<f64>,
    pub galerkin: DVector<f64>,
    pub dilation_projection: f64,
}

/// Evaluates `S_ρ(w_λ + φ)` and its projections.
pub fn evaluate<F: AnsatzFamily + ?Sized>(
    rho: f64,
    family: &F,
    disc: &Discretization,
    lambda: f64,
    c: &DVector<f64>,
) -> Result<Evaluation> {
    let base = family.sample(lambda, &disc.rule.nodes);
    let phi = disc.synthesize(c);
    let lc = DVector::from_iterator(c.len(), c.iter().zip(&disc.eigen).map(|(a, e)| a * e));
    let lap_phi = disc.synthesize(&lc);
    let u: Vec<f64> = base.value.iter().zip(&phi).map(|(a, b)| a + b).collect();
    let eu: Vec<f64> = u.iter().map(|v| v.exp()).collect();
    let integral = disc.rule.sum_values(&eu);
    if !integral.is_finite() || integral <= 0.0 {
        return Err(Error::NonFiniteValue(format!("∫e^u = {integral}")));
    }
    let residual: Vec<f64> =
        (0..u.len()).map(|i| base.laplacian[i] + lap_phi[i] + rho * (eu[i] / integral - 1.0 / (4.0 * PI))).collect();
    if residual.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue("residual".into()));
    }
    let galerkin = disc.project(&residual);
    let sz: Vec<f64> = residual.iter().zip(&base.dilation).map(|(s, z)| s * z).collect();
    let dilation_projection = disc.rule.sum_values(&sz);
    Ok(Evaluation { u, eu, integral, residual, dilation: base.dilation, galerkin, dilation_projection })
}

/// Galerkin matrix `⟨𝓛_u b_j, b_i⟩ = −ℓ_i(ℓ_i+1)δ_ij + ρ Cov_{e^u/∫e^u}(b_i, b_j)`.
pub fn galerkin_jacobian(rho: f64, disc: &Discretization, ev: &Evaluation) -> DMatrix<f64> {
    let p: Vec<f64> = ev.eu.iter().zip(&disc.rule.weights).map(|(e, w)| e * w / ev.integral).collect();
    let mut scaled = disc.table.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= p[j];
    }
    let m = &scaled * DVector::from_element(p.len(), 1.0);
    let mut jac = (&scaled * disc.table.transpose() - &m * m.transpose()) * rho;
    for (i, e) in disc.eigen.iter().enumerate() {
        jac[(i, i)] += e;
    }
    jac
}

/// `⟨𝓛_u b_i, Z⟩` for node values of a test function `Z`.
fn linearized_against(rho: f64, disc: &Discretization, ev: &Evaluation, z: &[f64]) -> DVector<f64> {
    let w = &disc.rule.weights;
    let wz: Vec<f64> = z.iter().zip(w).map(|(a, b)| a * b).collect();
    let q: Vec<f64> = ev.eu.iter().map(|e| e / ev.integral).collect();
    let wzq: Vec<f64> = wz.iter().zip(&q).map(|(a, b)| a * b).collect();
    let wq: Vec<f64> = w.iter().zip(&q).map(|(a, b)| a * b).collect();
    let zq_total: f64 = disc.rule.sum_values(&z.iter().zip(&q).map(|(a, b)| a * b).collect::<Vec<_>>());
    let t1 = &disc.table * DVector::from_vec(wz);
    let t2 = &disc.table * DVector::from_vec(wzq);
    let t3 = &disc.table * DVector::from_vec(wq);
    let mut out = DVector::zeros(disc.n());
    for i in 0..disc.n() {
        out[i] = disc.eigen[i] * t1[i] + rho * (t2[i] - t3[i] * zq_total);
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Treat `λ` as an unknown fixed by the dilation condition.
    pub free_scale: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-8, max_iter: 30, free_scale: true }
    }
}

/// Converged (or last) Newton iterate.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonState {
    pub rho: f64,
    /// Scale parameter of the base field.
    pub lambda: f64,
    pub coeffs: Vec<f64>,
    /// Combined norm of the Galerkin residual and, with a free scale, the dilation projection.
    pub residual_norm: f64,
    /// `L²` norm of the Galerkin residual.
    pub galerkin_residual: f64,
    pub dilation_projection: f64,
    /// `√(2 e^{−u(ξ₁)})` from the peak value.
    pub lambda_est: f64,
    pub u_peak: f64,
    /// `max |φ|` over the quadrature nodes.
    pub phi_inf: f64,
    pub history: Vec<f64>,
    pub iterations: usize,
}

fn combined_norm(ev: &Evaluation, free_scale: bool) -> f64 {
    let g = if free_scale { ev.dilation_projection } else { 0.0 };
    (ev.galerkin.norm_squared() + g * g).sqrt()
}

/// Initial scale from the reduced relation for `ε = ρ − 32π`.
pub fn initial_lambda(rho: f64) -> Result<f64> {
    Ok(reduced_lambda(rho - 32.0 * PI, NEWTON_EPS0)?.lambda_star)
}

/// Damped Newton iteration on the Galerkin system starting from `(λ₀, c₀)`.
pub fn newton_solve<F: AnsatzFamily + ?Sized>(
    rho: f64,
    family: &F,
    disc: &Discretization,
    lambda0: f64,
    coeffs0: Option<&[f64]>,
    opts: NewtonOptions,
) -> Result<NewtonState> {
    if !(lambda0 > 0.0 && lambda0 < 0.5) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda0} must lie in (0, 0.5)")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {} must be positive", opts.tol)));
    }
    let n = disc.n();
    let mut c = match coeffs0 {
        Some(v) if v.len() == n => DVector::from_column_slice(v),
        Some(v) => {
            return Err(Error::InvalidParameter(format!("{} initial coefficients for {n} basis fields", v.len())))
        }
        None => DVector::zeros(n),
    };
    let mut lambda = lambda0;
    let mut ev = evaluate(rho, family, disc, lambda, &c)?;
    let mut norm = combined_norm(&ev, opts.free_scale);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm > opts.tol {
        if iterations >= opts.max_iter {
            return Err(Error::NewtonDiverged(format!(
                "no convergence in {} iterations (residual {norm:e})",
                opts.max_iter
            )));
        }
        let jc = galerkin_jacobian(rho, disc, &ev);
        let (a, rhs) = if opts.free_scale {
            let h = lambda * 1e-6;
            let ep = evaluate(rho, family, disc, lambda + h, &c)?;
            let em = evaluate(rho, family, disc, lambda - h, &c)?;
            let dr = (&ep.galerkin - &em.galerkin) / (2.0 * h);
            let dg = (ep.dilation_projection - em.dilation_projection) / (2.0 * h);
            let dgc = linearized_against(rho, disc, &ev, &ev.dilation);
            let mut a = DMatrix::zeros(n + 1, n + 1);
            a.view_mut((0, 0), (n, n)).copy_from(&jc);
            a.view_mut((0, n), (n, 1)).copy_from(&dr);
            a.view_mut((n, 0), (1, n)).copy_from(&dgc.transpose());
            a[(n, n)] = dg;
            let mut rhs = DVector::zeros(n + 1);
            rhs.rows_mut(0, n).copy_from(&(-&ev.galerkin));
            rhs[n] = -ev.dilation_projection;
            (a, rhs)
        } else {
            (jc, -&ev.galerkin)
        };
        let sv = a.clone().singular_values();
        let cond = sv.max() / sv.min();
        if !(cond <= MAX_CONDITION) {
            return Err(Error::JacobianSingular(cond));
        }
        let step = a.lu().solve(&rhs).ok_or(Error::JacobianSingular(f64::INFINITY))?;
        let mut alpha = 1.0;
        let mut halvings = 0;
        loop {
            let c_trial = &c + step.rows(0, n) * alpha;
            let l_trial = if opts.free_scale { lambda + alpha * step[n] } else { lambda };
            let trial =
                if l_trial > 0.0 && l_trial < 0.5 { evaluate(rho, family, disc, l_trial, &c_trial).ok() } else { None };
            if let Some(t) = trial {
                let tn = combined_norm(&t, opts.free_scale);
                if tn < norm {
                    c = c_trial;
                    lambda = l_trial;
                    ev = t;
                    norm = tn;
                    break;
                }
            }
            halvings += 1;
            if halvings >= MAX_HALVINGS {
                return Err(Error::NewtonDiverged(format!(
                    "residual did not decrease after {MAX_HALVINGS} step halvings (residual {norm:e})"
                )));
            }
            alpha *= 0.5;
        }
        history.push(norm);
        iterations += 1;
    }
    let centers = family.centers();
    let phi = disc.synthesize(&c);
    let u_peak = family.value(lambda, &centers[0]) + dot(&disc.basis.eval(&centers[0]), c.as_slice());
    Ok(NewtonState {
        rho,
        lambda,
        coeffs: c.iter().copied().collect(),
        residual_norm: norm,
        galerkin_residual: ev.galerkin.norm(),
        dilation_projection: ev.dilation_projection,
        lambda_est: (2.0 * (-u_peak).exp()).sqrt(),
        u_peak,
        phi_inf: phi.iter().fold(0.0, |m, v| m.max(v.abs())),
        history,
        iterations,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `u = w_λ + φ` at an arbitrary point.
pub fn solution_value<F: AnsatzFamily + ?Sized>(
    family: &F,
    disc: &Discretization,
    state: &NewtonState,
    y: &SpherePoint,
) -> f64 {
    family.value(state.lambda, y) + dot(&disc.basis.eval(y), &state.coeffs)
}

/// Projections `⟨S_ρ(u), χ_{R₁}φ_{i,j}⟩`, indexed `[i][j]` for `i ∈ {0,1,2}`.
pub fn kernel_projections<F: AnsatzFamily + ?Sized>(
    family: &F,
    disc: &Discretization,
    state: &NewtonState,
) -> Result<Vec<Vec<f64>>> {
    let c = DVector::from_column_slice(&state.coeffs);
    let ev = evaluate(state.rho, family, disc, state.lambda, &c)?;
    let m = family.centers().len();
    Ok((0..3)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let v: Vec<f64> = disc
                        .rule
                        .nodes
                        .par_iter()
                        .zip(&ev.residual)
                        .map(|(y, s)| s * family.kernel_test(state.lambda, i, j, y))
                        .collect();
                    disc.rule.sum_values(&v)
                })
                .collect()
        })
        .collect())
}

/// `L¹` norm of `N(φ) = ρ(e^{w+φ}/∫e^{w+φ} − e^w/∫e^w) − ρ(e^w φ/∫e^w − e^w ∫e^wφ/(∫e^w)²)`.
pub fn nonlinear_remainder_l1<F: AnsatzFamily + ?Sized>(family: &F, disc: &Discretization, state: &NewtonState) -> f64 {
    let base = family.sample(state.lambda, &disc.rule.nodes);
    let phi = disc.synthesize(&DVector::from_column_slice(&state.coeffs));
    let ew: Vec<f64> = base.value.iter().map(|v| v.exp()).collect();
    let ewp: Vec<f64> = base.value.iter().zip(&phi).map(|(v, p)| (v + p).exp()).collect();
    let iw = disc.rule.sum_values(&ew);
    let iwp = disc.rule.sum_values(&ewp);
    let iphi = disc.rule.sum_values(&ew.iter().zip(&phi).map(|(e, p)| e * p).collect::<Vec<_>>());
    let n: Vec<f64> = (0..phi.len())
        .map(|i| {
            let full = ewp[i] / iwp - ew[i] / iw;
            let lin = ew[i] * phi[i] / iw - ew[i] * iphi / (iw * iw);
            (state.rho * (full - lin)).abs()
        })
        .collect();
    disc.rule.sum_values(&n)
}

/// Ten fixed off-peak probes: the four face-center antipodes `−ξ_j` and the six axis points `±e_i`.
pub fn offpeak_probes(config: &Configuration) -> Vec<SpherePoint> {
    let mut p: Vec<SpherePoint> = config.points().iter().map(|x| x.antipode()).collect();
    for v in [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]] {
        p.push(SpherePoint::from(v));
    }
    p
}

/// One point of the solution branch.
#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub rho: f64,
    pub eps: f64,
    pub u_peak: f64,
    /// `u` at the face-center antipode `−ξ₁`.
    pub u_offpeak: f64,
    pub probes: Vec<f64>,
    pub lambda: f64,
    pub lambda_est: f64,
    /// `(ρ − 32π)/(λ_est² ln(1/λ_est))`.
    pub eps_ratio: f64,
    pub residual: f64,
    /// `ρ∫_{cap(ξ_j)} e^u/∫e^u` over caps of chart radius `R₀`.
    pub cap_masses: Vec<f64>,
    /// Share of `‖φ‖` carried by the top eight degrees.
    pub tail_fraction: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct BranchOptions {
    pub degree_cap: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Stop once the top-band share of `φ` exceeds this value.
    pub max_tail_fraction: f64,
}

impl Default for BranchOptions {
    fn default() -> Self {
        BranchOptions { degree_cap: 40, tol: 1e-8, max_iter: 30, max_tail_fraction: 0.02 }
    }
}

/// Outcome of a continuation run.
#[derive(Debug, Clone, Serialize)]
pub struct BranchResult {
    pub records: Vec<BranchRecord>,
    pub complete: bool,
    pub stop_reason: Option<String>,
    #[serde(skip)]
    pub error: Option<Error>,
}

/// Geometric schedule `ε_i = ε_start (ε_end/ε_start)^{i/(steps−1)}`.
pub fn eps_schedule(eps_start: f64, eps_end: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![eps_start];
    }
    (0..steps).map(|i| eps_start * (eps_end / eps_start).powf(i as f64 / (steps - 1) as f64)).collect()
}

/// Solves at `ρ = 32π + ε` for a tetrahedral discretization and collects the branch diagnostics.
pub fn solve_tetrahedral(
    eps: f64,
    lambda0: f64,
    coeffs0: Option<&[f64]>,
    degree_cap: usize,
    opts: NewtonOptions,
) -> Result<(NewtonState, TetrahedralFamily, Discretization)> {
    let template = AnsatzParams::tetrahedral(eps, lambda0)?;
    let disc = Discretization::tetrahedral(&template.config, lambda0, degree_cap)?;
    let family = TetrahedralFamily { template };
    let state = newton_solve(32.0 * PI + eps, &family, &disc, lambda0, coeffs0, opts)?;
    Ok((state, family, disc))
}

fn record(eps: f64, state: &NewtonState, family: &TetrahedralFamily, disc: &Discretization) -> Result<BranchRecord> {
    let cfg = &family.template.config;
    let probes: Vec<f64> = offpeak_probes(cfg).iter().map(|y| solution_value(family, disc, state, y)).collect();
    let c = DVector::from_column_slice(&state.coeffs);
    let ev = evaluate(state.rho, family, disc, state.lambda, &c)?;
    let cap_masses =
        cfg.points().iter().map(|p| cap_mass(state.rho, &ev.u, &disc.rule, p, family.template.r0)).collect();
    let top = disc.basis.degree_cap.saturating_sub(8);
    let tail: f64 = state.coeffs.iter().zip(&disc.basis.ell).filter(|(_, l)| **l > top).map(|(v, _)| v * v).sum();
    let total: f64 = state.coeffs.iter().map(|v| v * v).sum();
    let le = state.lambda_est;
    Ok(BranchRecord {
        rho: state.rho,
        eps,
        u_peak: state.u_peak,
        u_offpeak: probes[0],
        probes,
        lambda: state.lambda,
        lambda_est: le,
        eps_ratio: eps / (le * le * (1.0 / le).ln()),
        residual: state.residual_norm,
        cap_masses,
        tail_fraction: if total > 0.0 { (tail / total).sqrt() } else { 0.0 },
        iterations: state.iterations,
    })
}

/// Follows the tetrahedral branch from `rho_start` down to `rho_end`,
/// warm-starting each solve from the previous one. `on_record` is called as
/// soon as each point is available.
pub fn continue_branch<C: FnMut(&BranchRecord)>(
    rho_start: f64,
    rho_end: f64,
    steps: usize,
    opts: &BranchOptions,
    mut on_record: C,
) -> Result<BranchResult> {
    let floor = 32.0 * PI;
    if !(rho_start > rho_end && rho_end > floor) {
        return Err(Error::InvalidParameter(format!("need rho_start > rho_end > 32π (got {rho_start}, {rho_end})")));
    }
    if steps < 1 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    let newton = NewtonOptions { tol: opts.tol, max_iter: opts.max_iter, free_scale: true };
    let mut records = Vec::new();
    let mut prev: Option<(f64, f64, Vec<f64>)> = None;
    for eps in eps_schedule(rho_start - floor, rho_end - floor, steps) {
        let lambda0 = match &prev {
            // shift the previous scale by the ratio predicted by the reduced relation
            Some((pe, pl, _)) => pl * initial_lambda(floor + eps)? / initial_lambda(floor + pe)?,
            None => initial_lambda(floor + eps)?,
        };
        let warm = prev.as_ref().map(|(_, _, c)| c.as_slice());
        let solved = solve_tetrahedral(eps, lambda0, warm, opts.degree_cap, newton)
            .and_then(|(s, f, d)| record(eps, &s, &f, &d).map(|r| (s, r)));
        match solved {
            Ok((state, rec)) => {
                on_record(&rec);
                let tail = rec.tail_fraction;
                records.push(rec);
                prev = Some((eps, state.lambda, state.coeffs));
                if tail > opts.max_tail_fraction {
                    return Ok(BranchResult {
                        records,
                        complete: false,
                        stop_reason: Some(format!("resolution limit: top-band share {tail:.3} of the correction")),
                        error: None,
                    });
                }
            }
            Err(e) => {
                return Ok(BranchResult { records, complete: false, stop_reason: Some(e.to_string()), error: Some(e) })
            }
        }
    }
    Ok(BranchResult { records, complete: true, stop_reason: None, error: None })
}
