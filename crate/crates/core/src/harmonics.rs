//! Real orthonormal spherical harmonics and symmetry-adapted combinations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::quadrature::gauss_legendre;
use crate::symmetry::SymmetryGroup;

/// Position of `Y_{ℓm}` in the flat array returned by [`real_harmonics`].
pub fn harmonic_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// All real harmonics `Y_{ℓm}`, `0 ≤ ℓ ≤ lmax`, at `y`, orthonormal in `L²(S²)`.
/// Entry `ℓ² + ℓ + m` holds `Y_{ℓm}`: `m > 0` uses `cos(mφ)`, `m < 0` uses `sin(|m|φ)`.
pub fn real_harmonics(lmax: usize, y: &SpherePoint) -> Vec<f64> {
    let v = y.v();
    let x = v.z.clamp(-1.0, 1.0);
    let s = (v.x * v.x + v.y * v.y).sqrt();
    let (cphi, sphi) = if s > 0.0 { (v.x / s, v.y / s) } else { (1.0, 0.0) };
    let n = (lmax + 1) * (lmax + 1);
    let mut out = vec![0.0; n];
    // cos(mφ), sin(mφ) by recurrence
    let mut cm = vec![1.0; lmax + 1];
    let mut sm = vec![0.0; lmax + 1];
    for m in 1..=lmax {
        cm[m] = cm[m - 1] * cphi - sm[m - 1] * sphi;
        sm[m] = sm[m - 1] * cphi + cm[m - 1] * sphi;
    }
    let mut qmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            qmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
        }
        let fac = if m == 0 { 1.0 } else { 2f64.sqrt() };
        let mut put = |l: usize, q: f64| {
            let base = l * l + l;
            out[base + m] = fac * q * cm[m];
            if m > 0 {
                out[base - m] = fac * q * sm[m];
            }
        };
        put(m, qmm);
        if m == lmax {
            break;
        }
        let mut q_prev = qmm;
        let mut q = ((2 * m + 3) as f64).sqrt() * x * qmm;
        put(m + 1, q);
        for l in m + 2..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            let next = a * (x * q - b * q_prev);
            q_prev = q;
            q = next;
            put(l, q);
        }
    }
    out
}

/// Orthonormal invariant combinations `b = Σ_m c_m Y_{ℓm}`, grouped by degree.
#[derive(Debug, Clone)]
pub struct SymmetricBasis {
    pub degree_cap: usize,
    /// Degree of each basis field.
    pub ell: Vec<usize>,
    /// Coefficients of each field in the degree-`ℓ` block of [`real_harmonics`].
    pub coeffs: Vec<Vec<f64>>,
}

impl SymmetricBasis {
    pub fn count(&self) -> usize {
        self.ell.len()
    }

    /// Eigenvalues `−ℓ(ℓ+1)` of the Laplacian on each field.
    pub fn laplace_eigenvalues(&self) -> Vec<f64> {
        self.ell.iter().map(|&l| -((l * (l + 1)) as f64)).collect()
    }

    /// Value of every basis field at `y`.
    pub fn eval(&self, y: &SpherePoint) -> Vec<f64> {
        let yl = real_harmonics(self.degree_cap, y);
        self.ell
            .iter()
            .zip(&self.coeffs)
            .map(|(&l, c)| {
                let base = l * l;
                c.iter().enumerate().map(|(i, ci)| ci * yl[base + i]).sum()
            })
            .collect()
    }

    /// Matrix with one column of basis values per node.
    pub fn eval_nodes(&self, nodes: &[SpherePoint]) -> DMatrix<f64> {
        let cols: Vec<Vec<f64>> = nodes.par_iter().map(|y| self.eval(y)).collect();
        let n = self.count();
        DMatrix::from_fn(n, nodes.len(), |i, j| cols[j][i])
    }
}

/// Orthonormal basis of the functions of degree `1..=L` invariant under `group`.
pub fn build_symmetric_basis(degree_cap: usize, group: &SymmetryGroup) -> Result<SymmetricBasis> {
    build_invariant_basis(degree_cap, group, 1)
}

/// As [`build_symmetric_basis`] starting at degree `lmin`.
pub fn build_invariant_basis(degree_cap: usize, group: &SymmetryGroup, lmin: usize) -> Result<SymmetricBasis> {
    if degree_cap < 1 {
        return Err(Error::InvalidParameter("degree cap must be positive".into()));
    }
    let lmax = degree_cap;
    // product rule exact for degree ≤ 2·lmax
    let (x, w) = gauss_legendre(lmax + 1);
    let na = 2 * lmax + 2;
    let mut nodes = Vec::with_capacity(x.len() * na);
    for (ct, wt) in x.iter().zip(&w) {
        let st = (1.0 - ct * ct).sqrt();
        for j in 0..na {
            let ph = 2.0 * PI * j as f64 / na as f64;
            nodes.push((SpherePoint::from_xyz(st * ph.cos(), st * ph.sin(), *ct), wt * 2.0 * PI / na as f64));
        }
    }
    let g = group.elements.len() as f64;
    // Reynolds average of every harmonic at every node
    let samples: Vec<(Vec<f64>, Vec<f64>, f64)> = nodes
        .par_iter()
        .map(|(y, wt)| {
            let plain = real_harmonics(lmax, y);
            let mut avg = vec![0.0; plain.len()];
            for t in &group.elements {
                let ty = SpherePoint::new(t * y.v());
                for (a, v) in avg.iter_mut().zip(real_harmonics(lmax, &ty)) {
                    *a += v / g;
                }
            }
            (plain, avg, *wt)
        })
        .collect();
    let mut ell = Vec::new();
    let mut coeffs = Vec::new();
    for l in lmin..=lmax {
        let dim = 2 * l + 1;
        let base = l * l;
        let mut p = DMatrix::<f64>::zeros(dim, dim);
        for (plain, avg, wt) in &samples {
            for i in 0..dim {
                let ai = avg[base + i] * wt;
                for j in 0..dim {
                    p[(i, j)] += ai * plain[base + j];
                }
            }
        }
        let p = (&p + p.transpose()) * 0.5;
        let eig = SymmetricEigen::new(p);
        let mut keep: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > 1e-8).collect();
        keep.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        for i in keep {
            let mut c: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let big = c.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            if big < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
            ell.push(l);
            coeffs.push(c);
        }
    }
    Ok(SymmetricBasis { degree_cap, ell, coeffs })
}

/// Zonal harmonics `Y_{ℓ0}`, `1 ≤ ℓ ≤ L`, about the z-axis.
pub fn zonal_basis(degree_cap: usize) -> SymmetricBasis {
    let ell: Vec<usize> = (1..=degree_cap).collect();
    let coeffs = ell
        .iter()
        .map(|&l| {
            let mut c = vec![0.0; 2 * l + 1];
            c[l] = 1.0;
            c
        })
        .collect();
    SymmetricBasis { degree_cap, ell, coeffs }
}
