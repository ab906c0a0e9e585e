//! Riemannian gradient descent for the configuration energy `F` on `(S²)^m`,
//! and classification of the resulting point sets.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{chordal_distance, SpherePoint};
use crate::symmetry::{
    config_energy, config_gradient, gradient_norm, optimal_twisted_height, reference_config, retract, ConfigKind,
    Configuration,
};

/// Iteration cap per start.
pub const MAX_ITER: usize = 10_000;
/// First trial step of every line search.
pub const INITIAL_STEP: f64 = 0.1;
/// Step shrink factor on a rejected trial.
pub const BACKTRACK: f64 = 0.5;
const ARMIJO: f64 = 1e-4;

/// Result of one descent run.
#[derive(Debug, Clone, Serialize)]
pub struct StartResult {
    pub config: Configuration,
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub best: Configuration,
    pub energy: f64,
    pub gradient_norm: f64,
    pub starts: usize,
    /// Iterations used by each start, in seed order.
    pub iterations: Vec<usize>,
    /// False when no start reached the requested tolerance.
    pub converged: bool,
    #[serde(skip)]
    pub runs: Vec<StartResult>,
}

impl OptimizeReport {
    /// Turns an unconverged report into [`Error::NonConvergence`].
    pub fn require_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NonConvergence(self.gradient_norm))
        }
    }
}

/// Uniformly distributed random point.
pub fn random_point<R: Rng>(rng: &mut R) -> SpherePoint {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    SpherePoint::from_xyz(s * phi.cos(), s * phi.sin(), z)
}

fn random_config<R: Rng>(m: usize, rng: &mut R) -> Configuration {
    loop {
        if let Ok(c) = Configuration::new((0..m).map(|_| random_point(rng)).collect()) {
            return c;
        }
    }
}

/// Gradient descent from `start` with backtracking line search and
/// normalization retraction.
pub fn descend(start: Configuration, tol: f64) -> StartResult {
    let mut c = start;
    let mut f = config_energy(&c);
    let mut iterations = 0;
    loop {
        let g = config_gradient(&c);
        let gn = gradient_norm(&g);
        if gn <= tol || iterations >= MAX_ITER {
            return StartResult { config: c, energy: f, gradient_norm: gn, iterations, converged: gn <= tol };
        }
        let mut t = INITIAL_STEP;
        let mut accepted = None;
        let noise = 64.0 * f64::EPSILON * f.abs().max(1.0);
        while t * gn > 1e-18 {
            let step: Vec<Vector3<f64>> = g.iter().map(|v| -v * t).collect();
            if let Ok(trial) = Configuration::new(retract(&c, &step)) {
                let ft = config_energy(&trial);
                if ft <= f - ARMIJO * t * gn * gn {
                    accepted = Some((trial, ft));
                    break;
                }
                // energy differences below rounding: fall back to gradient decrease
                if (ft - f).abs() <= noise && gradient_norm(&config_gradient(&trial)) < gn {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            t *= BACKTRACK;
        }
        match accepted {
            Some((trial, ft)) => {
                c = trial;
                f = ft;
            }
            // The line search stalled at rounding level; no further progress is possible.
            None => return StartResult { config: c, energy: f, gradient_norm: gn, iterations, converged: gn <= tol },
        }
        iterations += 1;
    }
}

/// Best of `starts` seeded descents for `m` points.
pub fn minimize_config(m: usize, starts: usize, tol: f64, seed: u64) -> Result<OptimizeReport> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("m = {m} must be at least 2")));
    }
    if starts < 1 {
        return Err(Error::InvalidParameter("starts must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inits: Vec<Configuration> = (0..starts).map(|_| random_config(m, &mut rng)).collect();
    let runs: Vec<StartResult> = inits.into_par_iter().map(|c| descend(c, tol)).collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            // converged runs win; then lower energy; then earlier seed
            (!a.converged, a.energy, *i).partial_cmp(&(!b.converged, b.energy, *j)).unwrap()
        })
        .map(|(_, r)| r.clone())
        .expect("at least one start");
    Ok(OptimizeReport {
        energy: best.energy,
        gradient_norm: best.gradient_norm,
        converged: runs.iter().any(|r| r.converged),
        best: best.config,
        starts,
        iterations: runs.iter().map(|r| r.iterations).collect(),
        runs,
    })
}

/// Max-abs difference of sorted pairwise-distance multisets, or `None` if `m` differs.
pub fn distance_multiset_gap(a: &Configuration, b: &Configuration) -> Option<f64> {
    if a.m() != b.m() {
        return None;
    }
    Some(a.sorted_distances().iter().zip(b.sorted_distances()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Orthogonal matrix `Q` (rotation or reflection) with `Q·a` equal to `b`
/// as point sets, found by matching point triples.
pub fn align_orthogonal(a: &Configuration, b: &Configuration, tol: f64) -> Option<Matrix3<f64>> {
    if a.m() != b.m() || a.m() < 3 {
        return None;
    }
    let pa = a.points();
    let pb = b.points();
    let m = pa.len();
    // a linearly independent triple of `a`
    let mut triple = None;
    'outer: for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let det = Matrix3::from_columns(&[*pa[i].v(), *pa[j].v(), *pa[k].v()]).determinant();
                if det.abs() > 0.1 {
                    triple = Some((i, j, k));
                    break 'outer;
                }
            }
        }
    }
    let (i, j, k) = triple?;
    let ca = Matrix3::from_columns(&[*pa[i].v(), *pa[j].v(), *pa[k].v()]);
    let ca_inv = ca.try_inverse()?;
    let dij = chordal_distance(&pa[i], &pa[j]);
    let dik = chordal_distance(&pa[i], &pa[k]);
    let djk = chordal_distance(&pa[j], &pa[k]);
    for (u, pu) in pb.iter().enumerate() {
        for (v, pv) in pb.iter().enumerate() {
            if v == u || (chordal_distance(pu, pv) - dij).abs() > tol {
                continue;
            }
            for (w, pw) in pb.iter().enumerate() {
                if w == u || w == v {
                    continue;
                }
                if (chordal_distance(pu, pw) - dik).abs() > tol || (chordal_distance(pv, pw) - djk).abs() > tol {
                    continue;
                }
                let q = Matrix3::from_columns(&[*pu.v(), *pv.v(), *pw.v()]) * ca_inv;
                if (q.transpose() * q - Matrix3::identity()).abs().max() > 10.0 * tol.max(1e-12) {
                    continue;
                }
                let all_match = pa.iter().all(|p| {
                    let qp = q * p.v();
                    pb.iter().any(|r| (qp - r.v()).norm() <= 10.0 * tol.max(1e-12))
                });
                if all_match {
                    return Some(q);
                }
            }
        }
    }
    None
}

/// Twist angle `θ ∈ [0, π/4]` and ring height `h` when `c` consists of two
/// parallel coplanar squares of four points each.
pub fn twisted_cuboid_params(c: &Configuration, tol: f64) -> Option<(f64, f64)> {
    if c.m() != 8 {
        return None;
    }
    let p: Vec<Vector3<f64>> = c.points().iter().map(|q| *q.v()).collect();
    let plane_normal = |idx: &[usize]| -> Option<Vector3<f64>> {
        let n = (p[idx[1]] - p[idx[0]]).cross(&(p[idx[2]] - p[idx[0]]));
        if n.norm() < 1e-8 {
            return None;
        }
        let n = n.normalize();
        let h0 = p[idx[0]].dot(&n);
        idx.iter().all(|&i| (p[i].dot(&n) - h0).abs() <= tol).then_some(n)
    };
    for a in 1..8 {
        for b in a + 1..8 {
            for d in b + 1..8 {
                let ring: Vec<usize> = vec![0, a, b, d];
                let other: Vec<usize> = (0..8).filter(|i| !ring.contains(i)).collect();
                let (Some(n1), Some(n2)) = (plane_normal(&ring), plane_normal(&other)) else { continue };
                if n1.cross(&n2).norm() > tol {
                    continue;
                }
                let n = if p[0].dot(&n1) >= 0.0 { n1 } else { -n1 };
                let e1 = {
                    let t = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
                    (t - n * t.dot(&n)).normalize()
                };
                let e2 = n.cross(&e1);
                let azimuths = |idx: &[usize]| -> Option<(f64, f64)> {
                    let h = idx.iter().map(|&i| p[i].dot(&n)).sum::<f64>() / 4.0;
                    let mut ang: Vec<f64> = idx.iter().map(|&i| p[i].dot(&e2).atan2(p[i].dot(&e1))).collect();
                    ang.sort_by(f64::total_cmp);
                    // square: consecutive azimuth gaps all π/2
                    for k in 0..4 {
                        let gap = (ang[(k + 1) % 4] - ang[k]).rem_euclid(2.0 * PI);
                        if (gap - PI / 2.0).abs() > tol {
                            return None;
                        }
                    }
                    Some((h, ang[0].rem_euclid(PI / 2.0)))
                };
                let (Some((h1, a1)), Some((h2, a2))) = (azimuths(&ring), azimuths(&other)) else { continue };
                if (h1 + h2).abs() > tol {
                    continue;
                }
                let s = (a1 - a2).rem_euclid(PI / 2.0);
                let theta = s.min(PI / 2.0 - s);
                return Some((theta, h1.abs()));
            }
        }
    }
    None
}

fn catalogue(m: usize) -> Vec<(String, Configuration)> {
    let mut out = Vec::new();
    let kinds: &[ConfigKind] = match m {
        3 => &[ConfigKind::Triangle3],
        4 => &[ConfigKind::Tetrahedron4],
        6 => &[ConfigKind::Octahedron6],
        8 => &[ConfigKind::Cube8],
        12 => &[ConfigKind::Icosahedron12],
        20 => &[ConfigKind::Dodecahedron20],
        _ => &[],
    };
    for k in kinds {
        out.push((k.label().to_string(), reference_config(*k).expect("catalogue entry")));
    }
    if m == 8 {
        if let Ok(h) = optimal_twisted_height(PI / 4.0) {
            if let Ok(c) = reference_config(ConfigKind::TwistedCuboid8 { theta: PI / 4.0, h }) {
                out.push(("twisted_cuboid8".to_string(), c));
            }
        }
    }
    out
}

/// Label of the catalogue entry matching `c` up to an orthogonal map, or `"unclassified"`.
pub fn classify_configuration(c: &Configuration, tol: f64) -> String {
    for (label, reference) in catalogue(c.m()) {
        let close = distance_multiset_gap(c, &reference).is_some_and(|g| g <= tol);
        if close && align_orthogonal(c, &reference, tol).is_some() {
            return label;
        }
    }
    "unclassified".to_string()
}
