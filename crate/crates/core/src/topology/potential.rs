//! Vector potential `C` with `curl C = B`, in Coulomb gauge.
//!
//! Both solvers work on the periodic embedding of the box and use the same
//! difference curl that produced `B` (see [`HField::order`]), so `curl C` reproduces the
//! solenoidal part of `B` to solver precision. The non-solenoidal remainder of
//! the lattice `B` (zero in the continuum, `O(h²)` on the lattice) is reported
//! separately and gates the solve.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HField;
use crate::error::{Error, Result};
use crate::lattice::spectral::{difference_symbol, Fft3};
use crate::lattice::{reduce, stencil, BoundaryPolicy, DiffOrder, Grid, VectorField3};
use crate::vec3::{self, Vec3};

/// Largest tolerated non-solenoidal fraction `|B - P B| / |B|`.
pub const DEFAULT_CLOSEDNESS_TOL: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PotentialMethod {
    Spectral,
    ConjugateGradient { tol: f64, max_iter: usize },
}

impl PotentialMethod {
    pub fn conjugate_gradient() -> Self {
        PotentialMethod::ConjugateGradient { tol: 1e-10, max_iter: 20_000 }
    }
}

#[derive(Clone, Debug)]
pub struct PotentialSolution {
    /// The potential on the original grid (same node layout).
    pub c: VectorField3,
    /// `|B - P B| / |B|`: share of `B` that no potential can represent.
    pub closedness: f64,
    /// `|curl C - P B| / |P B|`.
    pub curl_residual: f64,
    /// `|div C| / |B|`.
    pub gauge_residual: f64,
    pub iterations: usize,
}

/// Spectral solve with the default closedness gate.
pub fn solve_potential(h: &HField) -> Result<VectorField3> {
    Ok(solve_potential_with(h, PotentialMethod::Spectral, DEFAULT_CLOSEDNESS_TOL)?.c)
}

pub fn solve_potential_with(h: &HField, method: PotentialMethod, closedness_tol: f64) -> Result<PotentialSolution> {
    let grid = h.grid;
    let periodic = grid.with_boundary(BoundaryPolicy::Periodic);
    if h.is_zero() {
        return Ok(PotentialSolution {
            c: VectorField3::zeros(grid),
            closedness: 0.0,
            curl_residual: 0.0,
            gauge_residual: 0.0,
            iterations: 0,
        });
    }
    let order = h.order;
    let projector = Projector::new(&periodic, order);
    let closed = projector.solenoidal_part(&h.b.data);
    let b_norm = l2(&h.b.data);
    let closed_norm = l2(&closed);
    let remainder: Vec<Vec3> = h.b.data.iter().zip(&closed).map(|(b, p)| vec3::sub(*b, *p)).collect();
    let closedness = l2(&remainder) / b_norm;
    if !(closedness <= closedness_tol) {
        return Err(Error::NotClosed { residual: closedness, tolerance: closedness_tol });
    }

    let (c, iterations) = match method {
        PotentialMethod::Spectral => (projector.inverse_curl(&h.b.data), 0),
        PotentialMethod::ConjugateGradient { tol, max_iter } => conjugate_gradient(&periodic, order, &h.b.data, tol, max_iter)?,
    };

    let curl_c = stencil::curl_with(&periodic, &c, order);
    let mismatch: Vec<Vec3> = curl_c.iter().zip(&closed).map(|(a, b)| vec3::sub(*a, *b)).collect();
    let div_c = stencil::divergence_with(&periodic, &c, order);
    let div_norm = div_c.iter().map(|d| d * d).sum::<f64>().sqrt();
    Ok(PotentialSolution {
        c: VectorField3 { grid, data: c },
        closedness,
        curl_residual: l2(&mismatch) / closed_norm,
        gauge_residual: div_norm / b_norm,
        iterations,
    })
}

fn l2(v: &[Vec3]) -> f64 {
    let plane = 4096.min(v.len().max(1));
    let parts: Vec<f64> = v.chunks(plane).map(|c| c.iter().map(|x| vec3::norm2(*x)).sum()).collect();
    reduce::pairwise_sum(&parts).sqrt()
}

/// Fourier-space helper for the periodic central-difference operators.
struct Projector {
    dims: [usize; 3],
    fft: Fft3,
    symbols: [Vec<f64>; 3],
}

impl Projector {
    fn new(grid: &Grid, order: DiffOrder) -> Self {
        let dims = grid.dims();
        Projector { dims, fft: Fft3::new(dims), symbols: std::array::from_fn(|a| difference_symbol(dims[a], grid.h, order)) }
    }

    fn transform(&self, v: &[Vec3]) -> [Vec<Complex64>; 3] {
        let mut out: [Vec<Complex64>; 3] =
            std::array::from_fn(|c| v.iter().map(|x| Complex64::new(x[c], 0.0)).collect());
        out.par_iter_mut().for_each(|comp| self.fft.forward(comp));
        out
    }

    fn back(&self, mut comps: [Vec<Complex64>; 3]) -> Vec<Vec3> {
        comps.par_iter_mut().for_each(|comp| self.fft.inverse(comp));
        (0..comps[0].len()).map(|i| [comps[0][i].re, comps[1][i].re, comps[2][i].re]).collect()
    }

    fn symbol(&self, idx: usize) -> Vec3 {
        let [nx, ny, _] = self.dims;
        let (i, j, k) = (idx % nx, (idx / nx) % ny, idx / (nx * ny));
        [self.symbols[0][i], self.symbols[1][j], self.symbols[2][k]]
    }

    /// Part of `v` that is a discrete curl: longitudinal modes and modes
    /// annihilated by every difference operator are removed.
    fn solenoidal_part(&self, v: &[Vec3]) -> Vec<Vec3> {
        let mut hat = self.transform(v);
        for idx in 0..hat[0].len() {
            let k = self.symbol(idx);
            let k2 = vec3::norm2(k);
            if k2 < 1e-24 {
                for c in hat.iter_mut() {
                    c[idx] = Complex64::default();
                }
                continue;
            }
            let dot: Complex64 = (0..3).map(|c| hat[c][idx] * k[c]).sum();
            for c in 0..3 {
                hat[c][idx] -= dot * (k[c] / k2);
            }
        }
        self.back(hat)
    }

    /// `C = i k × B / |k|²` with `k` the difference symbol.
    fn inverse_curl(&self, v: &[Vec3]) -> Vec<Vec3> {
        let hat = self.transform(v);
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::default(); hat[0].len()]);
        let i = Complex64::new(0.0, 1.0);
        for idx in 0..hat[0].len() {
            let k = self.symbol(idx);
            let k2 = vec3::norm2(k);
            if k2 < 1e-24 {
                continue;
            }
            let b = [hat[0][idx], hat[1][idx], hat[2][idx]];
            let cross = [
                b[2] * k[1] - b[1] * k[2],
                b[0] * k[2] - b[2] * k[0],
                b[1] * k[0] - b[0] * k[1],
            ];
            for c in 0..3 {
                out[c][idx] = i * cross[c] / k2;
            }
        }
        self.back(out)
    }
}

/// `Σ_a D_aᵀ D_a x` on the periodic grid, the discrete `-Δ` matching the curl.
fn apply_laplacian(grid: &Grid, order: DiffOrder, x: &[Vec3]) -> Vec<Vec3> {
    let mut out = vec![[0.0; 3]; x.len()];
    for axis in 0..3 {
        let d = stencil::central_diff_with(grid, x, axis, order);
        let dt = stencil::central_diff_transpose_with(grid, &d, axis, order);
        for (o, v) in out.iter_mut().zip(&dt) {
            *o = vec3::add(*o, *v);
        }
    }
    out
}

fn inner(a: &[Vec3], b: &[Vec3]) -> f64 {
    let parts: Vec<f64> = a.chunks(4096).zip(b.chunks(4096)).map(|(x, y)| x.iter().zip(y).map(|(p, q)| vec3::dot(*p, *q)).sum()).collect();
    reduce::pairwise_sum(&parts)
}

/// Solves `(-Δ) C = curl B` by conjugate gradients starting from zero. The
/// iterates stay orthogonal to the operator's null space, which yields the
/// divergence-free, zero-mean solution.
fn conjugate_gradient(grid: &Grid, order: DiffOrder, b: &[Vec3], tol: f64, max_iter: usize) -> Result<(Vec<Vec3>, usize)> {
    let rhs = stencil::curl_with(grid, b, order);
    let rhs_norm = inner(&rhs, &rhs).sqrt();
    let mut x = vec![[0.0; 3]; b.len()];
    if rhs_norm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = inner(&r, &r);
    for iter in 1..=max_iter {
        let ap = apply_laplacian(grid, order, &p);
        let pap = inner(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::SolverDiverged { iterations: iter, residual: rr.sqrt() / rhs_norm });
        }
        let alpha = rr / pap;
        for ((xi, ri), (pi, api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
            *xi = vec3::add(*xi, vec3::scale(*pi, alpha));
            *ri = vec3::sub(*ri, vec3::scale(*api, alpha));
        }
        let rr_new = inner(&r, &r);
        let rel = rr_new.sqrt() / rhs_norm;
        if !rel.is_finite() {
            return Err(Error::SolverDiverged { iterations: iter, residual: rel });
        }
        if rel <= tol {
            return Ok((x, iter));
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = vec3::add(*ri, vec3::scale(*pi, beta));
        }
        rr = rr_new;
    }
    Err(Error::SolverDiverged { iterations: max_iter, residual: rr.sqrt() / rhs_norm })
}
