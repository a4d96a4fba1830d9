//! Gauge-invariant variables for two-component Ginzburg–Landau fields.
//!
//! A pair `(ψ1, ψ2)` with vector potential `A` is rewritten as a density
//! `ρ = sqrt(|ψ1|² + |ψ2|²)`, a unit director `n = χ† σ χ` with `χ = ψ/ρ`, and
//! the gauge-invariant vector `C = A + J/(2ρ²)`, where
//! `J_k = -i Σ (ψ̄ ∂_k ψ - ∂_k ψ̄ ψ)`.
//!
//! With `w_k = Im Σ χ̄ ∂_k χ` one has `Σ |∂χ|² = ¼ (∂n)² + w²` and
//! `∂_i w_k - ∂_k w_i = ½ H_ik`, so that pointwise
//!
//! ```text
//! Σ|∂ψ + iAψ|² + ½ F² = (∂ρ)² + ρ² (¼ (∂n)² + C²) + ½ (∂_k C_i - ∂_i C_k + ½ H_ik)²
//! ```
//!
//! with both squares summed over ordered index pairs. At `ρ = const, C = 0`
//! the right side is the Faddeev density with `a = ρ²/4` and `b = 1/8`.
//!
//! On the lattice the identity holds up to truncation error of the
//! difference operator. Everything here defaults to the fourth-order stencil
//! of the topological diagnostics; the `_with` variants accept
//! [`DiffOrder::Second`] to match [`crate::energy`] node for node.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::lattice::io::RawField;
use crate::lattice::{reduce, stencil, ComplexField, DiffOrder, DirectorField, Grid, ScalarField, VectorField3, NORTH_POLE};
use crate::topology::compute_h_with;
use crate::vec3::{self, Vec3};

/// Smallest density accepted by [`reparameterize`].
pub const RHO_MIN: f64 = 1e-6;

/// Coefficient of `ρ² (∂n)²` in the reparameterized density.
pub const GRADIENT_COEFF: f64 = 0.25;

/// Coefficient of `H_ik` inside the field-strength square.
pub const H_COEFF: f64 = 0.5;

/// Faddeev couplings `(a, b)` reproduced at constant `ρ` and `C = 0`. The
/// quartic coupling is `½ H_COEFF²` because the square carries a factor ½
/// and both index orders, matching the convention of [`crate::energy`].
pub fn calibrated_couplings(rho: f64) -> (f64, f64) {
    (GRADIENT_COEFF * rho * rho, 0.5 * H_COEFF * H_COEFF)
}

#[derive(Clone, Debug)]
pub struct GLFields {
    pub grid: Grid,
    pub psi1: ComplexField,
    pub psi2: ComplexField,
    pub a: VectorField3,
}

impl GLFields {
    pub fn new(psi1: ComplexField, psi2: ComplexField, a: VectorField3) -> Result<Self> {
        if !psi1.grid.same_shape(&psi2.grid) || !psi1.grid.same_shape(&a.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(GLFields { grid: psi1.grid, psi1, psi2, a })
    }

    /// `ψ1 = 1, ψ2 = 0, A = 0`.
    pub fn vacuum(grid: Grid) -> Self {
        GLFields {
            grid,
            psi1: ComplexField { grid, data: vec![Complex64::new(1.0, 0.0); grid.len()] },
            psi2: ComplexField { grid, data: vec![Complex64::default(); grid.len()] },
            a: VectorField3::zeros(grid),
        }
    }

    /// `ψ = ρ χ` with `χ` the spinor of an ansatz, so that `n` is the ansatz
    /// director field.
    pub fn from_ansatz(grid: Grid, spec: &AnsatzSpec, rho: f64, a: VectorField3) -> Result<Self> {
        spec.validate()?;
        let psi1 = ComplexField::from_fn(grid, |p| rho * spec.spinor(p).0);
        let psi2 = ComplexField::from_fn(grid, |p| rho * spec.spinor(p).1);
        GLFields::new(psi1, psi2, a)
    }

    /// Constant density `ρ` and a gauge potential chosen so that the lattice
    /// `C` (under `order`) vanishes at every node. `n` must avoid the south pole.
    pub fn from_director(n: &DirectorField, rho: f64, order: DiffOrder) -> Result<Self> {
        let grid = n.grid;
        let mut psi1 = Vec::with_capacity(grid.len());
        let mut psi2 = Vec::with_capacity(grid.len());
        for (idx, v) in n.data.iter().enumerate() {
            let s = (2.0 * (1.0 + v[2])).sqrt();
            if !(s > 1e-6) {
                return Err(Error::InvalidParameter(format!("director at node {idx} is at the south pole")));
            }
            psi1.push(Complex64::new(rho * s / 2.0, 0.0));
            psi2.push(Complex64::new(v[0], v[1]) * (rho / s));
        }
        let mut f = GLFields::new(
            ComplexField { grid, data: psi1 },
            ComplexField { grid, data: psi2 },
            VectorField3::zeros(grid),
        )?;
        let r = reparameterize_with(&f, RHO_MIN, order)?;
        f.a.data = r.c.data.iter().map(|c| vec3::scale(*c, -1.0)).collect();
        Ok(f)
    }

    /// Seven interleaved components: `Re ψ1, Im ψ1, Re ψ2, Im ψ2, A_x, A_y, A_z`.
    pub fn to_raw(&self) -> RawField {
        let mut data = Vec::with_capacity(7 * self.grid.len());
        for i in 0..self.grid.len() {
            let (p, q, a) = (self.psi1.data[i], self.psi2.data[i], self.a.data[i]);
            data.extend_from_slice(&[p.re, p.im, q.re, q.im, a[0], a[1], a[2]]);
        }
        RawField { grid: self.grid, components: 7, data }
    }

    pub fn from_raw(raw: RawField) -> Result<Self> {
        if raw.components != 7 {
            return Err(Error::Format(format!("GL fields need 7 components, found {}", raw.components)));
        }
        let grid = raw.grid;
        let node = |i: usize| &raw.data[7 * i..7 * i + 7];
        let psi1 = (0..grid.len()).map(|i| Complex64::new(node(i)[0], node(i)[1])).collect();
        let psi2 = (0..grid.len()).map(|i| Complex64::new(node(i)[2], node(i)[3])).collect();
        let a = (0..grid.len()).map(|i| [node(i)[4], node(i)[5], node(i)[6]]).collect();
        GLFields::new(ComplexField { grid, data: psi1 }, ComplexField { grid, data: psi2 }, VectorField3 { grid, data: a })
    }
}

#[derive(Clone, Debug)]
pub struct ReparamFields {
    pub rho: ScalarField,
    pub n: DirectorField,
    pub c: VectorField3,
    pub j: VectorField3,
}

const PAULI: [[[Complex64; 2]; 2]; 3] = {
    const O: Complex64 = Complex64::new(0.0, 0.0);
    const R: Complex64 = Complex64::new(1.0, 0.0);
    const I: Complex64 = Complex64::new(0.0, 1.0);
    [[[O, R], [R, O]], [[O, Complex64::new(0.0, -1.0)], [I, O]], [[R, O], [O, Complex64::new(-1.0, 0.0)]]]
};

/// `n_a = χ† σ_a χ`.
pub fn pauli_director(chi: [Complex64; 2]) -> Vec3 {
    std::array::from_fn(|a| {
        let s = &PAULI[a];
        let mut acc = Complex64::default();
        for al in 0..2 {
            for be in 0..2 {
                acc += chi[al].conj() * s[al][be] * chi[be];
            }
        }
        acc.re
    })
}

/// Default difference operator of this module.
pub const DEFAULT_ORDER: DiffOrder = DiffOrder::Fourth;

pub fn reparameterize(f: &GLFields) -> Result<ReparamFields> {
    reparameterize_with(f, RHO_MIN, DEFAULT_ORDER)
}

pub fn reparameterize_with(f: &GLFields, rho_min: f64, order: DiffOrder) -> Result<ReparamFields> {
    let grid = f.grid;
    let rho: Vec<f64> = (0..grid.len()).map(|i| (f.psi1.data[i].norm_sqr() + f.psi2.data[i].norm_sqr()).sqrt()).collect();
    if let Some((index, r)) = rho.iter().enumerate().find(|(_, r)| !(**r >= rho_min)) {
        return Err(Error::VortexDetected { index, rho: *r });
    }
    let n: Vec<Vec3> = (0..grid.len()).map(|i| pauli_director([f.psi1.data[i] / rho[i], f.psi2.data[i] / rho[i]])).collect();
    let j = current(f, order);
    let c: Vec<Vec3> = (0..grid.len())
        .map(|i| vec3::add(f.a.data[i], vec3::scale(j[i], 0.5 / (rho[i] * rho[i]))))
        .collect();
    Ok(ReparamFields {
        rho: ScalarField { grid, data: rho },
        n: DirectorField { grid, data: n, vacuum: NORTH_POLE },
        c: VectorField3 { grid, data: c },
        j: VectorField3 { grid, data: j },
    })
}

/// `J_k = 2 Im Σ ψ̄ ∂_k ψ`.
fn current(f: &GLFields, order: DiffOrder) -> Vec<Vec3> {
    let d1 = stencil::gradient_with(&f.grid, &f.psi1.data, order);
    let d2 = stencil::gradient_with(&f.grid, &f.psi2.data, order);
    (0..f.grid.len())
        .map(|i| {
            std::array::from_fn(|k| {
                2.0 * (f.psi1.data[i].conj() * d1[k][i] + f.psi2.data[i].conj() * d2[k][i]).im
            })
        })
        .collect()
}

/// `ψ → e^{iλ} ψ`, `A → A - ∇λ`.
pub fn gauge_transform(f: &GLFields, lambda: &ScalarField) -> Result<GLFields> {
    gauge_transform_with(f, lambda, DEFAULT_ORDER)
}

pub fn gauge_transform_with(f: &GLFields, lambda: &ScalarField, order: DiffOrder) -> Result<GLFields> {
    if !lambda.grid.same_shape(&f.grid) {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid;
    let dl = stencil::gradient_with(&grid, &lambda.data, order);
    let phase: Vec<Complex64> = lambda.data.iter().map(|l| Complex64::from_polar(1.0, *l)).collect();
    let rot = |psi: &ComplexField| ComplexField { grid, data: psi.data.iter().zip(&phase).map(|(p, e)| p * e).collect() };
    let a = (0..grid.len()).map(|i| vec3::sub(f.a.data[i], [dl[0][i], dl[1][i], dl[2][i]])).collect();
    Ok(GLFields { grid, psi1: rot(&f.psi1), psi2: rot(&f.psi2), a: VectorField3 { grid, data: a } })
}

/// `V ≡ 0`, usable for either energy.
pub fn no_potential(_: f64, _: f64) -> f64 {
    0.0
}

/// `h³ Σ [Σ_α |∂ψ_α + iAψ_α|² + ½ Σ_ik F_ik² + v(|ψ1|, |ψ2|)]`.
pub fn energy_original(f: &GLFields, v: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    energy_original_with(f, v, DEFAULT_ORDER)
}

pub fn energy_original_with(f: &GLFields, v: impl Fn(f64, f64) -> f64 + Sync, order: DiffOrder) -> f64 {
    let grid = f.grid;
    let d1 = stencil::gradient_with(&grid, &f.psi1.data, order);
    let d2 = stencil::gradient_with(&grid, &f.psi2.data, order);
    let da = stencil::gradient_with(&grid, &f.a.data, order);
    let i_unit = Complex64::new(0.0, 1.0);
    let sum = reduce::node_sum(&grid, |i| {
        let (p1, p2, a) = (f.psi1.data[i], f.psi2.data[i], f.a.data[i]);
        let mut e = 0.0;
        for k in 0..3 {
            e += (d1[k][i] + i_unit * a[k] * p1).norm_sqr();
            e += (d2[k][i] + i_unit * a[k] * p2).norm_sqr();
        }
        // F_ik = ∂_i A_k - ∂_k A_i; the unrestricted ½ Σ F² is Σ_{i<k} F².
        for (i_, k_) in [(0, 1), (1, 2), (2, 0)] {
            let fik = da[i_][i][k_] - da[k_][i][i_];
            e += fik * fik;
        }
        e + v(p1.norm(), p2.norm())
    });
    sum * grid.cell_volume()
}

/// `h³ Σ [(∂ρ)² + ρ² (¼ (∂n)² + C²) + ½ Σ_ik (∂_k C_i - ∂_i C_k + ½ H_ik)² + v(ρ, n3)]`.
pub fn energy_reparam(r: &ReparamFields, v: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    energy_reparam_with(r, v, DEFAULT_ORDER)
}

pub fn energy_reparam_with(r: &ReparamFields, v: impl Fn(f64, f64) -> f64 + Sync, order: DiffOrder) -> f64 {
    let grid = r.rho.grid;
    let drho = stencil::gradient_with(&grid, &r.rho.data, order);
    let dn = stencil::gradient_with(&grid, &r.n.data, order);
    let dc = stencil::gradient_with(&grid, &r.c.data, order);
    let h = compute_h_with(&r.n, order);
    let sum = reduce::node_sum(&grid, |i| {
        let rho = r.rho.data[i];
        let mut grad_n = 0.0;
        let mut grad_rho = 0.0;
        for k in 0..3 {
            grad_n += vec3::norm2(dn[k][i]);
            grad_rho += drho[k][i] * drho[k][i];
        }
        let mut e = grad_rho + rho * rho * (GRADIENT_COEFF * grad_n + vec3::norm2(r.c.data[i]));
        for (i_, k_) in [(0, 1), (1, 2), (2, 0)] {
            let g = dc[k_][i][i_] - dc[i_][i][k_] + H_COEFF * h.component(i_, k_, i);
            e += g * g;
        }
        e + v(rho, r.n.data[i][2])
    });
    sum * grid.cell_volume()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GaugeResiduals {
    /// Largest nodal change of `ρ`.
    pub rho: f64,
    /// Largest nodal change of `n`.
    pub n: f64,
    /// Largest nodal change of `C`, relative to `max |C|`.
    pub c: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub e_original: f64,
    pub e_reparam: f64,
    pub rel_diff: f64,
    pub gauge_residuals: GaugeResiduals,
}

/// Evaluates both energies with `V ≡ 0` and compares the reparameterization
/// of `f` with that of its gauge transform by `lambda`.
pub fn identity_check(f: &GLFields, lambda: &ScalarField) -> Result<IdentityReport> {
    let r = reparameterize(f)?;
    let g = reparameterize(&gauge_transform(f, lambda)?)?;
    let e_original = energy_original(f, no_potential);
    let e_reparam = energy_reparam(&r, no_potential);
    let scale = e_original.abs().max(e_reparam.abs());
    let rel_diff = if scale == 0.0 { 0.0 } else { (e_original - e_reparam).abs() / scale };
    let max_dist = |a: &[Vec3], b: &[Vec3]| a.iter().zip(b).map(|(p, q)| vec3::dist(*p, *q)).fold(0.0, f64::max);
    let c_scale = r.c.data.iter().map(|c| vec3::norm(*c)).fold(0.0, f64::max);
    let c_res = max_dist(&r.c.data, &g.c.data);
    Ok(IdentityReport {
        e_original,
        e_reparam,
        rel_diff,
        gauge_residuals: GaugeResiduals {
            rho: r.rho.data.iter().zip(&g.rho.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            n: max_dist(&r.n.data, &g.n.data),
            c: if c_scale > 0.0 { c_res / c_scale } else { c_res },
        },
    })
}

/// Random sum of the 27 lowest Fourier modes of a periodic grid, scaled so
/// that its largest nodal magnitude is one.
fn low_mode_field(grid: &Grid, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let period = grid.period();
    let mut modes = Vec::with_capacity(27);
    for mx in -1i32..=1 {
        for my in -1i32..=1 {
            for mz in -1i32..=1 {
                let k = [mx, my, mz].map(|m| 2.0 * std::f64::consts::PI * m as f64);
                let k = [k[0] / period[0], k[1] / period[1], k[2] / period[2]];
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                modes.push((k, c));
            }
        }
    }
    let raw: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let p = grid.position_of(i);
            modes.iter().map(|(k, c)| c * Complex64::from_polar(1.0, vec3::dot(*k, p))).sum()
        })
        .collect();
    let peak = raw.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    raw.into_iter().map(|z| z / peak).collect()
}

/// Default grid of the random generator: periodic, 32 nodes per side, length 8.
pub fn random_grid() -> Grid {
    Grid::periodic_cube(32, 8.0).expect("valid grid")
}

/// Seeded smooth fields on a periodic grid with `ρ ≥ 0.7` everywhere:
/// `ψ1 = 1 + 0.3 u`, `ψ2 = 0.6 v`, `A = 0.4 Re w` for unit low-mode fields.
pub fn random_smooth_fields(grid: Grid, seed: u64) -> Result<GLFields> {
    if grid.boundary != crate::lattice::BoundaryPolicy::Periodic {
        return Err(Error::InvalidGrid("the random generator needs a periodic grid".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = low_mode_field(&grid, &mut rng);
    let v = low_mode_field(&grid, &mut rng);
    let w: [Vec<Complex64>; 3] = std::array::from_fn(|_| low_mode_field(&grid, &mut rng));
    let psi1 = u.iter().map(|z| Complex64::new(1.0, 0.0) + 0.3 * z).collect();
    let psi2 = v.iter().map(|z| 0.6 * z).collect();
    let a = (0..grid.len()).map(|i| [0.4 * w[0][i].re, 0.4 * w[1][i].re, 0.4 * w[2][i].re]).collect();
    GLFields::new(ComplexField { grid, data: psi1 }, ComplexField { grid, data: psi2 }, VectorField3 { grid, data: a })
}

/// Seeded smooth gauge function with peak magnitude `amplitude`.
pub fn random_gauge(grid: Grid, seed: u64, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let z = low_mode_field(&grid, &mut rng);
    let peak = z.iter().map(|v| v.re.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    ScalarField { grid, data: z.iter().map(|v| amplitude * v.re / peak).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::hopf_projection;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_sandwich_matches_closed_form() {
        for chi in [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.3, -0.2), c(0.5, 0.7)], [c(-0.1, 0.9), c(0.4, 0.1)]] {
            let p = pauli_director(chi);
            let q = hopf_projection(chi[0], chi[1]);
            assert!(vec3::dist(p, q) < 1e-15);
        }
        let s = 0.5f64.sqrt();
        assert!(vec3::dist(pauli_director([c(s, 0.0), c(s, 0.0)]), [1.0, 0.0, 0.0]) < 1e-15);
        assert_eq!(pauli_director([c(0.0, 0.0), c(1.0, 0.0)]), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn vacuum_maps_to_north_pole() {
        let g = Grid::cube(10, 2.0).unwrap();
        let r = reparameterize(&GLFields::vacuum(g)).unwrap();
        assert!(r.rho.data.iter().all(|v| *v == 1.0));
        assert!(r.n.data.iter().all(|v| *v == NORTH_POLE));
        assert!(r.c.data.iter().all(|v| *v == [0.0; 3]));
        assert_eq!(energy_original(&GLFields::vacuum(g), no_potential), 0.0);
        assert_eq!(energy_reparam(&r, no_potential), 0.0);
    }

    #[test]
    fn vortex_is_rejected() {
        let g = Grid::cube(10, 2.0).unwrap();
        let mut f = GLFields::vacuum(g);
        f.psi1.data[123] = c(1e-9, 0.0);
        assert!(matches!(reparameterize(&f), Err(Error::VortexDetected { index: 123, .. })));
    }

    #[test]
    fn constant_gauge_only_rotates_phases() {
        let g = random_grid();
        let f = random_smooth_fields(g, 3).unwrap();
        let t = gauge_transform(&f, &ScalarField { grid: g, data: vec![0.7; g.len()] }).unwrap();
        let moved = t.a.data.iter().zip(&f.a.data).map(|(p, q)| vec3::dist(*p, *q)).fold(0.0, f64::max);
        assert!(moved < 1e-13, "{moved}");
        assert!((t.psi1.data[5] - f.psi1.data[5] * Complex64::from_polar(1.0, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn random_fields_satisfy_the_identity() {
        let g = random_grid();
        let f = random_smooth_fields(g, 11).unwrap();
        let report = identity_check(&f, &random_gauge(g, 11, 1.5)).unwrap();
        assert!(report.rel_diff <= 1e-3, "{report:?}");
        assert!(report.gauge_residuals.rho < 1e-10 && report.gauge_residuals.n < 1e-10, "{report:?}");
    }

    #[test]
    fn second_order_truncation_is_visible() {
        let g = random_grid();
        let f = random_smooth_fields(g, 11).unwrap();
        let r = reparameterize_with(&f, RHO_MIN, DiffOrder::Second).unwrap();
        let e0 = energy_original_with(&f, no_potential, DiffOrder::Second);
        let e1 = energy_reparam_with(&r, no_potential, DiffOrder::Second);
        let rel = (e0 - e1).abs() / e0;
        // Second order on |m| ≤ 1 modes of a 32-node period: (kh)² ≈ 0.04.
        assert!(rel < 0.04 && rel > 1e-6, "{rel}");
    }

    #[test]
    fn constant_density_reduces_to_faddeev_energy() {
        let g = Grid::cube(24, 6.0).unwrap();
        let n = crate::ansatz::perturb(&DirectorField::vacuum(g), 0.2, 4).unwrap();
        let rho = 1.3;
        let f = GLFields::from_director(&n, rho, DiffOrder::Second).unwrap();
        let r = reparameterize_with(&f, RHO_MIN, DiffOrder::Second).unwrap();
        assert!(r.c.data.iter().all(|c| vec3::norm(*c) < 1e-12));
        let (a, b) = calibrated_couplings(rho);
        let reference = crate::energy::energy_with(&n, a, b, crate::energy::Stencil::Central).total;
        let e = energy_reparam_with(&r, no_potential, DiffOrder::Second);
        assert!((e - reference).abs() <= 1e-10 * reference, "{e} vs {reference}");
    }

    #[test]
    fn raw_roundtrip() {
        let f = random_smooth_fields(Grid::periodic_cube(8, 4.0).unwrap(), 1).unwrap();
        let back = GLFields::from_raw(RawField::read_from(&f.to_raw().to_bytes()[..]).unwrap()).unwrap();
        assert_eq!(back.psi1.data, f.psi1.data);
        assert_eq!(back.psi2.data, f.psi2.data);
        assert_eq!(back.a.data, f.a.data);
    }


    proptest::proptest! {
        /// The director ignores the common phase and scales with |χ|².
        #[test]
        fn director_is_phase_blind_and_quadratic(
            z in proptest::array::uniform4(-1.0f64..1.0),
            phase in 0.0f64..6.3,
            scale in 0.1f64..5.0,
        ) {
            let chi = [c(z[0], z[1]), c(z[2], z[3])];
            let rho2 = chi[0].norm_sqr() + chi[1].norm_sqr();
            proptest::prop_assume!(rho2 > 1e-3);
            let n = pauli_director(chi);
            proptest::prop_assert!((vec3::norm(n) - rho2).abs() < 1e-12);
            let w = Complex64::from_polar(scale, phase);
            let m = pauli_director([chi[0] * w, chi[1] * w]);
            proptest::prop_assert!(vec3::dist(vec3::scale(n, scale * scale), m) < 1e-10 * scale * scale);
        }
    }
}
