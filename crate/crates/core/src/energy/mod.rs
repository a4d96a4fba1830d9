//! Static lattice energy `E = a Σ|∂n|² + b Σ H²`, its exact discrete gradient,
//! and the scaling diagnostics built on it.
//!
//! The quartic term sums both index orders of `H_ik`, so each unordered pair
//! contributes `2 H_ik²`.
//!
//! Three lattice versions exist. [`Stencil::Central`] evaluates node-centered
//! central differences; it leaves the even and odd sublattices nearly
//! decoupled, and gradient flow on it finds node-scale modes that unwind a
//! soliton. [`Stencil::Compact`] uses nearest-neighbour links and plaquettes.
//! Its `O(h²)` error still favours shrinking the soliton onto a few cells, so
//! the default is [`Stencil::Improved`], which combines compact sums at spans
//! one and two to cancel that error.

mod compact;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{reduce, stencil, trilinear, DirectorField, ScalarField, VectorField3};
use crate::topology;
use crate::vec3::{self, cross, dot, Vec3};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stencil {
    /// Links for `E₂`, plaquette corners for `E₄`.
    Compact,
    /// Second-order central differences at every node.
    Central,
    /// `(4 E[h] - E[2h]) / 3` over compact sums with spans one and two,
    /// which cancels the `O(h²)` error of the compact sums.
    #[default]
    Improved,
}

/// Span weights of the improved combination.
const IMPROVED: [(i64, f64); 2] = [(1, 4.0 / 3.0), (2, -1.0 / 3.0)];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnergyReport {
    pub a: f64,
    pub b: f64,
    pub e2: f64,
    pub e4: f64,
    pub total: f64,
    /// `e2 / e4`, absent when `e4 == 0`.
    pub virial_ratio: Option<f64>,
    /// The quartic term counts both orders `(i,k)` and `(k,i)`.
    pub quartic_convention: String,
    pub stencil: Stencil,
    #[serde(skip)]
    pub density: Option<ScalarField>,
}

impl EnergyReport {
    fn new(a: f64, b: f64, e2: f64, e4: f64, stencil: Stencil, density: Option<ScalarField>) -> Self {
        EnergyReport {
            a,
            b,
            e2,
            e4,
            total: e2 + e4,
            virial_ratio: (e4 > 0.0).then(|| e2 / e4),
            quartic_convention: "unordered pairs weighted by 2".into(),
            stencil,
            density,
        }
    }
}

/// First derivatives and H components at every node.
pub(crate) struct Derivatives {
    pub d: [Vec<Vec3>; 3],
}

impl Derivatives {
    pub fn of(n: &DirectorField) -> Self {
        Derivatives { d: stencil::gradient(&n.grid, &n.data) }
    }

    pub fn with_order(n: &DirectorField, order: crate::lattice::DiffOrder) -> Self {
        Derivatives { d: stencil::gradient_with(&n.grid, &n.data, order) }
    }

    /// `(H12, H23, H31)` at node `i`.
    #[inline]
    pub fn h_at(&self, n: Vec3, i: usize) -> Vec3 {
        let [dx, dy, dz] = [self.d[0][i], self.d[1][i], self.d[2][i]];
        [dot(n, cross(dx, dy)), dot(n, cross(dy, dz)), dot(n, cross(dz, dx))]
    }

    #[inline]
    fn densities(&self, n: Vec3, i: usize) -> (f64, f64) {
        let sq = vec3::norm2(self.d[0][i]) + vec3::norm2(self.d[1][i]) + vec3::norm2(self.d[2][i]);
        let h = self.h_at(n, i);
        (sq, 2.0 * vec3::norm2(h))
    }
}

fn check_couplings(a: f64, b: f64) {
    assert!(a > 0.0 && b > 0.0, "couplings must be positive (a = {a}, b = {b})");
}

pub fn energy(n: &DirectorField, a: f64, b: f64) -> EnergyReport {
    energy_with(n, a, b, Stencil::default())
}

pub fn energy_with(n: &DirectorField, a: f64, b: f64, stencil: Stencil) -> EnergyReport {
    evaluate(n, a, b, stencil, false)
}

/// Same as [`energy`] but also fills the per-node density.
pub fn energy_with_density(n: &DirectorField, a: f64, b: f64) -> EnergyReport {
    evaluate(n, a, b, Stencil::default(), true)
}

fn evaluate(n: &DirectorField, a: f64, b: f64, stencil: Stencil, with_density: bool) -> EnergyReport {
    check_couplings(a, b);
    match stencil {
        Stencil::Compact => {
            let (s2, s4) = compact::sums(n, 1);
            let density = with_density.then(|| compact::density(n, a, b, 1));
            EnergyReport::new(a, b, a * s2, b * s4, stencil, density)
        }
        Stencil::Improved => {
            let (mut s2, mut s4) = (0.0, 0.0);
            for (span, w) in IMPROVED {
                let (x2, x4) = compact::sums(n, span);
                s2 += w * x2;
                s4 += w * x4;
            }
            let density = with_density.then(|| {
                let mut d = compact::density(n, a, b, 1);
                let coarse = compact::density(n, a, b, 2);
                for (v, c) in d.data.iter_mut().zip(&coarse.data) {
                    *v = IMPROVED[0].1 * *v + IMPROVED[1].1 * c;
                }
                d
            });
            EnergyReport::new(a, b, a * s2, b * s4, stencil, density)
        }
        Stencil::Central => {
            let grid = n.grid;
            let der = Derivatives::of(n);
            let vol = grid.cell_volume();
            let s2 = reduce::node_sum(&grid, |i| der.densities(n.data[i], i).0);
            let s4 = reduce::node_sum(&grid, |i| der.densities(n.data[i], i).1);
            let density = with_density.then(|| ScalarField {
                grid,
                data: reduce::node_map(&grid, |i| {
                    let (q, h) = der.densities(n.data[i], i);
                    a * q + b * h
                }),
            });
            EnergyReport::new(a, b, a * vol * s2, b * vol * s4, stencil, density)
        }
    }
}

/// Exact derivative of the lattice energy with respect to every node value,
/// projected onto the tangent plane of the sphere. Clamped boundary nodes get
/// zero.
pub fn gradient(n: &DirectorField, a: f64, b: f64) -> VectorField3 {
    energy_and_gradient(n, a, b).1
}

pub fn energy_and_gradient(n: &DirectorField, a: f64, b: f64) -> (EnergyReport, VectorField3) {
    energy_and_gradient_with(n, a, b, Stencil::default())
}

pub fn energy_and_gradient_with(n: &DirectorField, a: f64, b: f64, stencil: Stencil) -> (EnergyReport, VectorField3) {
    check_couplings(a, b);
    let report = evaluate(n, a, b, stencil, false);
    let raw = match stencil {
        Stencil::Compact => compact::raw_gradient(n, a, b, 1),
        Stencil::Improved => {
            let mut g = compact::raw_gradient(n, a, b, 1);
            let coarse = compact::raw_gradient(n, a, b, 2);
            for (v, c) in g.iter_mut().zip(&coarse) {
                *v = vec3::add(vec3::scale(*v, IMPROVED[0].1), vec3::scale(*c, IMPROVED[1].1));
            }
            g
        }
        Stencil::Central => central_raw_gradient(n, a, b),
    };
    let grid = n.grid;
    let data = reduce::node_map(&grid, |i| {
        if grid.is_boundary_index(i) {
            return [0.0; 3];
        }
        vec3::reject(raw[i], n.data[i])
    });
    (report, VectorField3 { grid, data })
}

fn central_raw_gradient(n: &DirectorField, a: f64, b: f64) -> Vec<Vec3> {
    let grid = n.grid;
    let der = Derivatives::of(n);
    let vol = grid.cell_volume();

    // Partial derivatives of the node density with respect to ∂_x n, ∂_y n,
    // ∂_z n and n itself.
    let len = grid.len();
    let mut g = [vec![[0.0; 3]; len], vec![[0.0; 3]; len], vec![[0.0; 3]; len]];
    let mut local = vec![[0.0; 3]; len];
    let plane = grid.plane_len();
    {
        let [gx, gy, gz] = &mut g;
        gx.par_chunks_mut(plane)
            .zip(gy.par_chunks_mut(plane))
            .zip(gz.par_chunks_mut(plane))
            .zip(local.par_chunks_mut(plane))
            .enumerate()
            .for_each(|(k, (((cx, cy), cz), cl))| {
                for o in 0..plane {
                    let i = k * plane + o;
                    let nv = n.data[i];
                    let (dx, dy, dz) = (der.d[0][i], der.d[1][i], der.d[2][i]);
                    let [h12, h23, h31] = der.h_at(nv, i);
                    let q = 4.0 * b;
                    cx[o] = vec3::add(
                        vec3::scale(dx, 2.0 * a),
                        vec3::scale(vec3::add(vec3::scale(cross(dy, nv), h12), vec3::scale(cross(nv, dz), h31)), q),
                    );
                    cy[o] = vec3::add(
                        vec3::scale(dy, 2.0 * a),
                        vec3::scale(vec3::add(vec3::scale(cross(nv, dx), h12), vec3::scale(cross(dz, nv), h23)), q),
                    );
                    cz[o] = vec3::add(
                        vec3::scale(dz, 2.0 * a),
                        vec3::scale(vec3::add(vec3::scale(cross(nv, dy), h23), vec3::scale(cross(dx, nv), h31)), q),
                    );
                    cl[o] = vec3::scale(
                        vec3::add(
                            vec3::add(vec3::scale(cross(dx, dy), h12), vec3::scale(cross(dy, dz), h23)),
                            vec3::scale(cross(dz, dx), h31),
                        ),
                        q,
                    );
                }
            });
    }
    let tx = stencil::central_diff_transpose(&grid, &g[0], 0);
    let ty = stencil::central_diff_transpose(&grid, &g[1], 1);
    let tz = stencil::central_diff_transpose(&grid, &g[2], 2);
    reduce::node_map(&grid, |i| vec3::scale(vec3::add(vec3::add(tx[i], ty[i]), vec3::add(tz[i], local[i])), vol))
}

/// `|e2/e4 - 1| <= tol`; false when `e4` vanishes.
pub fn virial_check(report: &EnergyReport, tol: f64) -> bool {
    match report.virial_ratio {
        Some(r) => (r - 1.0).abs() <= tol,
        None => false,
    }
}

/// Dilates the field about the box center: the result at `x` is
/// `n(c + (x - c) / lambda)`, sampled trilinearly and renormalized. Points
/// that map outside the box take the vacuum value.
pub fn rescale_field(n: &DirectorField, lambda: f64) -> Result<DirectorField> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale factor {lambda} must be positive")));
    }
    let grid = n.grid;
    let c = grid.center();
    DirectorField::from_fn(grid, n.vacuum, |x| {
        let src = [
            c[0] + (x[0] - c[0]) / lambda,
            c[1] + (x[1] - c[1]) / lambda,
            c[2] + (x[2] - c[2]) / lambda,
        ];
        match trilinear(&grid, &n.data, src) {
            Ok(v) if vec3::norm(v) > 1e-6 => v,
            _ => n.vacuum,
        }
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VkReport {
    pub q: i64,
    pub energy: f64,
    /// `energy / |q|^{3/4}`, absent for `q == 0`.
    pub c_estimate: Option<f64>,
}

impl VkReport {
    pub fn new(q: i64, energy: f64) -> Self {
        let c_estimate = (q != 0).then(|| energy / (q.unsigned_abs() as f64).powf(0.75));
        VkReport { q, energy, c_estimate }
    }
}

/// Bundles the rounded Whitehead charge with the total energy.
pub fn vk_check(n: &DirectorField, a: f64, b: f64) -> Result<VkReport> {
    let q = if n.data.iter().all(|v| *v == n.vacuum) {
        0
    } else {
        topology::hopf_charge_whitehead(n)?.round() as i64
    };
    Ok(VkReport::new(q, energy(n, a, b).total))
}

/// `E(2q) / E(q)` lies strictly between 1 and 2, given a charge-`q` and a
/// charge-`2q` report.
pub fn is_sublinear(single: &VkReport, double: &VkReport) -> bool {
    if single.q == 0 || double.q != 2 * single.q || single.energy <= 0.0 {
        return false;
    }
    let ratio = double.energy / single.energy;
    ratio > 1.0 && ratio < 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BoundaryPolicy, Grid, NORTH_POLE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth_field(grid: Grid) -> DirectorField {
        DirectorField::from_fn(grid, NORTH_POLE, |p| {
            let r2 = vec3::norm2(p);
            let bump = (-r2 / 2.0).exp();
            [bump * (1.3 * p[1]).sin() + 0.2 * bump * p[2], bump * (0.9 * p[0] + 0.4).cos() * p[2], 1.0 - 1.5 * bump]
        })
        .unwrap()
    }

    #[test]
    fn vacuum_has_zero_energy_and_gradient() {
        let g = Grid::cube(10, 2.0).unwrap();
        let n = DirectorField::vacuum(g);
        let (rep, grad) = energy_and_gradient(&n, 1.0, 1.0);
        assert_eq!(rep.e2, 0.0);
        assert_eq!(rep.e4, 0.0);
        assert!(rep.virial_ratio.is_none());
        assert!(grad.data.iter().all(|v| *v == [0.0; 3]));
    }

    #[test]
    fn couplings_enter_linearly() {
        let n = smooth_field(Grid::cube(12, 3.0).unwrap());
        let r1 = energy(&n, 1.0, 1.0);
        let r2 = energy(&n, 2.0, 1.0);
        assert_eq!(r2.e2, 2.0 * r1.e2);
        assert_eq!(r2.e4, r1.e4);
        assert_eq!(r1.total, r1.e2 + r1.e4);
        assert!(r1.e2 > 0.0 && r1.e4 > 0.0);
    }

    #[test]
    fn gradient_is_tangent_and_zero_on_boundary() {
        let n = smooth_field(Grid::cube(12, 3.0).unwrap());
        let g = gradient(&n, 1.0, 0.7);
        for (i, v) in g.data.iter().enumerate() {
            assert!(dot(*v, n.data[i]).abs() < 1e-12);
            if n.grid.is_boundary_index(i) {
                assert_eq!(*v, [0.0; 3]);
            }
        }
    }

    fn check_directional_derivatives(n: &DirectorField, a: f64, b: f64) {
        for stencil in [Stencil::Compact, Stencil::Central, Stencil::Improved] {
            check_directional_with(n, a, b, stencil);
        }
    }

    fn check_directional_with(n: &DirectorField, a: f64, b: f64, stencil: Stencil) {
        let grad = energy_and_gradient_with(n, a, b, stencil).1;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eps = 1e-5;
        for _ in 0..5 {
            let v: Vec<Vec3> = n
                .data
                .iter()
                .enumerate()
                .map(|(i, nv)| {
                    if n.grid.is_boundary_index(i) {
                        return [0.0; 3];
                    }
                    let r = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                    vec3::reject(r, *nv)
                })
                .collect();
            let shifted = |s: f64| {
                let mut m = n.clone();
                for (x, dv) in m.data.iter_mut().zip(&v) {
                    *x = vec3::add(*x, vec3::scale(*dv, s));
                }
                m.normalize_in_place().unwrap();
                energy_with(&m, a, b, stencil).total
            };
            let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
            let analytic: f64 = grad.data.iter().zip(&v).map(|(g, d)| dot(*g, *d)).sum();
            assert!((fd - analytic).abs() <= 1e-6 * analytic.abs(), "{stencil:?}: fd {fd} analytic {analytic}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences_fixed_vacuum() {
        check_directional_derivatives(&smooth_field(Grid::cube(12, 3.0).unwrap()), 1.0, 1.0);
    }

    #[test]
    fn gradient_matches_finite_differences_periodic() {
        let g = Grid::periodic_cube(10, 6.0).unwrap();
        check_directional_derivatives(&smooth_field(g), 0.6, 1.7);
    }

    #[test]
    fn global_rotation_leaves_energy_unchanged() {
        let n = smooth_field(Grid::cube(14, 3.0).unwrap());
        let axis = vec3::normalized([0.3, -0.5, 0.8]);
        let mut r = n.clone();
        for v in r.data.iter_mut() {
            *v = vec3::rotate(*v, axis, 1.1);
        }
        r.vacuum = vec3::rotate(n.vacuum, axis, 1.1);
        let (e, f) = (energy(&n, 1.0, 1.0), energy(&r, 1.0, 1.0));
        assert!((e.e2 - f.e2).abs() <= 1e-10 * e.e2);
        assert!((e.e4 - f.e4).abs() <= 1e-10 * e.e4);
    }

    #[test]
    fn cyclic_shift_on_periodic_grid() {
        let g = Grid::periodic_cube(12, 6.0).unwrap();
        let n = smooth_field(g);
        let mut shifted = n.clone();
        for k in 0..12 {
            for j in 0..12 {
                for i in 0..12 {
                    shifted.data[g.index((i + 5) % 12, (j + 2) % 12, k)] = n.data[g.index(i, j, k)];
                }
            }
        }
        let (e, f) = (energy(&n, 1.0, 1.0), energy(&shifted, 1.0, 1.0));
        assert!((e.e2 - f.e2).abs() <= 1e-12 * e.e2);
        assert!((e.e4 - f.e4).abs() <= 1e-12 * e.e4);
    }

    #[test]
    fn virial_check_examples() {
        let rep = |e2: f64, e4: f64| EnergyReport::new(1.0, 1.0, e2, e4, Stencil::Compact, None);
        assert!(virial_check(&rep(5.0, 5.0), 0.05));
        assert!(!virial_check(&rep(2.0, 1.0), 0.05));
        assert!(!virial_check(&rep(1.0, 0.0), 0.05));
    }

    #[test]
    fn unit_rescale_is_identity() {
        let n = smooth_field(Grid::cube(12, 3.0).unwrap());
        let m = rescale_field(&n, 1.0).unwrap();
        for (a, b) in n.data.iter().zip(&m.data) {
            assert!(vec3::dist(*a, *b) < 1e-12);
        }
        assert!(rescale_field(&n, 0.0).is_err());
    }

    #[test]
    fn vk_report_examples() {
        let vac = VkReport::new(0, 0.0);
        assert!(vac.c_estimate.is_none());
        let one = VkReport::new(1, 120.0);
        assert_eq!(one.c_estimate, Some(120.0));
        assert!(is_sublinear(&one, &VkReport::new(2, 200.0)));
        assert!(!is_sublinear(&one, &VkReport::new(2, 250.0)));
        let _ = BoundaryPolicy::Periodic;
    }


    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(16))]

        /// Target-space rotations about the vacuum leave every stencil's
        /// energy unchanged.
        #[test]
        fn rotation_about_vacuum_is_a_symmetry(angle in 0.0f64..6.3) {
            let n = smooth_field(Grid::cube(10, 2.5).unwrap());
            let mut r = n.clone();
            for v in r.data.iter_mut() {
                *v = vec3::rotate(*v, NORTH_POLE, angle);
            }
            for stencil in [Stencil::Compact, Stencil::Central, Stencil::Improved] {
                let (e0, e1) = (energy_with(&n, 1.0, 1.0, stencil), energy_with(&r, 1.0, 1.0, stencil));
                proptest::prop_assert!(e0.e2 > 0.0 && e0.e4 > 0.0);
                proptest::prop_assert!((e0.total - e1.total).abs() <= 1e-10 * e0.total);
            }
        }
    }
}
