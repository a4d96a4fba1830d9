//! Initial configurations with a prescribed Hopf charge.
//!
//! A radial profile `f` with `f(0) = π` and `f(∞) = 0` maps space onto the
//! 3-sphere, `Z1 = sin f (x + iy)/r`, `Z2 = cos f + i sin f z/r`. Raising the
//! two coordinates to integer powers and projecting with the Hopf map gives a
//! director field of charge `m·k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::spectral::{signed_frequency, Fft3};
use crate::lattice::{DirectorField, Grid, NORTH_POLE};
use crate::vec3::{self, Vec3};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    /// `f(r) = π exp(-r/R)`.
    ExponentialDecay,
    /// `f(r) = π max(0, 1 - r/4R)²`, exactly vacuum beyond `4R`. Its core is
    /// twice as wide as the exponential one for the same `R`, which the
    /// charge evaluators need at spacing `h ≈ R/8`.
    #[default]
    PolynomialDecay,
}

impl Profile {
    pub fn eval(self, r: f64, core_radius: f64) -> f64 {
        match self {
            Profile::ExponentialDecay => PI * (-r / core_radius).exp(),
            Profile::PolynomialDecay => {
                let t = (1.0 - r / (4.0 * core_radius)).max(0.0);
                PI * t * t
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    /// Power of the `x + iy` coordinate.
    pub m: i32,
    /// Power of the `cos f + i z/r sin f` coordinate.
    pub k: i32,
    pub half_width: f64,
    pub profile: Profile,
    pub core_radius: f64,
}

impl AnsatzSpec {
    /// Default profile with `core_radius = half_width / 4`, so the polynomial
    /// profile reaches the vacuum exactly at the faces.
    pub fn new(m: i32, k: i32, half_width: f64) -> Self {
        AnsatzSpec { m, k, half_width, profile: Profile::default(), core_radius: half_width / 4.0 }
    }

    pub fn charge(&self) -> i64 {
        self.m as i64 * self.k as i64
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 {
            return Err(Error::InvalidParameter(format!(
                "twist indices (m, k) = ({}, {}) must both be nonzero; use the vacuum for charge 0",
                self.m, self.k
            )));
        }
        if !(self.half_width > 0.0) {
            return Err(Error::InvalidParameter(format!("half width {} must be positive", self.half_width)));
        }
        if !(self.core_radius > 0.0 && self.core_radius <= 0.5 * self.half_width) {
            return Err(Error::InvalidParameter(format!(
                "core radius {} must lie in (0, half_width/2]",
                self.core_radius
            )));
        }
        Ok(())
    }

    /// Point on the unit 3-sphere for position `p`, before twisting.
    pub fn sphere_point(&self, p: Vec3) -> (Complex64, Complex64) {
        let r = vec3::norm(p);
        let f = self.profile.eval(r, self.core_radius);
        if r == 0.0 {
            return (Complex64::new(0.0, 0.0), Complex64::new(f.cos(), 0.0));
        }
        let (s, c) = f.sin_cos();
        (Complex64::new(s * p[0] / r, s * p[1] / r), Complex64::new(c, s * p[2] / r))
    }

    /// Normalized two-component spinor `(χ1, χ2) ∝ (Z2^k, Z̄1^m)` at `p`.
    /// Negative powers use the conjugate. The vacuum sits at `χ = (1, 0)`,
    /// and conjugating `Z1` orients the map so that `(1, 1)` has charge `+1`.
    pub fn spinor(&self, p: Vec3) -> (Complex64, Complex64) {
        let (z1, z2) = self.sphere_point(p);
        let a = twist(z2, self.k);
        let b = twist(z1.conj(), self.m);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        (a / norm, b / norm)
    }
}

fn twist(z: Complex64, power: i32) -> Complex64 {
    let base = if power < 0 { z.conj() } else { z };
    base.powi(power.abs())
}

/// `n = (2 Re χ̄1χ2, 2 Im χ̄1χ2, |χ1|² - |χ2|²)`.
pub fn hopf_projection(chi1: Complex64, chi2: Complex64) -> Vec3 {
    let w = chi1.conj() * chi2;
    [2.0 * w.re, 2.0 * w.im, chi1.norm_sqr() - chi2.norm_sqr()]
}

pub fn build_ansatz(grid: Grid, spec: &AnsatzSpec) -> Result<DirectorField> {
    spec.validate()?;
    DirectorField::from_fn(grid, NORTH_POLE, |p| {
        let (c1, c2) = spec.spinor(p);
        hopf_projection(c1, c2)
    })
}

pub const MAX_PERTURBATION: f64 = 0.2;

/// Adds a reproducible band-limited tangential perturbation whose largest
/// nodal magnitude equals `amplitude`. Only the longest quarter of the
/// resolvable wavelengths is populated.
pub fn perturb(n: &DirectorField, amplitude: f64, seed: u64) -> Result<DirectorField> {
    if !(0.0..=MAX_PERTURBATION).contains(&amplitude) {
        return Err(Error::InvalidParameter(format!(
            "perturbation amplitude {amplitude} outside [0, {MAX_PERTURBATION}]"
        )));
    }
    if amplitude == 0.0 {
        return Ok(n.clone());
    }
    let grid = n.grid;
    let dims = grid.dims();
    let cutoff = dims.map(|d| (d / 8).max(1) as i64);
    let fft = Fft3::new(dims);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for comp in noise.iter_mut() {
        let mut spec = vec![Complex64::default(); grid.len()];
        for (idx, slot) in spec.iter_mut().enumerate() {
            let c = grid.coords(idx);
            let band = (0..3).all(|a| signed_frequency(c[a], dims[a]).abs() <= cutoff[a]);
            // Draw for every mode so the stream does not depend on the cutoff.
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            if band && idx != 0 {
                *slot = Complex64::new(re, im);
            }
        }
        fft.inverse(&mut spec);
        for (o, v) in comp.iter_mut().zip(&spec) {
            *o = v.re;
        }
    }
    let tangent: Vec<Vec3> = n
        .data
        .iter()
        .enumerate()
        .map(|(i, nv)| vec3::reject([noise[0][i], noise[1][i], noise[2][i]], *nv))
        .collect();
    let peak = tangent.iter().map(|v| vec3::norm(*v)).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(n.clone());
    }
    let mut out = n.clone();
    for (o, t) in out.data.iter_mut().zip(&tangent) {
        *o = vec3::add(*o, vec3::scale(*t, amplitude / peak));
    }
    out.normalize_in_place()?;
    Ok(out)
}
