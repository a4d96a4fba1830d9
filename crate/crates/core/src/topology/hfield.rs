use crate::energy::Derivatives;
use crate::lattice::{reduce, stencil, DiffOrder, DirectorField, Grid, ScalarField, VectorField3};
use crate::vec3;

/// The pulled-back area form `H_ik = (∂_i n × ∂_k n) · n` on the lattice,
/// stored both as its three independent components and as the dual vector
/// `B = (H23, H31, H12)`.
#[derive(Clone, Debug)]
pub struct HField {
    pub grid: Grid,
    pub b: VectorField3,
    pub h12: ScalarField,
    pub h23: ScalarField,
    pub h31: ScalarField,
    /// The director field `H` was computed from; tracers sample it for drift.
    pub n: DirectorField,
    /// Difference operator behind `H`; the potential solve reuses it.
    pub order: DiffOrder,
}

impl HField {
    /// `H_ik` at node `idx` for spatial indices `i, k` in `0..3`.
    pub fn component(&self, i: usize, k: usize, idx: usize) -> f64 {
        match (i, k) {
            (0, 1) => self.h12.data[idx],
            (1, 0) => -self.h12.data[idx],
            (1, 2) => self.h23.data[idx],
            (2, 1) => -self.h23.data[idx],
            (2, 0) => self.h31.data[idx],
            (0, 2) => -self.h31.data[idx],
            _ => 0.0,
        }
    }

    /// Discrete L2 norm of the divergence of `B`, relative to `|B| / h`.
    pub fn divergence_residual(&self) -> f64 {
        let div = stencil::divergence_with(&self.grid, &self.b.data, self.order);
        let num = reduce::node_sum(&self.grid, |i| div[i] * div[i]).sqrt() * self.grid.h;
        let den = reduce::node_sum(&self.grid, |i| vec3::norm2(self.b.data[i])).sqrt();
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    pub fn is_zero(&self) -> bool {
        self.b.data.iter().all(|v| *v == [0.0; 3])
    }
}

/// `H` for the topological diagnostics, built from fourth-order differences.
/// The second-order field that enters the energy is `compute_h_with(n, DiffOrder::Second)`.
pub fn compute_h(n: &DirectorField) -> HField {
    compute_h_with(n, DiffOrder::Fourth)
}

pub fn compute_h_with(n: &DirectorField, order: DiffOrder) -> HField {
    let grid = n.grid;
    let der = Derivatives::with_order(n, order);
    let h: Vec<[f64; 3]> = reduce::node_map(&grid, |i| der.h_at(n.data[i], i));
    let pick = |c: usize| ScalarField { grid, data: h.iter().map(|v| v[c]).collect() };
    let (h12, h23, h31) = (pick(0), pick(1), pick(2));
    let b = VectorField3 { grid, data: h.iter().map(|v| [v[1], v[2], v[0]]).collect() };
    HField { grid, b, h12, h23, h31, n: n.clone(), order }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::NORTH_POLE;

    #[test]
    fn vacuum_has_zero_h() {
        let h = compute_h(&DirectorField::vacuum(Grid::cube(10, 2.0).unwrap()));
        assert!(h.is_zero());
        assert_eq!(h.divergence_residual(), 0.0);
    }

    #[test]
    fn antisymmetric_components() {
        let g = Grid::cube(10, 2.0).unwrap();
        let n = DirectorField::from_fn(g, NORTH_POLE, |p| [p[0] * p[1], (p[2] + p[0]).sin(), 1.0]).unwrap();
        let h = compute_h(&n);
        for idx in (0..g.len()).step_by(37) {
            for i in 0..3 {
                for k in 0..3 {
                    assert_eq!(h.component(i, k, idx), -h.component(k, i, idx));
                }
            }
            assert_eq!(h.b.data[idx][0], h.component(1, 2, idx));
            assert_eq!(h.b.data[idx][1], h.component(2, 0, idx));
            assert_eq!(h.b.data[idx][2], h.component(0, 1, idx));
        }
    }
}
