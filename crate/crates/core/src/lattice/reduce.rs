use rayon::prelude::*;

use super::Grid;

/// Pairwise (tree) summation; the result depends only on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Sums `f(idx)` over every node. Each z-plane is reduced on its own and the
/// plane totals are combined pairwise, so the result is independent of the
/// number of worker threads.
pub fn node_sum<F>(grid: &Grid, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let plane = grid.plane_len();
    let partial: Vec<f64> = (0..grid.nz)
        .into_par_iter()
        .map(|k| {
            let base = k * plane;
            let row: Vec<f64> = (base..base + plane).map(&f).collect();
            pairwise_sum(&row)
        })
        .collect();
    pairwise_sum(&partial)
}

/// Builds a per-node vector by evaluating `f` in parallel over z-planes.
pub fn node_map<T, F>(grid: &Grid, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    F: Fn(usize) -> T + Sync,
{
    let plane = grid.plane_len();
    let mut out = vec![T::default(); grid.len()];
    out.par_chunks_mut(plane).enumerate().for_each(|(k, chunk)| {
        let base = k * plane;
        for (o, slot) in chunk.iter_mut().enumerate() {
            *slot = f(base + o);
        }
    });
    out
}
