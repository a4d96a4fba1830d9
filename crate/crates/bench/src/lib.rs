//! Fixtures shared by the kernel benchmarks.

use hopfion::ansatz::{build_ansatz, AnsatzSpec};
use hopfion::{DirectorField, Grid};

/// Q=1 ansatz with the default profile on an `n³` box of half-width 6.
pub fn hopfion(n: usize) -> DirectorField {
    let grid = Grid::cube(n, 6.0).expect("valid grid");
    build_ansatz(grid, &AnsatzSpec::new(1, 1, 6.0)).expect("valid ansatz")
}
