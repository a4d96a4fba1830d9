//! Three-dimensional FFTs over periodic node data.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.map(|n| planner.plan_fft_forward(n));
        let inverse = dims.map(|n| planner.plan_fft_inverse(n));
        Fft3 { dims, forward, inverse }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the `1/N` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [nx, ny, nz] = self.dims;
        assert_eq!(data.len(), nx * ny * nz);
        plans[0].process(data);

        let mut line = vec![Complex64::default(); ny.max(nz)];
        for k in 0..nz {
            for i in 0..nx {
                let base = i + nx * ny * k;
                for j in 0..ny {
                    line[j] = data[base + nx * j];
                }
                plans[1].process(&mut line[..ny]);
                for j in 0..ny {
                    data[base + nx * j] = line[j];
                }
            }
        }

        let plane = nx * ny;
        for base in 0..plane {
            for k in 0..nz {
                line[k] = data[base + plane * k];
            }
            plans[2].process(&mut line[..nz]);
            for k in 0..nz {
                data[base + plane * k] = line[k];
            }
        }
    }
}

/// Fourier symbol of the periodic central difference along one axis,
/// `sin(2 pi m / n) / h`, in FFT index order.
pub fn central_symbol(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|m| (2.0 * std::f64::consts::PI * m as f64 / n as f64).sin() / h)
        .collect()
}

/// Fourier symbol of the periodic difference operator of the given order.
pub fn difference_symbol(n: usize, h: f64, order: super::DiffOrder) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let t = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            match order {
                super::DiffOrder::Second => t.sin() / h,
                super::DiffOrder::Fourth => (8.0 * t.sin() - (2.0 * t).sin()) / (6.0 * h),
            }
        })
        .collect()
}

/// Signed integer frequency of FFT index `m` for a length-`n` transform.
pub fn signed_frequency(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}
