use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Angular wavenumbers of an `n`-point FFT with spacing `h`, in FFT order.
fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let f = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 };
            2.0 * PI * f / (n as f64 * h)
        })
        .collect()
}

/// In-place 2-D transform of a matrix with rows indexed by `X` and columns
/// by `x`. Unnormalized in both directions.
fn transform(samples: &mut DMatrix<Complex64>, forward: bool) {
    let (rows, cols) = samples.shape();
    let mut planner = FftPlanner::new();
    let plan = |planner: &mut FftPlanner<f64>, n| -> std::sync::Arc<dyn Fft<f64>> {
        if forward {
            planner.plan_fft_forward(n)
        } else {
            planner.plan_fft_inverse(n)
        }
    };
    // columns are contiguous (fixed x, varying X)
    let along_big_x = plan(&mut planner, rows);
    for mut col in samples.column_iter_mut() {
        along_big_x.process(col.as_mut_slice());
    }
    let along_x = plan(&mut planner, cols);
    let mut buf = vec![Complex64::default(); cols];
    for i in 0..rows {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = samples[(i, j)];
        }
        along_x.process(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            samples[(i, j)] = *b;
        }
    }
}

/// Free evolution for time `t` of a periodic sample of `Ψ(x, X)` (rows `X`,
/// columns `x`) with grid spacing `[Δx, ΔX]` and masses `[m, M]`, `ħ = 1`.
pub fn free_evolve(samples: &mut DMatrix<Complex64>, spacing: [f64; 2], masses: [f64; 2], t: f64) {
    let (rows, cols) = samples.shape();
    let q_x = wavenumbers(cols, spacing[0]);
    let q_big_x = wavenumbers(rows, spacing[1]);
    transform(samples, true);
    let scale = 1.0 / (rows * cols) as f64;
    for j in 0..cols {
        let e_x = q_x[j] * q_x[j] / (2.0 * masses[0]);
        for i in 0..rows {
            let energy = e_x + q_big_x[i] * q_big_x[i] / (2.0 * masses[1]);
            samples[(i, j)] *= Complex64::from_polar(scale, -energy * t);
        }
    }
    transform(samples, false);
}

/// Mean wavenumbers `[⟨p_x⟩, ⟨p_X⟩]` of a sampled state.
pub fn mean_momentum(samples: &DMatrix<Complex64>, spacing: [f64; 2]) -> [f64; 2] {
    let (rows, cols) = samples.shape();
    let q_x = wavenumbers(cols, spacing[0]);
    let q_big_x = wavenumbers(rows, spacing[1]);
    let mut spectrum = samples.clone();
    transform(&mut spectrum, true);
    let (mut total, mut px, mut p_big_x) = (0.0, 0.0, 0.0);
    for j in 0..cols {
        for i in 0..rows {
            let p = spectrum[(i, j)].norm_sqr();
            total += p;
            px += p * q_x[j];
            p_big_x += p * q_big_x[i];
        }
    }
    [px / total, p_big_x / total]
}
