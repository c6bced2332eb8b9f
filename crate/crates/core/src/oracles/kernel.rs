use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::entanglement::{oscillator_kernel_eval, ReducedKernel};
use crate::error::{ensure_positive, Error, Result};
use crate::kinematics::{PostCollisionState, TwoBodyWave};

use super::grid::{Axis, GridSpec, Rule};

const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues (descending) of a Hermitian matrix after symmetrization.
///
/// Errors if the input departs from Hermitian by more than `1e-10` of its
/// largest entry, which would point at a broken kernel.
pub(crate) fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<f64>> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut asym: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..=i {
            asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::Implementation(format!(
            "kernel matrix is not Hermitian: deviation {asym:.3e} vs scale {scale:.3e}"
        )));
    }
    let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let fail = || Error::Numeric {
        message: "Hermitian eigensolve did not converge".into(),
        diagnostics: format!("{} x {} matrix", sym.nrows(), sym.ncols()),
    };
    let mut ev: Vec<f64> = if sym.iter().all(|z| z.im == 0.0) {
        SymmetricEigen::try_new(sym.map(|z| z.re), f64::EPSILON, 0)
            .ok_or_else(fail)?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        SymmetricEigen::try_new(sym.clone(), f64::EPSILON, 0)
            .ok_or_else(fail)?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    };
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Eigenvalues of the integral operator `(Kf)(x') = ∫ K(x', x) f(x) dx`
/// discretized on `axis` as `√(w_i w_j) K(x_i, x_j)`.
pub fn discretized_kernel_eigenvalues(
    kernel: impl Fn(f64, f64) -> Complex64,
    axis: &Axis,
) -> Result<Vec<f64>> {
    let n = axis.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        kernel(axis.nodes[i], axis.nodes[j]) * (axis.weights[i] * axis.weights[j]).sqrt()
    });
    hermitian_eigenvalues(m)
}

/// Eigenvalues of the closed-form reduced kernel on the grid's `x` axis.
pub fn kernel_eigensolve(state: &PostCollisionState, grid: &GridSpec) -> Result<Vec<f64>> {
    grid.validate_for(&[state.shape()])?;
    let kernel = ReducedKernel::new(state);
    discretized_kernel_eigenvalues(|xp, x| kernel.eval(xp, x), &grid.x_axis())
}

/// Eigenvalues of the oscillator kernel `G` on `n` points spanning ten
/// standard deviations of its diagonal either side of the origin.
pub fn oscillator_kernel_eigensolve(beta: f64, u: f64, n: usize) -> Result<Vec<f64>> {
    ensure_positive("beta", beta)?;
    ensure_positive("u", u)?;
    // G(x, x) ∝ exp(-2β tanh(u/2) x²)
    let std = 0.5 / (beta * (0.5 * u).tanh()).sqrt();
    let axis = Axis::new(-10.0 * std, 10.0 * std, n, Rule::Trapezoid);
    discretized_kernel_eigenvalues(
        |x, y| Complex64::new(oscillator_kernel_eval(beta, u, x, y), 0.0),
        &axis,
    )
}

/// `∫ Ψ*(X, x') Ψ(X, x) dX` by quadrature on `axis` (nodes in `X`).
pub fn reduced_kernel_quadrature<W: TwoBodyWave + ?Sized>(
    state: &W,
    x_prime: f64,
    x: f64,
    axis: &Axis,
) -> Complex64 {
    axis.nodes
        .iter()
        .zip(&axis.weights)
        .map(|(&big_x, &w)| state.amplitude(x_prime, big_x).conj() * state.amplitude(x, big_x) * w)
        .sum()
}
