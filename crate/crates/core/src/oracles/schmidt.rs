use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::TwoBodyWave;

use super::grid::{GridSpec, Rule};

/// Singular values of the sampled two-body amplitude, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    pub singular_values: Vec<f64>,
    /// Change of the largest weight against the half-resolution grid plus a
    /// roundoff floor.
    pub truncation_estimate: f64,
}

impl SchmidtSpectrum {
    /// Squared singular values, the eigenvalues of the reduced operator.
    pub fn weights(&self) -> Vec<f64> {
        self.singular_values.iter().map(|s| s * s).collect()
    }

    /// Estimate of `F_0`.
    pub fn largest_weight(&self) -> f64 {
        self.singular_values.first().map_or(0.0, |s| s * s)
    }

    pub fn total_weight(&self) -> f64 {
        self.singular_values.iter().map(|s| s * s).sum()
    }
}

/// Which coordinate the reduced operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `∫ Ψ*(X, x') Ψ(X, x) dX`, acting on the particle coordinate.
    Particle,
    /// `∫ Ψ*(X', x) Ψ(X, x) dx`, acting on the wall coordinate.
    Wall,
}

/// `Ψ(x_j, X_i) √(w_i W_j)` with rows indexed by `X` and columns by `x`.
pub fn sample_matrix<W: TwoBodyWave + ?Sized>(state: &W, grid: &GridSpec) -> DMatrix<Complex64> {
    let (xs, big_xs) = (grid.x_axis(), grid.big_x_axis());
    DMatrix::from_fn(big_xs.len(), xs.len(), |i, j| {
        state.amplitude(xs.nodes[j], big_xs.nodes[i]) * (big_xs.weights[i] * xs.weights[j]).sqrt()
    })
}

/// Singular values, descending. Purely real input takes the real SVD.
pub fn singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let fail = || Error::Numeric {
        message: "SVD did not converge".into(),
        diagnostics: format!("{} x {} matrix", m.nrows(), m.ncols()),
    };
    let mut s: Vec<f64> = if m.iter().all(|z| z.im == 0.0) {
        let real = m.map(|z| z.re);
        SVD::try_new(real, false, false, f64::EPSILON, 0)
            .ok_or_else(fail)?
            .singular_values
            .iter()
            .copied()
            .collect()
    } else {
        SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
            .ok_or_else(fail)?
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Schmidt coefficients of a two-body state from the SVD of its samples.
pub fn schmidt_decompose<W: TwoBodyWave + ?Sized>(state: &W, grid: &GridSpec) -> Result<SchmidtSpectrum> {
    grid.validate_for(&[state.shape()])?;
    let samples = sample_matrix(state, grid);
    let singular = singular_values(&samples)?;
    let total: f64 = singular.iter().map(|s| s * s).sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Numeric {
            message: format!("sampled state has norm² {total:.9}, expected 1 within 1e-6"),
            diagnostics: grid.describe(),
        });
    }
    let coarse_grid = GridSpec {
        nx: grid.nx / 2,
        n_big_x: grid.n_big_x / 2,
        ..*grid
    };
    let coarse = match grid.rule {
        Rule::Trapezoid => {
            let sub = DMatrix::from_fn(grid.n_big_x.div_ceil(2), grid.nx.div_ceil(2), |i, j| {
                samples[(2 * i, 2 * j)] * 2.0
            });
            singular_values(&sub)?
        }
        Rule::GaussLegendre => singular_values(&sample_matrix(state, &coarse_grid))?,
    };
    let s0 = singular[0] * singular[0];
    let floor = 8.0 * f64::EPSILON * grid.nx.max(grid.n_big_x) as f64;
    Ok(SchmidtSpectrum {
        truncation_estimate: (s0 - coarse[0] * coarse[0]).abs() + floor,
        singular_values: singular,
    })
}

/// Eigenvalues (descending) of the reduced operator on one side, built from
/// the sampled amplitude as `ψ†ψ` or `ψψ†` and solved as a Hermitian
/// eigenproblem.
pub fn reduced_density_eigenvalues<W: TwoBodyWave + ?Sized>(
    state: &W,
    grid: &GridSpec,
    side: Side,
) -> Result<Vec<f64>> {
    grid.validate_for(&[state.shape()])?;
    let psi = sample_matrix(state, grid);
    let rho = match side {
        Side::Particle => psi.adjoint() * &psi,
        Side::Wall => &psi * psi.adjoint(),
    };
    super::kernel::hermitian_eigenvalues(rho)
}
