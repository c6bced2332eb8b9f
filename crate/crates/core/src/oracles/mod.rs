//! Independent brute-force checks of the closed forms.
//!
//! Everything here works from sampled wave functions: tensor-product
//! quadrature of overlaps, singular values of the sampled two-body amplitude,
//! dense eigensolves of discretized kernels, and exact evolution with the
//! image propagator compared against FFT free evolution.

mod dump;
mod fft;
mod grid;
mod kernel;
mod overlap;
mod propagate;
mod quadrature;
mod schmidt;

pub use dump::write_matrix_csv;
pub use fft::{free_evolve, mean_momentum};
pub use grid::{Axis, GridSpec, Rule};
pub use kernel::{
    discretized_kernel_eigenvalues, kernel_eigensolve, oscillator_kernel_eigensolve,
    reduced_kernel_quadrature,
};
pub use overlap::{quadrature_overlap, Overlap};
pub use propagate::{
    compare_reflection, image_propagate, separation_check, ComReflectedState, Frame, FreePacket,
    ImageSolution, PropagatedWave, PropagatorSetup, ReflectionComparison, SEPARATION_LIMIT,
};
pub use quadrature::gauss_legendre;
pub use schmidt::{
    reduced_density_eigenvalues, sample_matrix, schmidt_decompose, singular_values, SchmidtSpectrum,
    Side,
};
