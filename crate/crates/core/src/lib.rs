//! Error and decoherence bounds for a light particle bouncing elastically off
//! a heavy, quantum-mechanical wall.
//!
//! Both bodies start in Gaussian packets. The collision reverses the relative
//! coordinate, which in general entangles the particle with the wall and also
//! distorts the outgoing particle packet relative to the fixed-wall
//! idealization. The crate provides
//!
//! * [`kinematics`]: mass fractions, center-of-mass coordinates and the pre-
//!   and post-collision wave functions,
//! * [`error_analysis`]: the overlap with the idealized outgoing state and its
//!   optimization over the spread ratio,
//! * [`entanglement`]: the reduced kernel, its geometric spectrum and the
//!   largest-eigenvalue entanglement measure,
//! * [`oracles`]: brute-force quadrature, Schmidt decomposition, dense
//!   eigensolves and exact image-propagator evolution used to cross-check the
//!   closed forms,
//! * [`thermal`]: thermal packet sizes, equipartition estimates and
//!   multi-collision amplitude budgets.
//!
//! Internally `ħ = 1` and masses and lengths are dimensionless model units;
//! only [`thermal`] works in SI.

pub mod entanglement;
pub mod error;
pub mod error_analysis;
pub mod kinematics;
pub mod optimize;
pub mod oracles;
pub mod thermal;

pub use error::{Error, Result};
pub use kinematics::{
    CollisionParams, ComCoordinates, GaussianProductState, GaussianShape, IdealReflectedState,
    PostCollisionState, TwoBodyWave,
};
pub use num_complex::Complex64;
