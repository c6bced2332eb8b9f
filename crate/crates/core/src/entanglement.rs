//! Decoherence: the reduced kernel of the outgoing state and its spectrum.
//!
//! Integrating the wall coordinate out of `Ψ_F` gives
//!
//! `F(x', x) = √(2ωΩ/πD) exp{-(x² + x'²) ωΩ/D - (x - x')² E²/D + ik(1-2γ)(x - x')}`
//!
//! with `D = Ω(γ-δ)² + 4ωγ²`, `ρ = |(γ-δ)(Ωδ - ωγ)|` and `E² = 2ρ²`. Up to a
//! constant this is the harmonic-oscillator (Mehler) kernel, so its spectrum
//! is geometric: `F_n = (1 - e^{-u}) e^{-nu}` with `sinh(u/2) = w/2` and
//! `w = √(ωΩ)/ρ`. The entanglement measure is `1 - F_0 = z²`, `z = e^{-u/2}`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, ensure_positive, Error, Result};
use crate::kinematics::{CollisionParams, PostCollisionState};
use crate::oracles::{schmidt_decompose, GridSpec};

/// Default number of spectrum entries reported.
pub const DEFAULT_SPECTRUM_LEN: usize = 64;

/// `asinh` through `ln(1 + t + t²/(1 + √(1 + t²)))`, with a series for tiny
/// arguments.
pub fn arcsinh(t: f64) -> f64 {
    let a = t.abs();
    let r = if a < 1e-4 {
        let t2 = a * a;
        a * (1.0 - t2 / 6.0 + 3.0 * t2 * t2 / 40.0)
    } else if a > 1e150 {
        a.ln() + std::f64::consts::LN_2
    } else {
        (a + a * a / (1.0 + a.hypot(1.0))).ln_1p()
    };
    r.copysign(t)
}

/// Spectral parameter of the reduced kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// `ρ = 0`: the outgoing state is a product, `w = ∞`, `F_0 = 1`.
    Matched,
    /// Finite `w > 0` with `u = 2 asinh(w/2)` and `z = e^{-u/2}`.
    Finite { w: f64, u: f64, z: f64 },
}

impl Coupling {
    pub fn from_w(w: f64) -> Result<Self> {
        if w.is_nan() || w < 0.0 {
            return Err(domain(format!("w must be non-negative, got {w}")));
        }
        if w.is_infinite() {
            return Ok(Coupling::Matched);
        }
        let u = 2.0 * arcsinh(0.5 * w);
        // √(w²/4 + 1) - w/2 written without cancellation
        let z = 1.0 / ((0.25 * w * w + 1.0).sqrt() + 0.5 * w);
        Ok(Coupling::Finite { w, u, z })
    }

    pub fn is_matched(&self) -> bool {
        matches!(self, Coupling::Matched)
    }

    /// `w`, infinite when matched.
    pub fn w(&self) -> f64 {
        match *self {
            Coupling::Matched => f64::INFINITY,
            Coupling::Finite { w, .. } => w,
        }
    }

    pub fn u(&self) -> f64 {
        match *self {
            Coupling::Matched => f64::INFINITY,
            Coupling::Finite { u, .. } => u,
        }
    }

    pub fn z(&self) -> f64 {
        match *self {
            Coupling::Matched => 0.0,
            Coupling::Finite { z, .. } => z,
        }
    }

    /// `F_0 = 1 - z² = 1 - e^{-u}`.
    pub fn largest_eigenvalue(&self) -> f64 {
        match *self {
            Coupling::Matched => 1.0,
            Coupling::Finite { u, .. } => -(-u).exp_m1(),
        }
    }

    /// `1 - F_0 = z²`.
    pub fn measure(&self) -> f64 {
        let z = self.z();
        z * z
    }
}

/// Invariants of the reduced kernel of a post-collision state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// `D = Ω(γ-δ)² + 4ωγ²`.
    pub d: f64,
    /// `ρ = |(γ-δ)(Ωδ - ωγ)|`.
    pub rho: f64,
    pub coupling: Coupling,
}

pub fn kernel_params(state: &PostCollisionState) -> KernelParams {
    let (d, g) = (state.particle_fraction, state.wall_fraction);
    let (om_w, om_p) = (state.wall_coeff, state.particle_coeff);
    let asym = g - d;
    let kernel_d = om_w * asym * asym + 4.0 * om_p * g * g;
    let mismatch = om_w * d - om_p * g;
    let rho = (asym * mismatch).abs();
    // Ωδ - ωγ is only known to a few ulps of its terms
    let resolution = 4.0 * f64::EPSILON * asym.abs() * (om_w * d + om_p * g);
    let w = (om_w * om_p).sqrt() / rho;
    let coupling = if rho <= resolution || !w.is_finite() {
        Coupling::Matched
    } else {
        Coupling::from_w(w).expect("w is positive")
    };
    KernelParams {
        d: kernel_d,
        rho,
        coupling,
    }
}

/// Closed-form reduced kernel `F(x', x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedKernel {
    pub prefactor: f64,
    /// Coefficient of `(x² + x'²)`: `ωΩ/D`.
    pub diagonal_coeff: f64,
    /// Coefficient of `(x - x')²`: `E²/D`.
    pub offdiagonal_coeff: f64,
    /// Phase slope `k(1 - 2γ)`.
    pub phase_slope: f64,
}

impl ReducedKernel {
    /// Kernel with `E² = 2ρ²`.
    pub fn new(state: &PostCollisionState) -> Self {
        Self::with_offdiagonal_factor(state, 2.0)
    }

    /// Kernel with `E² = factor · ρ²`; only `factor = 2` is the true kernel.
    pub fn with_offdiagonal_factor(state: &PostCollisionState, factor: f64) -> Self {
        let kp = kernel_params(state);
        let om = state.wall_coeff * state.particle_coeff;
        Self {
            prefactor: (2.0 * om / (PI * kp.d)).sqrt(),
            diagonal_coeff: om / kp.d,
            offdiagonal_coeff: factor * kp.rho * kp.rho / kp.d,
            phase_slope: state.k * (1.0 - 2.0 * state.wall_fraction),
        }
    }

    /// `F(x', x)`; Hermitian, `F(x', x) = conj F(x, x')`.
    pub fn eval(&self, x_prime: f64, x: f64) -> Complex64 {
        let diff = x - x_prime;
        let mag = self.prefactor
            * (-(x * x + x_prime * x_prime) * self.diagonal_coeff - diff * diff * self.offdiagonal_coeff).exp();
        Complex64::from_polar(mag, self.phase_slope * diff)
    }
}

pub fn reduced_kernel_eval(state: &PostCollisionState, x: f64, x_prime: f64) -> Complex64 {
    ReducedKernel::new(state).eval(x_prime, x)
}

/// `F_0 = 1 - z²` for `w ≥ 0`; `w = ∞` means matched.
pub fn largest_eigenvalue(w: f64) -> Result<f64> {
    Ok(Coupling::from_w(w)?.largest_eigenvalue())
}

/// First `n` eigenvalues `F_k = (1 - e^{-u}) e^{-ku}`.
pub fn spectrum(w: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(domain("spectrum length must be at least 1"));
    }
    let coupling = Coupling::from_w(w)?;
    if w == 0.0 {
        return Err(Error::Domain(
            "w = 0 gives u = 0: the kernel has no normalizable spectrum".into(),
        ));
    }
    Ok(spectrum_of(&coupling, n))
}

fn spectrum_of(coupling: &Coupling, n: usize) -> Vec<f64> {
    match *coupling {
        Coupling::Matched => {
            let mut s = vec![0.0; n];
            s[0] = 1.0;
            s
        }
        Coupling::Finite { u, .. } => {
            let f0 = -(-u).exp_m1();
            (0..n).map(|k| f0 * (-(k as f64) * u).exp()).collect()
        }
    }
}

/// Eigenvalues `G_k = e^{-u(k + 1/2)}` of the oscillator kernel
/// `G(x, y) = √(β/π sinh u) exp[-β((x² + y²) cosh u - 2xy)/sinh u]`,
/// independent of `β`.
pub fn oscillator_kernel_spectrum(beta: f64, u: f64, n: usize) -> Result<Vec<f64>> {
    ensure_positive("beta", beta)?;
    ensure_positive("u", u)?;
    Ok((0..n).map(|k| (-u * (k as f64 + 0.5)).exp()).collect())
}

pub fn oscillator_kernel_eval(beta: f64, u: f64, x: f64, y: f64) -> f64 {
    let s = u.sinh();
    (beta / (PI * s)).sqrt() * (-beta / s * ((x * x + y * y) * u.cosh() - 2.0 * x * y)).exp()
}

/// Largest eigenvalue, measure and leading spectrum of a post-collision state.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub kernel: KernelParams,
    pub f0: f64,
    pub measure: f64,
    pub spectrum_prefix: Vec<f64>,
    /// Total weight beyond the reported prefix, `e^{-nu}`.
    pub tail_bound: f64,
}

impl EntanglementReport {
    pub fn new(state: &PostCollisionState, n: usize) -> Self {
        let kernel = kernel_params(state);
        let n = n.max(1);
        EntanglementReport {
            kernel,
            f0: kernel.coupling.largest_eigenvalue(),
            measure: kernel.coupling.measure(),
            spectrum_prefix: spectrum_of(&kernel.coupling, n),
            tail_bound: (-(n as f64) * kernel.coupling.u()).exp(),
        }
    }

    pub fn u(&self) -> f64 {
        self.kernel.coupling.u()
    }
}

/// `1 - F_0` in `[0, 1)`.
pub fn entanglement_measure(state: &PostCollisionState) -> f64 {
    kernel_params(state).coupling.measure()
}

/// Wall spread `Σ = σ√(δ/γ)` that makes the collision disentangling.
pub fn optimal_spreads(particle_spread: f64, params: &CollisionParams) -> Result<f64> {
    ensure_positive("particle spread sigma", particle_spread)?;
    Ok(particle_spread * params.matched_ratio().sqrt())
}

/// Whether the numerically extracted `F_0` is the same with the state's `k`
/// and with `k = 0`, within `tol`.
pub fn k_independence_check(state: &PostCollisionState, base_n: usize, tol: f64) -> Result<bool> {
    let f0 = |s: &PostCollisionState| -> Result<f64> {
        let grid = GridSpec::covering(&[crate::TwoBodyWave::shape(s)], base_n)?;
        Ok(schmidt_decompose(s, &grid)?.largest_weight())
    };
    if state.k == 0.0 {
        return Ok(true);
    }
    Ok((f0(state)? - f0(&state.with_k(0.0))?).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::GaussianProductState;
    use approx::assert_relative_eq;

    fn unit_state(delta: f64) -> PostCollisionState {
        GaussianProductState::new(1.0, 1.0, 0.0)
            .unwrap()
            .after_collision(&CollisionParams::from_particle_fraction(delta).unwrap())
    }

    #[test]
    fn arcsinh_matches_std() {
        for t in [-3e5, -2.0, -1e-3, -1e-5, 0.0, 3e-7, 5e-5, 1e-4, 0.2, 1.0, 40.0, 1e9, 1e200] {
            assert_relative_eq!(arcsinh(t), f64::asinh(t), max_relative = 1e-15);
        }
    }

    #[test]
    fn equal_masses_are_matched() {
        let s = GaussianProductState::new(0.3, 2.0, 1.0)
            .unwrap()
            .after_collision(&CollisionParams::new(1.0, 1.0).unwrap());
        let kp = kernel_params(&s);
        assert_eq!(kp.rho, 0.0);
        assert!(kp.coupling.is_matched());
        assert_eq!(kp.coupling.largest_eigenvalue(), 1.0);
        assert_eq!(entanglement_measure(&s), 0.0);
    }

    #[test]
    fn matched_spreads_are_matched() {
        let p = CollisionParams::new(1.0, 100.0).unwrap();
        let big_sigma = optimal_spreads(1.0, &p).unwrap();
        // δ/γ = m/M exactly, so Σ = σ/10
        assert_relative_eq!(big_sigma, 0.1, max_relative = 1e-15);
        let s = GaussianProductState::new(big_sigma, 1.0, 4.0).unwrap().after_collision(&p);
        assert!((largest_eigenvalue(kernel_params(&s).coupling.w()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_spreads_example() {
        let s = unit_state(0.01);
        let kp = kernel_params(&s);
        let om = 0.25;
        assert_relative_eq!(kp.d, 4.8808 * om, max_relative = 1e-14);
        assert_relative_eq!(kp.rho, 0.9604 * om, max_relative = 1e-14);
        let w = kp.coupling.w();
        assert!((w - 1.04123).abs() < 1e-5);
        assert!((kp.coupling.largest_eigenvalue() - 0.6318).abs() < 1e-4);
        assert!((entanglement_measure(&s) - 0.3682).abs() < 1e-4);
        let spec = spectrum(w, 2).unwrap();
        assert!((kp.coupling.u() - 0.99916).abs() < 1e-5);
        assert!((spec[1] - 0.2326).abs() < 1e-4);
    }

    #[test]
    fn largest_eigenvalue_limits() {
        assert_eq!(largest_eigenvalue(f64::INFINITY).unwrap(), 1.0);
        assert_eq!(largest_eigenvalue(0.0).unwrap(), 0.0);
        assert!(largest_eigenvalue(-1.0).is_err());
        let w = 1e-4;
        assert_relative_eq!(largest_eigenvalue(w).unwrap() / w, 1.0, max_relative = 1e-4);
        let w = 1e4;
        assert_relative_eq!(1.0 - largest_eigenvalue(w).unwrap(), 1.0 / (w * w), max_relative = 1e-6);
    }

    #[test]
    fn spectrum_is_geometric_and_normalized() {
        let w = 1.04123;
        let spec = spectrum(w, 50).unwrap();
        let u = Coupling::from_w(w).unwrap().u();
        let sum: f64 = spec.iter().sum();
        assert!((sum - (1.0 - (-50.0 * u).exp())).abs() < 1e-12);
        for k in 0..20 {
            assert_relative_eq!(spec[k + 1] / spec[k], (-u).exp(), max_relative = 1e-12);
        }
        assert!(spectrum(0.0, 3).is_err());
        assert!(spectrum(1.0, 0).is_err());
    }

    #[test]
    fn coupling_identities_over_many_decades() {
        for i in 0..=120 {
            let w = 10f64.powf(-6.0 + 0.1 * i as f64);
            let c = Coupling::from_w(w).unwrap();
            assert_relative_eq!(c.z() * c.z(), (-c.u()).exp(), max_relative = 1e-12);
            assert_relative_eq!(2.0 * (0.5 * c.u()).sinh(), w, max_relative = 1e-12);
            assert!(c.z() > 0.0 && c.z() < 1.0);
        }
    }

    #[test]
    fn oscillator_spectrum() {
        let g = oscillator_kernel_spectrum(1.0, 1.0, 3).unwrap();
        assert!((g[0] - 0.60653).abs() < 1e-5);
        assert_eq!(
            oscillator_kernel_spectrum(0.1, 0.7, 5).unwrap(),
            oscillator_kernel_spectrum(10.0, 0.7, 5).unwrap()
        );
        assert!(oscillator_kernel_spectrum(0.0, 0.7, 5).is_err());
    }

    #[test]
    fn oscillator_trace() {
        // Gaussian integral of the diagonal vs. geometric sum of the spectrum
        let (beta, u): (f64, f64) = (0.8, 0.7);
        let diag_integral = (beta / (PI * u.sinh())).sqrt()
            * (PI * u.sinh() / (2.0 * beta * (u.cosh() - 1.0))).sqrt();
        let geometric = (-0.5 * u).exp() / (1.0 - (-u).exp());
        assert_relative_eq!(diag_integral, geometric, max_relative = 1e-13);
    }

    #[test]
    fn kernel_at_origin_and_hermiticity() {
        let s = GaussianProductState::new(0.8, 1.0, 1.7)
            .unwrap()
            .after_collision(&CollisionParams::new(1.0, 9.0).unwrap());
        let kern = ReducedKernel::new(&s);
        let kp = kernel_params(&s);
        let expected = (2.0 * s.wall_coeff * s.particle_coeff / (PI * kp.d)).sqrt();
        assert_relative_eq!(kern.eval(0.0, 0.0).re, expected, max_relative = 1e-15);
        for &(a, b) in &[(0.3, -1.2), (2.0, 0.5)] {
            assert!((kern.eval(a, b) - kern.eval(b, a).conj()).norm() < 1e-16);
        }
        // ∫ F(x, x) dx = 1
        let diag = kern.prefactor * (PI / (2.0 * kern.diagonal_coeff)).sqrt();
        assert_relative_eq!(diag, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn report_carries_tail_bound() {
        let r = EntanglementReport::new(&unit_state(0.01), DEFAULT_SPECTRUM_LEN);
        assert_eq!(r.spectrum_prefix.len(), 64);
        let sum: f64 = r.spectrum_prefix.iter().sum();
        assert_relative_eq!(sum + r.tail_bound, 1.0, max_relative = 1e-14);
        assert_eq!(r.f0, r.spectrum_prefix[0]);
    }
}
