//! Thermal packet sizes and collision budgets, in SI units.
//!
//! The packet size that minimizes decoherence for a body of mass `μ` at
//! temperature `T` is taken as `σ_μ = ħ/√(μ k_B T)` with proportionality
//! constant 1. All outputs are order-of-magnitude estimates.

use crate::error::{domain, ensure_positive, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light, m/s (exact).
pub const C: f64 = 299_792_458.0;

/// `ħ/(μc)` in meters.
pub fn compton_wavelength(mu: f64) -> Result<f64> {
    ensure_positive("mass mu", mu)?;
    Ok(HBAR / (mu * C))
}

/// `ħc/(k_B T)` in meters.
pub fn thermal_length(temperature: f64) -> Result<f64> {
    ensure_positive("temperature T", temperature)?;
    Ok(HBAR * C / (K_B * temperature))
}

/// `σ_μ = ħ/√(μ k_B T)` in meters.
pub fn thermal_spread(mu: f64, temperature: f64) -> Result<f64> {
    ensure_positive("mass mu", mu)?;
    ensure_positive("temperature T", temperature)?;
    Ok(HBAR / (mu * K_B * temperature).sqrt())
}

/// Equipartition wavenumber `k = √(μ k_B T)/ħ` from `ħ²k²/2μ = k_B T/2`.
pub fn thermal_wavenumber(mu: f64, temperature: f64) -> Result<f64> {
    ensure_positive("mass mu", mu)?;
    ensure_positive("temperature T", temperature)?;
    Ok((mu * K_B * temperature).sqrt() / HBAR)
}

/// `kσ` with both factors from [`thermal_wavenumber`] and
/// [`thermal_spread`]. Equal to 1 up to rounding for every `(μ, T)`.
pub fn thermal_k_sigma(mu: f64, temperature: f64) -> Result<f64> {
    Ok(thermal_wavenumber(mu, temperature)? * thermal_spread(mu, temperature)?)
}

/// Thermal design numbers for one body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalDesign {
    /// kg.
    pub mu: f64,
    /// K.
    pub temperature: f64,
    /// m.
    pub sigma_mu: f64,
    /// `ħ/μc`, m.
    pub compton_wavelength: f64,
    /// `ħc/k_B T`, m.
    pub thermal_length: f64,
    pub k_sigma_est: f64,
}

impl ThermalDesign {
    pub fn new(mu: f64, temperature: f64) -> Result<Self> {
        Ok(Self {
            mu,
            temperature,
            sigma_mu: thermal_spread(mu, temperature)?,
            compton_wavelength: compton_wavelength(mu)?,
            thermal_length: thermal_length(temperature)?,
            k_sigma_est: thermal_k_sigma(mu, temperature)?,
        })
    }

    /// `√(λ_C L_T)`, which equals `σ_μ`.
    pub fn geometric_mean(&self) -> f64 {
        (self.compton_wavelength * self.thermal_length).sqrt()
    }
}

/// Unentangled amplitude left after a run of independent collisions.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionBudget {
    pub f0_per_collision: Vec<f64>,
    pub n: usize,
    /// `Π √F₀ᵢ`.
    pub amplitude: f64,
    /// `ln(1/2)/ln √F₀` for identical collisions; `None` when `F₀ = 1` or
    /// the collisions differ.
    pub half_amplitude_collisions: Option<f64>,
}

fn check_f0(f0: f64) -> Result<()> {
    if f0 > 0.0 && f0 <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("largest eigenvalue F0 must lie in (0, 1], got {f0}")))
    }
}

pub fn amplitude_budget(f0s: &[f64]) -> Result<CollisionBudget> {
    for &f in f0s {
        check_f0(f)?;
    }
    let identical = f0s.windows(2).all(|w| w[0] == w[1]);
    Ok(CollisionBudget {
        f0_per_collision: f0s.to_vec(),
        n: f0s.len(),
        amplitude: f0s.iter().map(|f| f.sqrt()).product(),
        half_amplitude_collisions: f0s
            .first()
            .filter(|_| identical)
            .and_then(|&f| half_amplitude_collisions(f)),
    })
}

/// `n` identical collisions: amplitude `F₀^{n/2}`.
pub fn amplitude_budget_uniform(f0: f64, n: usize) -> Result<CollisionBudget> {
    check_f0(f0)?;
    Ok(CollisionBudget {
        f0_per_collision: vec![f0; n],
        n,
        amplitude: f0.powf(0.5 * n as f64),
        half_amplitude_collisions: half_amplitude_collisions(f0),
    })
}

fn half_amplitude_collisions(f0: f64) -> Option<f64> {
    (f0 < 1.0).then(|| 0.5f64.ln() / (0.5 * f0.ln()))
}

/// Wall recoil momentum relative to the usual fixed-wall transfer,
/// `√(m/M)`, when the spreads are matched.
pub fn backaction_ratio(particle_mass: f64, wall_mass: f64) -> Result<f64> {
    ensure_positive("particle mass m", particle_mass)?;
    ensure_positive("wall mass M", wall_mass)?;
    Ok((particle_mass / wall_mass).sqrt())
}
