//! Two-body parameterization and the Gaussian wave functions before and after
//! the collision.
//!
//! Coordinates: `x` is the particle position, `big_x` the wall position. The
//! center-of-mass transform is `R = (M X + m x) / (M + m)`, `u = x - X`, and a
//! hard-wall collision maps `u -> -u` at fixed `R`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, ensure_positive, Result};

/// Masses of the particle and the wall together with the mass fractions
/// `δ = m / (M + m)` and `γ = M / (M + m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionParams {
    particle_mass: f64,
    wall_mass: f64,
    total_mass: f64,
    particle_fraction: f64,
    wall_fraction: f64,
}

impl CollisionParams {
    pub fn new(particle_mass: f64, wall_mass: f64) -> Result<Self> {
        ensure_positive("particle mass m", particle_mass)?;
        ensure_positive("wall mass M", wall_mass)?;
        let total_mass = particle_mass + wall_mass;
        Ok(Self {
            particle_mass,
            wall_mass,
            total_mass,
            particle_fraction: particle_mass / total_mass,
            wall_fraction: wall_mass / total_mass,
        })
    }

    /// Parameters with total mass 1 and the given particle fraction `δ`.
    pub fn from_particle_fraction(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(domain(format!("mass fraction delta must lie in (0, 1), got {delta}")));
        }
        let mut p = Self::new(delta, 1.0 - delta)?;
        // keep the requested fraction bit-exact
        p.particle_fraction = delta;
        Ok(p)
    }

    pub fn particle_mass(&self) -> f64 {
        self.particle_mass
    }

    pub fn wall_mass(&self) -> f64 {
        self.wall_mass
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// `δ = m / (M + m)`.
    pub fn particle_fraction(&self) -> f64 {
        self.particle_fraction
    }

    /// `γ = M / (M + m)`.
    pub fn wall_fraction(&self) -> f64 {
        self.wall_fraction
    }

    /// `m M / (M + m)`, the mass of the relative coordinate.
    pub fn reduced_mass(&self) -> f64 {
        self.particle_mass * self.wall_fraction
    }

    /// The spread ratio `Σ²/σ² = δ/γ` at which the collision neither
    /// entangles nor (for `k = 0`) distorts the outgoing state.
    pub fn matched_ratio(&self) -> f64 {
        self.particle_fraction / self.wall_fraction
    }

    pub fn to_com(&self, x: f64, big_x: f64) -> ComCoordinates {
        ComCoordinates {
            center: self.wall_fraction * big_x + self.particle_fraction * x,
            relative: x - big_x,
        }
    }

    /// Inverse of [`to_com`](Self::to_com); returns `(x, X)`.
    pub fn from_com(&self, c: ComCoordinates) -> (f64, f64) {
        (
            c.center + self.wall_fraction * c.relative,
            c.center - self.particle_fraction * c.relative,
        )
    }

    /// Image of `(x, X)` under the collision map `u -> -u`.
    pub fn reflect(&self, x: f64, big_x: f64) -> (f64, f64) {
        let c = self.to_com(x, big_x);
        self.from_com(ComCoordinates {
            center: c.center,
            relative: -c.relative,
        })
    }
}

/// Center-of-mass position `R` and relative coordinate `u = x - X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComCoordinates {
    pub center: f64,
    pub relative: f64,
}

/// Shape of a two-dimensional Gaussian amplitude
/// `|Ψ(r)| ∝ exp(-(r - c)ᵀ A (r - c))` with `r = (x, X)`, plus the plane-wave
/// carrier of its phase. Used to size quadrature grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianShape {
    pub center: [f64; 2],
    /// Symmetric amplitude precision `A`, ordered `(x, X)`.
    pub precision: [[f64; 2]; 2],
    /// Carrier wavenumbers `(k_x, k_X)`.
    pub carrier: [f64; 2],
}

impl GaussianShape {
    /// Covariance of the probability density `|Ψ|²`, i.e. `(4A)⁻¹`.
    pub fn density_covariance(&self) -> [[f64; 2]; 2] {
        let [[a, b], [_, d]] = self.precision;
        let det = 4.0 * (a * d - b * b);
        [[d / det, -b / det], [-b / det, a / det]]
    }

    /// Standard deviations of the marginal densities in `x` and `X`.
    pub fn marginal_std(&self) -> [f64; 2] {
        let cov = self.density_covariance();
        [cov[0][0].sqrt(), cov[1][1].sqrt()]
    }

    /// Standard deviations of the conditional densities (the narrowest
    /// feature a grid line has to resolve).
    pub fn conditional_std(&self) -> [f64; 2] {
        [
            0.5 / self.precision[0][0].sqrt(),
            0.5 / self.precision[1][1].sqrt(),
        ]
    }

    pub fn translated(mut self, offset: [f64; 2]) -> Self {
        self.center[0] += offset[0];
        self.center[1] += offset[1];
        self
    }
}

/// A normalized two-body wave function `Ψ(x, X)`.
pub trait TwoBodyWave: Sync {
    fn amplitude(&self, x: f64, big_x: f64) -> Complex64;

    fn shape(&self) -> GaussianShape;
}

impl<T: TwoBodyWave + ?Sized> TwoBodyWave for &T {
    fn amplitude(&self, x: f64, big_x: f64) -> Complex64 {
        (**self).amplitude(x, big_x)
    }

    fn shape(&self) -> GaussianShape {
        (**self).shape()
    }
}

/// The uncorrelated initial state `Γ(X) Φ(x)`: a wall packet of width `Σ`
/// at rest and a particle packet of width `σ` with wavenumber `k`, both
/// centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProductState {
    wall_spread: f64,
    particle_spread: f64,
    k: f64,
}

impl GaussianProductState {
    pub fn new(wall_spread: f64, particle_spread: f64, k: f64) -> Result<Self> {
        ensure_positive("wall spread Sigma", wall_spread)?;
        ensure_positive("particle spread sigma", particle_spread)?;
        if !k.is_finite() {
            return Err(domain(format!("wavenumber k must be finite, got {k}")));
        }
        Ok(Self {
            wall_spread,
            particle_spread,
            k,
        })
    }

    pub fn wall_spread(&self) -> f64 {
        self.wall_spread
    }

    pub fn particle_spread(&self) -> f64 {
        self.particle_spread
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `Σ²/σ²`.
    pub fn spread_ratio(&self) -> f64 {
        (self.wall_spread / self.particle_spread).powi(2)
    }

    /// `kσ`.
    pub fn k_sigma(&self) -> f64 {
        self.k * self.particle_spread
    }

    /// Normalization `𝒩 = 1/(2πσΣ)` of the squared amplitude.
    pub fn norm(&self) -> f64 {
        1.0 / (2.0 * PI * self.particle_spread * self.wall_spread)
    }

    /// Normalized wall packet `Γ(X)`.
    pub fn wall_packet(&self, big_x: f64) -> f64 {
        gaussian_packet(self.wall_spread, big_x)
    }

    /// Normalized particle packet `Φ(x)`.
    pub fn particle_packet(&self, x: f64) -> Complex64 {
        Complex64::from_polar(gaussian_packet(self.particle_spread, x), self.k * x)
    }

    /// The fixed-wall idealization `Γ(X) Φ(-x)` of the outgoing state.
    pub fn ideal_reflected(&self) -> IdealReflectedState {
        IdealReflectedState { initial: *self }
    }

    pub fn after_collision(&self, params: &CollisionParams) -> PostCollisionState {
        PostCollisionState {
            wall_coeff: 0.25 / (self.wall_spread * self.wall_spread),
            particle_coeff: 0.25 / (self.particle_spread * self.particle_spread),
            particle_fraction: params.particle_fraction(),
            wall_fraction: params.wall_fraction(),
            k: self.k,
        }
    }
}

impl TwoBodyWave for GaussianProductState {
    fn amplitude(&self, x: f64, big_x: f64) -> Complex64 {
        self.particle_packet(x) * self.wall_packet(big_x)
    }

    fn shape(&self) -> GaussianShape {
        GaussianShape {
            center: [0.0, 0.0],
            precision: [
                [0.25 / self.particle_spread.powi(2), 0.0],
                [0.0, 0.25 / self.wall_spread.powi(2)],
            ],
            carrier: [self.k, 0.0],
        }
    }
}

/// `Ψ_test(x, X) = Γ(X) Φ(-x)`: what the outgoing state would be if the wall
/// were a fixed potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealReflectedState {
    initial: GaussianProductState,
}

impl TwoBodyWave for IdealReflectedState {
    fn amplitude(&self, x: f64, big_x: f64) -> Complex64 {
        self.initial.amplitude(-x, big_x)
    }

    fn shape(&self) -> GaussianShape {
        let mut shape = self.initial.shape();
        shape.carrier[0] = -shape.carrier[0];
        shape
    }
}

/// The outgoing state after the hard-wall collision, written in the lab
/// coordinates `(x, X)`:
///
/// `Ψ_F = √𝒩 exp{-Ω[X(1-2δ) + 2δx]² - ω[x(1-2γ) + 2γX]² + ik(x(1-2γ) + 2γX)}`
///
/// with `Ω = 1/4Σ²`, `ω = 1/4σ²` and `𝒩 = (2/π)√(Ωω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostCollisionState {
    /// `Ω = 1/(4Σ²)`.
    pub wall_coeff: f64,
    /// `ω = 1/(4σ²)`.
    pub particle_coeff: f64,
    /// `δ`.
    pub particle_fraction: f64,
    /// `γ`.
    pub wall_fraction: f64,
    pub k: f64,
}

impl PostCollisionState {
    pub fn new(initial: &GaussianProductState, params: &CollisionParams) -> Self {
        initial.after_collision(params)
    }

    pub fn norm(&self) -> f64 {
        2.0 / PI * (self.wall_coeff * self.particle_coeff).sqrt()
    }

    /// The same state with a different wavenumber.
    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    /// Arguments `(X(1-2δ) + 2δx, x(1-2γ) + 2γX)` of the wall and particle
    /// packets.
    pub fn packet_arguments(&self, x: f64, big_x: f64) -> (f64, f64) {
        let (d, g) = (self.particle_fraction, self.wall_fraction);
        (
            big_x * (1.0 - 2.0 * d) + 2.0 * d * x,
            x * (1.0 - 2.0 * g) + 2.0 * g * big_x,
        )
    }
}

impl TwoBodyWave for PostCollisionState {
    fn amplitude(&self, x: f64, big_x: f64) -> Complex64 {
        let (wall_arg, particle_arg) = self.packet_arguments(x, big_x);
        let envelope = self.norm().sqrt()
            * (-self.wall_coeff * wall_arg * wall_arg
                - self.particle_coeff * particle_arg * particle_arg)
                .exp();
        Complex64::from_polar(envelope, self.k * particle_arg)
    }

    fn shape(&self) -> GaussianShape {
        let (d, g) = (self.particle_fraction, self.wall_fraction);
        let (om_w, om_p) = (self.wall_coeff, self.particle_coeff);
        // wall argument = a X + b x, particle argument = c x + e X
        let (a, b, c, e) = (1.0 - 2.0 * d, 2.0 * d, 1.0 - 2.0 * g, 2.0 * g);
        let cross = om_w * a * b + om_p * c * e;
        GaussianShape {
            center: [0.0, 0.0],
            precision: [
                [om_w * b * b + om_p * c * c, cross],
                [cross, om_w * a * a + om_p * e * e],
            ],
            carrier: [self.k * c, self.k * e],
        }
    }
}

/// Normalized real Gaussian `(2πs²)^{-1/4} exp(-y²/4s²)`.
pub(crate) fn gaussian_packet(spread: f64, y: f64) -> f64 {
    (2.0 * PI * spread * spread).powf(-0.25) * (-y * y / (4.0 * spread * spread)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn mass_fractions() {
        let p = CollisionParams::new(1.0, 99.0).unwrap();
        assert_eq!(p.particle_fraction(), 0.01);
        assert_eq!(p.wall_fraction(), 0.99);
        let p = CollisionParams::new(1.0, 1.0).unwrap();
        assert_eq!((p.particle_fraction(), p.wall_fraction()), (0.5, 0.5));
        let p = CollisionParams::new(3.0, 7.0).unwrap();
        assert_relative_eq!(p.particle_fraction(), 0.3, max_relative = 1e-15);
        assert_relative_eq!(p.wall_fraction(), 0.7, max_relative = 1e-15);
    }

    #[test]
    fn rejects_non_positive_masses() {
        assert!(CollisionParams::new(0.0, 1.0).is_err());
        assert!(CollisionParams::new(1.0, -2.0).is_err());
        assert!(CollisionParams::new(f64::NAN, 1.0).is_err());
        assert!(CollisionParams::from_particle_fraction(1.0).is_err());
    }

    #[test]
    fn com_examples() {
        let eq = CollisionParams::new(2.0, 2.0).unwrap();
        assert_eq!(eq.to_com(1.0, 0.0), ComCoordinates { center: 0.5, relative: 1.0 });
        assert_eq!(eq.to_com(0.0, 0.0), ComCoordinates { center: 0.0, relative: 0.0 });
        let p = CollisionParams::new(1.0, 3.0).unwrap();
        let c = p.to_com(2.0, -1.0);
        assert_relative_eq!(c.center, -0.25, max_relative = 1e-15);
        assert_eq!(c.relative, 3.0);
    }

    #[test]
    fn initial_state_norm_and_errors() {
        let s = GaussianProductState::new(1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(s.norm(), 1.0 / (2.0 * PI), max_relative = 1e-15);
        assert!(GaussianProductState::new(0.0, 1.0, 0.0).is_err());
        assert!(GaussianProductState::new(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn equal_masses_swap_the_packets() {
        let s = GaussianProductState::new(0.4, 1.3, 2.0).unwrap();
        let f = s.after_collision(&CollisionParams::new(1.0, 1.0).unwrap());
        for &(x, big_x) in &[(0.3, -0.2), (-1.0, 0.7), (0.0, 0.0), (2.0, 1.5)] {
            let expected = s.particle_packet(big_x) * s.wall_packet(x);
            let got = f.amplitude(x, big_x);
            assert!((got - expected).norm() < 1e-14, "{got} vs {expected}");
        }
    }

    #[test]
    fn infinite_wall_mass_mirrors_about_the_wall() {
        // δ = 0 reflects the particle about the wall position: Γ(X) Φ(2X - x)
        let s = GaussianProductState::new(0.7, 1.1, 1.5).unwrap();
        let f = PostCollisionState {
            particle_fraction: 0.0,
            wall_fraction: 1.0,
            ..s.after_collision(&CollisionParams::new(1.0, 1.0).unwrap())
        };
        for &(x, big_x) in &[(0.3, -0.2), (-1.0, 0.7), (2.0, 1.5)] {
            let mirrored = s.wall_packet(big_x) * s.particle_packet(2.0 * big_x - x);
            assert!((f.amplitude(x, big_x) - mirrored).norm() < 1e-15);
        }
        // and is the fixed-wall state only once the wall packet is sharp
        let ideal = s.ideal_reflected();
        assert!((f.amplitude(0.3, 0.7) - ideal.amplitude(0.3, 0.7)).norm() > 1e-2);
    }

    fn sup_distance(f: &PostCollisionState, g: impl Fn(f64, f64) -> Complex64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..81 {
            for j in 0..81 {
                let x = -6.0 + 0.15 * i as f64;
                let big_x = -4.0 + 0.1 * j as f64;
                worst = worst.max((f.amplitude(x, big_x) - g(x, big_x)).norm());
            }
        }
        worst
    }

    #[test]
    fn approach_to_ideal_reflection_is_monotone() {
        // fixed spreads: Ψ_F tends to the wall-mirrored state
        let s = GaussianProductState::new(0.6, 1.0, 1.2).unwrap();
        let d = [1e-2, 1e-4, 1e-6].map(|delta| {
            let f = s.after_collision(&CollisionParams::from_particle_fraction(delta).unwrap());
            sup_distance(&f, |x, big_x| s.wall_packet(big_x) * s.particle_packet(2.0 * big_x - x))
        });
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
        assert!(d[2] < 1e-5);
        // matched spreads Σ² = σ²δ/γ: Ψ_F tends to Γ(X)Φ(-x) itself
        let d = [1e-2, 1e-4, 1e-6].map(|delta: f64| {
            let s = GaussianProductState::new((delta / (1.0 - delta)).sqrt(), 1.0, 1.2).unwrap();
            let f = s.after_collision(&CollisionParams::from_particle_fraction(delta).unwrap());
            let ideal = s.ideal_reflected();
            sup_distance(&f, |x, big_x| ideal.amplitude(x, big_x)) / f.norm().sqrt()
        });
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
        assert!(d[2] < 1e-4, "{d:?}");
    }

    #[test]
    fn ideal_reflected_examples() {
        let s = GaussianProductState::new(1.0, 1.0, 1.0).unwrap();
        let got = s.ideal_reflected().amplitude(1.0, 0.0);
        let expected = Complex64::from_polar(s.norm().sqrt() * (-0.25f64).exp(), -1.0);
        assert!((got - expected).norm() < 1e-15);

        let s0 = GaussianProductState::new(0.8, 1.7, 0.0).unwrap();
        for &(x, big_x) in &[(0.3, -0.2), (-1.0, 0.7)] {
            assert_eq!(s0.ideal_reflected().amplitude(x, big_x), s0.amplitude(x, big_x));
        }
    }

    #[test]
    fn shape_matches_amplitude() {
        let s = GaussianProductState::new(0.7, 1.2, 0.9).unwrap();
        let f = s.after_collision(&CollisionParams::new(1.0, 4.0).unwrap());
        let shape = f.shape();
        let a = shape.precision;
        let origin = f.amplitude(0.0, 0.0).norm();
        for &(x, big_x) in &[(0.3, -0.2), (-1.0, 0.7)] {
            let q = a[0][0] * x * x + 2.0 * a[0][1] * x * big_x + a[1][1] * big_x * big_x;
            assert_relative_eq!(f.amplitude(x, big_x).norm(), origin * (-q).exp(), max_relative = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn fractions_sum_to_one(m in 1e-6f64..1e6, big_m in 1e-6f64..1e6) {
            let p = CollisionParams::new(m, big_m).unwrap();
            prop_assert!((p.particle_fraction() + p.wall_fraction() - 1.0).abs() <= f64::EPSILON);
            prop_assert!(p.particle_fraction() > 0.0 && p.particle_fraction() < 1.0);
        }

        #[test]
        fn com_round_trip(m in 1e-3f64..1e3, big_m in 1e-3f64..1e3, x in -50f64..50.0, big_x in -50f64..50.0) {
            let p = CollisionParams::new(m, big_m).unwrap();
            let (x2, big_x2) = p.from_com(p.to_com(x, big_x));
            let scale = x.abs().max(big_x.abs()).max(1e-300);
            prop_assert!((x2 - x).abs() <= 1e-14 * scale);
            prop_assert!((big_x2 - big_x).abs() <= 1e-14 * scale);
        }

        #[test]
        fn equal_mass_state_factorizes(
            sig in 0.2f64..3.0, big_sig in 0.2f64..3.0, k in -5f64..5.0,
            x in -2f64..2.0, big_x in -2f64..2.0, x2 in -2f64..2.0, big_x2 in -2f64..2.0,
        ) {
            let s = GaussianProductState::new(big_sig, sig, k).unwrap();
            let f = s.after_collision(&CollisionParams::new(1.0, 1.0).unwrap());
            let lhs = f.amplitude(x, big_x).norm() * f.amplitude(x2, big_x2).norm();
            let rhs = f.amplitude(x, big_x2).norm() * f.amplitude(x2, big_x).norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs));
        }

        #[test]
        fn reflection_is_an_involution(m in 0.1f64..10.0, x in -5f64..5.0, big_x in -5f64..5.0) {
            let p = CollisionParams::new(m, 1.0).unwrap();
            let (rx, rbx) = p.reflect(x, big_x);
            let (x2, big_x2) = p.reflect(rx, rbx);
            prop_assert!((x2 - x).abs() < 1e-12 && (big_x2 - big_x).abs() < 1e-12);
        }
    }
}
