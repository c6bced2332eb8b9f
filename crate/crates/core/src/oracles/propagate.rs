use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::kinematics::{CollisionParams, GaussianProductState, GaussianShape, PostCollisionState, TwoBodyWave};

use super::fft::free_evolve;
use super::grid::{GridSpec, Rule};
use super::schmidt::singular_values;

/// Largest traversal-to-spreading ratio for which the incoming and outgoing
/// waves count as separated.
pub const SEPARATION_LIMIT: f64 = 0.1;

/// A collision started with the particle packet at relative offset `x0 < 0`
/// from the wall and evolved for time `t` (`ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSetup {
    pub params: CollisionParams,
    pub initial: GaussianProductState,
    pub x0: f64,
    pub t: f64,
}

impl PropagatorSetup {
    pub fn new(params: CollisionParams, initial: GaussianProductState, x0: f64, t: f64) -> Result<Self> {
        if !(x0 < 0.0 && x0.is_finite()) {
            return Err(domain(format!("initial offset x0 must be negative and finite, got {x0}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(domain(format!("time t must be non-negative and finite, got {t}")));
        }
        if !(initial.k() > 0.0) {
            return Err(domain(format!(
                "packet must move toward the wall (k > 0), got k = {}",
                initial.k()
            )));
        }
        Ok(Self {
            params,
            initial,
            x0,
            t,
        })
    }

    /// Setup stopped when the relative coordinate is back at `x0`, the
    /// instant at which the outgoing packet mirrors the incoming one.
    pub fn at_return(params: CollisionParams, initial: GaussianProductState, x0: f64) -> Result<Self> {
        let t = 2.0 * x0.abs() * params.particle_mass() / initial.k();
        Self::new(params, initial, x0, t)
    }

    pub fn reflected_state(&self) -> PostCollisionState {
        self.initial.after_collision(&self.params)
    }

    /// Center of the mirrored source, `reflect(x0, 0)`.
    pub fn image_center(&self) -> [f64; 2] {
        let (x, big_x) = self.params.reflect(self.x0, 0.0);
        [x, big_x]
    }

    /// Group velocities `[K_x/m, K_X/M]` of the outgoing wave.
    pub fn outgoing_velocity(&self) -> [f64; 2] {
        let k = self.reflected_state().shape().carrier;
        [k[0] / self.params.particle_mass(), k[1] / self.params.wall_mass()]
    }

    /// Largest factor by which either packet has spread at time `t`.
    pub fn spreading_factor(&self) -> f64 {
        let tau = |mass: f64, s: f64| self.t / (2.0 * mass * s * s);
        let tp = tau(self.params.particle_mass(), self.initial.particle_spread());
        let tw = tau(self.params.wall_mass(), self.initial.wall_spread());
        (1.0 + tp.max(tw).powi(2)).sqrt()
    }

    /// Co-moving window for the outgoing wave: the covering grid of the
    /// demodulated outgoing state, widened and densified by the spreading
    /// factor.
    pub fn window(&self, base_n: usize) -> Result<GridSpec> {
        let f = self.spreading_factor();
        let g = GridSpec::covering(&[self.reflected_state().with_k(0.0).shape()], base_n)?.widened(f);
        let scale = |n: usize| (n as f64 * f).ceil() as usize;
        let g = GridSpec {
            nx: scale(g.nx),
            n_big_x: scale(g.n_big_x),
            ..g
        };
        if g.nx.max(g.n_big_x) > GridSpec::MAX_POINTS {
            return Err(Error::Config(format!(
                "spreading factor {f:.3} pushes the window past {} points",
                GridSpec::MAX_POINTS
            )));
        }
        Ok(g)
    }
}

/// Traversal time over spreading time for the relative coordinate,
/// `(|x0| μ/k) / (2 μ σ_rel²)` with `σ_rel² = σ² + Σ²`.
pub fn separation_check(setup: &PropagatorSetup) -> Result<f64> {
    let k = setup.initial.k();
    if k == 0.0 {
        return Err(domain("k = 0: the packet never reaches the wall"));
    }
    let mu = setup.params.reduced_mass();
    let rel_var = setup.initial.particle_spread().powi(2) + setup.initial.wall_spread().powi(2);
    let traversal = setup.x0.abs() * mu / k.abs();
    let spreading = 2.0 * mu * rel_var;
    Ok(traversal / spreading)
}

/// A free 1-D Gaussian packet of initial width `spread` centered at
/// `center` with wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreePacket {
    pub mass: f64,
    pub spread: f64,
    pub center: f64,
    pub k: f64,
}

impl FreePacket {
    /// Closed-form free evolution
    /// `(2πs²)^{-1/4} (1+iτ)^{-1/2} exp([-y²/4s² + iky - iτs²k²]/(1+iτ))`
    /// with `y` measured from the initial center and `τ = t/2ms²`.
    pub fn eval(&self, y: f64, t: f64) -> Complex64 {
        let s2 = self.spread * self.spread;
        let tau = t / (2.0 * self.mass * s2);
        let one = Complex64::new(1.0, tau);
        let d = y - self.center;
        let exponent = Complex64::new(-d * d / (4.0 * s2), self.k * d - tau * s2 * self.k * self.k) / one;
        (2.0 * std::f64::consts::PI * s2).powf(-0.25) * exponent.exp() / one.sqrt()
    }
}

/// The exact hard-wall solution by images: free evolution of the product
/// packet minus its mirror image, restricted to the physical side `x ≤ X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSolution {
    pub params: CollisionParams,
    pub particle: FreePacket,
    pub wall: FreePacket,
    pub t: f64,
}

impl ImageSolution {
    pub fn new(setup: &PropagatorSetup) -> Self {
        ImageSolution {
            params: setup.params,
            particle: FreePacket {
                mass: setup.params.particle_mass(),
                spread: setup.initial.particle_spread(),
                center: setup.x0,
                k: setup.initial.k(),
            },
            wall: FreePacket {
                mass: setup.params.wall_mass(),
                spread: setup.initial.wall_spread(),
                center: 0.0,
                k: 0.0,
            },
            t: setup.t,
        }
    }

    pub fn direct(&self, x: f64, big_x: f64) -> Complex64 {
        self.particle.eval(x, self.t) * self.wall.eval(big_x, self.t)
    }

    /// The mirrored term. The free kinetic energy is invariant under the
    /// collision map, so the image of the evolved source is the evolved image.
    pub fn image(&self, x: f64, big_x: f64) -> Complex64 {
        let (xr, big_xr) = self.params.reflect(x, big_x);
        self.direct(xr, big_xr)
    }

    pub fn amplitude(&self, x: f64, big_x: f64) -> Complex64 {
        if x <= big_x {
            self.direct(x, big_x) - self.image(x, big_x)
        } else {
            Complex64::default()
        }
    }
}

/// Lab position `center + r'` of window offsets `r'`, and the carrier removed
/// from samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub center: [f64; 2],
    pub carrier: [f64; 2],
}

impl Frame {
    fn demodulation(&self, x: f64, big_x: f64) -> Complex64 {
        Complex64::from_polar(1.0, -(self.carrier[0] * x + self.carrier[1] * big_x))
    }
}

/// Samples of the image solution on a co-moving window, rows indexed by `X`
/// and columns by `x`, with the outgoing carrier divided out.
#[derive(Debug, Clone)]
pub struct PropagatedWave {
    pub grid: GridSpec,
    pub frame: Frame,
    pub samples: DMatrix<Complex64>,
    pub separation_ratio: f64,
    pub warning: Option<String>,
}

/// Samples the image solution at time `t` on `grid`, read as offsets from
/// the outgoing packet's free-flight center `reflect(x0, 0) + v t`.
pub fn image_propagate(setup: &PropagatorSetup, grid: &GridSpec) -> Result<PropagatedWave> {
    grid.validate()?;
    let ratio = separation_check(setup)?;
    let c = setup.image_center();
    let v = setup.outgoing_velocity();
    let frame = Frame {
        center: [c[0] + v[0] * setup.t, c[1] + v[1] * setup.t],
        carrier: setup.reflected_state().shape().carrier,
    };
    let solution = ImageSolution::new(setup);
    let (xs, big_xs) = (grid.x_axis(), grid.big_x_axis());
    let samples = DMatrix::from_fn(big_xs.len(), xs.len(), |i, j| {
        let x = frame.center[0] + xs.nodes[j];
        let big_x = frame.center[1] + big_xs.nodes[i];
        solution.amplitude(x, big_x) * frame.demodulation(x, big_x)
    });
    let warning = (ratio >= SEPARATION_LIMIT).then(|| {
        format!(
            "separation ratio {ratio:.3} >= {SEPARATION_LIMIT}: incoming and outgoing waves may overlap"
        )
    });
    Ok(PropagatedWave {
        grid: *grid,
        frame,
        samples,
        separation_ratio: ratio,
        warning,
    })
}

/// The outgoing state built directly in center-of-mass form,
/// `Γ(R + δu) Φ(R - γu)`: the incoming product with `u` reversed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComReflectedState {
    pub initial: GaussianProductState,
    pub params: CollisionParams,
}

impl TwoBodyWave for ComReflectedState {
    fn amplitude(&self, x: f64, big_x: f64) -> Complex64 {
        let c = self.params.to_com(x, big_x);
        let (d, g) = (self.params.particle_fraction(), self.params.wall_fraction());
        self.initial.wall_packet(c.center + d * c.relative) * self.initial.particle_packet(c.center - g * c.relative)
    }

    fn shape(&self) -> GaussianShape {
        self.initial.after_collision(&self.params).shape()
    }
}

/// Image-propagated wave against a freely evolved static reference.
#[derive(Debug, Clone)]
pub struct ReflectionComparison {
    /// `‖ψ - e^{iθ} ψ_ref‖` with `θ` maximizing the real overlap.
    pub l2_error: f64,
    /// `|⟨ψ_ref|ψ⟩| / (‖ψ_ref‖ ‖ψ‖)`.
    pub overlap: f64,
    pub separation_ratio: f64,
    /// Largest Schmidt weight of the propagated wave.
    pub schmidt_f0: f64,
    pub warning: Option<String>,
    pub grid: GridSpec,
}

/// Evolves `reference` (an outgoing state centered at the origin) freely by
/// FFT from the mirrored source position for time `t`, and compares it with
/// the image-method solution on the same co-moving window.
pub fn compare_reflection<W: TwoBodyWave + ?Sized>(
    setup: &PropagatorSetup,
    reference: &W,
    grid: &GridSpec,
) -> Result<ReflectionComparison> {
    if grid.rule != Rule::Trapezoid {
        return Err(Error::Config("FFT evolution needs an equally spaced grid".into()));
    }
    let propagated = image_propagate(setup, grid)?;
    let (xs, big_xs) = (grid.x_axis(), grid.big_x_axis());
    let h = [xs.spacing().unwrap_or(0.0), big_xs.spacing().unwrap_or(0.0)];
    let k_ref = reference.shape().carrier;
    let mut expected = DMatrix::from_fn(big_xs.len(), xs.len(), |i, j| {
        let (x, big_x) = (xs.nodes[j], big_xs.nodes[i]);
        reference.amplitude(x, big_x) * Complex64::from_polar(1.0, -(k_ref[0] * x + k_ref[1] * big_x))
    });
    free_evolve(
        &mut expected,
        h,
        [setup.params.particle_mass(), setup.params.wall_mass()],
        setup.t,
    );

    let w = h[0] * h[1];
    let actual = &propagated.samples;
    let inner: Complex64 = expected.iter().zip(actual.iter()).map(|(e, a)| e.conj() * a).sum::<Complex64>() * w;
    let norm = |m: &DMatrix<Complex64>| (m.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt();
    let phase = Complex64::from_polar(1.0, inner.arg());
    let l2_error = (expected
        .iter()
        .zip(actual.iter())
        .map(|(e, a)| (a - phase * e).norm_sqr())
        .sum::<f64>()
        * w)
        .sqrt();

    let s = singular_values(&actual.map(|z| z * w.sqrt()))?;
    let total: f64 = s.iter().map(|v| v * v).sum();
    Ok(ReflectionComparison {
        l2_error,
        overlap: inner.norm() / (norm(&expected) * norm(actual)),
        separation_ratio: propagated.separation_ratio,
        schmidt_f0: s[0] * s[0] / total,
        warning: propagated.warning,
        grid: *grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::kernel_params;
    use crate::kinematics::gaussian_packet;
    use crate::oracles::mean_momentum;

    fn setup(m: f64, big_m: f64, sigma: f64, big_sigma: f64, x0: f64, k: f64) -> PropagatorSetup {
        PropagatorSetup::at_return(
            CollisionParams::new(m, big_m).unwrap(),
            GaussianProductState::new(big_sigma, sigma, k).unwrap(),
            x0,
        )
        .unwrap()
    }

    #[test]
    fn separation_examples() {
        let s = |sigma: f64, ks: f64, x0: f64| {
            separation_check(&setup(1.0, 3.0, sigma, sigma, x0, ks / sigma)).unwrap()
        };
        assert!(s(1.0, 1e6, -10.0) < 1e-5);
        let (fast, slow) = (s(1.0, 5.0, -10.0), s(1.0, 0.5, -10.0));
        assert!(fast < 1.0 && slow > 1.0);
        // doubling σ at fixed kσ: fixed x0 halves the ratio, fixed x0/σ leaves it alone
        assert!((s(2.0, 5.0, -10.0) / fast - 0.5).abs() < 1e-14);
        assert!((s(2.0, 5.0, -20.0) / fast - 1.0).abs() < 1e-14);
        let mut zero = setup(1.0, 3.0, 1.0, 1.0, -5.0, 1.0);
        zero.initial = GaussianProductState::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(separation_check(&zero), Err(Error::Domain(_))));
        assert!(PropagatorSetup::new(zero.params, zero.initial, -5.0, 1.0).is_err());
        assert!(PropagatorSetup::new(zero.params, GaussianProductState::new(1.0, 1.0, 1.0).unwrap(), 2.0, 1.0).is_err());
    }

    #[test]
    fn free_packet_starts_as_the_initial_packet() {
        let p = FreePacket {
            mass: 2.0,
            spread: 0.7,
            center: -1.0,
            k: 3.0,
        };
        for y in [-3.0, -1.0, 0.4] {
            let want = Complex64::from_polar(gaussian_packet(0.7, y + 1.0), 3.0 * (y + 1.0));
            assert!((p.eval(y, 0.0) - want).norm() < 1e-15);
        }
        let h = 0.01;
        let norm: f64 = (0..4000).map(|i| p.eval(-20.0 + h * i as f64, 5.0).norm_sqr() * h).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn image_solution_vanishes_at_contact() {
        let sol = ImageSolution::new(&setup(1.0, 4.0, 1.0, 0.7, -3.0, 2.0));
        for r in [-1.0, 0.3, 2.0] {
            assert!(sol.amplitude(r, r).norm() < 1e-15);
        }
    }

    #[test]
    fn com_route_matches_lab_formula() {
        let params = CollisionParams::new(1.0, 7.0).unwrap();
        let initial = GaussianProductState::new(0.6, 1.1, 1.7).unwrap();
        let com = ComReflectedState { initial, params };
        let lab = initial.after_collision(&params);
        for (x, big_x) in [(0.3, -0.2), (-1.5, 0.9), (2.0, 2.0)] {
            assert!((com.amplitude(x, big_x) - lab.amplitude(x, big_x)).norm() < 1e-14);
        }
    }

    #[test]
    fn reflected_wave_matches_outgoing_state() {
        let s = setup(1.0, 4.0, 1.0, 0.7, -12.0, 60.0);
        let grid = s.window(128).unwrap();
        let cmp = compare_reflection(&s, &s.reflected_state(), &grid).unwrap();
        assert!(cmp.separation_ratio < SEPARATION_LIMIT && cmp.warning.is_none());
        assert!(cmp.l2_error < 1e-3, "{}", cmp.l2_error);
        let f0 = kernel_params(&s.reflected_state()).coupling.largest_eigenvalue();
        assert!((cmp.schmidt_f0 - f0).abs() < 1e-3, "{} vs {f0}", cmp.schmidt_f0);
    }

    #[test]
    fn fixed_wall_limit() {
        let s = setup(1.0, 1e17, 1.0, 1e-7, -6.0, 30.0);
        let grid = s.window(128).unwrap();
        let cmp = compare_reflection(&s, &s.initial.ideal_reflected(), &grid).unwrap();
        assert!(cmp.l2_error < 1e-4, "{}", cmp.l2_error);
    }

    #[test]
    fn equal_masses_reverse_u() {
        let params = CollisionParams::new(1.0, 1.0).unwrap();
        let initial = GaussianProductState::new(1.0, 1.0, 40.0).unwrap();
        let s = PropagatorSetup::at_return(params, initial, -10.0).unwrap();
        let cmp = compare_reflection(&s, &ComReflectedState { initial, params }, &s.window(128).unwrap()).unwrap();
        assert!(cmp.overlap > 1.0 - 1e-3, "{}", cmp.overlap);
    }

    #[test]
    fn momentum_is_conserved() {
        let s = setup(1.0, 4.0, 1.0, 0.7, -12.0, 60.0);
        let grid = s.window(128).unwrap();
        let wave = image_propagate(&s, &grid).unwrap();
        let h = [grid.x_axis().spacing().unwrap(), grid.big_x_axis().spacing().unwrap()];
        let p = mean_momentum(&wave.samples, h);
        let total = p[0] + wave.frame.carrier[0] + p[1] + wave.frame.carrier[1];
        assert!((total - 60.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn slow_packets_carry_a_warning() {
        let s = setup(1.0, 4.0, 1.0, 1.0, -12.0, 2.0);
        let wave = image_propagate(&s, &s.window(64).unwrap()).unwrap();
        assert!(wave.warning.is_some());
    }
}
