use crate::error::{Error, Result};
use crate::kinematics::GaussianShape;

use super::quadrature::gauss_legendre;

/// Quadrature rule along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    /// Equally spaced nodes with equal weights `h`. On 8-sigma extents the
    /// endpoint corrections of the trapezoid rule are below 1e-14.
    #[default]
    Trapezoid,
    GaussLegendre,
}

/// Tensor-product grid over `(x, X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub big_x_min: f64,
    pub big_x_max: f64,
    pub nx: usize,
    pub n_big_x: usize,
    pub rule: Rule,
}

/// Nodes and weights along one coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize, rule: Rule) -> Self {
        match rule {
            Rule::Trapezoid => {
                let h = (max - min) / (n - 1) as f64;
                Axis {
                    nodes: (0..n).map(|i| min + h * i as f64).collect(),
                    weights: vec![h; n],
                }
            }
            Rule::GaussLegendre => {
                let (x, w) = gauss_legendre(n);
                let (mid, half) = (0.5 * (min + max), 0.5 * (max - min));
                Axis {
                    nodes: x.iter().map(|t| mid + half * t).collect(),
                    weights: w.iter().map(|w| half * w).collect(),
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform spacing for trapezoid axes; `None` otherwise.
    pub fn spacing(&self) -> Option<f64> {
        let h = self.weights.first().copied()?;
        self.weights.iter().all(|&w| w == h).then_some(h)
    }
}

impl GridSpec {
    pub const MIN_POINTS: usize = 64;
    pub const MAX_POINTS: usize = 4096;
    /// Half-width of the extents in marginal standard deviations.
    pub const EXTENT_SIGMAS: f64 = 8.0;
    /// Largest allowed `Δ · k`.
    pub const MAX_PHASE_STEP: f64 = 0.3;
    /// Smallest allowed ratio of conditional standard deviation to spacing.
    pub const MIN_POINTS_PER_WIDTH: f64 = 1.5;
    /// Default point count per axis.
    pub const DEFAULT_POINTS: usize = 512;

    /// Smallest grid with at least `base_n` points per axis that covers every
    /// shape to 8 marginal standard deviations and resolves its carrier and
    /// conditional widths.
    pub fn covering(shapes: &[GaussianShape], base_n: usize) -> Result<Self> {
        if shapes.is_empty() {
            return Err(Error::Config("no shapes to cover".into()));
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut max_step = [f64::INFINITY; 2];
        for s in shapes {
            let marg = s.marginal_std();
            let cond = s.conditional_std();
            for ax in 0..2 {
                lo[ax] = lo[ax].min(s.center[ax] - Self::EXTENT_SIGMAS * marg[ax]);
                hi[ax] = hi[ax].max(s.center[ax] + Self::EXTENT_SIGMAS * marg[ax]);
                max_step[ax] = max_step[ax].min(cond[ax] / Self::MIN_POINTS_PER_WIDTH);
                if s.carrier[ax] != 0.0 {
                    max_step[ax] = max_step[ax].min(Self::MAX_PHASE_STEP / s.carrier[ax].abs());
                }
            }
        }
        let mut n = [0usize; 2];
        for ax in 0..2 {
            if !(lo[ax].is_finite() && hi[ax].is_finite() && hi[ax] > lo[ax]) {
                return Err(Error::Config(format!("degenerate extent on axis {ax}")));
            }
            let needed = ((hi[ax] - lo[ax]) / max_step[ax]).ceil() as usize + 1;
            n[ax] = needed.max(base_n).max(Self::MIN_POINTS);
            if n[ax] > Self::MAX_POINTS {
                return Err(Error::Config(format!(
                    "axis {ax} needs {} points (limit {}) to resolve the state",
                    n[ax],
                    Self::MAX_POINTS
                )));
            }
        }
        Ok(GridSpec {
            x_min: lo[0],
            x_max: hi[0],
            big_x_min: lo[1],
            big_x_max: hi[1],
            nx: n[0],
            n_big_x: n[1],
            rule: Rule::Trapezoid,
        })
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        self
    }

    /// Same extents with both point counts doubled.
    pub fn refined(&self) -> Self {
        GridSpec {
            nx: 2 * self.nx,
            n_big_x: 2 * self.n_big_x,
            ..*self
        }
    }

    /// Extents scaled about their midpoints.
    pub fn widened(&self, factor: f64) -> Self {
        let scale = |lo: f64, hi: f64| {
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo) * factor);
            (mid - half, mid + half)
        };
        let (x_min, x_max) = scale(self.x_min, self.x_max);
        let (big_x_min, big_x_max) = scale(self.big_x_min, self.big_x_max);
        GridSpec {
            x_min,
            x_max,
            big_x_min,
            big_x_max,
            ..*self
        }
    }

    pub fn x_axis(&self) -> Axis {
        Axis::new(self.x_min, self.x_max, self.nx, self.rule)
    }

    pub fn big_x_axis(&self) -> Axis {
        Axis::new(self.big_x_min, self.big_x_max, self.n_big_x, self.rule)
    }

    /// Largest gap between neighbouring nodes on each axis.
    pub fn max_step(&self) -> [f64; 2] {
        let step = |lo: f64, hi: f64, n: usize| match self.rule {
            Rule::Trapezoid => (hi - lo) / (n - 1) as f64,
            // central gap of the Legendre nodes is about π/2n of the width
            Rule::GaussLegendre => std::f64::consts::FRAC_PI_2 * (hi - lo) / n as f64,
        };
        [
            step(self.x_min, self.x_max, self.nx),
            step(self.big_x_min, self.big_x_max, self.n_big_x),
        ]
    }

    /// Structural checks independent of any state.
    pub fn validate(&self) -> Result<()> {
        if self.nx < Self::MIN_POINTS || self.n_big_x < Self::MIN_POINTS {
            return Err(Error::Config(format!(
                "grid needs at least {} points per axis, got {} x {}",
                Self::MIN_POINTS,
                self.nx,
                self.n_big_x
            )));
        }
        if !(self.x_max > self.x_min && self.big_x_max > self.big_x_min)
            || ![self.x_min, self.x_max, self.big_x_min, self.big_x_max]
                .iter()
                .all(|v| v.is_finite())
        {
            return Err(Error::Config(format!("invalid grid extents {self:?}")));
        }
        Ok(())
    }

    /// Checks coverage (8 marginal standard deviations) and phase resolution
    /// (`Δ · k ≤ 0.3`) for each shape.
    pub fn validate_for(&self, shapes: &[GaussianShape]) -> Result<()> {
        self.validate()?;
        let extents = [[self.x_min, self.x_max], [self.big_x_min, self.big_x_max]];
        let steps = self.max_step();
        for s in shapes {
            let marg = s.marginal_std();
            for ax in 0..2 {
                let need_lo = s.center[ax] - Self::EXTENT_SIGMAS * marg[ax];
                let need_hi = s.center[ax] + Self::EXTENT_SIGMAS * marg[ax];
                let slack = 1e-9 * (need_hi - need_lo);
                if extents[ax][0] > need_lo + slack || extents[ax][1] < need_hi - slack {
                    return Err(Error::Config(format!(
                        "axis {ax} extent [{:.4}, {:.4}] does not cover [{need_lo:.4}, {need_hi:.4}]",
                        extents[ax][0], extents[ax][1]
                    )));
                }
                let phase_step = steps[ax] * s.carrier[ax].abs();
                if phase_step > Self::MAX_PHASE_STEP * (1.0 + 1e-9) {
                    return Err(Error::Config(format!(
                        "axis {ax} spacing {:.4e} times wavenumber {:.4} is {phase_step:.3} > {}",
                        steps[ax],
                        s.carrier[ax],
                        Self::MAX_PHASE_STEP
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "x in [{:.6e}, {:.6e}] ({} pts), X in [{:.6e}, {:.6e}] ({} pts), {:?}",
            self.x_min, self.x_max, self.nx, self.big_x_min, self.big_x_max, self.n_big_x, self.rule
        )
    }
}
