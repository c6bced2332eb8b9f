use num_complex::Complex64;

use crate::error::Result;
use crate::kinematics::TwoBodyWave;

use super::grid::{Axis, GridSpec, Rule};

/// Quadrature value of `∫∫ a* b dx dX` with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub value: Complex64,
    /// Difference to the same rule at half resolution plus a roundoff floor.
    pub truncation_estimate: f64,
}

/// Tensor-product quadrature of the overlap `⟨a|b⟩`.
pub fn quadrature_overlap<A, B>(a: &A, b: &B, grid: &GridSpec) -> Result<Overlap>
where
    A: TwoBodyWave + ?Sized,
    B: TwoBodyWave + ?Sized,
{
    grid.validate_for(&[a.shape(), b.shape()])?;
    let (xs, big_xs) = (grid.x_axis(), grid.big_x_axis());
    let (value, abs_sum) = integrate(a, b, &xs, &big_xs, 1);
    let coarse = match grid.rule {
        Rule::Trapezoid => integrate(a, b, &xs, &big_xs, 2).0,
        Rule::GaussLegendre => {
            let half = GridSpec {
                nx: grid.nx / 2,
                n_big_x: grid.n_big_x / 2,
                ..*grid
            };
            integrate(a, b, &half.x_axis(), &half.big_x_axis(), 1).0
        }
    };
    let points = (grid.nx * grid.n_big_x) as f64;
    let roundoff = 4.0 * f64::EPSILON * points.sqrt() * abs_sum;
    Ok(Overlap {
        value,
        truncation_estimate: (value - coarse).norm() + roundoff,
    })
}

/// Returns the integral and `∫∫ |a b|`. With `stride = 2` every other node
/// is used with doubled weights.
fn integrate<A, B>(a: &A, b: &B, xs: &Axis, big_xs: &Axis, stride: usize) -> (Complex64, f64)
where
    A: TwoBodyWave + ?Sized,
    B: TwoBodyWave + ?Sized,
{
    let scale = (stride * stride) as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut abs_total = 0.0;
    for (&big_x, &wb) in big_xs.nodes.iter().zip(&big_xs.weights).step_by(stride) {
        let mut row = Complex64::new(0.0, 0.0);
        let mut abs_row = 0.0;
        for (&x, &wx) in xs.nodes.iter().zip(&xs.weights).step_by(stride) {
            let term = a.amplitude(x, big_x).conj() * b.amplitude(x, big_x) * wx;
            abs_row += term.norm();
            row += term;
        }
        total += row * wb;
        abs_total += abs_row * wb;
    }
    (total * scale, abs_total * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error_analysis::overlap_amplitude;
    use crate::kinematics::{CollisionParams, GaussianProductState};

    #[test]
    fn initial_state_is_normalized() {
        let s = GaussianProductState::new(0.3, 2.0, 1.5).unwrap();
        for rule in [Rule::Trapezoid, Rule::GaussLegendre] {
            let g = GridSpec::covering(&[s.shape()], 256).unwrap().with_rule(rule);
            let o = quadrature_overlap(&s, &s, &g).unwrap();
            assert!((o.value.re - 1.0).abs() < 1e-10, "{rule:?}: {}", o.value);
            assert!(o.value.im.abs() < 1e-12);
        }
    }

    #[test]
    fn post_collision_state_is_normalized() {
        let s = GaussianProductState::new(0.5, 1.0, 2.0).unwrap();
        let f = s.after_collision(&CollisionParams::new(1.0, 10.0).unwrap());
        let g = GridSpec::covering(&[f.shape()], 256).unwrap();
        let o = quadrature_overlap(&f, &f, &g).unwrap();
        assert!((o.value.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn matches_closed_form_overlap() {
        let p = CollisionParams::from_particle_fraction(0.01).unwrap();
        let s = GaussianProductState::new(1.0, 1.0, 0.0).unwrap();
        let (test, f) = (s.ideal_reflected(), s.after_collision(&p));
        let g = GridSpec::covering(&[test.shape(), f.shape()], 512).unwrap();
        let o = quadrature_overlap(&test, &f, &g).unwrap();
        assert!((o.value.norm() - 0.714_212_8).abs() < 1e-7);
        assert!((o.value.norm() - overlap_amplitude(1.0, 0.0, &p).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn refinement_stays_within_estimate() {
        let p = CollisionParams::new(1.0, 4.0).unwrap();
        let s = GaussianProductState::new(0.8, 1.0, 0.7).unwrap();
        let (test, f) = (s.ideal_reflected(), s.after_collision(&p));
        let g = GridSpec::covering(&[test.shape(), f.shape()], 128).unwrap();
        let coarse = quadrature_overlap(&test, &f, &g).unwrap();
        let fine = quadrature_overlap(&test, &f, &g.refined()).unwrap();
        assert!((coarse.value - fine.value).norm() <= coarse.truncation_estimate);
    }
}
