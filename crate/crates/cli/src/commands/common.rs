//! Resolution of the physics flags into model inputs.

use decoh_core::entanglement::optimal_spreads;
use decoh_core::{CollisionParams, GaussianProductState};

use crate::args::{PhysicsArgs, SpreadArg};
use crate::table::Value;
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Masses from `--m` and `--M`, or a unit total mass from `--delta`.
pub fn collision_params(p: &PhysicsArgs) -> Result<CollisionParams, CliError> {
    match (p.m, p.big_m, p.delta) {
        (Some(m), Some(big_m), None) => Ok(CollisionParams::new(m, big_m)?),
        (None, None, Some(d)) => Ok(CollisionParams::from_particle_fraction(d)?),
        (_, _, Some(_)) => Err(usage("give either --delta or both --m and --M, not both")),
        _ => Err(usage("missing masses: give --m and --M, or --delta")),
    }
}

/// `(σ, Σ)`. With `--lambda`, `σ` defaults to 1.
pub fn spreads(p: &PhysicsArgs, params: &CollisionParams) -> Result<(f64, f64), CliError> {
    if let Some(lambda) = p.lambda {
        if p.big_sigma.is_some() {
            return Err(usage("give either --lambda or --Sigma, not both"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(CliError::Core(decoh_core::Error::Domain(format!(
                "spread ratio lambda must be positive and finite, got {lambda}"
            ))));
        }
        let sigma = p.sigma.unwrap_or(1.0);
        return Ok((sigma, sigma * lambda.sqrt()));
    }
    let sigma = p
        .sigma
        .ok_or_else(|| usage("missing spreads: give --sigma and --Sigma, or --lambda"))?;
    let big_sigma = match p.big_sigma {
        Some(SpreadArg::Auto) => optimal_spreads(sigma, params)?,
        Some(SpreadArg::Value(v)) => v,
        None => return Err(usage("missing --Sigma (a length or `auto`)")),
    };
    Ok((sigma, big_sigma))
}

/// `kσ` from `--ksigma` or `--k`; `None` if neither is given.
pub fn k_sigma(p: &PhysicsArgs, sigma: f64) -> Result<Option<f64>, CliError> {
    match (p.ksigma, p.k) {
        (Some(_), Some(_)) => Err(usage("give either --k or --ksigma, not both")),
        (Some(ks), None) => Ok(Some(ks)),
        (None, Some(k)) => Ok(Some(k * sigma)),
        (None, None) => Ok(None),
    }
}

/// Initial product state; `k` defaults to 0.
pub fn initial_state(p: &PhysicsArgs, params: &CollisionParams) -> Result<GaussianProductState, CliError> {
    let (sigma, big_sigma) = spreads(p, params)?;
    let k = k_sigma(p, sigma)?.unwrap_or(0.0) / sigma;
    Ok(GaussianProductState::new(big_sigma, sigma, k)?)
}

pub fn param(name: &str, v: impl Into<Value>) -> (String, Value) {
    (name.to_string(), v.into())
}

/// Metadata common to every physics command.
pub fn physics_params(params: &CollisionParams, state: &GaussianProductState) -> Vec<(String, Value)> {
    vec![
        param("m", params.particle_mass()),
        param("M", params.wall_mass()),
        param("delta", params.particle_fraction()),
        param("sigma", state.particle_spread()),
        param("Sigma", state.wall_spread()),
        param("k", state.k()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> PhysicsArgs {
        PhysicsArgs::default()
    }

    #[test]
    fn masses() {
        let p = collision_params(&PhysicsArgs { m: Some(1.0), big_m: Some(99.0), ..args() }).unwrap();
        assert_eq!(p.particle_fraction(), 0.01);
        assert!(collision_params(&PhysicsArgs { m: Some(1.0), ..args() }).is_err());
        assert!(collision_params(&PhysicsArgs { delta: Some(0.1), m: Some(1.0), big_m: Some(2.0), ..args() }).is_err());
        assert_eq!(collision_params(&PhysicsArgs { delta: Some(0.3), ..args() }).unwrap().particle_fraction(), 0.3);
    }

    #[test]
    fn auto_spread_is_matched() {
        let p = CollisionParams::new(1.0, 100.0).unwrap();
        let a = PhysicsArgs { sigma: Some(2.0), big_sigma: Some(SpreadArg::Auto), ..args() };
        let (s, big_s) = spreads(&a, &p).unwrap();
        assert_eq!(s, 2.0);
        assert!((big_s - 0.2).abs() < 1e-15);
        let explicit = PhysicsArgs { big_sigma: Some(SpreadArg::Value(0.5)), ..a };
        assert_eq!(spreads(&explicit, &p).unwrap().1, 0.5);
    }

    #[test]
    fn k_sources() {
        assert_eq!(k_sigma(&PhysicsArgs { k: Some(3.0), ..args() }, 2.0).unwrap(), Some(6.0));
        assert_eq!(k_sigma(&args(), 2.0).unwrap(), None);
        assert!(k_sigma(&PhysicsArgs { k: Some(3.0), ksigma: Some(1.0), ..args() }, 2.0).is_err());
    }
}
