use decoh_core::error_analysis::{error_report, optimal_lambda};

use super::common::{collision_params, k_sigma, param, spreads};
use crate::args::ErrorArgs;
use crate::report::Report;
use crate::CliError;

pub fn run(a: &ErrorArgs) -> Result<Report, CliError> {
    let params = collision_params(&a.physics)?;
    let (sigma, big_sigma) = spreads(&a.physics, &params)?;
    let ks = k_sigma(&a.physics, sigma)?.ok_or_else(|| CliError::Usage("missing --k or --ksigma".into()))?;
    let lambda = (big_sigma / sigma).powi(2);
    let r = error_report(lambda, ks, &params)?;
    let opt = optimal_lambda(ks, &params)?;
    Ok(Report::single(
        "error",
        vec![
            param("m", params.particle_mass()),
            param("M", params.wall_mass()),
            param("sigma", sigma),
            param("Sigma", big_sigma),
        ],
        vec![
            ("delta", params.particle_fraction().into()),
            ("gamma", params.wall_fraction().into()),
            ("lambda", lambda.into()),
            ("k_sigma", ks.into()),
            ("a", r.a.into()),
            ("one_minus_a", r.one_minus_a.into()),
            ("lambda_matched", params.matched_ratio().into()),
            ("lambda_max", opt.lambda_max.into()),
            ("a_max", opt.a_max.into()),
            ("one_minus_a_max", opt.one_minus_a.into()),
            ("regime", opt.regime.as_str().into()),
        ],
    ))
}
