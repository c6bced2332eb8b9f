use decoh_core::error_analysis::optimal_lambda;
use decoh_core::thermal::{amplitude_budget_uniform, thermal_length, ThermalDesign, C, HBAR, K_B};
use decoh_core::CollisionParams;

use super::common::param;
use crate::args::ThermalArgs;
use crate::report::Report;
use crate::table::Value;
use crate::CliError;

fn fraction(a: &ThermalArgs) -> Result<Option<CollisionParams>, CliError> {
    match (a.delta, a.m, a.big_m) {
        (Some(d), None, None) => Ok(Some(CollisionParams::from_particle_fraction(d)?)),
        (None, Some(m), Some(big_m)) => Ok(Some(CollisionParams::new(m, big_m)?)),
        (None, None, None) => Ok(None),
        _ => Err(CliError::Usage("give either --delta or both --m and --M".into())),
    }
}

pub fn run(a: &ThermalArgs) -> Result<Report, CliError> {
    let mut params = vec![
        param("T", a.temperature),
        param("hbar", HBAR),
        param("k_B", K_B),
        param("c", C),
    ];
    let mut fields: Vec<(&str, Value)> = Vec::new();
    if a.report_length_scale {
        let l = thermal_length(a.temperature)?;
        fields.push(("thermal_length_m", l.into()));
        fields.push(("thermal_length_cm", (100.0 * l).into()));
    }
    match a.mu_kg {
        Some(mu) => {
            params.insert(0, param("mu_kg", mu));
            let d = ThermalDesign::new(mu, a.temperature)?;
            fields.push(("sigma_mu_m", d.sigma_mu.into()));
            fields.push(("compton_wavelength_m", d.compton_wavelength.into()));
            if !a.report_length_scale {
                fields.push(("thermal_length_m", d.thermal_length.into()));
            }
            fields.push(("geometric_mean_m", d.geometric_mean().into()));
            fields.push(("k_sigma_est", d.k_sigma_est.into()));
            if let Some(p) = fraction(a)? {
                let o = optimal_lambda(d.k_sigma_est, &p)?;
                params.push(param("delta", p.particle_fraction()));
                fields.push(("one_minus_a_per_collision", o.one_minus_a.into()));
                fields.push(("one_minus_a_over_delta", (o.one_minus_a / p.particle_fraction()).into()));
            }
        }
        None if a.report_length_scale => {}
        None => return Err(CliError::Usage("missing --mu-kg (or pass --report-length-scale)".into())),
    }
    match (a.collisions, a.f0) {
        (Some(n), Some(f0)) => {
            let b = amplitude_budget_uniform(f0, n)?;
            fields.push(("collisions", n.into()));
            fields.push(("f0", f0.into()));
            fields.push(("amplitude", b.amplitude.into()));
            fields.push((
                "half_amplitude_collisions",
                b.half_amplitude_collisions.unwrap_or(f64::INFINITY).into(),
            ));
        }
        (None, None) => {}
        _ => return Err(CliError::Usage("--collisions and --F0 go together".into())),
    }
    Ok(Report::single("thermal", params, fields))
}
