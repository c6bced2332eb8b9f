use clap::ValueEnum;
use rayon::prelude::*;

use decoh_core::entanglement::{kernel_params, spectrum, Coupling};
use decoh_core::error_analysis::{error_report, optimal_lambda};
use decoh_core::thermal::ThermalDesign;
use decoh_core::{CollisionParams, GaussianProductState};

use super::common::{collision_params, param};
use crate::args::{Scale, SweepArgs, SweepParam};
use crate::report::{Layout, Report};
use crate::table::Value;
use crate::{CliError, THREADS_ENV};

/// Sweep abscissae, endpoints exact.
pub fn sweep_points(start: f64, stop: f64, points: usize, scale: Scale) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("a sweep needs at least 2 points, got {points}")));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(CliError::Usage(format!("sweep range [{start}, {stop}] must be finite")));
    }
    if scale == Scale::Log && !(start > 0.0 && stop > 0.0) {
        return Err(CliError::Usage(format!("log sweep needs positive endpoints, got [{start}, {stop}]")));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                return start;
            }
            if i == points - 1 {
                return stop;
            }
            let t = i as f64 / last;
            match scale {
                Scale::Linear => start + (stop - start) * t,
                Scale::Log => (start.ln() + (stop.ln() - start.ln()) * t).exp(),
            }
        })
        .collect())
}

/// Thread count from the environment, `None` for the rayon default.
pub fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        },
    }
}

fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value().map_or_else(String::new, |p| p.get_name().to_string())
}

type RowFn<'a> = Box<dyn Fn(f64) -> Result<Vec<Value>, CliError> + Sync + 'a>;

fn f0_at(lambda: f64, params: &CollisionParams) -> Result<(f64, f64, f64), CliError> {
    let s = GaussianProductState::new(lambda.sqrt(), 1.0, 0.0)?.after_collision(params);
    let c = kernel_params(&s).coupling;
    Ok((c.w(), c.largest_eigenvalue(), c.measure()))
}

pub fn run(a: &SweepArgs) -> Result<Report, CliError> {
    let xs = sweep_points(a.start, a.stop, a.points, a.scale)?;
    let ks = || a.physics.ksigma.or(a.physics.k.map(|k| k * a.physics.sigma.unwrap_or(1.0)));
    let mut params_out = vec![
        param("param", value_name(a.param)),
        param("start", a.start),
        param("stop", a.stop),
        param("points", a.points),
        param("scale", value_name(a.scale)),
    ];
    let (columns, row): (Vec<&str>, RowFn) = match a.param {
        SweepParam::Lambda => {
            let params = collision_params(&a.physics)?;
            let k_sigma = ks().unwrap_or(0.0);
            params_out.push(param("delta", params.particle_fraction()));
            params_out.push(param("k_sigma", k_sigma));
            (
                vec!["lambda", "a", "one_minus_a", "w", "f0", "measure"],
                Box::new(move |lambda| {
                    let r = error_report(lambda, k_sigma, &params)?;
                    let (w, f0, measure) = f0_at(lambda, &params)?;
                    Ok(vec![lambda.into(), r.a.into(), r.one_minus_a.into(), w.into(), f0.into(), measure.into()])
                }),
            )
        }
        SweepParam::KSigma => {
            let params = collision_params(&a.physics)?;
            let d = params.particle_fraction();
            params_out.push(param("delta", d));
            (
                vec!["k_sigma", "lambda_max", "a_max", "one_minus_a", "regime", "small_law_ratio", "large_law_ratio"],
                Box::new(move |k_sigma| {
                    let o = optimal_lambda(k_sigma, &params)?;
                    Ok(vec![
                        k_sigma.into(),
                        o.lambda_max.into(),
                        o.a_max.into(),
                        o.one_minus_a.into(),
                        o.regime.as_str().into(),
                        (o.one_minus_a / (2.0 * d * k_sigma * k_sigma)).into(),
                        (o.one_minus_a / (2.0 * d * k_sigma)).into(),
                    ])
                }),
            )
        }
        SweepParam::Delta => {
            let k_sigma = ks().unwrap_or(0.0);
            params_out.push(param("k_sigma", k_sigma));
            (
                vec!["delta", "lambda_max", "one_minus_a", "one_minus_a_over_delta"],
                Box::new(move |d| {
                    let params = CollisionParams::from_particle_fraction(d)?;
                    let o = optimal_lambda(k_sigma, &params)?;
                    Ok(vec![d.into(), o.lambda_max.into(), o.one_minus_a.into(), (o.one_minus_a / d).into()])
                }),
            )
        }
        SweepParam::W => (
            vec!["w", "u", "z", "f0", "measure", "f1"],
            Box::new(|w| {
                let c = Coupling::from_w(w)?;
                let f1 = if c.is_matched() { 0.0 } else { spectrum(w, 2)?[1] };
                Ok(vec![w.into(), c.u().into(), c.z().into(), c.largest_eigenvalue().into(), c.measure().into(), f1.into()])
            }),
        ),
        SweepParam::T => {
            let mu = a.mu_kg.ok_or_else(|| CliError::Usage("--param T needs --mu-kg".into()))?;
            params_out.push(param("mu_kg", mu));
            (
                vec!["T", "sigma_mu", "compton_wavelength", "thermal_length", "k_sigma"],
                Box::new(move |t| {
                    let d = ThermalDesign::new(mu, t)?;
                    Ok(vec![
                        t.into(),
                        d.sigma_mu.into(),
                        d.compton_wavelength.into(),
                        d.thermal_length.into(),
                        d.k_sigma_est.into(),
                    ])
                }),
            )
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let rows = pool.install(|| xs.par_iter().map(|&x| row(x)).collect::<Result<Vec<_>, _>>())?;
    Ok(Report {
        command: "sweep",
        params: params_out,
        columns: columns.into_iter().map(String::from).collect(),
        rows,
        layout: Layout::Series,
        checks: Vec::new(),
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_hit_the_endpoints() {
        let p = sweep_points(1e-3, 1e3, 61, Scale::Log).unwrap();
        assert_eq!((p[0], p[60]), (1e-3, 1e3));
        assert!((p[30] - 1.0).abs() < 1e-14);
        let l = sweep_points(-1.0, 1.0, 5, Scale::Linear).unwrap();
        assert_eq!(l, [-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(sweep_points(0.0, 1.0, 1, Scale::Linear).is_err());
        assert!(sweep_points(0.0, 1.0, 3, Scale::Log).is_err());
        assert!(sweep_points(f64::NAN, 1.0, 3, Scale::Linear).is_err());
    }
}
