use decoh_core::entanglement::EntanglementReport;
use decoh_core::oracles::{schmidt_decompose, GridSpec};
use decoh_core::TwoBodyWave;

use super::common::{collision_params, initial_state, param, physics_params};
use crate::args::EntangleArgs;
use crate::report::Report;
use crate::table::Value;
use crate::CliError;

pub fn run(a: &EntangleArgs) -> Result<Report, CliError> {
    let params = collision_params(&a.physics)?;
    let initial = initial_state(&a.physics, &params)?;
    let state = initial.after_collision(&params);
    let n = a.spectrum.max(1);
    let r = EntanglementReport::new(&state, n);
    let c = r.kernel.coupling;
    let mut fields: Vec<(String, Value)> = vec![
        ("lambda".into(), initial.spread_ratio().into()),
        ("d".into(), r.kernel.d.into()),
        ("rho".into(), r.kernel.rho.into()),
        ("w".into(), c.w().into()),
        ("u".into(), c.u().into()),
        ("z".into(), c.z().into()),
        ("f0".into(), r.f0.into()),
        ("measure".into(), r.measure.into()),
        ("matched".into(), c.is_matched().into()),
    ];
    fields.extend(r.spectrum_prefix.iter().enumerate().map(|(i, f)| (format!("spectrum_{i}"), Value::from(*f))));
    fields.push(("tail_bound".into(), r.tail_bound.into()));
    let mut params_out = physics_params(&params, &initial);
    if a.oracle {
        let grid = GridSpec::covering(&[state.shape()], a.grid)?;
        let s = schmidt_decompose(&state, &grid)?;
        fields.push(("f0_svd".into(), s.largest_weight().into()));
        fields.push(("svd_truncation_estimate".into(), s.truncation_estimate.into()));
        params_out.push(param("grid", grid.describe()));
    }
    let mut report = Report::single("entangle", params_out, Vec::new());
    let (columns, row): (Vec<String>, Vec<Value>) = fields.into_iter().unzip();
    report.columns = columns;
    report.rows = vec![row];
    Ok(report)
}
