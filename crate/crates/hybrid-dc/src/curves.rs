//! Static model sweeps written as CSV.

use std::io::Write;

use hybrid_dc_core::models::pv::PvDiodeModel;
use hybrid_dc_core::models::turbine::{aero_torque_power, power_coefficient, WindTurbineParams};

use crate::{format_sig9, Error};

fn write_rows<W: Write>(
    sink: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format_sig9(*x)))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn grid(max: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = (max / step + 1e-9).floor() as usize;
    (0..=n).map(move |k| k as f64 * step)
}

/// `lambda,cp` for λ in [0, lambda_max] at steps of 0.01.
pub fn cp_lambda<W: Write>(
    params: &WindTurbineParams,
    beta: f64,
    lambda_max: f64,
    sink: W,
) -> Result<(), Error> {
    let rows = grid(lambda_max, 0.01).map(|l| vec![l, power_coefficient(l, beta, params)]);
    write_rows(sink, &["lambda", "cp"], rows)
}

/// `v,i,p` from 0 V to open circuit at steps of 0.1 V.
pub fn pv_curve<W: Write>(model: &PvDiodeModel, irradiance: f64, sink: W) -> Result<(), Error> {
    let voc = model.open_circuit_voltage(irradiance);
    let mut rows = Vec::new();
    for v in grid(voc, 0.1).chain(std::iter::once(voc)) {
        let i = model.current(v, irradiance)?;
        rows.push(vec![v, i, v * i]);
    }
    rows.dedup_by(|a, b| a[0] == b[0]);
    write_rows(sink, &["v", "i", "p"], rows.into_iter())
}

/// `wind_speed,omega,power` over ω up to a tip-speed ratio of 16 at the
/// fastest wind, steps of 0.1 rad/s.
pub fn turbine_power<W: Write>(
    params: &WindTurbineParams,
    winds: &[f64],
    sink: W,
) -> Result<(), Error> {
    let v_max = winds.iter().cloned().fold(0.0, f64::max);
    let omega_max = 16.0 * v_max / params.radius;
    let rows = winds.iter().flat_map(|&v| {
        grid(omega_max, 0.1).map(move |w| vec![v, w, aero_torque_power(v, w, params).power])
    });
    write_rows(sink, &["wind_speed", "omega", "power"], rows)
}
