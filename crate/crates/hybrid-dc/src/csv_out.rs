//! Time-series CSV output.

use std::io::Write;

use hybrid_dc_core::sim::{StepRecord, TimeSeries};

use crate::Error;

pub const CSV_HEADER: [&str; 19] = [
    "t",
    "wind_speed",
    "irradiance",
    "omega",
    "lambda",
    "cp",
    "p_wind",
    "duty",
    "v_pv",
    "i_pv",
    "g1",
    "p_solar",
    "delta_p",
    "mode",
    "soc",
    "p_battery",
    "p_load_served",
    "p_dump",
    "flags",
];

/// Formats `x` like C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    const SIG: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIG).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let fixed = format!("{:.*}", (SIG - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn flags_field(r: &StepRecord) -> String {
    let names: Vec<&str> = [
        (r.flags.clamp, "clamp"),
        (r.flags.unserved, "unserved"),
        (r.flags.cutout, "cutout"),
    ]
    .into_iter()
    .filter_map(|(on, name)| on.then_some(name))
    .collect();
    names.join("|")
}

/// Writes one header row and one row per step.
pub fn write_csv<W: Write>(series: &TimeSeries, sink: W) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in &series.records {
        let mut row: Vec<String> = [
            r.t,
            r.wind_speed,
            r.irradiance,
            r.omega,
            r.lambda,
            r.cp,
            r.p_wind,
            r.duty,
            r.v_pv,
            r.i_pv,
            r.g1,
            r.p_solar,
            r.delta_p,
        ]
        .iter()
        .map(|x| format_sig9(*x))
        .collect();
        row.push(r.mode.number().to_string());
        row.extend(
            [r.soc, r.p_battery, r.p_load_served, r.p_dump]
                .iter()
                .map(|x| format_sig9(*x)),
        );
        row.push(flags_field(r));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
