//! Sectioned key-value scenario files.
//!
//! The syntax is TOML. Recognised sections are `[sim]`, `[turbine]`, `[pv]`,
//! `[battery]`, `[po]`, `[esc]`, `[supervisory]` and the three profiles
//! `[profiles.wind]`, `[profiles.irradiance]`, `[profiles.load]`:
//!
//! ```toml
//! [sim]
//! duration = 20.0
//!
//! [profiles.wind]
//! interpolation = "step"          # or "linear"
//! breakpoints = [[0.0, 8.0], [10.0, 10.0]]
//! ```
//!
//! Every key is optional and falls back to the built-in default; missing
//! profiles are constant zero. Unknown keys, type errors and invariant
//! violations are all collected and reported together.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use hybrid_dc_core::scenario::{Interpolation, Profile, Scenario};
use hybrid_dc_core::ValidationError;
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Syntax { line: usize, message: String },
    Invalid(Vec<ValidationError>),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Syntax { line, message } => {
                write!(f, "syntax error at line {line}: {message}")
            }
            ScenarioError::Invalid(errors) => {
                write!(f, "{} scenario error(s):", errors.len())?;
                for e in errors {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScenario {
    pub scenario: Scenario,
    /// Non-fatal notes, e.g. ignored settings.
    pub warnings: Vec<String>,
}

const SECTIONS: [&str; 8] = [
    "sim",
    "turbine",
    "pv",
    "battery",
    "po",
    "esc",
    "supervisory",
    "profiles",
];
const PROFILES: [&str; 3] = ["wind", "irradiance", "load"];

struct Section<'t> {
    name: String,
    table: Option<&'t Table>,
    seen: BTreeSet<&'static str>,
}

impl<'t> Section<'t> {
    fn new(name: &str, value: Option<&'t Value>, errors: &mut Vec<ValidationError>) -> Self {
        let table = match value {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                errors.push(ValidationError::new(name, "expected a section"));
                None
            }
        };
        Self {
            name: name.to_string(),
            table,
            seen: BTreeSet::new(),
        }
    }

    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn get(&mut self, key: &'static str) -> Option<&'t Value> {
        self.seen.insert(key);
        self.table.and_then(|t| t.get(key))
    }

    fn num(&mut self, key: &'static str, default: f64, errors: &mut Vec<ValidationError>) -> f64 {
        match self.get(key) {
            None => default,
            Some(v) => as_number(v).unwrap_or_else(|| {
                errors.push(ValidationError::new(self.path(key), "expected a number"));
                default
            }),
        }
    }

    fn finish(self, errors: &mut Vec<ValidationError>) {
        if let Some(t) = self.table {
            for key in t.keys() {
                if !self.seen.contains(key.as_str()) {
                    errors.push(ValidationError::new(self.path(key), "unknown key"));
                }
            }
        }
    }
}

fn as_number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ParsedScenario, ScenarioError> {
    let doc: Table = toml::from_str(text).map_err(|e| ScenarioError::Syntax {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;

    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    for key in doc.keys() {
        if !SECTIONS.contains(&key.as_str()) {
            errors.push(ValidationError::new(key.as_str(), "unknown section"));
        }
    }

    let mut sc = Scenario::default();
    let e = &mut errors;

    let mut s = Section::new("sim", doc.get("sim"), e);
    sc.duration = s.num("duration", sc.duration, e);
    sc.dt = s.num("dt", sc.dt, e);
    sc.wind_efficiency = s.num("wind_efficiency", sc.wind_efficiency, e);
    sc.solar_efficiency = s.num("solar_efficiency", sc.solar_efficiency, e);
    s.finish(e);

    let mut s = Section::new("turbine", doc.get("turbine"), e);
    let t = &mut sc.turbine;
    t.rho = s.num("rho", t.rho, e);
    t.radius = s.num("radius", t.radius, e);
    t.beta = s.num("beta", t.beta, e);
    if let Some(v) = s.get("c") {
        match v
            .as_array()
            .map(|a| a.iter().map(as_number).collect::<Option<Vec<_>>>())
        {
            Some(Some(c)) if c.len() == 6 => t.c.copy_from_slice(&c),
            _ => e.push(ValidationError::new(
                "turbine.c",
                "expected an array of 6 numbers",
            )),
        }
    }
    t.inertia = s.num("inertia", t.inertia, e);
    t.kv = s.num("kv", t.kv, e);
    t.g_max = s.num("g_max", t.g_max, e);
    t.cut_out = s.num("cut_out", t.cut_out, e);
    sc.initial_omega = s.num("initial_omega", sc.initial_omega, e);
    s.finish(e);

    let mut s = Section::new("pv", doc.get("pv"), e);
    let p = &mut sc.pv;
    p.voc = s.num("voc", p.voc, e);
    p.isc = s.num("isc", p.isc, e);
    p.vm = s.num("vm", p.vm, e);
    p.im = s.num("im", p.im, e);
    p.pm = s.num("pm", p.pm, e);
    p.rs = s.num("rs", p.rs, e);
    p.t_ref = s.num("t_ref", p.t_ref, e);
    p.g_ref = s.num("g_ref", p.g_ref, e);
    if s.get("temperature").is_some() {
        let temp = s.num("temperature", p.t_ref, e);
        if temp != p.t_ref {
            warnings.push(format!(
                "pv.temperature = {temp} ignored: the PV model runs at t_ref = {}",
                p.t_ref
            ));
        }
    }
    s.finish(e);

    let mut s = Section::new("battery", doc.get("battery"), e);
    let b = &mut sc.battery;
    b.capacity = s.num("capacity", b.capacity, e);
    b.v_nominal = s.num("v_nominal", b.v_nominal, e);
    b.max_charge_w = s.num("max_charge_w", b.max_charge_w, e);
    b.max_discharge_w = s.num("max_discharge_w", b.max_discharge_w, e);
    sc.initial_soc = s.num("initial_soc", sc.initial_soc, e);
    s.finish(e);

    let mut s = Section::new("po", doc.get("po"), e);
    let po = &mut sc.po;
    po.sample_period = s.num("sample_period", po.sample_period, e);
    po.duty_step = s.num("duty_step", po.duty_step, e);
    po.duty_min = s.num("duty_min", po.duty_min, e);
    po.duty_max = s.num("duty_max", po.duty_max, e);
    po.initial_duty = s.num("initial_duty", po.initial_duty, e);
    s.finish(e);

    let mut s = Section::new("esc", doc.get("esc"), e);
    let esc = &mut sc.esc;
    esc.dither_freq = s.num("dither_freq", esc.dither_freq, e);
    esc.dither_amp = s.num("dither_amp", esc.dither_amp, e);
    esc.hpf_cutoff = s.num("hpf_cutoff", esc.hpf_cutoff, e);
    esc.gain = s.num("gain", esc.gain, e);
    esc.g_min = s.num("g_min", esc.g_min, e);
    esc.g_max = s.num("g_max", esc.g_max, e);
    esc.initial_g = s.num("initial_g", esc.initial_g, e);
    s.finish(e);

    let mut s = Section::new("supervisory", doc.get("supervisory"), e);
    let sup = &mut sc.supervisory;
    sup.soc_high = s.num("soc_high", sup.soc_high, e);
    sup.soc_low = s.num("soc_low", sup.soc_low, e);
    sup.soc_hysteresis = s.num("soc_hysteresis", sup.soc_hysteresis, e);
    sup.dp_deadband = s.num("dp_deadband", sup.dp_deadband, e);
    sup.float_charge_w = s.num("float_charge_w", sup.float_charge_w, e);
    sup.sample_period = s.num("sample_period", sup.sample_period, e);
    s.finish(e);

    let profiles = Section::new("profiles", doc.get("profiles"), e);
    if let Some(t) = profiles.table {
        for key in t.keys() {
            if !PROFILES.contains(&key.as_str()) {
                e.push(ValidationError::new(
                    format!("profiles.{key}"),
                    "unknown profile",
                ));
            }
        }
        for (name, slot) in [
            ("wind", &mut sc.wind),
            ("irradiance", &mut sc.irradiance),
            ("load", &mut sc.load),
        ] {
            if let Some(v) = t.get(name) {
                if let Some(p) = read_profile(name, v, e) {
                    *slot = p;
                }
            }
        }
    }

    // Semantic checks only make sense once every field parsed.
    if errors.is_empty() {
        if let Err(v) = sc.validate() {
            errors.extend(v);
        }
    }
    if errors.is_empty() {
        Ok(ParsedScenario {
            scenario: sc,
            warnings,
        })
    } else {
        Err(ScenarioError::Invalid(errors))
    }
}

fn read_profile(name: &str, value: &Value, errors: &mut Vec<ValidationError>) -> Option<Profile> {
    let mut s = Section::new(&format!("profiles.{name}"), Some(value), errors);
    s.table?;
    let interpolation = match s.get("interpolation") {
        None => Some(Interpolation::Step),
        Some(Value::String(x)) if x == "step" => Some(Interpolation::Step),
        Some(Value::String(x)) if x == "linear" => Some(Interpolation::Linear),
        Some(_) => {
            errors.push(ValidationError::new(
                s.path("interpolation"),
                "expected \"step\" or \"linear\"",
            ));
            None
        }
    };
    let breakpoints = match s.get("breakpoints") {
        None => {
            errors.push(ValidationError::new(s.path("breakpoints"), "missing key"));
            None
        }
        Some(v) => {
            let parsed = v.as_array().and_then(|rows| {
                rows.iter()
                    .map(|row| match row.as_array().map(|r| r.as_slice()) {
                        Some([t, x]) => Some((as_number(t)?, as_number(x)?)),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()
            });
            if parsed.is_none() {
                errors.push(ValidationError::new(
                    s.path("breakpoints"),
                    "expected an array of [time, value] pairs",
                ));
            }
            parsed
        }
    };
    s.finish(errors);
    Some(Profile {
        breakpoints: breakpoints?,
        interpolation: interpolation?,
    })
}

/// Renders a scenario in the canonical layout: every section, every key.
/// `parse_scenario(&to_scenario_text(s))` reproduces `s` exactly.
pub fn to_scenario_text(sc: &Scenario) -> String {
    let mut out = String::new();
    let mut section = |name: &str, entries: &[(&str, f64)]| {
        let _ = writeln!(out, "[{name}]");
        for (k, v) in entries {
            let _ = writeln!(out, "{k} = {}", float(*v));
        }
        out.push('\n');
    };
    section(
        "sim",
        &[
            ("duration", sc.duration),
            ("dt", sc.dt),
            ("wind_efficiency", sc.wind_efficiency),
            ("solar_efficiency", sc.solar_efficiency),
        ],
    );
    let t = &sc.turbine;
    section(
        "turbine",
        &[
            ("rho", t.rho),
            ("radius", t.radius),
            ("beta", t.beta),
            ("inertia", t.inertia),
            ("kv", t.kv),
            ("g_max", t.g_max),
            ("cut_out", t.cut_out),
            ("initial_omega", sc.initial_omega),
        ],
    );
    let p = &sc.pv;
    section(
        "pv",
        &[
            ("voc", p.voc),
            ("isc", p.isc),
            ("vm", p.vm),
            ("im", p.im),
            ("pm", p.pm),
            ("rs", p.rs),
            ("t_ref", p.t_ref),
            ("g_ref", p.g_ref),
        ],
    );
    let b = &sc.battery;
    section(
        "battery",
        &[
            ("capacity", b.capacity),
            ("v_nominal", b.v_nominal),
            ("max_charge_w", b.max_charge_w),
            ("max_discharge_w", b.max_discharge_w),
            ("initial_soc", sc.initial_soc),
        ],
    );
    let po = &sc.po;
    section(
        "po",
        &[
            ("sample_period", po.sample_period),
            ("duty_step", po.duty_step),
            ("duty_min", po.duty_min),
            ("duty_max", po.duty_max),
            ("initial_duty", po.initial_duty),
        ],
    );
    let e = &sc.esc;
    section(
        "esc",
        &[
            ("dither_freq", e.dither_freq),
            ("dither_amp", e.dither_amp),
            ("hpf_cutoff", e.hpf_cutoff),
            ("gain", e.gain),
            ("g_min", e.g_min),
            ("g_max", e.g_max),
            ("initial_g", e.initial_g),
        ],
    );
    let s = &sc.supervisory;
    section(
        "supervisory",
        &[
            ("soc_high", s.soc_high),
            ("soc_low", s.soc_low),
            ("soc_hysteresis", s.soc_hysteresis),
            ("dp_deadband", s.dp_deadband),
            ("float_charge_w", s.float_charge_w),
            ("sample_period", s.sample_period),
        ],
    );

    // turbine.c is an array; append it to the turbine section
    let c: Vec<String> = sc.turbine.c.iter().map(|x| float(*x)).collect();
    out = out.replacen(
        "[turbine]\n",
        &format!("[turbine]\nc = [{}]\n", c.join(", ")),
        1,
    );

    for (name, prof) in [
        ("wind", &sc.wind),
        ("irradiance", &sc.irradiance),
        ("load", &sc.load),
    ] {
        let interp = match prof.interpolation {
            Interpolation::Step => "step",
            Interpolation::Linear => "linear",
        };
        let pts: Vec<String> = prof
            .breakpoints
            .iter()
            .map(|(t, v)| format!("[{}, {}]", float(*t), float(*v)))
            .collect();
        let _ = writeln!(
            out,
            "[profiles.{name}]\ninterpolation = \"{interp}\"\nbreakpoints = [{}]\n",
            pts.join(", ")
        );
    }
    out
}

/// Shortest round-trip float text that TOML reads back as a float.
fn float(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[sim]
duration = 10

[profiles.wind]
breakpoints = [[0, 8], [5, 10]]

[profiles.irradiance]
interpolation = "linear"
breakpoints = [[0.0, 1000.0]]

[profiles.load]
breakpoints = [[0, 2500]]
"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let p = parse_scenario(MINIMAL).unwrap();
        let sc = p.scenario;
        assert_eq!(sc.duration, 10.0);
        assert_eq!(sc.dt, Scenario::default().dt);
        assert_eq!(sc.turbine, Scenario::default().turbine);
        assert_eq!(sc.supervisory, Scenario::default().supervisory);
        assert_eq!(sc.wind.sample(4.0), 8.0);
        assert_eq!(sc.wind.sample(5.0), 10.0);
        assert_eq!(sc.irradiance.interpolation, Interpolation::Linear);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn empty_document_is_all_defaults() {
        assert_eq!(parse_scenario("").unwrap().scenario, Scenario::default());
    }

    #[test]
    fn inverted_soc_thresholds() {
        let text = format!("{MINIMAL}\n[supervisory]\nsoc_low = 95\nsoc_high = 40\n");
        let Err(ScenarioError::Invalid(errs)) = parse_scenario(&text) else {
            panic!("expected validation failure");
        };
        assert!(errs.iter().any(
            |e| e.path.starts_with("supervisory") && e.message == "soc_low must be < soc_high"
        ));
    }

    #[test]
    fn all_errors_in_one_pass() {
        let text = r#"
[sim]
duration = "long"
bogus = 1

[turbine]
radius = 2.5
c = [1, 2]

[extra]
x = 1

[profiles.wind]
interpolation = "cubic"

[profiles.sun]
breakpoints = [[0, 1]]
"#;
        let Err(ScenarioError::Invalid(errs)) = parse_scenario(text) else {
            panic!("expected validation failure");
        };
        let paths: Vec<&str> = errs.iter().map(|e| e.path.as_str()).collect();
        for want in [
            "sim.duration",
            "sim.bogus",
            "turbine.c",
            "extra",
            "profiles.wind.interpolation",
            "profiles.wind.breakpoints",
            "profiles.sun",
        ] {
            assert!(paths.contains(&want), "missing {want} in {paths:?}");
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "[sim]\nduration = 10\ndt = = 3\n";
        match parse_scenario(text) {
            Err(ScenarioError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn temperature_override_warns() {
        let text = format!("{MINIMAL}\n[pv]\ntemperature = 45\n");
        let p = parse_scenario(&text).unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert!(p.warnings[0].contains("temperature"));
    }

    #[test]
    fn canonical_text_round_trips_defaults() {
        let sc = parse_scenario(MINIMAL).unwrap().scenario;
        let text = to_scenario_text(&sc);
        assert_eq!(parse_scenario(&text).unwrap().scenario, sc);
    }
}
