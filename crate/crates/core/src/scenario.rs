//! Exogenous input profiles and the full scenario description.

use alloc::format;
use alloc::vec::Vec;

use crate::controllers::{EscConfig, PoConfig, SupervisoryConfig};
use crate::models::{BatteryParams, PvDatasheet, WindTurbineParams};
use crate::ValidationError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    /// Hold the value of the last breakpoint at or before `t`.
    Step,
    Linear,
}

/// Piecewise time profile. Breakpoint times are strictly increasing and
/// start at 0; past the last breakpoint the final value is held.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub breakpoints: Vec<(f64, f64)>,
    pub interpolation: Interpolation,
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Self {
            breakpoints: alloc::vec![(0.0, value)],
            interpolation: Interpolation::Step,
        }
    }

    pub fn step(breakpoints: Vec<(f64, f64)>) -> Self {
        Self {
            breakpoints,
            interpolation: Interpolation::Step,
        }
    }

    pub fn linear(breakpoints: Vec<(f64, f64)>) -> Self {
        Self {
            breakpoints,
            interpolation: Interpolation::Linear,
        }
    }

    /// Invariant violations as messages relative to the profile.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        match self.breakpoints.first() {
            None => {
                out.push("at least one breakpoint is required");
                return out;
            }
            Some(&(t0, _)) if t0 != 0.0 => out.push("first breakpoint time must be 0"),
            _ => {}
        }
        if self
            .breakpoints
            .iter()
            .any(|&(t, v)| !t.is_finite() || !v.is_finite())
        {
            out.push("breakpoint times and values must be finite");
        }
        if self.breakpoints.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            out.push("breakpoint times must be strictly increasing");
        }
        out
    }

    pub fn sample(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        // index of the first breakpoint strictly after t
        let idx = bp.partition_point(|&(bt, _)| bt <= t);
        if idx == 0 {
            return bp.first().map_or(0.0, |p| p.1);
        }
        if idx == bp.len() {
            return bp[idx - 1].1;
        }
        let (t0, v0) = bp[idx - 1];
        match self.interpolation {
            Interpolation::Step => v0,
            Interpolation::Linear => {
                let (t1, v1) = bp[idx];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Largest and smallest breakpoint values.
    pub fn value_range(&self) -> (f64, f64) {
        self.breakpoints
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| {
                (lo.min(v), hi.max(v))
            })
    }
}

pub fn sample_profile(profile: &Profile, t: f64) -> f64 {
    profile.sample(t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    /// Simulated time, s.
    pub duration: f64,
    /// Integration step, s.
    pub dt: f64,
    /// Converter efficiencies onto the bus.
    pub wind_efficiency: f64,
    pub solar_efficiency: f64,
    /// Initial shaft speed, rad/s.
    pub initial_omega: f64,
    /// Initial state of charge, percent.
    pub initial_soc: f64,
    pub turbine: WindTurbineParams,
    pub pv: PvDatasheet,
    pub battery: BatteryParams,
    pub po: PoConfig,
    pub esc: EscConfig,
    pub supervisory: SupervisoryConfig,
    /// Wind speed, m/s.
    pub wind: Profile,
    /// Irradiance, W/m².
    pub irradiance: Profile,
    /// Load demand, W.
    pub load: Profile,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            duration: 20.0,
            dt: 1e-3,
            wind_efficiency: 1.0,
            solar_efficiency: 1.0,
            initial_omega: 5.0,
            initial_soc: 50.0,
            turbine: WindTurbineParams::default(),
            pv: PvDatasheet::default(),
            battery: BatteryParams::default(),
            po: PoConfig::default(),
            esc: EscConfig::default(),
            supervisory: SupervisoryConfig::default(),
            wind: Profile::constant(0.0),
            irradiance: Profile::constant(0.0),
            load: Profile::constant(0.0),
        }
    }
}

struct Check(Vec<ValidationError>);

impl Check {
    fn require(&mut self, ok: bool, path: &str, message: &str) {
        if !ok {
            self.0.push(ValidationError::new(path, message));
        }
    }

    fn positive(&mut self, value: f64, path: &str) {
        self.require(
            value > 0.0 && value.is_finite(),
            path,
            "must be a finite value > 0",
        );
    }

    fn non_negative(&mut self, value: f64, path: &str) {
        self.require(
            value >= 0.0 && value.is_finite(),
            path,
            "must be a finite value >= 0",
        );
    }

    fn fraction(&mut self, value: f64, path: &str) {
        self.require((0.0..=1.0).contains(&value), path, "must lie in [0, 1]");
    }
}

impl Scenario {
    /// Number of fixed steps in the run.
    pub fn step_count(&self) -> usize {
        libm::floor(self.duration / self.dt + 1e-9) as usize
    }

    /// Checks every invariant and returns all violations at once.
    pub fn validate(&self) -> Result<(), Vec<ValidationError>> {
        let mut c = Check(Vec::new());

        c.positive(self.duration, "sim.duration");
        c.positive(self.dt, "sim.dt");
        if self.dt > 0.0 && self.duration > 0.0 {
            c.require(
                self.dt <= self.duration,
                "sim.dt",
                "must not exceed sim.duration",
            );
        }
        c.require(
            self.wind_efficiency > 0.0 && self.wind_efficiency <= 1.0,
            "sim.wind_efficiency",
            "must lie in (0, 1]",
        );
        c.require(
            self.solar_efficiency > 0.0 && self.solar_efficiency <= 1.0,
            "sim.solar_efficiency",
            "must lie in (0, 1]",
        );

        let t = &self.turbine;
        c.positive(t.rho, "turbine.rho");
        c.positive(t.radius, "turbine.radius");
        c.require(
            (0.0..=30.0).contains(&t.beta),
            "turbine.beta",
            "must lie in [0, 30] degrees",
        );
        c.require(
            t.c.iter().all(|x| x.is_finite()),
            "turbine.c",
            "coefficients must be finite",
        );
        c.positive(t.inertia, "turbine.inertia");
        c.positive(t.kv, "turbine.kv");
        c.positive(t.g_max, "turbine.g_max");
        c.positive(t.cut_out, "turbine.cut_out");
        c.non_negative(self.initial_omega, "turbine.initial_omega");

        for (key, msg) in self.pv.violations() {
            c.0.push(ValidationError::new(format!("pv.{key}"), msg));
        }

        let b = &self.battery;
        c.positive(b.capacity, "battery.capacity");
        c.positive(b.v_nominal, "battery.v_nominal");
        c.non_negative(b.max_charge_w, "battery.max_charge_w");
        c.non_negative(b.max_discharge_w, "battery.max_discharge_w");
        c.require(
            (0.0..=100.0).contains(&self.initial_soc),
            "battery.initial_soc",
            "must lie in [0, 100]",
        );

        let po = &self.po;
        c.positive(po.sample_period, "po.sample_period");
        if po.sample_period > 0.0 && self.dt > 0.0 {
            c.require(
                po.sample_period >= self.dt,
                "po.sample_period",
                "must be >= sim.dt",
            );
        }
        c.positive(po.duty_step, "po.duty_step");
        c.fraction(po.duty_min, "po.duty_min");
        c.fraction(po.duty_max, "po.duty_max");
        c.require(
            po.duty_min < po.duty_max,
            "po.duty_min",
            "must be < po.duty_max",
        );
        c.require(
            po.initial_duty >= po.duty_min && po.initial_duty <= po.duty_max,
            "po.initial_duty",
            "must lie in [duty_min, duty_max]",
        );

        let e = &self.esc;
        c.positive(e.dither_freq, "esc.dither_freq");
        c.positive(e.dither_amp, "esc.dither_amp");
        c.positive(e.hpf_cutoff, "esc.hpf_cutoff");
        c.require(
            e.hpf_cutoff < e.dither_freq,
            "esc.hpf_cutoff",
            "must be < esc.dither_freq",
        );
        c.non_negative(e.gain, "esc.gain");
        c.non_negative(e.g_min, "esc.g_min");
        c.require(e.g_min < e.g_max, "esc.g_min", "must be < esc.g_max");
        c.require(
            e.initial_g >= e.g_min && e.initial_g <= e.g_max,
            "esc.initial_g",
            "must lie in [g_min, g_max]",
        );
        if self.dt > 0.0 && e.dither_freq > 0.0 {
            c.require(
                self.dt * e.dither_freq * 10.0 < 1.0,
                "sim.dt",
                "must be < 1/(10 * esc.dither_freq)",
            );
        }

        let s = &self.supervisory;
        c.require(
            s.soc_low > 0.0 && s.soc_high < 100.0,
            "supervisory.soc_low",
            "thresholds must satisfy 0 < soc_low < soc_high < 100",
        );
        c.require(
            s.soc_low < s.soc_high,
            "supervisory.soc_low",
            "soc_low must be < soc_high",
        );
        c.non_negative(s.soc_hysteresis, "supervisory.soc_hysteresis");
        c.non_negative(s.dp_deadband, "supervisory.dp_deadband");
        c.non_negative(s.float_charge_w, "supervisory.float_charge_w");
        c.positive(s.sample_period, "supervisory.sample_period");

        for (name, profile) in [
            ("wind", &self.wind),
            ("irradiance", &self.irradiance),
            ("load", &self.load),
        ] {
            for msg in profile.violations() {
                c.0.push(ValidationError::new(format!("profiles.{name}"), msg));
            }
            if profile.violations().is_empty() {
                c.require(
                    profile.value_range().0 >= 0.0,
                    &format!("profiles.{name}"),
                    "values must be >= 0",
                );
            }
        }

        if c.0.is_empty() {
            Ok(())
        } else {
            Err(c.0)
        }
    }
}
