//! Four-mode supervisory control of the DC bus.
//!
//! | mode | condition                  | effect                                   |
//! |------|----------------------------|------------------------------------------|
//! | 1    | ΔP ≥ 0, SOC ≤ soc_high     | feed load, charge battery with surplus   |
//! | 2    | ΔP ≥ 0, SOC > soc_high     | feed load, float battery, dump surplus   |
//! | 3    | ΔP < 0, SOC < soc_low      | shed load, all generation to battery     |
//! | 4    | ΔP < 0, SOC ≥ soc_low      | feed load, battery covers the deficit    |

use core::fmt;

use crate::models::WindTurbineParams;

/// Re-arm margin below the cut-out speed, m/s.
pub const CUTOUT_REARM_MARGIN: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupervisoryConfig {
    /// Percent.
    pub soc_high: f64,
    /// Percent.
    pub soc_low: f64,
    /// Percent.
    pub soc_hysteresis: f64,
    /// |ΔP| below this (W) counts as a surplus.
    pub dp_deadband: f64,
    /// Battery charge power held in Mode 2, W.
    pub float_charge_w: f64,
    /// Seconds between mode decisions.
    pub sample_period: f64,
}

impl Default for SupervisoryConfig {
    fn default() -> Self {
        Self {
            soc_high: 95.0,
            soc_low: 40.0,
            soc_hysteresis: 1.0,
            dp_deadband: 50.0,
            float_charge_w: 0.0,
            sample_period: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatingMode {
    FeedAndCharge,
    FeedWithDump,
    ChargeOnlyLoadOff,
    FeedWithDischarge,
}

impl OperatingMode {
    pub const ALL: [OperatingMode; 4] = [
        OperatingMode::FeedAndCharge,
        OperatingMode::FeedWithDump,
        OperatingMode::ChargeOnlyLoadOff,
        OperatingMode::FeedWithDischarge,
    ];

    /// Mode number 1-4.
    pub fn number(self) -> u8 {
        match self {
            OperatingMode::FeedAndCharge => 1,
            OperatingMode::FeedWithDump => 2,
            OperatingMode::ChargeOnlyLoadOff => 3,
            OperatingMode::FeedWithDischarge => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }
}

impl fmt::Display for OperatingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mode{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatteryLimits {
    pub max_charge_w: f64,
    pub max_discharge_w: f64,
}

/// Signed split of the bus power. `p_battery` is positive when charging.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerFlows {
    pub p_load_served: f64,
    pub p_battery: f64,
    pub p_dump: f64,
    /// Battery power hit a charge or discharge limit.
    pub battery_clamped: bool,
    /// Load was shed because the battery could not cover the deficit.
    pub unserved: bool,
}

impl PowerFlows {
    /// `p_s + p_w − served − battery − dump`; zero by construction.
    pub fn residual(&self, p_s: f64, p_w: f64) -> f64 {
        p_s + p_w - self.p_load_served - self.p_battery - self.p_dump
    }
}

/// Net power left for the battery after the load: ΔP = Ps + Pw − Pload.
pub fn compute_delta_p(p_s: f64, p_w: f64, p_load: f64) -> f64 {
    p_s + p_w - p_load
}

pub fn select_mode(
    delta_p: f64,
    soc: f64,
    config: &SupervisoryConfig,
    prev_mode: OperatingMode,
) -> OperatingMode {
    use OperatingMode::*;
    let surplus = delta_p >= 0.0 || delta_p.abs() < config.dp_deadband;
    if surplus {
        let full = if prev_mode == FeedWithDump {
            soc >= config.soc_high - config.soc_hysteresis
        } else {
            soc > config.soc_high
        };
        if full {
            FeedWithDump
        } else {
            FeedAndCharge
        }
    } else {
        let depleted = if prev_mode == ChargeOnlyLoadOff {
            soc <= config.soc_low + config.soc_hysteresis
        } else {
            soc < config.soc_low
        };
        if depleted {
            ChargeOnlyLoadOff
        } else {
            FeedWithDischarge
        }
    }
}

/// Splits generation between load, battery and dump load for `mode`.
///
/// The dump power is always computed last as the bus residual, which keeps
/// the balance exact in floating point.
pub fn dispatch(
    mode: OperatingMode,
    p_s: f64,
    p_w: f64,
    p_load_demand: f64,
    config: &SupervisoryConfig,
    limits: &BatteryLimits,
) -> PowerFlows {
    use OperatingMode::*;
    let supply = p_s + p_w;
    let delta_p = supply - p_load_demand;

    let (served, target) = match mode {
        // Between supervisory instants ΔP can dip below zero while the
        // latched mode is 1 or 2; the battery rides through until the next
        // decision.
        FeedAndCharge | FeedWithDischarge => (p_load_demand, delta_p),
        FeedWithDump => (p_load_demand, delta_p.min(config.float_charge_w)),
        ChargeOnlyLoadOff => (0.0, supply),
    };

    let mut flows = PowerFlows {
        p_load_served: served,
        p_battery: target,
        p_dump: 0.0,
        battery_clamped: false,
        unserved: false,
    };
    if target < -limits.max_discharge_w {
        // binary load service: shed it and charge with whatever is available
        flows.p_load_served = 0.0;
        flows.p_battery = supply;
        flows.unserved = true;
        flows.battery_clamped = true;
    }
    if flows.p_battery > limits.max_charge_w {
        flows.p_battery = limits.max_charge_w;
        flows.battery_clamped = true;
    }
    flows.p_dump = supply - flows.p_load_served - flows.p_battery;
    flows
}

/// Wind-branch enable with hysteresis: trips above `cut_out`, re-arms below
/// `cut_out − 2 m/s`.
pub fn wind_cutout(wind_speed: f64, params: &WindTurbineParams, currently_active: bool) -> bool {
    if currently_active {
        wind_speed <= params.cut_out
    } else {
        wind_speed < params.cut_out - CUTOUT_REARM_MARGIN
    }
}
