use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::controllers::{
    compute_delta_p, dispatch, esc_step, po_step, select_mode, wind_cutout, BatteryLimits,
    EscConfig, EscState, OperatingMode, PoConfig, PoState, SupervisoryConfig,
};
use crate::models::{
    aero_torque_power, battery_step, electrical_torque, fit_pv_model, integrate_shaft,
    power_coefficient, BatteryParams, BatteryState, DrivetrainState, PvDiodeModel,
    WindTurbineParams,
};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Everything constant over a run: component parameters, the fitted PV model
/// and controller tunings.
#[derive(Clone, Debug, PartialEq)]
pub struct Plant {
    pub turbine: WindTurbineParams,
    pub pv: PvDiodeModel,
    pub battery: BatteryParams,
    pub po: PoConfig,
    pub esc: EscConfig,
    pub supervisory: SupervisoryConfig,
    pub wind_efficiency: f64,
    pub solar_efficiency: f64,
    pub dt: f64,
    po_every: u64,
    supervisory_every: u64,
}

impl Plant {
    pub fn from_scenario(scenario: &Scenario) -> Result<Self> {
        scenario.validate().map_err(Error::Invalid)?;
        let every = |period: f64| (libm::round(period / scenario.dt) as u64).max(1);
        Ok(Self {
            turbine: scenario.turbine,
            pv: fit_pv_model(&scenario.pv)?,
            battery: scenario.battery,
            po: scenario.po,
            esc: scenario.esc,
            supervisory: scenario.supervisory,
            wind_efficiency: scenario.wind_efficiency,
            solar_efficiency: scenario.solar_efficiency,
            dt: scenario.dt,
            po_every: every(scenario.po.sample_period),
            supervisory_every: every(scenario.supervisory.sample_period),
        })
    }

    fn battery_limits(&self) -> BatteryLimits {
        BatteryLimits {
            max_charge_w: self.battery.max_charge_w,
            max_discharge_w: self.battery.max_discharge_w,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimState {
    /// Simulation time at the end of the last completed step, s.
    pub time: f64,
    /// Number of completed steps.
    pub steps: u64,
    pub drivetrain: DrivetrainState,
    pub po: PoState,
    pub esc: EscState,
    pub battery: BatteryState,
    pub mode: OperatingMode,
    pub wind_active: bool,
    /// Conductance command currently applied to the PV converter, S.
    pub g1: f64,
    /// PV power measured at the end of the previous step, W.
    pub p_solar_measured: Option<f64>,
}

impl SimState {
    /// Start-up state: shaft at `initial_omega`, controllers at their
    /// configured initial commands, Mode 1.
    pub fn initial(scenario: &Scenario) -> Self {
        Self {
            time: 0.0,
            steps: 0,
            drivetrain: DrivetrainState {
                omega: scenario.initial_omega,
                duty: scenario.po.initial_duty,
            },
            po: PoState::new(scenario.po.initial_duty),
            esc: EscState::new(scenario.esc.initial_g),
            battery: BatteryState {
                soc: scenario.initial_soc,
            },
            mode: OperatingMode::FeedAndCharge,
            wind_active: true,
            g1: scenario.esc.initial_g,
            p_solar_measured: None,
        }
    }
}

/// Exogenous inputs for one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exogenous {
    pub wind_speed: f64,
    pub irradiance: f64,
    pub p_load_demand: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepFlags {
    /// SOC saturated or battery power hit a limit.
    pub clamp: bool,
    /// Load shed because the battery could not cover the deficit.
    pub unserved: bool,
    /// Wind branch shut down for high wind.
    pub cutout: bool,
}

/// Post-step values of one simulation step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub wind_speed: f64,
    pub irradiance: f64,
    pub omega: f64,
    pub lambda: f64,
    pub cp: f64,
    pub p_wind: f64,
    pub duty: f64,
    pub v_pv: f64,
    pub i_pv: f64,
    pub g1: f64,
    pub p_solar: f64,
    pub delta_p: f64,
    pub mode: OperatingMode,
    pub soc: f64,
    pub p_battery: f64,
    pub p_load_served: f64,
    pub p_dump: f64,
    pub flags: StepFlags,
    /// Requested load, W. Not part of the CSV schema.
    pub p_load_demand: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub dt: f64,
    pub records: Vec<StepRecord>,
}

/// Advances the closed loop by one step of `plant.dt`.
///
/// Order within a step: cut-out check, shaft integration at the held duty,
/// ESC update and PV operating point, P&O sample, supervisory decision and
/// dispatch, battery integration.
pub fn sim_step(
    state: &SimState,
    inputs: Exogenous,
    plant: &Plant,
) -> Result<(SimState, StepRecord)> {
    let dt = plant.dt;
    let k = state.steps;
    let time = (k + 1) as f64 * dt;
    let mut next = *state;
    next.time = time;
    next.steps = k + 1;
    let tp = &plant.turbine;

    // (1) wind branch enable
    let was_active = state.wind_active;
    next.wind_active = wind_cutout(inputs.wind_speed, tp, was_active);
    if !next.wind_active {
        next.drivetrain.duty = 0.0;
    } else if !was_active {
        next.po = PoState::new(0.0);
        next.drivetrain.duty = 0.0;
    }

    // (2) shaft dynamics at the held duty
    let duty = next.drivetrain.duty;
    let omega = integrate_shaft(state.drivetrain.omega, dt, tp.inertia, |w| {
        aero_torque_power(inputs.wind_speed, w, tp).torque - electrical_torque(duty, w, tp)
    });
    next.drivetrain.omega = omega;
    let p_converter = electrical_torque(duty, omega, tp) * omega;

    // (3) solar extremum seeking
    let measured = match state.p_solar_measured {
        Some(p) => p,
        None => {
            let op = plant
                .pv
                .operating_point(state.g1, inputs.irradiance)
                .map_err(|e| at(time, e))?;
            state.g1 * op.v * op.v
        }
    };
    let (g1, esc) = esc_step(&state.esc, &plant.esc, measured, dt);
    next.esc = esc;
    next.g1 = g1;
    let op = plant
        .pv
        .operating_point(g1, inputs.irradiance)
        .map_err(|e| at(time, e))?;
    let p_pv = g1 * op.v * op.v;
    next.p_solar_measured = Some(p_pv);

    // (4) wind hill climbing at its own cadence
    if next.wind_active && k.is_multiple_of(plant.po_every) {
        let (d, po) = po_step(&next.po, &plant.po, p_converter, omega);
        next.po = po;
        next.drivetrain.duty = d;
    }

    // (5) supervisory
    let p_s = plant.solar_efficiency * p_pv;
    let p_w = if next.wind_active {
        plant.wind_efficiency * p_converter
    } else {
        0.0
    };
    let delta_p = compute_delta_p(p_s, p_w, inputs.p_load_demand);
    if k.is_multiple_of(plant.supervisory_every) {
        next.mode = select_mode(delta_p, state.battery.soc, &plant.supervisory, state.mode);
    }
    let flows = dispatch(
        next.mode,
        p_s,
        p_w,
        inputs.p_load_demand,
        &plant.supervisory,
        &plant.battery_limits(),
    );

    // (6) battery
    let (battery, soc_clamped) = battery_step(state.battery, flows.p_battery, dt, &plant.battery);
    next.battery = battery;

    let lambda = if inputs.wind_speed > 0.0 {
        omega * tp.radius / inputs.wind_speed
    } else {
        0.0
    };
    let record = StepRecord {
        t: time,
        wind_speed: inputs.wind_speed,
        irradiance: inputs.irradiance,
        omega,
        lambda,
        cp: power_coefficient(lambda, tp.beta, tp),
        p_wind: p_w,
        duty: next.drivetrain.duty,
        v_pv: op.v,
        i_pv: op.i,
        g1,
        p_solar: p_s,
        delta_p,
        mode: next.mode,
        soc: battery.soc,
        p_battery: flows.p_battery,
        p_load_served: flows.p_load_served,
        p_dump: flows.p_dump,
        flags: StepFlags {
            clamp: soc_clamped || flows.battery_clamped,
            unserved: flows.unserved,
            cutout: !next.wind_active,
        },
        p_load_demand: inputs.p_load_demand,
    };
    Ok((next, record))
}

fn at(time: f64, e: Error) -> Error {
    Error::Step {
        time,
        source: Box::new(e),
    }
}

/// Runs a validated scenario from t = 0 to its duration. Inputs for each
/// step are sampled at the step's end time.
pub fn run_scenario(scenario: &Scenario) -> Result<TimeSeries> {
    let plant = Plant::from_scenario(scenario)?;
    let n = scenario.step_count();
    let mut state = SimState::initial(scenario);
    let mut records = Vec::with_capacity(n);
    for k in 0..n {
        let t = (k + 1) as f64 * scenario.dt;
        let inputs = Exogenous {
            wind_speed: scenario.wind.sample(t),
            irradiance: scenario.irradiance.sample(t),
            p_load_demand: scenario.load.sample(t),
        };
        let (s, rec) = sim_step(&state, inputs, &plant)?;
        state = s;
        records.push(rec);
    }
    Ok(TimeSeries {
        dt: scenario.dt,
        records,
    })
}
