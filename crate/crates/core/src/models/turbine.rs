//! Fixed-pitch wind turbine: Cp(λ, β) aerodynamics and a rigid direct-drive
//! shaft loaded by an equivalent converter conductance.

use core::f64::consts::PI;

use crate::{Error, Result};

/// Theoretical upper bound on the power coefficient.
pub const BETZ_LIMIT: f64 = 0.593;

/// Below this shaft speed torque is taken from the small-λ limit of the Cp law.
const OMEGA_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindTurbineParams {
    /// Air density, kg/m³.
    pub rho: f64,
    /// Blade radius, m.
    pub radius: f64,
    /// Pitch angle, degrees.
    pub beta: f64,
    /// Cp-law coefficients c1..c6.
    pub c: [f64; 6],
    /// Rotor plus generator inertia, kg·m².
    pub inertia: f64,
    /// Generator EMF constant, V·s/rad.
    pub kv: f64,
    /// Largest equivalent load conductance the converter can present, S.
    pub g_max: f64,
    /// Wind speed above which the wind branch is shut down, m/s.
    pub cut_out: f64,
}

impl Default for WindTurbineParams {
    fn default() -> Self {
        Self {
            rho: 1.29,
            radius: 2.5,
            beta: 0.0,
            c: [0.5176, 116.0, 0.4, 5.0, 21.0, 0.0068],
            inertia: 0.5,
            kv: 1.2,
            g_max: 8.0,
            cut_out: 20.0,
        }
    }
}

impl WindTurbineParams {
    pub fn swept_area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Electrical torque per unit duty per unit shaft speed, N·m·s/rad.
    pub fn load_gain(&self) -> f64 {
        self.g_max * self.kv * self.kv
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrivetrainState {
    /// Shaft speed, rad/s.
    pub omega: f64,
    /// Converter duty command in [0, 1].
    pub duty: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AeroOutput {
    pub power: f64,
    pub torque: f64,
}

fn cube(x: f64) -> f64 {
    x * x * x
}

/// λ = ωR/V.
pub fn tip_speed_ratio(omega: f64, wind_speed: f64, radius: f64) -> Result<f64> {
    if !(wind_speed > 0.0) {
        return Err(Error::Domain {
            what: "wind speed for tip-speed ratio",
            value: wind_speed,
        });
    }
    Ok(omega * radius / wind_speed)
}

/// Unclamped Cp(λ, β). Exposed for curve sweeps and tests; controllers and
/// the simulator use [`power_coefficient`].
pub fn power_coefficient_raw(lambda: f64, beta: f64, params: &WindTurbineParams) -> f64 {
    let [c1, c2, c3, c4, c5, c6] = params.c;
    let inv_lambda_i = 1.0 / (lambda + 0.08 * beta) - 0.035 / (beta * beta * beta + 1.0);
    c1 * (c2 * inv_lambda_i - c3 * beta - c4) * libm::exp(-c5 * inv_lambda_i) + c6 * lambda
}

/// Cp(λ, β) clamped to `[0, BETZ_LIMIT]`.
pub fn power_coefficient(lambda: f64, beta: f64, params: &WindTurbineParams) -> f64 {
    if !(lambda > 0.0) {
        return 0.0;
    }
    power_coefficient_raw(lambda, beta, params).clamp(0.0, BETZ_LIMIT)
}

/// Rotor power ½ρAV³Cp and shaft torque.
pub fn aero_torque_power(wind_speed: f64, omega: f64, params: &WindTurbineParams) -> AeroOutput {
    if !(wind_speed > 0.0) {
        return AeroOutput {
            power: 0.0,
            torque: 0.0,
        };
    }
    let v = wind_speed;
    let lambda = omega * params.radius / v;
    let cp = power_coefficient(lambda, params.beta, params);
    let power = 0.5 * params.rho * params.swept_area() * v * v * v * cp;
    let torque = if omega > OMEGA_EPS {
        power / omega
    } else {
        // Cp ≈ c6·λ near standstill, so P/ω tends to ½ρπR³V²c6.
        0.5 * params.rho * PI * cube(params.radius) * v * v * params.c[5]
    };
    AeroOutput { power, torque }
}

/// K in P = Kω³ and T = Kω² along the optimal-λ locus.
pub fn optimal_k(params: &WindTurbineParams, cp_max: f64, lambda_opt: f64) -> Result<f64> {
    if !(lambda_opt > 0.0) {
        return Err(Error::Domain {
            what: "optimal tip-speed ratio",
            value: lambda_opt,
        });
    }
    Ok(0.5 * params.rho * params.swept_area() * cp_max * cube(params.radius) / cube(lambda_opt))
}

/// Generator + rectifier + converter collapsed into a speed-proportional
/// load torque T_e = u·g_max·kv²·ω. Raising the duty loads the shaft harder.
pub fn electrical_torque(duty: f64, omega: f64, params: &WindTurbineParams) -> f64 {
    duty * params.load_gain() * omega
}

/// One RK4 step of J·dω/dt = net_torque(ω), clamped at ω = 0.
pub fn integrate_shaft(omega: f64, dt: f64, inertia: f64, net_torque: impl Fn(f64) -> f64) -> f64 {
    let f = |w: f64| net_torque(w.max(0.0)) / inertia;
    let k1 = f(omega);
    let k2 = f(omega + 0.5 * dt * k1);
    let k3 = f(omega + 0.5 * dt * k2);
    let k4 = f(omega + dt * k3);
    (omega + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).max(0.0)
}

/// Advances the shaft with torques held constant over the step.
pub fn drivetrain_step(
    state: DrivetrainState,
    t_aero: f64,
    t_elec: f64,
    dt: f64,
    params: &WindTurbineParams,
) -> DrivetrainState {
    DrivetrainState {
        omega: integrate_shaft(state.omega, dt, params.inertia, |_| t_aero - t_elec),
        duty: state.duty,
    }
}
