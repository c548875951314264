//! Extremum-seeking control of the PV loss-free-resistor conductance.
//!
//! A sinusoidal dither on the conductance command shows up in the measured
//! power with an amplitude proportional to dP/dg. High-pass filtering removes
//! the operating-point level, multiplying by the dither demodulates the
//! gradient, and an integrator walks the estimate uphill.

use core::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscConfig {
    /// Dither frequency, Hz.
    pub dither_freq: f64,
    /// Dither amplitude, S.
    pub dither_amp: f64,
    /// High-pass corner, Hz.
    pub hpf_cutoff: f64,
    /// Integrator gain, S per W·s.
    pub gain: f64,
    pub g_min: f64,
    pub g_max: f64,
    /// Conductance estimate at start-up, S.
    pub initial_g: f64,
}

impl Default for EscConfig {
    fn default() -> Self {
        Self {
            dither_freq: 25.0,
            dither_amp: 0.004,
            hpf_cutoff: 5.0,
            gain: 0.05,
            g_min: 0.01,
            g_max: 2.0,
            initial_g: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscState {
    /// Conductance estimate, S.
    pub g_hat: f64,
    /// Low-pass state of the power measurement, W. `None` until the first
    /// sample, which primes it so the filter starts without a step transient.
    pub hpf_state: Option<f64>,
    /// Dither phase, rad in [0, 2π).
    pub phase: f64,
}

impl EscState {
    pub fn new(g_hat: f64) -> Self {
        Self {
            g_hat,
            hpf_state: None,
            phase: 0.0,
        }
    }
}

/// Advances the controller by `dt` given the latest power measurement and
/// returns the conductance command g1 = ĝ + a·sin(φ).
pub fn esc_step(
    state: &EscState,
    config: &EscConfig,
    measured_power: f64,
    dt: f64,
) -> (f64, EscState) {
    let lp = state.hpf_state.unwrap_or(measured_power);
    let alpha = -libm::expm1(-TAU * config.hpf_cutoff * dt);
    let lp = lp + alpha * (measured_power - lp);
    let high_passed = measured_power - lp;

    let s = libm::sin(state.phase);
    let g_hat =
        (state.g_hat + config.gain * high_passed * s * dt).clamp(config.g_min, config.g_max);
    let g1 = g_hat + config.dither_amp * s;

    let mut phase = state.phase + TAU * config.dither_freq * dt;
    if phase >= TAU {
        phase -= TAU;
    }
    (
        g1,
        EscState {
            g_hat,
            hpf_state: Some(lp),
            phase,
        },
    )
}
