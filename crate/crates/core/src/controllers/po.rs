//! Perturb-and-observe MPPT on the wind converter duty.
//!
//! The direction of the last duty perturbation is read off the shaft speed
//! (a larger duty loads the rotor and slows it), so the decision table is:
//!
//! | ΔP | Δω | next perturbation |
//! |----|----|-------------------|
//! | +  | +  | decrease duty     |
//! | −  | −  | decrease duty     |
//! | +  | −  | increase duty     |
//! | −  | +  | increase duty     |

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increase,
    Decrease,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Increase => 1.0,
            Direction::Decrease => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Increase => Direction::Decrease,
            Direction::Decrease => Direction::Increase,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoConfig {
    /// Seconds between controller samples.
    pub sample_period: f64,
    /// Duty increment per sample.
    pub duty_step: f64,
    pub duty_min: f64,
    pub duty_max: f64,
    /// Duty at start-up.
    pub initial_duty: f64,
}

impl Default for PoConfig {
    fn default() -> Self {
        Self {
            sample_period: 0.25,
            duty_step: 0.02,
            duty_min: 0.0,
            duty_max: 1.0,
            initial_duty: 0.3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoState {
    pub prev_power: f64,
    pub prev_omega: f64,
    pub prev_direction: Direction,
    pub duty: f64,
}

impl PoState {
    pub fn new(duty: f64) -> Self {
        Self {
            prev_power: 0.0,
            prev_omega: 0.0,
            prev_direction: Direction::Increase,
            duty,
        }
    }
}

/// The hill-climbing decision law: −sign(ΔP·Δω), ties keep `prev`.
pub fn perturbation_direction(delta_p: f64, delta_omega: f64, prev: Direction) -> Direction {
    if delta_p == 0.0 || delta_omega == 0.0 {
        return prev;
    }
    if (delta_p > 0.0) == (delta_omega > 0.0) {
        Direction::Decrease
    } else {
        Direction::Increase
    }
}

/// One controller sample with measured converter power `p_k` and shaft speed
/// `omega_k`. Returns the new duty.
pub fn po_step(state: &PoState, config: &PoConfig, p_k: f64, omega_k: f64) -> (f64, PoState) {
    let delta_p = p_k - state.prev_power;
    let delta_omega = omega_k - state.prev_omega;
    let mut dir = perturbation_direction(delta_p, delta_omega, state.prev_direction);
    if delta_p == 0.0 || delta_omega == 0.0 {
        // A tie pinned against a duty limit would otherwise repeat forever
        // (e.g. duty 0 gives P = 0 at any speed).
        let pinned_low = state.duty <= config.duty_min && dir == Direction::Decrease;
        let pinned_high = state.duty >= config.duty_max && dir == Direction::Increase;
        if pinned_low || pinned_high {
            dir = dir.reversed();
        }
    }
    let duty = (state.duty + dir.sign() * config.duty_step).clamp(config.duty_min, config.duty_max);
    (
        duty,
        PoState {
            prev_power: p_k,
            prev_omega: omega_k,
            prev_direction: dir,
            duty,
        },
    )
}
