//! Battery as an ideal energy integrator at a fixed nominal voltage.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatteryParams {
    /// Capacity, Ah.
    pub capacity: f64,
    /// Nominal voltage, V.
    pub v_nominal: f64,
    /// Charge power limit, W (≥ 0).
    pub max_charge_w: f64,
    /// Discharge power limit, W (≥ 0).
    pub max_discharge_w: f64,
}

impl Default for BatteryParams {
    fn default() -> Self {
        Self {
            capacity: 900.0,
            v_nominal: 120.0,
            max_charge_w: 20_000.0,
            max_discharge_w: 20_000.0,
        }
    }
}

impl BatteryParams {
    /// Stored energy at 100 % SOC, Wh.
    pub fn energy_capacity_wh(&self) -> f64 {
        self.capacity * self.v_nominal
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatteryState {
    /// State of charge, percent in [0, 100].
    pub soc: f64,
}

/// Integrates `power` (W, positive = charging) over `dt` seconds.
///
/// Returns the new state and whether the SOC had to be clamped to [0, 100].
pub fn battery_step(
    state: BatteryState,
    power: f64,
    dt: f64,
    params: &BatteryParams,
) -> (BatteryState, bool) {
    let soc = state.soc + 100.0 * (power * dt / 3600.0) / params.energy_capacity_wh();
    let clamped = soc.clamp(0.0, 100.0);
    (BatteryState { soc: clamped }, clamped != soc)
}
