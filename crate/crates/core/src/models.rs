//! Physical component models.

pub mod battery;
pub mod pv;
pub mod turbine;

pub use battery::{battery_step, BatteryParams, BatteryState};
pub use pv::{fit_pv_model, MppPoint, OperatingPoint, PvDatasheet, PvDiodeModel};
pub use turbine::{
    aero_torque_power, drivetrain_step, electrical_torque, integrate_shaft, optimal_k,
    power_coefficient, tip_speed_ratio, AeroOutput, DrivetrainState, WindTurbineParams,
};
