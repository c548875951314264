//! Online controllers: wind hill climbing, solar extremum seeking and the
//! supervisory dispatcher.

pub mod esc;
pub mod po;
pub mod supervisory;

pub use esc::{esc_step, EscConfig, EscState};
pub use po::{perturbation_direction, po_step, Direction, PoConfig, PoState};
pub use supervisory::{
    compute_delta_p, dispatch, select_mode, wind_cutout, BatteryLimits, OperatingMode, PowerFlows,
    SupervisoryConfig,
};
