//! Fixed-step closed-loop engine on a lossless DC bus.

mod engine;
mod summary;

pub use engine::{
    run_scenario, sim_step, Exogenous, Plant, SimState, StepFlags, StepRecord, TimeSeries,
};
pub use summary::{summarize, Summary};
