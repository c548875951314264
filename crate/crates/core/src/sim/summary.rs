use alloc::vec::Vec;

use super::engine::TimeSeries;
use crate::controllers::OperatingMode;
use crate::{Error, Result};

/// Energy totals and dwell statistics of a run. Energies are in Wh.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub duration: f64,
    pub solar_wh: f64,
    pub wind_wh: f64,
    pub load_served_wh: f64,
    pub battery_charge_wh: f64,
    pub battery_discharge_wh: f64,
    pub dump_wh: f64,
    /// Requested but not served load energy, including Mode 3 shedding.
    pub unserved_wh: f64,
    pub final_soc: f64,
    /// Seconds spent in Mode 1..4.
    pub mode_dwell: [f64; 4],
    /// Mean Cp over the final 20 % of each constant-wind segment.
    pub segment_cp: Vec<SegmentCp>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentCp {
    pub start: f64,
    pub end: f64,
    pub wind_speed: f64,
    pub mean_cp: f64,
    pub mean_p_wind: f64,
}

impl Summary {
    /// Solar + wind + battery discharge.
    pub fn sources_wh(&self) -> f64 {
        self.solar_wh + self.wind_wh + self.battery_discharge_wh
    }

    /// Served load + battery charge + dump.
    pub fn sinks_wh(&self) -> f64 {
        self.load_served_wh + self.battery_charge_wh + self.dump_wh
    }

    pub fn dwell(&self, mode: OperatingMode) -> f64 {
        self.mode_dwell[usize::from(mode.number() - 1)]
    }
}

pub fn summarize(series: &TimeSeries) -> Result<Summary> {
    let records = &series.records;
    let last = records.last().ok_or(Error::EmptySeries)?;
    let h = series.dt / 3600.0;
    let mut s = Summary {
        duration: records.len() as f64 * series.dt,
        solar_wh: 0.0,
        wind_wh: 0.0,
        load_served_wh: 0.0,
        battery_charge_wh: 0.0,
        battery_discharge_wh: 0.0,
        dump_wh: 0.0,
        unserved_wh: 0.0,
        final_soc: last.soc,
        mode_dwell: [0.0; 4],
        segment_cp: Vec::new(),
    };
    let mut dwell_steps = [0u64; 4];
    for r in records {
        s.solar_wh += r.p_solar * h;
        s.wind_wh += r.p_wind * h;
        s.load_served_wh += r.p_load_served * h;
        if r.p_battery >= 0.0 {
            s.battery_charge_wh += r.p_battery * h;
        } else {
            s.battery_discharge_wh -= r.p_battery * h;
        }
        s.dump_wh += r.p_dump * h;
        s.unserved_wh += (r.p_load_demand - r.p_load_served).max(0.0) * h;
        dwell_steps[usize::from(r.mode.number() - 1)] += 1;
    }
    for (d, n) in s.mode_dwell.iter_mut().zip(dwell_steps) {
        *d = n as f64 * series.dt;
    }

    // constant-wind segments
    let mut start = 0;
    while start < records.len() {
        let v = records[start].wind_speed;
        let end = records[start..]
            .iter()
            .position(|r| r.wind_speed != v)
            .map_or(records.len(), |p| start + p);
        let len = end - start;
        let tail = &records[end - (len / 5).max(1)..end];
        let n = tail.len() as f64;
        s.segment_cp.push(SegmentCp {
            start: records[start].t,
            end: records[end - 1].t,
            wind_speed: v,
            mean_cp: tail.iter().map(|r| r.cp).sum::<f64>() / n,
            mean_p_wind: tail.iter().map(|r| r.p_wind).sum::<f64>() / n,
        });
        start = end;
    }
    Ok(s)
}
