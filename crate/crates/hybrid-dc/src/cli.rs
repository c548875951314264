//! Command-line front end. Exit codes: 0 success, 1 runtime or validation
//! failure, 2 usage error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hybrid_dc_core::controllers::OperatingMode;
use hybrid_dc_core::models::turbine::WindTurbineParams;
use hybrid_dc_core::models::{fit_pv_model, PvDatasheet};
use hybrid_dc_core::scenario::Scenario;
use hybrid_dc_core::sim::{run_scenario, summarize, Summary};

use crate::{curves, parse_scenario, write_csv, Error};

#[derive(Debug, Parser)]
#[command(
    name = "hybrid-dc",
    version,
    about = "Wind/PV/battery DC micro-grid simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write the time series as CSV.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Print energy totals and per-segment Cp to stdout.
        #[arg(long)]
        summary: bool,
    },
    /// Write a static model curve as CSV.
    Curves {
        kind: CurveKind,
        /// Pitch angle for cp-lambda, degrees.
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 13.0)]
        lambda_max: f64,
        /// Irradiance for pv, W/m².
        #[arg(long, default_value_t = 1000.0)]
        irradiance: f64,
        /// Comma-separated wind speeds for turbine-power, m/s.
        #[arg(long, value_delimiter = ',', default_value = "6,8,10,12")]
        wind: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the PV maximum power point at one irradiance.
    MppOracle {
        #[arg(long, default_value_t = 1000.0)]
        irradiance: f64,
    },
    /// Check a scenario file without running it.
    Validate { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    CpLambda,
    Pv,
    TurbinePower,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(Error::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn load_scenario(path: &Path, stderr: &mut dyn Write) -> Result<Scenario, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = parse_scenario(&text)?;
    for w in &parsed.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(parsed.scenario)
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Error> {
    match cmd {
        Command::Run {
            scenario,
            out,
            summary,
        } => {
            let sc = load_scenario(&scenario, stderr)?;
            let series = run_scenario(&sc)?;
            write_csv(&series, create(&out)?)?;
            if summary {
                let s = summarize(&series)?;
                write_summary(&s, stdout).map_err(|e| Error::io("<stdout>", e))?;
            }
        }
        Command::Curves {
            kind,
            beta,
            lambda_max,
            irradiance,
            wind,
            out,
        } => {
            let check = |ok: bool, msg: &str| {
                if ok {
                    Ok(())
                } else {
                    Err(Error::Usage(msg.into()))
                }
            };
            let turbine = WindTurbineParams::default();
            match kind {
                CurveKind::CpLambda => {
                    check(beta.is_finite() && beta >= 0.0, "--beta must be >= 0")?;
                    check(
                        lambda_max.is_finite() && lambda_max > 0.0,
                        "--lambda-max must be > 0",
                    )?;
                    curves::cp_lambda(&turbine, beta, lambda_max, create(&out)?)?;
                }
                CurveKind::Pv => {
                    check(
                        irradiance.is_finite() && irradiance > 0.0,
                        "--irradiance must be > 0",
                    )?;
                    let model = fit_pv_model(&PvDatasheet::default())?;
                    curves::pv_curve(&model, irradiance, create(&out)?)?;
                }
                CurveKind::TurbinePower => {
                    check(
                        !wind.is_empty() && wind.iter().all(|v| v.is_finite() && *v > 0.0),
                        "--wind must list positive speeds",
                    )?;
                    curves::turbine_power(&turbine, &wind, create(&out)?)?;
                }
            }
        }
        Command::MppOracle { irradiance } => {
            if !(irradiance.is_finite() && irradiance > 0.0) {
                return Err(Error::Usage("--irradiance must be > 0".into()));
            }
            let model = fit_pv_model(&PvDatasheet::default())?;
            let mpp = model.mpp_oracle(irradiance)?;
            writeln!(stdout, "v_star,p_star\n{:.3},{:.3}", mpp.v, mpp.p)
                .map_err(|e| Error::io("<stdout>", e))?;
        }
        Command::Validate { path } => {
            load_scenario(&path, stderr)?;
            writeln!(stdout, "{}: ok", path.display()).map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn write_summary(s: &Summary, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "duration_s        {:.3}", s.duration)?;
    writeln!(out, "solar_wh          {:.3}", s.solar_wh)?;
    writeln!(out, "wind_wh           {:.3}", s.wind_wh)?;
    writeln!(out, "load_served_wh    {:.3}", s.load_served_wh)?;
    writeln!(out, "battery_charge_wh {:.3}", s.battery_charge_wh)?;
    writeln!(out, "battery_disch_wh  {:.3}", s.battery_discharge_wh)?;
    writeln!(out, "dump_wh           {:.3}", s.dump_wh)?;
    writeln!(out, "unserved_wh       {:.3}", s.unserved_wh)?;
    writeln!(out, "final_soc         {:.4}", s.final_soc)?;
    for mode in OperatingMode::ALL {
        writeln!(out, "dwell_{mode}_s      {:.3}", s.dwell(mode))?;
    }
    for seg in &s.segment_cp {
        writeln!(
            out,
            "segment {:.3}-{:.3} s  V={:.2} m/s  mean_cp={:.4}  mean_p_wind={:.1} W",
            seg.start, seg.end, seg.wind_speed, seg.mean_cp, seg.mean_p_wind
        )?;
    }
    Ok(())
}
