//! End-to-end acceptance checks. Runs without the libtest harness and
//! prints one PASS/FAIL line per criterion; exits non-zero on any failure.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hybrid_dc::{parse_scenario, write_csv};
use hybrid_dc_core::controllers::{
    esc_step, perturbation_direction, Direction, EscConfig, EscState, OperatingMode,
};
use hybrid_dc_core::models::turbine::{power_coefficient, WindTurbineParams};
use hybrid_dc_core::models::{fit_pv_model, PvDatasheet, PvDiodeModel};
use hybrid_dc_core::scenario::{Profile, Scenario};
use hybrid_dc_core::sim::{run_scenario, StepRecord, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_scenario(&text)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .scenario
}

fn run(name: &str) -> Result<(Scenario, TimeSeries), String> {
    let sc = load(name);
    let series = run_scenario(&sc).map_err(|e| e.to_string())?;
    Ok((sc, series))
}

/// Splits records into maximal runs on which `key` is constant.
fn segments(records: &[StepRecord], key: impl Fn(&StepRecord) -> f64) -> Vec<&[StepRecord]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=records.len() {
        if i == records.len() || key(&records[i]) != key(&records[start]) {
            out.push(&records[start..i]);
            start = i;
        }
    }
    out
}

fn tail_mean(seg: &[StepRecord], f: impl Fn(&StepRecord) -> f64) -> f64 {
    let n = (seg.len() as f64 * 0.2).ceil() as usize;
    let tail = &seg[seg.len() - n..];
    tail.iter().map(f).sum::<f64>() / n as f64
}

/// Dense scan of Cp over λ in [0.5, 13].
fn cp_scan(params: &WindTurbineParams) -> (f64, f64) {
    (0..=12_500)
        .map(|k| 0.5 + k as f64 * 0.001)
        .map(|l| (l, power_coefficient(l, 0.0, params)))
        .fold(
            (0.0, f64::MIN),
            |best, c| if c.1 > best.1 { c } else { best },
        )
}

fn wind_mppt(name: &str) -> Check {
    let (sc, series) = run(name)?;
    let tp = &sc.turbine;
    let (lambda_opt, cp_max) = cp_scan(tp);
    let area = PI * tp.radius * tp.radius;
    let k_opt = 0.5 * tp.rho * area * cp_max * tp.radius.powi(3) / lambda_opt.powi(3);
    let mut report = Vec::new();
    for seg in segments(&series.records, |r| r.wind_speed) {
        let v = seg[0].wind_speed;
        let cp = tail_mean(seg, |r| r.cp);
        let p = tail_mean(seg, |r| r.p_wind);
        let p_ref = k_opt * (lambda_opt * v / tp.radius).powi(3);
        let err = (p - p_ref).abs() / p_ref;
        ensure(cp >= 0.46, || format!("V={v}: mean Cp {cp:.4} < 0.46"))?;
        ensure(err <= 0.08, || {
            format!(
                "V={v}: mean p_wind {p:.1} W vs {p_ref:.1} W ({:.2}%)",
                err * 100.0
            )
        })?;
        report.push(format!("V={v}: Cp {cp:.4}, P {p:.0}/{p_ref:.0} W"));
    }
    ensure(report.len() == 2, || {
        format!("expected 2 wind segments, got {}", report.len())
    })?;
    Ok(report.join("; "))
}

/// Independent MPP search: 10 mV scan refined by golden section.
fn mpp_scan(model: &PvDiodeModel, g: f64) -> f64 {
    let p = |v: f64| v * model.current(v, g).expect("current");
    let voc = model.open_circuit_voltage(g);
    let n = (voc / 0.01) as usize;
    let k = (0..=n)
        .max_by(|a, b| p(*a as f64 * 0.01).total_cmp(&p(*b as f64 * 0.01)))
        .unwrap();
    let (mut lo, mut hi) = ((k as f64 - 1.0) * 0.01, ((k as f64 + 1.0) * 0.01).min(voc));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let (a, b) = (hi - r * (hi - lo), lo + r * (hi - lo));
        if p(a) < p(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    p(0.5 * (lo + hi))
}

fn a1() -> Check {
    let cp = power_coefficient(8.1, 0.0, &WindTurbineParams::default());
    ensure((0.475..=0.485).contains(&cp), || {
        format!("Cp(8.1, 0) = {cp}")
    })?;
    Ok(format!("Cp(8.1, 0) = {cp:.5}"))
}

fn a2() -> Check {
    let (l, cp) = cp_scan(&WindTurbineParams::default());
    ensure((7.9..=8.3).contains(&l), || format!("argmax λ = {l}"))?;
    Ok(format!("argmax λ = {l:.3}, Cp = {cp:.5}"))
}

fn a3() -> Check {
    wind_mppt("fig5.scn")
}

fn a4() -> Check {
    wind_mppt("fig6.scn")
}

fn a5() -> Check {
    let (sc, series) = run("fig11.scn")?;
    let model = fit_pv_model(&sc.pv).map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    for seg in segments(&series.records, |r| r.irradiance) {
        let g = seg[0].irradiance;
        let p = tail_mean(seg, |r| r.p_solar);
        let p_star = mpp_scan(&model, g);
        let oracle = model.mpp_oracle(g).map_err(|e| e.to_string())?.p;
        ensure((oracle - p_star).abs() <= 1e-3 * p_star, || {
            format!("G={g}: oracle {oracle} disagrees with scan {p_star}")
        })?;
        let err = (p - p_star).abs() / p_star;
        ensure(err <= 0.02, || {
            format!(
                "G={g}: tracked {p:.1} W vs MPP {p_star:.1} W ({:.2}%)",
                err * 100.0
            )
        })?;
        report.push(format!("G={g}: {p:.1}/{p_star:.1} W"));
    }
    ensure(report.len() == 2, || {
        format!("expected 2 irradiance segments, got {}", report.len())
    })?;
    Ok(report.join("; "))
}

fn a6() -> Check {
    let m = fit_pv_model(&PvDatasheet::default()).map_err(|e| e.to_string())?;
    let i0 = m.current(0.0, 1000.0).map_err(|e| e.to_string())?;
    let i129 = m.current(129.0, 1000.0).map_err(|e| e.to_string())?;
    let p = 105.6 * m.current(105.6, 1000.0).map_err(|e| e.to_string())?;
    ensure((i0 - 19.2).abs() <= 0.01, || format!("i(0) = {i0}"))?;
    ensure(i129.abs() <= 0.01, || format!("i(129) = {i129}"))?;
    ensure((p - 1800.0).abs() <= 0.03 * 1800.0, || {
        format!("P(105.6) = {p}")
    })?;
    Ok(format!(
        "i(0) = {i0:.4} A, i(129) = {i129:.2e} A, P(105.6) = {p:.1} W"
    ))
}

fn supervisory_instants<'a>(
    sc: &Scenario,
    series: &'a TimeSeries,
) -> impl Iterator<Item = &'a StepRecord> {
    let every = (sc.supervisory.sample_period / sc.dt).round() as usize;
    series.records.iter().step_by(every)
}

fn a7() -> Check {
    use OperatingMode::*;
    let (sc, series) = run("fig12.scn")?;
    let db = sc.supervisory.dp_deadband;
    let mut seen = [false; 2];
    for r in supervisory_instants(&sc, &series) {
        ensure(matches!(r.mode, FeedAndCharge | FeedWithDischarge), || {
            format!("t={}: {}", r.t, r.mode)
        })?;
        seen[usize::from(r.mode == FeedWithDischarge)] = true;
    }
    let mut checked = 0;
    for r in series.records.iter().filter(|r| r.delta_p.abs() >= db) {
        ensure(r.p_battery.signum() == r.delta_p.signum(), || {
            format!("t={}: p_battery {} vs ΔP {}", r.t, r.p_battery, r.delta_p)
        })?;
        checked += 1;
    }
    ensure(seen == [true, true], || format!("modes visited {seen:?}"))?;
    Ok(format!("Mode1/Mode4 only; sign law on {checked} steps"))
}

fn a8() -> Check {
    let (sc, series) = run("fig13.scn")?;
    let cfg = &sc.supervisory;
    let mut instants = 0;
    for r in supervisory_instants(&sc, &series).filter(|r| r.delta_p >= cfg.dp_deadband) {
        ensure(r.mode == OperatingMode::FeedWithDump, || {
            format!("t={}: {}", r.t, r.mode)
        })?;
        instants += 1;
    }
    let mut steps = 0;
    for r in &series.records {
        ensure(r.soc <= 100.0, || format!("t={}: SOC {}", r.t, r.soc))?;
        if r.mode == OperatingMode::FeedWithDump && r.delta_p >= cfg.dp_deadband {
            let want = r.delta_p - cfg.float_charge_w;
            ensure(
                (r.p_dump - want).abs() <= 1e-9 * want.abs().max(1.0),
                || format!("t={}: p_dump {} vs {want}", r.t, r.p_dump),
            )?;
            steps += 1;
        }
    }
    ensure(instants > 0, || "no surplus instants".into())?;
    Ok(format!(
        "Mode2 at {instants} instants; dump law on {steps} steps"
    ))
}

fn a9() -> Check {
    let (sc, series) = run("fig14.scn")?;
    let mut prev = sc.initial_soc;
    for r in &series.records {
        ensure(r.mode == OperatingMode::ChargeOnlyLoadOff, || {
            format!("t={}: {}", r.t, r.mode)
        })?;
        ensure(r.p_load_served == 0.0, || {
            format!("t={}: served {}", r.t, r.p_load_served)
        })?;
        ensure(r.p_battery == r.p_solar + r.p_wind, || {
            format!(
                "t={}: p_battery {} vs {}",
                r.t,
                r.p_battery,
                r.p_solar + r.p_wind
            )
        })?;
        ensure(r.soc > prev, || {
            format!("t={}: SOC {} after {prev}", r.t, r.soc)
        })?;
        prev = r.soc;
    }
    Ok(format!(
        "Mode3 for {} steps, SOC {} -> {prev:.5}",
        series.records.len(),
        sc.initial_soc
    ))
}

fn a10() -> Check {
    use Direction::*;
    // (ΔP, Δω, next perturbation) as tabulated for the hill climber
    let table = [
        (1.0, 1.0, Decrease),
        (-1.0, -1.0, Decrease),
        (1.0, -1.0, Increase),
        (-1.0, 1.0, Increase),
    ];
    for (dp, dw, want) in table {
        for prev in [Increase, Decrease] {
            let got = perturbation_direction(dp, dw, prev);
            ensure(got == want, || {
                format!("ΔP={dp}, Δω={dw}, prev {prev:?}: {got:?}")
            })?;
        }
    }
    let mut n = 0;
    for dp in [-2.5f64, -1e-12, 0.0, 1e-12, 3.0] {
        for dw in [-0.7, -1e-9, 0.0, 1e-9, 4.0] {
            for prev in [Increase, Decrease] {
                let closed = -(dp * dw).signum();
                let want = if dp * dw == 0.0 {
                    prev
                } else if closed > 0.0 {
                    Increase
                } else {
                    Decrease
                };
                let got = perturbation_direction(dp, dw, prev);
                ensure(got == want, || {
                    format!("ΔP={dp}, Δω={dw}, prev {prev:?}: {got:?}")
                })?;
                n += 1;
            }
        }
    }
    Ok(format!("4 table rows, {n} enumerated cases"))
}

fn a11() -> Check {
    let cfg = EscConfig::default();
    let dt = 1e-3;
    let map = |g: f64| 1800.0 - 10_000.0 * (g - 0.162) * (g - 0.162);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let g0 = 0.02 + (1.5 - 0.02) * i as f64 / 19.0;
        let mut st = EscState::new(g0);
        let mut g = g0;
        for _ in 0..5000 {
            let (g1, next) = esc_step(&st, &cfg, map(g), dt);
            st = next;
            g = g1;
        }
        let err = (st.g_hat - 0.162).abs();
        ensure(err < 2.0 * cfg.dither_amp, || {
            format!("start {g0:.3}: g_hat {}", st.g_hat)
        })?;
        worst = worst.max(err);
    }
    Ok(format!("20 starts, worst |g_hat - 0.162| = {worst:.5} S"))
}

fn random_profile(rng: &mut ChaCha8Rng, duration: f64, lo: f64, hi: f64) -> Profile {
    let n = rng.random_range(1..=4);
    let mut times: Vec<f64> = (1..n).map(|_| rng.random_range(0.0..duration)).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let bps = std::iter::once(0.0)
        .chain(times)
        .map(|t| (t, rng.random_range(lo..=hi)))
        .collect();
    if rng.random_bool(0.5) {
        Profile::step(bps)
    } else {
        Profile::linear(bps)
    }
}

fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let mut sc = Scenario::default();
    sc.duration = rng.random_range(0.5..2.0);
    sc.initial_omega = rng.random_range(0.0..20.0);
    sc.initial_soc = match rng.random_range(0..10) {
        0 => 0.0,
        1 => 100.0,
        _ => rng.random_range(0.0..=100.0),
    };
    sc.wind = random_profile(rng, sc.duration, 0.0, 24.0);
    sc.irradiance = random_profile(rng, sc.duration, 0.0, 1200.0);
    sc.load = random_profile(rng, sc.duration, 0.0, 12_000.0);
    sc
}

fn csv_bytes(series: &TimeSeries) -> Result<Vec<u8>, String> {
    let mut buf = Vec::new();
    write_csv(series, &mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn a12() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut steps = 0;
    for n in 0..50 {
        let sc = random_scenario(&mut rng);
        let ctx = |msg: String| format!("scenario {n}: {msg}");
        let series = run_scenario(&sc).map_err(|e| ctx(e.to_string()))?;
        ensure(series.records.len() == sc.step_count(), || {
            ctx("row count".into())
        })?;
        for r in &series.records {
            let residual = r.p_solar + r.p_wind - r.p_load_served - r.p_battery - r.p_dump;
            ensure(residual == 0.0, || {
                ctx(format!("t={}: residual {residual}", r.t))
            })?;
            ensure((0.0..=100.0).contains(&r.soc), || {
                ctx(format!("t={}: SOC {}", r.t, r.soc))
            })?;
            ensure(r.omega >= 0.0, || ctx(format!("t={}: ω {}", r.t, r.omega)))?;
        }
        let first = csv_bytes(&series)?;
        let again = csv_bytes(&run_scenario(&sc).map_err(|e| ctx(e.to_string()))?)?;
        ensure(first == again, || ctx("CSV differs on rerun".into()))?;
        let lines = first.iter().filter(|b| **b == b'\n').count();
        ensure(lines == sc.step_count() + 1, || {
            ctx(format!("{lines} CSV lines"))
        })?;
        steps += series.records.len();
    }
    Ok(format!(
        "50 scenarios, {steps} steps balanced, CSV reproducible"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("A1 Cp peak value", a1, Duration::from_secs(1)),
        ("A2 Cp peak location", a2, Duration::from_secs(1)),
        ("A3 wind MPPT step-up", a3, Duration::from_secs(5)),
        ("A4 wind MPPT step-down", a4, Duration::from_secs(5)),
        ("A5 solar MPPT", a5, Duration::from_secs(5)),
        ("A6 PV datasheet", a6, Duration::from_secs(1)),
        ("A7 supervisory Modes 1/4", a7, Duration::from_secs(5)),
        ("A8 supervisory Mode 2", a8, Duration::from_secs(5)),
        ("A9 supervisory Mode 3", a9, Duration::from_secs(5)),
        ("A10 P&O decision table", a10, Duration::from_secs(1)),
        ("A11 ESC convergence", a11, Duration::from_secs(10)),
        (
            "A12 conservation and determinism",
            a12,
            Duration::from_secs(20),
        ),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg} ({elapsed:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} ({elapsed:.2?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
