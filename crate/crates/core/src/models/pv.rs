//! Single-diode PV panel (series resistance, no shunt branch) fitted to a
//! datasheet, plus the operating point it settles at behind a loss-free
//! resistor of conductance g1.

use crate::{Error, Result};

const MAX_ITER: usize = 200;
/// Residual tolerance of the implicit diode solve, A.
const DIODE_TOL: f64 = 1e-9;
/// Residual tolerance of the load-line intersection, A.
const LOAD_LINE_TOL: f64 = 1e-9;
/// Search interval of the aggregate thermal voltage during the fit, V.
const FIT_A_RANGE: (f64, f64) = (1.0, 50.0);
/// Voltage resolution of the brute-force MPP scan, V.
const MPP_SCAN_STEP: f64 = 1e-3;

/// Panel datasheet values at the reference condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PvDatasheet {
    pub voc: f64,
    pub isc: f64,
    pub vm: f64,
    pub im: f64,
    pub pm: f64,
    pub rs: f64,
    /// Reference temperature, °C. Carried for completeness; the model has no
    /// temperature dependence.
    pub t_ref: f64,
    /// Reference irradiance, W/m².
    pub g_ref: f64,
}

impl Default for PvDatasheet {
    fn default() -> Self {
        Self {
            voc: 129.0,
            isc: 19.2,
            vm: 105.6,
            im: 17.1,
            pm: 1800.0,
            rs: 0.2,
            t_ref: 25.0,
            g_ref: 1000.0,
        }
    }
}

impl PvDatasheet {
    /// Returns `(key, message)` pairs for every violated invariant.
    pub fn violations(&self) -> alloc::vec::Vec<(&'static str, &'static str)> {
        let mut out = alloc::vec::Vec::new();
        let all = [
            self.voc, self.isc, self.vm, self.im, self.pm, self.rs, self.t_ref, self.g_ref,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            out.push(("voc", "datasheet values must be finite"));
            return out;
        }
        if !(self.vm > 0.0 && self.vm < self.voc) {
            out.push(("vm", "must satisfy 0 < vm < voc"));
        }
        if !(self.im > 0.0 && self.im < self.isc) {
            out.push(("im", "must satisfy 0 < im < isc"));
        }
        if (self.pm - self.vm * self.im).abs() > 0.01 * self.pm.abs() {
            out.push(("pm", "must equal vm*im within 1%"));
        }
        if self.rs < 0.0 {
            out.push(("rs", "must be >= 0"));
        }
        if !(self.g_ref > 0.0) {
            out.push(("g_ref", "must be > 0"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PvDiodeModel {
    /// Photo-current at the reference irradiance, A.
    pub iph_ref: f64,
    /// Diode saturation current, A.
    pub i0: f64,
    /// Aggregate thermal voltage n·Ns·Vt, V.
    pub a: f64,
    pub rs: f64,
    pub g_ref: f64,
    pub voc_ref: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingPoint {
    pub v: f64,
    pub i: f64,
}

impl OperatingPoint {
    pub fn power(&self) -> f64 {
        self.v * self.i
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MppPoint {
    pub v: f64,
    pub p: f64,
}

fn saturation_current(isc: f64, voc: f64, a: f64) -> f64 {
    isc / libm::expm1(voc / a)
}

/// Fits a single-diode model through (0, Isc), (Voc, 0) and (Vm, Im).
///
/// Iph is pinned to Isc and i0 follows from the open-circuit condition, which
/// leaves one unknown `a`, found by bisection on the nominal-point residual.
pub fn fit_pv_model(ds: &PvDatasheet) -> Result<PvDiodeModel> {
    if !ds.violations().is_empty() {
        return Err(Error::Domain {
            what: "PV datasheet",
            value: ds.voc,
        });
    }
    let residual = |a: f64| {
        let i0 = saturation_current(ds.isc, ds.voc, a);
        ds.isc - i0 * libm::expm1((ds.vm + ds.im * ds.rs) / a) - ds.im
    };
    let (mut lo, mut hi) = FIT_A_RANGE;
    let (r_lo, r_hi) = (residual(lo), residual(hi));
    if !(r_lo.is_finite() && r_hi.is_finite()) || r_lo.signum() == r_hi.signum() {
        return Err(Error::FitFailure { lo, hi });
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if residual(mid).signum() == r_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let a = 0.5 * (lo + hi);
    Ok(PvDiodeModel {
        iph_ref: ds.isc,
        i0: saturation_current(ds.isc, ds.voc, a),
        a,
        rs: ds.rs,
        g_ref: ds.g_ref,
        voc_ref: ds.voc,
    })
}

impl PvDiodeModel {
    pub fn photo_current(&self, irradiance: f64) -> f64 {
        self.iph_ref * irradiance.max(0.0) / self.g_ref
    }

    /// Open-circuit voltage at `irradiance` (series resistance carries no
    /// current there).
    pub fn open_circuit_voltage(&self, irradiance: f64) -> f64 {
        let iph = self.photo_current(irradiance);
        self.a * libm::log1p(iph / self.i0)
    }

    /// Terminal current at voltage `v`, solving
    /// i = Iph(G) − i0·(exp((v + i·Rs)/a) − 1). Clamped at zero above Voc(G).
    pub fn current(&self, v: f64, irradiance: f64) -> Result<f64> {
        self.current_from(v, irradiance, None)
    }

    fn current_from(&self, v: f64, irradiance: f64, guess: Option<f64>) -> Result<f64> {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Domain {
                what: "PV terminal voltage",
                value: v,
            });
        }
        if !(irradiance >= 0.0) || !irradiance.is_finite() {
            return Err(Error::Domain {
                what: "irradiance",
                value: irradiance,
            });
        }
        let iph = self.photo_current(irradiance);
        let f = |i: f64| iph - self.i0 * libm::expm1((v + i * self.rs) / self.a) - i;
        if f(0.0) <= 0.0 {
            return Ok(0.0);
        }
        // f is strictly decreasing with f(0) > 0 >= f(iph).
        let (lo, hi) = (0.0, iph);
        let x0 = guess.unwrap_or(iph).clamp(lo, hi);
        let root = bracketed_newton(lo, hi, x0, DIODE_TOL, |i| {
            let e = libm::exp((v + i * self.rs) / self.a);
            let val = iph - self.i0 * (e - 1.0) - i;
            let d = -self.i0 * e * self.rs / self.a - 1.0;
            (val, d)
        });
        root.ok_or(Error::NoConvergence {
            what: "diode current",
            voltage: v,
            irradiance,
        })
    }

    /// Steady operating point behind an ideal loss-free resistor: the
    /// intersection of the I–V curve with the load line i = g1·v.
    pub fn operating_point(&self, g1: f64, irradiance: f64) -> Result<OperatingPoint> {
        if !(g1 >= 0.0) || !g1.is_finite() {
            return Err(Error::Domain {
                what: "load conductance",
                value: g1,
            });
        }
        if !(irradiance >= 0.0) || !irradiance.is_finite() {
            return Err(Error::Domain {
                what: "irradiance",
                value: irradiance,
            });
        }
        let voc = self.open_circuit_voltage(irradiance);
        if g1 == 0.0 || voc == 0.0 {
            return Ok(OperatingPoint { v: voc, i: 0.0 });
        }
        let iph = self.photo_current(irradiance);
        let slope = (1.0 + g1 * self.rs) / self.a;
        // h(v) = iph − i0(exp(v(1 + g1·rs)/a) − 1) − g1·v, decreasing on [0, Voc]
        let v = bracketed_newton(0.0, voc, (iph / g1).min(voc), LOAD_LINE_TOL, |v| {
            let e = libm::exp(v * slope);
            (
                iph - self.i0 * (e - 1.0) - g1 * v,
                -self.i0 * e * slope - g1,
            )
        })
        .ok_or(Error::NoConvergence {
            what: "load-line intersection",
            voltage: voc,
            irradiance,
        })?;
        Ok(OperatingPoint { v, i: g1 * v })
    }

    /// Brute-force maximum power point: scans [0, Voc(G)] at 1 mV. Ground
    /// truth for tests and the CLI; no controller calls this.
    pub fn mpp_oracle(&self, irradiance: f64) -> Result<MppPoint> {
        let voc = self.open_circuit_voltage(irradiance);
        let steps = libm::floor(voc / MPP_SCAN_STEP) as usize;
        let mut best = MppPoint { v: 0.0, p: 0.0 };
        let mut guess = None;
        for k in 0..=steps {
            let v = k as f64 * MPP_SCAN_STEP;
            let i = self.current_from(v, irradiance, guess)?;
            guess = Some(i);
            let p = v * i;
            if p > best.p {
                best = MppPoint { v, p };
            }
        }
        Ok(best)
    }
}

/// Newton's method safeguarded by a shrinking bracket on a function that is
/// decreasing with `f(lo) >= 0 >= f(hi)`. `fd` returns (value, derivative).
fn bracketed_newton(
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    tol: f64,
    fd: impl Fn(f64) -> (f64, f64),
) -> Option<f64> {
    let mut x = x0;
    for _ in 0..MAX_ITER {
        let (val, d) = fd(x);
        if val.abs() < tol {
            return Some(x);
        }
        if val > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - val / d;
        x = if d < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let (val, _) = fd(x);
            return (val.abs() < tol * 1e3).then_some(x);
        }
    }
    None
}
