//! Browser bindings for three emdecay operations: normalized sphere decay
//! curves, power-law fits of the boundary voltage proxy, and sphere decay
//! roots. The plain functions are target independent; the `#[wasm_bindgen]`
//! wrappers only convert errors.

use emdecay::early_time::{boundary_dh_dt, early_time_h_l_branch, EarlyBranch};
use emdecay::fit::{fit_power_laws, log_grid};
use emdecay::sphere::{find_roots, h_l_zero};
use emdecay::timescales::derive_timescales;
use emdecay::TargetParams;
use wasm_bindgen::prelude::*;

/// Scaled time `t / tau_c` does not depend on conductivity or size, so the
/// demo fixes both.
const SIGMA: f64 = 1e7;
const LENGTH: f64 = 0.05;
const MAX_POINTS: usize = 5000;

fn check_points(points: usize) -> Result<(), String> {
    if (2..=MAX_POINTS).contains(&points) {
        Ok(())
    } else {
        Err(format!("points must be in 2..={MAX_POINTS}, got {points}"))
    }
}

/// `H_l` on a log grid `tau in [tau_min, 1]`: exact series and the three
/// early-time forms.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Curves {
    tau: Vec<f64>,
    exact: Vec<f64>,
    early: Vec<f64>,
    early_early: Vec<f64>,
    late_early: Vec<f64>,
    h0: f64,
}

#[wasm_bindgen]
impl Curves {
    pub fn tau(&self) -> Vec<f64> {
        self.tau.clone()
    }
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }
    pub fn early(&self) -> Vec<f64> {
        self.early.clone()
    }
    pub fn early_early(&self) -> Vec<f64> {
        self.early_early.clone()
    }
    pub fn late_early(&self) -> Vec<f64> {
        self.late_early.clone()
    }
    pub fn h0(&self) -> f64 {
        self.h0
    }
}

pub fn decay_curves(mu_ratio: f64, l: usize, tau_min: f64, points: usize) -> Result<Curves, String> {
    check_points(points)?;
    if !(tau_min > 0.0 && tau_min < 1.0) {
        return Err(format!("tau_min must be in (0, 1), got {tau_min}"));
    }
    let p = TargetParams::with_contrast(mu_ratio, SIGMA, LENGTH).map_err(|e| e.to_string())?;
    let tau_c = derive_timescales(&p).map_err(|e| e.to_string())?.tau_c;
    let tau = log_grid(tau_min, 1.0, points);
    let z = ((1e16f64).ln() / tau_min).sqrt();
    let roots = ((z / std::f64::consts::PI).ceil() as usize + l + 2).clamp(50, 20_000);
    let spec = find_roots(l, mu_ratio, roots).map_err(|e| e.to_string())?;
    let branch = |b: EarlyBranch| -> Result<Vec<f64>, String> {
        tau.iter()
            .map(|&s| early_time_h_l_branch(&p, l, s * tau_c, b).map_err(|e| e.to_string()))
            .collect()
    };
    Ok(Curves {
        exact: tau
            .iter()
            .map(|&s| spec.h_l(s).map(|v| v.value).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?,
        early: branch(EarlyBranch::Full)?,
        early_early: branch(EarlyBranch::EarlyEarly)?,
        late_early: branch(EarlyBranch::LateEarly)?,
        h0: h_l_zero(l, mu_ratio).map_err(|e| e.to_string())?,
        tau,
    })
}

/// Boundary `dH/dt` samples with fitted early and late power laws.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct VoltageFit {
    t: Vec<f64>,
    v: Vec<f64>,
    early_slope: f64,
    early_intercept: f64,
    late_slope: f64,
    late_intercept: f64,
    crossover: f64,
    kappa: f64,
}

#[wasm_bindgen]
impl VoltageFit {
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    pub fn v(&self) -> Vec<f64> {
        self.v.clone()
    }
    pub fn early_slope(&self) -> f64 {
        self.early_slope
    }
    pub fn early_intercept(&self) -> f64 {
        self.early_intercept
    }
    pub fn late_slope(&self) -> f64 {
        self.late_slope
    }
    pub fn late_intercept(&self) -> f64 {
        self.late_intercept
    }
    /// Intersection time of the two fitted power laws, s.
    pub fn crossover(&self) -> f64 {
        self.crossover
    }
    /// `1 / kappa^2`, s.
    pub fn crossover_expected(&self) -> f64 {
        1.0 / (self.kappa * self.kappa)
    }
}

/// Sample `dH/dt` over `kappa^2 t in [1e-6, 1e6]` and fit the windows
/// `[early_lo, early_hi]` and `[late_lo, late_hi]`, given in `kappa^2 t`.
pub fn voltage_fit(
    kappa: f64,
    early_lo: f64,
    early_hi: f64,
    late_lo: f64,
    late_hi: f64,
    points: usize,
) -> Result<VoltageFit, String> {
    check_points(points)?;
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(format!("kappa must be finite and > 0, got {kappa}"));
    }
    let k2 = kappa * kappa;
    let t = log_grid(1e-6 / k2, 1e6 / k2, points);
    let v = t
        .iter()
        .map(|&t| boundary_dh_dt(t, kappa).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let windows = [(early_lo / k2, early_hi / k2), (late_lo / k2, late_hi / k2)];
    let report = fit_power_laws(&t, &v, &windows).map_err(|e| e.to_string())?;
    let (a, b) = (report.windows[0], report.windows[1]);
    Ok(VoltageFit {
        t,
        v,
        early_slope: a.slope,
        early_intercept: a.intercept,
        late_slope: b.slope,
        late_intercept: b.intercept,
        crossover: report.crossover_estimate.unwrap_or(f64::NAN),
        kappa,
    })
}

/// First `n` decay roots of order `l`.
pub fn sphere_roots(mu_ratio: f64, l: usize, n: usize) -> Result<Vec<f64>, String> {
    if !(1..=1000).contains(&n) {
        return Err(format!("n must be in 1..=1000, got {n}"));
    }
    Ok(find_roots(l, mu_ratio, n).map_err(|e| e.to_string())?.roots)
}

#[wasm_bindgen(js_name = decayCurves)]
pub fn decay_curves_js(mu_ratio: f64, l: usize, tau_min: f64, points: usize) -> Result<Curves, JsError> {
    decay_curves(mu_ratio, l, tau_min, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = voltageFit)]
pub fn voltage_fit_js(
    kappa: f64,
    early_lo: f64,
    early_hi: f64,
    late_lo: f64,
    late_hi: f64,
    points: usize,
) -> Result<VoltageFit, JsError> {
    voltage_fit(kappa, early_lo, early_hi, late_lo, late_hi, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sphereRoots)]
pub fn sphere_roots_js(mu_ratio: f64, l: usize, n: usize) -> Result<Vec<f64>, JsError> {
    sphere_roots(mu_ratio, l, n).map_err(|e| JsError::new(&e))
}
