//! Power-law regime fitting of decay curves in log-log space.

use crate::error::{Error, Result};

/// Minimum number of samples inside a fit window.
pub const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Slope near -1/2.
    EarlyEarly,
    /// Slope near -3/2.
    LateEarly,
    Other,
}

impl Regime {
    /// Classify a slope within 0.1 of the two early-time exponents.
    pub fn classify(slope: f64) -> Self {
        if (slope + 0.5).abs() < 0.1 {
            Regime::EarlyEarly
        } else if (slope + 1.5).abs() < 0.1 {
            Regime::LateEarly
        } else {
            Regime::Other
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::EarlyEarly => "t^-1/2",
            Regime::LateEarly => "t^-3/2",
            Regime::Other => "other",
        }
    }
}

/// Unweighted least-squares line `ln V = intercept + slope ln t` over one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowFit {
    pub t_lo: f64,
    pub t_hi: f64,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub points: usize,
    pub regime: Regime,
}

impl WindowFit {
    /// Value of the fitted power law at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        (self.intercept + self.slope * t.ln()).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub windows: Vec<WindowFit>,
    /// Intersection time of the first two fitted asymptotes.
    pub crossover_estimate: Option<f64>,
}

pub fn fit_window(t: &[f64], v: &[f64], t_lo: f64, t_hi: f64) -> Result<WindowFit> {
    let err = |reason: String| Error::Fit {
        lo: t_lo,
        hi: t_hi,
        reason,
    };
    if t.len() != v.len() {
        return Err(Error::LengthMismatch {
            what: "V column",
            got: v.len(),
            expected: t.len(),
        });
    }
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(err("window must satisfy 0 < t_lo < t_hi".into()));
    }
    let (first, last) = match (t.first(), t.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(err("no data".into())),
    };
    if t_lo < first * (1.0 - 1e-12) || t_hi > last * (1.0 + 1e-12) {
        return Err(err(format!("outside data span [{first}, {last}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&ti, &vi) in t.iter().zip(v) {
        if ti < t_lo || ti > t_hi {
            continue;
        }
        if !(vi > 0.0) {
            return Err(err(format!("non-positive value {vi} at t={ti}")));
        }
        xs.push(ti.ln());
        ys.push(vi.ln());
    }
    let n = xs.len();
    if n < MIN_POINTS {
        return Err(err(format!("{n} points, need at least {MIN_POINTS}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok(WindowFit {
        t_lo,
        t_hi,
        slope,
        slope_stderr,
        intercept,
        points: n,
        regime: Regime::classify(slope),
    })
}

/// Time at which two fitted power laws intersect.
pub fn asymptote_intersection(a: &WindowFit, b: &WindowFit) -> Option<f64> {
    let ds = a.slope - b.slope;
    if ds.abs() < 1e-12 {
        return None;
    }
    Some(((b.intercept - a.intercept) / ds).exp())
}

/// Fit each window; with two or more windows, also report the intersection
/// of the first two asymptotes.
pub fn fit_power_laws(t: &[f64], v: &[f64], windows: &[(f64, f64)]) -> Result<FitReport> {
    let fits = windows
        .iter()
        .map(|&(lo, hi)| fit_window(t, v, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    let crossover_estimate = match fits.as_slice() {
        [a, b, ..] => asymptote_intersection(a, b),
        _ => None,
    };
    Ok(FitReport {
        windows: fits,
        crossover_estimate,
    })
}

/// `n` log-spaced samples on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
