//! Early-time boundary-layer solution.
//!
//! Each surface mode diffuses inward as a one-dimensional problem in the
//! scaled depth `Z = z / sqrt(D_c)` (`Z <= 0` inside the target):
//!
//! ```text
//! (d_t - d_Z^2) H = 0,   (d_Z + kappa) H |_{Z=0-} = 1,   H(Z, 0) = 0
//! ```
//!
//! The closed-form solution is
//! `H = [erfc(|Z|/sqrt(4t)) - exp(kappa^2 t - kappa Z) erfc((2 kappa t - Z)/sqrt(4t))] / kappa`.
//! The exponential is never formed. With `x = |Z|/sqrt(4t)` and
//! `s = kappa sqrt(4t)` the second term is `erfcx(x + s/2) exp(-x^2)`. For
//! small `s` the solution is summed as the convergent series
//! `sqrt(4t) sum_n (-s)^n i^{n+1}erfc(x)` in iterated error-function integrals.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{erfc, erfcx_nonneg};
use crate::sphere::{h_l_zero, sphere_kappa};
use crate::timescales::{derive_timescales, TargetParams};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
/// Below this `kappa sqrt(4t)` the iterated-erfc series replaces the
/// closed form, which loses digits to cancellation as kappa -> 0.
const SERIES_SWITCH: f64 = 1e-2;
/// Above this `kappa sqrt(t)` the time derivative uses the asymptotic
/// expansion of `1 - sqrt(pi) y erfcx(y)`.
const ASYMPTOTIC_SWITCH: f64 = 10.0;

/// A point at which the profile function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileQuery {
    /// Scaled depth `z / sqrt(D_c)`, s^1/2, `<= 0`.
    pub z: f64,
    /// Time since pulse termination, s, `> 0`.
    pub t: f64,
    /// Mode eigenvalue, s^-1/2, `>= 0`.
    pub kappa: f64,
}

impl ProfileQuery {
    pub fn new(z: f64, t: f64, kappa: f64) -> Result<Self> {
        let q = ProfileQuery { z, t, kappa };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::domain("profile_h", "t", self.t, "must be finite and > 0"));
        }
        if !(self.z <= 0.0) {
            return Err(Error::domain("profile_h", "Z", self.z, "must be <= 0 (interior)"));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::domain(
                "profile_h",
                "kappa",
                self.kappa,
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }
}

/// `exp(x^2) i^n erfc(x)` for n = 0..=n_max, from the upward recurrence
/// `2n i^n = i^{n-2} - 2x i^{n-1}`.
fn scaled_iterated_erfc(x: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = FRAC_2_SQRT_PI; // n = -1
    let mut cur = erfcx_nonneg(x);
    out.push(cur);
    for n in 1..=n_max {
        let next = (prev - 2.0 * x * cur) / (2.0 * n as f64);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

fn profile_series(x: f64, t: f64, s: f64) -> f64 {
    const TERMS: usize = 16;
    let e = scaled_iterated_erfc(x, TERMS + 1);
    let mut sum = 0.0;
    let mut power = 1.0;
    for n in 0..=TERMS {
        let term = power * e[n + 1];
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        power *= -s;
    }
    (4.0 * t).sqrt() * sum * (-x * x).exp()
}

/// Profile function `H(Z, t; kappa)`.
pub fn profile_h(q: ProfileQuery) -> Result<f64> {
    q.validate()?;
    Ok(profile_h_unchecked(q.z, q.t, q.kappa))
}

fn profile_h_unchecked(z: f64, t: f64, kappa: f64) -> f64 {
    let root4t = (4.0 * t).sqrt();
    let x = -z / root4t;
    if kappa == 0.0 {
        return (4.0 * t / PI).sqrt() * (-x * x).exp() - (-z) * erfc(x);
    }
    let s = kappa * root4t;
    if s < SERIES_SWITCH {
        return profile_series(x, t, s);
    }
    let shifted = erfcx_nonneg(x + 0.5 * s);
    if x < 0.5 {
        (erfc(x) - shifted * (-x * x).exp()) / kappa
    } else {
        (-x * x).exp() * (erfcx_nonneg(x) - shifted) / kappa
    }
}

fn check_time(op: &'static str, t: f64, kappa: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(op, "t", t, "must be finite and > 0"));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::domain(op, "kappa", kappa, "must be finite and >= 0"));
    }
    Ok(())
}

/// Boundary trace `H(0-, t; kappa) = [1 - erfcx(kappa sqrt t)] / kappa`.
pub fn boundary_h(t: f64, kappa: f64) -> Result<f64> {
    check_time("boundary_h", t, kappa)?;
    Ok(profile_h_unchecked(0.0, t, kappa))
}

/// `1 - sqrt(pi) y erfcx(y)`, accurate for large `y`.
fn erfcx_deficit(y: f64) -> f64 {
    if y < ASYMPTOTIC_SWITCH {
        return 1.0 - PI.sqrt() * y * erfcx_nonneg(y);
    }
    // sum_{k>=1} (-1)^{k+1} (2k-1)!! / (2y^2)^k
    let inv = 1.0 / (2.0 * y * y);
    let mut term = inv;
    let mut sum = 0.0;
    for k in 1..60 {
        sum += term;
        let next = -term * (2 * k + 1) as f64 * inv;
        if next.abs() < 1e-18 * sum.abs() {
            break;
        }
        term = next;
    }
    sum
}

/// Time derivative of the boundary trace,
/// `1/sqrt(pi t) - kappa erfcx(kappa sqrt t)`.
///
/// Behaves as `t^{-1/2}/sqrt(pi)` for `kappa^2 t << 1` and as
/// `t^{-3/2} / (2 sqrt(pi) kappa^2)` for `kappa^2 t >> 1`.
pub fn boundary_dh_dt(t: f64, kappa: f64) -> Result<f64> {
    check_time("boundary_dh_dt", t, kappa)?;
    let lead = 1.0 / (PI * t).sqrt();
    if kappa == 0.0 {
        return Ok(lead);
    }
    Ok(lead * erfcx_deficit(kappa * t.sqrt()))
}

/// Which approximation of `H_l(t/tau_c)` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EarlyBranch {
    /// Full boundary-layer form.
    Full,
    /// Leading `kappa^2 t << 1` term: `H_l(0) - sqrt(t / (pi tau_c))`.
    EarlyEarly,
    /// Leading `kappa^2 t >> 1` terms: `H_l(0) - [1 - (pi kappa^2 t)^{-1/2}] / (kappa sqrt(4 tau_c))`.
    LateEarly,
}

/// Early-time prediction `H_l(t/tau_c) ~ H_l(0) - H(0-, t; kappa_l) / sqrt(4 tau_c)`.
pub fn early_time_h_l(p: &TargetParams, l: usize, t: f64) -> Result<f64> {
    early_time_h_l_branch(p, l, t, EarlyBranch::Full)
}

pub fn early_time_h_l_branch(p: &TargetParams, l: usize, t: f64, branch: EarlyBranch) -> Result<f64> {
    let d = derive_timescales(p)?;
    let start = h_l_zero(l, p.mu_ratio())?;
    let kappa = sphere_kappa(p, l)?;
    check_time("early_time_h_l", t, kappa)?;
    let trace = match branch {
        EarlyBranch::Full => profile_h_unchecked(0.0, t, kappa),
        EarlyBranch::EarlyEarly => (4.0 * t / PI).sqrt(),
        EarlyBranch::LateEarly => (1.0 - 1.0 / (PI * kappa * kappa * t).sqrt()) / kappa,
    };
    Ok(start - trace / (4.0 * d.tau_c).sqrt())
}

/// Mode family: magnetic (alpha, i = 1) or transverse (beta, i = 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeFamily {
    Magnetic,
    Transverse,
}

/// Surface-mode amplitudes of a screening current.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeAmplitudes {
    pub ids: Vec<usize>,
    /// Magnetic-mode amplitudes K^(1)_n.
    pub k1: Vec<f64>,
    /// Transverse-mode amplitudes K^(2)_n.
    pub k2: Vec<f64>,
    /// Per-mode kappa_n, s^-1/2.
    pub kappa: Vec<f64>,
}

impl ModeAmplitudes {
    pub fn new(ids: Vec<usize>, k1: Vec<f64>, k2: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        for (what, len) in [("k1", k1.len()), ("k2", k2.len()), ("kappa", kappa.len())] {
            if len != n {
                return Err(Error::LengthMismatch {
                    what,
                    got: len,
                    expected: n,
                });
            }
        }
        if let Some(&bad) = kappa.iter().find(|k| !(**k >= 0.0)) {
            return Err(Error::param("kappa", format!("negative or NaN entry {bad}")));
        }
        Ok(ModeAmplitudes { ids, k1, k2, kappa })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn index_of(&self, id: usize) -> Result<usize> {
        self.ids.iter().position(|&m| m == id).ok_or(Error::UnknownMode(id))
    }
}

/// Interior mode profile `A^(i)_n(Z, t) = -K^(i)_n H(Z, t; kappa_n delta_{i1})`.
pub fn mode_profile_a(amp: &ModeAmplitudes, id: usize, family: ModeFamily, z: f64, t: f64) -> Result<f64> {
    let i = amp.index_of(id)?;
    let (k, kappa) = match family {
        ModeFamily::Magnetic => (amp.k1[i], amp.kappa[i]),
        ModeFamily::Transverse => (amp.k2[i], 0.0),
    };
    Ok(-k * profile_h(ProfileQuery::new(z, t, kappa)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    Exact,
    Early,
    AsymptoteEarly,
    AsymptoteLate,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::Exact => "exact",
            ModelTag::Early => "early",
            ModelTag::AsymptoteEarly => "asymptote-early",
            ModelTag::AsymptoteLate => "asymptote-late",
        }
    }
}

/// Sampled time series.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub model_tag: ModelTag,
}

impl DecayCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>, model_tag: ModelTag) -> Result<Self> {
        validate_times(&times)?;
        if values.len() != times.len() {
            return Err(Error::LengthMismatch {
                what: "values",
                got: values.len(),
                expected: times.len(),
            });
        }
        Ok(DecayCurve {
            times,
            values,
            model_tag,
        })
    }
}

pub(crate) fn validate_times(times: &[f64]) -> Result<()> {
    if let Some(&t) = times.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::domain("time grid", "t", t, "must be finite and > 0"));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::domain(
            "time grid",
            "t",
            w[1],
            "times must be strictly increasing",
        ));
    }
    Ok(())
}

/// Pairwise summation; the result depends only on the order of `xs`.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Receiver response `V(t) = sum_n c_n K^(1)_n dH/dt(0-, t; kappa_n)`.
///
/// Transverse modes carry no exterior magnetic field and are left out.
pub fn synthesize_response(amp: &ModeAmplitudes, couplings: &[f64], times: &[f64]) -> Result<DecayCurve> {
    if couplings.len() != amp.len() {
        return Err(Error::LengthMismatch {
            what: "couplings",
            got: couplings.len(),
            expected: amp.len(),
        });
    }
    validate_times(times)?;
    let mut terms = vec![0.0; amp.len()];
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        for (i, term) in terms.iter_mut().enumerate() {
            let weight = couplings[i] * amp.k1[i];
            *term = if weight == 0.0 {
                0.0
            } else {
                weight * boundary_dh_dt(t, amp.kappa[i])?
            };
        }
        values.push(pairwise_sum(&terms));
    }
    DecayCurve::new(times.to_vec(), values, ModelTag::Early)
}

/// Finite-difference steps for [`pde_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Steps {
    pub dz: f64,
    pub dt: f64,
}

impl Steps {
    /// Steps of `1e-3` of the local diffusion length and time.
    pub fn relative_to(q: &ProfileQuery) -> Self {
        Steps {
            dz: 1e-3 * q.t.sqrt(),
            dt: 1e-3 * q.t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    /// `(d_t - d_Z^2) H`.
    pub residual: f64,
    /// Central-difference `d_t H`, the natural scale of the residual.
    pub dt_term: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        (self.residual / self.dt_term).abs()
    }
}

/// Central-difference estimate of `(d_t - d_Z^2) H` at an interior point.
pub fn pde_residual(q: ProfileQuery, h: Steps) -> Result<Residual> {
    q.validate()?;
    if !(q.z + h.dz <= 0.0) || !(q.t - h.dt > 0.0) {
        return Err(Error::domain(
            "pde_residual",
            "step",
            h.dz.max(h.dt),
            "stencil leaves the domain",
        ));
    }
    let f = |z: f64, t: f64| profile_h_unchecked(z, t, q.kappa);
    let dt_term = (f(q.z, q.t + h.dt) - f(q.z, q.t - h.dt)) / (2.0 * h.dt);
    let dzz = (f(q.z + h.dz, q.t) - 2.0 * f(q.z, q.t) + f(q.z - h.dz, q.t)) / (h.dz * h.dz);
    Ok(Residual {
        residual: dt_term - dzz,
        dt_term,
    })
}

/// `(d_Z + kappa) H` at `Z = 0-` from a second-order one-sided difference.
pub fn robin_boundary_value(t: f64, kappa: f64, dz: f64) -> Result<f64> {
    check_time("robin_boundary_value", t, kappa)?;
    let f = |z: f64| profile_h_unchecked(z, t, kappa);
    let dh = (3.0 * f(0.0) - 4.0 * f(-dz) + f(-2.0 * dz)) / (2.0 * dz);
    Ok(dh + kappa * f(0.0))
}
