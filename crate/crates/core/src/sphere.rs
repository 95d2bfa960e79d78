//! Exact decay of a homogeneous permeable, conducting sphere.
//!
//! A magnetic multipole of order `l` decays as a sum of exponentials
//! `exp(-zeta_n^2 t / tau_c)`. The scaled rates `zeta_n` are the positive
//! roots of
//!
//! ```text
//! (mu_b/mu_c) z j_{l-1}(z) + l (1 - mu_b/mu_c) j_l(z) = 0
//! ```
//!
//! which is the continuity of `B_r` and tangential `H` across the sphere
//! for an interior field `j_l(k r)`. The cumulative response
//! `H_l(tau) = sum a_n exp(-zeta_n^2 tau) / zeta_n^2` starts from the closed
//! form [`h_l_zero`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{sph_j_derivative, spherical_bessel_j};
use crate::timescales::{derive_timescales, TargetParams};

/// Roots closer to the origin than this are not decay modes.
const ZETA_MIN: f64 = 1e-8;
const SCAN_STEP: f64 = PI / 8.0;
const BISECT_WIDTH: f64 = 1e-6;
/// Residual every returned root must satisfy.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;
/// Default number of roots kept for series evaluation.
pub const DEFAULT_ROOTS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpectrum {
    pub l: usize,
    pub mu_ratio: f64,
    /// Ascending positive roots zeta_{l1} < zeta_{l2} < ...
    pub roots: Vec<f64>,
    /// a_n = j_l^2 / (j_l^2 - j_{l+1} j_{l-1}) at each root.
    pub coefficients: Vec<f64>,
    /// Indices whose coefficient came out non-positive. Empty for every
    /// case exercised in the test suite; a non-empty list marks a spectrum
    /// whose series is not a sum of decaying positive terms.
    pub nonpositive: Vec<usize>,
}

/// Left-hand side of the root equation and its derivative.
fn characteristic(l: usize, mu_ratio: f64, z: f64) -> Result<(f64, f64)> {
    let j = spherical_bessel_j(l + 1, z)?.values;
    let inv = 1.0 / mu_ratio;
    let value = inv * z * j[l - 1] + l as f64 * (1.0 - inv) * j[l];
    let dj_lm1 = if l == 1 {
        -j[1]
    } else {
        sph_j_derivative(l - 1, z, j[l - 2], j[l - 1])
    };
    let dj_l = sph_j_derivative(l, z, j[l - 1], j[l]);
    let deriv = inv * (j[l - 1] + z * dj_lm1) + l as f64 * (1.0 - inv) * dj_l;
    Ok((value, deriv))
}

/// Residual of the root equation at `z`.
pub fn root_residual(l: usize, mu_ratio: f64, z: f64) -> Result<f64> {
    Ok(characteristic(l, mu_ratio, z)?.0)
}

fn check_order(l: usize, mu_ratio: f64) -> Result<()> {
    if l == 0 {
        return Err(Error::param("l", "multipole order must be >= 1"));
    }
    if !(mu_ratio.is_finite() && mu_ratio > 0.0) {
        return Err(Error::param("mu_ratio", format!("must be > 0, got {mu_ratio}")));
    }
    Ok(())
}

/// The `n` smallest positive roots for multipole order `l`.
///
/// Sign changes are located on a grid of step pi/8, narrowed by bisection
/// and polished by safeguarded Newton iteration.
pub fn find_roots(l: usize, mu_ratio: f64, n: usize) -> Result<SphereSpectrum> {
    check_order(l, mu_ratio)?;
    if n == 0 {
        return Err(Error::param("n", "at least one root required"));
    }
    let scan_lo = ZETA_MIN;
    let scan_hi = (n + 2) as f64 * PI + l as f64;
    let mut roots = Vec::with_capacity(n);
    let mut a = scan_lo;
    let mut fa = characteristic(l, mu_ratio, a)?.0;
    while roots.len() < n && a < scan_hi {
        let b = (a + SCAN_STEP).min(scan_hi);
        let fb = characteristic(l, mu_ratio, b)?.0;
        if fb == 0.0 {
            roots.push(b);
        } else if fa != 0.0 && fa.signum() != fb.signum() {
            roots.push(polish(l, mu_ratio, a, b, fa)?);
        }
        a = b;
        fa = fb;
    }
    if roots.len() < n {
        return Err(Error::RootBracketing {
            l,
            mu_ratio,
            found: roots.len(),
            wanted: n,
            scan_lo,
            scan_hi,
        });
    }
    let mut coefficients = Vec::with_capacity(n);
    let mut nonpositive = Vec::new();
    for (i, &z) in roots.iter().enumerate() {
        let c = series_coefficient(l, z)?;
        if c <= 0.0 {
            nonpositive.push(i);
        }
        coefficients.push(c);
    }
    Ok(SphereSpectrum {
        l,
        mu_ratio,
        roots,
        coefficients,
        nonpositive,
    })
}

fn polish(l: usize, mu_ratio: f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let f_mid = characteristic(l, mu_ratio, mid)?.0;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..50 {
        let (f, df) = characteristic(l, mu_ratio, z)?;
        if f == 0.0 {
            return Ok(z);
        }
        if f.signum() == f_lo.signum() {
            lo = z;
        } else {
            hi = z;
        }
        let step = f / df;
        if step.abs() <= 4.0 * f64::EPSILON * z {
            break;
        }
        let next = z - step;
        z = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    let residual = characteristic(l, mu_ratio, z)?.0;
    if residual.abs() >= ROOT_RESIDUAL_TOL {
        return Err(Error::NonConvergence {
            what: "sphere root polish",
            detail: format!("l={l} mu_ratio={mu_ratio} zeta={z} residual={residual:e}"),
        });
    }
    Ok(z)
}

fn series_coefficient(l: usize, z: f64) -> Result<f64> {
    let j = spherical_bessel_j(l + 1, z)?.values;
    let jl2 = j[l] * j[l];
    let denominator = jl2 - j[l + 1] * j[l - 1];
    let scale = jl2.max((j[l + 1] * j[l - 1]).abs());
    if denominator.abs() <= 1e-13 * scale || denominator == 0.0 {
        return Err(Error::DegenerateCoefficient {
            l,
            root: z,
            denominator,
        });
    }
    Ok(jl2 / denominator)
}

/// A truncated series value with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl SphereSpectrum {
    /// `H_l(tau)` at scaled time `tau = t / tau_c`.
    pub fn h_l(&self, tau: f64) -> Result<SeriesValue> {
        if !(tau >= 0.0) {
            return Err(Error::domain("h_l", "tau", tau, "must be >= 0"));
        }
        // smallest terms first
        let value = self
            .roots
            .iter()
            .zip(&self.coefficients)
            .rev()
            .map(|(&z, &a)| a * (-z * z * tau).exp() / (z * z))
            .sum();
        Ok(SeriesValue {
            value,
            tail_bound: self.tail_bound(tau),
        })
    }

    /// `sum_{n > N} a_n exp(-zeta_n^2 tau) / zeta_n^2 <= max(1, a_N) exp(-zeta_N^2 tau) / (pi zeta_N)`,
    /// using root spacing of at least pi and a_n approaching 1.
    pub fn tail_bound(&self, tau: f64) -> f64 {
        let z = *self.roots.last().expect("spectrum holds at least one root");
        let a = self.coefficients.last().copied().unwrap_or(1.0).max(1.0);
        a * (-z * z * tau).exp() / (PI * z)
    }

    /// The series truncated to its first `terms` roots.
    pub fn truncated(&self, terms: usize) -> SphereSpectrum {
        let k = terms.clamp(1, self.roots.len());
        SphereSpectrum {
            l: self.l,
            mu_ratio: self.mu_ratio,
            roots: self.roots[..k].to_vec(),
            coefficients: self.coefficients[..k].to_vec(),
            nonpositive: self.nonpositive.iter().copied().filter(|&i| i < k).collect(),
        }
    }

    /// Decay times `tau_c / zeta_n^2` in units of `tau_c`.
    pub fn decay_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots.iter().map(|z| 1.0 / (z * z))
    }
}

/// `H_l(tau)`; free-function form of [`SphereSpectrum::h_l`].
pub fn h_l(spec: &SphereSpectrum, tau: f64) -> Result<SeriesValue> {
    spec.h_l(tau)
}

/// Closed form `H_l(0) = (mu_b / 2 mu_c) / (l + (l+1) mu_b/mu_c)`.
pub fn h_l_zero(l: usize, mu_ratio: f64) -> Result<f64> {
    check_order(l, mu_ratio)?;
    let inv = 1.0 / mu_ratio;
    Ok(0.5 * inv / (l as f64 + (l + 1) as f64 * inv))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereModeLabels {
    pub l: usize,
    pub m: i32,
    /// Surface eigenvalue, s^-1/2.
    pub kappa: f64,
    /// Transverse eigenvalue `l(l+1) / (L^2 mu_c sqrt(D_c))`.
    pub lambda: f64,
    /// Mode length scale `L / l`, m.
    pub mode_length: f64,
}

impl SphereModeLabels {
    /// Crossover time `1 / kappa^2` of this mode, s.
    pub fn crossover_time(&self) -> f64 {
        1.0 / (self.kappa * self.kappa)
    }
}

/// Analytic surface-mode labels for `1 <= l <= l_max`, `-l <= m <= l`.
pub fn sphere_mode_labels(p: &TargetParams, l_max: usize) -> Result<Vec<SphereModeLabels>> {
    if l_max == 0 {
        return Err(Error::param("l_max", "must be >= 1"));
    }
    let d = derive_timescales(p)?;
    let root_d = d.d_c.sqrt();
    let inv_sqrt_tau_mag = 1.0 / d.tau_mag.sqrt();
    let mut out = Vec::with_capacity(l_max * (l_max + 2));
    for l in 1..=l_max {
        let lf = l as f64;
        let kappa = lf * inv_sqrt_tau_mag;
        let lambda = lf * (lf + 1.0) / (p.length * p.length * p.mu_c * root_d);
        for m in -(l as i32)..=(l as i32) {
            out.push(SphereModeLabels {
                l,
                m,
                kappa,
                lambda,
                mode_length: p.length / lf,
            });
        }
    }
    Ok(out)
}

/// `kappa_l = l / sqrt(tau_mag)` for a single order.
pub fn sphere_kappa(p: &TargetParams, l: usize) -> Result<f64> {
    let d = derive_timescales(p)?;
    Ok(l as f64 / d.tau_mag.sqrt())
}

/// Screening current on a sphere just after a uniform axial primary field
/// `h0` is switched off.
///
/// Before switch-off the interior field is the classical permeable-sphere
/// value `3 mu_b h0 / (mu_c + 2 mu_b)`. It stays frozen at `t = 0+`. The
/// exterior potential is the dipole `b cos(theta) / r^2` fixed by normal-B
/// continuity. The surface current is `n x (H_out - H_in)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreeningCurrent {
    pub radius: f64,
    /// Frozen interior field (axial), A/m.
    pub interior_field: f64,
    /// Coefficient `b` of the exterior potential `b cos(theta) / r^2`, A m.
    pub exterior_dipole: f64,
    /// Exterior dipole coefficient before switch-off, `R^3 (mu_c - mu_b) h0 / (mu_c + 2 mu_b)`.
    pub prepulse_dipole: f64,
    /// `K_phi(theta) = amplitude * sin(theta)`, A/m.
    pub amplitude: f64,
}

impl ScreeningCurrent {
    /// Azimuthal surface current density at polar angle `theta`.
    pub fn k_phi(&self, theta: f64) -> f64 {
        if theta == 0.0 || theta == PI {
            return 0.0;
        }
        self.amplitude * theta.sin()
    }

    /// Surface current vector at a point on the sphere (centered at origin, axis z).
    pub fn k_vector(&self, x: [f64; 3]) -> [f64; 3] {
        // K = amplitude * z_hat x r_hat, which is amplitude * sin(theta) * phi_hat
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        [-self.amplitude * x[1] / r, self.amplitude * x[0] / r, 0.0]
    }
}

pub fn initial_screening_sphere(p: &TargetParams, h0: f64) -> Result<ScreeningCurrent> {
    p.validate()?;
    if !h0.is_finite() {
        return Err(Error::param("h0", "must be finite"));
    }
    let (mu_c, mu_b, r) = (p.mu_c, p.mu_b, p.length);
    let interior = 3.0 * mu_b * h0 / (mu_c + 2.0 * mu_b);
    // -d/dr (b cos / r^2) = 2 b cos / r^3 = (mu_c/mu_b) H_in cos
    let b = 0.5 * (mu_c / mu_b) * interior * r.powi(3);
    // H_out,theta = b sin / R^3, H_in,theta = -H_in sin
    let amplitude = b / r.powi(3) + interior;
    Ok(ScreeningCurrent {
        radius: r,
        interior_field: interior,
        exterior_dipole: b,
        prepulse_dipole: r.powi(3) * (mu_c - mu_b) * h0 / (mu_c + 2.0 * mu_b),
        amplitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bisection on an arbitrary continuous function, used as an oracle
    /// independent of the Newton path.
    fn bisect_zeros(f: impl Fn(f64) -> f64, n: usize, step: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut a = 1e-3;
        while out.len() < n {
            let b = a + step;
            if f(a).signum() != f(b).signum() {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid).signum() == f(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            a = b;
        }
        out
    }

    #[test]
    fn unit_contrast_l1_gives_multiples_of_pi() {
        let s = find_roots(1, 1.0, 20).unwrap();
        let oracle = bisect_zeros(f64::sin, 20, 0.3);
        for (i, (z, o)) in s.roots.iter().zip(&oracle).enumerate() {
            assert!((z - o).abs() < 1e-10, "root {i}: {z} vs {o}");
            assert!((z - (i + 1) as f64 * PI).abs() < 1e-10);
        }
        assert!(s.coefficients.iter().all(|a| (a - 1.0).abs() < 1e-9));
    }

    #[test]
    fn unit_contrast_l2_gives_zeros_of_j1() {
        let s = find_roots(2, 1.0, 10).unwrap();
        let oracle = bisect_zeros(|x| x.sin() / (x * x) - x.cos() / x, 10, 0.25);
        for (z, o) in s.roots.iter().zip(&oracle) {
            assert!((z - o).abs() < 1e-10);
        }
        assert!((s.roots[0] - 4.493_409_457_909_064).abs() < 1e-10);
        assert!((s.roots[1] - 7.725_251_836_937_707).abs() < 1e-10);
    }

    #[test]
    fn residuals_and_ordering() {
        for &mu in &[0.2, 1.0, 5.0, 100.0, 1e4] {
            for l in 1..=6 {
                let s = find_roots(l, mu, 60).unwrap();
                assert!(s.nonpositive.is_empty());
                for w in s.roots.windows(2) {
                    assert!(w[1] > w[0]);
                }
                for &z in &s.roots {
                    assert!(root_residual(l, mu, z).unwrap().abs() < ROOT_RESIDUAL_TOL);
                }
                let last = s.roots.len() - 1;
                let spacing = s.roots[last] - s.roots[last - 1];
                assert!((spacing - PI).abs() < 0.05, "l={l} mu={mu} spacing={spacing}");
            }
        }
    }

    #[test]
    fn h_l_zero_closed_form() {
        assert!((h_l_zero(1, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert!((h_l_zero(5, 1.0).unwrap() - 0.5 / 11.0).abs() < 1e-16);
        assert!((h_l_zero(1, 100.0).unwrap() - 0.5 / (100.0 * 1.02)).abs() < 1e-16);
        assert!(h_l_zero(1, 1e12).unwrap() < 1e-12);
        assert!(h_l_zero(0, 1.0).is_err());
    }

    #[test]
    fn series_at_zero_respects_tail_bound() {
        for &mu in &[1.0, 5.0, 100.0] {
            for l in 1..=5 {
                let full = find_roots(l, mu, 400).unwrap();
                let exact = h_l_zero(l, mu).unwrap();
                let mut last_gap = f64::INFINITY;
                for &n in &[50, 100, 200, 400] {
                    let v = full.truncated(n).h_l(0.0).unwrap();
                    let gap = exact - v.value;
                    assert!(gap > 0.0 && gap < last_gap);
                    assert!(gap <= v.tail_bound, "l={l} mu={mu} n={n}: {gap} > {}", v.tail_bound);
                    last_gap = gap;
                }
            }
        }
    }

    #[test]
    fn h_l_decreases_to_zero() {
        let s = find_roots(2, 5.0, DEFAULT_ROOTS).unwrap();
        let mut prev = s.h_l(0.0).unwrap().value;
        for i in 1..60 {
            let tau = 1e-6 * 10f64.powf(i as f64 / 8.0);
            let v = s.h_l(tau).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
        assert!(s.h_l(50.0).unwrap().value < 1e-100);
        assert!(s.h_l(-1.0).is_err());
    }

    #[test]
    fn bracketing_errors_are_reported() {
        assert!(find_roots(0, 1.0, 3).is_err());
        assert!(find_roots(1, -1.0, 3).is_err());
        assert!(find_roots(1, 1.0, 0).is_err());
    }

    #[test]
    fn mode_labels() {
        // tau_c = 1 s at unit contrast gives tau_mag = 1 s.
        let sigma = 1.0 / (crate::MU0 * 1.0);
        let p = TargetParams::new(1.0, 1.0, sigma, 1.0).unwrap();
        let labels = sphere_mode_labels(&p, 3).unwrap();
        assert_eq!(labels.len(), 3 + 5 + 7);
        assert!((labels[0].kappa - 1.0).abs() < 1e-12);
        assert_eq!(labels.iter().filter(|m| m.l == 2).count(), 5);

        let p100 = TargetParams::new(100.0, 1.0, sigma / 100.0, 1.0).unwrap();
        let d = derive_timescales(&p100).unwrap();
        assert!((d.tau_c - 1.0).abs() < 1e-12);
        let labels = sphere_mode_labels(&p100, 4).unwrap();
        assert!((labels[0].kappa - 100.0).abs() < 1e-9);
        for m in &labels {
            let lf = m.l as f64;
            assert!((m.kappa * m.kappa * d.tau_mag - lf * lf).abs() < 1e-12 * lf * lf);
            assert!((m.crossover_time() - d.tau_mag / (lf * lf)).abs() < 1e-15 * d.tau_mag);
            assert!((m.mode_length - 1.0 / lf).abs() < 1e-15);
            let want = lf * (lf + 1.0) / (100.0 * d.d_c.sqrt());
            assert!((m.lambda - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn screening_current_jump_condition() {
        let p = TargetParams::new(7.0, 2.0, 1e6, 0.3).unwrap();
        let h0 = 2.5;
        let s = initial_screening_sphere(&p, h0).unwrap();
        // H_out = -grad(b cos/r^2) evaluated by central differences in theta at r = R+.
        let phi = |r: f64, th: f64| s.exterior_dipole * th.cos() / (r * r);
        for i in 1..10 {
            let th = i as f64 * PI / 10.0;
            let h = 1e-6;
            let h_out_theta = -(phi(p.length, th + h) - phi(p.length, th - h)) / (2.0 * h * p.length);
            let h_in_theta = -s.interior_field * th.sin();
            let k = h_out_theta - h_in_theta;
            assert!((k - s.k_phi(th)).abs() < 1e-7 * s.amplitude);
            // normal B continuity
            let h_out_r = -(phi(p.length + h, th) - phi(p.length - h, th)) / (2.0 * h);
            let b_in_r = p.mu_c * s.interior_field * th.cos();
            assert!((p.mu_b * h_out_r - b_in_r).abs() < 1e-6 * p.mu_c * h0);
        }
        assert_eq!(s.k_phi(0.0), 0.0);
        assert_eq!(s.k_phi(PI), 0.0);
        let zero = initial_screening_sphere(&p, 0.0).unwrap();
        assert_eq!(zero.k_phi(1.0), 0.0);
    }

    #[test]
    fn screening_current_equal_permeability() {
        let p = TargetParams::new(1.0, 1.0, 1e6, 2.0).unwrap();
        let s = initial_screening_sphere(&p, 1.0).unwrap();
        // uniformly magnetized sphere with interior field H: exterior dipole H R^3 / 2
        assert!((s.interior_field - 1.0).abs() < 1e-15);
        assert!((s.exterior_dipole - 0.5 * 8.0).abs() < 1e-12);
        assert!(s.prepulse_dipole.abs() < 1e-15);
        assert!((s.amplitude - 1.5).abs() < 1e-15);
    }
}
