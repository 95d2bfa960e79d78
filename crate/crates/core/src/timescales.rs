//! Physical target parameters and the timescales derived from them.
//!
//! Everything is SI. The diffusion constant of a conductor with relative
//! permeability `mu` and conductivity `sigma` is `D = 1 / (mu0 mu sigma)`.

use crate::error::{Error, Result};
use crate::sphere;
use crate::MU0;

/// Target and background properties.
///
/// `mu_c`, `mu_b` are relative permeabilities. `length` is the target
/// length scale (the radius for a sphere).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetParams {
    pub mu_c: f64,
    pub mu_b: f64,
    /// S/m
    pub sigma_c: f64,
    /// m
    pub length: f64,
    /// Background conductivity, S/m. Metadata only.
    pub sigma_b: Option<f64>,
    /// Sensor-target distance, m. Metadata only.
    pub distance: Option<f64>,
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(field, format!("must be finite and > 0, got {v}")))
    }
}

impl TargetParams {
    pub fn new(mu_c: f64, mu_b: f64, sigma_c: f64, length: f64) -> Result<Self> {
        let p = TargetParams {
            mu_c,
            mu_b,
            sigma_c,
            length,
            sigma_b: None,
            distance: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for a given permeability contrast with `mu_b = 1`.
    pub fn with_contrast(mu_ratio: f64, sigma_c: f64, length: f64) -> Result<Self> {
        Self::new(mu_ratio, 1.0, sigma_c, length)
    }

    pub fn with_background(mut self, sigma_b: f64) -> Result<Self> {
        if !(sigma_b.is_finite() && sigma_b >= 0.0) {
            return Err(Error::param("sigma_b", format!("must be >= 0, got {sigma_b}")));
        }
        self.sigma_b = Some(sigma_b);
        Ok(self)
    }

    pub fn with_distance(mut self, distance: f64) -> Result<Self> {
        positive("distance", distance)?;
        self.distance = Some(distance);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        positive("mu_c", self.mu_c)?;
        positive("mu_b", self.mu_b)?;
        positive("sigma_c", self.sigma_c)?;
        positive("length", self.length)?;
        let ratio = self.mu_c / self.mu_b;
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::param("mu_c/mu_b", format!("contrast not finite: {ratio}")));
        }
        Ok(())
    }

    /// Permeability contrast `mu_c / mu_b`.
    pub fn mu_ratio(&self) -> f64 {
        self.mu_c / self.mu_b
    }

    /// Target diffusion constant, m^2/s.
    pub fn diffusion(&self) -> f64 {
        1.0 / (MU0 * self.mu_c * self.sigma_c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedTimescales {
    /// Target diffusion constant, m^2/s.
    pub d_c: f64,
    /// Bulk time `L^2 / D_c`, s.
    pub tau_c: f64,
    /// Magnetic crossover time `tau_c (mu_b/mu_c)^2`, s.
    pub tau_mag: f64,
    pub d_b: Option<f64>,
    /// Background communication time `R^2 / D_b`, s.
    pub tau_b: Option<f64>,
    /// Heuristic onset of bulk effects: the slowest exact sphere decay
    /// time `tau_c / zeta_11^2`. A labelled estimate, not a derived result.
    pub tau_e_estimate: f64,
}

pub fn derive_timescales(p: &TargetParams) -> Result<DerivedTimescales> {
    p.validate()?;
    let d_c = p.diffusion();
    let tau_c = p.length * p.length / d_c;
    let contrast = p.mu_b / p.mu_c;
    let tau_mag = tau_c * contrast * contrast;
    let d_b = match p.sigma_b {
        Some(s) if s > 0.0 => Some(1.0 / (MU0 * p.mu_b * s)),
        _ => None,
    };
    let tau_b = match (d_b, p.distance) {
        (Some(d), Some(r)) => Some(r * r / d),
        _ => None,
    };
    let slowest = sphere::find_roots(1, p.mu_ratio(), 1)
        .ok()
        .and_then(|s| s.roots.first().copied())
        .unwrap_or(std::f64::consts::PI);
    Ok(DerivedTimescales {
        d_c,
        tau_c,
        tau_mag,
        d_b,
        tau_b,
        tau_e_estimate: tau_c / (slowest * slowest),
    })
}

impl DerivedTimescales {
    /// Boundary-layer parameter `sqrt(D_c t / L^2)`.
    pub fn epsilon(&self, length: f64, t: f64) -> Result<f64> {
        epsilon_of_t(self, length, t)
    }
}

pub fn epsilon_of_t(d: &DerivedTimescales, length: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain("epsilon_of_t", "t", t, "must be >= 0"));
    }
    positive("length", length)?;
    Ok((d.d_c * t / (length * length)).sqrt())
}
