//! The five verbs, each producing a [`Table`].

use std::path::Path;

use emdecay::early_time::{boundary_dh_dt, early_time_h_l_branch, EarlyBranch};
use emdecay::fit::{fit_power_laws, FitReport};
use emdecay::sphere::{find_roots, h_l_zero, sphere_kappa, SphereSpectrum};
use emdecay::surface::{make_icosphere, parse_off, solve_scalar_modes, SurfaceMesh};
use emdecay::timescales::derive_timescales;
use emdecay::TargetParams;

use crate::config::{Model, Panel, RunConfig};
use crate::error::{CliError, CliResult};
use crate::table::{Cell, Table};

/// Relative size of the first omitted series term at the earliest time.
const SERIES_TOL: f64 = 1e-16;
const MAX_ROOTS: usize = 20_000;

/// Roots needed for the `H_l` series to converge at scaled time `tau_min`.
pub fn roots_for(tau_min: f64, l: usize) -> usize {
    let z = ((1.0 / SERIES_TOL).ln() / tau_min).sqrt();
    ((z / std::f64::consts::PI).ceil() as usize + l + 2).clamp(50, MAX_ROOTS)
}

pub const SPECTRUM_HEADER: &str = "l,n,zeta,tau_decay,kappa,tau_cross";

/// Sphere decay roots with their decay and crossover times.
pub fn spectrum(cfg: &RunConfig) -> CliResult<Table> {
    let p = &cfg.params;
    let d = derive_timescales(p)?;
    let mut t = Table::new(SPECTRUM_HEADER.split(',').map(String::from).collect());
    for &l in &cfg.l_values {
        let spec = find_roots(l, p.mu_ratio(), cfg.roots)?;
        let kappa = sphere_kappa(p, l)?;
        for (n, &z) in spec.roots.iter().enumerate() {
            t.push(vec![
                l.into(),
                (n + 1).into(),
                z.into(),
                (d.tau_c / (z * z)).into(),
                kappa.into(),
                (1.0 / (kappa * kappa)).into(),
            ]);
        }
    }
    Ok(t)
}

/// One l-order of decay curves at times `t` (seconds).
struct OrderCurves {
    l: usize,
    spectrum: Option<SphereSpectrum>,
    kappa: f64,
}

/// Exact and early-time `H_l` with asymptotes, and the voltage proxy
/// `-dH_l/dt` with its two power laws, on a time grid in seconds
/// (default `[1e-6, 1] tau_c`).
pub fn decay(cfg: &RunConfig) -> CliResult<Table> {
    let p = &cfg.params;
    let d = derive_timescales(p)?;
    let times = cfg.grid(1e-6 * d.tau_c, d.tau_c)?;
    let tau_min = times[0] / d.tau_c;
    let has = |m: Model| cfg.models.contains(&m);

    let mut header = vec!["t".to_string(), "tau".to_string()];
    let mut orders = Vec::new();
    for &l in &cfg.l_values {
        let spectrum = if has(Model::Exact) {
            header.push(format!("h_exact_l{l}"));
            header.push(format!("h_exact_tail_l{l}"));
            Some(find_roots(l, p.mu_ratio(), roots_for(tau_min, l))?)
        } else {
            None
        };
        for (m, name) in [
            (Model::Early, "h_early"),
            (Model::EarlyEarly, "h_early_early"),
            (Model::LateEarly, "h_late_early"),
        ] {
            if has(m) {
                header.push(format!("{name}_l{l}"));
            }
        }
        if has(Model::Voltage) {
            for name in ["v_early", "v_early_early", "v_late_early"] {
                header.push(format!("{name}_l{l}"));
            }
        }
        orders.push(OrderCurves {
            l,
            spectrum,
            kappa: sphere_kappa(p, l)?,
        });
    }
    let mut table = Table::new(header);
    let scale = 1.0 / (4.0 * d.tau_c).sqrt();
    let root_pi = std::f64::consts::PI.sqrt();
    for &t in &times {
        let tau = t / d.tau_c;
        let mut row: Vec<Cell> = vec![t.into(), tau.into()];
        for o in &orders {
            if let Some(s) = &o.spectrum {
                let v = s.h_l(tau)?;
                row.push(v.value.into());
                row.push(v.tail_bound.into());
            }
            for (m, b) in [
                (Model::Early, EarlyBranch::Full),
                (Model::EarlyEarly, EarlyBranch::EarlyEarly),
                (Model::LateEarly, EarlyBranch::LateEarly),
            ] {
                if has(m) {
                    row.push(early_time_h_l_branch(p, o.l, t, b)?.into());
                }
            }
            if has(Model::Voltage) {
                row.push((scale * boundary_dh_dt(t, o.kappa)?).into());
                row.push((scale / (root_pi * t.sqrt())).into());
                row.push((scale / (2.0 * root_pi * o.kappa * o.kappa * t.powf(1.5))).into());
            }
        }
        table.push(row);
    }
    Ok(table)
}

/// Read a `t,<column>` CSV; `t` must be increasing.
pub fn read_series(path: &Path, column: &str) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path.display(), e))?;
    let headers = rdr.headers().map_err(|e| CliError::io(path.display(), e))?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Io(format!(
                "{}: no `{name}` column (header is `{}`)",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(",")
            ))
        })
    };
    let (it, iv) = (find("t")?, find(column)?);
    let (mut t, mut v) = (Vec::new(), Vec::new());
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| CliError::io(path.display(), e))?;
        let num = |i: usize| -> CliResult<f64> {
            let s = rec.get(i).unwrap_or("");
            s.parse::<f64>()
                .map_err(|e| CliError::Io(format!("{}:{line}: bad number `{s}`: {e}", path.display())))
        };
        let (ti, vi) = (num(it)?, num(iv)?);
        if let Some(&prev) = t.last() {
            if !(ti > prev) {
                return Err(CliError::Io(format!(
                    "{}:{line}: t must be strictly increasing",
                    path.display()
                )));
            }
        }
        t.push(ti);
        v.push(vi);
    }
    Ok((t, v))
}

pub const FIT_HEADER: &str = "window,t_lo,t_hi,slope,slope_stderr,intercept,points,regime,crossover_estimate";

pub fn fit_table(report: &FitReport) -> Table {
    let mut t = Table::new(FIT_HEADER.split(',').map(String::from).collect());
    for (k, w) in report.windows.iter().enumerate() {
        t.push(vec![
            (k + 1).into(),
            w.t_lo.into(),
            w.t_hi.into(),
            w.slope.into(),
            w.slope_stderr.into(),
            w.intercept.into(),
            w.points.into(),
            w.regime.label().into(),
            report.crossover_estimate.into(),
        ]);
    }
    t
}

/// Log-log slopes per window and, for two or more windows, the crossover
/// estimate from the first two fitted asymptotes.
pub fn fit(cfg: &RunConfig) -> CliResult<Table> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Config("field `input`: fit needs an input CSV".into()))?;
    if cfg.windows.is_empty() {
        return Err(CliError::Config(
            "field `windows`: fit needs at least one lo:hi window".into(),
        ));
    }
    let (t, v) = read_series(input, &cfg.column)?;
    Ok(fit_table(&fit_power_laws(&t, &v, &cfg.windows)?))
}

/// Data behind one decay-curve panel, on a scaled-time grid `tau = t / tau_c`.
#[derive(Debug, Clone)]
pub struct Fig3Panel {
    pub panel: Panel,
    pub tau: Vec<f64>,
    pub l_values: Vec<usize>,
    /// Per order: exact, early, early-early, late-early.
    pub exact: Vec<Vec<f64>>,
    pub exact_tail: Vec<Vec<f64>>,
    pub early: Vec<Vec<f64>>,
    pub early_early: Vec<Vec<f64>>,
    pub late_early: Vec<Vec<f64>>,
    /// Exact series truncated at three terms; left panel only.
    pub truncated3: Option<Vec<Vec<f64>>>,
    pub h0: Vec<f64>,
}

pub fn fig3_panel(panel: Panel, cfg: &RunConfig) -> CliResult<Fig3Panel> {
    let p = TargetParams::with_contrast(panel.mu_ratio(), cfg.params.sigma_c, cfg.params.length)?;
    let d = derive_timescales(&p)?;
    let tau = cfg.grid(1e-6, 1.0)?;
    let mut out = Fig3Panel {
        panel,
        tau: tau.clone(),
        l_values: cfg.l_values.clone(),
        exact: Vec::new(),
        exact_tail: Vec::new(),
        early: Vec::new(),
        early_early: Vec::new(),
        late_early: Vec::new(),
        truncated3: (panel == Panel::Mu1).then(Vec::new),
        h0: Vec::new(),
    };
    for &l in &cfg.l_values {
        let spec = find_roots(l, panel.mu_ratio(), roots_for(tau[0], l))?;
        let (mut ex, mut tail) = (Vec::new(), Vec::new());
        for &s in &tau {
            let v = spec.h_l(s)?;
            ex.push(v.value);
            tail.push(v.tail_bound);
        }
        out.exact.push(ex);
        out.exact_tail.push(tail);
        let branch = |b: EarlyBranch| -> CliResult<Vec<f64>> {
            tau.iter()
                .map(|&s| Ok(early_time_h_l_branch(&p, l, s * d.tau_c, b)?))
                .collect()
        };
        out.early.push(branch(EarlyBranch::Full)?);
        out.early_early.push(branch(EarlyBranch::EarlyEarly)?);
        out.late_early.push(branch(EarlyBranch::LateEarly)?);
        if let Some(tr) = out.truncated3.as_mut() {
            let three = spec.truncated(3);
            tr.push(
                tau.iter()
                    .map(|&s| three.h_l(s).map(|v| v.value))
                    .collect::<Result<_, _>>()?,
            );
        }
        out.h0.push(h_l_zero(l, panel.mu_ratio())?);
    }
    Ok(out)
}

impl Fig3Panel {
    pub fn to_table(&self) -> Table {
        let mut header = vec!["tau".to_string()];
        for &l in &self.l_values {
            for name in ["exact", "exact_tail", "early", "early_early", "late_early"] {
                header.push(format!("{name}_l{l}"));
            }
            if self.truncated3.is_some() {
                header.push(format!("exact3_l{l}"));
            }
        }
        let mut t = Table::new(header);
        for (i, &s) in self.tau.iter().enumerate() {
            let mut row: Vec<Cell> = vec![s.into()];
            for k in 0..self.l_values.len() {
                for c in [
                    &self.exact,
                    &self.exact_tail,
                    &self.early,
                    &self.early_early,
                    &self.late_early,
                ] {
                    row.push(c[k][i].into());
                }
                if let Some(tr) = &self.truncated3 {
                    row.push(tr[k][i].into());
                }
            }
            t.push(row);
        }
        t
    }

    /// Largest grid time below which the early-early asymptote tracks the
    /// full early-time form to 10% of the decay `H_l(0) - H_l`; `None` when
    /// it fails already at the first grid point.
    pub fn early_early_width(&self, k: usize) -> Option<f64> {
        let mut width = None;
        for (i, &s) in self.tau.iter().enumerate() {
            let full = self.early[k][i];
            let drop = self.h0[k] - full;
            if (self.early_early[k][i] - full).abs() <= 0.1 * drop.abs() {
                width = Some(s);
            } else {
                break;
            }
        }
        width
    }

    /// The shape properties the panel must satisfy.
    pub fn check(&self) -> Vec<PropertyCheck> {
        let mut out = Vec::new();
        let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
        for (k, &l) in self.l_values.iter().enumerate() {
            out.push(PropertyCheck::new(
                format!("exact l={l} positive and decreasing"),
                self.exact[k].iter().all(|&x| x > 0.0) && decreasing(&self.exact[k]),
                String::new(),
            ));
            if let Some(tr) = &self.truncated3 {
                out.push(PropertyCheck::new(
                    format!("3-term series l={l} positive and decreasing"),
                    tr[k].iter().all(|&x| x > 0.0) && decreasing(&tr[k]),
                    String::new(),
                ));
            }
            for (name, c) in [
                ("early", &self.early),
                ("early-early", &self.early_early),
                ("late-early", &self.late_early),
            ] {
                out.push(PropertyCheck::new(
                    format!("{name} l={l} decreasing"),
                    decreasing(&c[k]),
                    String::new(),
                ));
            }
        }
        if self.panel == Panel::Mu1 {
            let ordered = (1..self.l_values.len()).all(|k| {
                self.l_values[k] > self.l_values[k - 1]
                    && self.exact[k].iter().zip(&self.exact[k - 1]).all(|(hi, lo)| hi < lo)
            });
            out.push(PropertyCheck::new("higher l lies lower".into(), ordered, String::new()));
        }
        if self.panel == Panel::Mu100 {
            for (k, &l) in self.l_values.iter().enumerate() {
                let w = self.early_early_width(k);
                out.push(PropertyCheck::new(
                    format!("early-early regime l={l} narrower than 1e-4 tau_c"),
                    w.is_none_or(|w| w < 1e-4),
                    match w {
                        Some(w) => format!("width {w:.3e}"),
                        None => format!("below grid start {:.1e}", self.tau[0]),
                    },
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl PropertyCheck {
    fn new(name: String, pass: bool, detail: String) -> Self {
        PropertyCheck { name, pass, detail }
    }
}

/// Generate a panel and fail if any shape property is violated.
pub fn fig3(panel: Panel, cfg: &RunConfig) -> CliResult<(Fig3Panel, Vec<PropertyCheck>)> {
    let data = fig3_panel(panel, cfg)?;
    let checks = data.check();
    let failed: Vec<&PropertyCheck> = checks.iter().filter(|c| !c.pass).collect();
    if !failed.is_empty() {
        let names: Vec<String> = failed.iter().map(|c| format!("{} {}", c.name, c.detail)).collect();
        return Err(CliError::Numeric(format!(
            "panel {} violates: {}",
            panel.label(),
            names.join("; ")
        )));
    }
    Ok((data, checks))
}

/// Sphere radius if every vertex lies at the same distance from the
/// centroid.
pub fn sphere_radius(mesh: &SurfaceMesh) -> Option<f64> {
    let n = mesh.n_vertices() as f64;
    let c = mesh
        .vertices
        .iter()
        .fold(emdecay::surface::mesh::Point::zeros(), |a, v| a + v)
        / n;
    let r: Vec<f64> = mesh.vertices.iter().map(|v| (v - c).norm()).collect();
    let mean = r.iter().sum::<f64>() / n;
    r.iter().all(|x| (x - mean).abs() <= 1e-9 * mean).then_some(mean)
}

pub const MODES_HEADER: &str = "n,kappa,multiplet,l_sphere,kappa_sphere,rel_error";

/// Scalar surface modes of an icosphere of radius `length` (or an OFF
/// mesh), with errors against the analytic sphere spectrum.
pub fn modes(cfg: &RunConfig) -> CliResult<Table> {
    let mesh = match &cfg.mesh {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
            parse_off(&text)?
        }
        None => make_icosphere(cfg.params.length, cfg.mesh_level)?,
    };
    let count = cfg.modes.min(mesh.n_vertices() - 1);
    let basis = solve_scalar_modes(&mesh, &cfg.params, count)?;
    let analytic = match sphere_radius(&mesh) {
        Some(r) => Some(derive_timescales(&TargetParams {
            length: r,
            ..cfg.params
        })?),
        None => None,
    };
    let mut multiplet = vec![0usize; basis.kappa.len()];
    for (id, m) in basis.kappa_multiplets().iter().enumerate() {
        for slot in &mut multiplet[m.start..m.start + m.len] {
            *slot = id + 1;
        }
    }
    let mut t = Table::new(MODES_HEADER.split(',').map(String::from).collect());
    for (i, &k) in basis.kappa.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(i + 1).into(), k.into(), multiplet[i].into()];
        match &analytic {
            Some(d) => {
                // modes l^2 - 1 .. (l+1)^2 - 2 belong to order l
                let l = ((i + 1) as f64).sqrt().floor() as usize;
                let want = l as f64 / d.tau_mag.sqrt();
                row.extend([l.into(), want.into(), ((k - want) / want).into()]);
            }
            None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        t.push(row);
    }
    Ok(t)
}
