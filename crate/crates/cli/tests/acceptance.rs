//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fail.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use emdecay::early_time::{
    boundary_dh_dt, early_time_h_l_branch, pde_residual, robin_boundary_value, EarlyBranch, ProfileQuery, Steps,
};
use emdecay::fit::{asymptote_intersection, fit_window, log_grid};
use emdecay::sphere::{find_roots, h_l_zero, sphere_mode_labels};
use emdecay::surface::operators::build_ntd_operator;
use emdecay::surface::{make_icosphere, solve_scalar_modes_with};
use emdecay::timescales::derive_timescales;
use emdecay::TargetParams;
use emdecay_cli::commands::{fig3, roots_for, spectrum};
use emdecay_cli::config::{Panel, RunConfig, Settings};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail.push_str(&format!("; over time limit {limit:?}"));
        }
    }
    let status = if o.pass { "PASS" } else { "FAIL" };
    println!("[{status}] {id}. {name}: {} ({:.3} s)", o.detail, took.as_secs_f64());
    o.pass
}

/// Zero of `sin` in `((n - 1/2) pi, (n + 1/2) pi)` by bisection.
fn sin_zero(n: usize) -> f64 {
    let (mut lo, mut hi) = ((n as f64 - 0.5) * PI, (n as f64 + 0.5) * PI);
    let s_lo = lo.sin().signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mid.sin().signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn root_degeneration() -> Outcome {
    let spec = find_roots(1, 1.0, 50).unwrap();
    let mut worst_oracle = 0.0f64;
    let mut worst_npi = 0.0f64;
    for (k, &z) in spec.roots.iter().enumerate() {
        let n = k + 1;
        worst_oracle = worst_oracle.max((z - sin_zero(n)).abs());
        worst_npi = worst_npi.max((z - n as f64 * PI).abs());
    }
    outcome(
        spec.roots.len() == 50 && worst_oracle < 1e-10 && worst_npi < 1e-10,
        format!("max |zeta - bisection| = {worst_oracle:.2e}, max |zeta - n pi| = {worst_npi:.2e}"),
    )
}

fn series_identity() -> Outcome {
    let mut pass = true;
    let mut worst = 0.0f64;
    for &m in &[1.0, 5.0, 100.0] {
        for l in 1..=5usize {
            let spec = find_roots(l, m, 500).unwrap();
            let s = spec.h_l(0.0).unwrap();
            let lf = l as f64;
            let closed = (0.5 / m) / (lf + (lf + 1.0) / m);
            let gap = (s.value - closed).abs();
            pass &= gap <= s.tail_bound;
            worst = worst.max(gap / s.tail_bound);
        }
    }
    let sixth = find_roots(1, 1.0, 500).unwrap().h_l(0.0).unwrap();
    pass &= (sixth.value - 1.0 / 6.0).abs() <= sixth.tail_bound;
    pass &= h_l_zero(1, 1.0).unwrap() == 1.0 / 6.0;
    outcome(
        pass,
        format!(
            "worst |sum - closed form| / tail bound = {worst:.3}; l=1 contrast 1 sum = {:.12} (1/6 = {:.12})",
            sixth.value,
            1.0 / 6.0
        ),
    )
}

fn dh_dt_series(kappa: f64, k2t_lo: f64, k2t_hi: f64) -> (Vec<f64>, Vec<f64>) {
    let k2 = kappa * kappa;
    let t = log_grid(k2t_lo / k2, k2t_hi / k2, 200);
    let v = t.iter().map(|&t| boundary_dh_dt(t, kappa).unwrap()).collect();
    (t, v)
}

fn dual_power_law() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &kappa in &[1e-2, 1.0, 1e2] {
        let (t, v) = dh_dt_series(kappa, 1e-4, 1e-2);
        let early = fit_window(&t, &v, t[0], t[t.len() - 1]).unwrap().slope;
        let (t, v) = dh_dt_series(kappa, 1e2, 1e4);
        let late = fit_window(&t, &v, t[0], t[t.len() - 1]).unwrap().slope;
        pass &= (early + 0.5).abs() <= 0.02 && (late + 1.5).abs() <= 0.02;
        // local slope at the lower window edge, for the record
        let (t, v) = dh_dt_series(kappa, 1e-4, 1.1e-4);
        let edge = fit_window(&t, &v, t[0], t[t.len() - 1]).unwrap().slope;
        parts.push(format!(
            "kappa={kappa:e}: early {early:.4} (local at lower edge {edge:.4}), late {late:.4}"
        ));
    }
    outcome(pass, format!("target -0.5/-1.5 +-0.02; {}", parts.join("; ")))
}

fn crossover_placement() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &kappa in &[1e-2, 1.0, 1e2] {
        let k2 = kappa * kappa;
        let t = log_grid(1e-5 / k2, 1e5 / k2, 1000);
        let v: Vec<f64> = t.iter().map(|&t| boundary_dh_dt(t, kappa).unwrap()).collect();
        let a = fit_window(&t, &v, 1e-4 / k2, 1e-2 / k2).unwrap();
        let b = fit_window(&t, &v, 1e2 / k2, 1e4 / k2).unwrap();
        let x = asymptote_intersection(&a, &b).unwrap();
        let ratio = x * k2;
        pass &= ratio > 1.0 / 3.0 && ratio < 3.0;
        parts.push(format!("kappa={kappa:e}: t_x kappa^2 = {ratio:.3}"));
    }
    let mut worst = 0.0f64;
    for &m in &[1.0, 5.0, 100.0] {
        let p = TargetParams::with_contrast(m, 1e7, 0.05).unwrap();
        let d = derive_timescales(&p).unwrap();
        for mode in sphere_mode_labels(&p, 5).unwrap() {
            let want = d.tau_mag / (mode.l * mode.l) as f64;
            worst = worst.max((mode.crossover_time() - want).abs() / want);
        }
        let mut s = Settings::default();
        s.set("mu_ratio", m.to_string(), emdecay_cli::config::Origin::Flag)
            .unwrap();
        s.set("roots", "1", emdecay_cli::config::Origin::Flag).unwrap();
        let cfg = RunConfig::from_settings(&s).unwrap();
        let table = spectrum(&cfg).unwrap();
        let ls = table.column("l").unwrap();
        let cross = table.column("tau_cross").unwrap();
        for (l, c) in ls.iter().zip(&cross) {
            let want = d.tau_mag / (l * l);
            worst = worst.max((c - want).abs() / want);
        }
    }
    pass &= worst <= 4.0 * f64::EPSILON;
    outcome(
        pass,
        format!("{}; tau_cross vs tau_mag/l^2 worst rel {worst:.1e}", parts.join(", ")),
    )
}

/// Largest grid time below which `|early - exact| / H_l(0) < tol` holds at
/// every grid point.
fn agreement_window(tau: &[f64], early: &[f64], exact: &[f64], h0: f64, tol: f64) -> f64 {
    let mut w = 0.0;
    for i in 0..tau.len() {
        if (early[i] - exact[i]).abs() / h0 < tol {
            w = tau[i];
        } else {
            break;
        }
    }
    w
}

fn figure_properties() -> Outcome {
    let tau = log_grid(1e-6, 1.0, 4000);
    let p = TargetParams::with_contrast(1.0, 1e7, 0.05).unwrap();
    let d = derive_timescales(&p).unwrap();
    let mut windows = Vec::new();
    let mut max_err_l1 = 0.0f64;
    for l in 1..=5usize {
        let spec = find_roots(l, 1.0, roots_for(tau[0], l)).unwrap();
        let exact: Vec<f64> = tau.iter().map(|&s| spec.h_l(s).unwrap().value).collect();
        let early: Vec<f64> = tau
            .iter()
            .map(|&s| early_time_h_l_branch(&p, l, s * d.tau_c, EarlyBranch::Full).unwrap())
            .collect();
        let h0 = h_l_zero(l, 1.0).unwrap();
        if l == 1 {
            for i in 0..tau.len() {
                if tau[i] <= 0.05 {
                    max_err_l1 = max_err_l1.max((early[i] - exact[i]).abs() / h0);
                }
            }
        }
        windows.push(agreement_window(&tau, &early, &exact, h0, 0.05));
    }
    let l1_ok = max_err_l1 < 0.05;
    let shrink_ok = (1..5).all(|k| windows[k] * ((k + 1) * (k + 1)) as f64 <= windows[0]);
    // least-squares exponent of w_l against l
    let xs: Vec<f64> = (1..=5).map(|l| (l as f64).ln()).collect();
    let ys: Vec<f64> = windows.iter().map(|w| w.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 5.0, ys.iter().sum::<f64>() / 5.0);
    let expo = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();

    let p100 = TargetParams::with_contrast(100.0, 1e7, 0.05).unwrap();
    let d100 = derive_timescales(&p100).unwrap();
    let mut worst_le = 0.0f64;
    for l in 1..=5usize {
        let h0 = h_l_zero(l, 100.0).unwrap();
        for &s in tau.iter().filter(|&&s| s >= 1e-3) {
            let t = s * d100.tau_c;
            let e = early_time_h_l_branch(&p100, l, t, EarlyBranch::Full).unwrap();
            let le = early_time_h_l_branch(&p100, l, t, EarlyBranch::LateEarly).unwrap();
            worst_le = worst_le.max((e - le).abs() / h0);
        }
    }
    let le_ok = worst_le < 0.01;

    let start = Instant::now();
    let cfg = RunConfig::from_settings(&Settings::default()).unwrap();
    let bundle = Panel::ALL
        .iter()
        .map(|&panel| fig3(panel, &cfg))
        .collect::<Result<Vec<_>, _>>();
    let bundle_time = start.elapsed().as_secs_f64();
    let bundle_ok = bundle.is_ok() && bundle_time < 30.0;
    let scaled: Vec<String> = windows
        .iter()
        .enumerate()
        .map(|(k, w)| format!("{:.3}", w * ((k + 1) * (k + 1)) as f64))
        .collect();
    outcome(
        l1_ok && shrink_ok && le_ok && bundle_ok,
        format!(
            "contrast 1 l=1 max err/H(0) on tau<=0.05 = {max_err_l1:.4} [{}]; window w_l*l^2 for l=1..5 = [{}], \
             w_l ~ l^{expo:.2} [{}]; contrast 100 max |early - late-early|/H(0) on tau>=1e-3 = {worst_le:.2e} [{}]; \
             three-panel bundle {bundle_time:.2} s, shape checks {} [{}]",
            ok(l1_ok),
            scaled.join(", "),
            ok(shrink_ok),
            ok(le_ok),
            if bundle.is_ok() { "pass" } else { "fail" },
            ok(bundle_ok),
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fail"
    }
}

fn pde_boundary_residuals() -> Outcome {
    let mut worst_pde = 0.0f64;
    let mut worst_robin = 0.0f64;
    let mut count = 0;
    for &t in &[1e-4f64, 1e-2, 1.0, 10.0, 100.0] {
        for &kappa in &[0.0f64, 0.3, 3.0, 30.0] {
            for &c in &[0.05, 0.2, 0.5, 1.0, 2.0] {
                let q = ProfileQuery::new(-c * t.sqrt(), t, kappa).unwrap();
                worst_pde = worst_pde.max(pde_residual(q, Steps::relative_to(&q)).unwrap().relative());
                let dz = 1e-4 * t.sqrt().min(1.0 / kappa.max(1e-300));
                worst_robin = worst_robin.max((robin_boundary_value(t, kappa, dz).unwrap() - 1.0).abs());
                count += 1;
            }
        }
    }
    outcome(
        count == 100 && worst_pde < 1e-5 && worst_robin < 1e-5,
        format!("{count} points: worst PDE residual {worst_pde:.2e} rel, worst |Robin - 1| {worst_robin:.2e}"),
    )
}

fn surface_convergence() -> Outcome {
    let radius = 0.05;
    let p = TargetParams::with_contrast(100.0, 1e7, radius).unwrap();
    let k1 = 1.0 / derive_timescales(&p).unwrap().tau_mag.sqrt();
    let mut errors = Vec::new();
    let mut sizes = Vec::new();
    let mut ntd_const = 0.0;
    for level in 2..=4u32 {
        let mesh = make_icosphere(radius, level).unwrap();
        let ntd = build_ntd_operator(&mesh).unwrap();
        let basis = solve_scalar_modes_with(&mesh, &p, &ntd, 8).unwrap();
        let m = basis.kappa_multiplets();
        sizes.push((m[0].len, m.get(1).map_or(0, |x| x.len)));
        let e1 = (m[0].mean / k1 - 1.0).abs();
        let e2 = m.get(1).map_or(f64::INFINITY, |x| (x.mean / (2.0 * k1) - 1.0).abs());
        errors.push((e1, e2));
        if level == 4 {
            let out = ntd.apply(&vec![1.0; mesh.n_vertices()]).unwrap();
            let area = mesh.total_area();
            ntd_const = out.iter().zip(&mesh.vertex_areas).map(|(o, a)| o * a).sum::<f64>() / area;
        }
    }
    let (e1, e2) = errors[2];
    let sizes_ok = sizes[2] == (3, 5);
    let accurate = e1 < 0.05 && e2 < 0.05;
    let decreasing = errors.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    let ntd_rel = (ntd_const / radius - 1.0).abs();
    outcome(
        sizes_ok && accurate && decreasing && ntd_rel < 0.02,
        format!(
            "level 4 multiplets {:?}, errors l=1 {:.4}, l=2 {:.4}; errors by level 2/3/4: l=1 [{:.4}, {:.4}, {:.4}], \
             l=2 [{:.4}, {:.4}, {:.4}]; NtD constant / L = {:.5}",
            sizes[2],
            e1,
            e2,
            errors[0].0,
            errors[1].0,
            errors[2].0,
            errors[0].1,
            errors[1].1,
            errors[2].1,
            ntd_const / radius
        ),
    )
}

fn timescale_arithmetic() -> Outcome {
    let p = TargetParams::new(100.0, 1.0, 1e7, 0.05).unwrap();
    let d = derive_timescales(&p).unwrap();
    let ratio = d.tau_mag / d.tau_c;
    let order_one = d.tau_c > 0.1 && d.tau_c < 10.0;
    outcome(
        order_one && (ratio / 1e-4 - 1.0).abs() < 1e-12,
        format!("tau_c = {:.4} s, tau_mag/tau_c = {ratio:.6e}", d.tau_c),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "root degeneration to n pi", Some(secs(1)), root_degeneration),
        run(2, "series sum equals closed-form H_l(0)", None, series_identity),
        run(3, "dual power law of dH/dt", Some(secs(1)), dual_power_law),
        run(4, "crossover placement", None, crossover_placement),
        run(5, "decay-curve panel properties", Some(secs(60)), figure_properties),
        run(6, "PDE and boundary residuals", Some(secs(5)), pde_boundary_residuals),
        run(
            7,
            "surface-mode convergence on icospheres",
            Some(secs(300)),
            surface_convergence,
        ),
        run(8, "steel timescale arithmetic", None, timescale_arithmetic),
    ];
    let failed = results.iter().filter(|r| !**r).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
