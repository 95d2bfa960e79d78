//! Surface-mode solver against analytic sphere values.

use std::sync::OnceLock;

use emdecay::sphere::initial_screening_sphere;
use emdecay::surface::mesh::Point;
use emdecay::surface::modes::{raw_mode_spectrum, solve_surface_modes, SurfaceModeBasis};
use emdecay::surface::operators::{
    build_ntd_operator, build_surface_laplacian, mode_operator, symmetrize_ntd, SurfaceOperator,
};
use emdecay::surface::{make_icosphere, project_surface_current, solve_scalar_modes_with, SurfaceMesh};
use emdecay::timescales::derive_timescales;
use emdecay::TargetParams;

const LEVEL: u32 = 4;

fn params() -> TargetParams {
    TargetParams::with_contrast(100.0, 1e6, 1.0).unwrap()
}

fn tau_mag(p: &TargetParams) -> f64 {
    derive_timescales(p).unwrap().tau_mag
}

struct Fixture {
    mesh: SurfaceMesh,
    ntd: SurfaceOperator,
    basis: SurfaceModeBasis,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let mesh = make_icosphere(1.0, LEVEL).unwrap();
        let ntd = build_ntd_operator(&mesh).unwrap();
        let basis = solve_surface_modes(&mesh, &params(), &ntd, 40, 40).unwrap();
        Fixture { mesh, ntd, basis }
    })
}

/// Real solid harmonics of degree 0..=3, evaluated on the unit sphere.
fn harmonics(l: usize) -> Vec<fn(&Point) -> f64> {
    match l {
        0 => vec![|_| 1.0],
        1 => vec![|x| x.x, |x| x.y, |x| x.z],
        2 => vec![|x| x.x * x.y, |x| x.y * x.z, |x| x.x * x.x - x.y * x.y, |x| {
            3.0 * x.z * x.z - 1.0
        }],
        3 => vec![|x| x.x * x.y * x.z, |x| x.z * (5.0 * x.z * x.z - 3.0), |x| {
            x.x * (x.x * x.x - 3.0 * x.y * x.y)
        }],
        _ => unreachable!(),
    }
}

fn sample(mesh: &SurfaceMesh, f: fn(&Point) -> f64, radius: f64) -> Vec<f64> {
    mesh.vertices.iter().map(|x| f(&(x / radius))).collect()
}

fn mass_norm(mesh: &SurfaceMesh, v: &[f64]) -> f64 {
    v.iter()
        .zip(&mesh.vertex_areas)
        .map(|(x, a)| a * x * x)
        .sum::<f64>()
        .sqrt()
}

/// Relative mass-norm residual of `op y - lambda y` and the Rayleigh quotient.
fn eigen_check(mesh: &SurfaceMesh, op: &SurfaceOperator, y: &[f64], lambda: f64) -> (f64, f64) {
    let out = op.apply(y).unwrap();
    let num: f64 = (0..y.len()).map(|i| mesh.vertex_areas[i] * y[i] * out[i]).sum();
    let den: f64 = (0..y.len()).map(|i| mesh.vertex_areas[i] * y[i] * y[i]).sum();
    let r: Vec<f64> = out.iter().zip(y).map(|(o, v)| o - lambda * v).collect();
    (mass_norm(mesh, &r) / (lambda.abs() * mass_norm(mesh, y)), num / den)
}

#[test]
fn laplacian_degree_two_and_radius_scaling() {
    let p = params();
    let unit = p.mu_c * p.diffusion().sqrt();
    let mesh = &fixture().mesh;
    let lap = build_surface_laplacian(mesh, &p).unwrap();
    for f in harmonics(2) {
        let (_, q) = eigen_check(mesh, &lap, &sample(mesh, f, 1.0), -6.0 * unit);
        assert!((q / (-6.0 * unit) - 1.0).abs() < 0.02, "{q}");
    }
    let small = make_icosphere(1.0, 2).unwrap();
    let big = make_icosphere(2.0, 2).unwrap();
    let a = build_surface_laplacian(&small, &p).unwrap();
    let b = build_surface_laplacian(&big, &p).unwrap();
    let y = sample(&small, harmonics(2)[0], 1.0);
    let (_, qa) = eigen_check(&small, &a, &y, 1.0);
    let (_, qb) = eigen_check(&big, &b, &y, 1.0);
    assert!((qa / qb - 4.0).abs() < 1e-10);
}

#[test]
fn ntd_constant_and_dipole_data() {
    let Fixture { mesh, ntd, .. } = fixture();
    for (l, want) in [(0usize, 1.0), (1, 0.5)] {
        for f in harmonics(l) {
            let (res, q) = eigen_check(mesh, ntd, &sample(mesh, f, 1.0), want);
            assert!(
                res < 0.02 && (q / want - 1.0).abs() < 0.02,
                "l={l}: residual {res}, quotient {q}"
            );
        }
    }
}

#[test]
fn ntd_scales_with_radius() {
    let a = make_icosphere(1.0, 2).unwrap();
    let b = make_icosphere(3.0, 2).unwrap();
    let na = build_ntd_operator(&a).unwrap();
    let nb = build_ntd_operator(&b).unwrap();
    assert!((&nb.matrix - &na.matrix * 3.0).amax() < 1e-10 * na.matrix.amax());
}

#[test]
fn ntd_area_weighted_symmetric_psd() {
    let mesh = make_icosphere(1.0, 3).unwrap();
    let ntd = build_ntd_operator(&mesh).unwrap();
    let mut g = ntd.matrix.clone();
    for (i, mut row) in g.row_iter_mut().enumerate() {
        row *= mesh.vertex_areas[i];
    }
    let asym = (&g - g.transpose()).norm() / g.norm();
    assert!(asym < 0.03, "{asym}");
    let gs = (&g + g.transpose()) * 0.5;
    let ev = gs.symmetric_eigenvalues();
    assert!(ev.min() > 0.0 && ev.min() > -1e-6 * ev.max(), "{}", ev.min());
}

#[test]
fn scalar_multiplets_level4() {
    let b = &fixture().basis;
    let k1 = 1.0 / tau_mag(&params()).sqrt();
    let m = b.kappa_multiplets();
    assert_eq!((m[0].len, m[1].len, m[2].len), (3, 5, 7));
    for (l, mult) in m.iter().take(3).enumerate() {
        let want = (l + 1) as f64 * k1;
        for k in &b.kappa[mult.start..mult.start + mult.len] {
            assert!((k / want - 1.0).abs() < 0.05, "l={} {k} {want}", l + 1);
        }
    }
    let z = b.kappa_zero.unwrap();
    assert!(z.eigenvalue.abs() < 1e-8 * k1 && z.spread < 1e-6);
    assert!(b.clamped.is_empty());
}

#[test]
fn crossover_times_bounded_by_tau_mag() {
    let b = &fixture().basis;
    let t = tau_mag(&params());
    let worst = b.kappa.iter().map(|k| 1.0 / (k * k)).fold(0.0, f64::max);
    // mesh tolerance: the level-4 dipole NtD error is well under 1%
    assert!(worst <= t * 1.01, "{worst} {t}");
}

#[test]
fn psi_nearly_mass_orthonormal() {
    let b = &fixture().basis;
    let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&b.mesh.vertex_areas));
    let gram = b.psi.transpose() * m * &b.psi;
    let off = (gram.clone() - nalgebra::DMatrix::identity(40, 40)).amax();
    assert!(off < 0.02, "{off}");
}

#[test]
fn kappa_linear_in_contrast() {
    // Fixed mu_c sqrt(D_c): kappa scales as 1/mu_b.
    let mesh = make_icosphere(1.0, 2).unwrap();
    let ntd = build_ntd_operator(&mesh).unwrap();
    let a = TargetParams::new(50.0, 1.0, 1e6, 1.0).unwrap();
    let b = TargetParams::new(50.0, 4.0, 1e6, 1.0).unwrap();
    let ka = solve_scalar_modes_with(&mesh, &a, &ntd, 20).unwrap();
    let kb = solve_scalar_modes_with(&mesh, &b, &ntd, 20).unwrap();
    for (x, y) in ka.kappa.iter().zip(&kb.kappa) {
        assert!((x / y - 4.0).abs() < 1e-9);
    }
}

#[test]
fn composition_reproduces_harmonics() {
    let Fixture { mesh, ntd, .. } = fixture();
    let p = params();
    let lap = build_surface_laplacian(mesh, &p).unwrap();
    let op = mode_operator(ntd, &lap, &p).unwrap();
    let k1 = 1.0 / tau_mag(&p).sqrt();
    for l in 1..=3 {
        for f in harmonics(l) {
            let (res, _) = eigen_check(mesh, &op, &sample(mesh, f, 1.0), l as f64 * k1);
            assert!(res < 0.05, "l={l}: {res}");
        }
    }
}

#[test]
fn transverse_level4() {
    let b = &fixture().basis;
    let p = params();
    let unit = 1.0 / (p.mu_c * p.diffusion().sqrt());
    let m = b.lambda_multiplets();
    assert_eq!((m[0].len, m[1].len, m[2].len), (3, 5, 7));
    for k in &b.lambda[..3] {
        assert!((k / (2.0 * unit) - 1.0).abs() < 0.02);
    }
    let z = b.lambda_zero.unwrap();
    assert!(z.eigenvalue.abs() < 1e-8 * b.lambda[0] && z.spread < 1e-8);
}

#[test]
fn raw_nonsymmetric_spectrum() {
    let mesh = make_icosphere(1.0, 2).unwrap();
    let p = params();
    let ntd = build_ntd_operator(&mesh).unwrap();
    let lap = build_surface_laplacian(&mesh, &p).unwrap();
    let sym = solve_scalar_modes_with(&mesh, &p, &ntd, 15).unwrap();

    // The operator the solver diagonalizes: real spectrum, zero mode present.
    let op = mode_operator(&symmetrize_ntd(&ntd, &mesh).unwrap(), &lap, &p).unwrap();
    let raw = raw_mode_spectrum(&op).unwrap();
    raw.check_real(1e-6).unwrap();
    let top = raw.values.last().unwrap().0;
    assert!(raw.values[0].0.abs() < 1e-8 * top, "zero mode {:?}", raw.values[0]);
    for (k, s) in sym.kappa.iter().enumerate() {
        let r = raw.values[k + 1].0;
        assert!((r / s - 1.0).abs() < 1e-8, "{k}: {r} {s}");
    }

    // Without symmetrization the collocation asymmetry splits multiplets
    // into complex pairs at the discretization level.
    let op = mode_operator(&ntd, &lap, &p).unwrap();
    let raw = raw_mode_spectrum(&op).unwrap();
    assert!(raw.max_rel_imag < 0.02, "{}", raw.max_rel_imag);
    for (k, s) in sym.kappa.iter().enumerate() {
        assert!((raw.values[k + 1].0 / s - 1.0).abs() < 0.01);
    }
}

#[test]
fn alpha_mode_reproduction() {
    let b = &fixture().basis;
    for n in [0usize, 4, 10] {
        let field = b.alpha_mode_field(n).unwrap();
        let pr = project_surface_current(b, &field).unwrap();
        let a = &pr.amplitudes;
        assert!((a.k1[n] - 1.0).abs() < 0.05, "mode {n}: {}", a.k1[n]);
        for (j, k) in a.k1.iter().enumerate().filter(|(j, _)| *j != n) {
            assert!(k.abs() < 0.05, "mode {n} leaks {k} into {j}");
        }
        assert!(a.k2.iter().all(|k| k.abs() < 0.05));
        assert!(pr.residual < 0.05, "{}", pr.residual);
    }
}

#[test]
fn uniform_field_screening_current_is_dipolar() {
    let b = &fixture().basis;
    let sc = initial_screening_sphere(&params(), 1.0).unwrap();
    let field: Vec<Point> = b
        .mesh
        .vertices
        .iter()
        .map(|x| {
            let k = sc.k_vector([x.x, x.y, x.z]);
            Point::new(k[0], k[1], k[2])
        })
        .collect();
    let pr = project_surface_current(b, &field).unwrap();
    let k1 = &pr.amplitudes.k1;
    let peak = k1.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let l1 = b.kappa_multiplets()[0];
    for (j, k) in k1.iter().enumerate() {
        if j >= l1.start + l1.len {
            assert!(k.abs() < 0.05 * peak, "mode {j}: {k} vs peak {peak}");
        }
    }
    assert!(pr.amplitudes.k2.iter().all(|k| k.abs() < 0.05 * peak));
    assert!(pr.residual < 0.05, "{}", pr.residual);
}

#[test]
fn refinement_reduces_kappa_error() {
    let p = params();
    let k1 = 1.0 / tau_mag(&p).sqrt();
    let errors = |b: &SurfaceModeBasis| -> Vec<f64> {
        (1..=3usize)
            .map(|l| {
                let range = (l * l - 1)..((l + 1) * (l + 1) - 1);
                b.kappa[range]
                    .iter()
                    .map(|k| (k / (l as f64 * k1) - 1.0).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    };
    let mut prev: Option<Vec<f64>> = None;
    for level in 2..LEVEL {
        let mesh = make_icosphere(1.0, level).unwrap();
        let ntd = build_ntd_operator(&mesh).unwrap();
        let e = errors(&solve_scalar_modes_with(&mesh, &p, &ntd, 15).unwrap());
        if let Some(pe) = &prev {
            for l in 0..3 {
                assert!(e[l] < pe[l], "level {level}, l={}: {} !< {}", l + 1, e[l], pe[l]);
            }
        }
        prev = Some(e);
    }
    let e = errors(&fixture().basis);
    for (now, before) in e.iter().zip(prev.as_ref().unwrap()).take(3) {
        assert!(now < before);
    }
}
