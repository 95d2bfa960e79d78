//! Scalar (magnetic) and transverse surface modes, multiplet clustering and
//! projection of surface currents onto the mode basis.

use nalgebra::{DMatrix, DVector};

use super::mesh::{Point, SurfaceMesh};
use super::operators::{build_ntd_operator, cotan_stiffness, OperatorKind, SurfaceOperator};
use crate::early_time::ModeAmplitudes;
use crate::error::{Error, Result};
use crate::TargetParams;

/// Eigenvalues with magnitude below this fraction of the largest are
/// treated as zero.
pub const NOISE_FLOOR: f64 = 1e-8;

/// Relative width used to group split degenerate eigenvalues.
pub const MULTIPLET_TOL: f64 = 0.02;

/// Largest normal component of an input current, as a fraction of its peak
/// magnitude, accepted by [`project_surface_current`]. Polyhedral vertex
/// normals differ from the smooth surface normal by O(h^2), so fields
/// tangential to the underlying surface show a small normal part.
pub const TANGENTIAL_TOL: f64 = 1e-2;

/// The constant mode of a solve, excluded from the reported spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroMode {
    pub eigenvalue: f64,
    /// `(max - min) / max |v|` of the eigenvector; 0 for an exact constant.
    pub spread: f64,
}

#[derive(Debug, Clone)]
pub struct SurfaceModeBasis {
    pub mesh: SurfaceMesh,
    pub params: TargetParams,
    /// Ascending kappa_n, s^-1/2, constant mode excluded.
    pub kappa: Vec<f64>,
    /// Columns psi_n over vertices, unit norm under the lumped areas.
    pub psi: DMatrix<f64>,
    /// `K^(1)_n = psi_dual_scale[n] * psi_n . curl`, with `curl` the weak
    /// surface curl of a current.
    pub psi_dual_scale: Vec<f64>,
    /// Indices into `kappa` of slightly negative eigenvalues clamped to 0.
    pub clamped: Vec<usize>,
    pub kappa_zero: Option<ZeroMode>,
    /// Relative antisymmetric part of the area-weighted NtD matrix that
    /// was discarded before the solve.
    pub ntd_asymmetry: Option<f64>,
    /// Ascending lambda_n of the transverse problem, constant excluded.
    pub lambda: Vec<f64>,
    /// Columns phi_n, orthonormal under the lumped areas.
    pub phi: DMatrix<f64>,
    pub lambda_zero: Option<ZeroMode>,
}

impl SurfaceModeBasis {
    fn empty(mesh: &SurfaceMesh, p: &TargetParams) -> Self {
        let n = mesh.n_vertices();
        SurfaceModeBasis {
            mesh: mesh.clone(),
            params: *p,
            kappa: Vec::new(),
            psi: DMatrix::zeros(n, 0),
            psi_dual_scale: Vec::new(),
            clamped: Vec::new(),
            kappa_zero: None,
            ntd_asymmetry: None,
            lambda: Vec::new(),
            phi: DMatrix::zeros(n, 0),
            lambda_zero: None,
        }
    }

    /// Multiplets of the scalar spectrum.
    pub fn kappa_multiplets(&self) -> Vec<Multiplet> {
        cluster_multiplets(&self.kappa, MULTIPLET_TOL)
    }

    pub fn lambda_multiplets(&self) -> Vec<Multiplet> {
        cluster_multiplets(&self.lambda, MULTIPLET_TOL)
    }

    /// `alpha_n = -(mu_c sqrt(D_c) / kappa_n) n x grad psi_n` on each face.
    pub fn alpha_on_faces(&self, n: usize) -> Result<Vec<Point>> {
        let k = *self.kappa.get(n).ok_or(Error::UnknownMode(n))?;
        if k <= 0.0 {
            return Err(Error::domain(
                "alpha_on_faces",
                "kappa",
                k,
                "clamped mode has no alpha field",
            ));
        }
        let scale = -self.params.mu_c * self.params.diffusion().sqrt() / k;
        let col: Vec<f64> = self.psi.column(n).iter().copied().collect();
        Ok((0..self.mesh.n_triangles())
            .map(|f| self.mesh.face_normals[f].cross(&self.mesh.face_gradient(f, &col)) * scale)
            .collect())
    }

    /// `beta_n = grad phi_n` on each face.
    pub fn beta_on_faces(&self, n: usize) -> Result<Vec<Point>> {
        if n >= self.lambda.len() {
            return Err(Error::UnknownMode(n));
        }
        let col: Vec<f64> = self.phi.column(n).iter().copied().collect();
        Ok((0..self.mesh.n_triangles())
            .map(|f| self.mesh.face_gradient(f, &col))
            .collect())
    }

    /// Per-vertex tangential field of `alpha_n`, averaged from faces.
    pub fn alpha_mode_field(&self, n: usize) -> Result<Vec<Point>> {
        Ok(faces_to_vertices(&self.mesh, &self.alpha_on_faces(n)?))
    }

    pub fn beta_mode_field(&self, n: usize) -> Result<Vec<Point>> {
        Ok(faces_to_vertices(&self.mesh, &self.beta_on_faces(n)?))
    }
}

fn faces_to_vertices(mesh: &SurfaceMesh, face: &[Point]) -> Vec<Point> {
    let mut out = vec![Point::zeros(); mesh.n_vertices()];
    for (f, t) in mesh.triangles.iter().enumerate() {
        for &v in t {
            out[v] += face[f] * mesh.face_areas[f];
        }
    }
    for (v, k) in out.iter_mut().enumerate() {
        let n = mesh.vertex_normals[v];
        *k /= 3.0 * mesh.vertex_areas[v];
        *k -= n * n.dot(k);
    }
    out
}

/// A run of eigenvalues within a relative tolerance of its first member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multiplet {
    pub start: usize,
    pub len: usize,
    pub mean: f64,
}

/// Group ascending eigenvalues into multiplets: a value joins the current
/// multiplet when it lies within `rel_tol` of the multiplet's first value.
pub fn cluster_multiplets(values: &[f64], rel_tol: f64) -> Vec<Multiplet> {
    let mut out: Vec<Multiplet> = Vec::new();
    let mut first = f64::NAN;
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(m) if (v - first).abs() <= rel_tol * first.abs() => {
                m.mean += (v - m.mean) / (m.len + 1) as f64;
                m.len += 1;
            }
            _ => {
                first = v;
                out.push(Multiplet {
                    start: i,
                    len: 1,
                    mean: v,
                });
            }
        }
    }
    out
}

fn check_count(n_modes: usize, n: usize) -> Result<()> {
    if n_modes == 0 || n_modes >= n {
        return Err(Error::param(
            "n_modes",
            format!("must be in 1..{} for a mesh with {n} vertices, got {n_modes}", n - 1),
        ));
    }
    Ok(())
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let peak = lo.abs().max(hi.abs());
    if peak > 0.0 {
        (hi - lo) / peak
    } else {
        f64::INFINITY
    }
}

/// Sort eigenpairs ascending, split off the constant mode and clamp noise.
fn split_spectrum(values: &[f64], what: &str) -> Result<(Vec<usize>, usize, Vec<usize>)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = NOISE_FLOOR * top;
    let zero = order[0];
    if values[zero].abs() > floor {
        return Err(Error::Eigen(format!(
            "{what}: lowest eigenvalue {:e} is not zero to noise floor {floor:e}",
            values[zero]
        )));
    }
    let rest: Vec<usize> = order[1..].to_vec();
    let mut clamped = Vec::new();
    for (k, &i) in rest.iter().enumerate() {
        if values[i] < 0.0 {
            if -values[i] > floor {
                return Err(Error::Eigen(format!("{what}: negative eigenvalue {:e}", values[i])));
            }
            clamped.push(k);
        }
    }
    Ok((rest, zero, clamped))
}

/// Scalar modes `kappa_n psi_n = -NtD mu_b^-1 Laplacian psi_n`.
///
/// With `W` the cotangent stiffness, `M` the lumped areas and `N` the NtD
/// matrix, the operator is `c N M^-1 W`, `c = mu_c sqrt(D_c) / mu_b`. The
/// area-weighted NtD matrix `G = M N` is symmetrized and factored as
/// `G = L L^T`; then `c L^T M^-1 W M^-1 L` is symmetric with the same
/// spectrum, and `psi = M^-1 L y` maps its eigenvectors back. This keeps
/// the spectrum real; the discarded antisymmetric part of `G` is reported.
pub fn solve_scalar_modes_with(
    mesh: &SurfaceMesh,
    p: &TargetParams,
    ntd: &SurfaceOperator,
    n_modes: usize,
) -> Result<SurfaceModeBasis> {
    p.validate()?;
    let n = mesh.n_vertices();
    check_count(n_modes, n)?;
    if ntd.kind != OperatorKind::NeumannToDirichlet || ntd.dim() != n {
        return Err(Error::param(
            "ntd",
            "expected the NtD operator of this mesh".to_string(),
        ));
    }
    let m = &mesh.vertex_areas;
    let mut g = ntd.matrix.clone();
    for (i, mut row) in g.row_iter_mut().enumerate() {
        row *= m[i];
    }
    let asym = (&g - g.transpose()).norm() / g.norm();
    let gs = (&g + g.transpose()) * 0.5;
    drop(g);
    let diag_max = gs.diagonal().amax();
    let chol = gs.cholesky().ok_or(Error::Singular {
        what: "area-weighted NtD matrix (not positive definite)",
        condition: f64::INFINITY,
    })?;
    let l = chol.unpack();
    let ldiag = l.diagonal();
    let condition = (diag_max / ldiag.min().powi(2)).abs();

    let c = p.mu_c * p.diffusion().sqrt() / p.mu_b;
    let mut w = cotan_stiffness(mesh);
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] *= c / (m[i] * m[j]);
        }
    }
    let wl = &w * &l;
    drop(w);
    let mut b = l.tr_mul(&wl);
    drop(wl);
    let bt = b.transpose();
    b += bt;
    b *= 0.5;
    if !b.iter().all(|x| x.is_finite()) {
        return Err(Error::Singular {
            what: "symmetrized mode operator",
            condition,
        });
    }
    let eig = b.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (order, zero, clamped) = split_spectrum(&values, "scalar modes")?;

    let back = |idx: usize| -> (DVector<f64>, f64) {
        let mut v = &l * eig.eigenvectors.column(idx);
        for i in 0..n {
            v[i] /= m[i];
        }
        let s = v.iter().zip(m).map(|(x, a)| a * x * x).sum::<f64>().sqrt();
        (v / s, s)
    };
    let (z, _) = back(zero);
    let kappa_zero = ZeroMode {
        eigenvalue: values[zero],
        spread: spread(z.as_slice()),
    };

    let take = &order[..n_modes];
    let mut psi = DMatrix::zeros(n, n_modes);
    let mut dual = Vec::with_capacity(n_modes);
    let mut kappa = Vec::with_capacity(n_modes);
    for (k, &idx) in take.iter().enumerate() {
        let (v, s) = back(idx);
        psi.set_column(k, &v);
        dual.push(s * s / p.mu_b);
        kappa.push(values[idx].max(0.0));
    }
    let mut basis = SurfaceModeBasis::empty(mesh, p);
    basis.kappa = kappa;
    basis.psi = psi;
    basis.psi_dual_scale = dual;
    basis.clamped = clamped.into_iter().filter(|&k| k < n_modes).collect();
    basis.kappa_zero = Some(kappa_zero);
    basis.ntd_asymmetry = Some(asym);
    Ok(basis)
}

/// Build the NtD map of `mesh` and solve for the lowest `n_modes` nonzero
/// scalar modes.
pub fn solve_scalar_modes(mesh: &SurfaceMesh, p: &TargetParams, n_modes: usize) -> Result<SurfaceModeBasis> {
    let ntd = build_ntd_operator(mesh)?;
    solve_scalar_modes_with(mesh, p, &ntd, n_modes)
}

/// Transverse modes `lambda_n phi_n = -n . curl[(mu_c sqrt(D_c))^-1 n x grad phi_n]`,
/// i.e. `W phi = mu_c sqrt(D_c) lambda M phi`.
pub fn transverse_modes(
    mesh: &SurfaceMesh,
    p: &TargetParams,
    n_modes: usize,
) -> Result<(Vec<f64>, DMatrix<f64>, ZeroMode)> {
    p.validate()?;
    let n = mesh.n_vertices();
    check_count(n_modes, n)?;
    let scale = 1.0 / (p.mu_c * p.diffusion().sqrt());
    let rs: Vec<f64> = mesh.vertex_areas.iter().map(|a| 1.0 / a.sqrt()).collect();
    let mut w = cotan_stiffness(mesh);
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] *= rs[i] * rs[j] * scale;
        }
    }
    let eig = w.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (order, zero, _) = split_spectrum(&values, "transverse modes")?;
    let back = |idx: usize| -> DVector<f64> {
        let mut v = eig.eigenvectors.column(idx).into_owned();
        for i in 0..n {
            v[i] *= rs[i];
        }
        v
    };
    let zmode = ZeroMode {
        eigenvalue: values[zero],
        spread: spread(back(zero).as_slice()),
    };
    let mut phi = DMatrix::zeros(n, n_modes);
    let mut lambda = Vec::with_capacity(n_modes);
    for (k, &idx) in order[..n_modes].iter().enumerate() {
        phi.set_column(k, &back(idx));
        lambda.push(values[idx].max(0.0));
    }
    Ok((lambda, phi, zmode))
}

pub fn solve_transverse_modes(mesh: &SurfaceMesh, p: &TargetParams, n_modes: usize) -> Result<SurfaceModeBasis> {
    let (lambda, phi, zero) = transverse_modes(mesh, p, n_modes)?;
    let mut basis = SurfaceModeBasis::empty(mesh, p);
    basis.lambda = lambda;
    basis.phi = phi;
    basis.lambda_zero = Some(zero);
    Ok(basis)
}

/// Both families on one mesh.
pub fn solve_surface_modes(
    mesh: &SurfaceMesh,
    p: &TargetParams,
    ntd: &SurfaceOperator,
    n_scalar: usize,
    n_transverse: usize,
) -> Result<SurfaceModeBasis> {
    let mut basis = solve_scalar_modes_with(mesh, p, ntd, n_scalar)?;
    let (lambda, phi, zero) = transverse_modes(mesh, p, n_transverse)?;
    basis.lambda = lambda;
    basis.phi = phi;
    basis.lambda_zero = Some(zero);
    Ok(basis)
}

/// Full complex spectrum of `-NtD mu_b^-1 Laplacian` without symmetrization.
#[derive(Debug, Clone)]
pub struct RawSpectrum {
    /// `(re, im)` sorted by real part.
    pub values: Vec<(f64, f64)>,
    /// Largest `|im| / |lambda|` over eigenvalues above the noise floor.
    pub max_rel_imag: f64,
}

impl RawSpectrum {
    /// Error if any eigenvalue has a relative imaginary part above `tol`.
    pub fn check_real(&self, tol: f64) -> Result<()> {
        if self.max_rel_imag > tol {
            return Err(Error::Eigen(format!(
                "eigenvalue imaginary part {:e} of magnitude exceeds {tol:e}",
                self.max_rel_imag
            )));
        }
        Ok(())
    }
}

/// Dense nonsymmetric eigensolve of a mode operator. Cubic in the vertex
/// count with a large constant; meant for cross-checks on small meshes.
pub fn raw_mode_spectrum(op: &SurfaceOperator) -> Result<RawSpectrum> {
    if op.kind != OperatorKind::ModeOperator {
        return Err(Error::param("operator", "expected a mode operator".to_string()));
    }
    let ev = nalgebra::linalg::Schur::try_new(op.matrix.clone(), 1e-13, 1_000_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?
        .complex_eigenvalues();
    let mut values: Vec<(f64, f64)> = ev.iter().map(|z| (z.re, z.im)).collect();
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.0.hypot(v.1)));
    let max_rel_imag = values
        .iter()
        .filter(|v| v.0.hypot(v.1) > NOISE_FLOOR * top)
        .map(|v| v.1.abs() / v.0.hypot(v.1))
        .fold(0.0, f64::max);
    Ok(RawSpectrum { values, max_rel_imag })
}

/// Mode amplitudes of a surface current and the relative area-weighted L2
/// error of the truncated reconstruction.
#[derive(Debug, Clone)]
pub struct SurfaceProjection {
    pub amplitudes: ModeAmplitudes,
    pub residual: f64,
}

/// Expand a per-vertex tangential current as
/// `K = sum_n K1_n alpha_n + K2_n beta_n`.
///
/// `K1` comes from the weak surface curl `-int K . (n x grad h_i)` against
/// the dual of the psi basis, `K2` from the weak divergence
/// `-int K . grad h_i` against the phi basis.
pub fn project_surface_current(basis: &SurfaceModeBasis, k_field: &[Point]) -> Result<SurfaceProjection> {
    let mesh = &basis.mesh;
    let n = mesh.n_vertices();
    if k_field.len() != n {
        return Err(Error::LengthMismatch {
            what: "surface current",
            got: k_field.len(),
            expected: n,
        });
    }
    let peak = k_field.iter().fold(0.0f64, |m, k| m.max(k.norm()));
    if !peak.is_finite() {
        return Err(Error::param("K", "non-finite surface current".to_string()));
    }
    if peak > 0.0 {
        for (v, k) in k_field.iter().enumerate() {
            let fraction = k.dot(&mesh.vertex_normals[v]).abs() / peak;
            if fraction > TANGENTIAL_TOL {
                return Err(Error::NonTangential { vertex: v, fraction });
            }
        }
    }
    let faces: Vec<Point> = mesh
        .triangles
        .iter()
        .enumerate()
        .map(|(f, t)| {
            let k = (k_field[t[0]] + k_field[t[1]] + k_field[t[2]]) / 3.0;
            let nf = mesh.face_normals[f];
            k - nf * nf.dot(&k)
        })
        .collect();
    let mut curl = DVector::zeros(n);
    let mut div = DVector::zeros(n);
    for (f, t) in mesh.triangles.iter().enumerate() {
        let a = mesh.face_areas[f];
        let nf = mesh.face_normals[f];
        let g = mesh.hat_gradients(f);
        for k in 0..3 {
            curl[t[k]] -= a * faces[f].dot(&nf.cross(&g[k]));
            div[t[k]] -= a * faces[f].dot(&g[k]);
        }
    }
    let k1: Vec<f64> = (0..basis.kappa.len())
        .map(|j| {
            if basis.kappa[j] > 0.0 {
                basis.psi_dual_scale[j] * basis.psi.column(j).dot(&curl)
            } else {
                0.0
            }
        })
        .collect();
    let stiff = basis.params.mu_c * basis.params.diffusion().sqrt();
    let k2: Vec<f64> = (0..basis.lambda.len())
        .map(|j| {
            let lam = stiff * basis.lambda[j];
            if lam > 0.0 {
                -basis.phi.column(j).dot(&div) / lam
            } else {
                0.0
            }
        })
        .collect();

    let mut rec = vec![Point::zeros(); mesh.n_triangles()];
    for (j, &a) in k1.iter().enumerate() {
        if a != 0.0 {
            for (r, f) in rec.iter_mut().zip(basis.alpha_on_faces(j)?) {
                *r += f * a;
            }
        }
    }
    for (j, &a) in k2.iter().enumerate() {
        if a != 0.0 {
            for (r, f) in rec.iter_mut().zip(basis.beta_on_faces(j)?) {
                *r += f * a;
            }
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for f in 0..mesh.n_triangles() {
        num += mesh.face_areas[f] * (faces[f] - rec[f]).norm_squared();
        den += mesh.face_areas[f] * faces[f].norm_squared();
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { 0.0 };

    let len = k1.len().max(k2.len());
    let pad = |v: &[f64]| -> Vec<f64> { (0..len).map(|i| v.get(i).copied().unwrap_or(0.0)).collect() };
    let amplitudes = ModeAmplitudes::new((1..=len).collect(), pad(&k1), pad(&k2), pad(&basis.kappa))?;
    Ok(SurfaceProjection { amplitudes, residual })
}

#[cfg(test)]
mod tests {
    use super::super::mesh::make_icosphere;
    use super::super::operators::{build_surface_laplacian, mode_operator};
    use super::*;

    fn params(mu: f64) -> TargetParams {
        // sigma chosen so that mu0 mu sigma = 1 and D_c = 1/mu
        TargetParams::with_contrast(mu, 1.0 / (crate::MU0 * mu), 1.0).unwrap()
    }

    #[test]
    fn clustering() {
        let v = [1.0, 1.01, 1.015, 2.0, 2.03, 2.05, 5.0];
        let m = cluster_multiplets(&v, 0.02);
        let lens: Vec<usize> = m.iter().map(|m| m.len).collect();
        assert_eq!(lens, [3, 2, 1, 1]);
        assert!((m[0].mean - 3.025 / 3.0).abs() < 1e-15);
        assert!(cluster_multiplets(&[], 0.02).is_empty());
    }

    #[test]
    fn level3_sphere_spectrum() {
        let mesh = make_icosphere(1.0, 3).unwrap();
        let p = params(100.0);
        let b = solve_scalar_modes(&mesh, &p, 15).unwrap();
        let tau_mag = crate::timescales::derive_timescales(&p).unwrap().tau_mag;
        let k1 = 1.0 / tau_mag.sqrt();
        let mult = b.kappa_multiplets();
        assert_eq!((mult[0].len, mult[1].len), (3, 5));
        assert!((mult[0].mean / k1 - 1.0).abs() < 0.05);
        assert!((mult[1].mean / (2.0 * k1) - 1.0).abs() < 0.05);
        let z = b.kappa_zero.unwrap();
        assert!(z.eigenvalue.abs() < 1e-8 * b.kappa[14] && z.spread < 1e-6, "{z:?}");
        // W-orthogonality is exact, mass orthogonality approximate.
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(&mesh.vertex_areas));
        let gram = b.psi.transpose() * &m * &b.psi;
        for i in 0..15 {
            assert!((gram[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..i {
                assert!(gram[(i, j)].abs() < 0.05, "{i} {j} {}", gram[(i, j)]);
            }
        }
    }

    #[test]
    fn raw_spectrum_matches_symmetrized() {
        let mesh = make_icosphere(1.0, 1).unwrap();
        let p = params(10.0);
        let ntd = build_ntd_operator(&mesh).unwrap();
        let lap = build_surface_laplacian(&mesh, &p).unwrap();
        let op = mode_operator(&ntd, &lap, &p).unwrap();
        let raw = raw_mode_spectrum(&op).unwrap();
        let sym = solve_scalar_modes_with(&mesh, &p, &ntd, 8).unwrap();
        assert!(raw.values[0].0.abs() < 1e-8 * raw.values.last().unwrap().0);
        for (k, s) in sym.kappa.iter().enumerate() {
            let r = raw.values[k + 1].0;
            assert!((r - s).abs() < 0.03 * s, "{k}: raw {r} sym {s}");
        }
        assert!(raw.max_rel_imag < 0.05, "{}", raw.max_rel_imag);
    }

    #[test]
    fn rejects_bad_counts_and_inputs() {
        let mesh = make_icosphere(1.0, 0).unwrap();
        let p = params(10.0);
        assert!(solve_scalar_modes(&mesh, &p, 0).is_err());
        assert!(solve_scalar_modes(&mesh, &p, 12).is_err());
        let b = solve_surface_modes(&mesh, &p, &build_ntd_operator(&mesh).unwrap(), 5, 5).unwrap();
        assert!(project_surface_current(&b, &[Point::zeros(); 3]).is_err());
        let mut k = vec![Point::zeros(); 12];
        k[4] = mesh.vertex_normals[4];
        match project_surface_current(&b, &k) {
            Err(Error::NonTangential { vertex: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_current_projects_to_zero() {
        let mesh = make_icosphere(1.0, 1).unwrap();
        let p = params(10.0);
        let b = solve_surface_modes(&mesh, &p, &build_ntd_operator(&mesh).unwrap(), 10, 10).unwrap();
        let pr = project_surface_current(&b, &vec![Point::zeros(); mesh.n_vertices()]).unwrap();
        assert!(pr.amplitudes.k1.iter().chain(&pr.amplitudes.k2).all(|&a| a == 0.0));
        assert_eq!(pr.residual, 0.0);
    }

    #[test]
    fn transverse_sphere_values() {
        let mesh = make_icosphere(1.0, 2).unwrap();
        let p = params(4.0);
        let b = solve_transverse_modes(&mesh, &p, 8).unwrap();
        let unit = 1.0 / (p.mu_c * p.diffusion().sqrt());
        let mult = b.lambda_multiplets();
        assert_eq!((mult[0].len, mult[1].len), (3, 5));
        assert!((mult[0].mean / (2.0 * unit) - 1.0).abs() < 0.02);
        assert!(b.lambda_zero.unwrap().spread < 1e-8);
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(&mesh.vertex_areas));
        let gram = b.phi.transpose() * &m * &b.phi;
        assert!((gram - DMatrix::identity(8, 8)).amax() < 1e-10);
    }
}
