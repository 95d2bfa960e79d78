//! Dense vertex-space operators: the generalized surface Laplacian and the
//! exterior Neumann-to-Dirichlet map.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::mesh::{Point, SurfaceMesh};
use crate::error::{Error, Result};
use crate::TargetParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `n . curl [mu_c sqrt(D_c) n x grad phi]` on point values.
    SurfaceLaplacian,
    /// Exterior Neumann data `-n . grad Phi` to boundary potential `Phi`.
    NeumannToDirichlet,
    /// `-NtD mu_b^-1 Laplacian`, whose eigenvalues are the kappa_n.
    ModeOperator,
}

/// A dense operator on vertex values.
#[derive(Debug, Clone)]
pub struct SurfaceOperator {
    pub kind: OperatorKind,
    pub matrix: DMatrix<f64>,
    /// Units of the input vector.
    pub domain_units: &'static str,
    /// Units of the output vector.
    pub range_units: &'static str,
    /// Whether `matrix` itself is symmetric. Both the Laplacian and the NtD
    /// map are self-adjoint only under the lumped-area inner product.
    pub symmetric: bool,
}

impl SurfaceOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch {
                what: "vertex vector",
                got: x.len(),
                expected: self.dim(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(x);
        Ok((&self.matrix * v).as_slice().to_vec())
    }
}

/// Cotangent stiffness matrix `W_ij = -(cot a_ij + cot b_ij)/2`, with the
/// diagonal set so that rows sum to zero. Positive semidefinite.
pub fn cotan_stiffness(mesh: &SurfaceMesh) -> DMatrix<f64> {
    let n = mesh.n_vertices();
    let mut w = DMatrix::zeros(n, n);
    for t in &mesh.triangles {
        let p = t.map(|i| mesh.vertices[i]);
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let (u, v) = (p[i] - p[k], p[j] - p[k]);
            let cot = u.dot(&v) / u.cross(&v).norm();
            w[(t[i], t[j])] -= 0.5 * cot;
            w[(t[j], t[i])] -= 0.5 * cot;
        }
    }
    for i in 0..n {
        let off: f64 = w.row(i).iter().sum::<f64>() - w[(i, i)];
        w[(i, i)] = -off;
    }
    w
}

/// `-mu_c sqrt(D_c) M^-1 W`, acting on point values. On a sphere of radius
/// `L` it approximates `-mu_c sqrt(D_c) l(l+1) / L^2` on degree-`l`
/// harmonics.
pub fn build_surface_laplacian(mesh: &SurfaceMesh, p: &TargetParams) -> Result<SurfaceOperator> {
    p.validate()?;
    let scale = p.mu_c * p.diffusion().sqrt();
    let mut m = cotan_stiffness(mesh);
    for (i, mut row) in m.row_iter_mut().enumerate() {
        row *= -scale / mesh.vertex_areas[i];
    }
    Ok(SurfaceOperator {
        kind: OperatorKind::SurfaceLaplacian,
        matrix: m,
        domain_units: "1",
        range_units: "m^-1 s^-1/2",
        symmetric: false,
    })
}

/// Barycentric quadrature rule on a triangle; weights sum to one.
struct Rule {
    points: Vec<([f64; 3], f64)>,
}

impl Rule {
    fn centroid() -> Self {
        Rule {
            points: vec![([1.0 / 3.0; 3], 1.0)],
        }
    }

    /// Degree-5, 7-point rule.
    fn seven() -> Self {
        let (a1, b1, w1) = (0.059_715_871_789_770, 0.470_142_064_105_115, 0.132_394_152_788_506);
        let (a2, b2, w2) = (0.797_426_985_353_087, 0.101_286_507_323_456, 0.125_939_180_544_827);
        Rule {
            points: vec![
                ([1.0 / 3.0; 3], 0.225),
                ([a1, b1, b1], w1),
                ([b1, a1, b1], w1),
                ([b1, b1, a1], w1),
                ([a2, b2, b2], w2),
                ([b2, a2, b2], w2),
                ([b2, b2, a2], w2),
            ],
        }
    }

    /// Apply the rule on each of the four midpoint children.
    fn subdivided(&self) -> Self {
        let corners = [
            [[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5]],
            [[0.5, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.5, 0.5]],
            [[0.5, 0.0, 0.5], [0.0, 0.5, 0.5], [0.0, 0.0, 1.0]],
            [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]],
        ];
        let mut points = Vec::with_capacity(4 * self.points.len());
        for c in &corners {
            for (b, w) in &self.points {
                let mut q = [0.0; 3];
                for (k, qk) in q.iter_mut().enumerate() {
                    *qk = b[0] * c[0][k] + b[1] * c[1][k] + b[2] * c[2][k];
                }
                points.push((q, 0.25 * w));
            }
        }
        Rule { points }
    }
}

struct Rules {
    far: Rule,
    mid: Rule,
    near: Rule,
    nearest: Rule,
    /// Gauss-Legendre rules on [0, 1] for the Duffy map: radial (the
    /// integrand is linear) and angular.
    radial: Vec<(f64, f64)>,
    angular: Vec<(f64, f64)>,
}

fn rules() -> &'static Rules {
    static R: OnceLock<Rules> = OnceLock::new();
    R.get_or_init(|| {
        let seven = Rule::seven();
        let near = seven.subdivided();
        let nearest = near.subdivided();
        Rules {
            far: Rule::centroid(),
            mid: seven,
            near,
            nearest,
            radial: gauss_legendre_unit(2),
            angular: gauss_legendre_unit(20),
        }
    })
}

/// Gauss-Legendre rule mapped to [0, 1].
fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (1.0 - x), 0.5 * w)
        })
        .collect()
}

/// Single-layer and double-layer integrals of the three hat functions of a
/// face against the Laplace kernel at `x`.
fn panel_integrals(x: &Point, p: &[Point; 3], normal: &Point, area: f64, rule: &Rule) -> ([f64; 3], [f64; 3]) {
    let mut s = [0.0; 3];
    let mut k = [0.0; 3];
    for (b, w) in &rule.points {
        let y = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
        let d = x - y;
        let r = d.norm();
        let g = w * area / (4.0 * PI * r);
        let dg = g * d.dot(normal) / (r * r);
        for j in 0..3 {
            s[j] += g * b[j];
            k[j] += dg * b[j];
        }
    }
    (s, k)
}

/// Single-layer integrals of the hat functions over a face with a corner
/// at the collocation point `p[0]`, via the Duffy map that cancels the 1/r
/// singularity. The double-layer kernel vanishes identically on such a face.
fn duffy_single_layer(p: &[Point; 3], area: f64, radial: &[(f64, f64)], angular: &[(f64, f64)]) -> [f64; 3] {
    let mut s = [0.0; 3];
    let (e1, e2) = (p[1] - p[0], p[2] - p[1]);
    for &(v, wv) in angular {
        let inv_r = 1.0 / (e1 + e2 * v).norm();
        for &(u, wu) in radial {
            let w = wu * wv * 2.0 * area * inv_r / (4.0 * PI);
            s[0] += w * (1.0 - u);
            s[1] += w * u * (1.0 - v);
            s[2] += w * u * v;
        }
    }
    s
}

/// Single-layer matrix `S` and double-layer matrix `K` by vertex
/// collocation with piecewise-linear densities.
///
/// `(S q)_i = int G(x_i, y) q(y) dy`, `(K u)_i = p.v. int d_{n_y} G(x_i, y) u(y) dy`,
/// `G = 1 / (4 pi |x - y|)`.
pub fn layer_potentials(mesh: &SurfaceMesh) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = mesh.n_vertices();
    let r = rules();
    let mut s = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    let panels: Vec<([Point; 3], Point, f64)> = mesh
        .triangles
        .iter()
        .map(|t| {
            let p = t.map(|i| mesh.vertices[i]);
            let c = (p[0] + p[1] + p[2]) / 3.0;
            let rho = p.iter().map(|q| (q - c).norm()).fold(0.0, f64::max);
            (p, c, rho)
        })
        .collect();
    for i in 0..n {
        let x = mesh.vertices[i];
        for (f, t) in mesh.triangles.iter().enumerate() {
            let (p, c, rho) = &panels[f];
            if let Some(corner) = t.iter().position(|&v| v == i) {
                let rot = [corner, (corner + 1) % 3, (corner + 2) % 3];
                let q = rot.map(|j| p[j]);
                let vals = duffy_single_layer(&q, mesh.face_areas[f], &r.radial, &r.angular);
                for (slot, &j) in rot.iter().enumerate() {
                    s[(i, t[j])] += vals[slot];
                }
                continue;
            }
            let ratio = (x - c).norm() / rho;
            let rule = if ratio > 12.0 {
                &r.far
            } else if ratio > 5.0 {
                &r.mid
            } else if ratio > 2.5 {
                &r.near
            } else {
                &r.nearest
            };
            let (sv, kv) = panel_integrals(&x, p, &mesh.face_normals[f], mesh.face_areas[f], rule);
            for j in 0..3 {
                s[(i, t[j])] += sv[j];
                k[(i, t[j])] += kv[j];
            }
        }
    }
    (s, k)
}

/// Exterior Neumann-to-Dirichlet map by the direct boundary-integral
/// formulation. For an exterior harmonic `Phi` decaying at infinity with
/// Neumann datum `f = -n . grad Phi`, Green's identity at a boundary point
/// gives `c Phi - K Phi = S f`, where `c = 1 + (K 1)` is the exterior solid
/// angle fraction. Using the computed row sums of `K` for `c` makes the
/// system exact on constants.
pub fn build_ntd_operator(mesh: &SurfaceMesh) -> Result<SurfaceOperator> {
    let (s, k) = layer_potentials(mesh);
    let n = mesh.n_vertices();
    let mut a = -k;
    for i in 0..n {
        let row: f64 = a.row(i).iter().sum();
        a[(i, i)] += 1.0 - row;
    }
    let lu = a.lu();
    let diag = lu.u().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
        (lo.min(d.abs()), hi.max(d.abs()))
    });
    let condition = hi / lo;
    if !(condition < 1e12) {
        return Err(Error::Singular {
            what: "boundary-integral collocation system",
            condition,
        });
    }
    let m = lu.solve(&s).ok_or(Error::Singular {
        what: "boundary-integral collocation system",
        condition,
    })?;
    Ok(SurfaceOperator {
        kind: OperatorKind::NeumannToDirichlet,
        matrix: m,
        domain_units: "A/m",
        range_units: "A",
        symmetric: false,
    })
}

/// The NtD map with its discretization asymmetry removed: `M^-1 G` with
/// `G` the symmetric part of the area-weighted matrix `M N`. This is the
/// form the scalar mode solve uses.
pub fn symmetrize_ntd(ntd: &SurfaceOperator, mesh: &SurfaceMesh) -> Result<SurfaceOperator> {
    if ntd.kind != OperatorKind::NeumannToDirichlet || ntd.dim() != mesh.n_vertices() {
        return Err(Error::param(
            "ntd",
            "expected the NtD operator of this mesh".to_string(),
        ));
    }
    let m = &mesh.vertex_areas;
    let n = ntd.dim();
    let a = &ntd.matrix;
    let matrix = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[i] * a[(i, j)] + m[j] * a[(j, i)]) / m[i]);
    Ok(SurfaceOperator { matrix, ..ntd.clone() })
}

/// `-NtD mu_b^-1 Laplacian`.
pub fn mode_operator(ntd: &SurfaceOperator, laplacian: &SurfaceOperator, p: &TargetParams) -> Result<SurfaceOperator> {
    if ntd.kind != OperatorKind::NeumannToDirichlet || laplacian.kind != OperatorKind::SurfaceLaplacian {
        return Err(Error::param(
            "operator",
            "expected an NtD map and a surface Laplacian".to_string(),
        ));
    }
    if ntd.dim() != laplacian.dim() {
        return Err(Error::LengthMismatch {
            what: "operator dimension",
            got: laplacian.dim(),
            expected: ntd.dim(),
        });
    }
    Ok(SurfaceOperator {
        kind: OperatorKind::ModeOperator,
        matrix: (&ntd.matrix * &laplacian.matrix) * (-1.0 / p.mu_b),
        domain_units: "1",
        range_units: "s^-1/2",
        symmetric: false,
    })
}
