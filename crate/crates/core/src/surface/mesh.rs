//! Closed triangulated surfaces: icosphere generation, OFF input and
//! per-vertex/per-face geometry.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Point = Vector3<f64>;

/// A closed, consistently wound, outward-oriented triangle mesh.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Unit outward normal of each face.
    pub face_normals: Vec<Point>,
    /// Face areas, m^2.
    pub face_areas: Vec<f64>,
    /// Barycentric lumped area of each vertex (one third of every incident
    /// face), m^2.
    pub vertex_areas: Vec<f64>,
    /// Area-weighted unit vertex normals.
    pub vertex_normals: Vec<Point>,
}

impl SurfaceMesh {
    /// Build and validate a mesh. Faces must be wound counter-clockwise when
    /// seen from outside.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        if let Some((f, _)) = triangles.iter().enumerate().find(|(_, t)| t.iter().any(|&v| v >= n)) {
            return Err(Error::Mesh(format!("face {f} references a vertex out of range")));
        }
        if let Some(v) = vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::Mesh(format!("vertex {v} has non-finite coordinates")));
        }
        let mut face_normals = Vec::with_capacity(triangles.len());
        let mut face_areas = Vec::with_capacity(triangles.len());
        let mut vertex_areas = vec![0.0; n];
        let mut vertex_normals = vec![Point::zeros(); n];
        for (f, t) in triangles.iter().enumerate() {
            let [a, b, c] = t.map(|i| vertices[i]);
            let cross = (b - a).cross(&(c - a));
            let area = 0.5 * cross.norm();
            let scale = (b - a).norm_squared().max((c - a).norm_squared());
            if !(area > 1e-14 * scale) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Mesh(format!("face {f} is degenerate (area {area:e})")));
            }
            face_normals.push(cross / (2.0 * area));
            face_areas.push(area);
            for &v in t {
                vertex_areas[v] += area / 3.0;
                vertex_normals[v] += cross;
            }
        }
        for (v, nv) in vertex_normals.iter_mut().enumerate() {
            let len = nv.norm();
            if !(len > 0.0) {
                return Err(Error::Mesh(format!("vertex {v} belongs to no face")));
            }
            *nv /= len;
        }
        let mesh = SurfaceMesh {
            vertices,
            triangles,
            face_normals,
            face_areas,
            vertex_areas,
            vertex_normals,
        };
        mesh.check_topology()?;
        if mesh.signed_volume() <= 0.0 {
            return Err(Error::Mesh("faces are wound inward (negative enclosed volume)".into()));
        }
        Ok(mesh)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn total_area(&self) -> f64 {
        self.face_areas.iter().sum()
    }

    /// Enclosed volume by the divergence theorem; positive for outward
    /// winding.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }

    pub fn n_edges(&self) -> usize {
        3 * self.triangles.len() / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_triangles() as i64
    }

    /// Every directed edge appears once and its reverse once, and the
    /// surface has sphere topology.
    fn check_topology(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if directed.insert(e, f).is_some() {
                    return Err(Error::Mesh(format!(
                        "edge {}-{} traversed twice in the same direction (face {f}): inconsistent winding or non-manifold",
                        e.0, e.1
                    )));
                }
            }
        }
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) {
                return Err(Error::Mesh(format!("edge {a}-{b} is a boundary edge: mesh not closed")));
            }
        }
        let chi = self.euler_characteristic();
        if chi != 2 {
            return Err(Error::Mesh(format!("Euler characteristic {chi}, expected 2")));
        }
        Ok(())
    }

    /// Gradients of the three hat functions of face `f` (constant on the face).
    pub fn hat_gradients(&self, f: usize) -> [Point; 3] {
        let t = self.triangles[f];
        let n = self.face_normals[f];
        let scale = 1.0 / (2.0 * self.face_areas[f]);
        let p = t.map(|i| self.vertices[i]);
        [
            n.cross(&(p[2] - p[1])) * scale,
            n.cross(&(p[0] - p[2])) * scale,
            n.cross(&(p[1] - p[0])) * scale,
        ]
    }

    /// Tangential gradient of a piecewise-linear vertex field on face `f`.
    pub fn face_gradient(&self, f: usize, values: &[f64]) -> Point {
        let g = self.hat_gradients(f);
        let t = self.triangles[f];
        g[0] * values[t[0]] + g[1] * values[t[1]] + g[2] * values[t[2]]
    }

    /// Edge-length scale: mean edge length.
    pub fn mean_edge_length(&self) -> f64 {
        let sum: f64 = self
            .triangles
            .iter()
            .map(|t| {
                let p = t.map(|i| self.vertices[i]);
                (p[1] - p[0]).norm() + (p[2] - p[1]).norm() + (p[0] - p[2]).norm()
            })
            .sum();
        sum / (3 * self.triangles.len()) as f64
    }
}

/// Subdivided icosahedron projected onto a sphere; `10 * 4^level + 2`
/// vertices.
pub fn make_icosphere(radius: f64, level: u32) -> Result<SurfaceMesh> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::param("radius", format!("must be finite and > 0, got {radius}")));
    }
    if level > 7 {
        return Err(Error::param(
            "level",
            format!("{level} exceeds the supported maximum 7"),
        ));
    }
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Point> = [
        (-1.0, g, 0.0),
        (1.0, g, 0.0),
        (-1.0, -g, 0.0),
        (1.0, -g, 0.0),
        (0.0, -1.0, g),
        (0.0, 1.0, g),
        (0.0, -1.0, -g),
        (0.0, 1.0, -g),
        (g, 0.0, -1.0),
        (g, 0.0, 1.0),
        (-g, 0.0, -1.0),
        (-g, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                verts.push((verts[a] + verts[b]).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * faces.len());
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for v in &mut verts {
        *v *= radius;
    }
    SurfaceMesh::new(verts, faces)
}

/// Parse an OFF mesh. Polygonal faces are fan-triangulated; `#` starts a
/// comment. A mesh wound inward is flipped.
pub fn parse_off(text: &str) -> Result<SurfaceMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let bad = |line: usize, reason: String| Error::MeshParse { line, reason };

    let (hline, header) = lines.next().ok_or_else(|| bad(0, "empty input".into()))?;
    let mut rest: Vec<&str> = header.split_whitespace().collect();
    if rest.first() != Some(&"OFF") {
        return Err(bad(hline, format!("expected header OFF, got {:?}", header)));
    }
    rest.remove(0);
    let (cline, counts) = if rest.is_empty() {
        let (i, l) = lines.next().ok_or_else(|| bad(hline, "missing counts line".into()))?;
        (i, l.split_whitespace().collect::<Vec<_>>())
    } else {
        (hline, rest)
    };
    let count = |k: usize| -> Result<usize> {
        counts
            .get(k)
            .ok_or_else(|| bad(cline, "counts line needs vertex and face counts".into()))?
            .parse::<usize>()
            .map_err(|e| bad(cline, format!("bad count: {e}")))
    };
    let (nv, nf) = (count(0)?, count(1)?);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (i, l) = lines
            .next()
            .ok_or_else(|| bad(cline, format!("expected {nv} vertices")))?;
        let c: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(i, format!("bad coordinate: {e}")))?;
        if c.len() != 3 {
            return Err(bad(i, "vertex needs 3 coordinates".into()));
        }
        vertices.push(Point::new(c[0], c[1], c[2]));
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (i, l) = lines.next().ok_or_else(|| bad(cline, format!("expected {nf} faces")))?;
        let v: Vec<usize> = l
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(i, format!("bad index: {e}")))?;
        let k = *v.first().ok_or_else(|| bad(i, "empty face".into()))?;
        if k < 3 || v.len() < k + 1 {
            return Err(bad(i, format!("face declares {k} vertices, has {}", v.len() - 1)));
        }
        if let Some(&idx) = v[1..=k].iter().find(|&&x| x >= nv) {
            return Err(bad(i, format!("vertex index {idx} out of range")));
        }
        for j in 1..k - 1 {
            triangles.push([v[1], v[1 + j], v[2 + j]]);
        }
    }
    let vol: f64 = triangles
        .iter()
        .map(|t| vertices[t[0]].dot(&vertices[t[1]].cross(&vertices[t[2]])))
        .sum();
    if vol < 0.0 {
        for t in &mut triangles {
            t.swap(1, 2);
        }
    }
    SurfaceMesh::new(vertices, triangles)
}

/// Write a mesh in OFF format.
pub fn to_off(mesh: &SurfaceMesh) -> String {
    let mut s = format!("OFF\n{} {} {}\n", mesh.n_vertices(), mesh.n_triangles(), mesh.n_edges());
    for v in &mesh.vertices {
        s.push_str(&format!("{:e} {:e} {:e}\n", v.x, v.y, v.z));
    }
    for t in &mesh.triangles {
        s.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
    }
    s
}
