//! Surface-mode eigensolver on triangulated closed surfaces.
//!
//! [`mesh`] holds the geometry, [`operators`] the surface Laplacian and the
//! exterior Neumann-to-Dirichlet map, and [`modes`] the eigensolves and
//! current projection.

pub mod mesh;
pub mod modes;
pub mod operators;

pub use mesh::{make_icosphere, parse_off, SurfaceMesh};
pub use modes::{
    cluster_multiplets, project_surface_current, solve_scalar_modes, solve_scalar_modes_with, solve_surface_modes,
    solve_transverse_modes, Multiplet, SurfaceModeBasis, SurfaceProjection,
};
pub use operators::{build_ntd_operator, build_surface_laplacian, mode_operator, symmetrize_ntd, SurfaceOperator};
