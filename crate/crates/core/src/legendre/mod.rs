//! Sampled surfaces in `S^n`, their unit normal bundles and Legendre lifts.
//!
//! A surface is a closed connected triangulation with unit-norm vertices,
//! optionally carrying a closed-form parametrization. The catalog provides
//! round spheres, product tori (the Clifford torus among them) and a bumpy
//! torus that serves as the non-taut control.

mod bundle;
mod catalog;
mod jet;
mod mesh_io;
mod surface;

pub use bundle::{
    analytic_shape_operator, arccot, curvature_spheres, discrete_shape_operator, legendre_lift, normal_bundle,
    oriented_normals, shape_operator, LegendreLift, NormalFrame, ShapeData,
};
pub use catalog::{CatalogSurface, BUMP_CONCENTRATION, MIN_RESOLUTION};
pub use jet::SurfaceJet;
pub use mesh_io::{load_surface, read_mesh, save_surface, write_mesh, LOAD_NORM_TOLERANCE};
pub use surface::{Analytic, AnalyticHandle, EmbeddedSurface, SurfaceSource};

/// Shorthand for `spec.build(resolution)`.
pub fn catalog_surface(spec: &CatalogSurface, resolution: usize) -> crate::Result<EmbeddedSurface> {
    spec.build(resolution)
}
