use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::legendre::EmbeddedSurface;
use crate::linalg::angle_between;
use crate::quadric::ContactElement;
use crate::tol;

/// `r_(p,ξ)(x) ∈ (0, π)`: the radius of the sphere of the pencil of `(p, ξ)`
/// passing through `x`.
///
/// From `cos r = x · (cos r p + sin r ξ)`: `cos r (1 - x·p) = sin r (x·ξ)`,
/// so `r = atan2(1 - x·p, x·ξ)`, with `1 - x·p = |x - p|²/2` for accuracy.
pub fn pencil_radius(c: &ContactElement, x: &DVector<f64>) -> Result<f64> {
    let p = c.point();
    if x.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: x.len(),
        });
    }
    if (x.norm() - 1.0).abs() > tol::UNIT {
        return Err(crate::error::invalid("pencil_radius", format!("|x| = {} is not 1", x.norm())));
    }
    let distance = angle_between(x, p);
    if distance < tol::BASE_POINT {
        return Err(Error::AtBasePoint { distance });
    }
    let gap = 0.5 * (x - p).norm_squared();
    Ok(gap.atan2(x.dot(c.direction())))
}

/// Center `cos r p + sin r ξ` of the pencil sphere of radius `r`.
pub fn pencil_center(c: &ContactElement, r: f64) -> DVector<f64> {
    c.point() * r.cos() + c.direction() * r.sin()
}

/// `d_p(x) ∈ [0, π]`.
pub fn spherical_distance(p: &DVector<f64>, x: &DVector<f64>) -> f64 {
    angle_between(p, x)
}

/// `ℓ_p(x) = p · x ∈ [-1, 1]`.
pub fn height(p: &DVector<f64>, x: &DVector<f64>) -> f64 {
    p.dot(x).clamp(-1.0, 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind {
    PencilRadius(ContactElement),
    SphericalDistance(DVector<f64>),
    Height(DVector<f64>),
}

impl FieldKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::PencilRadius(_) => "pencil_radius",
            Self::SphericalDistance(_) => "spherical_distance",
            Self::Height(_) => "height",
        }
    }

    /// The point the field is built from.
    pub fn base_point(&self) -> &DVector<f64> {
        match self {
            Self::PencilRadius(c) => c.point(),
            Self::SphericalDistance(p) | Self::Height(p) => p,
        }
    }
}

/// A function on the vertices of a surface.
#[derive(Clone, Debug)]
pub struct ScalarField<'a> {
    pub surface: &'a EmbeddedSurface,
    pub values: Vec<f64>,
    pub kind: FieldKind,
}

/// Smallest angle from `p` to a vertex of `s`.
pub fn distance_to_vertices(s: &EmbeddedSurface, p: &DVector<f64>) -> f64 {
    s.vertices().iter().map(|x| angle_between(x, p)).fold(f64::INFINITY, f64::min)
}

/// Evaluates `kind` at every vertex.
///
/// Pencil radius fields require the base point to stay at least
/// `base_tolerance` away from every vertex.
pub fn build_field(s: &EmbeddedSurface, kind: FieldKind, base_tolerance: f64) -> Result<ScalarField<'_>> {
    let p = kind.base_point();
    if p.len() != s.ambient_n() + 1 {
        return Err(Error::DimensionMismatch {
            expected: s.ambient_n() + 1,
            found: p.len(),
        });
    }
    let values = match &kind {
        FieldKind::PencilRadius(c) => {
            let distance = distance_to_vertices(s, c.point());
            if distance < base_tolerance.max(tol::BASE_POINT) {
                return Err(Error::AtBasePoint { distance });
            }
            s.vertices().iter().map(|x| pencil_radius(c, x)).collect::<Result<_>>()?
        }
        FieldKind::SphericalDistance(p) => s.vertices().iter().map(|x| spherical_distance(p, x)).collect(),
        FieldKind::Height(p) => s.vertices().iter().map(|x| height(p, x)).collect(),
    };
    Ok(ScalarField {
        surface: s,
        values,
        kind,
    })
}

/// Default base-point exclusion radius for a surface.
pub fn default_base_tolerance(s: &EmbeddedSurface) -> f64 {
    tol::BASE_EDGE_FACTOR * s.max_edge_length()
}
