//! The Lie quadric model of oriented spheres in `S^n`.
//!
//! Homogeneous coordinates live in `R^{n+3}` with the form
//! `<x, y> = -x_1 y_1 + x_2 y_2 + … + x_{n+2} y_{n+2} - x_{n+3} y_{n+3}`.
//! The oriented sphere with center `p` and signed radius `ρ` is the point
//! `[(cos ρ, p, sin ρ)]`; a contact element `(p, ξ)` is the line through the
//! point sphere `[(1, p, 0)]` and the great sphere `[(0, ξ, 1)]`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::singular_values;
use crate::rng::{gaussian_vector, unit_vector};
use crate::tol;

/// Homogeneous coordinates in `R^{n+3}_2`.
#[derive(Clone, PartialEq)]
pub struct LieVector {
    coords: DVector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalType {
    Spacelike,
    Timelike,
    Lightlike,
}

impl LieVector {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 4 {
            return Err(invalid("LieVector", format!("need n + 3 >= 4 coordinates, got {}", coords.len())));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// `e_i` with 1-based index as in the usual notation.
    pub fn basis(ambient_n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(ambient_n + 3);
        v[i - 1] = 1.0;
        Self { coords: v }
    }

    /// `(a, middle, b)` with the middle block in `R^{n+1}`.
    pub fn from_blocks(first: f64, middle: &DVector<f64>, last: f64) -> Self {
        let m = middle.len();
        let mut v = DVector::zeros(m + 2);
        v[0] = first;
        v.rows_mut(1, m).copy_from(middle);
        v[m + 1] = last;
        Self { coords: v }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }

    pub fn ambient_n(&self) -> usize {
        self.coords.len() - 3
    }

    pub fn first(&self) -> f64 {
        self.coords[0]
    }

    pub fn last(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    /// Coordinates `x_2 … x_{n+2}`, a vector of `R^{n+1}`.
    pub fn middle(&self) -> DVector<f64> {
        self.coords.rows(1, self.coords.len() - 2).into_owned()
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coords: &self.coords * s,
        }
    }

    /// Causal type of the direction, decided on the unit-normalized vector.
    pub fn causal_type(&self) -> Result<CausalType> {
        let n = self.norm();
        if n < tol::NONZERO {
            return Err(Error::ZeroVector);
        }
        let q = lie_inner_raw(&self.coords, &self.coords) / (n * n);
        Ok(if q > tol::QUADRIC {
            CausalType::Spacelike
        } else if q < -tol::QUADRIC {
            CausalType::Timelike
        } else {
            CausalType::Lightlike
        })
    }
}

impl fmt::Debug for LieVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter()).finish()
    }
}

pub(crate) fn lie_inner_raw(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let m = x.len();
    let mut s = -x[0] * y[0] - x[m - 1] * y[m - 1];
    for i in 1..m - 1 {
        s += x[i] * y[i];
    }
    s
}

/// The signature-`(n+1, 2)` bilinear form.
pub fn lie_inner(x: &LieVector, y: &LieVector) -> Result<f64> {
    if x.coords.len() != y.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: x.coords.len(),
            found: y.coords.len(),
        });
    }
    Ok(lie_inner_raw(&x.coords, &y.coords))
}

/// `<k,k>` of the unit-normalized representative.
fn normalized_self_inner(v: &DVector<f64>) -> f64 {
    let n2 = v.norm_squared();
    lie_inner_raw(v, v) / n2
}

/// A point of `P^{n+2}`, stored through one representative.
///
/// Equality is projective: two points are equal when their representatives
/// are parallel within [`tol::PROJ`].
#[derive(Clone, Debug)]
pub struct ProjectivePoint {
    rep: LieVector,
    normalized: bool,
}

impl ProjectivePoint {
    pub fn new(rep: LieVector) -> Result<Self> {
        if rep.coords.amax() < tol::NONZERO {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            rep,
            normalized: false,
        })
    }

    pub fn rep(&self) -> &LieVector {
        &self.rep
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn ambient_n(&self) -> usize {
        self.rep.ambient_n()
    }

    /// Unit Euclidean norm, first coordinate above [`tol::NONZERO`] positive.
    pub fn normalized(&self) -> Self {
        let mut v = &self.rep.coords / self.rep.norm();
        if let Some(first) = v.iter().copied().find(|c| c.abs() > tol::NONZERO) {
            if first < 0.0 {
                v.neg_mut();
            }
        }
        Self {
            rep: LieVector { coords: v },
            normalized: true,
        }
    }

    /// `|<k,k>|` on the normalized representative.
    pub fn quadric_residual(&self) -> f64 {
        normalized_self_inner(&self.rep.coords).abs()
    }

    pub fn on_quadric(&self) -> bool {
        self.quadric_residual() < tol::QUADRIC
    }

    /// `1 - |cos θ|` between the representatives.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let a = &self.rep.coords;
        let b = &other.rep.coords;
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        1.0 - (a.dot(b) / (a.norm() * b.norm())).abs()
    }
}

impl PartialEq for ProjectivePoint {
    fn eq(&self, other: &Self) -> bool {
        self.projective_distance(other) < tol::PROJ
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereKind {
    PointSphere,
    GreatSphere,
    Ordinary,
}

/// Oriented hypersphere (or point sphere) of `S^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedSphere {
    center: DVector<f64>,
    signed_radius: f64,
}

impl OrientedSphere {
    pub fn new(center: DVector<f64>, signed_radius: f64) -> Result<Self> {
        if center.len() < 2 {
            return Err(invalid("OrientedSphere", "center must lie in R^{n+1}, n >= 1"));
        }
        if (center.norm() - 1.0).abs() > tol::UNIT {
            return Err(invalid("OrientedSphere", format!("center has norm {}", center.norm())));
        }
        if !(signed_radius > -PI && signed_radius < PI) {
            return Err(invalid("OrientedSphere", format!("signed radius {signed_radius} outside (-π, π)")));
        }
        Ok(Self {
            center,
            signed_radius,
        })
    }

    pub fn point_sphere(center: DVector<f64>) -> Result<Self> {
        Self::new(center, 0.0)
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn signed_radius(&self) -> f64 {
        self.signed_radius
    }

    pub fn ambient_n(&self) -> usize {
        self.center.len() - 1
    }

    pub fn kind(&self) -> SphereKind {
        if self.signed_radius.abs() < tol::UNIT {
            SphereKind::PointSphere
        } else if (self.signed_radius.abs() - FRAC_PI_2).abs() < tol::UNIT {
            SphereKind::GreatSphere
        } else {
            SphereKind::Ordinary
        }
    }

    /// The other description of the same oriented sphere: `(-p, ρ ∓ π)`.
    pub fn antipodal_description(&self) -> Option<Self> {
        if self.signed_radius == 0.0 {
            return None;
        }
        let rho = if self.signed_radius > 0.0 {
            self.signed_radius - PI
        } else {
            self.signed_radius + PI
        };
        Some(Self {
            center: -&self.center,
            signed_radius: rho,
        })
    }
}

/// `[(cos ρ, p, sin ρ)]`.
pub fn sphere_to_quadric(s: &OrientedSphere) -> ProjectivePoint {
    let rep = LieVector::from_blocks(s.signed_radius.cos(), &s.center, s.signed_radius.sin());
    ProjectivePoint {
        rep,
        normalized: false,
    }
}

/// Inverse of [`sphere_to_quadric`] on the canonical range `ρ ∈ (-π/2, π/2]`.
pub fn quadric_to_sphere(q: &ProjectivePoint) -> Result<OrientedSphere> {
    let res = q.quadric_residual();
    if res >= tol::QUADRIC {
        return Err(Error::OffQuadric { residual: res });
    }
    let v = &q.rep.coords / q.rep.norm();
    let m = v.len();
    let (a, b) = (v[0], v[m - 1]);
    let ends = (a * a + b * b).sqrt();
    if ends * ends <= tol::NONZERO {
        return Err(invalid("ProjectivePoint", "degenerate middle block"));
    }
    let mut w = v / ends;
    if w[0] < -tol::QUADRIC || (w[0].abs() < tol::QUADRIC && w[m - 1] < 0.0) {
        w.neg_mut();
    }
    let rho = w[m - 1].atan2(w[0]);
    let mut center: DVector<f64> = w.rows(1, m - 2).into_owned();
    center /= center.norm();
    OrientedSphere::new(center, rho)
}

/// Oriented contact of two Lie spheres: `<k_a, k_b> = 0`.
pub fn oriented_contact(a: &OrientedSphere, b: &OrientedSphere) -> Result<bool> {
    let ka = sphere_to_quadric(a).normalized();
    let kb = sphere_to_quadric(b).normalized();
    Ok(lie_inner(ka.rep(), kb.rep())?.abs() < tol::CONTACT)
}

/// Point `p ∈ S^n` with unit tangent direction `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactElement {
    point: DVector<f64>,
    direction: DVector<f64>,
}

impl ContactElement {
    pub fn new(point: DVector<f64>, direction: DVector<f64>) -> Result<Self> {
        if point.len() != direction.len() {
            return Err(Error::DimensionMismatch {
                expected: point.len(),
                found: direction.len(),
            });
        }
        if point.len() < 3 {
            return Err(invalid("ContactElement", "need n >= 2"));
        }
        let (np, nx, d) = (point.norm(), direction.norm(), point.dot(&direction));
        if (np - 1.0).abs() > tol::UNIT || (nx - 1.0).abs() > tol::UNIT || d.abs() > tol::UNIT {
            return Err(invalid(
                "ContactElement",
                format!("|p| = {np}, |ξ| = {nx}, p·ξ = {d}"),
            ));
        }
        Ok(Self { point, direction })
    }

    /// Projects `direction` onto `T_p S^n` and normalizes both vectors.
    pub fn orthonormalized(point: DVector<f64>, direction: DVector<f64>) -> Result<Self> {
        let np = point.norm();
        if np < tol::NONZERO {
            return Err(Error::ZeroVector);
        }
        let p = point / np;
        let d = p.dot(&direction);
        let mut xi = direction - &p * d;
        let nx = xi.norm();
        if nx < tol::NONZERO {
            return Err(Error::ZeroVector);
        }
        xi /= nx;
        Self::new(p, xi)
    }

    pub fn point(&self) -> &DVector<f64> {
        &self.point
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }

    pub fn ambient_n(&self) -> usize {
        self.point.len() - 1
    }

    /// `(p, -ξ)`: same pencil of unoriented spheres, reversed orientation.
    pub fn reversed(&self) -> Self {
        Self {
            point: self.point.clone(),
            direction: -&self.direction,
        }
    }
}

/// A line on the Lie quadric, kept in its (point sphere, great sphere) basis.
#[derive(Clone, Debug)]
pub struct QuadricLine {
    point_sphere: ProjectivePoint,
    great_sphere: ProjectivePoint,
}

impl QuadricLine {
    /// Line spanned by two arbitrary points; re-based to the canonical pair.
    pub fn from_span(a: &LieVector, b: &LieVector) -> Result<Self> {
        let c = line_contact_from_span(a, b)?;
        Ok(contact_to_line(&c))
    }

    pub fn point_sphere(&self) -> &ProjectivePoint {
        &self.point_sphere
    }

    pub fn great_sphere(&self) -> &ProjectivePoint {
        &self.great_sphere
    }

    pub fn ambient_n(&self) -> usize {
        self.point_sphere.ambient_n()
    }

    /// `cos t · k_1 + sin t · k_2`.
    pub fn pencil_point(&self, t: f64) -> LieVector {
        let k1 = &self.point_sphere.rep.coords;
        let k2 = &self.great_sphere.rep.coords;
        LieVector {
            coords: k1 * t.cos() + k2 * t.sin(),
        }
    }

    /// Largest violation of the line invariants.
    pub fn invariant_residual(&self) -> f64 {
        let k1 = self.point_sphere.normalized();
        let k2 = self.great_sphere.normalized();
        let r1 = k1.quadric_residual();
        let r2 = k2.quadric_residual();
        let r12 = lie_inner_raw(&k1.rep.coords, &k2.rep.coords).abs();
        let l1 = k1.rep.last().abs();
        let f2 = k2.rep.first().abs();
        r1.max(r2).max(r12).max(l1).max(f2)
    }

    /// Stacked, normalized spanning vectors as rows.
    fn rows(&self) -> [DVector<f64>; 2] {
        [
            self.point_sphere.normalized().rep.coords,
            self.great_sphere.normalized().rep.coords,
        ]
    }
}

/// `(p, ξ) ↦ [(1, p, 0), (0, ξ, 1)]`.
pub fn contact_to_line(c: &ContactElement) -> QuadricLine {
    QuadricLine {
        point_sphere: ProjectivePoint {
            rep: LieVector::from_blocks(1.0, &c.point, 0.0),
            normalized: false,
        },
        great_sphere: ProjectivePoint {
            rep: LieVector::from_blocks(0.0, &c.direction, 1.0),
            normalized: false,
        },
    }
}

/// Extracts the unique point sphere and great sphere of a line.
pub fn line_to_contact(line: &QuadricLine) -> Result<ContactElement> {
    line_contact_from_span(line.point_sphere.rep(), line.great_sphere.rep())
}

fn line_contact_from_span(a: &LieVector, b: &LieVector) -> Result<ContactElement> {
    if a.coords.len() != b.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: a.coords.len(),
            found: b.coords.len(),
        });
    }
    let na = a.norm();
    let nb = b.norm();
    if na < tol::NONZERO || nb < tol::NONZERO {
        return Err(Error::ZeroVector);
    }
    let a = &a.coords / na;
    let b = &b.coords / nb;
    let stacked = DMatrix::from_columns(&[a.clone(), b.clone()]);
    let s = singular_values(&stacked);
    if s[1] / s[0] < tol::RANK {
        return Err(Error::DegenerateLine);
    }
    for v in [&a, &b] {
        let r = lie_inner_raw(v, v).abs();
        if r >= tol::QUADRIC {
            return Err(Error::OffQuadric { residual: r });
        }
    }
    let cross = lie_inner_raw(&a, &b).abs();
    if cross >= tol::QUADRIC {
        return Err(invalid("QuadricLine", format!("spanning points not in oriented contact ({cross:e})")));
    }
    let m = a.len();
    // combination killing the last coordinate: the point sphere
    let k1 = &a * b[m - 1] - &b * a[m - 1];
    // combination killing the first coordinate: the great sphere
    let k2 = &a * b[0] - &b * a[0];
    if k1.norm() < 1e-6 || k2.norm() < 1e-6 {
        return Err(Error::DegenerateLine);
    }
    if k1[0].abs() < 1e-3 * k1.norm() || k2[m - 1].abs() < 1e-3 * k2.norm() {
        return Err(Error::DegenerateLine);
    }
    let k1 = &k1 / k1[0];
    let k2 = &k2 / k2[m - 1];
    let p: DVector<f64> = k1.rows(1, m - 2).into_owned();
    let xi: DVector<f64> = k2.rows(1, m - 2).into_owned();
    if (p.norm() - 1.0).abs() > 1e-6 || (xi.norm() - 1.0).abs() > 1e-6 || p.dot(&xi).abs() > 1e-6 {
        return Err(invalid("QuadricLine", "extracted contact element is not unit/orthogonal"));
    }
    ContactElement::orthonormalized(p, xi)
}

/// Member of the parabolic pencil of `c` with signed radius `t`.
pub fn pencil_sphere(c: &ContactElement, t: f64) -> Result<OrientedSphere> {
    let center = &c.point * t.cos() + &c.direction * t.sin();
    let n = center.norm();
    OrientedSphere::new(center / n, t)
}

/// Unoriented radius in `(0, π)` of the pencil member with signed radius `t`.
///
/// Signed parameters `t` and `t + π` describe the same projective point, so
/// the unoriented pencil is parametrized by `t mod π`; `t = 0` is the point
/// sphere and has no unoriented radius.
pub fn unoriented_pencil_radius(t: f64) -> Option<f64> {
    let r = t.rem_euclid(PI);
    (r > 0.0).then_some(r)
}

/// Whether two lines on the quadric share a point (some common Lie sphere).
pub fn lines_intersect(l1: &QuadricLine, l2: &QuadricLine) -> Result<bool> {
    Ok(line_incidence_ratio(l1, l2)? < tol::RANK)
}

/// `σ_4 / σ_1` of the four stacked spanning vectors; zero when the lines meet.
pub fn line_incidence_ratio(l1: &QuadricLine, l2: &QuadricLine) -> Result<f64> {
    if l1.ambient_n() != l2.ambient_n() {
        return Err(Error::DimensionMismatch {
            expected: l1.ambient_n(),
            found: l2.ambient_n(),
        });
    }
    let [a, b] = l1.rows();
    let [c, d] = l2.rows();
    let m = DMatrix::from_rows(&[a.transpose(), b.transpose(), c.transpose(), d.transpose()]);
    let s = singular_values(&m);
    Ok(s[3] / s[0])
}

/// Uniform contact element of `T_1 S^n`.
pub fn random_contact_element<R: Rng + ?Sized>(rng: &mut R, ambient_n: usize) -> Result<ContactElement> {
    if ambient_n < 2 {
        return Err(invalid("random_contact_element", "ambient_n must be >= 2"));
    }
    let dim = ambient_n + 1;
    let p = unit_vector(rng, dim);
    loop {
        let g = gaussian_vector(rng, dim);
        let t = &g - &p * p.dot(&g);
        let nt = t.norm();
        if nt > 1e-6 {
            return ContactElement::new(p.clone(), t / nt);
        }
    }
}
