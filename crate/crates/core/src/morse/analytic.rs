use nalgebra::{DMatrix, DVector};

use super::field::{pencil_center, pencil_radius};
use crate::error::{Error, Result};
use crate::legendre::{EmbeddedSurface, NormalFrame, ShapeData};
use crate::linalg::{generalized_cross, sorted_symmetric_eigen};
use crate::quadric::ContactElement;
use crate::tol;

/// The pencil sphere through a vertex and how far it is from tangency.
#[derive(Clone, Debug)]
pub struct Tangency {
    pub radius: f64,
    pub center: DVector<f64>,
    /// Unit normal of `V` pointing from `x` toward the center.
    pub normal: DVector<f64>,
    /// Norm of the tangential part of the center.
    pub residual: f64,
}

pub fn tangency(s: &EmbeddedSurface, v: usize, c: &ContactElement) -> Result<Tangency> {
    let x = s.vertex(v);
    let radius = pencil_radius(c, x)?;
    let center = pencil_center(c, radius);
    let tangent = s.tangent_basis(v)?;
    let mut n = &center - x * x.dot(&center);
    let mut residual2 = 0.0;
    for t in &tangent {
        let a = t.dot(&center);
        residual2 += a * a;
        n.axpy(-a, t, 1.0);
    }
    let nn = n.norm();
    if nn < tol::NONZERO {
        return Err(Error::Precondition(format!("pencil sphere center at vertex {v} has no normal part")));
    }
    Ok(Tangency {
        radius,
        center,
        normal: n / nn,
        residual: residual2.sqrt(),
    })
}

/// `|proj_{T_x V} q|` for the pencil sphere through `x`; zero iff the sphere
/// is tangent to `V` at `x`.
pub fn criticality_residual(s: &EmbeddedSurface, v: usize, c: &ContactElement) -> Result<f64> {
    Ok(tangency(s, v, c)?.residual)
}

#[derive(Clone, Debug)]
pub struct HessianData {
    /// In the tangent basis of the shape data.
    pub matrix: DMatrix<f64>,
    pub coefficient: f64,
    pub radius: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub index: usize,
    pub degenerate: bool,
}

/// Hessian of `r_(p,ξ)` at a critical point: `(sin r A_N - cos r I) / C`
/// with `C = -sin r - x·(-sin r p + cos r ξ) < 0`.
///
/// `tangency_tolerance` bounds `|q - (cos r x + sin r N)|`, the distance from
/// criticality tolerated at a mesh vertex.
pub fn hessian_analytic(sd: &ShapeData, c: &ContactElement, tangency_tolerance: f64) -> Result<HessianData> {
    let x = &sd.frame.point;
    let n = &sd.frame.normal;
    let r = pencil_radius(c, x)?;
    let (sr, cr) = r.sin_cos();
    let q = pencil_center(c, r);
    let miss = (&q - (x * cr + n * sr)).norm();
    if miss > tangency_tolerance {
        return Err(Error::Precondition(format!(
            "pencil sphere is not tangent along the frame normal (miss {miss:.3e})"
        )));
    }
    let v = c.point() * -sr + c.direction() * cr;
    let coefficient = -sr - x.dot(&v);
    if coefficient >= 0.0 {
        return Err(Error::Precondition(format!("coefficient C = {coefficient} is not negative")));
    }
    let k = sd.operator.nrows();
    let matrix = (&sd.operator * sr - DMatrix::identity(k, k) * cr) / coefficient;
    let (eigenvalues, _) = sorted_symmetric_eigen(&matrix);
    let index = eigenvalues.iter().filter(|&&l| l < -tol::EIG).count();
    let degenerate = eigenvalues.iter().any(|l| l.abs() <= tol::EIG);
    Ok(HessianData {
        matrix,
        coefficient,
        radius: r,
        eigenvalues,
        index,
        degenerate,
    })
}

/// `F((x, N), r, η) = (cos r q + sin r η, sin r q - cos r η)` with
/// `q = cos r x + sin r N`.
pub fn sard_map_f(frame: &NormalFrame, r: f64, eta: &DVector<f64>) -> Result<ContactElement> {
    let (sr, cr) = r.sin_cos();
    let q = &frame.point * cr + &frame.normal * sr;
    if eta.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: eta.len(),
        });
    }
    if (eta.norm() - 1.0).abs() > tol::UNIT || eta.dot(&q).abs() > tol::UNIT {
        return Err(crate::error::invalid("sard_map_f", format!("η·q = {}, |η| = {}", eta.dot(&q), eta.norm())));
    }
    ContactElement::new(&q * cr + eta * sr, &q * sr - eta * cr)
}

/// The `η` with `F((x, N), r, η) = (p, ξ)` when the pencil of `(p, ξ)`
/// contains the sphere of radius `r` centered at `cos r x + sin r N`.
pub fn sard_preimage_eta(c: &ContactElement, r: f64) -> DVector<f64> {
    let (sr, cr) = r.sin_cos();
    c.point() * sr - c.direction() * cr
}

fn concat(c: &ContactElement) -> DVector<f64> {
    let n = c.point().len();
    DVector::from_fn(2 * n, |i, _| if i < n { c.point()[i] } else { c.direction()[i - n] })
}

/// Central-difference derivative of `F` along `(X, 0, 0, 0)`: the base point
/// moves along `V` in direction `X` while `N` follows the normal field, `r`
/// stays fixed and `η` is kept orthogonal to the moving center.
pub fn sard_directional_derivative(
    s: &EmbeddedSurface,
    frame: &NormalFrame,
    r: f64,
    eta: &DVector<f64>,
    direction: &DVector<f64>,
    step: f64,
) -> Result<f64> {
    let handle = s
        .analytic()
        .ok_or_else(|| Error::Precondition("finite differences of F need a parametrized surface".into()))?;
    let param = &handle.params[frame.base_index];
    let jet = handle.model.jet(param);
    let d = DMatrix::from_columns(&jet.first);
    let gram = d.transpose() * &d;
    let a = gram
        .try_inverse()
        .ok_or(Error::RankDeficientTangent {
            vertex: frame.base_index,
        })?
        * (d.transpose() * direction);
    let eval = |t: f64| -> Result<DVector<f64>> {
        let delta: Vec<f64> = a.iter().map(|ai| ai * t).collect();
        let jet = handle.model.jet(&handle.model.shift(param, &delta));
        let x = &jet.point / jet.point.norm();
        let mut normal = if s.codim() == 1 {
            generalized_cross(&[x.clone(), jet.first[0].clone(), jet.first[1].clone()])
        } else {
            let mut span = vec![x.clone()];
            let tq = crate::linalg::gram_schmidt(&DMatrix::from_columns(&jet.first))
                .ok_or(Error::RankDeficientTangent { vertex: frame.base_index })?
                .0;
            span.extend(tq.column_iter().map(|c| c.into_owned()));
            let mut n = frame.normal.clone();
            for b in &span {
                let k = b.dot(&n);
                n.axpy(-k, b, 1.0);
            }
            n
        };
        normal /= normal.norm();
        if normal.dot(&frame.normal) < 0.0 {
            normal.neg_mut();
        }
        let moved = NormalFrame {
            base_index: frame.base_index,
            point: x,
            normal,
            sheet: frame.sheet,
        };
        let q = &moved.point * r.cos() + &moved.normal * r.sin();
        let mut e = eta - &q * q.dot(eta);
        e /= e.norm();
        Ok(concat(&sard_map_f(&moved, r, &e)?))
    };
    Ok((eval(step)? - eval(-step)?).norm() / (2.0 * step))
}
