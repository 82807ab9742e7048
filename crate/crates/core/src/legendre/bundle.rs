use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector2};
use rayon::prelude::*;

use super::surface::EmbeddedSurface;
use crate::error::{Error, Result};
use crate::homology::SimplicialComplex;
use crate::linalg::{generalized_cross, gram_schmidt, sorted_symmetric_eigen};
use crate::quadric::{contact_to_line, ContactElement, OrientedSphere, QuadricLine};
use crate::tol;
use crate::transform::{apply_line, LieTransformation};

/// A point `(x, N)` of the unit normal bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFrame {
    pub base_index: usize,
    pub point: DVector<f64>,
    pub normal: DVector<f64>,
    /// Sheet (codimension one) or fiber sample index.
    pub sheet: usize,
}

impl NormalFrame {
    pub fn new(s: &EmbeddedSurface, base_index: usize, normal: DVector<f64>, sheet: usize) -> Result<Self> {
        let x = s.vertex(base_index);
        if normal.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: normal.len(),
            });
        }
        if (normal.norm() - 1.0).abs() > tol::UNIT || normal.dot(x).abs() > tol::UNIT {
            return Err(crate::error::invalid("normal", "must be a unit vector orthogonal to the base point"));
        }
        Ok(Self {
            base_index,
            point: x.clone(),
            normal,
            sheet,
        })
    }

    pub fn contact_element(&self) -> ContactElement {
        ContactElement::new(self.point.clone(), self.normal.clone()).expect("frames are valid contact elements")
    }
}

/// Codimension-one unit normal per vertex, oriented consistently by
/// propagation along edges.
pub fn oriented_normals(s: &EmbeddedSurface) -> Result<Vec<DVector<f64>>> {
    if s.codim() != 1 {
        return Err(Error::Precondition(format!("oriented normals need codimension 1, got {}", s.codim())));
    }
    let mut normals = Vec::with_capacity(s.num_vertices());
    for v in 0..s.num_vertices() {
        let n = match s.analytic_normal(v) {
            Some(n) => n,
            None => {
                let t = s.discrete_tangent_basis(v)?;
                let w = generalized_cross(&[s.vertex(v).clone(), t[0].clone(), t[1].clone()]);
                &w / w.norm()
            }
        };
        normals.push(n);
    }
    let mut seen = vec![false; s.num_vertices()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in s.link(v) {
            if !seen[w] {
                if normals[w].dot(&normals[v]) < 0.0 {
                    normals[w].neg_mut();
                }
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(normals)
}

/// Samples of the unit normal bundle `B`.
///
/// Codimension one: sheets `0` and `1` hold `+N` and `-N`, frame index
/// `sheet · num_vertices + vertex`. Codimension two: `fiber_resolution`
/// equally spaced normals per vertex, frame index
/// `vertex · fiber_resolution + j`.
pub fn normal_bundle(s: &EmbeddedSurface, fiber_resolution: usize) -> Result<Vec<NormalFrame>> {
    match s.codim() {
        1 => {
            let normals = oriented_normals(s)?;
            let mut frames = Vec::with_capacity(2 * normals.len());
            for (sheet, sign) in [(0, 1.0), (1, -1.0)] {
                for (v, n) in normals.iter().enumerate() {
                    frames.push(NormalFrame {
                        base_index: v,
                        point: s.vertex(v).clone(),
                        normal: n * sign,
                        sheet,
                    });
                }
            }
            Ok(frames)
        }
        2 => {
            if fiber_resolution < 3 {
                return Err(crate::error::invalid("fiber_resolution", "need at least 3 normals per fiber"));
            }
            let mut frames = Vec::with_capacity(fiber_resolution * s.num_vertices());
            for v in 0..s.num_vertices() {
                let nb = s.normal_basis(v)?;
                for j in 0..fiber_resolution {
                    let (sn, cs) = (2.0 * PI * j as f64 / fiber_resolution as f64).sin_cos();
                    frames.push(NormalFrame {
                        base_index: v,
                        point: s.vertex(v).clone(),
                        normal: &nb[0] * cs + &nb[1] * sn,
                        sheet: j,
                    });
                }
            }
            Ok(frames)
        }
        c => Err(Error::Precondition(format!(
            "normal fiber discretization is implemented for codimension 1 and 2, got {c}"
        ))),
    }
}

/// The Legendre lift `(x, N) ↦ [(1, φ(x), 0), (0, N, 1)]` on sampled frames.
#[derive(Clone, Debug)]
pub struct LegendreLift<'a> {
    surface: &'a EmbeddedSurface,
    frames: Vec<NormalFrame>,
    lines: Vec<QuadricLine>,
}

pub fn legendre_lift(s: &EmbeddedSurface, frames: Vec<NormalFrame>) -> Result<LegendreLift<'_>> {
    let lines = frames
        .iter()
        .map(|f| {
            if f.base_index >= s.num_vertices() {
                return Err(crate::error::invalid("frame", format!("vertex {} out of range", f.base_index)));
            }
            Ok(contact_to_line(&ContactElement::new(f.point.clone(), f.normal.clone())?))
        })
        .collect::<Result<_>>()?;
    Ok(LegendreLift {
        surface: s,
        frames,
        lines,
    })
}

impl<'a> LegendreLift<'a> {
    /// Lift of a codimension-one surface on both sheets, or of a
    /// codimension-two surface with `fiber_resolution` normals per point.
    pub fn of_surface(s: &'a EmbeddedSurface, fiber_resolution: usize) -> Result<Self> {
        legendre_lift(s, normal_bundle(s, fiber_resolution)?)
    }

    pub fn surface(&self) -> &'a EmbeddedSurface {
        self.surface
    }

    pub fn frames(&self) -> &[NormalFrame] {
        &self.frames
    }

    pub fn lines(&self) -> &[QuadricLine] {
        &self.lines
    }

    /// `T(λ(x, N))` for every frame.
    pub fn transformed_lines(&self, t: &LieTransformation) -> Result<Vec<QuadricLine>> {
        self.lines.par_iter().map(|l| apply_line(t, l)).collect()
    }

    /// Frames based at `v`.
    pub fn frames_at(&self, v: usize) -> impl Iterator<Item = (usize, &NormalFrame)> {
        self.frames.iter().enumerate().filter(move |(_, f)| f.base_index == v)
    }

    /// Simplicial model of `B`: one copy of `V` per sheet (codimension one only).
    pub fn bundle_complex(&self) -> Result<SimplicialComplex> {
        if self.surface.codim() != 1 || self.frames.len() != 2 * self.surface.num_vertices() {
            return Err(Error::Precondition("bundle complex needs the two-sheet codimension-one lift".into()));
        }
        let nv = self.surface.num_vertices();
        let mut tops = Vec::with_capacity(2 * self.surface.triangles().len());
        for sheet in 0..2 {
            for t in self.surface.triangles() {
                tops.push(t.iter().map(|&v| sheet * nv + v).collect());
            }
        }
        SimplicialComplex::from_top_simplices(2 * nv, &tops)
    }

    /// `β(B; Z_2)`.
    pub fn bundle_betti_sum(&self) -> Result<usize> {
        Ok(self.bundle_complex()?.betti_sum())
    }
}

/// Shape operator `A_N` at one frame.
#[derive(Clone, Debug)]
pub struct ShapeData {
    pub frame: NormalFrame,
    /// Orthonormal tangent basis the operator is expressed in.
    pub tangent: Vec<DVector<f64>>,
    pub operator: DMatrix<f64>,
    /// Ascending.
    pub principal_curvatures: Vec<f64>,
    /// Unit tangent vectors in `R^{n+1}`, matching `principal_curvatures`.
    pub principal_directions: Vec<DVector<f64>>,
}

impl ShapeData {
    fn from_operator(frame: NormalFrame, tangent: Vec<DVector<f64>>, operator: DMatrix<f64>) -> Self {
        let sym = (&operator + operator.transpose()) * 0.5;
        let (vals, vecs) = sorted_symmetric_eigen(&sym);
        let principal_directions = (0..vals.len())
            .map(|c| {
                let mut d = DVector::zeros(frame.point.len());
                for (i, t) in tangent.iter().enumerate() {
                    d.axpy(vecs[(i, c)], t, 1.0);
                }
                d
            })
            .collect();
        Self {
            frame,
            tangent,
            operator: sym,
            principal_curvatures: vals,
            principal_directions,
        }
    }

    /// `A_N X · Y` for tangent vectors in `R^{n+1}`.
    pub fn second_fundamental_form(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let a = DVector::from_iterator(self.tangent.len(), self.tangent.iter().map(|t| t.dot(x)));
        let b = DVector::from_iterator(self.tangent.len(), self.tangent.iter().map(|t| t.dot(y)));
        (&self.operator * a).dot(&b)
    }
}

/// Analytic `A_N` when the surface has a parametrization, otherwise the discrete fit.
pub fn shape_operator(s: &EmbeddedSurface, frame: &NormalFrame) -> Result<ShapeData> {
    match analytic_shape_operator(s, frame) {
        Some(sd) => sd,
        None => discrete_shape_operator(s, frame),
    }
}

/// `A_N` from the first and second fundamental forms, `II_ij = φ_ij · N`.
pub fn analytic_shape_operator(s: &EmbeddedSurface, frame: &NormalFrame) -> Option<Result<ShapeData>> {
    let jet = s.analytic_jet(frame.base_index)?;
    Some((|| {
        let d = DMatrix::from_columns(&jet.first);
        let (q, r) = gram_schmidt(&d).ok_or(Error::RankDeficientTangent {
            vertex: frame.base_index,
        })?;
        let ii = DMatrix::from_fn(2, 2, |i, j| jet.second[i][j].dot(&frame.normal));
        let rinv = r.try_inverse().ok_or(Error::RankDeficientTangent {
            vertex: frame.base_index,
        })?;
        let op = rinv.transpose() * ii * rinv;
        let tangent = q.column_iter().map(|c| c.into_owned()).collect();
        Ok(ShapeData::from_operator(frame.clone(), tangent, op))
    })())
}

/// Least-squares 2-jet fit over the 2-ring: `N·(w - x) ≈ g·a + ½ aᵀ A_N a`,
/// where `a` is the tangent projection of `w - x`. The linear term absorbs
/// the tilt of the discrete tangent plane.
pub fn discrete_shape_operator(s: &EmbeddedSurface, frame: &NormalFrame) -> Result<ShapeData> {
    let v = frame.base_index;
    let x = s.vertex(v);
    let n = &frame.normal;
    let mut tangent = s.discrete_tangent_basis(v)?;
    // orthonormalize against x and the frame normal
    for i in 0..tangent.len() {
        let mut t = tangent[i].clone();
        for _ in 0..2 {
            for b in [x, n].into_iter().chain(tangent[..i].iter()) {
                let c = b.dot(&t);
                t.axpy(-c, b, 1.0);
            }
        }
        let norm = t.norm();
        if norm < 0.5 {
            return Err(Error::IllConditionedFit { vertex: v });
        }
        tangent[i] = t / norm;
    }
    let mut ring: Vec<usize> = s.link(v).to_vec();
    for &w in s.link(v) {
        ring.extend(s.link(w).iter().copied().filter(|&u| u != v));
    }
    ring.sort_unstable();
    ring.dedup();
    let offsets: Vec<(Vector2<f64>, f64)> = ring
        .iter()
        .map(|&w| {
            let d = s.vertex(w) - x;
            (Vector2::new(tangent[0].dot(&d), tangent[1].dot(&d)), n.dot(&d))
        })
        .collect();
    let scale = offsets.iter().map(|(a, _)| a.norm()).sum::<f64>() / offsets.len().max(1) as f64;
    if offsets.len() < 5 || scale <= tol::NONZERO {
        return Err(Error::IllConditionedFit { vertex: v });
    }
    let rows = offsets.len();
    let mut m = DMatrix::<f64>::zeros(rows, 5);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (r, (a, z)) in offsets.iter().enumerate() {
        let (u, w) = (a[0] / scale, a[1] / scale);
        m.row_mut(r).copy_from_slice(&[u, w, 0.5 * u * u, u * w, 0.5 * w * w]);
        rhs[r] = z / (scale * scale);
    }
    let svd = m.svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    if smax <= 0.0 || smin / smax < 1e-6 {
        return Err(Error::IllConditionedFit { vertex: v });
    }
    let c = svd.solve(&rhs, 0.0).map_err(|_| Error::IllConditionedFit { vertex: v })?;
    let op = DMatrix::from_row_slice(2, 2, &[c[2], c[3], c[3], c[4]]);
    Ok(ShapeData::from_operator(frame.clone(), tangent, op))
}

/// `arccot` with values in `(0, π)`.
pub fn arccot(kappa: f64) -> f64 {
    1.0f64.atan2(kappa)
}

/// Curvature spheres at a frame, with multiplicities: radius `arccot κ` and
/// center `cos r · x + sin r · N` for each distinct principal curvature.
pub fn curvature_spheres(sd: &ShapeData) -> Result<Vec<(OrientedSphere, usize)>> {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for &k in &sd.principal_curvatures {
        match groups.last_mut() {
            Some((g, m)) if (k - *g).abs() <= tol::EIG * g.abs().max(1.0) => *m += 1,
            _ => groups.push((k, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(k, m)| {
            let r = arccot(k);
            let center = &sd.frame.point * r.cos() + &sd.frame.normal * r.sin();
            Ok((OrientedSphere::new(center, r)?, m))
        })
        .collect()
}
