use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::catalog::CatalogSurface;
use super::jet::SurfaceJet;
use crate::error::{Error, Result};
use crate::homology::SimplicialComplex;
use crate::linalg::{angle_between, generalized_cross, gram_schmidt, orthonormal_complement, sorted_symmetric_eigen};
use crate::tol;

/// Closed-form parametrization around each vertex.
pub trait Analytic: Send + Sync + fmt::Debug {
    /// Local jet at the parameter stored for a vertex.
    fn jet(&self, param: &[f64]) -> SurfaceJet;

    /// Parameter of the point at local coordinates `delta` from `param`, in
    /// the coordinates the jet at `param` differentiates along.
    fn shift(&self, param: &[f64], delta: &[f64]) -> Vec<f64>;
}

#[derive(Clone, Debug)]
pub struct AnalyticHandle {
    pub model: Arc<dyn Analytic>,
    pub params: Vec<Vec<f64>>,
}

/// Where a surface came from; controls how it is refined.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSource {
    Catalog { spec: CatalogSurface, resolution: usize },
    Mesh,
}

/// A closed connected triangulated surface `V → S^n`.
#[derive(Clone, Debug)]
pub struct EmbeddedSurface {
    name: String,
    ambient_n: usize,
    vertices: Vec<DVector<f64>>,
    triangles: Vec<[usize; 3]>,
    betti_sum: usize,
    analytic: Option<AnalyticHandle>,
    source: SurfaceSource,
    links: Vec<Vec<usize>>,
    complex: SimplicialComplex,
}

fn edge(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Cyclically ordered link of every vertex; fails unless each link is one circle.
fn vertex_links(num_vertices: usize, triangles: &[[usize; 3]]) -> Result<Vec<Vec<usize>>> {
    let mut link_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_vertices];
    for t in triangles {
        for i in 0..3 {
            link_edges[t[i]].push((t[(i + 1) % 3], t[(i + 2) % 3]));
        }
    }
    let mut links = Vec::with_capacity(num_vertices);
    for (v, edges) in link_edges.iter().enumerate() {
        if edges.len() < 3 {
            return Err(Error::NonManifold(format!("vertex {v} lies in {} triangles", edges.len())));
        }
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b) in edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        if adj.values().any(|n| n.len() != 2) {
            return Err(Error::NonManifold(format!("link of vertex {v} is not a circle")));
        }
        let start = edges[0].0;
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = adj[&start][0];
        while cur != start {
            cycle.push(cur);
            let next = if adj[&cur][0] == prev { adj[&cur][1] } else { adj[&cur][0] };
            prev = cur;
            cur = next;
        }
        if cycle.len() != adj.len() {
            return Err(Error::NonManifold(format!("link of vertex {v} has several components")));
        }
        links.push(cycle);
    }
    Ok(links)
}

fn check_topology(num_vertices: usize, triangles: &[[usize; 3]]) -> Result<()> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in triangles {
        if t.iter().any(|&v| v >= num_vertices) {
            return Err(Error::Mesh(format!("triangle {t:?} has an out-of-range vertex")));
        }
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return Err(Error::Mesh(format!("triangle {t:?} repeats a vertex")));
        }
        for i in 0..3 {
            *count.entry(edge(t[i], t[(i + 1) % 3])).or_default() += 1;
        }
    }
    if let Some((e, c)) = count.iter().find(|(_, &c)| c != 2) {
        return Err(Error::NonManifold(format!("edge {e:?} bounds {c} triangles")));
    }
    // connectivity by union-find over edges
    let mut parent: Vec<usize> = (0..num_vertices).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in count.keys() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    if (0..num_vertices).any(|v| find(&mut parent, v) != root) {
        return Err(Error::NonManifold("surface is not connected".into()));
    }
    Ok(())
}

impl EmbeddedSurface {
    /// Validates a triangulated surface and checks the declared Betti sum
    /// against the homology of the complex.
    pub fn from_mesh(
        name: impl Into<String>,
        ambient_n: usize,
        vertices: Vec<DVector<f64>>,
        triangles: Vec<[usize; 3]>,
        betti_sum: usize,
    ) -> Result<Self> {
        Self::build(name.into(), ambient_n, vertices, triangles, betti_sum, None, SurfaceSource::Mesh)
    }

    pub(crate) fn build(
        name: String,
        ambient_n: usize,
        vertices: Vec<DVector<f64>>,
        triangles: Vec<[usize; 3]>,
        betti_sum: usize,
        analytic: Option<AnalyticHandle>,
        source: SurfaceSource,
    ) -> Result<Self> {
        if ambient_n < 3 {
            return Err(crate::error::invalid("ambient dimension", format!("surfaces need n >= 3, got {ambient_n}")));
        }
        if vertices.is_empty() {
            return Err(Error::Mesh("no vertices".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != ambient_n + 1 {
                return Err(Error::DimensionMismatch {
                    expected: ambient_n + 1,
                    found: v.len(),
                });
            }
            if (v.norm() - 1.0).abs() > tol::UNIT {
                return Err(crate::error::invalid("vertex", format!("vertex {i} has norm {}", v.norm())));
            }
        }
        check_topology(vertices.len(), &triangles)?;
        let links = vertex_links(vertices.len(), &triangles)?;
        let tops: Vec<Vec<usize>> = triangles.iter().map(|t| t.to_vec()).collect();
        let complex = SimplicialComplex::from_top_simplices(vertices.len(), &tops)?;
        let computed = complex.betti_sum();
        if computed != betti_sum {
            return Err(Error::BettiMismatch {
                declared: betti_sum,
                computed,
            });
        }
        Ok(Self {
            name,
            ambient_n,
            vertices,
            triangles,
            betti_sum,
            analytic,
            source,
            links,
            complex,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        2
    }

    pub fn codim(&self) -> usize {
        self.ambient_n - 2
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &DVector<f64> {
        &self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// `β(V; Z_2)`.
    pub fn betti_sum(&self) -> usize {
        self.betti_sum
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.complex.euler_characteristic()
    }

    pub fn source(&self) -> &SurfaceSource {
        &self.source
    }

    pub fn analytic(&self) -> Option<&AnalyticHandle> {
        self.analytic.as_ref()
    }

    /// Neighbors of `v` in cyclic order around it.
    pub fn link(&self, v: usize) -> &[usize] {
        &self.links[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.complex.simplices(1).iter().map(|e| (e[0], e[1]))
    }

    /// Longest edge, as an angle on `S^n`.
    pub fn max_edge_length(&self) -> f64 {
        self.edges()
            .map(|(a, b)| angle_between(&self.vertices[a], &self.vertices[b]))
            .fold(0.0, f64::max)
    }

    pub fn check_resolution(&self, h_max: f64) -> Result<()> {
        let h = self.max_edge_length();
        if h > h_max {
            return Err(Error::Mesh(format!("max edge length {h} exceeds bound {h_max}")));
        }
        Ok(())
    }

    pub fn analytic_jet(&self, v: usize) -> Option<SurfaceJet> {
        self.analytic.as_ref().map(|a| a.model.jet(&a.params[v]))
    }

    /// Orthonormal tangent basis at `v`: from the parametrization when
    /// available, otherwise the least-squares plane of the 1-ring.
    pub fn tangent_basis(&self, v: usize) -> Result<Vec<DVector<f64>>> {
        match self.analytic_jet(v) {
            Some(jet) => {
                let d = DMatrix::from_columns(&jet.first);
                let (q, _) = gram_schmidt(&d).ok_or(Error::RankDeficientTangent { vertex: v })?;
                Ok(q.column_iter().map(|c| c.into_owned()).collect())
            }
            None => self.discrete_tangent_basis(v),
        }
    }

    /// Least-squares tangent plane through the 1-ring of `v`, inside `T_x S^n`.
    pub fn discrete_tangent_basis(&self, v: usize) -> Result<Vec<DVector<f64>>> {
        let x = &self.vertices[v];
        let dim = self.ambient_n + 1;
        let mut cov = DMatrix::zeros(dim, dim);
        for &w in &self.links[v] {
            let e = &self.vertices[w] - x;
            let d = &e - x * x.dot(&e);
            cov += &d * d.transpose();
        }
        let (vals, vecs) = sorted_symmetric_eigen(&cov);
        let (l1, l2) = (vals[dim - 1], vals[dim - 2]);
        if l1 <= 0.0 || l2 / l1 < tol::RANK {
            return Err(Error::RankDeficientTangent { vertex: v });
        }
        let mut basis: Vec<DVector<f64>> = Vec::new();
        for c in [dim - 1, dim - 2] {
            let mut t: DVector<f64> = vecs.column(c).into_owned();
            t -= x * x.dot(&t);
            for b in &basis {
                let s = b.dot(&t);
                t.axpy(-s, b, 1.0);
            }
            let nt = t.norm();
            if nt < tol::NONZERO {
                return Err(Error::RankDeficientTangent { vertex: v });
            }
            basis.push(t / nt);
        }
        Ok(basis)
    }

    /// Orthonormal basis of the normal space of `V` inside `T_x S^n`.
    pub fn normal_basis(&self, v: usize) -> Result<Vec<DVector<f64>>> {
        let mut span = vec![self.vertices[v].clone()];
        span.extend(self.tangent_basis(v)?);
        Ok(orthonormal_complement(&span, self.ambient_n + 1))
    }

    /// Normal space from the least-squares tangent plane, ignoring any parametrization.
    pub fn discrete_normal_basis(&self, v: usize) -> Result<Vec<DVector<f64>>> {
        let mut span = vec![self.vertices[v].clone()];
        span.extend(self.discrete_tangent_basis(v)?);
        Ok(orthonormal_complement(&span, self.ambient_n + 1))
    }

    /// Codimension-one unit normal from the parametrization: `x × φ_u × φ_v`.
    pub fn analytic_normal(&self, v: usize) -> Option<DVector<f64>> {
        if self.codim() != 1 {
            return None;
        }
        let jet = self.analytic_jet(v)?;
        let w = generalized_cross(&[jet.point.clone(), jet.first[0].clone(), jet.first[1].clone()]);
        let nw = w.norm();
        (nw > tol::NONZERO).then(|| w / nw)
    }

    /// Doubled resolution: regenerated for catalog surfaces, midpoint
    /// subdivision projected back to the sphere otherwise.
    pub fn refine(&self) -> Result<Self> {
        match &self.source {
            SurfaceSource::Catalog { spec, resolution } => spec.build(2 * resolution),
            SurfaceSource::Mesh => self.subdivide(),
        }
    }

    pub fn subdivide(&self) -> Result<Self> {
        let mut vertices = self.vertices.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<DVector<f64>>| -> usize {
            *mid.entry(edge(a, b)).or_insert_with(|| {
                let m = &vertices[a] + &vertices[b];
                vertices.push(&m / m.norm());
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let ab = midpoint(t[0], t[1], &mut vertices);
            let bc = midpoint(t[1], t[2], &mut vertices);
            let ca = midpoint(t[2], t[0], &mut vertices);
            triangles.extend([[t[0], ab, ca], [t[1], bc, ab], [t[2], ca, bc], [ab, bc, ca]]);
        }
        Self::build(
            self.name.clone(),
            self.ambient_n,
            vertices,
            triangles,
            self.betti_sum,
            None,
            SurfaceSource::Mesh,
        )
    }

    /// Copy with the analytic handle dropped, so every geometric quantity is
    /// estimated from the mesh.
    pub fn without_analytic(&self) -> Self {
        let mut s = self.clone();
        s.analytic = None;
        s.source = SurfaceSource::Mesh;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octahedron() -> (Vec<DVector<f64>>, Vec<[usize; 3]>) {
        let mut v = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut x = DVector::zeros(4);
                x[i] = s;
                v.push(x);
            }
        }
        let t = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [0, 2, 5],
            [2, 1, 5],
            [1, 3, 5],
            [3, 0, 5],
        ];
        (v, t)
    }

    #[test]
    fn octahedron_is_a_valid_sphere() {
        let (v, t) = octahedron();
        let s = EmbeddedSurface::from_mesh("oct", 3, v, t, 2).unwrap();
        assert_eq!(s.euler_characteristic(), 2);
        assert_eq!(s.link(4).len(), 4);
        let refined = s.refine().unwrap();
        assert_eq!(refined.num_vertices(), 18);
        assert!(refined.max_edge_length() < s.max_edge_length());
        let tb = s.discrete_tangent_basis(4).unwrap();
        assert!(tb.iter().all(|t| t.dot(s.vertex(4)).abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_meshes() {
        let (v, t) = octahedron();
        assert!(matches!(
            EmbeddedSurface::from_mesh("oct", 3, v.clone(), t.clone(), 4),
            Err(Error::BettiMismatch { declared: 4, computed: 2 })
        ));
        assert!(matches!(
            EmbeddedSurface::from_mesh("open", 3, v.clone(), t[..7].to_vec(), 2),
            Err(Error::NonManifold(_))
        ));
        let mut short = v.clone();
        short[0] *= 0.5;
        assert!(EmbeddedSurface::from_mesh("short", 3, short, t, 2).is_err());
    }
}
