use std::collections::{BTreeSet, HashMap};

use super::gf2::SparseColumns;
use crate::error::{Error, Result};

/// A finite abstract simplicial complex on vertices `0..num_vertices`.
///
/// Simplices are sorted vertex tuples, stored per dimension in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    num_vertices: usize,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

fn faces_of(s: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        f
    })
}

impl SimplicialComplex {
    /// Closure under faces of the given simplices; every vertex is a 0-simplex.
    pub fn from_top_simplices(num_vertices: usize, tops: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![(0..num_vertices).map(|v| vec![v]).collect()];
        for t in tops {
            let mut s = t.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Mesh(format!("simplex {t:?} repeats a vertex")));
            }
            if s.iter().any(|&v| v >= num_vertices) {
                return Err(Error::Mesh(format!("simplex {t:?} has an out-of-range vertex")));
            }
            if s.is_empty() {
                continue;
            }
            let d = s.len() - 1;
            while by_dim.len() <= d {
                by_dim.push(BTreeSet::new());
            }
            by_dim[d].insert(s);
        }
        for d in (1..by_dim.len()).rev() {
            let faces: Vec<Vec<usize>> = by_dim[d].iter().flat_map(|s| faces_of(s).collect::<Vec<_>>()).collect();
            by_dim[d - 1].extend(faces);
        }
        Ok(Self::from_sets(num_vertices, by_dim))
    }

    /// Checks closure under faces instead of completing it.
    pub fn from_simplices(num_vertices: usize, all: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new()];
        for t in all {
            let mut s = t.clone();
            s.sort_unstable();
            if s.is_empty() || s.windows(2).any(|w| w[0] == w[1]) || s.iter().any(|&v| v >= num_vertices) {
                return Err(Error::Mesh(format!("invalid simplex {t:?}")));
            }
            let d = s.len() - 1;
            while by_dim.len() <= d {
                by_dim.push(BTreeSet::new());
            }
            if !by_dim[d].insert(s) {
                return Err(Error::Mesh(format!("duplicate simplex {t:?}")));
            }
        }
        for d in 1..by_dim.len() {
            for s in &by_dim[d] {
                for f in faces_of(s) {
                    if !by_dim[d - 1].contains(&f) {
                        return Err(Error::Mesh(format!("face {f:?} of {s:?} missing")));
                    }
                }
            }
        }
        if by_dim[0].len() != num_vertices {
            return Err(Error::Mesh("every vertex must be a 0-simplex".into()));
        }
        Ok(Self::from_sets(num_vertices, by_dim))
    }

    fn from_sets(num_vertices: usize, mut by_dim: Vec<BTreeSet<Vec<usize>>>) -> Self {
        while by_dim.len() > 1 && by_dim.last().is_some_and(|s| s.is_empty()) {
            by_dim.pop();
        }
        let simplices: Vec<Vec<Vec<usize>>> = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let index = simplices
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Self {
            num_vertices,
            simplices,
            index,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Top dimension (0 for a vertex set).
    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn simplices(&self, d: usize) -> &[Vec<usize>] {
        self.simplices.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        let d = s.len().checked_sub(1)?;
        self.index.get(d)?.get(s).copied()
    }

    /// Column `j` lists the indices of the codimension-one faces of simplex `j` of dimension `d`.
    pub fn boundary_columns(&self, d: usize) -> Vec<Vec<usize>> {
        if d == 0 {
            return vec![Vec::new(); self.count(0)];
        }
        self.simplices(d)
            .iter()
            .map(|s| {
                let mut col: Vec<usize> = faces_of(s).map(|f| self.index[d - 1][&f]).collect();
                col.sort_unstable();
                col
            })
            .collect()
    }

    pub fn boundary_rank(&self, d: usize) -> usize {
        if d == 0 || d > self.dim() {
            return 0;
        }
        SparseColumns::new(self.boundary_columns(d)).rank()
    }

    /// `β_0, …, β_dim` over `GF(2)`.
    pub fn betti_numbers(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.dim() + 1).map(|d| self.boundary_rank(d)).collect();
        (0..=self.dim()).map(|d| self.count(d) - ranks[d] - ranks[d + 1]).collect()
    }

    pub fn betti_sum(&self) -> usize {
        self.betti_numbers().iter().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim())
            .map(|d| if d % 2 == 0 { self.count(d) as i64 } else { -(self.count(d) as i64) })
            .sum()
    }

    /// `self ⊔ other`, with `other`'s vertices shifted by `self.num_vertices()`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self.num_vertices;
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); self.dim().max(other.dim()) + 1];
        for d in 0..=self.dim() {
            by_dim[d].extend(self.simplices(d).iter().cloned());
        }
        for d in 0..=other.dim() {
            by_dim[d].extend(other.simplices(d).iter().map(|s| s.iter().map(|v| v + shift).collect::<Vec<_>>()));
        }
        Self::from_sets(self.num_vertices + other.num_vertices, by_dim)
    }

    /// Full subcomplex on the vertices with `mask[v]`: per dimension, indices into `self.simplices(d)`.
    pub fn full_subcomplex_indices(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        (0..=self.dim())
            .map(|d| {
                self.simplices(d)
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.iter().all(|&v| mask[v]))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    }
}
