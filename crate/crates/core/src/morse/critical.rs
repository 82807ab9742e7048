use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::legendre::EmbeddedSurface;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Minimum,
    Saddle,
    Maximum,
}

impl CriticalKind {
    /// Morse index on a surface.
    pub fn index(self) -> usize {
        match self {
            Self::Minimum => 0,
            Self::Saddle => 1,
            Self::Maximum => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub vertex: usize,
    pub kind: CriticalKind,
    pub multiplicity: usize,
    pub value: f64,
}

/// PL critical points of a vertex function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub points: Vec<CriticalPoint>,
    /// `μ(f)`, saddles counted with multiplicity.
    pub total: usize,
    pub degenerate: bool,
}

impl CriticalReport {
    pub fn count(&self, kind: CriticalKind) -> usize {
        self.points
            .iter()
            .filter(|c| c.kind == kind)
            .map(|c| c.multiplicity)
            .sum()
    }

    /// `#minima - #saddles + #maxima`, which equals `χ(V)`.
    pub fn alternating_sum(&self) -> i64 {
        self.count(CriticalKind::Minimum) as i64 - self.count(CriticalKind::Saddle) as i64
            + self.count(CriticalKind::Maximum) as i64
    }
}

/// `w` comes before `v` in the filtration: value, then index.
fn below(values: &[f64], w: usize, v: usize) -> bool {
    values[w] < values[v] || (values[w] == values[v] && w < v)
}

/// Classifies each vertex by its lower link.
///
/// The lower link of `v` is the part of its link circle below `v`: empty
/// for a minimum, the whole circle for a maximum, and `m ≥ 2` arcs for a
/// saddle of multiplicity `m - 1`. Ties are broken by vertex index.
pub fn classify_vertices(s: &EmbeddedSurface, values: &[f64], flat_tolerance: f64) -> Result<CriticalReport> {
    if values.len() != s.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: s.num_vertices(),
            found: values.len(),
        });
    }
    let mut points = Vec::new();
    let mut degenerate = false;
    for v in 0..s.num_vertices() {
        let link = s.link(v);
        let lower: Vec<bool> = link.iter().map(|&w| below(values, w, v)).collect();
        let m = lower.len();
        let n_lower = lower.iter().filter(|&&b| b).count();
        let (kind, multiplicity) = if n_lower == 0 {
            (CriticalKind::Minimum, 1)
        } else if n_lower == m {
            (CriticalKind::Maximum, 1)
        } else {
            let arcs = (0..m).filter(|&i| lower[i] && !lower[(i + 1) % m]).count();
            if arcs == 1 {
                continue;
            }
            (CriticalKind::Saddle, arcs - 1)
        };
        if multiplicity > 1 || link.iter().any(|&w| (values[w] - values[v]).abs() <= flat_tolerance) {
            degenerate = true;
        }
        points.push(CriticalPoint {
            vertex: v,
            kind,
            multiplicity,
            value: values[v],
        });
    }
    let total = points.iter().map(|c| c.multiplicity).sum();
    Ok(CriticalReport {
        points,
        total,
        degenerate,
    })
}

pub fn pl_critical_points(f: &ScalarField<'_>) -> Result<CriticalReport> {
    classify_vertices(f.surface, &f.values, tol::FLAT)
}
