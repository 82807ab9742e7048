use rayon::prelude::*;

use super::complex::SimplicialComplex;
use super::gf2::SparseColumns;
use crate::error::{Error, Result};

/// Full subcomplex of `parent` on the vertices with value `≤ threshold`.
#[derive(Clone, Debug)]
pub struct SublevelComplex<'a> {
    parent: &'a SimplicialComplex,
    threshold: f64,
    mask: Vec<bool>,
    included: Vec<Vec<usize>>,
}

fn check_values(k: &SimplicialComplex, values: &[f64]) -> Result<()> {
    if values.len() != k.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: k.num_vertices(),
            found: values.len(),
        });
    }
    if let Some(v) = values.iter().position(|x| !x.is_finite()) {
        return Err(crate::error::invalid("vertex value", format!("vertex {v} is not finite")));
    }
    Ok(())
}

/// `V_r(f)` on a complex, with `f` given by its vertex values.
pub fn sublevel<'a>(k: &'a SimplicialComplex, values: &[f64], threshold: f64) -> Result<SublevelComplex<'a>> {
    check_values(k, values)?;
    Ok(SublevelComplex::from_mask(k, values.iter().map(|&x| x <= threshold).collect(), threshold))
}

impl<'a> SublevelComplex<'a> {
    /// Full subcomplex on an arbitrary vertex set.
    pub fn from_mask(parent: &'a SimplicialComplex, mask: Vec<bool>, threshold: f64) -> Self {
        let included = parent.full_subcomplex_indices(&mask);
        Self {
            parent,
            threshold,
            mask,
            included,
        }
    }

    pub fn parent(&self) -> &SimplicialComplex {
        self.parent
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.mask[v]
    }

    /// Indices into `parent.simplices(d)` of the included `d`-simplices.
    pub fn included(&self, d: usize) -> &[usize] {
        self.included.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.included(0).is_empty()
    }

    pub fn is_subcomplex_of(&self, other: &SublevelComplex<'_>) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    fn boundary_columns(&self, d: usize) -> Vec<Vec<usize>> {
        let all = self.parent.boundary_columns(d);
        self.included(d).iter().map(|&i| all[i].clone()).collect()
    }

    fn boundary_rank(&self, d: usize) -> usize {
        if d == 0 || d > self.parent.dim() {
            return 0;
        }
        SparseColumns::new(self.boundary_columns(d)).rank()
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        let top = self.parent.dim();
        let ranks: Vec<usize> = (0..=top + 1).map(|d| self.boundary_rank(d)).collect();
        (0..=top).map(|d| self.included(d).len() - ranks[d] - ranks[d + 1]).collect()
    }

    /// Basis of `Z_d` of the subcomplex, as index lists into `parent.simplices(d)`.
    fn cycle_basis(&self, d: usize) -> Vec<Vec<usize>> {
        let ids = self.included(d);
        if d == 0 {
            return ids.iter().map(|&i| vec![i]).collect();
        }
        let all = self.parent.boundary_columns(d);
        // reduce while tracking which original columns were combined
        let mut cols: Vec<(Vec<usize>, Vec<usize>)> = ids.iter().map(|&i| (all[i].clone(), vec![i])).collect();
        let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        let mut cycles = Vec::new();
        for j in 0..cols.len() {
            loop {
                let Some(&low) = cols[j].0.last() else {
                    cycles.push(cols[j].1.clone());
                    break;
                };
                match owner.get(&low) {
                    Some(&k) => {
                        let (bk, ck) = cols[k].clone();
                        cols[j].0 = sym_diff(&cols[j].0, &bk);
                        cols[j].1 = sym_diff(&cols[j].1, &ck);
                    }
                    None => {
                        owner.insert(low, j);
                        break;
                    }
                }
            }
        }
        cycles
    }
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    let mut res = Vec::with_capacity(out.len());
    let mut i = 0;
    while i < out.len() {
        if i + 1 < out.len() && out[i] == out[i + 1] {
            i += 2;
        } else {
            res.push(out[i]);
            i += 1;
        }
    }
    res
}

/// Whether `H_d(S) → H_d(parent)` is injective for every `d`.
///
/// In degree `d` this holds iff `dim(Z_d(S) ∩ B_d(K)) = dim B_d(S)`; the
/// intersection dimension is `dim Z_d(S) + rank B_d(K) − rank [Z_d(S) | B_d(K)]`.
pub fn induced_map_injective(s: &SublevelComplex<'_>) -> bool {
    injectivity_defects(s).iter().all(|&k| k == 0)
}

/// Kernel dimension of `H_d(S) → H_d(parent)` per degree.
pub fn injectivity_defects(s: &SublevelComplex<'_>) -> Vec<usize> {
    let k = s.parent;
    (0..=k.dim())
        .map(|d| {
            let cycles = s.cycle_basis(d);
            let bk: Vec<Vec<usize>> = if d < k.dim() { k.boundary_columns(d + 1) } else { Vec::new() };
            let rb = SparseColumns::new(bk.clone()).rank();
            let mut stacked = bk;
            let nz = cycles.len();
            stacked.extend(cycles);
            let r = SparseColumns::new(stacked).rank();
            let inter = nz + rb - r;
            inter - s.boundary_rank(d + 1)
        })
        .collect()
}

/// A threshold at which sublevel homology fails to inject.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KuiperFailure {
    pub threshold: f64,
    /// Lowest degree with nonzero kernel at that threshold.
    pub degree: usize,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KuiperScan {
    pub injective: bool,
    pub first_failure: Option<KuiperFailure>,
    pub thresholds: usize,
}

/// Midpoints between consecutive distinct vertex values.
fn scan_thresholds(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Kuiper criterion over every sublevel set of `values`, from one persistence
/// reduction of the lower-star filtration.
///
/// A class of `H_d(V_r)` dies in `K` exactly when some persistence pair is
/// born at value `≤ r` and dies at value `> r`; the first such `r` is the
/// smallest birth value among pairs with positive persistence.
pub fn kuiper_scan(k: &SimplicialComplex, values: &[f64]) -> Result<KuiperScan> {
    check_values(k, values)?;
    let thresholds = scan_thresholds(values);
    let value_of = |s: &[usize]| s.iter().map(|&v| values[v]).fold(f64::NEG_INFINITY, f64::max);
    // order by (value, vertex rank, dim): ties broken by index, faces first
    let mut rank_of = vec![0usize; values.len()];
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    for (r, &v) in order.iter().enumerate() {
        rank_of[v] = r;
    }
    let mut all: Vec<(usize, usize, usize)> = Vec::new(); // (key, dim, index)
    for d in 0..=k.dim() {
        for (i, s) in k.simplices(d).iter().enumerate() {
            let key = s.iter().map(|&v| rank_of[v]).max().unwrap_or(0);
            all.push((key, d, i));
        }
    }
    all.sort_unstable();
    let mut position: Vec<Vec<usize>> = (0..=k.dim()).map(|d| vec![0; k.count(d)]).collect();
    for (p, &(_, d, i)) in all.iter().enumerate() {
        position[d][i] = p;
    }
    let bounds: Vec<Vec<Vec<usize>>> = (0..=k.dim()).map(|d| k.boundary_columns(d)).collect();
    let columns: Vec<Vec<usize>> = all
        .iter()
        .map(|&(_, d, i)| {
            if d == 0 {
                return Vec::new();
            }
            let mut col: Vec<usize> = bounds[d][i].iter().map(|&f| position[d - 1][f]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let lows = SparseColumns::new(columns).reduce();
    let mut pairs: Vec<(f64, f64, usize)> = Vec::new(); // (birth value, death value, degree)
    for (j, low) in lows.iter().enumerate() {
        if let Some(b) = *low {
            let (_, bd, bi) = all[b];
            let (_, dd, di) = all[j];
            let birth = value_of(&k.simplices(bd)[bi]);
            let death = value_of(&k.simplices(dd)[di]);
            if death > birth {
                pairs.push((birth, death, bd));
            }
        }
    }
    let first = thresholds.iter().copied().find(|&r| pairs.iter().any(|&(b, d, _)| b <= r && r < d));
    let first_failure = first.map(|r| {
        let mut kernel = vec![0usize; k.dim() + 1];
        for &(b, d, deg) in &pairs {
            if b <= r && r < d {
                kernel[deg] += 1;
            }
        }
        let degree = kernel.iter().position(|&x| x > 0).unwrap_or(0);
        KuiperFailure {
            threshold: r,
            degree,
            kernel_dim: kernel[degree],
        }
    });
    Ok(KuiperScan {
        injective: first_failure.is_none(),
        first_failure,
        thresholds: thresholds.len(),
    })
}

/// Same verdict as [`kuiper_scan`], testing [`induced_map_injective`] at
/// every threshold independently. Quadratic cost; meant for small complexes
/// and cross-checks.
pub fn kuiper_scan_exhaustive(k: &SimplicialComplex, values: &[f64]) -> Result<KuiperScan> {
    check_values(k, values)?;
    let thresholds = scan_thresholds(values);
    let first_failure = thresholds
        .par_iter()
        .enumerate()
        .filter_map(|(i, &r)| {
            let s = SublevelComplex::from_mask(k, values.iter().map(|&x| x <= r).collect(), r);
            let defects = injectivity_defects(&s);
            let degree = defects.iter().position(|&x| x > 0)?;
            Some((
                i,
                KuiperFailure {
                    threshold: r,
                    degree,
                    kernel_dim: defects[degree],
                },
            ))
        })
        .min_by_key(|(i, _)| *i)
        .map(|(_, f)| f);
    Ok(KuiperScan {
        injective: first_failure.is_none(),
        first_failure,
        thresholds: thresholds.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `m × m` periodic grid torus.
    fn torus(m: usize) -> SimplicialComplex {
        let id = |i: usize, j: usize| (i % m) * m + (j % m);
        let mut tris = Vec::new();
        for i in 0..m {
            for j in 0..m {
                tris.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                tris.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
            }
        }
        SimplicialComplex::from_top_simplices(m * m, &tris).unwrap()
    }

    #[test]
    fn torus_betti() {
        let k = torus(3);
        assert_eq!(k.betti_numbers(), vec![1, 2, 1]);
        assert_eq!(k.euler_characteristic(), 0);
    }

    #[test]
    fn meridian_injects() {
        let k = torus(4);
        let mask: Vec<bool> = (0..16).map(|v| v / 4 == 0).collect();
        let s = SublevelComplex::from_mask(&k, mask, 0.0);
        assert_eq!(s.betti_numbers(), vec![1, 1, 0]);
        assert!(induced_map_injective(&s));
    }

    #[test]
    fn two_points_in_one_component_fail() {
        let k = torus(4);
        let mut mask = vec![false; 16];
        mask[0] = true;
        mask[10] = true;
        let s = SublevelComplex::from_mask(&k, mask, 0.0);
        assert_eq!(injectivity_defects(&s), vec![1, 0, 0]);
    }

    #[test]
    fn extremes() {
        let k = torus(3);
        let values: Vec<f64> = (0..9).map(|v| v as f64).collect();
        assert!(sublevel(&k, &values, -1.0).unwrap().is_empty());
        let full = sublevel(&k, &values, 100.0).unwrap();
        assert_eq!(full.betti_numbers(), k.betti_numbers());
        assert!(induced_map_injective(&full));
        assert!(sublevel(&k, &values[..3], 0.0).is_err());
    }

    #[test]
    fn persistence_scan_matches_exhaustive() {
        let k = torus(4);
        let mut state = 12345u64;
        for _ in 0..30 {
            let values: Vec<f64> = (0..16)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 40) as f64
                })
                .collect();
            let a = kuiper_scan(&k, &values).unwrap();
            let b = kuiper_scan_exhaustive(&k, &values).unwrap();
            assert_eq!(a, b);
        }
    }
}
