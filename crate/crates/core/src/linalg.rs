//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::tol;

/// Angle between two unit vectors, stable near `0` and `π`.
pub fn angle_between(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let diff = (a - b).norm();
    let sum = (a + b).norm();
    2.0 * diff.atan2(sum)
}

/// Orthonormal basis of the complement of `span(basis)` in `R^dim`.
///
/// `basis` must already be orthonormal. Standard basis vectors are
/// Gram–Schmidt reduced against it, best-conditioned candidates first.
pub fn orthonormal_complement(basis: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let mut have: Vec<DVector<f64>> = basis.to_vec();
    let mut out = Vec::new();
    let target = dim.saturating_sub(basis.len());
    while out.len() < target {
        let mut best: Option<DVector<f64>> = None;
        let mut best_norm = 0.0;
        for i in 0..dim {
            let mut v = DVector::zeros(dim);
            v[i] = 1.0;
            for b in &have {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
            let nv = v.norm();
            if nv > best_norm + 1e-12 {
                best_norm = nv;
                best = Some(v);
            }
        }
        let mut v = best.expect("complement exists while target > 0");
        // second pass for numerical orthogonality
        for b in &have {
            let c = b.dot(&v);
            v.axpy(-c, b, 1.0);
        }
        v /= v.norm();
        have.push(v.clone());
        out.push(v);
    }
    out
}

/// Generalized cross product of `n` vectors in `R^{n+1}`.
///
/// The result `w` satisfies `w ⟂ v_i` and `det[v_1, …, v_n, w] = |w|² ≥ 0`.
pub fn generalized_cross(vectors: &[DVector<f64>]) -> DVector<f64> {
    let dim = vectors.len() + 1;
    let m = DMatrix::from_fn(dim, dim - 1, |r, c| vectors[c][r]);
    let mut w = DVector::zeros(dim);
    for i in 0..dim {
        let minor = m.clone().remove_row(i);
        let sign = if (i + dim - 1) % 2 == 0 { 1.0 } else { -1.0 };
        w[i] = sign * minor.determinant();
    }
    w
}

/// Symmetric eigen-decomposition with eigenvalues sorted ascending.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let k = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Gram–Schmidt on the columns of `m`: returns `(q, r)` with `m = q r`.
///
/// Returns `None` when a column is numerically dependent on earlier ones.
pub fn gram_schmidt(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let (rows, cols) = m.shape();
    let mut q = DMatrix::zeros(rows, cols);
    let mut r = DMatrix::zeros(cols, cols);
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    for j in 0..cols {
        let mut v: DVector<f64> = m.column(j).into_owned();
        for _ in 0..2 {
            for i in 0..j {
                let c = q.column(i).dot(&v);
                r[(i, j)] += c;
                v -= q.column(i) * c;
            }
        }
        let nv = v.norm();
        if nv <= tol::NONZERO.max(1e-10 * scale) {
            return None;
        }
        r[(j, j)] = nv;
        q.set_column(j, &(v / nv));
    }
    Some((q, r))
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
