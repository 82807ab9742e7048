//! Lie sphere transformations: the group `O(n+1, 2)` modulo `±I`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::quadric::{contact_to_line, line_to_contact, LieVector, ProjectivePoint, QuadricLine};
use crate::rng::gaussian_vector;
use crate::tol;

/// Gram matrix `J = diag(-1, 1, …, 1, -1)` of the Lie form on `R^{n+3}`.
pub fn lie_gram(ambient_n: usize) -> DMatrix<f64> {
    let m = ambient_n + 3;
    let mut j = DMatrix::identity(m, m);
    j[(0, 0)] = -1.0;
    j[(m - 1, m - 1)] = -1.0;
    j
}

/// Max-norm of `AᵀJA - J`.
pub fn group_residual(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows().saturating_sub(3);
    let j = lie_gram(n);
    (a.transpose() * &j * a - j).amax()
}

/// A validated element of `O(n+1, 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieTransformation {
    matrix: DMatrix<f64>,
}

impl LieTransformation {
    /// Wraps `a` when `‖AᵀJA − J‖_max < tol::GROUP`.
    pub fn validate(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || a.nrows() < 4 {
            return Err(invalid("LieTransformation", format!("expected a square matrix of size n + 3 >= 4, got {}x{}", a.nrows(), a.ncols())));
        }
        let residual = group_residual(&a);
        if !(residual < tol::GROUP) {
            return Err(Error::NotLieOrthogonal { residual });
        }
        Ok(Self { matrix: a })
    }

    pub fn identity(ambient_n: usize) -> Self {
        let m = ambient_n + 3;
        Self {
            matrix: DMatrix::identity(m, m),
        }
    }

    /// Row-major `(n+3)²` entries.
    pub fn from_row_major(ambient_n: usize, data: &[f64]) -> Result<Self> {
        let m = ambient_n + 3;
        if data.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                found: data.len(),
            });
        }
        Self::validate(DMatrix::from_row_slice(m, m, data))
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let m = self.matrix.nrows();
        (0..m).flat_map(|r| (0..m).map(move |c| (r, c))).map(|(r, c)| self.matrix[(r, c)]).collect()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn ambient_n(&self) -> usize {
        self.matrix.nrows() - 3
    }

    pub fn residual(&self) -> f64 {
        group_residual(&self.matrix)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `J Aᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = lie_gram(self.ambient_n());
        Self {
            matrix: &j * self.matrix.transpose() * &j,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            matrix: -&self.matrix,
        }
    }

    pub fn apply_vector(&self, x: &LieVector) -> Result<LieVector> {
        self.check_dim(x.ambient_n())?;
        LieVector::new(&self.matrix * x.coords())
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.ambient_n() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_n(),
                found: n,
            });
        }
        Ok(())
    }

    /// Whether point spheres go to point spheres (last row is `±e_{n+3}`).
    pub fn is_mobius(&self) -> bool {
        let m = self.matrix.nrows();
        let last = self.matrix.row(m - 1);
        let col = self.matrix.column(m - 1);
        (0..m - 1).all(|i| last[i].abs() < tol::GROUP && col[i].abs() < tol::GROUP)
    }
}

/// `P_t`: rotation by `t` in the `(x_1, x_{n+3})` plane; adds `t` to signed radii.
pub fn parallel_transformation(t: f64, ambient_n: usize) -> LieTransformation {
    let m = ambient_n + 3;
    let mut a = DMatrix::identity(m, m);
    let (s, c) = t.sin_cos();
    a[(0, 0)] = c;
    a[(0, m - 1)] = -s;
    a[(m - 1, 0)] = s;
    a[(m - 1, m - 1)] = c;
    LieTransformation { matrix: a }
}

/// `diag(L, 1)` for `L` orthogonal for `diag(-1, 1, …, 1)` on `R^{n+2}`.
pub fn mobius_from_lorentz(l: &DMatrix<f64>) -> Result<LieTransformation> {
    if !l.is_square() || l.nrows() < 3 {
        return Err(invalid("Lorentz matrix", format!("expected square of size n + 2 >= 3, got {}x{}", l.nrows(), l.ncols())));
    }
    let k = l.nrows();
    let mut g = DMatrix::identity(k, k);
    g[(0, 0)] = -1.0;
    let residual = (l.transpose() * &g * l - g).amax();
    if !(residual < tol::GROUP) {
        return Err(Error::NotLieOrthogonal { residual });
    }
    let mut a = DMatrix::identity(k + 1, k + 1);
    a.view_mut((0, 0), (k, k)).copy_from(l);
    Ok(LieTransformation { matrix: a })
}

/// `diag(1, R, 1)` for `R ∈ O(n+1)`.
pub fn rotation(r: &DMatrix<f64>) -> Result<LieTransformation> {
    let k = r.nrows();
    let mut l = DMatrix::identity(k + 1, k + 1);
    l.view_mut((1, 1), (k, k)).copy_from(r);
    mobius_from_lorentz(&l)
}

/// `exp(s (E_12 + E_21))`: a Lorentz boost in the `(x_1, x_2)` plane.
pub fn boost(rapidity: f64, ambient_n: usize) -> LieTransformation {
    let m = ambient_n + 3;
    let mut a = DMatrix::identity(m, m);
    let (c, s) = (rapidity.cosh(), rapidity.sinh());
    a[(0, 0)] = c;
    a[(0, 1)] = s;
    a[(1, 0)] = s;
    a[(1, 1)] = c;
    LieTransformation { matrix: a }
}

/// `[A x]`, canonically normalized.
pub fn apply_point(t: &LieTransformation, q: &ProjectivePoint) -> Result<ProjectivePoint> {
    Ok(ProjectivePoint::new(t.apply_vector(q.rep())?)?.normalized())
}

/// Image of a line, re-based to its (point sphere, great sphere) pair.
pub fn apply_line(t: &LieTransformation, line: &QuadricLine) -> Result<QuadricLine> {
    let a = t.apply_vector(line.point_sphere().rep())?;
    let b = t.apply_vector(line.great_sphere().rep())?;
    let c = line_to_contact(&QuadricLine::from_span(&a, &b)?)?;
    Ok(contact_to_line(&c))
}

/// Haar-distributed rotation of `R^dim` with determinant `+1`.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_columns(&(0..dim).map(|_| gaussian_vector(rng, dim)).collect::<Vec<_>>());
        let qr = g.qr();
        let r = qr.r();
        if (0..dim).any(|i| r[(i, i)].abs() < 1e-8) {
            continue;
        }
        let mut q = qr.q();
        for i in 0..dim {
            if r[(i, i)] < 0.0 {
                let col = -q.column(i);
                q.set_column(i, &col);
            }
        }
        if q.determinant() < 0.0 {
            let col = -q.column(0);
            q.set_column(0, &col);
        }
        return q;
    }
}

/// Mix of generators used for invariance experiments.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TransformSampler {
    /// Parallel-transformation amount drawn uniformly from this interval.
    pub t_range: (f64, f64),
    /// Rapidity of the boost drawn uniformly from `[-max_boost, max_boost]`.
    pub max_boost: f64,
}

impl Default for TransformSampler {
    fn default() -> Self {
        Self {
            t_range: (-std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4),
            max_boost: 0.5,
        }
    }
}

/// `P_t · B_s · diag(1, R, 1)` with random `R ∈ SO(n+1)`, `t`, `s`.
pub fn random_lie_transformation<R: Rng + ?Sized>(
    rng: &mut R,
    ambient_n: usize,
    sampler: &TransformSampler,
) -> LieTransformation {
    let r = random_rotation(rng, ambient_n + 1);
    let rot = rotation(&r).expect("random rotation is orthogonal");
    let (lo, hi) = sampler.t_range;
    let t = if hi > lo { rng.random_range(lo..hi) } else { lo };
    let s = if sampler.max_boost > 0.0 {
        rng.random_range(-sampler.max_boost..sampler.max_boost)
    } else {
        0.0
    };
    parallel_transformation(t, ambient_n).compose(&boost(s, ambient_n)).compose(&rot)
}

/// Rotation-only sampler output, `diag(1, R, 1)`.
pub fn random_rotation_transformation<R: Rng + ?Sized>(rng: &mut R, ambient_n: usize) -> LieTransformation {
    rotation(&random_rotation(rng, ambient_n + 1)).expect("random rotation is orthogonal")
}

/// Applies `T` to a vector of `R^{n+1}` viewed as the point sphere `[(1, q, 0)]`
/// and returns the image point when the image is again a point sphere.
pub fn apply_to_point_of_sphere(t: &LieTransformation, q: &DVector<f64>) -> Result<DVector<f64>> {
    let img = t.apply_vector(&LieVector::from_blocks(1.0, q, 0.0))?;
    let c = img.coords();
    let m = c.len();
    if c[m - 1].abs() > 1e-9 * c.norm() || c[0].abs() < tol::NONZERO {
        return Err(invalid("point sphere image", "transformation does not fix point spheres"));
    }
    Ok(c.rows(1, m - 2).into_owned() / c[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::{quadric_to_sphere, sphere_to_quadric, OrientedSphere};
    use std::f64::consts::PI;

    #[test]
    fn validate_examples() {
        assert!(LieTransformation::validate(DMatrix::identity(6, 6)).is_ok());
        let mut rng = crate::rng::rng_from_seed(1);
        let r = random_rotation(&mut rng, 4);
        assert!(rotation(&r).is_ok());
        let mut a = DMatrix::identity(6, 6);
        a[(0, 0)] = 2.0;
        match LieTransformation::validate(a) {
            Err(Error::NotLieOrthogonal { residual }) => assert!((residual - 3.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(LieTransformation::validate(DMatrix::identity(5, 6)).is_err());
    }

    #[test]
    fn parallel_transformations_compose_and_shift_radii() {
        assert_eq!(parallel_transformation(0.0, 3).matrix(), &DMatrix::identity(6, 6));
        let a = parallel_transformation(0.3, 3).compose(&parallel_transformation(0.5, 3));
        assert!((a.matrix() - parallel_transformation(0.8, 3).matrix()).amax() < 1e-15);
        let p = DVector::from_vec(vec![0.0, 0.6, 0.0, 0.8]);
        let s = OrientedSphere::new(p.clone(), 0.2).unwrap();
        let img = apply_point(&parallel_transformation(0.5, 3), &sphere_to_quadric(&s)).unwrap();
        let back = quadric_to_sphere(&img).unwrap();
        assert!((back.signed_radius() - 0.7).abs() < 1e-14);
        assert!((back.center() - p).norm() < 1e-14);
    }

    #[test]
    fn mobius_examples() {
        let t = mobius_from_lorentz(&DMatrix::identity(5, 5)).unwrap();
        assert_eq!(t.matrix(), &DMatrix::identity(6, 6));
        let mut bad = DMatrix::identity(5, 5);
        bad[(1, 1)] = 1.5;
        assert!(mobius_from_lorentz(&bad).is_err());

        let mut rng = crate::rng::rng_from_seed(9);
        let r = random_rotation(&mut rng, 4);
        let t = rotation(&r).unwrap();
        let q = DVector::from_vec(vec![0.5, 0.5, 0.5, 0.5]);
        let img = apply_to_point_of_sphere(&t, &q).unwrap();
        assert!((img - &r * &q).norm() < 1e-14);

        // boost: conformal but not isometric; point spheres stay point spheres
        let b = boost(0.7, 3);
        assert!(b.is_mobius());
        let q1 = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        let q2 = DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]);
        let q3 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let i1 = apply_to_point_of_sphere(&b, &q1).unwrap();
        let i3 = apply_to_point_of_sphere(&b, &q3).unwrap();
        assert!((i1.norm() - 1.0).abs() < 1e-14);
        let d_before = crate::linalg::angle_between(&q1, &q3);
        let d_after = crate::linalg::angle_between(&i1, &i3);
        assert!((d_before - d_after).abs() > 1e-3);
        let i2 = apply_to_point_of_sphere(&b, &q2).unwrap();
        assert!((i2.norm() - 1.0).abs() < 1e-14);
        assert!(crate::linalg::angle_between(&i1, &i2) - PI / 2.0 < 1e-12);
    }

    #[test]
    fn sign_is_projectively_irrelevant() {
        let mut rng = crate::rng::rng_from_seed(4);
        let t = random_lie_transformation(&mut rng, 3, &TransformSampler::default());
        let s = OrientedSphere::new(DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]), 0.4).unwrap();
        let k = sphere_to_quadric(&s);
        let a = apply_point(&t, &k).unwrap();
        let b = apply_point(&t.negated(), &k).unwrap();
        assert_eq!(a, b);
        assert!((a.rep().coords() - b.rep().coords()).norm() < 1e-12);
    }

    #[test]
    fn random_transformations_validate() {
        let mut rng = crate::rng::rng_from_seed(5);
        for n in [2, 3, 5] {
            for _ in 0..20 {
                let t = random_lie_transformation(&mut rng, n, &TransformSampler::default());
                assert!(t.residual() < tol::GROUP);
                assert!((t.matrix().determinant().abs() - 1.0).abs() < 1e-9);
                let inv = t.inverse();
                assert!((t.compose(&inv).matrix() - DMatrix::identity(n + 3, n + 3)).amax() < 1e-12);
            }
        }
        let t = random_lie_transformation(&mut rng, 3, &TransformSampler { t_range: (0.0, 0.0), max_boost: 0.0 });
        assert!(t.is_mobius());
    }
}
