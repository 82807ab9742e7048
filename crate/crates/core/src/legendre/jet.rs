//! Second-order jets in two variables, used to differentiate the catalog
//! parametrizations exactly.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DVector;

/// Value, gradient and Hessian of a function of `(u, v)` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Jet2 {
    pub val: f64,
    pub d: [f64; 2],
    pub dd: [[f64; 2]; 2],
}

impl Jet2 {
    pub fn constant(val: f64) -> Self {
        Self {
            val,
            d: [0.0; 2],
            dd: [[0.0; 2]; 2],
        }
    }

    /// The coordinate function `i` evaluated at `x`.
    pub fn variable(i: usize, x: f64) -> Self {
        let mut j = Self::constant(x);
        j.d[i] = 1.0;
        j
    }

    /// `g ∘ self` given `g(val), g'(val), g''(val)`.
    fn compose(self, g0: f64, g1: f64, g2: f64) -> Self {
        let mut out = Self::constant(g0);
        for i in 0..2 {
            out.d[i] = g1 * self.d[i];
            for j in 0..2 {
                out.dd[i][j] = g2 * self.d[i] * self.d[j] + g1 * self.dd[i][j];
            }
        }
        out
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.val.exp();
        self.compose(e, e, e)
    }

    pub fn scale(self, s: f64) -> Self {
        let mut out = self;
        out.val *= s;
        for i in 0..2 {
            out.d[i] *= s;
            for j in 0..2 {
                out.dd[i][j] *= s;
            }
        }
        out
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        out.val += o.val;
        for i in 0..2 {
            out.d[i] += o.d[i];
            for j in 0..2 {
                out.dd[i][j] += o.dd[i][j];
            }
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant(self.val * o.val);
        for i in 0..2 {
            out.d[i] = self.d[i] * o.val + self.val * o.d[i];
            for j in 0..2 {
                out.dd[i][j] =
                    self.dd[i][j] * o.val + self.d[i] * o.d[j] + self.d[j] * o.d[i] + self.val * o.dd[i][j];
            }
        }
        out
    }
}

/// Position and first two derivatives of a parametrized surface in local
/// coordinates.
#[derive(Clone, Debug)]
pub struct SurfaceJet {
    pub point: DVector<f64>,
    pub first: Vec<DVector<f64>>,
    /// `second[i][j] = ∂_i ∂_j φ`.
    pub second: Vec<Vec<DVector<f64>>>,
}

impl SurfaceJet {
    pub(crate) fn from_coords(coords: &[Jet2]) -> Self {
        let dim = coords.len();
        let point = DVector::from_iterator(dim, coords.iter().map(|c| c.val));
        let first = (0..2)
            .map(|i| DVector::from_iterator(dim, coords.iter().map(|c| c.d[i])))
            .collect();
        let second = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| DVector::from_iterator(dim, coords.iter().map(|c| c.dd[i][j])))
                    .collect()
            })
            .collect();
        Self { point, first, second }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_against_closed_form() {
        // f(u, v) = sin(u) * exp(u v)
        let (u0, v0) = (0.7, -0.4);
        let u = Jet2::variable(0, u0);
        let v = Jet2::variable(1, v0);
        let f = u.sin() * (u * v).exp();
        let e = (u0 * v0).exp();
        let (s, c) = u0.sin_cos();
        assert!((f.val - s * e).abs() < 1e-15);
        assert!((f.d[0] - (c * e + s * v0 * e)).abs() < 1e-14);
        assert!((f.d[1] - s * u0 * e).abs() < 1e-14);
        let fuu = -s * e + 2.0 * c * v0 * e + s * v0 * v0 * e;
        let fuv = c * u0 * e + s * e + s * v0 * u0 * e;
        let fvv = s * u0 * u0 * e;
        assert!((f.dd[0][0] - fuu).abs() < 1e-13);
        assert!((f.dd[0][1] - fuv).abs() < 1e-13);
        assert!((f.dd[1][0] - fuv).abs() < 1e-13);
        assert!((f.dd[1][1] - fvv).abs() < 1e-13);
    }
}
