use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::jet::{Jet2, SurfaceJet};
use super::surface::{Analytic, AnalyticHandle, EmbeddedSurface, SurfaceSource};
use crate::error::{Error, Result};
use crate::linalg::orthonormal_complement;

/// Concentration of the von Mises bump on the bumpy torus; the bump has
/// angular width about `1/√κ` in each parameter.
pub const BUMP_CONCENTRATION: f64 = 6.0;

pub const MIN_RESOLUTION: usize = 8;

/// Test surfaces with closed-form parametrizations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogSurface {
    /// Sphere of dimension `k` and geodesic radius `radius` in `S^n`, centered at `e_0`.
    RoundSphere { k: usize, n: usize, radius: f64 },
    /// `(cos u, sin u, cos v, sin v)/√2` in `S^3`.
    CliffordTorus,
    /// Product torus `(a cos u, a sin u, b cos v, b sin v)/√(a²+b²)` in `S^3`.
    TorusOfRevolution { a: f64, b: f64 },
    /// Product torus pushed along its normal by `amplitude` times a smooth bump.
    BumpyTorus { amplitude: f64, a: f64, b: f64 },
}

impl CatalogSurface {
    pub fn bumpy_torus(amplitude: f64) -> Self {
        Self::BumpyTorus {
            amplitude,
            a: 1.0,
            b: 1.0,
        }
    }

    pub fn ambient_n(&self) -> usize {
        match self {
            Self::RoundSphere { n, .. } => *n,
            _ => 3,
        }
    }

    pub fn betti_sum(&self) -> usize {
        match self {
            Self::RoundSphere { .. } => 2,
            _ => 4,
        }
    }

    /// Whether the surface is taut; the bumpy torus is the non-taut control.
    pub fn expected_taut(&self) -> bool {
        !matches!(self, Self::BumpyTorus { amplitude, .. } if *amplitude != 0.0)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::RoundSphere { k, n, radius } => {
                if k != 2 {
                    return Err(crate::error::invalid("round_sphere", format!("only k = 2 is supported, got {k}")));
                }
                if n < 3 {
                    return Err(crate::error::invalid("round_sphere", format!("need n >= 3, got {n}")));
                }
                if !(radius > 0.0 && radius < PI) {
                    return Err(crate::error::invalid("round_sphere", format!("radius {radius} outside (0, π)")));
                }
            }
            Self::CliffordTorus => {}
            Self::TorusOfRevolution { a, b } | Self::BumpyTorus { a, b, .. } => {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(crate::error::invalid("torus", format!("radii ({a}, {b}) must be positive")));
                }
            }
        }
        if let Self::BumpyTorus { amplitude, .. } = *self {
            if !(amplitude.abs() < FRAC_PI_4 * 2.0) {
                return Err(crate::error::invalid("bumpy_torus", format!("amplitude {amplitude} too large")));
            }
        }
        Ok(())
    }

    /// Triangulated surface with analytic handles.
    ///
    /// Tori use a `resolution × resolution` parameter grid; spheres use an
    /// icosphere with each icosahedron edge split into `resolution / 4` segments.
    pub fn build(&self, resolution: usize) -> Result<EmbeddedSurface> {
        self.validate()?;
        if resolution < MIN_RESOLUTION {
            return Err(crate::error::invalid(
                "resolution",
                format!("need at least {MIN_RESOLUTION}, got {resolution}"),
            ));
        }
        let (vertices, triangles, handle) = match *self {
            Self::RoundSphere { n, radius, .. } => sphere_mesh(n, radius, resolution / 4),
            Self::CliffordTorus => torus_mesh(1.0, 1.0, 0.0, resolution),
            Self::TorusOfRevolution { a, b } => torus_mesh(a, b, 0.0, resolution),
            Self::BumpyTorus { amplitude, a, b } => torus_mesh(a, b, amplitude, resolution),
        };
        EmbeddedSurface::build(
            format!("{self}@{resolution}"),
            self.ambient_n(),
            vertices,
            triangles,
            self.betti_sum(),
            Some(handle),
            SurfaceSource::Catalog {
                spec: self.clone(),
                resolution,
            },
        )
    }
}

impl fmt::Display for CatalogSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RoundSphere { k, n, radius } => write!(f, "round-sphere:{k},{n},{radius}"),
            Self::CliffordTorus => write!(f, "clifford-torus"),
            Self::TorusOfRevolution { a, b } => write!(f, "torus-of-revolution:{a},{b}"),
            Self::BumpyTorus { amplitude, a, b } => write!(f, "bumpy-torus:{amplitude},{a},{b}"),
        }
    }
}

impl FromStr for CatalogSurface {
    type Err = Error;

    /// `name[:p1,p2,…]`, e.g. `bumpy-torus:0.3` or `round-sphere:2,3,1.0471975512`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::UnknownSurface(format!("bad parameters in {s:?}")))?
        };
        let bad = || Error::UnknownSurface(format!("wrong number of parameters in {s:?}"));
        let out = match name.trim().replace('_', "-").as_str() {
            "round-sphere" | "sphere" => match nums[..] {
                [] => Self::RoundSphere {
                    k: 2,
                    n: 3,
                    radius: PI / 3.0,
                },
                [radius] => Self::RoundSphere { k: 2, n: 3, radius },
                [k, n, radius] => Self::RoundSphere {
                    k: k as usize,
                    n: n as usize,
                    radius,
                },
                _ => return Err(bad()),
            },
            "clifford-torus" if nums.is_empty() => Self::CliffordTorus,
            "torus-of-revolution" | "product-torus" => match nums[..] {
                [a, b] => Self::TorusOfRevolution { a, b },
                _ => return Err(bad()),
            },
            "bumpy-torus" => match nums[..] {
                [amplitude] => Self::bumpy_torus(amplitude),
                [amplitude, a, b] => Self::BumpyTorus { amplitude, a, b },
                _ => return Err(bad()),
            },
            _ => return Err(Error::UnknownSurface(s.to_string())),
        };
        out.validate()?;
        Ok(out)
    }
}

#[derive(Debug)]
struct SphereModel {
    n: usize,
    radius: f64,
}

impl Analytic for SphereModel {
    /// Geodesic normal coordinates on the unit 2-sphere around `y`.
    fn jet(&self, y: &[f64]) -> SurfaceJet {
        let dim = self.n + 1;
        let (s, c) = self.radius.sin_cos();
        let y3 = DVector::from_column_slice(y);
        let frame = orthonormal_complement(std::slice::from_ref(&y3), 3);
        let embed = |w: &DVector<f64>| {
            let mut out = DVector::zeros(dim);
            out.rows_mut(1, 3).copy_from(w);
            out
        };
        let mut point = embed(&(&y3 * s));
        point[0] = c;
        let first: Vec<DVector<f64>> = frame.iter().map(|e| embed(&(e * s))).collect();
        let second = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| if i == j { embed(&(&y3 * -s)) } else { DVector::zeros(dim) })
                    .collect()
            })
            .collect();
        SurfaceJet { point, first, second }
    }

    fn shift(&self, y: &[f64], delta: &[f64]) -> Vec<f64> {
        let y3 = DVector::from_column_slice(y);
        let frame = orthonormal_complement(std::slice::from_ref(&y3), 3);
        let w = &frame[0] * delta[0] + &frame[1] * delta[1];
        let t = w.norm();
        let out = if t < 1e-300 { y3 } else { y3 * t.cos() + w * (t.sin() / t) };
        out.iter().copied().collect()
    }
}

/// Geodesic icosphere: each icosahedron face split into `f²` triangles.
fn sphere_mesh(n: usize, radius: f64, f: usize) -> (Vec<DVector<f64>>, Vec<[usize; 3]>, AnalyticHandle) {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let ico: Vec<[f64; 3]> = vec![
        [-1.0, g, 0.0],
        [1.0, g, 0.0],
        [-1.0, -g, 0.0],
        [1.0, -g, 0.0],
        [0.0, -1.0, g],
        [0.0, 1.0, g],
        [0.0, -1.0, -g],
        [0.0, 1.0, -g],
        [g, 0.0, -1.0],
        [g, 0.0, 1.0],
        [-g, 0.0, -1.0],
        [-g, 0.0, 1.0],
    ];
    let faces: [[usize; 3]; 20] = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    // a lattice point is keyed by its barycentric weights on the icosahedron vertices
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut dirs: Vec<[f64; 3]> = Vec::new();
    let mut id = |weights: [(usize, usize); 3], dirs: &mut Vec<[f64; 3]>| -> usize {
        let mut key: Vec<(usize, usize)> = weights.iter().copied().filter(|&(_, w)| w > 0).collect();
        key.sort_unstable();
        *index.entry(key).or_insert_with(|| {
            let mut p = [0.0; 3];
            for &(v, w) in &weights {
                for k in 0..3 {
                    p[k] += ico[v][k] * w as f64;
                }
            }
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            dirs.push(p.map(|c| c / norm));
            dirs.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(20 * f * f);
    for [a, b, c] in faces {
        let at = |i: usize, j: usize| [(a, f - i - j), (b, i), (c, j)];
        for i in 0..f {
            for j in 0..f - i {
                let p = id(at(i, j), &mut dirs);
                let q = id(at(i + 1, j), &mut dirs);
                let r = id(at(i, j + 1), &mut dirs);
                triangles.push([p, q, r]);
                if i + j + 1 < f {
                    let s = id(at(i + 1, j + 1), &mut dirs);
                    triangles.push([q, s, r]);
                }
            }
        }
    }
    let model = SphereModel { n, radius };
    let params: Vec<Vec<f64>> = dirs.iter().map(|d| d.to_vec()).collect();
    let vertices = params.iter().map(|p| model.jet(p).point).collect();
    (
        vertices,
        triangles,
        AnalyticHandle {
            model: Arc::new(model),
            params,
        },
    )
}

#[derive(Debug)]
struct TorusModel {
    a: f64,
    b: f64,
    amplitude: f64,
}

impl TorusModel {
    fn new(a: f64, b: f64, amplitude: f64) -> Self {
        let r = a.hypot(b);
        Self {
            a: a / r,
            b: b / r,
            amplitude,
        }
    }

    fn coords(&self, u: f64, v: f64) -> Vec<Jet2> {
        let (uj, vj) = (Jet2::variable(0, u), Jet2::variable(1, v));
        let (cu, su, cv, sv) = (uj.cos(), uj.sin(), vj.cos(), vj.sin());
        let (a, b) = (self.a, self.b);
        let phi = [cu.scale(a), su.scale(a), cv.scale(b), sv.scale(b)];
        if self.amplitude == 0.0 {
            return phi.to_vec();
        }
        let normal = [cu.scale(b), su.scale(b), cv.scale(-a), sv.scale(-a)];
        let k = BUMP_CONCENTRATION;
        let bump = ((cu + cv - Jet2::constant(2.0)).scale(k)).exp();
        let h = bump.scale(self.amplitude);
        let (ch, sh) = (h.cos(), h.sin());
        (0..4).map(|i| ch * phi[i] + sh * normal[i]).collect()
    }
}

impl Analytic for TorusModel {
    fn jet(&self, uv: &[f64]) -> SurfaceJet {
        SurfaceJet::from_coords(&self.coords(uv[0], uv[1]))
    }

    fn shift(&self, uv: &[f64], delta: &[f64]) -> Vec<f64> {
        vec![uv[0] + delta[0], uv[1] + delta[1]]
    }
}

fn torus_mesh(a: f64, b: f64, amplitude: f64, m: usize) -> (Vec<DVector<f64>>, Vec<[usize; 3]>, AnalyticHandle) {
    let model = TorusModel::new(a, b, amplitude);
    let id = |i: usize, j: usize| (i % m) * m + (j % m);
    let mut params = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            params.push(vec![2.0 * PI * i as f64 / m as f64, 2.0 * PI * j as f64 / m as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * m * m);
    for i in 0..m {
        for j in 0..m {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let vertices = params
        .iter()
        .map(|p| {
            let x = model.jet(p).point;
            let nx = x.norm();
            x / nx
        })
        .collect();
    (
        vertices,
        triangles,
        AnalyticHandle {
            model: Arc::new(model),
            params,
        },
    )
}
