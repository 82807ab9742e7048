//! Numerical tolerances shared across the crate.
//!
//! Constructions in double precision are accurate to roughly `1e-13`; the
//! thresholds below leave about two orders of magnitude of headroom.

/// Lightlike test `|<k,k>|` on Euclidean-normalized representatives.
pub const QUADRIC: f64 = 1e-9;
/// Unit-norm and orthogonality checks on vectors of `R^{n+1}`.
pub const UNIT: f64 = 1e-9;
/// Oriented contact test `|<k_a,k_b>|` on normalized representatives.
pub const CONTACT: f64 = 1e-8;
/// Relative singular value cutoff for rank decisions.
pub const RANK: f64 = 1e-8;
/// Projective equality: `1 - |cos angle|` of representatives.
pub const PROJ: f64 = 1e-10;
/// A coordinate or norm below this is treated as zero.
pub const NONZERO: f64 = 1e-12;
/// Max-norm residual of `AᵀJA - J` for Lie sphere transformations.
pub const GROUP: f64 = 1e-8;
/// Symmetry of shape operators.
pub const SYM: f64 = 1e-9;
/// Angular distance below which `r_(p,ξ)(x)` is undefined.
pub const BASE_POINT: f64 = 1e-9;
/// PL flatness: neighbor values this close to a critical value flag the field.
pub const FLAT: f64 = 1e-10;
/// Curvature-sphere proximity (radians) used by the degeneracy filter.
pub const CURV: f64 = 0.05;
/// Hessian eigenvalue considered zero.
pub const EIG: f64 = 1e-8;
/// Default base-point rejection radius, in multiples of the mesh's max edge.
pub const BASE_EDGE_FACTOR: f64 = 1.0;
