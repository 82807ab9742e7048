//! Numerical Lie sphere geometry on the unit sphere `S^n`.
//!
//! Oriented spheres of `S^n` are points of the Lie quadric in `P^{n+2}`,
//! contact elements `(p, ξ)` are lines on that quadric, and an embedded
//! submanifold lifts to a Legendre submanifold through its unit normal
//! bundle. On top of that model the crate counts critical points of
//! parabolic-pencil radius functions and spherical distance functions on
//! triangulated submanifolds, computes `Z_2` homology of sublevel sets, and
//! turns both into taut / Lie-taut verdicts that can be compared under Lie
//! sphere transformations.
//!
//! Modules:
//! - [`quadric`]: the indefinite inner product, oriented spheres, contact
//!   elements and lines on the quadric.
//! - [`transform`]: the group `O(n+1,2)` acting on the quadric.
//! - [`legendre`]: sampled surfaces, normal bundles, shape operators and
//!   Legendre lifts.
//! - [`morse`]: pencil radius functions, PL critical points and the taut
//!   checks.
//! - [`homology`]: simplicial homology over `GF(2)` and sublevel-set
//!   injectivity.

pub mod error;
pub mod homology;
pub mod legendre;
pub mod linalg;
pub mod morse;
pub mod quadric;
pub mod rng;
pub mod tol;
pub mod transform;

pub use error::{Error, Result};
