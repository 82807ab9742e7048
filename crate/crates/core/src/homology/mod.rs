//! Simplicial homology over `GF(2)`.
//!
//! Betti numbers come from boundary-matrix ranks; sublevel sets of vertex
//! functions are full subcomplexes, and injectivity of
//! `H_*(sublevel) → H_*(K)` is decided either directly from stacked ranks
//! ([`induced_map_injective`]) or for a whole filtration at once from the
//! lower-star persistence pairing ([`kuiper_scan`]).

mod complex;
mod gf2;
mod sublevel;

pub use complex::SimplicialComplex;
pub use gf2::{kernel, rank, BitVec, SparseColumns};
pub use sublevel::{
    induced_map_injective, injectivity_defects, kuiper_scan, kuiper_scan_exhaustive, sublevel, KuiperFailure, KuiperScan,
    SublevelComplex,
};
