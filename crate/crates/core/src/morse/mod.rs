//! Pencil radius, spherical distance and height functions on surfaces, PL
//! critical points, the analytic criticality and Hessian tests, and the
//! taut / Lie-taut checks built on them.

mod analytic;
mod critical;
mod field;
mod sard;
mod taut;

pub use analytic::{
    criticality_residual, hessian_analytic, sard_directional_derivative, sard_map_f, sard_preimage_eta, tangency,
    HessianData, Tangency,
};
pub use critical::{classify_vertices, pl_critical_points, CriticalKind, CriticalPoint, CriticalReport};
pub use field::{
    build_field, default_base_tolerance, distance_to_vertices, height, pencil_center, pencil_radius,
    spherical_distance, FieldKind, ScalarField,
};
pub use sard::{sard_check, SardReport, SardSample, GENERIC_RADIUS_GAP};
pub use taut::{
    index_agreement, kuiper_check, lie_taut_check, taut_check, Confirmation, FieldSnapshot, Histogram,
    IndexComparison, KuiperReport, KuiperSample, LineSampling, Rejection, SampleRecord, TautOptions, TautVerdict,
    Transport, Verdict,
};
