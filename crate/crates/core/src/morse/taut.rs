use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analytic::{hessian_analytic, tangency};
use super::critical::{classify_vertices, CriticalKind, CriticalPoint, CriticalReport};
use super::field::{build_field, default_base_tolerance, distance_to_vertices, spherical_distance, FieldKind};
use crate::error::{Error, Result};
use crate::homology::{kuiper_scan, KuiperFailure};
use crate::legendre::{arccot, shape_operator, EmbeddedSurface, LegendreLift, NormalFrame};
use crate::quadric::{contact_to_line, line_incidence_ratio, line_to_contact, random_contact_element, ContactElement};
use crate::rng::{sample_rng, unit_vector};
use crate::tol;
use crate::transform::{apply_line, random_lie_transformation, LieTransformation, TransformSampler};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Taut,
    NotTaut,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// Base point within the exclusion radius of a vertex.
    NearBasePoint,
    /// A multiple saddle or a flat neighbor at a critical vertex.
    Degenerate,
    /// A critical value within the curvature tolerance of a curvature-sphere radius.
    NearCurvatureSphere,
    /// Frame matching or geometry evaluation failed.
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TautOptions {
    pub num_samples: usize,
    pub seed: u64,
    /// Angular exclusion radius around the base point; `None` uses
    /// `BASE_EDGE_FACTOR` times the longest edge.
    pub base_tolerance: Option<f64>,
    pub curvature_tolerance: f64,
    pub flat_tolerance: f64,
    /// More rejections than this fraction makes the verdict inconclusive.
    pub max_rejection_rate: f64,
    /// Re-evaluate over-count samples on the refined surface before declaring not taut.
    pub confirm_with_refinement: bool,
    /// Also count critical points of spherical distance functions.
    pub distance_check: bool,
}

impl Default for TautOptions {
    fn default() -> Self {
        Self {
            num_samples: 200,
            seed: 0,
            base_tolerance: None,
            curvature_tolerance: tol::CURV,
            flat_tolerance: tol::FLAT,
            max_rejection_rate: 0.5,
            confirm_with_refinement: true,
            distance_check: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub count: Option<usize>,
    pub rejection: Option<Rejection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub used: usize,
    pub rejected: usize,
    pub counts: BTreeMap<usize, usize>,
    pub rejections: BTreeMap<Rejection, usize>,
}

impl Histogram {
    fn from_outcomes<'a>(outcomes: impl Iterator<Item = &'a Outcome>) -> Self {
        let mut h = Self {
            used: 0,
            rejected: 0,
            counts: BTreeMap::new(),
            rejections: BTreeMap::new(),
        };
        for o in outcomes {
            match o.rejection {
                Some(r) => {
                    h.rejected += 1;
                    *h.rejections.entry(r).or_default() += 1;
                }
                None => {
                    h.used += 1;
                    *h.counts.entry(o.count).or_default() += 1;
                }
            }
        }
        h
    }
}

/// One field kept for plotting: vertex values and PL critical points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub sample: usize,
    pub kind: String,
    pub values: Vec<f64>,
    pub critical: Vec<CriticalPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Confirmation {
    pub sample: usize,
    pub coarse_count: usize,
    pub refined_vertices: usize,
    pub refined_count: Option<usize>,
    pub refined_rejection: Option<Rejection>,
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TautVerdict {
    pub samples_requested: usize,
    pub samples_used: usize,
    pub samples_rejected: usize,
    pub counts_histogram: BTreeMap<usize, usize>,
    pub rejections: BTreeMap<Rejection, usize>,
    pub expected: usize,
    pub verdict: Verdict,
    pub seed: u64,
    pub base_tolerance: f64,
    /// Classical check with spherical distance functions.
    pub distance: Option<Histogram>,
    pub samples: Vec<SampleRecord>,
    pub confirmations: Vec<Confirmation>,
    pub example: Option<FieldSnapshot>,
    /// Largest incidence ratio between a counted lifted line and the sampled line.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_incidence_ratio: Option<f64>,
}

impl TautVerdict {
    /// Counts of all kept samples, by sample index.
    pub fn kept_counts(&self) -> Vec<(usize, usize)> {
        self.samples
            .iter()
            .filter_map(|s| s.count.filter(|_| s.rejection.is_none()).map(|c| (s.index, c)))
            .collect()
    }
}

#[derive(Clone, Debug)]
struct Outcome {
    count: usize,
    rejection: Option<Rejection>,
    detail: Option<String>,
    report: Option<CriticalReport>,
    values: Vec<f64>,
    incidence: f64,
}

impl Outcome {
    fn rejected(r: Rejection, detail: impl Into<Option<String>>) -> Self {
        Self {
            count: 0,
            rejection: Some(r),
            detail: detail.into(),
            report: None,
            values: Vec::new(),
            incidence: 0.0,
        }
    }
}

/// Unit normal at `v` pointing from `x` toward `center`, and whether the
/// sphere of radius `r` around `center` has a curvature-sphere radius within
/// `tolerance` of `r`.
fn near_curvature_sphere(
    s: &EmbeddedSurface,
    v: usize,
    normal: DVector<f64>,
    r: f64,
    tolerance: f64,
) -> Result<bool> {
    let frame = NormalFrame {
        base_index: v,
        point: s.vertex(v).clone(),
        normal,
        sheet: 0,
    };
    let sd = shape_operator(s, &frame)?;
    Ok(sd.principal_curvatures.iter().any(|&k| (arccot(k) - r).abs() < tolerance))
}

/// Normal at `v` along which the geodesic reaches `p`.
fn normal_toward(s: &EmbeddedSurface, v: usize, p: &DVector<f64>) -> Result<DVector<f64>> {
    let x = s.vertex(v);
    let mut n = p - x * x.dot(p);
    for t in s.tangent_basis(v)? {
        let a = t.dot(&n);
        n.axpy(-a, &t, 1.0);
    }
    let nn = n.norm();
    if nn < tol::NONZERO {
        return Err(Error::Precondition(format!("no normal direction toward the base point at vertex {v}")));
    }
    Ok(n / nn)
}

/// Counts PL critical points of the pencil field of `c`, applying the
/// rejection rules. With a lift, each critical vertex is matched with the
/// frame whose normal points toward the tangent pencil sphere's center.
fn pencil_outcome(
    s: &EmbeddedSurface,
    c: &ContactElement,
    opts: &TautOptions,
    base_tolerance: f64,
    lift: Option<(&LegendreLift<'_>, &[crate::quadric::QuadricLine], &crate::quadric::QuadricLine)>,
) -> Outcome {
    let field = match build_field(s, FieldKind::PencilRadius(c.clone()), base_tolerance) {
        Ok(f) => f,
        Err(Error::AtBasePoint { distance }) => {
            return Outcome::rejected(Rejection::NearBasePoint, format!("base point at distance {distance:.3e}"))
        }
        Err(e) => return Outcome::rejected(Rejection::Failed, e.to_string()),
    };
    let report = match classify_vertices(s, &field.values, opts.flat_tolerance) {
        Ok(r) => r,
        Err(e) => return Outcome::rejected(Rejection::Failed, e.to_string()),
    };
    if report.degenerate {
        return Outcome::rejected(Rejection::Degenerate, None);
    }
    let mut count = 0;
    let mut incidence: f64 = 0.0;
    for cp in &report.points {
        let tan = match tangency(s, cp.vertex, c) {
            Ok(t) => t,
            Err(e) => return Outcome::rejected(Rejection::Failed, e.to_string()),
        };
        match near_curvature_sphere(s, cp.vertex, tan.normal.clone(), tan.radius, opts.curvature_tolerance) {
            Ok(true) => {
                return Outcome::rejected(
                    Rejection::NearCurvatureSphere,
                    format!("vertex {} at radius {:.4}", cp.vertex, tan.radius),
                )
            }
            Ok(false) => {}
            Err(e) => return Outcome::rejected(Rejection::Failed, e.to_string()),
        }
        match lift {
            None => count += cp.multiplicity,
            Some((lift, lifted_lines, target)) => {
                let best = lift
                    .frames_at(cp.vertex)
                    .map(|(i, f)| (i, f.normal.dot(&tan.normal)))
                    .max_by(|a, b| a.1.total_cmp(&b.1));
                match best {
                    Some((i, dot)) if dot > 0.0 => {
                        count += cp.multiplicity;
                        if let Ok(ratio) = line_incidence_ratio(&lifted_lines[i], target) {
                            incidence = incidence.max(ratio);
                        }
                    }
                    _ => {
                        return Outcome::rejected(
                            Rejection::Failed,
                            format!("no frame in oriented contact at vertex {}", cp.vertex),
                        )
                    }
                }
            }
        }
    }
    Outcome {
        count,
        rejection: None,
        detail: None,
        report: Some(report),
        values: field.values,
        incidence,
    }
}

fn distance_outcome(s: &EmbeddedSurface, p: &DVector<f64>, opts: &TautOptions, base_tolerance: f64) -> Outcome {
    let near = distance_to_vertices(s, p).min(distance_to_vertices(s, &-p));
    if near < base_tolerance {
        return Outcome::rejected(Rejection::NearBasePoint, None);
    }
    let values: Vec<f64> = s.vertices().iter().map(|x| spherical_distance(p, x)).collect();
    let report = match classify_vertices(s, &values, opts.flat_tolerance) {
        Ok(r) => r,
        Err(e) => return Outcome::rejected(Rejection::Failed, e.to_string()),
    };
    if report.degenerate {
        return Outcome::rejected(Rejection::Degenerate, None);
    }
    for cp in &report.points {
        let check = normal_toward(s, cp.vertex, p)
            .and_then(|n| near_curvature_sphere(s, cp.vertex, n, cp.value, opts.curvature_tolerance));
        match check {
            Ok(false) => {}
            Ok(true) => return Outcome::rejected(Rejection::NearCurvatureSphere, None),
            Err(e) => return Outcome::rejected(Rejection::Failed, e.to_string()),
        }
    }
    Outcome {
        count: report.total,
        rejection: None,
        detail: None,
        report: Some(report),
        values,
        incidence: 0.0,
    }
}

fn record(index: usize, c: &ContactElement, o: &Outcome) -> SampleRecord {
    SampleRecord {
        index,
        point: c.point().iter().copied().collect(),
        direction: c.direction().iter().copied().collect(),
        count: o.rejection.is_none().then_some(o.count),
        rejection: o.rejection,
        detail: o.detail.clone(),
    }
}

fn snapshot(index: usize, kind: &str, o: &Outcome) -> Option<FieldSnapshot> {
    Some(FieldSnapshot {
        sample: index,
        kind: kind.to_string(),
        values: o.values.clone(),
        critical: o.report.as_ref()?.points.clone(),
    })
}

/// Shared verdict logic; `confirm` re-evaluates a sample on the refined surface.
fn assemble(
    samples: Vec<(ContactElement, Outcome)>,
    distance: Option<Histogram>,
    expected: usize,
    opts: &TautOptions,
    base_tolerance: f64,
    confirm: impl Fn(usize, &ContactElement) -> Result<(usize, Outcome)>,
    track_incidence: bool,
) -> Result<TautVerdict> {
    let hist = Histogram::from_outcomes(samples.iter().map(|(_, o)| o));
    let requested = samples.len();
    let records: Vec<SampleRecord> = samples.iter().enumerate().map(|(i, (c, o))| record(i, c, o)).collect();
    let over: Vec<usize> = samples
        .iter()
        .enumerate()
        .filter(|(_, (_, o))| o.rejection.is_none() && o.count > expected)
        .map(|(i, _)| i)
        .collect();
    let under = samples.iter().any(|(_, o)| o.rejection.is_none() && o.count < expected);
    let too_many_rejected = requested == 0 || hist.rejected as f64 > opts.max_rejection_rate * requested as f64;
    let mut confirmations = Vec::new();
    let verdict = if too_many_rejected || under {
        Verdict::Inconclusive
    } else if over.is_empty() {
        Verdict::Taut
    } else if !opts.confirm_with_refinement {
        Verdict::NotTaut
    } else {
        let mut found = false;
        for &i in &over {
            let (refined_vertices, o) = confirm(i, &samples[i].0)?;
            let confirmed = o.rejection.is_none() && o.count > expected;
            confirmations.push(Confirmation {
                sample: i,
                coarse_count: samples[i].1.count,
                refined_vertices,
                refined_count: o.rejection.is_none().then_some(o.count),
                refined_rejection: o.rejection,
                confirmed,
            });
            if confirmed {
                found = true;
                break;
            }
        }
        if found {
            Verdict::NotTaut
        } else {
            Verdict::Inconclusive
        }
    };
    let example_index = match verdict {
        Verdict::NotTaut => confirmations.last().map(|c| c.sample),
        _ => samples.iter().position(|(_, o)| o.rejection.is_none()),
    };
    let example = example_index.and_then(|i| snapshot(i, "pencil_radius", &samples[i].1));
    let max_incidence_ratio = track_incidence.then(|| {
        samples
            .iter()
            .filter(|(_, o)| o.rejection.is_none())
            .map(|(_, o)| o.incidence)
            .fold(0.0, f64::max)
    });
    Ok(TautVerdict {
        samples_requested: requested,
        samples_used: hist.used,
        samples_rejected: hist.rejected,
        counts_histogram: hist.counts,
        rejections: hist.rejections,
        expected,
        verdict,
        seed: opts.seed,
        base_tolerance,
        distance,
        samples: records,
        confirmations,
        example,
        max_incidence_ratio,
    })
}

/// Tautness by critical-point counts of random pencil radius functions.
///
/// Sample `i` draws its contact element from the stream `(seed, i)`, so
/// results do not depend on scheduling.
pub fn taut_check(s: &EmbeddedSurface, opts: &TautOptions) -> Result<TautVerdict> {
    let base_tolerance = opts.base_tolerance.unwrap_or_else(|| default_base_tolerance(s));
    let n = s.ambient_n();
    let draws: Vec<(ContactElement, DVector<f64>)> = (0..opts.num_samples)
        .map(|i| {
            let mut rng = sample_rng(opts.seed, i as u64);
            let c = random_contact_element(&mut rng, n)?;
            let p = unit_vector(&mut rng, n + 1);
            Ok((c, p))
        })
        .collect::<Result<_>>()?;
    let outcomes: Vec<(Outcome, Option<Outcome>)> = draws
        .par_iter()
        .map(|(c, p)| {
            let o = pencil_outcome(s, c, opts, base_tolerance, None);
            let d = opts.distance_check.then(|| distance_outcome(s, p, opts, base_tolerance));
            (o, d)
        })
        .collect();
    let distance = opts
        .distance_check
        .then(|| Histogram::from_outcomes(outcomes.iter().filter_map(|(_, d)| d.as_ref())));
    let samples: Vec<(ContactElement, Outcome)> =
        draws.into_iter().zip(outcomes).map(|((c, _), (o, _))| (c, o)).collect();
    let refined = std::cell::OnceCell::new();
    let confirm = |_: usize, c: &ContactElement| -> Result<(usize, Outcome)> {
        let r: &EmbeddedSurface = match refined.get() {
            Some(r) => r,
            None => {
                let built = s.refine()?;
                refined.get_or_init(|| built)
            }
        };
        let tol = opts.base_tolerance.unwrap_or_else(|| default_base_tolerance(r));
        Ok((r.num_vertices(), pencil_outcome(r, c, opts, tol, None)))
    };
    assemble(samples, distance, s.betti_sum(), opts, base_tolerance, confirm, false)
}

/// How random lines on the quadric are drawn.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LineSampling {
    /// `contact_to_line` of a uniform contact element.
    #[default]
    Contact,
    /// The same, pushed through an independent random Lie sphere transformation.
    Generic { sampler: TransformSampler },
}

/// How the sampled line relates to the transformation under test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transport {
    /// The line tested against `T(λ)` is `T(ℓ)`, so counts match the
    /// untransformed run sample for sample.
    #[default]
    Consistent,
    /// The sampled line is tested against `T(λ)` directly.
    Independent,
}

/// Lie-tautness of `T(λ)`: for random lines `ℓ`, counts frames `(x, N)`
/// whose transformed line meets `ℓ`, selecting the one sheet in oriented
/// contact at each tangency. Expected count `β(B; Z_2)/2`.
pub fn lie_taut_check(
    lift: &LegendreLift<'_>,
    t: Option<&LieTransformation>,
    opts: &TautOptions,
    sampling: &LineSampling,
    transport: Transport,
) -> Result<TautVerdict> {
    let s = lift.surface();
    let n = s.ambient_n();
    let expected = if s.codim() == 1 {
        lift.bundle_betti_sum()? / 2
    } else {
        s.betti_sum()
    };
    let identity = LieTransformation::identity(n);
    let t = t.unwrap_or(&identity);
    if t.ambient_n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.ambient_n(),
        });
    }
    let t_inv = t.inverse();
    let lifted = lift.transformed_lines(t)?;
    let base_tolerance = opts.base_tolerance.unwrap_or_else(|| default_base_tolerance(s));
    let draws: Vec<(ContactElement, crate::quadric::QuadricLine)> = (0..opts.num_samples)
        .map(|i| {
            let mut rng = sample_rng(opts.seed, i as u64);
            let c = random_contact_element(&mut rng, n)?;
            let mut line = contact_to_line(&c);
            if let LineSampling::Generic { sampler } = sampling {
                let g = random_lie_transformation(&mut rng, n, sampler);
                line = apply_line(&g, &line)?;
            }
            let target = match transport {
                Transport::Consistent => apply_line(t, &line)?,
                Transport::Independent => line,
            };
            let pulled = apply_line(&t_inv, &target)?;
            Ok((line_to_contact(&pulled)?, target))
        })
        .collect::<Result<_>>()?;
    let samples: Vec<(ContactElement, Outcome)> = draws
        .par_iter()
        .map(|(c, target)| {
            let o = pencil_outcome(s, c, opts, base_tolerance, Some((lift, &lifted, target)));
            (c.clone(), o)
        })
        .collect();
    let draws_ref = &draws;
    let refined = std::cell::OnceCell::new();
    let confirm = |i: usize, c: &ContactElement| -> Result<(usize, Outcome)> {
        let r: &EmbeddedSurface = match refined.get() {
            Some(r) => r,
            None => {
                let built = s.refine()?;
                refined.get_or_init(|| built)
            }
        };
        let fibers = if s.codim() == 1 {
            2
        } else {
            lift.frames().len() / s.num_vertices()
        };
        let rl = LegendreLift::of_surface(r, fibers)?;
        let rlines = rl.transformed_lines(t)?;
        let tol = opts.base_tolerance.unwrap_or_else(|| default_base_tolerance(r));
        let o = pencil_outcome(r, c, opts, tol, Some((&rl, &rlines, &draws_ref[i].1)));
        Ok((r.num_vertices(), o))
    };
    assemble(samples, None, expected, opts, base_tolerance, confirm, true)
}

/// One field of the Kuiper comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KuiperSample {
    pub index: usize,
    pub count: usize,
    pub injective: bool,
    pub first_failure: Option<KuiperFailure>,
    /// `injective == (count == β)`.
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KuiperReport {
    pub betti_sum: usize,
    pub samples_requested: usize,
    pub samples: Vec<KuiperSample>,
    pub rejections: BTreeMap<Rejection, usize>,
    pub agreement: usize,
    pub seed: u64,
}

impl KuiperReport {
    pub fn all_agree(&self) -> bool {
        self.agreement == self.samples.len()
    }
}

/// On random nondegenerate pencil fields, compares the Kuiper scan with
/// `μ(f) = β(V; Z_2)`.
pub fn kuiper_check(s: &EmbeddedSurface, opts: &TautOptions) -> Result<KuiperReport> {
    let base_tolerance = opts.base_tolerance.unwrap_or_else(|| default_base_tolerance(s));
    let n = s.ambient_n();
    let contacts: Vec<ContactElement> = (0..opts.num_samples)
        .map(|i| random_contact_element(&mut sample_rng(opts.seed, i as u64), n))
        .collect::<Result<_>>()?;
    let results: Vec<(Outcome, Option<Result<crate::homology::KuiperScan>>)> = contacts
        .par_iter()
        .map(|c| {
            let o = pencil_outcome(s, c, opts, base_tolerance, None);
            let scan = o.rejection.is_none().then(|| kuiper_scan(s.complex(), &o.values));
            (o, scan)
        })
        .collect();
    let mut samples = Vec::new();
    let mut rejections = BTreeMap::new();
    for (index, (o, scan)) in results.into_iter().enumerate() {
        match (o.rejection, scan) {
            (Some(r), _) => *rejections.entry(r).or_default() += 1,
            (None, Some(scan)) => {
                let scan = scan?;
                samples.push(KuiperSample {
                    index,
                    count: o.count,
                    injective: scan.injective,
                    first_failure: scan.first_failure,
                    agrees: scan.injective == (o.count == s.betti_sum()),
                });
            }
            (None, None) => unreachable!("kept samples are scanned"),
        }
    }
    let agreement = samples.iter().filter(|k| k.agrees).count();
    Ok(KuiperReport {
        betti_sum: s.betti_sum(),
        samples_requested: opts.num_samples,
        samples,
        rejections,
        agreement,
        seed: opts.seed,
    })
}

/// PL type against Hessian index at one critical vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexComparison {
    pub vertex: usize,
    pub pl: CriticalKind,
    pub multiplicity: usize,
    pub hessian_index: Option<usize>,
    pub degenerate: bool,
    pub residual: f64,
}

impl IndexComparison {
    pub fn matches(&self) -> bool {
        self.hessian_index == Some(self.pl.index())
    }
}

/// Analytic Hessian index at each PL critical vertex of the pencil field of
/// `c`. `tangency_tolerance` is handed to [`hessian_analytic`].
pub fn index_agreement(
    s: &EmbeddedSurface,
    c: &ContactElement,
    tangency_tolerance: f64,
) -> Result<Vec<IndexComparison>> {
    let field = build_field(s, FieldKind::PencilRadius(c.clone()), tol::BASE_POINT)?;
    let report = classify_vertices(s, &field.values, tol::FLAT)?;
    report
        .points
        .iter()
        .map(|cp| {
            let tan = tangency(s, cp.vertex, c)?;
            let frame = NormalFrame {
                base_index: cp.vertex,
                point: s.vertex(cp.vertex).clone(),
                normal: tan.normal.clone(),
                sheet: 0,
            };
            let sd = shape_operator(s, &frame)?;
            let h = hessian_analytic(&sd, c, tangency_tolerance).ok();
            Ok(IndexComparison {
                vertex: cp.vertex,
                pl: cp.kind,
                multiplicity: cp.multiplicity,
                hessian_index: h.as_ref().map(|h| h.index),
                degenerate: h.as_ref().is_none_or(|h| h.degenerate),
                residual: tan.residual,
            })
        })
        .collect()
}
