use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use lietaut::homology::kuiper_scan;
use lietaut::legendre::{EmbeddedSurface, LegendreLift};
use lietaut::morse::{
    build_field, kuiper_check, lie_taut_check, pl_critical_points, sard_check, taut_check, FieldKind,
    FieldSnapshot, Verdict,
};
use lietaut::rng::{rng_from_seed, unit_vector};

use crate::config::{CheckKind, ExperimentConfig};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Taut,
    NotTaut,
    Inconclusive,
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Taut | Status::Pass => 0,
            Status::NotTaut | Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Taut => Status::Taut,
            Verdict::NotTaut => Status::NotTaut,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub name: String,
    pub ambient_n: usize,
    pub vertices: usize,
    pub triangles: usize,
    pub betti_sum: usize,
    pub euler_characteristic: i64,
    pub max_edge_length: f64,
}

impl SurfaceSummary {
    fn of(s: &EmbeddedSurface) -> Self {
        Self {
            name: s.name().to_string(),
            ambient_n: s.ambient_n(),
            vertices: s.num_vertices(),
            triangles: s.triangles().len(),
            betti_sum: s.betti_sum(),
            euler_characteristic: s.euler_characteristic(),
            max_edge_length: s.max_edge_length(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformationRecord {
    pub spec: String,
    pub ambient_n: usize,
    pub matrix_row_major: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub surface: SurfaceSummary,
    pub transformation: Option<TransformationRecord>,
    pub status: Status,
    pub result: Value,
    /// Plot-ready field: the example pencil field or the height field.
    pub field: Option<FieldSnapshot>,
    pub wall_time_seconds: f64,
}

#[derive(Serialize)]
struct HomologyResult {
    betti_numbers: Vec<usize>,
    betti_sum: usize,
    euler_characteristic: i64,
    bundle_betti_sum: Option<usize>,
    height_direction: Vec<f64>,
    height_critical_points: usize,
    height_injective: bool,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Report(e.to_string()))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let s = cfg.load_surface()?;
    let opts = cfg.taut_options();
    let mut transformation = None;
    let mut field = None;
    let (status, result) = match cfg.check {
        CheckKind::Taut => {
            let v = taut_check(&s, &opts)?;
            field = v.example.clone();
            (v.verdict.into(), to_value(&v)?)
        }
        CheckKind::LieTaut => {
            let spec = cfg.transform_spec()?;
            let t = spec.build(s.ambient_n())?;
            transformation = Some(TransformationRecord {
                spec: cfg.transform.clone(),
                ambient_n: t.ambient_n(),
                matrix_row_major: t.to_row_major(),
                residual: t.residual(),
            });
            let lift = LegendreLift::of_surface(&s, cfg.fiber_resolution)?;
            let v = lie_taut_check(&lift, Some(&t), &opts, &cfg.line_sampling()?, cfg.transport())?;
            field = v.example.clone();
            (v.verdict.into(), to_value(&v)?)
        }
        CheckKind::Kuiper => {
            let k = kuiper_check(&s, &opts)?;
            let status = if k.samples.is_empty() {
                Status::Inconclusive
            } else if k.all_agree() {
                Status::Pass
            } else {
                Status::Fail
            };
            (status, to_value(&k)?)
        }
        CheckKind::Sard => {
            let r = sard_check(&s, cfg.samples, cfg.seed(), cfg.fd_step)?;
            (if r.pass { Status::Pass } else { Status::Fail }, to_value(&r)?)
        }
        CheckKind::Homology => {
            let betti = s.complex().betti_numbers();
            let bundle = if s.codim() == 1 {
                Some(LegendreLift::of_surface(&s, 2)?.bundle_betti_sum()?)
            } else {
                None
            };
            let dir = unit_vector(&mut rng_from_seed(cfg.seed()), s.ambient_n() + 1);
            let f = build_field(&s, FieldKind::Height(dir.clone()), 0.0)?;
            let report = pl_critical_points(&f)?;
            let scan = kuiper_scan(s.complex(), &f.values)?;
            field = Some(FieldSnapshot {
                sample: 0,
                kind: f.kind.label().to_string(),
                values: f.values.clone(),
                critical: report.points.clone(),
            });
            let ok = bundle.map_or(true, |b| b == 2 * s.betti_sum());
            let r = HomologyResult {
                betti_sum: betti.iter().sum(),
                betti_numbers: betti,
                euler_characteristic: s.euler_characteristic(),
                bundle_betti_sum: bundle,
                height_direction: dir.iter().copied().collect(),
                height_critical_points: report.total,
                height_injective: scan.injective,
            };
            (if ok { Status::Pass } else { Status::Fail }, to_value(&r)?)
        }
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        surface: SurfaceSummary::of(&s),
        transformation,
        status,
        result,
        field,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}
