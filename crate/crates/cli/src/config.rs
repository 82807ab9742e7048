use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use lietaut::legendre::{load_surface, CatalogSurface, EmbeddedSurface};
use lietaut::morse::{LineSampling, TautOptions, Transport};
use lietaut::rng::rng_from_seed;
use lietaut::tol;
use lietaut::transform::{
    parallel_transformation, random_lie_transformation, random_rotation_transformation, LieTransformation,
    TransformSampler,
};

use crate::error::CliError;

pub const DEFAULT_RESOLUTION: usize = 64;
pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_FIBER_RESOLUTION: usize = 16;
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Taut,
    LieTaut,
    Kuiper,
    Sard,
    Homology,
}

impl CheckKind {
    pub fn samples(self) -> bool {
        !matches!(self, CheckKind::Homology)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LineMode {
    #[default]
    Contact,
    Generic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TransportMode {
    #[default]
    Consistent,
    Independent,
}

/// Fully expanded experiment configuration, embedded verbatim in reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub check: CheckKind,
    pub surface: Option<String>,
    pub mesh: Option<PathBuf>,
    pub betti: Option<usize>,
    pub resolution: usize,
    pub samples: usize,
    pub seed: Option<u64>,
    pub transform: String,
    pub lines: LineMode,
    pub transport: TransportMode,
    pub fiber_resolution: usize,
    pub base_tolerance: Option<f64>,
    pub curvature_tolerance: f64,
    pub flat_tolerance: f64,
    pub max_rejection_rate: f64,
    pub confirm_with_refinement: bool,
    pub distance_check: bool,
    pub fd_step: f64,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(check: CheckKind) -> Self {
        let o = TautOptions::default();
        Self {
            check,
            surface: None,
            mesh: None,
            betti: None,
            resolution: DEFAULT_RESOLUTION,
            samples: DEFAULT_SAMPLES,
            seed: None,
            transform: "none".into(),
            lines: LineMode::Contact,
            transport: TransportMode::Consistent,
            fiber_resolution: DEFAULT_FIBER_RESOLUTION,
            base_tolerance: None,
            curvature_tolerance: o.curvature_tolerance,
            flat_tolerance: o.flat_tolerance,
            max_rejection_rate: o.max_rejection_rate,
            confirm_with_refinement: o.confirm_with_refinement,
            distance_check: o.distance_check,
            fd_step: DEFAULT_FD_STEP,
            output: None,
        }
    }

    /// Keys of a TOML or JSON file replace the corresponding values.
    pub fn overridden_by_file(self, path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let patch: Value = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            let table: toml::Table =
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            serde_json::to_value(table).map_err(|e| CliError::Config(e.to_string()))?
        };
        let Value::Object(patch) = patch else {
            return Err(CliError::Config(format!("{}: expected a table of settings", path.display())));
        };
        let mut base = serde_json::to_value(&self).map_err(|e| CliError::Config(e.to_string()))?;
        let obj = base.as_object_mut().expect("config serializes to an object");
        for (k, v) in patch {
            obj.insert(k.replace('-', "_"), v);
        }
        serde_json::from_value(base).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let field = |name: &str, msg: &str| Err(CliError::Config(format!("{name}: {msg}")));
        match (&self.surface, &self.mesh) {
            (None, None) => return field("surface", "either a catalog surface or a mesh path is required"),
            (Some(_), Some(_)) => return field("surface", "give a catalog surface or a mesh path, not both"),
            (None, Some(_)) if self.betti.is_none() => return field("betti", "a mesh needs its declared Betti sum"),
            _ => {}
        }
        if let Some(s) = &self.surface {
            CatalogSurface::from_str(s).map_err(|e| CliError::Config(format!("surface: {e}")))?;
        }
        if self.check.samples() && self.seed.is_none() {
            return field("seed", "sampling checks need an explicit seed");
        }
        if self.samples == 0 {
            return field("samples", "must be positive");
        }
        if self.fiber_resolution < 2 {
            return field("fiber_resolution", "must be at least 2");
        }
        for (name, v) in [
            ("curvature_tolerance", self.curvature_tolerance),
            ("flat_tolerance", self.flat_tolerance),
            ("fd_step", self.fd_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return field(name, "must be a positive number");
            }
        }
        if let Some(b) = self.base_tolerance {
            if !(b.is_finite() && b >= 0.0) {
                return field("base_tolerance", "must be a nonnegative number");
            }
        }
        if !(0.0..=1.0).contains(&self.max_rejection_rate) {
            return field("max_rejection_rate", "must lie in [0, 1]");
        }
        let spec = TransformSpec::from_str(&self.transform).map_err(|e| CliError::Config(format!("transform: {e}")))?;
        if spec != TransformSpec::Identity && self.check != CheckKind::LieTaut {
            return field("transform", "only the lie_taut check applies a transformation");
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn taut_options(&self) -> TautOptions {
        TautOptions {
            num_samples: self.samples,
            seed: self.seed(),
            base_tolerance: self.base_tolerance,
            curvature_tolerance: self.curvature_tolerance,
            flat_tolerance: self.flat_tolerance,
            max_rejection_rate: self.max_rejection_rate,
            confirm_with_refinement: self.confirm_with_refinement,
            distance_check: self.distance_check,
        }
    }

    pub fn transform_spec(&self) -> Result<TransformSpec, CliError> {
        TransformSpec::from_str(&self.transform).map_err(|e| CliError::Config(format!("transform: {e}")))
    }

    pub fn line_sampling(&self) -> Result<LineSampling, CliError> {
        Ok(match self.lines {
            LineMode::Contact => LineSampling::Contact,
            LineMode::Generic => LineSampling::Generic {
                sampler: match self.transform_spec()? {
                    TransformSpec::Random { sampler, .. } => sampler,
                    _ => TransformSampler::default(),
                },
            },
        })
    }

    pub fn transport(&self) -> Transport {
        match self.transport {
            TransportMode::Consistent => Transport::Consistent,
            TransportMode::Independent => Transport::Independent,
        }
    }

    pub fn load_surface(&self) -> Result<EmbeddedSurface, CliError> {
        match (&self.surface, &self.mesh) {
            (Some(spec), _) => {
                let spec = CatalogSurface::from_str(spec).map_err(|e| CliError::Config(format!("surface: {e}")))?;
                Ok(spec.build(self.resolution)?)
            }
            (None, Some(path)) => Ok(load_surface(path, self.betti.unwrap_or(0))?),
            (None, None) => Err(CliError::Config("surface: missing".into())),
        }
    }
}

/// `none | parallel:<t> | rotation:<seed> | random:<seed>[,<t_lo>,<t_hi>] | file:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum TransformSpec {
    Identity,
    Parallel(f64),
    Rotation(u64),
    Random { seed: u64, sampler: TransformSampler },
    File(PathBuf),
}

impl FromStr for TransformSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("cannot parse {t:?} as a number"));
        let seed = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("cannot parse {t:?} as a seed"));
        match kind {
            "none" | "identity" if arg.is_empty() => Ok(Self::Identity),
            "parallel" => Ok(Self::Parallel(num(arg)?)),
            "rotation" => Ok(Self::Rotation(seed(arg)?)),
            "random" => {
                let parts: Vec<&str> = arg.split(',').collect();
                let mut sampler = TransformSampler::default();
                match parts.as_slice() {
                    [_] => {}
                    [_, lo, hi] => sampler.t_range = (num(lo)?, num(hi)?),
                    _ => return Err("expected random:<seed> or random:<seed>,<t_lo>,<t_hi>".into()),
                }
                if !(sampler.t_range.0 <= sampler.t_range.1) {
                    return Err("empty t range".into());
                }
                Ok(Self::Random {
                    seed: seed(parts[0])?,
                    sampler,
                })
            }
            "file" if !arg.is_empty() => Ok(Self::File(PathBuf::from(arg))),
            _ => Err(format!("unknown transformation {s:?}")),
        }
    }
}

impl TransformSpec {
    pub fn build(&self, ambient_n: usize) -> Result<LieTransformation, CliError> {
        Ok(match self {
            Self::Identity => LieTransformation::identity(ambient_n),
            Self::Parallel(t) => parallel_transformation(*t, ambient_n),
            Self::Rotation(seed) => random_rotation_transformation(&mut rng_from_seed(*seed), ambient_n),
            Self::Random { seed, sampler } => random_lie_transformation(&mut rng_from_seed(*seed), ambient_n, sampler),
            Self::File(path) => {
                let data = read_matrix(path)?;
                LieTransformation::from_row_major(ambient_n, &data)?
            }
        })
    }
}

/// Row-major entries from a JSON array or whitespace-separated text.
pub fn read_matrix(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let parsed: Result<Vec<f64>, _> = if text.trim_start().starts_with('[') {
        let nested: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let flat: Vec<Value> = match nested {
            Value::Array(rows) if rows.iter().all(Value::is_array) => {
                rows.into_iter().flat_map(|r| r.as_array().cloned().unwrap_or_default()).collect()
            }
            Value::Array(v) => v,
            _ => Vec::new(),
        };
        flat.iter().map(|v| v.as_f64().ok_or(())).collect()
    } else {
        text.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| ())).collect()
    };
    parsed.map_err(|_| CliError::Config(format!("{}: matrix entries must be numbers", path.display())))
}

/// Side length `n + 3` of a square matrix with `len` entries.
pub fn ambient_from_len(len: usize) -> Option<usize> {
    let m = (len as f64).sqrt().round() as usize;
    (m * m == len && m >= 4).then(|| m - 3)
}

/// Lie-form residual threshold reported by `validate-transform`.
pub const GROUP_TOLERANCE: f64 = tol::GROUP;
