mod config;
mod error;
mod plot;
mod run;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lietaut::legendre::{save_surface, CatalogSurface};
use lietaut::transform::LieTransformation;

use config::{ambient_from_len, read_matrix, CheckKind, ExperimentConfig, LineMode, TransformSpec, TransportMode};
use error::CliError;
use plot::PlotData;

const THREADS_ENV: &str = "LIE_TAUT_THREADS";

#[derive(Parser)]
#[command(name = "lietaut", version, about = "Taut and Lie-taut checks for triangulated surfaces of spheres")]
struct Cli {
    /// Worker threads (falls back to LIE_TAUT_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Check(CheckArgs),
    /// Write a catalog surface in the mesh format.
    GenSurface {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = config::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Extract tab-separated plot data from a report.
    EmitPlot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        what: PlotData,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check that a matrix is a Lie sphere transformation.
    ValidateTransform {
        /// Transformation spec, e.g. `parallel:0.3` or `file:m.json`.
        #[arg(long, conflicts_with = "matrix")]
        transform: Option<String>,
        /// Row-major matrix file (JSON array or whitespace-separated numbers).
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Ambient dimension `n` of `S^n` for specs.
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    kind: CheckKind,
    /// Catalog surface, e.g. `clifford-torus` or `bumpy-torus:0.3`.
    #[arg(long)]
    surface: Option<String>,
    /// Mesh file instead of a catalog surface.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Declared Z_2 Betti sum of the mesh.
    #[arg(long)]
    betti: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    transform: Option<String>,
    #[arg(long, value_enum)]
    lines: Option<LineMode>,
    #[arg(long, value_enum)]
    transport: Option<TransportMode>,
    #[arg(long)]
    fiber_resolution: Option<usize>,
    #[arg(long)]
    base_tolerance: Option<f64>,
    #[arg(long)]
    curvature_tolerance: Option<f64>,
    #[arg(long)]
    flat_tolerance: Option<f64>,
    #[arg(long)]
    max_rejection_rate: Option<f64>,
    /// Skip re-evaluation of over-count samples on the refined surface.
    #[arg(long)]
    no_refine: bool,
    /// Skip the spherical distance histogram.
    #[arg(long)]
    no_distance: bool,
    #[arg(long)]
    fd_step: Option<f64>,
    /// Report path; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// TOML or JSON file whose settings override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CheckArgs {
    fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let mut c = ExperimentConfig::new(self.kind);
        c.surface = self.surface;
        c.mesh = self.mesh;
        c.betti = self.betti;
        c.seed = self.seed;
        c.base_tolerance = self.base_tolerance;
        c.output = self.output;
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { c.$f = v; })* };
        }
        set!(resolution, samples, transform, lines, transport, fiber_resolution, curvature_tolerance, flat_tolerance, max_rejection_rate, fd_step);
        c.confirm_with_refinement = !self.no_refine;
        c.distance_check = !self.no_distance;
        match &self.config {
            Some(path) => c.overridden_by_file(path),
            None => Ok(c),
        }
    }
}

fn init_threads(flag: Option<usize>) -> Result<(), CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("{THREADS_ENV}: cannot parse {v:?}")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("threads: must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Report(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct TransformCheck {
    valid: bool,
    ambient_n: usize,
    residual: f64,
    tolerance: f64,
    mobius: Option<bool>,
    matrix_row_major: Vec<f64>,
}

fn validate_transform(transform: Option<String>, matrix: Option<PathBuf>, dim: usize) -> Result<i32, CliError> {
    let (ambient_n, data) = match (transform, matrix) {
        (_, Some(path)) => {
            let data = read_matrix(&path)?;
            let n = ambient_from_len(data.len())
                .ok_or_else(|| CliError::Config(format!("matrix: {} entries is not a square of side >= 4", data.len())))?;
            (n, data)
        }
        (Some(spec), None) => {
            let spec = TransformSpec::from_str(&spec).map_err(|e| CliError::Config(format!("transform: {e}")))?;
            let t = spec.build(dim)?;
            (dim, t.to_row_major())
        }
        (None, None) => return Err(CliError::Config("transform: give --transform or --matrix".into())),
    };
    let (validated, residual) = match LieTransformation::from_row_major(ambient_n, &data) {
        Ok(t) => {
            let r = t.residual();
            (Some(t), r)
        }
        Err(lietaut::Error::NotLieOrthogonal { residual }) => (None, residual),
        Err(e) => return Err(e.into()),
    };
    let report = TransformCheck {
        valid: validated.is_some(),
        ambient_n,
        residual,
        tolerance: config::GROUP_TOLERANCE,
        mobius: validated.as_ref().map(LieTransformation::is_mobius),
        matrix_row_major: data,
    };
    write_output(None, &json(&report)?)?;
    Ok(if report.valid { 0 } else { 1 })
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    init_threads(cli.threads)?;
    match cli.command {
        Command::Check(args) => {
            let cfg = args.into_config()?;
            let report = run::run(&cfg)?;
            write_output(cfg.output.as_deref(), &json(&report)?)?;
            eprintln!("{}: {:?}", report.surface.name, report.status);
            Ok(report.status.exit_code())
        }
        Command::GenSurface {
            surface,
            resolution,
            output,
        } => {
            let spec = CatalogSurface::from_str(&surface).map_err(|e| CliError::Config(format!("surface: {e}")))?;
            let s = spec.build(resolution)?;
            save_surface(&s, &output)?;
            eprintln!(
                "{}: {} vertices, {} triangles, Betti sum {}",
                output.display(),
                s.num_vertices(),
                s.triangles().len(),
                s.betti_sum()
            );
            Ok(0)
        }
        Command::EmitPlot { report, what, output } => {
            let text = std::fs::read_to_string(&report)?;
            let parsed: run::Report = serde_json::from_str(&text)
                .map_err(|e| CliError::Report(format!("{}: {e}", report.display())))?;
            if parsed.schema_version != run::SCHEMA_VERSION {
                return Err(CliError::Report(format!("unsupported schema version {}", parsed.schema_version)));
            }
            write_output(output.as_deref(), &plot::emit(&parsed, what)?)?;
            Ok(0)
        }
        Command::ValidateTransform { transform, matrix, dim } => validate_transform(transform, matrix, dim),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
