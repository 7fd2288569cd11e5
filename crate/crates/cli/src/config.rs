use clap::{Parser, ValueEnum};
use magsteklov::Tolerances;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Spectral sweeps, crossing points, model constants and invariant checks
/// for the magnetic Dirichlet-to-Neumann operator on the unit disk.
#[derive(Debug, Parser)]
#[command(name = "magsteklov", version)]
pub struct Args {
    /// One of: curves, envelope, intersections, asymptotics, constants, halfplane, degennes, verify.
    pub command: String,

    /// Smallest mode index.
    #[arg(long)]
    pub n_min: Option<u32>,

    /// Largest mode index.
    #[arg(long)]
    pub n_max: Option<u32>,

    /// Lower end of the sweep (field strength, or the argument for halfplane and degennes).
    #[arg(long, allow_hyphen_values = true)]
    pub b_min: Option<f64>,

    /// Upper end of the sweep.
    #[arg(long, allow_hyphen_values = true)]
    pub b_max: Option<f64>,

    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub steps: Option<usize>,

    /// Output file; a `<out>.meta.json` sidecar is written next to it. Stdout when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Relative tolerance for roots and quadrature.
    #[arg(long)]
    pub rel_tol: Option<f64>,

    /// Restrict `verify` to one suite.
    #[arg(long)]
    pub only: Option<String>,
}

/// Per-command defaults for options the user did not pass.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub n: (u32, u32),
    pub b: (f64, f64),
    pub steps: usize,
    pub format: Format,
}

impl Default for Defaults {
    fn default() -> Self {
        Self { n: (0, 5), b: (0.0, 10.0), steps: 101, format: Format::Csv }
    }
}

/// Validated settings for one run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n_min: u32,
    pub n_max: u32,
    pub b_min: f64,
    pub b_max: f64,
    pub steps: usize,
    pub format: Format,
    pub rel_tol: f64,
    pub only: Option<String>,
    #[serde(skip)]
    pub tol: Tolerances,
}

impl RunConfig {
    pub fn resolve(args: &Args, defaults: Defaults) -> CliResult<Self> {
        let n_min = args.n_min.unwrap_or(defaults.n.0);
        let n_max = args.n_max.unwrap_or(defaults.n.1);
        let b_min = args.b_min.unwrap_or(defaults.b.0);
        let b_max = args.b_max.unwrap_or(defaults.b.1);
        let steps = args.steps.unwrap_or(defaults.steps);
        if n_min > n_max {
            return Err(CliError::Config(format!("n_min = {n_min} exceeds n_max = {n_max}")));
        }
        if !(b_min.is_finite() && b_max.is_finite()) || b_min > b_max {
            return Err(CliError::Config(format!("need finite b_min <= b_max, got {b_min} and {b_max}")));
        }
        if steps < 2 {
            return Err(CliError::Config(format!("steps = {steps} must be at least 2")));
        }
        let base = Tolerances::default();
        let tol = match args.rel_tol {
            Some(r) => base.with_rel_tol(r),
            None => base,
        };
        tol.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if args.only.is_some() && args.command != "verify" {
            return Err(CliError::Config("--only applies to the verify command".into()));
        }
        Ok(Self {
            command: args.command.clone(),
            n_min,
            n_max,
            b_min,
            b_max,
            steps,
            format: args.format.unwrap_or(defaults.format),
            rel_tol: tol.rel_tol,
            only: args.only.clone(),
            tol,
        })
    }

    /// `steps` equispaced points on `[b_min, b_max]`; the last is exactly `b_max`.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == last { self.b_max } else { self.b_min + (self.b_max - self.b_min) * i as f64 / last as f64 })
            .collect()
    }

    pub fn uses_default_tol(&self) -> bool {
        self.tol == Tolerances::default()
    }
}
