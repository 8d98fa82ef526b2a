//! Command-line surface: configuration, table files, comparison reports and
//! the self-test registry.
//!
//! Numeric tables are CSV with every float written to 17 significant digits,
//! so a given configuration always produces byte-identical output and every
//! table reads back to the same `f64` values. Reports are JSON tagged with
//! `schema: "oscspec/1"`.

mod config;
mod report;
pub mod selftest;
pub mod tables;

pub use config::{Command, ConfigLayer, Format, NRange, RunConfig};
pub use report::{compare, ComparisonReport, ComparisonRow, Criteria, Provenance};

use crate::asymptotics::{self, AsymptoticError};
use crate::potential::{Potential, PotentialError};
use crate::quasiclassical_map::{build_contour, MapError};
use crate::reference_solver::{eigenvalues, fdiff_eigenvalues, EigenTable, GalerkinControls, Solver, SolverError};
use crate::wronskian_engine::{self, eigen_roots, OdeSettings, Variant, WronskianError, WronskianSample};
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Report and error schema tag.
pub const SCHEMA: &str = "oscspec/1";
/// Tool version recorded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Wronskian(#[from] WronskianError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Asymptotic(#[from] AsymptoticError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed table: {0}")]
    Table(String),
}

impl CliError {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Potential(_) => "potential",
            CliError::Solver(_) => "solver",
            CliError::Wronskian(_) => "wronskian",
            CliError::Map(_) => "map",
            CliError::Asymptotic(_) => "asymptotics",
            CliError::Io { .. } => "io",
            CliError::Table(_) => "table",
        }
    }

    /// Error document written to stderr by the binary.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: &'a str,
            error: Body<'a>,
        }
        let doc = Doc {
            schema: SCHEMA,
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
            },
        };
        serde_json::to_string(&doc).expect("error document serializes")
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// False when a comparison or self-test failed; the binary exits with 1.
    pub success: bool,
    /// Files written, in order.
    pub artifacts: Vec<PathBuf>,
}

/// Executes one command and writes its artifacts.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let q = Potential::parse_spec(&config.potential)?;
    let mut outcome = RunOutcome {
        success: true,
        artifacts: Vec::new(),
    };
    match config.command {
        Command::Eigs => {
            let table = eigen_table(config, &q)?;
            let body = match config.format {
                Format::Csv => tables::eigen_csv(&table.entries)?,
                Format::Json => json(&table)?,
            };
            emit(config.output.as_deref(), &body, &mut outcome)?;
        }
        Command::Asym => {
            let records = asymptotic_records(config, &q)?;
            let body = match config.format {
                Format::Csv => tables::asymptotic_csv(&records)?,
                Format::Json => json(&records)?,
            };
            emit(config.output.as_deref(), &body, &mut outcome)?;
        }
        Command::Compare => {
            let reference = match &config.reference {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                    EigenTable {
                        entries: tables::read_eigen_csv(&text)?,
                        diagnostics: vec![format!("reference read from {}", path.display())],
                    }
                }
                None => eigen_table(config, &q)?,
            };
            let report = compare(config, &q, &reference)?;
            outcome.success = report.pass;
            emit(config.output.as_deref(), &json(&report)?, &mut outcome)?;
            if let Some(path) = &config.output {
                let csv_path = path.with_extension("csv");
                emit(Some(&csv_path), &tables::comparison_csv(&report.rows)?, &mut outcome)?;
            }
        }
        Command::Wronskian => {
            let samples = wronskian_samples(config, &q)?;
            let body = match config.format {
                Format::Csv => tables::wronskian_csv(&samples)?,
                Format::Json => json(&samples)?,
            };
            emit(config.output.as_deref(), &body, &mut outcome)?;
        }
        Command::Contour => {
            let lambda = Complex64::new(config.lambda_re, config.lambda_im);
            let x_max = match config.x_max {
                Some(x) => x,
                None => crate::quasiclassical_map::x_star(lambda)? + 10.0,
            };
            let contour = build_contour(lambda, config.contour_points, x_max)?;
            let rows = tables::contour_rows(&contour);
            let body = match config.format {
                Format::Csv => tables::contour_csv(&rows)?,
                Format::Json => json(&rows)?,
            };
            emit(config.output.as_deref(), &body, &mut outcome)?;
        }
        Command::Selftest => {
            let results = selftest::run_all(config.seed);
            let body = match config.format {
                Format::Csv => selftest::render(&results),
                Format::Json => json(&results)?,
            };
            outcome.success = results.iter().all(|r| r.pass);
            emit(config.output.as_deref(), &body, &mut outcome)?;
        }
    }
    Ok(outcome)
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Table(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(path: Option<&Path>, body: &str, outcome: &mut RunOutcome) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| CliError::io(p, e))?;
            outcome.artifacts.push(p.to_path_buf());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(())
}

/// Eigenvalues for `config.n_range` from the configured solver.
pub fn eigen_table(config: &RunConfig, q: &Potential) -> Result<EigenTable, CliError> {
    let NRange { lo, hi } = config.n_range;
    let mut table = match config.solver {
        Solver::Galerkin => eigenvalues(
            q,
            hi as usize,
            GalerkinControls {
                basis: config.basis,
                tol: config.tol,
            },
        )?,
        Solver::Fdiff => {
            let l = config
                .x_max
                .unwrap_or_else(|| (2.0 * (2.0 * hi as f64 + 1.0)).sqrt() + 10.0);
            fdiff_eigenvalues(q, l, config.step.min(0.05), hi as usize)?
        }
        Solver::WronskianOde => eigen_roots(q, lo..=hi, Variant::Ode, ode_settings(config))?,
        Solver::WronskianAsym => eigen_roots(q, lo..=hi, Variant::Asym, ode_settings(config))?,
    };
    table.entries.retain(|e| (lo..=hi).contains(&e.n));
    Ok(table)
}

fn ode_settings(config: &RunConfig) -> OdeSettings {
    OdeSettings {
        margin: config.margin,
        step: config.step,
    }
}

fn asymptotic_records(config: &RunConfig, q: &Potential) -> Result<Vec<asymptotics::AsymptoticRecord>, CliError> {
    let NRange { lo, hi } = config.n_range;
    (lo..=hi)
        .map(|n| asymptotics::record(n, q, config.mu1_variant).map_err(CliError::from))
        .collect()
}

fn wronskian_samples(config: &RunConfig, q: &Potential) -> Result<Vec<WronskianSample>, CliError> {
    let count = config.lambda_steps;
    (0..count)
        .map(|i| {
            let l = if count == 1 {
                config.lambda_min
            } else {
                config.lambda_min + (config.lambda_max - config.lambda_min) * i as f64 / (count - 1) as f64
            };
            let s = match config.variant {
                Variant::Asym => wronskian_engine::w_asym(l, q)?,
                Variant::Ode => {
                    let x_max = config.x_max.unwrap_or(l.max(0.0).sqrt() + config.margin);
                    wronskian_engine::w_ode(l, q, x_max, config.step)?
                }
                Variant::Unperturbed => wronskian_engine::w_unperturbed(l),
            };
            Ok(s)
        })
        .collect()
}
