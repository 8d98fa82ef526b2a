use super::CliError;
use crate::asymptotics::Mu1Variant;
use crate::reference_solver::Solver;
use crate::wronskian_engine::Variant;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Reference eigenvalues (`n,mu,err_est,solver`).
    Eigs,
    /// First-order asymptotics (`n,mu0,mu1,variant`).
    Asym,
    /// Reference vs asymptotics report (JSON + CSV).
    Compare,
    /// Normalized Wronskian over a lambda grid (`lambda,w_normalized,variant`).
    Wronskian,
    /// Sampled contour of the Langer map.
    Contour,
    /// Runs every registered invariant check.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Inclusive index range written `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NRange {
    pub lo: u64,
    pub hi: u64,
}

impl std::str::FromStr for NRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad index '{t}' in range '{s}': {e}"));
        let (lo, hi) = match s.split_once(':') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range '{s}'"));
        }
        Ok(NRange { lo, hi })
    }
}

impl TryFrom<String> for NRange {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<NRange> for String {
    fn from(r: NRange) -> String {
        format!("{}:{}", r.lo, r.hi)
    }
}

/// One source of settings: the JSON config file or the command-line flags.
/// Unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Potential: const:<c>, cos:<amp>:<freq>, gauss:<a>:<x0>:<s> or trig:<file.json>.
    #[arg(long)]
    pub potential: Option<String>,
    /// Index range LO:HI (inclusive).
    #[arg(long = "n", value_name = "LO:HI")]
    pub n_range: Option<NRange>,
    /// Galerkin basis size (default 4 n_max + 200).
    #[arg(long)]
    pub basis: Option<usize>,
    /// Accepted Galerkin error estimate.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Truncation point: finite-difference half-width, ODE start or contour end.
    #[arg(long)]
    pub x_max: Option<f64>,
    /// ODE start offset beyond sqrt(lambda) when --x-max is not given.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Integration or grid step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Approximate number of contour nodes.
    #[arg(long)]
    pub contour_points: Option<usize>,
    #[arg(long = "lmin")]
    pub lambda_min: Option<f64>,
    #[arg(long = "lmax")]
    pub lambda_max: Option<f64>,
    /// Number of lambda grid points (endpoints included).
    #[arg(long = "lsteps")]
    pub lambda_steps: Option<usize>,
    /// Real part of lambda for `contour`.
    #[arg(long)]
    pub lambda_re: Option<f64>,
    /// Imaginary part of lambda for `contour`.
    #[arg(long)]
    pub lambda_im: Option<f64>,
    /// galerkin, fdiff, wronskian_ode or wronskian_asym.
    #[arg(long)]
    pub solver: Option<Solver>,
    /// Wronskian variant: asym, ode or unperturbed.
    #[arg(long)]
    pub variant: Option<Variant>,
    /// First-order variant: theta, bessel, sigma or decay_limit.
    #[arg(long)]
    pub mu1_variant: Option<Mu1Variant>,
    /// Eigenvalue CSV to use as the `compare` reference instead of solving.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized self-test samples.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigLayer {
    /// Reads a JSON config file; unknown keys are rejected.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `self` over `base`: fields set here win.
    pub fn over(self, base: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            command: self.command.or(base.command),
            potential: self.potential.or(base.potential),
            n_range: self.n_range.or(base.n_range),
            basis: self.basis.or(base.basis),
            tol: self.tol.or(base.tol),
            x_max: self.x_max.or(base.x_max),
            margin: self.margin.or(base.margin),
            step: self.step.or(base.step),
            contour_points: self.contour_points.or(base.contour_points),
            lambda_min: self.lambda_min.or(base.lambda_min),
            lambda_max: self.lambda_max.or(base.lambda_max),
            lambda_steps: self.lambda_steps.or(base.lambda_steps),
            lambda_re: self.lambda_re.or(base.lambda_re),
            lambda_im: self.lambda_im.or(base.lambda_im),
            solver: self.solver.or(base.solver),
            variant: self.variant.or(base.variant),
            mu1_variant: self.mu1_variant.or(base.mu1_variant),
            reference: self.reference.or(base.reference),
            output: self.output.or(base.output),
            format: self.format.or(base.format),
            seed: self.seed.or(base.seed),
        }
    }
}

/// Fully resolved and validated settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub potential: String,
    pub n_range: NRange,
    pub basis: Option<usize>,
    pub tol: f64,
    pub x_max: Option<f64>,
    pub margin: f64,
    pub step: f64,
    pub contour_points: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_steps: usize,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub solver: Solver,
    pub variant: Variant,
    pub mu1_variant: Mu1Variant,
    pub reference: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    /// Fills defaults and checks every control.
    pub fn resolve(layer: ConfigLayer) -> Result<Self, CliError> {
        let command = layer
            .command
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        let potential = match (layer.potential, command) {
            (Some(p), _) => p,
            (None, Command::Contour | Command::Selftest) => "const:0".into(),
            (None, _) => return Err(CliError::Config(format!("command {command:?} needs --potential"))),
        };
        let cfg = RunConfig {
            command,
            potential,
            n_range: layer.n_range.unwrap_or(NRange { lo: 0, hi: 10 }),
            basis: layer.basis,
            tol: layer.tol.unwrap_or(1e-8),
            x_max: layer.x_max,
            margin: layer.margin.unwrap_or(10.0),
            step: layer.step.unwrap_or(0.01),
            contour_points: layer.contour_points.unwrap_or(2048),
            lambda_min: layer.lambda_min.unwrap_or(0.0),
            lambda_max: layer.lambda_max.unwrap_or(12.0),
            lambda_steps: layer.lambda_steps.unwrap_or(121),
            lambda_re: layer.lambda_re.unwrap_or(81.0),
            lambda_im: layer.lambda_im.unwrap_or(0.0),
            solver: layer.solver.unwrap_or(Solver::Galerkin),
            variant: layer.variant.unwrap_or(Variant::Asym),
            mu1_variant: layer.mu1_variant.unwrap_or(Mu1Variant::Theta),
            reference: layer.reference,
            output: layer.output,
            format: layer.format.unwrap_or(Format::Csv),
            seed: layer.seed.unwrap_or(2024),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("tol", self.tol)?;
        positive("margin", self.margin)?;
        positive("step", self.step)?;
        if let Some(x) = self.x_max {
            positive("x_max", x)?;
        }
        if self.basis == Some(0) {
            return Err(CliError::Config("basis must be positive".into()));
        }
        if self.lambda_steps == 0 || self.contour_points == 0 {
            return Err(CliError::Config("lambda_steps and contour_points must be positive".into()));
        }
        if !(self.lambda_min.is_finite() && self.lambda_max.is_finite() && self.lambda_min <= self.lambda_max) {
            return Err(CliError::Config(format!(
                "lambda grid [{}, {}] is empty",
                self.lambda_min, self.lambda_max
            )));
        }
        if !(self.lambda_re.is_finite() && self.lambda_im.is_finite()) {
            return Err(CliError::Config("lambda must be finite".into()));
        }
        Ok(())
    }
}
