use super::{CliError, NRange, RunConfig, SCHEMA, VERSION};
use crate::asymptotics::{self, fit_decay_exponent, max_scaled, FitOutcome};
use crate::potential::Potential;
use crate::reference_solver::EigenTable;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: u64,
    pub mu_ref: f64,
    pub err_est: f64,
    pub mu0: f64,
    pub mu1: f64,
    /// `mu_ref - mu0 - mu1`, computed from the stored values.
    pub residual: f64,
}

/// Thresholds applied to the residual fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    /// Fitted `log|r_n|` vs `log n` slope must not exceed this.
    pub max_slope: f64,
    /// `max |r_n| n^{constant_exponent}` must not exceed this.
    pub max_constant: f64,
    pub constant_exponent: f64,
}

impl Default for Criteria {
    fn default() -> Self {
        Self {
            max_slope: -0.25,
            max_constant: 5.0,
            constant_exponent: 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    /// Messages from the reference solver, e.g. indices it could not resolve.
    pub reference_diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: String,
    pub potential: String,
    pub n_range: NRange,
    pub mu1_variant: String,
    pub rows: Vec<ComparisonRow>,
    /// Absent when every residual is exactly zero.
    pub fitted_slope: Option<f64>,
    pub fitted_constant: f64,
    /// Indices in the range without a reference value.
    pub missing: Vec<u64>,
    pub criteria: Criteria,
    pub pass: bool,
    pub provenance: Provenance,
}

/// Residuals `mu_ref - (2n+1) - mu^1` over the configured range and their fit.
pub fn compare(config: &RunConfig, q: &Potential, reference: &EigenTable) -> Result<ComparisonReport, CliError> {
    let NRange { lo, hi } = config.n_range;
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for n in lo..=hi {
        let Some(e) = reference.get(n) else {
            missing.push(n);
            continue;
        };
        let rec = asymptotics::record(n, q, config.mu1_variant)?;
        rows.push(ComparisonRow {
            n,
            mu_ref: e.mu,
            err_est: e.err_est,
            mu0: rec.mu0,
            mu1: rec.mu1,
            residual: e.mu - rec.mu0 - rec.mu1,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.residual)).collect();
    let fit = fit_decay_exponent(&pts)?;
    let criteria = Criteria::default();
    let fitted_constant = max_scaled(&pts, criteria.constant_exponent);
    let slope_ok = match fit {
        FitOutcome::Fitted { slope, .. } => slope <= criteria.max_slope,
        FitOutcome::ExactMatch { .. } => true,
    };
    Ok(ComparisonReport {
        schema: SCHEMA.into(),
        potential: config.potential.clone(),
        n_range: config.n_range,
        mu1_variant: config.mu1_variant.name().into(),
        rows,
        fitted_slope: fit.slope(),
        fitted_constant,
        pass: slope_ok && fitted_constant <= criteria.max_constant && missing.is_empty(),
        missing,
        criteria,
        provenance: Provenance {
            tool: "oscspec".into(),
            version: VERSION.into(),
            config: config.clone(),
            reference_diagnostics: reference.diagnostics.clone(),
        },
    })
}
