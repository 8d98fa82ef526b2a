//! Registry of named invariant checks across all modules.

use super::tables;
use crate::asymptotics;
use crate::potential::{self, Potential};
use crate::quasiclassical_map;
use crate::reference_solver::{self, EigenEntry, Solver};
use crate::special_functions;
use crate::wronskian_engine::{self, Variant, WronskianSample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Check = fn(&mut ChaCha8Rng) -> Result<String, String>;

/// One registered property.
pub struct Invariant {
    pub module: &'static str,
    pub name: &'static str,
    pub check: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub module: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

fn done(r: Result<(), String>) -> Result<String, String> {
    r.map(|_| "ok".into())
}

fn worst(r: Result<f64, String>) -> Result<String, String> {
    r.map(|w| format!("worst {w:.2e}"))
}

/// Every check, in execution order.
pub fn registry() -> Vec<Invariant> {
    use asymptotics::checks as asy;
    use potential::checks as pot;
    use quasiclassical_map::checks as map;
    use reference_solver::checks as refs;
    use special_functions::checks as sf;
    use wronskian_engine::checks as wr;
    let inv = |module, name, check: Check| Invariant { module, name, check };
    vec![
        inv("potential", "q1_derivative_is_q", |r| worst(pot::q1_derivative(r))),
        inv("potential", "conjugate_atoms_evaluate_real", |r| done(pot::conjugate_atoms_real(r))),
        inv("potential", "b_norm_upper_bound", |r| done(pot::b_norm_bound(r))),
        inv("special_functions", "airy_connection_identity", |r| worst(sf::connection_identity(r))),
        inv("special_functions", "bi_from_ai_identity", |r| worst(sf::bi_identity(r))),
        inv("special_functions", "airy_wronskian", |r| worst(sf::wronskian(r))),
        inv("special_functions", "scaled_airy_envelopes", |_| {
            sf::envelope_bounds().map(|(c, cp)| format!("C = {c:.3}, C' = {cp:.3}"))
        }),
        inv("special_functions", "bessel_j0_ode", |_| worst(sf::bessel_ode())),
        inv("quasiclassical_map", "zeta_identity", |r| done(map::zeta_identity(r))),
        inv("quasiclassical_map", "xi_k_round_trip", |r| done(map::k_round_trip(r))),
        inv("quasiclassical_map", "monotone_modulus", |r| done(map::monotone_modulus(r))),
        inv("quasiclassical_map", "exponential_weight_monotone", |r| done(map::exponential_weight(r))),
        inv("quasiclassical_map", "sector_containment", |r| done(map::sector_containment(r))),
        inv("quasiclassical_map", "minimum_modulus", |r| done(map::minimum_modulus(r))),
        inv("quasiclassical_map", "xi_asymptotics", |_| done(map::xi_asymptotics())),
        inv("quasiclassical_map", "rotated_xi_decreasing", |_| done(map::rotated_xi_decreasing())),
        inv("quasiclassical_map", "t_star_bound", |_| done(map::t_star_bound())),
        inv("quasiclassical_map", "v0_envelope", |_| done(map::v0_envelope())),
        inv("reference_solver", "galerkin_error_monotone", |_| done(refs::monotone_error())),
        inv("reference_solver", "eigensolver_oracle_and_similarity", |r| worst(refs::eigensolver_oracle(r))),
        inv("reference_solver", "counting", |_| done(refs::counting(20, 60))),
        inv("reference_solver", "perturbation_bound", |_| done(refs::perturbation_bound())),
        inv("asymptotics", "theta_bessel_agreement", |r| worst(asy::variant_agreement(r, 50))),
        inv("asymptotics", "boundedness_and_linearity", |r| done(asy::boundedness_and_linearity(r))),
        inv("asymptotics", "mu1_decay", |_| {
            let s = asy::magnitude_slope(50, 5000)?;
            if s <= -0.2 {
                Ok(format!("slope {s:.3}"))
            } else {
                Err(format!("slope {s:.3} above -0.2"))
            }
        }),
        inv("wronskian_engine", "consistency_identity", |_| worst(wr::consistency_identity())),
        inv("wronskian_engine", "root_scale_invariance", |_| done(wr::scale_invariance())),
        inv("wronskian_engine", "unperturbed_reconstruction", |_| {
            wr::unperturbed_reconstruction().map(|w| format!("max relative error x lambda {w:.3}"))
        }),
        inv("wronskian_engine", "asym_ode_sign_patterns", |_| {
            // lambda^{1/6} > 2 (||q||_B + 1) = 2.6 needs lambda above about 309
            let q = Potential::cosine(0.1, 1.0).map_err(|e| e.to_string())?;
            done(wr::sign_patterns(&q, &[160, 250]))
        }),
        inv("cli_reporting", "csv_determinism", |_| done(determinism())),
        inv("cli_reporting", "csv_round_trip", |r| done(round_trip(r))),
    ]
}

fn determinism() -> Result<(), String> {
    let q = Potential::cosine(1.0, 1.0).map_err(|e| e.to_string())?;
    let make = || -> Result<String, String> {
        let t = reference_solver::eigenvalues(&q, 12, Default::default()).map_err(|e| e.to_string())?;
        tables::eigen_csv(&t.entries).map_err(|e| e.to_string())
    };
    if make()? != make()? {
        return Err("two identical runs produced different CSV".into());
    }
    Ok(())
}

fn round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    use rand::Rng;
    let e = |e: super::CliError| e.to_string();
    let entries: Vec<EigenEntry> = (0..40)
        .map(|n| EigenEntry {
            n,
            mu: rng.gen_range(0.0..1e3),
            err_est: rng.gen::<f64>() * 1e-9,
            solver: Solver::Galerkin,
        })
        .collect();
    if tables::read_eigen_csv(&tables::eigen_csv(&entries).map_err(e)?).map_err(e)? != entries {
        return Err("eigen table changed on re-read".into());
    }
    let q = Potential::cosine(1.0, 1.0).map_err(|e| e.to_string())?;
    let recs: Vec<_> = (0..40)
        .map(|n| asymptotics::record(n, &q, asymptotics::Mu1Variant::Theta))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if tables::read_asymptotic_csv(&tables::asymptotic_csv(&recs).map_err(e)?).map_err(e)? != recs {
        return Err("asymptotic table changed on re-read".into());
    }
    let ws: Vec<WronskianSample> = (0..40)
        .map(|i| wronskian_engine::w_asym(0.3 * i as f64, &q))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let back = tables::read_wronskian_csv(&tables::wronskian_csv(&ws).map_err(e)?).map_err(e)?;
    if back.iter().zip(&ws).any(|(a, b)| a.lambda != b.lambda || a.value != b.value || a.variant != Variant::Asym)
        || back.len() != ws.len()
    {
        return Err("Wronskian table changed on re-read".into());
    }
    let c = quasiclassical_map::build_contour(num_complex::Complex64::new(40.0, 5.0), 256, 20.0)
        .map_err(|e| e.to_string())?;
    let rows = tables::contour_rows(&c);
    if tables::read_contour_csv(&tables::contour_csv(&rows).map_err(e)?).map_err(e)? != rows {
        return Err("contour table changed on re-read".into());
    }
    Ok(())
}

/// Runs the registry; check `i` draws from a stream seeded with `seed + i`.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    registry()
        .into_iter()
        .enumerate()
        .map(|(i, inv)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let start = Instant::now();
            let outcome = catch_unwind(AssertUnwindSafe(|| (inv.check)(&mut rng)))
                .unwrap_or_else(|_| Err("check panicked".into()));
            let (pass, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                module: inv.module.into(),
                name: inv.name.into(),
                pass,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

/// One line per check plus a summary line.
pub fn render(results: &[CheckResult]) -> String {
    let mut s = String::new();
    for r in results {
        s.push_str(&format!(
            "{} {}::{} ({}) [{:.2} s]\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.module,
            r.name,
            r.detail,
            r.seconds
        ));
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    s.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    s
}
