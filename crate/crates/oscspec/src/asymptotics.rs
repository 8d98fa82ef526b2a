//! First-order eigenvalue asymptotics `mu_n = mu_n^0 + mu_n^1 + ...` and the
//! tools used to measure the remainders.

use crate::potential::{Potential, PotentialError, PotentialKind, TrigSpectrum};
use crate::quad::periodic_mean;
use crate::special_functions::bessel_j0;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mu1Variant {
    Theta,
    Bessel,
    Sigma,
    DecayLimit,
}

impl Mu1Variant {
    pub fn name(self) -> &'static str {
        match self {
            Mu1Variant::Theta => "theta",
            Mu1Variant::Bessel => "bessel",
            Mu1Variant::Sigma => "sigma",
            Mu1Variant::DecayLimit => "decay_limit",
        }
    }
}

impl std::str::FromStr for Mu1Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "theta" => Ok(Mu1Variant::Theta),
            "bessel" => Ok(Mu1Variant::Bessel),
            "sigma" => Ok(Mu1Variant::Sigma),
            "decay_limit" => Ok(Mu1Variant::DecayLimit),
            _ => Err(format!("unknown mu1 variant '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRecord {
    pub n: u64,
    pub mu0: f64,
    pub mu1: f64,
    pub mu1_variant: Mu1Variant,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticError {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("fit needs at least 8 usable points, got {0}")]
    TooFewPoints(usize),
}

/// `mu_n^0 = 2n + 1`.
pub fn mu0(n: u64) -> f64 {
    2.0 * n as f64 + 1.0
}

/// `(1/2pi) int_{-pi}^{pi} q(sqrt(lambda) sin theta) dtheta` by the periodic
/// trapezoid rule, doubling nodes until the value settles to `1e-12`.
pub fn theta_mean(lambda: f64, q: &Potential) -> f64 {
    let r = lambda.max(0.0).sqrt();
    let floor = 64 * ((r * q.max_frequency() / PI).ceil() as usize).max(1);
    let f = |th: f64| q.q(r * th.sin());
    let scale = q.sup_abs().max(1.0);
    let mut m = floor;
    let mut prev = periodic_mean(m, f);
    loop {
        m *= 2;
        let cur = periodic_mean(m, f);
        if (cur - prev).abs() < 1e-12 * scale || m > (1 << 24) {
            return cur;
        }
        prev = cur;
    }
}

/// `mu_n^1 = (1/2pi) int q(sqrt(2n+1) sin theta) dtheta`.
pub fn mu1_theta(n: u64, q: &Potential) -> f64 {
    theta_mean(mu0(n), q)
}

/// `mu_n^1 = sum_k q_k J0(|t_k| sqrt(2n+1))`; only the real part survives for
/// conjugate-symmetric atoms.
pub fn mu1_bessel(n: u64, spec: &TrigSpectrum) -> f64 {
    let r = mu0(n).sqrt();
    spec.atoms
        .iter()
        .map(|(t, qk)| qk.re * bessel_j0(t.abs() * r))
        .sum()
}

/// `sigma(s) = sqrt(2/pi) Re sum_k q_k |t_k|^{-1/2} cos(s |t_k| - pi/4)`, so that
/// `mu_n^1 ~ sigma(sqrt(mu_n^0)) / (mu_n^0)^{1/4}`.
pub fn sigma(s: f64, spec: &TrigSpectrum) -> f64 {
    let c = (2.0 / PI).sqrt();
    spec.atoms
        .iter()
        .map(|(t, qk)| {
            let a = t.abs();
            qk.re / a.sqrt() * (s * a - 0.25 * PI).cos()
        })
        .sum::<f64>()
        * c
}

/// Leading term for integrable `q`: `(1 / (pi sqrt(2n+1))) int q`.
pub fn mu1_decay_limit(n: u64, q: &Potential) -> Result<f64, AsymptoticError> {
    let total = match q.kind() {
        PotentialKind::Constant { c } if *c == 0.0 => 0.0,
        PotentialKind::GaussianBump { .. } => q.total_integral()?,
        _ => {
            return Err(PotentialError::Unsupported(
                "decay limit needs an integrable (gaussian) potential".into(),
            )
            .into())
        }
    };
    Ok(total / (PI * mu0(n).sqrt()))
}

/// First-order record for `n` by the requested variant.
pub fn record(n: u64, q: &Potential, variant: Mu1Variant) -> Result<AsymptoticRecord, AsymptoticError> {
    let need_spec = || {
        q.spectrum().ok_or_else(|| {
            AsymptoticError::Potential(PotentialError::Unsupported(format!(
                "variant {} needs a trig-sum potential",
                variant.name()
            )))
        })
    };
    let mu1 = match variant {
        Mu1Variant::Theta => mu1_theta(n, q),
        Mu1Variant::Bessel => mu1_bessel(n, &need_spec()?),
        Mu1Variant::Sigma => {
            let m = mu0(n);
            sigma(m.sqrt(), &need_spec()?) / m.powf(0.25)
        }
        Mu1Variant::DecayLimit => mu1_decay_limit(n, q)?,
    };
    Ok(AsymptoticRecord {
        n,
        mu0: mu0(n),
        mu1,
        mu1_variant: variant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FitOutcome {
    /// `log|r| ~ slope log n + intercept`; `dropped` zero residuals were skipped.
    Fitted { slope: f64, intercept: f64, dropped: usize },
    /// Every residual was exactly zero.
    ExactMatch { count: usize },
}

impl FitOutcome {
    pub fn slope(&self) -> Option<f64> {
        match self {
            FitOutcome::Fitted { slope, .. } => Some(*slope),
            FitOutcome::ExactMatch { .. } => None,
        }
    }
}

/// Least-squares slope of `log|residual|` against `log n`.
pub fn fit_decay_exponent(points: &[(f64, f64)]) -> Result<FitOutcome, AsymptoticError> {
    if !points.is_empty() && points.iter().all(|p| p.1 == 0.0) {
        return Ok(FitOutcome::ExactMatch { count: points.len() });
    }
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 != 0.0 && p.0 > 0.0)
        .map(|p| (p.0.ln(), p.1.abs().ln()))
        .collect();
    if used.len() < 8 {
        return Err(AsymptoticError::TooFewPoints(used.len()));
    }
    let m = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / m;
    let my = used.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(FitOutcome::Fitted {
        slope,
        intercept: my - slope * mx,
        dropped: points.len() - used.len(),
    })
}

/// `max |r_n| n^{p}` over the points.
pub fn max_scaled(points: &[(f64, f64)], p: f64) -> f64 {
    points
        .iter()
        .map(|(n, r)| r.abs() * n.powf(p))
        .fold(0.0, f64::max)
}

/// Integer grid of about `count` logarithmically spaced values in `[lo, hi]`.
pub fn log_grid(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut v: Vec<u64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1).max(1) as f64).exp().round() as u64)
        .collect();
    v.dedup();
    v
}

/// Executable forms of the first-order properties.
pub mod checks {
    use super::*;
    use crate::potential::TrigTerm;
    use rand::Rng;

    pub fn random_spectrum(rng: &mut impl Rng) -> TrigSpectrum {
        let k = rng.gen_range(1..=4);
        let terms: Vec<TrigTerm> = (0..k)
            .map(|_| TrigTerm {
                qk: rng.gen_range(-1.0..1.0),
                tk: rng.gen_range(0.1..3.0),
                phase: if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(-PI..PI) },
            })
            .collect();
        TrigSpectrum::from_terms(&terms)
    }

    /// `mu1_theta = mu1_bessel` on random spectra.
    pub fn variant_agreement(rng: &mut impl Rng, count: usize) -> Result<f64, String> {
        let mut worst: f64 = 0.0;
        for _ in 0..count {
            let spec = random_spectrum(rng);
            let q = spec.to_potential().map_err(|e| e.to_string())?;
            for n in [0, 5, 50, 500] {
                let d = (mu1_theta(n, &q) - mu1_bessel(n, &spec)).abs();
                worst = worst.max(d);
            }
        }
        if worst > 1e-9 {
            return Err(format!("theta and bessel variants differ by {worst:e}"));
        }
        Ok(worst)
    }

    /// `|mu1| <= sup |q|` and linearity in the amplitude.
    pub fn boundedness_and_linearity(rng: &mut impl Rng) -> Result<(), String> {
        for _ in 0..20 {
            let q = random_spectrum(rng).to_potential().map_err(|e| e.to_string())?;
            let c = rng.gen_range(-3.0..3.0);
            let qc = q.scaled(c);
            for n in [0, 3, 40, 400] {
                let m = mu1_theta(n, &q);
                let sup = (0..2000)
                    .map(|i| q.q(-50.0 + 0.05 * i as f64).abs())
                    .fold(0.0, f64::max);
                if m.abs() > q.sup_abs() + 1e-12 || m.abs() > sup + 1e-9 {
                    return Err(format!("|mu1| = {} exceeds sup |q| = {sup}", m.abs()));
                }
                let mc = mu1_theta(n, &qc);
                if (mc - c * m).abs() > 1e-11 * (1.0 + c.abs()) {
                    return Err(format!("linearity fails: {mc} vs {}", c * m));
                }
            }
        }
        Ok(())
    }

    /// Fitted exponent of `|mu_n^1|` for `cos x` over `[lo, hi]`.
    pub fn magnitude_slope(lo: u64, hi: u64) -> Result<f64, String> {
        let q = Potential::cosine(1.0, 1.0).map_err(|e| e.to_string())?;
        let pts: Vec<(f64, f64)> = (lo..=hi).map(|n| (n as f64, mu1_theta(n, &q))).collect();
        fit_decay_exponent(&pts)
            .map_err(|e| e.to_string())?
            .slope()
            .ok_or_else(|| "residuals vanished".to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::TrigTerm;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cos1() -> Potential {
        Potential::cosine(1.0, 1.0).unwrap()
    }

    #[test]
    fn trivial_potentials() {
        assert_eq!(mu1_theta(7, &Potential::zero()), 0.0);
        assert!((mu1_theta(7, &Potential::constant(0.3)) - 0.3).abs() < 1e-15);
        assert_eq!(mu1_bessel(3, &TrigSpectrum::default()), 0.0);
        assert_eq!(sigma(2.0, &TrigSpectrum::default()), 0.0);
        assert_eq!(mu1_decay_limit(4, &Potential::zero()).unwrap(), 0.0);
    }

    #[test]
    fn cosine_gives_j0() {
        let got = mu1_theta(1, &cos1());
        assert!((got - bessel_j0(3f64.sqrt())).abs() < 1e-13);
        let single = TrigSpectrum::new(vec![(1.0, Complex64::new(1.0, 0.0))], 2.0).unwrap();
        for n in [0, 1, 10, 100] {
            assert!((mu1_bessel(n, &single) - mu1_theta(n, &cos1())).abs() < 1e-10);
        }
    }

    #[test]
    fn two_atoms() {
        let spec = TrigSpectrum::new(
            vec![(1.0, Complex64::new(1.0, 0.0)), (2.0, Complex64::new(0.5, 0.0))],
            2.0,
        )
        .unwrap();
        let want = bessel_j0(21f64.sqrt()) + 0.5 * bessel_j0(2.0 * 21f64.sqrt());
        assert!((mu1_bessel(10, &spec) - want).abs() < 1e-14);
        let q = Potential::trig(vec![
            TrigTerm { qk: 1.0, tk: 1.0, phase: 0.0 },
            TrigTerm { qk: 0.5, tk: 2.0, phase: 0.0 },
        ])
        .unwrap();
        assert!((mu1_theta(10, &q) - want).abs() < 1e-10);
    }

    #[test]
    fn sigma_zero_and_residual_law() {
        let single = TrigSpectrum::new(vec![(1.0, Complex64::new(1.0, 0.0))], 2.0).unwrap();
        assert!(sigma(0.75 * PI, &single).abs() < 1e-15);
        let q = Potential::trig(vec![
            TrigTerm { qk: 1.0, tk: 1.0, phase: 0.0 },
            TrigTerm { qk: 0.5, tk: 2.0, phase: 0.0 },
        ])
        .unwrap();
        let spec = q.spectrum().unwrap();
        let pts: Vec<(f64, f64)> = log_grid(20, 2000, 120)
            .into_iter()
            .map(|n| {
                let m = mu0(n);
                (n as f64, mu1_theta(n, &q) - sigma(m.sqrt(), &spec) / m.powf(0.25))
            })
            .collect();
        let slope = fit_decay_exponent(&pts).unwrap().slope().unwrap();
        assert!(slope <= -0.6, "slope {slope}");
    }

    #[test]
    fn gaussian_decay_limit() {
        let g = Potential::gaussian(1.0, 0.0, 1.0).unwrap();
        let v = mu1_decay_limit(0, &g).unwrap();
        assert!((v - (2.0 * PI).sqrt() / PI).abs() < 1e-14);
        let n = 500;
        let ratio = mu1_theta(n, &g) / mu1_decay_limit(n, &g).unwrap();
        assert!((ratio - 1.0).abs() <= 0.05, "ratio {ratio}");
        assert!(mu1_decay_limit(1, &cos1()).is_err());
    }

    #[test]
    fn fit_synthetic() {
        let pts: Vec<(f64, f64)> = (1..=20).map(|n| (n as f64, 1.0 / n as f64)).collect();
        let FitOutcome::Fitted { slope, .. } = fit_decay_exponent(&pts).unwrap() else {
            panic!()
        };
        assert!((slope + 1.0).abs() < 1e-10);
        let pts: Vec<(f64, f64)> = (1..=20)
            .map(|n| (n as f64, 3.0 * (n as f64).powf(-1.0 / 3.0)))
            .collect();
        let FitOutcome::Fitted { slope, intercept, .. } = fit_decay_exponent(&pts).unwrap() else {
            panic!()
        };
        assert!((slope + 1.0 / 3.0).abs() < 1e-10);
        assert!((intercept - 3f64.ln()).abs() < 1e-10);
        let zeros = vec![(1.0, 0.0); 10];
        assert_eq!(fit_decay_exponent(&zeros).unwrap(), FitOutcome::ExactMatch { count: 10 });
        assert!(fit_decay_exponent(&pts[..5]).is_err());
    }

    #[test]
    fn first_order_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        checks::variant_agreement(&mut rng, 50).unwrap();
        checks::boundedness_and_linearity(&mut rng).unwrap();
        let s = checks::magnitude_slope(50, 5000).unwrap();
        assert!(s <= -0.2, "slope {s}");
    }
}
