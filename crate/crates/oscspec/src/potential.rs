//! Bounded potentials `q` with derivative `q'`, antiderivative `q1(x) = int_0^x q`
//! and their discrete Fourier-measure form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("x = {x} lies outside the tabulated range [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("potential is not in class B: {0}")]
    NotClassB(String),
    #[error("operation unsupported for this potential kind: {0}")]
    Unsupported(String),
    #[error("invalid potential: {0}")]
    Invalid(String),
}

/// One real component `qk cos(tk x + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub qk: f64,
    pub tk: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Constant { c: f64 },
    TrigSum { terms: Vec<TrigTerm> },
    GaussianBump { a: f64, x0: f64, s: f64 },
    Tabulated(Spline),
}

/// Immutable potential; evaluation is pure.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
}

impl Potential {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            kind: PotentialKind::Constant { c },
        }
    }

    /// `amp cos(freq x)`.
    pub fn cosine(amp: f64, freq: f64) -> Result<Self, PotentialError> {
        Self::trig(vec![TrigTerm {
            qk: amp,
            tk: freq,
            phase: 0.0,
        }])
    }

    pub fn trig(terms: Vec<TrigTerm>) -> Result<Self, PotentialError> {
        for t in &terms {
            if t.tk == 0.0 || !t.tk.is_finite() || !t.qk.is_finite() || !t.phase.is_finite() {
                return Err(PotentialError::Invalid(format!(
                    "trig term needs finite values and a nonzero frequency, got {t:?}"
                )));
            }
        }
        Ok(Self {
            kind: PotentialKind::TrigSum { terms },
        })
    }

    /// `a exp(-(x - x0)^2 / (2 s^2))`.
    pub fn gaussian(a: f64, x0: f64, s: f64) -> Result<Self, PotentialError> {
        if s <= 0.0 || !s.is_finite() || !a.is_finite() || !x0.is_finite() {
            return Err(PotentialError::Invalid(format!(
                "gaussian needs finite a, x0 and s > 0, got a={a} x0={x0} s={s}"
            )));
        }
        Ok(Self {
            kind: PotentialKind::GaussianBump { a, x0, s },
        })
    }

    /// Natural cubic spline through `(xs, ys)`; `xs` strictly increasing and
    /// containing 0 in its range.
    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, PotentialError> {
        Ok(Self {
            kind: PotentialKind::Tabulated(Spline::new(xs, ys)?),
        })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Range where the potential can be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            PotentialKind::Tabulated(s) => (s.xs[0], *s.xs.last().unwrap()),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn check_domain(&self, lo: f64, hi: f64) -> Result<(), PotentialError> {
        let (a, b) = self.domain();
        if lo < a {
            return Err(PotentialError::OutOfDomain { x: lo, lo: a, hi: b });
        }
        if hi > b {
            return Err(PotentialError::OutOfDomain { x: hi, lo: a, hi: b });
        }
        Ok(())
    }

    /// Whether `q`, `q'` and `q1` are all bounded.
    pub fn is_class_b(&self) -> bool {
        match &self.kind {
            PotentialKind::Constant { c } => *c == 0.0,
            PotentialKind::Tabulated(_) => false,
            _ => true,
        }
    }

    /// Largest frequency present, used to size quadratures.
    pub fn max_frequency(&self) -> f64 {
        match &self.kind {
            PotentialKind::Constant { .. } => 0.0,
            PotentialKind::TrigSum { terms } => terms.iter().fold(0.0, |m, t| m.max(t.tk.abs())),
            PotentialKind::GaussianBump { s, .. } => 6.0 / s,
            PotentialKind::Tabulated(s) => PI / s.min_step(),
        }
    }

    /// Upper bound for `sup |q|`.
    pub fn sup_abs(&self) -> f64 {
        match &self.kind {
            PotentialKind::Constant { c } => c.abs(),
            PotentialKind::TrigSum { terms } => terms.iter().map(|t| t.qk.abs()).sum(),
            PotentialKind::GaussianBump { a, .. } => a.abs(),
            PotentialKind::Tabulated(s) => s.sup_abs(),
        }
    }

    pub fn eval_q(&self, x: f64) -> Result<f64, PotentialError> {
        match &self.kind {
            PotentialKind::Tabulated(s) => s.eval(x).map(|v| v.0),
            _ => Ok(self.q(x)),
        }
    }

    pub fn eval_q_prime(&self, x: f64) -> Result<f64, PotentialError> {
        match &self.kind {
            PotentialKind::Tabulated(s) => s.eval(x).map(|v| v.1),
            _ => Ok(self.q_prime(x)),
        }
    }

    pub fn eval_q1(&self, x: f64) -> Result<f64, PotentialError> {
        match &self.kind {
            PotentialKind::Tabulated(s) => s.integral_from_zero(x),
            _ => Ok(self.q1(x)),
        }
    }

    /// `q(x)` for callers that validated the range with [`Potential::check_domain`];
    /// tabulated potentials are clamped to their end values outside the grid.
    pub fn q(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Constant { c } => *c,
            PotentialKind::TrigSum { terms } => {
                terms.iter().map(|t| t.qk * (t.tk * x + t.phase).cos()).sum()
            }
            PotentialKind::GaussianBump { a, x0, s } => {
                let u = (x - x0) / s;
                a * (-0.5 * u * u).exp()
            }
            PotentialKind::Tabulated(s) => s.eval_clamped(x).0,
        }
    }

    pub fn q_prime(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Constant { .. } => 0.0,
            PotentialKind::TrigSum { terms } => terms
                .iter()
                .map(|t| -t.qk * t.tk * (t.tk * x + t.phase).sin())
                .sum(),
            PotentialKind::GaussianBump { a, x0, s } => {
                let u = (x - x0) / s;
                -a * u / s * (-0.5 * u * u).exp()
            }
            PotentialKind::Tabulated(s) => s.eval_clamped(x).1,
        }
    }

    pub fn q1(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Constant { c } => c * x,
            PotentialKind::TrigSum { terms } => terms
                .iter()
                .map(|t| t.qk / t.tk * ((t.tk * x + t.phase).sin() - t.phase.sin()))
                .sum(),
            PotentialKind::GaussianBump { a, x0, s } => {
                let r = s * std::f64::consts::SQRT_2;
                a * s * (0.5 * PI).sqrt() * (libm::erf((x - x0) / r) + libm::erf(x0 / r))
            }
            PotentialKind::Tabulated(sp) => sp.integral_from_zero(x).unwrap_or(f64::NAN),
        }
    }

    /// Upper bound on `sup (|q| + |q'| + |q1|)`.
    pub fn b_norm(&self) -> Result<f64, PotentialError> {
        match &self.kind {
            PotentialKind::Constant { c } => {
                if *c == 0.0 {
                    Ok(0.0)
                } else {
                    Err(PotentialError::NotClassB(format!(
                        "constant {c} has unbounded antiderivative"
                    )))
                }
            }
            PotentialKind::TrigSum { terms } => Ok(terms
                .iter()
                .map(|t| {
                    let w = t.tk.abs();
                    t.qk.abs() * (1.0 + w + (1.0 + t.phase.sin().abs()) / w)
                })
                .sum()),
            PotentialKind::GaussianBump { a, s, .. } => {
                let a = a.abs();
                Ok(a + a / (s * std::f64::consts::E.sqrt()) + a * s * (2.0 * PI).sqrt())
            }
            PotentialKind::Tabulated(_) => Err(PotentialError::Unsupported(
                "tabulated potentials have no global supremum bound".into(),
            )),
        }
    }

    /// `int_R q`, available for the gaussian bump.
    pub fn total_integral(&self) -> Result<f64, PotentialError> {
        match &self.kind {
            PotentialKind::GaussianBump { a, s, .. } => Ok(a * s * (2.0 * PI).sqrt()),
            PotentialKind::Constant { c } if *c == 0.0 => Ok(0.0),
            _ => Err(PotentialError::Unsupported(
                "integral over the line needs an integrable potential".into(),
            )),
        }
    }

    /// Reflected potential `x -> q(-x)`.
    pub fn reflected(&self) -> Potential {
        let kind = match &self.kind {
            PotentialKind::Constant { c } => PotentialKind::Constant { c: *c },
            PotentialKind::TrigSum { terms } => PotentialKind::TrigSum {
                terms: terms
                    .iter()
                    .map(|t| TrigTerm {
                        qk: t.qk,
                        tk: -t.tk,
                        phase: t.phase,
                    })
                    .collect(),
            },
            PotentialKind::GaussianBump { a, x0, s } => PotentialKind::GaussianBump {
                a: *a,
                x0: -x0,
                s: *s,
            },
            PotentialKind::Tabulated(sp) => PotentialKind::Tabulated(sp.reflected()),
        };
        Potential { kind }
    }

    /// Scaled copy `c q`.
    pub fn scaled(&self, c: f64) -> Potential {
        let kind = match &self.kind {
            PotentialKind::Constant { c: v } => PotentialKind::Constant { c: c * v },
            PotentialKind::TrigSum { terms } => PotentialKind::TrigSum {
                terms: terms
                    .iter()
                    .map(|t| TrigTerm { qk: c * t.qk, ..*t })
                    .collect(),
            },
            PotentialKind::GaussianBump { a, x0, s } => PotentialKind::GaussianBump {
                a: c * a,
                x0: *x0,
                s: *s,
            },
            PotentialKind::Tabulated(sp) => {
                let ys = sp.ys.iter().map(|y| c * y).collect();
                PotentialKind::Tabulated(Spline::new(sp.xs.clone(), ys).expect("valid grid"))
            }
        };
        Potential { kind }
    }

    /// Fourier atoms of a trig-sum potential.
    pub fn spectrum(&self) -> Option<TrigSpectrum> {
        match &self.kind {
            PotentialKind::TrigSum { terms } => Some(TrigSpectrum::from_terms(terms)),
            PotentialKind::Constant { c } if *c == 0.0 => Some(TrigSpectrum::default()),
            _ => None,
        }
    }

    /// Parses `const:<c>`, `cos:<amp>:<freq>`, `gauss:<a>:<x0>:<s>` or
    /// `trig:<path.json>`.
    pub fn parse_spec(spec: &str) -> Result<Self, PotentialError> {
        let bad = |m: &str| PotentialError::Invalid(format!("{m} in potential spec '{spec}'"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bad number"));
        let (head, rest) = spec.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        match head {
            "const" => Ok(Self::constant(num(rest)?)),
            "cos" => {
                let p: Vec<&str> = rest.split(':').collect();
                if p.len() != 2 {
                    return Err(bad("expected cos:<amp>:<freq>"));
                }
                Self::cosine(num(p[0])?, num(p[1])?)
            }
            "gauss" => {
                let p: Vec<&str> = rest.split(':').collect();
                if p.len() != 3 {
                    return Err(bad("expected gauss:<a>:<x0>:<s>"));
                }
                Self::gaussian(num(p[0])?, num(p[1])?, num(p[2])?)
            }
            "trig" => {
                let text = std::fs::read_to_string(rest)
                    .map_err(|e| PotentialError::Invalid(format!("cannot read {rest}: {e}")))?;
                Self::from_trig_json(&text)
            }
            _ => Err(bad("unknown kind")),
        }
    }

    /// JSON array of `{"qk", "tk", "phase"}` objects.
    pub fn from_trig_json(text: &str) -> Result<Self, PotentialError> {
        let terms: Vec<TrigTerm> = serde_json::from_str(text)
            .map_err(|e| PotentialError::Invalid(format!("trig json: {e}")))?;
        Self::trig(terms)
    }
}

/// Discrete Fourier measure `q(x) = sum_k q_k e^{i t_k x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSpectrum {
    pub atoms: Vec<(f64, Complex64)>,
    pub moment_order: f64,
}

impl Default for TrigSpectrum {
    fn default() -> Self {
        Self {
            atoms: Vec::new(),
            moment_order: 2.0,
        }
    }
}

impl TrigSpectrum {
    pub fn new(atoms: Vec<(f64, Complex64)>, moment_order: f64) -> Result<Self, PotentialError> {
        if moment_order <= 1.5 {
            return Err(PotentialError::Invalid(format!(
                "moment order must exceed 3/2, got {moment_order}"
            )));
        }
        if atoms.iter().any(|(t, _)| *t == 0.0 || !t.is_finite()) {
            return Err(PotentialError::Invalid("atom frequencies must be nonzero".into()));
        }
        Ok(Self {
            atoms,
            moment_order,
        })
    }

    /// Splits each `qk cos(tk x + phase)` into two conjugate atoms.
    pub fn from_terms(terms: &[TrigTerm]) -> Self {
        let mut atoms = Vec::with_capacity(2 * terms.len());
        for t in terms {
            let w = Complex64::from_polar(0.5 * t.qk, t.phase);
            atoms.push((t.tk, w));
            atoms.push((-t.tk, w.conj()));
        }
        Self {
            atoms,
            moment_order: 2.0,
        }
    }

    /// `C_q = sum (1 + |t_k|^{-p}) |q_k|`.
    pub fn c_q(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(t, q)| (1.0 + t.abs().powf(-self.moment_order)) * q.norm())
            .sum()
    }

    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        self.atoms.iter().all(|(t, q)| {
            self.atoms
                .iter()
                .any(|(s, p)| (s + t).abs() <= tol && (p - q.conj()).norm() <= tol)
        })
    }

    /// Complex reconstruction `sum q_k e^{i t_k x}`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.atoms
            .iter()
            .map(|(t, q)| q * Complex64::from_polar(1.0, t * x))
            .sum()
    }

    /// Real potential `Re sum q_k e^{i t_k x}`, equal to the sum itself for
    /// conjugate-symmetric atoms.
    pub fn to_potential(&self) -> Result<Potential, PotentialError> {
        Potential::trig(
            self.atoms
                .iter()
                .map(|(t, q)| TrigTerm {
                    qk: q.norm(),
                    tk: *t,
                    phase: q.arg(),
                })
                .collect(),
        )
    }
}

/// Natural cubic spline.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
    /// Cumulative integral from `xs[0]` to each node.
    cum: Vec<f64>,
}

impl Spline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, PotentialError> {
        let n = xs.len();
        if n < 4 || ys.len() != n {
            return Err(PotentialError::Invalid(
                "tabulated potential needs at least 4 matching samples".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) || xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(PotentialError::Invalid(
                "tabulated grid must be finite and strictly increasing".into(),
            ));
        }
        if xs[0] > 0.0 || xs[n - 1] < 0.0 {
            return Err(PotentialError::Invalid(
                "tabulated grid must contain x = 0".into(),
            ));
        }
        // second derivatives by the tridiagonal system with natural ends
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let r = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (r - a * d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        let mut cum = vec![0.0; n];
        for i in 1..n {
            let h = xs[i] - xs[i - 1];
            cum[i] = cum[i - 1] + 0.5 * h * (ys[i - 1] + ys[i]) - h * h * h / 24.0 * (m[i - 1] + m[i]);
        }
        Ok(Self { xs, ys, m, cum })
    }

    fn min_step(&self) -> f64 {
        self.xs
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    fn sup_abs(&self) -> f64 {
        self.ys.iter().fold(0.0, |m, y| m.max(y.abs()))
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            i => (i - 1).min(self.xs.len() - 2),
        }
    }

    fn eval(&self, x: f64) -> Result<(f64, f64), PotentialError> {
        let (lo, hi) = (self.xs[0], *self.xs.last().unwrap());
        if !(lo..=hi).contains(&x) {
            return Err(PotentialError::OutOfDomain { x, lo, hi });
        }
        Ok(self.eval_clamped(x))
    }

    fn eval_clamped(&self, x: f64) -> (f64, f64) {
        let x = x.clamp(self.xs[0], *self.xs.last().unwrap());
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let v = a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0;
        let dv = (self.ys[i + 1] - self.ys[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0;
        (v, dv)
    }

    fn integral_to(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let b = (x - self.xs[i]) / h;
        let a = 1.0 - b;
        // int_{x_i}^{x} of the cubic, in the local coordinate b
        let lin = h * (self.ys[i] * (1.0 - a * a) * 0.5 + self.ys[i + 1] * b * b * 0.5);
        let cub = h * h * h / 6.0
            * (self.m[i] * ((1.0 - a.powi(4)) / 4.0 - (1.0 - a * a) / 2.0)
                + self.m[i + 1] * (b.powi(4) / 4.0 - b * b / 2.0));
        self.cum[i] + lin + cub
    }

    fn integral_from_zero(&self, x: f64) -> Result<f64, PotentialError> {
        self.eval(x)?;
        Ok(self.integral_to(x) - self.integral_to(0.0))
    }

    fn reflected(&self) -> Spline {
        let xs = self.xs.iter().rev().map(|x| -x).collect();
        let ys = self.ys.iter().rev().copied().collect();
        Spline::new(xs, ys).expect("reflected grid stays valid")
    }
}

/// Invariant checks run by the self-test suite.
pub mod checks {
    use super::*;
    use rand::Rng;

    fn random_trig(rng: &mut impl Rng) -> Vec<TrigTerm> {
        (0..rng.gen_range(1..=4))
            .map(|_| TrigTerm {
                qk: rng.gen_range(-1.5..1.5),
                tk: rng.gen_range(0.2..3.0),
                phase: rng.gen_range(-PI..PI),
            })
            .collect()
    }

    fn analytic_sample(rng: &mut impl Rng) -> Result<Vec<Potential>, String> {
        let e = |e: PotentialError| e.to_string();
        Ok(vec![
            Potential::constant(rng.gen_range(-2.0..2.0)),
            Potential::cosine(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0)).map_err(e)?,
            Potential::trig(random_trig(rng)).map_err(e)?,
            Potential::gaussian(rng.gen_range(-2.0..2.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.3..3.0))
                .map_err(e)?,
        ])
    }

    /// Central difference of `q1` with step 1e-5 matches `q` within 1e-6 on 100 points in `[-50, 50]`.
    pub fn q1_derivative(rng: &mut impl Rng) -> Result<f64, String> {
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for p in analytic_sample(rng)? {
            for _ in 0..100 {
                let x = rng.gen_range(-50.0..50.0);
                let fd = (p.q1(x + h) - p.q1(x - h)) / (2.0 * h);
                worst = worst.max((fd - p.q(x)).abs());
            }
        }
        if worst <= 1e-6 {
            Ok(worst)
        } else {
            Err(format!("q1' - q = {worst:.2e}"))
        }
    }

    /// Conjugate-symmetric atoms evaluate with imaginary part exactly zero.
    pub fn conjugate_atoms_real(rng: &mut impl Rng) -> Result<(), String> {
        for _ in 0..20 {
            let s = TrigSpectrum::from_terms(&random_trig(rng));
            for _ in 0..50 {
                let x = rng.gen_range(-100.0..100.0);
                let v = s.eval(x);
                if v.im != 0.0 {
                    return Err(format!("Im q({x}) = {:e}", v.im));
                }
            }
        }
        Ok(())
    }

    /// `|q| + |q'| + |q1| <= b_norm` on 10^4 sampled points per potential.
    pub fn b_norm_bound(rng: &mut impl Rng) -> Result<(), String> {
        for p in analytic_sample(rng)?.into_iter().skip(1) {
            let b = p.b_norm().map_err(|e| e.to_string())?;
            for _ in 0..10_000 {
                let x = rng.gen_range(-500.0..500.0);
                let v = p.q(x).abs() + p.q_prime(x).abs() + p.q1(x).abs();
                if v > b * (1.0 + 1e-12) {
                    return Err(format!("{v} > b_norm {b} at x = {x}"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn analytic_kinds() -> Vec<Potential> {
        vec![
            Potential::constant(0.7),
            Potential::cosine(1.0, 1.0).unwrap(),
            Potential::trig(vec![
                TrigTerm { qk: 0.4, tk: 2.3, phase: 0.7 },
                TrigTerm { qk: -1.1, tk: 0.6, phase: 0.0 },
            ])
            .unwrap(),
            Potential::gaussian(1.3, 0.4, 1.7).unwrap(),
        ]
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(Potential::constant(0.7).q(3.2), 0.7);
        assert_eq!(Potential::cosine(1.0, 1.0).unwrap().q(0.0), 1.0);
        let g = Potential::gaussian(1.0, 0.0, 1.0).unwrap();
        assert!((g.q(2.0) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn antiderivative_examples() {
        for p in analytic_kinds() {
            assert_eq!(p.q1(0.0), 0.0);
        }
        assert!((Potential::cosine(1.0, 1.0).unwrap().q1(0.5 * PI) - 1.0).abs() < 1e-15);
        assert_eq!(Potential::constant(0.3).q1(5.0), 1.5);
    }

    #[test]
    fn b_norm_examples() {
        assert_eq!(Potential::zero().b_norm().unwrap(), 0.0);
        assert!(Potential::cosine(1.0, 1.0).unwrap().b_norm().unwrap() <= 3.0);
        assert!(matches!(
            Potential::constant(0.5).b_norm(),
            Err(PotentialError::NotClassB(_))
        ));
    }

    #[test]
    fn b_norm_bounds_samples() {
        for p in analytic_kinds().into_iter().skip(1) {
            let b = p.b_norm().unwrap();
            for i in 0..10_000 {
                let x = -200.0 + 400.0 * i as f64 / 9_999.0;
                assert!(p.q(x).abs() + p.q_prime(x).abs() + p.q1(x).abs() <= b + 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_atoms_reconstruct_a_real_function() {
        let terms = [TrigTerm { qk: 0.8, tk: 1.4, phase: 0.3 }, TrigTerm { qk: 0.2, tk: 3.0, phase: -1.0 }];
        let s = TrigSpectrum::from_terms(&terms);
        assert!(s.is_conjugate_symmetric(1e-15));
        let p = Potential::trig(terms.to_vec()).unwrap();
        for i in 0..50 {
            let x = -7.0 + 0.3 * i as f64;
            let v = s.eval(x);
            assert!(v.im.abs() < 1e-15);
            assert!((v.re - p.q(x)).abs() < 1e-14);
        }
        let back = s.to_potential().unwrap();
        assert!((back.q(1.234) - p.q(1.234)).abs() < 1e-14);
    }

    #[test]
    fn spec_strings_parse() {
        assert_eq!(Potential::parse_spec("const:0.5").unwrap().q(3.0), 0.5);
        assert_eq!(Potential::parse_spec("cos:2:3").unwrap().q(0.0), 2.0);
        assert!(Potential::parse_spec("gauss:1:0:1").is_ok());
        assert!(Potential::parse_spec("cos:1").is_err());
        assert!(Potential::parse_spec("wave:1").is_err());
        let p = Potential::from_trig_json(r#"[{"qk":1.0,"tk":1.0,"phase":0.0},{"qk":0.5,"tk":2.0}]"#)
            .unwrap();
        assert!((p.q(0.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn tabulated_spline_reproduces_smooth_data() {
        let xs: Vec<f64> = (0..=400).map(|i| -10.0 + 0.05 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let p = Potential::tabulated(xs, ys).unwrap();
        assert!((p.eval_q(1.234).unwrap() - 1.234f64.sin()).abs() < 1e-6);
        assert!((p.eval_q1(3.0).unwrap() - (1.0 - 3f64.cos())).abs() < 1e-6);
        assert!(matches!(p.eval_q(11.0), Err(PotentialError::OutOfDomain { .. })));
        assert!(p.b_norm().is_err());
    }

    proptest! {
        #[test]
        fn q1_derivative_is_q(x in -50.0f64..50.0) {
            let h = 1e-5;
            for p in analytic_kinds() {
                let fd = (p.q1(x + h) - p.q1(x - h)) / (2.0 * h);
                prop_assert!((fd - p.q(x)).abs() < 1e-6);
            }
        }
    }
}
