//! Wronskian `w(lambda) = {psi_-, psi_+}` of the decaying solutions and the
//! eigenvalues as its zeros.
//!
//! Every Wronskian is carried as a normalized value `w / phi^2(lambda)` with
//! `phi(lambda) = 2^{3/4} (lambda / 2e)^{lambda/4}`; the scale itself is kept
//! as a logarithm.

use crate::asymptotics::theta_mean;
use crate::potential::{Potential, PotentialError};
use crate::quad::{PanelGrid, PanelRule};
use crate::quasiclassical_map::{
    k_at_zero, k_prime, lambda_pow, v0_of_t, z_of_x, Contour, MapError, MapPoint,
};
use crate::reference_solver::{EigenEntry, EigenTable, Solver};
use crate::roots::{secant_bisect, RootError};
use crate::special_functions::{airy_scaled, ln_phi2, sin_pi, w0_normalized, zeta, ScaledAiry};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

type C = Complex64;

const OMEGA: C = C::new(-0.5, 0.866_025_403_784_438_6);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WronskianError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("lambda = {0} is outside the admissible range")]
    InvalidLambda(f64),
    #[error("x_max = {x_max} is below sqrt(lambda) + 8 = {need}")]
    XmaxTooSmall { x_max: f64, need: f64 },
    #[error("invalid step {0}: need 0 < step <= 0.01")]
    InvalidStep(f64),
    #[error("ODE solution became non-finite at x = {0}")]
    Overflow(f64),
    #[error("contour too coarse for this potential: {0}")]
    CoarseContour(String),
    #[error("Picard iteration diverged after {iterations} iterations (update {update:e})")]
    Divergence { iterations: usize, update: f64 },
    #[error("Picard iteration did not reach tol {tol:e} in {iterations} iterations (update {update:e})")]
    NoConvergence { iterations: usize, update: f64, tol: f64 },
    #[error("tail estimate {estimate:e} exceeds tolerance {tol:e}")]
    Truncation { estimate: f64, tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Asym,
    Ode,
    Unperturbed,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Asym => "asym",
            Variant::Ode => "ode",
            Variant::Unperturbed => "unperturbed",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "asym" => Ok(Variant::Asym),
            "ode" => Ok(Variant::Ode),
            "unperturbed" => Ok(Variant::Unperturbed),
            _ => Err(format!("unknown Wronskian variant '{s}'")),
        }
    }
}

/// One Wronskian value: `w = value * exp(ln_scale)`, `ln_scale = ln phi^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WronskianSample {
    pub lambda: f64,
    pub value: f64,
    pub ln_scale: f64,
    pub variant: Variant,
}

impl WronskianSample {
    /// `w` itself, when representable.
    pub fn raw(&self) -> f64 {
        self.value * self.ln_scale.exp()
    }
}

/// `w0(lambda)` as a sample.
pub fn w_unperturbed(lambda: f64) -> WronskianSample {
    WronskianSample {
        lambda,
        value: w0_normalized(lambda),
        ln_scale: ln_phi2(lambda),
        variant: Variant::Unperturbed,
    }
}

/// `E(lambda) = -(1/2) int_{-pi/2}^{pi/2} q(sqrt(lambda) sin theta) dtheta`,
/// evaluated through the same periodic mean as the first-order shift so that
/// `mu^1 = -(2/pi) E(mu^0)` holds to rounding.
pub fn e_real(lambda: f64, q: &Potential) -> f64 {
    -0.5 * PI * theta_mean(lambda, q)
}

/// `E_+ = -2 pi lambda^{-1/6} int_0^{x_*} Ai(z omega) Ai(z omega-bar) q(x) / k'(t) dx`
/// over the turning-point side of the contour.
pub fn e_plus(contour: &Contour, q: &Potential) -> C {
    let lam = lambda_pow(contour.lambda, -1.0 / 6.0);
    let mut s = C::new(0.0, 0.0);
    for p in contour.minus_side() {
        if p.weight == 0.0 {
            continue;
        }
        let z = p.point.z;
        let (w1, w2) = (z * OMEGA, z * OMEGA.conj());
        let (a1, a2) = (airy_scaled(w1), airy_scaled(w2));
        let prod = a1.ai * a2.ai * (-a1.zeta - a2.zeta).exp();
        s += prod * q.q(p.point.x) / k_prime(p.point.t) * p.weight;
    }
    -2.0 * PI * lam * s
}

/// Contour on `[0, x_* + 10]` fine enough for the oscillations of `q`.
pub fn contour_for(lambda: C, q: &Potential) -> Result<Contour, WronskianError> {
    let xs = crate::quasiclassical_map::x_star(lambda)?;
    let x_max = xs + 10.0;
    let n = (32.0 * x_max * q.max_frequency().max(1.0)).ceil() as usize;
    Ok(crate::quasiclassical_map::build_contour(lambda, n.max(64), x_max)?)
}

/// `E = E_+ + E_-`, with `E_-` taken from the reflected potential `q(-x)`.
pub fn e_contour(lambda: C, q: &Potential, contour: &Contour) -> Result<C, WronskianError> {
    if contour.lambda != lambda {
        return Err(WronskianError::CoarseContour(format!(
            "contour was built for lambda = {}, not {lambda}",
            contour.lambda
        )));
    }
    let side = contour.minus_side();
    let sum: f64 = side.iter().map(|p| p.weight).sum();
    if (sum - contour.x_star).abs() > 1e-10 * (1.0 + contour.x_star) {
        return Err(WronskianError::CoarseContour(format!(
            "weights sum to {sum}, expected {}",
            contour.x_star
        )));
    }
    let gap = side
        .windows(2)
        .map(|w| w[1].point.x - w[0].point.x)
        .fold(0.0, f64::max);
    let limit = 0.5 * PI / q.max_frequency().max(1.0);
    if gap > limit {
        return Err(WronskianError::CoarseContour(format!(
            "node gap {gap:.3} exceeds {limit:.3}"
        )));
    }
    Ok(e_plus(contour, q) + e_plus(contour, &q.reflected()))
}

/// `w(lambda) ~ -phi^2 [cos(pi lambda / 2) - E(lambda) sin(pi lambda / 2)]`.
pub fn w_asym(lambda: f64, q: &Potential) -> Result<WronskianSample, WronskianError> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(WronskianError::InvalidLambda(lambda));
    }
    let e = e_real(lambda, q);
    // exact zeros of the cosine at odd integers
    let (s, c) = (sin_pi(0.5 * lambda), sin_pi(0.5 * (lambda + 1.0)));
    Ok(WronskianSample {
        lambda,
        value: -(c - e * s),
        ln_scale: ln_phi2(lambda),
        variant: Variant::Asym,
    })
}

/// `(y(0), y'(0), log scale)` of the solution of `y'' = (x^2 + q - lambda) y`
/// that decays at `+infinity`, started at `x_max` from its Liouville-Green form
/// normalized like `(sqrt 2 x)^{(lambda-1)/2} e^{-x^2/2}`.
fn shoot(lambda: f64, q: &Potential, x_max: f64, step: f64) -> Result<(f64, f64, f64), WronskianError> {
    let s = (x_max * x_max - lambda).sqrt();
    let ln_y = -0.25 * (lambda + 1.0) * std::f64::consts::LN_2 - 0.25 * lambda - 0.5 * x_max * s
        + 0.5 * lambda * (x_max + s).ln()
        - 0.25 * (x_max * x_max - lambda).ln();
    // first Liouville-Green correction: y = Q^{-1/4} e^{-S} (1 + eps) with
    // eps(x) = -int_x^inf phi / (2 sqrt Q), phi = (Q^{-1/4})'' / Q^{-1/4}
    let big_f = |x: f64| {
        let qq = x * x - lambda;
        (-0.5 / qq + 1.25 * x * x / (qq * qq)) / (2.0 * qq.sqrt())
    };
    let rule = rule16();
    let eps = -rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(t, w)| {
            let u = 0.5 * (t + 1.0);
            0.5 * w * big_f(x_max / u) * x_max / (u * u)
        })
        .sum::<f64>();
    let mut y = 1.0;
    let mut dy = -s - x_max / (2.0 * s * s) + big_f(x_max) / (1.0 + eps);
    let mut log_scale = ln_y + (1.0 + eps).ln();
    // the step also resolves the local growth rate sqrt(x^2 - lambda)
    let h_osc = step.min(0.02 / lambda.abs().max(1.0).sqrt());
    let h_at = |x: f64| h_osc.min(0.03 / ((x * x - lambda).abs() + 1.0).sqrt());
    let f = |x: f64| x * x + q.q(x) - lambda;
    let mut x = x_max;
    let mut i = 0usize;
    while x > 0.0 {
        let h = -h_at(x).min(x);
        let f0 = f(x);
        let fm = f(x + 0.5 * h);
        let f1 = f(x + h);
        let (k1y, k1d) = (dy, f0 * y);
        let (k2y, k2d) = (dy + 0.5 * h * k1d, fm * (y + 0.5 * h * k1y));
        let (k3y, k3d) = (dy + 0.5 * h * k2d, fm * (y + 0.5 * h * k2y));
        let (k4y, k4d) = (dy + h * k3d, f1 * (y + h * k3y));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        x = if x + h < 1e-14 { 0.0 } else { x + h };
        i += 1;
        if i % 50 == 0 || x == 0.0 {
            let m = y.abs() + dy.abs();
            if !m.is_finite() || m == 0.0 {
                return Err(WronskianError::Overflow(x));
            }
            y /= m;
            dy /= m;
            log_scale += m.ln();
        }
    }
    Ok((y, dy, log_scale))
}

fn check_ode_inputs(lambda: f64, x_max: f64, step: f64) -> Result<(), WronskianError> {
    let need = lambda.max(0.0).sqrt() + 8.0;
    if !(x_max >= need) {
        return Err(WronskianError::XmaxTooSmall { x_max, need });
    }
    if !(step > 0.0 && step <= 0.01) {
        return Err(WronskianError::InvalidStep(step));
    }
    Ok(())
}

/// `w = psi_-(0) psi_+'(0) - psi_-'(0) psi_+(0)` by shooting both half-line
/// solutions inward from `x_max`.
pub fn w_ode(lambda: f64, q: &Potential, x_max: f64, step: f64) -> Result<WronskianSample, WronskianError> {
    check_ode_inputs(lambda, x_max, step)?;
    let (yp, dp, lp) = shoot(lambda, q, x_max, step)?;
    let (ym, dm, lm) = shoot(lambda, &q.reflected(), x_max, step)?;
    // psi_-(x) = psi~(-x), so psi_-'(0) = -psi~'(0)
    let core = ym * dp + dm * yp;
    let ln_scale = ln_phi2(lambda);
    Ok(WronskianSample {
        lambda,
        value: core * (lp + lm - ln_scale).exp(),
        ln_scale,
        variant: Variant::Ode,
    })
}

/// Relative change of `w_ode` when `x_max` grows by 2.
pub fn w_ode_sensitivity(lambda: f64, q: &Potential, x_max: f64, step: f64) -> Result<f64, WronskianError> {
    let a = w_ode(lambda, q, x_max, step)?.value;
    let b = w_ode(lambda, q, x_max + 2.0, step)?.value;
    Ok((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardControls {
    /// Stop when the sup-norm update falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// End of the discretized contour; `None` picks `max(2 sqrt(lambda), sqrt(lambda) + 10)`.
    pub x_cut: Option<f64>,
    /// Multiplies every panel width; 0.5 doubles the node count.
    pub width_scale: f64,
    /// Length of the explicit tail quadrature beyond `x_cut`.
    pub tail_length: f64,
    pub tail_tol: f64,
    /// Adds the `V0` part of the effective potential.
    pub include_v0: bool,
}

impl Default for PicardControls {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            x_cut: None,
            width_scale: 1.0,
            tail_length: 4000.0,
            tail_tol: 1e-6,
            include_v0: false,
        }
    }
}

/// Converged scaled solution `v_+ = u_+ e^{zeta}` on the contour nodes.
#[derive(Debug, Clone)]
pub struct PicardState {
    pub lambda: f64,
    pub points: Vec<MapPoint>,
    pub v_values: Vec<C>,
    /// `a(z)` at the nodes, the starting iterate.
    pub a_values: Vec<C>,
    /// First Picard correction `v^1 - a`.
    pub u1_values: Vec<C>,
    pub iterations: usize,
    pub residual: f64,
    pub u_plus: f64,
    pub u_plus_prime: f64,
    pub z0: f64,
    pub tail_estimate: f64,
    /// Whether `lambda^{1/6} > 2 (|q|_B + 1)`.
    pub admissible: bool,
}

fn rule16() -> &'static PanelRule {
    static RULE: OnceLock<PanelRule> = OnceLock::new();
    RULE.get_or_init(|| PanelRule::new(16))
}

/// Weight turning `V(s) ds` into `dx`: `lambda^{-1/6} (q(x) + v0 / lambda) / k'(t)`.
fn v_weight(p: &MapPoint, lambda: f64, q: &Potential, include_v0: bool) -> f64 {
    let kp = k_prime(p.t).re;
    let mut g = q.q(p.x);
    if include_v0 {
        g += v0_of_t(p.t).re / lambda;
    }
    lambda.powf(-1.0 / 6.0) * g / kp
}

/// Fixed point of `v = a + J V v` on `[z0, z(x_cut)]` for real `lambda`.
pub fn picard_u_plus(lambda: f64, q: &Potential, controls: PicardControls) -> Result<PicardState, WronskianError> {
    if !(lambda > 0.0) {
        return Err(WronskianError::InvalidLambda(lambda));
    }
    let lc = C::new(lambda, 0.0);
    let rl = lambda.sqrt();
    let x_cut = controls.x_cut.unwrap_or((2.0 * rl).max(rl + 10.0));
    let tmax = q.max_frequency();
    let width = |x: f64| {
        let zp = (x * x - lambda).abs().sqrt();
        controls.width_scale * (4.0 / (2.0 * zp + tmax)).min(1.0)
    };
    let rule = rule16();
    let grid = PanelGrid::build(0.0, x_cut, &[rl], rule, width);
    let np = rule.len();
    let panels = grid.panels();
    let points: Vec<MapPoint> = grid.x.iter().map(|&x| z_of_x(x, lc)).collect();
    let airy: Vec<ScaledAiry> = points.iter().map(|p| airy_scaled(p.z)).collect();
    let g: Vec<f64> = points.iter().map(|p| v_weight(p, lambda, q, controls.include_v0)).collect();
    let edge_zeta: Vec<C> = grid.edges.iter().map(|&x| zeta(z_of_x(x, lc).z)).collect();
    // e^{2(zeta_{L_P} - zeta_j)} for node j of panel P
    let e_node: Vec<C> = (0..points.len())
        .map(|j| (2.0 * (edge_zeta[j / np] - airy[j].zeta)).exp())
        .collect();
    let e_edge: Vec<C> = (0..panels)
        .map(|p| (2.0 * (edge_zeta[p] - edge_zeta[p + 1])).exp())
        .collect();
    let a: Vec<C> = airy.iter().map(|s| s.ai).collect();

    let (tail_a, tail_b, tail_estimate) = picard_tail(lambda, q, x_cut, controls, tmax)?;
    if tail_estimate > controls.tail_tol {
        return Err(WronskianError::Truncation {
            estimate: tail_estimate,
            tol: controls.tail_tol,
        });
    }

    // suffix integrals A (with exponential weight) and B at every node and at x = 0
    let apply = |v: &[C]| -> (Vec<C>, Vec<C>, C, C) {
        let mut big_a = vec![C::new(0.0, 0.0); v.len()];
        let mut big_b = vec![C::new(0.0, 0.0); v.len()];
        let mut ca = tail_a;
        let mut cb = tail_b;
        for p in (0..panels).rev() {
            let hw = 0.5 * (grid.edges[p + 1] - grid.edges[p]);
            let idx = p * np..(p + 1) * np;
            let fa: Vec<C> = idx.clone().map(|j| airy[j].ai * g[j] * v[j] * e_node[j]).collect();
            let fb: Vec<C> = idx.clone().map(|j| airy[j].bi * g[j] * v[j]).collect();
            let tot_a: C = fa.iter().zip(&rule.weights).map(|(f, w)| f * w).sum::<C>() * hw;
            let tot_b: C = fb.iter().zip(&rule.weights).map(|(f, w)| f * w).sum::<C>() * hw;
            let next_a = e_edge[p] * ca;
            for (jj, j) in idx.enumerate() {
                let row = &rule.cumulative[jj];
                let cum_a: C = fa.iter().zip(row).map(|(f, w)| f * w).sum::<C>() * hw;
                let cum_b: C = fb.iter().zip(row).map(|(f, w)| f * w).sum::<C>() * hw;
                big_a[j] = (tot_a - cum_a + next_a) / e_node[j];
                big_b[j] = tot_b - cum_b + cb;
            }
            ca = tot_a + next_a;
            cb += tot_b;
        }
        (big_a, big_b, ca, cb)
    };

    let update = |v: &[C]| -> (Vec<C>, C, C) {
        let (big_a, big_b, a0, b0) = apply(v);
        let next = (0..v.len())
            .map(|j| a[j] - PI * airy[j].bi * big_a[j] + PI * airy[j].ai * big_b[j])
            .collect();
        (next, a0, b0)
    };

    let mut v = a.clone();
    let mut u1 = vec![C::new(0.0, 0.0); v.len()];
    let mut iterations = 0;
    let mut growth = 0;
    let mut prev_update = f64::INFINITY;
    let (a0, b0, residual) = loop {
        let (next, na0, nb0) = update(&v);
        let change = next
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if iterations == 0 {
            u1 = next.iter().zip(&a).map(|(x, y)| x - y).collect();
        }
        if change < controls.tol {
            v = next;
            break (na0, nb0, change);
        }
        iterations += 1;
        growth = if change > prev_update { growth + 1 } else { 0 };
        if growth >= 3 || !change.is_finite() {
            return Err(WronskianError::Divergence { iterations, update: change });
        }
        if iterations >= controls.max_iter {
            return Err(WronskianError::NoConvergence {
                iterations,
                update: change,
                tol: controls.tol,
            });
        }
        prev_update = change;
        v = next;
    };
    // values at z0 from the integrals over the whole contour
    let s0 = airy_scaled(crate::quasiclassical_map::z0(lc));
    let v0 = s0.ai - PI * s0.bi * a0 + PI * s0.ai * b0;
    let dv0 = s0.ai_prime - PI * s0.bi_prime * a0 + PI * s0.ai_prime * b0;
    let phase = (-s0.zeta).exp();
    let admissible = q
        .b_norm()
        .map(|b| lambda.powf(1.0 / 6.0) > 2.0 * (b + 1.0))
        .unwrap_or(false);
    Ok(PicardState {
        lambda,
        points,
        v_values: v,
        a_values: a,
        u1_values: u1,
        iterations,
        residual,
        u_plus: (v0 * phase).re,
        u_plus_prime: (dv0 * phase).re,
        z0: crate::quasiclassical_map::z0(lc).re,
        tail_estimate,
        admissible,
    })
}

/// First-order tails beyond `x_cut` with `v ~ a`:
/// `int a^2 V e^{2(zeta_cut - zeta)} ds` and `int a b V ds`, the latter closed by
/// one integration by parts against `q1`. Returns the two tails and an estimate
/// of the neglected remainder.
fn picard_tail(
    lambda: f64,
    q: &Potential,
    x_cut: f64,
    controls: PicardControls,
    tmax: f64,
) -> Result<(C, C, f64), WronskianError> {
    let lc = C::new(lambda, 0.0);
    let x_far = x_cut + controls.tail_length;
    let half = x_cut + 0.5 * controls.tail_length;
    let width = (0.5 * PI / tmax.max(1.0)).min(1.0);
    let grid = PanelGrid::build(x_cut, x_far, &[half], rule16(), |_| width);
    let zc = zeta(z_of_x(x_cut, lc).z);
    let mut ta = C::new(0.0, 0.0);
    let mut tb = C::new(0.0, 0.0);
    let mut tb_half = C::new(0.0, 0.0);
    for (x, w) in grid.x.iter().zip(&grid.w) {
        let p = z_of_x(*x, lc);
        let s = airy_scaled(p.z);
        let gw = v_weight(&p, lambda, q, controls.include_v0);
        let decay = (2.0 * (zc - s.zeta)).exp();
        if decay.norm() > 1e-300 {
            ta += s.ai * s.ai * gw * decay * *w;
        }
        let t = s.ai * s.bi * gw * *w;
        tb += t;
        if *x < half {
            tb_half += t;
        }
    }
    // int_X^inf G q dx ~ -G(X) q1(X), G = a b lambda^{-1/6} / k'
    let endpoint = |x: f64| {
        let p = z_of_x(x, lc);
        let s = airy_scaled(p.z);
        -(s.ai * s.bi) * lambda.powf(-1.0 / 6.0) / k_prime(p.t).re * q.q1(x)
    };
    let full = tb + endpoint(x_far);
    let partial = tb_half + endpoint(half);
    Ok((ta, full, PI * (full - partial).norm()))
}

/// Normalized Wronskian from the two Picard solutions at `z0`:
/// `pi [u_- u_+' + u_-' u_+ + u_- u_+ / (2 k(0) lambda^{2/3})]`.
pub fn reconstruct_w(plus: &PicardState, minus: &PicardState) -> WronskianSample {
    let lambda = plus.lambda;
    let corr = 1.0 / (2.0 * k_at_zero() * lambda.powf(2.0 / 3.0));
    let value = PI
        * (minus.u_plus * plus.u_plus_prime
            + minus.u_plus_prime * plus.u_plus
            + minus.u_plus * plus.u_plus * corr);
    WronskianSample {
        lambda,
        value,
        ln_scale: ln_phi2(lambda),
        variant: Variant::Asym,
    }
}

/// Band residual `|sqrt(pi) |z0|^{1/4} u_+(z0) - [sin(pi(lambda+1)/4) + E_+ cos(pi(lambda+1)/4)]|`.
pub fn band_residual(state: &PicardState, e_plus_value: f64) -> f64 {
    let lambda = state.lambda;
    let (s, c) = (0.25 * PI * (lambda + 1.0)).sin_cos();
    (PI.sqrt() * state.z0.abs().powf(0.25) * state.u_plus - (s + e_plus_value * c)).abs()
}

/// Settings for the ODE variant of the Wronskian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    /// `x_max = sqrt(lambda) + margin`.
    pub margin: f64,
    pub step: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self { margin: 10.0, step: 0.01 }
    }
}

/// Normalized Wronskian of the requested variant at `lambda`.
pub fn w_normalized(lambda: f64, q: &Potential, variant: Variant, ode: OdeSettings) -> Result<f64, WronskianError> {
    match variant {
        Variant::Asym => Ok(w_asym(lambda, q)?.value),
        Variant::Ode => Ok(w_ode(lambda, q, lambda.max(0.0).sqrt() + ode.margin, ode.step)?.value),
        Variant::Unperturbed => Ok(w0_normalized(lambda)),
    }
}

/// Roots of `w` in `[2n + 1 - 0.9, 2n + 1 + 0.9]` for each `n` in the range.
pub fn eigen_roots(
    q: &Potential,
    n_range: std::ops::RangeInclusive<u64>,
    variant: Variant,
    ode: OdeSettings,
) -> Result<EigenTable, WronskianError> {
    let solver = match variant {
        Variant::Asym => Solver::WronskianAsym,
        Variant::Ode => Solver::WronskianOde,
        Variant::Unperturbed => {
            return Err(WronskianError::InvalidLambda(f64::NAN));
        }
    };
    let mut table = EigenTable::default();
    for n in n_range {
        let mu0 = 2.0 * n as f64 + 1.0;
        let (lo, hi) = ((mu0 - 0.9).max(1e-9), mu0 + 0.9);
        let f = |l: f64| w_normalized(l, q, variant, ode);
        match secant_bisect(f, lo, hi, 1e-10) {
            Ok(root) => table.entries.push(EigenEntry {
                n,
                mu: root,
                err_est: 1e-10,
                solver,
            }),
            Err(WronskianError::Root(RootError::NoSignChange { .. })) => table
                .diagnostics
                .push(format!("n={n}: no sign change of w on [{lo}, {hi}]")),
            Err(e) => return Err(e),
        }
    }
    Ok(table)
}

/// Executable forms of the Wronskian properties.
pub mod checks {
    use super::*;
    use crate::asymptotics::mu1_theta;

    /// `mu^1 = -(2/pi) E(mu^0)` to rounding.
    pub fn consistency_identity() -> Result<f64, String> {
        let qs = [
            Potential::cosine(1.0, 1.0).map_err(|e| e.to_string())?,
            Potential::constant(0.4),
            Potential::gaussian(1.0, 0.3, 0.7).map_err(|e| e.to_string())?,
        ];
        let mut worst: f64 = 0.0;
        for q in &qs {
            for n in [0u64, 3, 30, 300] {
                let d = (mu1_theta(n, q) + 2.0 / PI * e_real(2.0 * n as f64 + 1.0, q)).abs();
                worst = worst.max(d);
            }
        }
        if worst > 1e-12 {
            return Err(format!("identity violated by {worst:e}"));
        }
        Ok(worst)
    }

    /// Sign changes do not depend on the positive scale `phi^2`.
    pub fn scale_invariance() -> Result<(), String> {
        let q = Potential::cosine(0.5, 1.0).map_err(|e| e.to_string())?;
        let mut prev: Option<(bool, bool)> = None;
        for i in 0..400 {
            let l = 1.0 + 0.1 * i as f64;
            let s = w_asym(l, &q).map_err(|e| e.to_string())?;
            let signs = (s.value > 0.0, s.raw() > 0.0);
            if signs.0 != signs.1 {
                return Err(format!("raw and normalized signs differ at {l}"));
            }
            prev = Some(signs);
        }
        prev.map(|_| ()).ok_or_else(|| "empty scan".into())
    }

    /// For `q = 0` the Picard solution is `Ai` and the reconstruction tracks `w0`.
    pub fn unperturbed_reconstruction() -> Result<f64, String> {
        let zero = Potential::zero();
        let mut worst: f64 = 0.0;
        for l in [20.0, 30.0, 40.0, 50.0, 60.0] {
            let st = picard_u_plus(l, &zero, PicardControls::default()).map_err(|e| e.to_string())?;
            if st.u1_values.iter().any(|u| u.norm() != 0.0) {
                return Err("u1 must vanish for q = 0".into());
            }
            // even lambda keeps w0 away from its zeros
            let w = reconstruct_w(&st, &st).value;
            let w0 = w0_normalized(l);
            let rel = (w - w0).abs() / w0.abs();
            worst = worst.max(rel * l);
        }
        if worst > 5.0 {
            return Err(format!("relative mismatch times lambda reaches {worst}"));
        }
        Ok(worst)
    }

    /// Asymptotic and ODE sign patterns agree around each `2n + 1`.
    pub fn sign_patterns(q: &Potential, ns: &[u64]) -> Result<(), String> {
        for &n in ns {
            let mu0 = 2.0 * n as f64 + 1.0;
            for i in 0..=18 {
                let l = mu0 - 0.9 + 0.1 * i as f64;
                let a = w_normalized(l, q, Variant::Asym, OdeSettings::default()).map_err(|e| e.to_string())?;
                let o = w_normalized(l, q, Variant::Ode, OdeSettings::default()).map_err(|e| e.to_string())?;
                // skip points too close to either root to call a sign
                if a.abs() > 0.1 && o.abs() > 0.1 && (a > 0.0) != (o > 0.0) {
                    return Err(format!("signs differ at lambda = {l}: asym {a}, ode {o}"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::airy;
    use crate::quasiclassical_map::build_contour;

    #[test]
    fn e_real_trivial() {
        assert_eq!(e_real(10.0, &Potential::zero()), 0.0);
        assert!((e_real(10.0, &Potential::constant(0.3)) + 0.3 * PI / 2.0).abs() < 1e-15);
        checks::consistency_identity().unwrap();
    }

    #[test]
    fn e_contour_zero_and_constant() {
        let lc = C::new(100.0, 0.0);
        let c = contour_for(lc, &Potential::cosine(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(e_contour(lc, &Potential::zero(), &c).unwrap(), C::new(0.0, 0.0));
        let coarse = build_contour(lc, 16, 20.0).unwrap();
        assert!(e_contour(lc, &Potential::cosine(1.0, 3.0).unwrap(), &coarse).is_err());
    }

    #[test]
    fn e_contour_tracks_e_real() {
        let q = Potential::cosine(1.0, 1.0).unwrap();
        for l in [50.0, 200.0, 800.0] {
            let lc = C::new(l, 0.0);
            let c = contour_for(lc, &q).unwrap();
            let e = e_contour(lc, &q, &c).unwrap();
            assert!(e.im.abs() < 1e-12, "imaginary part {}", e.im);
            let d = (e.re - e_real(l, &q)).abs() * l.powf(1.0 / 3.0);
            assert!(d <= 5.0, "lambda={l}: scaled gap {d}");
        }
    }

    #[test]
    fn e_contour_self_convergence() {
        let q = Potential::cosine(1.0, 1.0).unwrap();
        let lc = C::new(100.0, 0.0);
        let a = build_contour(lc, 700, 20.0).unwrap();
        let b = build_contour(lc, 1400, 20.0).unwrap();
        let (ea, eb) = (e_contour(lc, &q, &a).unwrap(), e_contour(lc, &q, &b).unwrap());
        assert!((ea - eb).norm() < 1e-8, "{ea} vs {eb}");
    }

    #[test]
    fn w_asym_unperturbed() {
        let s = w_asym(4.0, &Potential::zero()).unwrap();
        assert!((s.value + 1.0).abs() < 1e-15);
        assert!((s.raw() - (-ln_phi2(4.0).exp())).abs() < 1e-12);
        for k in 5..=30 {
            let l = 2.0 * k as f64;
            let r = w_asym(l, &Potential::zero()).unwrap().value / w0_normalized(l);
            assert!((r - 1.0).abs() * l <= 1.0, "lambda={l} ratio={r}");
        }
        let t = eigen_roots(&Potential::zero(), 0..=10, Variant::Asym, OdeSettings::default()).unwrap();
        for e in &t.entries {
            assert!((e.mu - (2 * e.n + 1) as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn w_ode_matches_closed_form() {
        for k in 1..=30 {
            let l = 2.0 * k as f64;
            let s = w_ode(l, &Potential::zero(), l.sqrt() + 10.0, 0.01).unwrap();
            let r = s.value / w0_normalized(l);
            assert!((0.99..=1.01).contains(&r), "lambda={l} ratio={r}");
        }
        assert!(w_ode(9.0, &Potential::zero(), 5.0, 0.01).is_err());
        let s13 = w_ode_sensitivity(8.0, &Potential::zero(), 13.0, 0.01).unwrap();
        let s30 = w_ode_sensitivity(8.0, &Potential::zero(), 30.0, 0.01).unwrap();
        assert!(s13 < 2e-5 && s30 < 2e-6, "{s13} {s30}");
    }

    #[test]
    fn w_ode_roots() {
        let t = eigen_roots(&Potential::zero(), 0..=14, Variant::Ode, OdeSettings::default()).unwrap();
        assert_eq!(t.entries.len(), 15);
        for e in &t.entries {
            assert!((e.mu - (2 * e.n + 1) as f64).abs() < 1e-6, "n={} mu={}", e.n, e.mu);
        }
        let t = eigen_roots(&Potential::constant(0.5), 0..=8, Variant::Ode, OdeSettings::default()).unwrap();
        for e in &t.entries {
            assert!((e.mu - (2 * e.n + 1) as f64 - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn picard_unperturbed_is_airy() {
        let st = picard_u_plus(81.0, &Potential::zero(), PicardControls::default()).unwrap();
        assert_eq!(st.iterations, 0);
        for (v, a) in st.v_values.iter().zip(&st.a_values) {
            assert_eq!(v, a);
        }
        let ai = airy(C::new(st.z0, 0.0)).unwrap();
        assert!((st.u_plus - ai.ai.re).abs() < 1e-12);
        assert!((st.u_plus_prime - ai.ai_prime.re).abs() < 1e-12 * ai.ai_prime.norm().max(1.0));
        checks::unperturbed_reconstruction().unwrap();
    }

    #[test]
    fn picard_cosine_band_and_refinement() {
        let q = Potential::cosine(0.2, 1.0).unwrap();
        let lambda = 81.0;
        let st = picard_u_plus(lambda, &q, PicardControls::default()).unwrap();
        assert!(!st.admissible);
        let fine = picard_u_plus(
            lambda,
            &q,
            PicardControls { width_scale: 0.5, tol: 5e-13, ..PicardControls::default() },
        )
        .unwrap();
        assert!((st.u_plus - fine.u_plus).abs() < 1e-6);
        let lc = C::new(lambda, 0.0);
        let ep = e_plus(&contour_for(lc, &q).unwrap(), &q).re;
        let band = band_residual(&st, ep) * lambda.powf(1.0 / 6.0);
        assert!(band <= 5.0, "band constant {band}");
    }

    #[test]
    fn signs_agree_for_cosine() {
        let q = Potential::cosine(0.3, 1.0).unwrap();
        checks::sign_patterns(&q, &[5, 12, 20]).unwrap();
        checks::scale_invariance().unwrap();
    }
}
