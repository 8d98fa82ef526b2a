//! Langer-type change of variables for `-y'' + (x^2 - lambda) y`.
//!
//! With `t = x / sqrt(lambda)`:
//! `xi(t) = int_1^t sqrt(s^2 - 1) ds`, `k(t) = ((3/2) xi(t))^{2/3}` and
//! `z(x, lambda) = lambda^{2/3} k(t)`, so that `(2/3) z^{3/2} = lambda xi(t)`.
//! `t` ranges over the closed quadrant `arg t in [-pi/2, 0]`. On that quadrant
//! `sqrt(t^2 - 1)` is principal except on the negative axis, where the
//! lower-side value `-i sqrt(1 - t^2)` is taken; this makes `xi(0) = i pi/4`
//! and `k(0) = -(3 pi / 8)^{2/3}`.

use crate::potential::Potential;
use crate::quad::{PanelGrid, PanelRule};
use crate::special_functions::arg_lower;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("Newton inversion of k(t) did not converge for k = {k} (best residual {residual:e})")]
    NoConvergence { k: C, residual: f64 },
    #[error("invalid contour configuration: {0}")]
    InvalidConfig(String),
    #[error("contour quadrature failed its weight-sum check: {0}")]
    WeightCheck(String),
}

/// Half of the admissible upper bound `(4/3) arccos(2^{-1/3})`.
pub fn delta() -> f64 {
    0.5 * (4.0 / 3.0) * 2f64.powf(-1.0 / 3.0).acos()
}

/// `k(0) = -(3 pi / 8)^{2/3}`.
pub fn k_at_zero() -> f64 {
    -(3.0 * PI / 8.0).powf(2.0 / 3.0)
}

const SERIES_SWITCH: f64 = 0.05;
const SERIES_TERMS: usize = 32;

/// `sqrt(w)` with the lower-side value on the negative axis.
fn sqrt_lower(w: C) -> C {
    if w.im == 0.0 && w.re < 0.0 {
        C::new(0.0, -(-w.re).sqrt())
    } else {
        w.sqrt()
    }
}

fn sqrt_tm1(t: C) -> C {
    sqrt_lower(t * t - 1.0)
}

fn is_real(t: C) -> bool {
    t.im == 0.0
}

/// Coefficients `c_n` with `xi = sqrt(2) u^{3/2} sum c_n u^n`, `u = t - 1`, and
/// `f_n` with `k = 2^{1/3} sum f_n u^{n+1}`.
fn turning_series() -> &'static (Vec<f64>, Vec<f64>) {
    static SERIES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    SERIES.get_or_init(|| {
        let mut c = Vec::with_capacity(SERIES_TERMS);
        let mut binom = 1.0;
        for n in 0..SERIES_TERMS {
            if n > 0 {
                binom *= (0.5 - (n as f64 - 1.0)) / n as f64;
            }
            c.push(binom * 0.5f64.powi(n as i32) / (n as f64 + 1.5));
        }
        // h = 1 + S with S = sum_{n >= 1} (3/2) c_n u^n; f = h^{2/3}
        let h: Vec<f64> = c.iter().map(|v| 1.5 * v).collect();
        let alpha = 2.0 / 3.0;
        let mut f = vec![1.0; SERIES_TERMS];
        for n in 1..SERIES_TERMS {
            let mut s = 0.0;
            for k in 1..=n {
                s += ((alpha + 1.0) * k as f64 - n as f64) * h[k] * f[n - k];
            }
            f[n] = s / n as f64;
        }
        (c, f)
    })
}

/// `xi(t) = (1/2)(t sqrt(t^2 - 1) - log(t + sqrt(t^2 - 1)))`.
pub fn xi(t: C) -> C {
    let u = t - 1.0;
    if u.norm() < SERIES_SWITCH {
        let (c, _) = turning_series();
        let mut s = C::new(0.0, 0.0);
        for cn in c.iter().rev() {
            s = s * u + cn;
        }
        let v = u * sqrt_lower(u) * s * std::f64::consts::SQRT_2;
        return if is_real(t) {
            if t.re >= 1.0 {
                C::new(v.re, 0.0)
            } else {
                C::new(0.0, v.im)
            }
        } else {
            v
        };
    }
    if is_real(t) {
        let x = t.re;
        if x > 1.0 {
            let r = (x * x - 1.0).sqrt();
            return C::new(0.5 * (x * r - x.acosh()), 0.0);
        }
        if x >= 0.0 {
            let r = (1.0 - x * x).sqrt();
            return C::new(0.0, 0.5 * (x.acos() - x * r));
        }
    }
    xi_closed(t)
}

fn xi_closed(t: C) -> C {
    let r = sqrt_tm1(t);
    (t * r - (t + r).ln()) * 0.5
}

/// Argument of `xi` shifted into `(-2 pi, 0]`.
fn xi_arg(xi: C) -> f64 {
    let a = xi.arg();
    if a > 0.0 {
        a - 2.0 * PI
    } else {
        a
    }
}

/// `k(t)` together with `k'`, `k''`, `k'''`.
#[derive(Debug, Clone, Copy)]
pub struct KJet {
    pub k: C,
    pub k1: C,
    pub k2: C,
    pub k3: C,
}

/// `k(t) = ((3/2) xi(t))^{2/3}`.
pub fn k_of_t(t: C) -> C {
    let u = t - 1.0;
    if u.norm() < SERIES_SWITCH {
        return series_jet(u, t).k;
    }
    k_from_xi(xi(t), t)
}

fn k_from_xi(x: C, t: C) -> C {
    let m = (1.5 * x.norm()).powf(2.0 / 3.0);
    if is_real(t) && t.re >= 0.0 {
        return if t.re >= 1.0 {
            C::new(m, 0.0)
        } else {
            C::new(-m, 0.0)
        };
    }
    C::from_polar(m, 2.0 / 3.0 * xi_arg(x))
}

fn series_jet(u: C, t: C) -> KJet {
    let (_, f) = turning_series();
    let s = 2f64.powf(1.0 / 3.0);
    let (mut k, mut k1, mut k2, mut k3) = (C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
    // k = s sum f_n u^{n+1}; Horner on each derivative
    for n in (0..SERIES_TERMS).rev() {
        let p = (n + 1) as f64;
        k = k * u + f[n];
        k1 = k1 * u + f[n] * p;
        if n >= 1 {
            k2 = k2 * u + f[n] * p * (p - 1.0);
        }
        if n >= 2 {
            k3 = k3 * u + f[n] * p * (p - 1.0) * (p - 2.0);
        }
    }
    let mut jet = KJet {
        k: k * u * s,
        k1: k1 * s,
        k2: k2 * s,
        k3: k3 * s,
    };
    if is_real(t) {
        jet.k.im = 0.0;
        jet.k1.im = 0.0;
        jet.k2.im = 0.0;
        jet.k3.im = 0.0;
    }
    jet
}

/// `k` and its first three derivatives in `t`.
pub fn k_jet(t: C) -> KJet {
    let u = t - 1.0;
    if u.norm() < SERIES_SWITCH {
        return series_jet(u, t);
    }
    let k = k_from_xi(xi(t), t);
    // k k'^2 = t^2 - 1 and k' = sqrt(t^2 - 1) / sqrt(k)
    let sk = if is_real(t) && t.re >= 0.0 && t.re < 1.0 {
        C::new(0.0, -(-k.re).sqrt())
    } else {
        C::from_polar(k.norm().sqrt(), 0.5 * k.arg())
    };
    let mut p = sqrt_tm1(t) / sk;
    if is_real(t) && t.re >= 0.0 {
        p.im = 0.0;
    }
    let two_kp = 2.0 * k * p;
    let p1 = (2.0 * t - p * p * p) / two_kp;
    let p2 = (2.0 - 5.0 * p * p * p1 - 2.0 * k * p1 * p1) / two_kp;
    KJet {
        k,
        k1: p,
        k2: p1,
        k3: p2,
    }
}

/// `dk/dt`.
pub fn k_prime(t: C) -> C {
    k_jet(t).k1
}

/// `v0 = t'(k)^{3/2} d^2/dt^2 (k'(t))^{-1/2}` written through `p = k'`:
/// `(3/4) p'^2 / p^4 - (1/2) p'' / p^3`.
pub fn v0_of_t(t: C) -> C {
    let j = k_jet(t);
    let p = j.k1;
    let p2 = p * p;
    0.75 * j.k2 * j.k2 / (p2 * p2) - 0.5 * j.k3 / (p2 * p)
}

/// Inverse of `k_of_t` on the quadrant, by damped Newton iteration from several
/// seeds.
pub fn t_of_k(k: C) -> Result<C, MapError> {
    let tol = 1e-12 * (1.0 + k.norm());
    let asym = {
        let m = (4.0f64 / 3.0).sqrt() * k.norm().powf(0.75);
        let a = (0.75 * arg_lower(k)).max(-0.5 * PI);
        C::from_polar(m, a)
    };
    let seeds = [
        asym,
        C::new(1.0, 0.0) + k / 2f64.powf(1.0 / 3.0),
        C::new(0.0, 0.0),
        C::new(0.5, -0.5),
        C::new(0.0, -1.0) * (1.0 + k.norm().sqrt()),
    ];
    let mut best = (f64::INFINITY, C::new(0.0, 0.0));
    for seed in seeds {
        let mut t = project(seed);
        let mut res = (k_of_t(t) - k).norm();
        for _ in 0..50 {
            if res <= tol {
                break;
            }
            let j = k_jet(t);
            if j.k1.norm() == 0.0 {
                break;
            }
            let step = (j.k - k) / j.k1;
            let mut scale = 1.0;
            let mut moved = false;
            for _ in 0..30 {
                let cand = project(t - step * scale);
                let r = (k_of_t(cand) - k).norm();
                if r < res {
                    t = cand;
                    res = r;
                    moved = true;
                    break;
                }
                scale *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if res <= tol {
            return Ok(t);
        }
        if res < best.0 {
            best = (res, t);
        }
    }
    Err(MapError::NoConvergence { k, residual: best.0 })
}

fn project(t: C) -> C {
    C::new(t.re.max(0.0), t.im.min(0.0))
}

/// One point of the contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint {
    pub x: f64,
    pub t: C,
    pub k: C,
    pub z: C,
    pub xi: C,
}

/// `lambda^p` with the principal branch, exact for positive real `lambda`.
pub fn lambda_pow(lambda: C, p: f64) -> C {
    if lambda.im == 0.0 && lambda.re > 0.0 {
        return C::new(lambda.re.powf(p), 0.0);
    }
    C::from_polar(lambda.norm().powf(p), p * lambda.arg())
}

/// `z(x, lambda) = lambda^{2/3} k(x / sqrt(lambda))`.
pub fn z_of_x(x: f64, lambda: C) -> MapPoint {
    let t = C::new(x, 0.0) / lambda_pow(lambda, 0.5);
    let t = if lambda.im == 0.0 { C::new(t.re, 0.0) } else { t };
    let xv = xi(t);
    let k = if (t - 1.0).norm() < SERIES_SWITCH {
        series_jet(t - 1.0, t).k
    } else {
        k_from_xi(xv, t)
    };
    let z = if lambda.im == 0.0 && is_real(k) {
        C::new(lambda.re.powf(2.0 / 3.0) * k.re, 0.0)
    } else {
        C::from_polar(
            lambda.norm().powf(2.0 / 3.0) * k.norm(),
            2.0 / 3.0 * lambda.arg() + arg_lower(k),
        )
    };
    MapPoint { x, t, k, z, xi: xv }
}

/// `z0 = -lambda^{2/3} (3 pi / 8)^{2/3}`, the image of `x = 0`.
pub fn z0(lambda: C) -> C {
    let m = lambda.norm().powf(2.0 / 3.0) * (3.0 * PI / 8.0).powf(2.0 / 3.0);
    if lambda.im == 0.0 && lambda.re > 0.0 {
        return C::new(-m, 0.0);
    }
    C::from_polar(m, 2.0 / 3.0 * lambda.arg() - PI)
}

/// `dz/dx = lambda^{1/6} k'(t)`.
pub fn dz_dx(pt: &MapPoint, lambda: C) -> C {
    lambda_pow(lambda, 1.0 / 6.0) * k_prime(pt.t)
}

/// Effective potentials at a contour point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effective {
    pub v0: C,
    pub vq: C,
    pub rho: C,
}

/// `V0 = v0 / lambda^{4/3}`, `Vq = rho^2 q(x) / lambda^{1/3}`, `rho = 1 / k'(t)`.
pub fn effective_potentials(pt: &MapPoint, lambda: C, q: &Potential) -> Effective {
    let rho = k_prime(pt.t).inv();
    let qv = q.q(pt.x);
    Effective {
        v0: v0_of_t(pt.t) / lambda_pow(lambda, 4.0 / 3.0),
        vq: rho * rho * qv / lambda_pow(lambda, 1.0 / 3.0),
        rho,
    }
}

/// Splitting point `x_*` of the contour.
pub fn x_star(lambda: C) -> Result<f64, MapError> {
    validate_lambda(lambda)?;
    let th = lambda.arg();
    let scale = lambda.norm().sqrt();
    if th == 0.0 {
        return Ok(scale);
    }
    if th < delta() {
        // unique minimum of |z| along the contour
        let f = |x: f64| z_of_x(x, lambda).z.norm();
        let hi = 4.0 * scale;
        let n = 400;
        let mut best = 0;
        let mut fbest = f64::INFINITY;
        for i in 0..=n {
            let v = f(hi * i as f64 / n as f64);
            if v < fbest {
                fbest = v;
                best = i;
            }
        }
        let mut a = hi * (best.max(1) - 1) as f64 / n as f64;
        let mut b = hi * (best + 1).min(n) as f64 / n as f64;
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        for _ in 0..200 {
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
            if b - a < 1e-13 * scale {
                break;
            }
        }
        return Ok(0.5 * (a + b));
    }
    // intersection with arg z = -pi/3
    let target = -PI / 3.0;
    let h = |x: f64| arg_lower(z_of_x(x, lambda).z) - target;
    if h(0.0) >= -1e-14 {
        return Ok(0.0);
    }
    let mut hi = scale;
    while h(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(MapError::InvalidConfig(format!(
                "arg z never reaches -pi/3 for lambda = {lambda}"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * scale {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn validate_lambda(lambda: C) -> Result<(), MapError> {
    if lambda.norm() == 0.0 || !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(MapError::InvalidConfig(format!("lambda = {lambda} must be nonzero")));
    }
    if lambda.im < 0.0 {
        return Err(MapError::InvalidConfig(format!(
            "lambda = {lambda} must lie in the closed upper half-plane"
        )));
    }
    Ok(())
}

/// Contour sample with quadrature weights in `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPoint {
    pub point: MapPoint,
    /// Weight for `int f(x) dx`.
    pub weight: f64,
    /// `dz/dx` at the point.
    pub dz_dx: C,
}

#[derive(Debug, Clone)]
pub struct Contour {
    pub lambda: C,
    pub points: Vec<ContourPoint>,
    /// Index of the zero-weight point at `z_*`.
    pub star_index: usize,
    pub x_star: f64,
    pub t_star: C,
    pub z_star: C,
    pub z0: C,
    pub delta: f64,
    pub x_max: f64,
}

impl Contour {
    /// Points of the turning-point side, `z0 .. z_*`.
    pub fn minus_side(&self) -> &[ContourPoint] {
        &self.points[..=self.star_index]
    }

    /// Points of the tail side, `z_* .. z(x_max)`.
    pub fn plus_side(&self) -> &[ContourPoint] {
        &self.points[self.star_index..]
    }
}

/// Samples the contour from `x = 0` to `x_max` on Gauss-Legendre panels with
/// eight-fold refinement within `0.1 sqrt|lambda|` of `x_*`; roughly
/// `n_points` nodes in total.
pub fn build_contour(lambda: C, n_points: usize, x_max: f64) -> Result<Contour, MapError> {
    validate_lambda(lambda)?;
    if n_points < 16 {
        return Err(MapError::InvalidConfig(format!(
            "need at least 16 contour points, got {n_points}"
        )));
    }
    let xs = x_star(lambda)?;
    if !(x_max > xs) {
        return Err(MapError::InvalidConfig(format!(
            "x_max = {x_max} does not exceed x_* = {xs}"
        )));
    }
    let rule = rule16();
    let base = 16.0 * x_max / n_points as f64;
    let window = 0.1 * lambda.norm().sqrt();
    let width = |x: f64| {
        if (x - xs).abs() < window {
            base / 8.0
        } else {
            base
        }
    };
    let lo_break = (xs - window).max(0.0);
    let hi_break = (xs + window).min(x_max);
    let left = PanelGrid::build(0.0, xs.max(1e-300), &[lo_break], rule, width);
    let right = PanelGrid::build(xs, x_max, &[hi_break], rule, width);
    let make = |x: f64, w: f64| {
        let point = z_of_x(x, lambda);
        ContourPoint {
            point,
            weight: w,
            dz_dx: dz_dx(&point, lambda),
        }
    };
    let mut points = Vec::with_capacity(left.x.len() + right.x.len() + 1);
    if xs > 0.0 {
        for (x, w) in left.x.iter().zip(&left.w) {
            points.push(make(*x, *w));
        }
    }
    let star_index = points.len();
    points.push(make(xs, 0.0));
    for (x, w) in right.x.iter().zip(&right.w) {
        points.push(make(*x, *w));
    }
    let c = Contour {
        lambda,
        star_index,
        x_star: xs,
        t_star: points[star_index].point.t,
        z_star: points[star_index].point.z,
        z0: z0(lambda),
        delta: delta(),
        points,
        x_max,
    };
    let left_sum: f64 = c.minus_side().iter().map(|p| p.weight).sum();
    let right_sum: f64 = c.plus_side().iter().map(|p| p.weight).sum();
    if (left_sum - xs).abs() > 1e-12 * (1.0 + xs) || (right_sum - (x_max - xs)).abs() > 1e-12 * x_max {
        return Err(MapError::WeightCheck(format!(
            "weights sum to {left_sum} and {right_sum}, expected {xs} and {}",
            x_max - xs
        )));
    }
    Ok(c)
}

fn rule16() -> &'static PanelRule {
    static RULE: OnceLock<PanelRule> = OnceLock::new();
    RULE.get_or_init(|| PanelRule::new(16))
}

/// Executable forms of the contour geometry properties.
pub mod checks {
    use super::*;
    use rand::Rng;

    fn random_upper_lambda(rng: &mut impl Rng) -> C {
        let r = 10.0 * 10f64.powf(2.0 * rng.gen::<f64>());
        let th = PI * rng.gen::<f64>();
        C::from_polar(r, th)
    }

    fn sampled(lambda: C, n: usize) -> (f64, Vec<MapPoint>) {
        let xs = x_star(lambda).expect("valid lambda");
        let hi = xs + 4.0 * lambda.norm().sqrt() + 10.0;
        let pts = (0..=n).map(|i| z_of_x(hi * i as f64 / n as f64, lambda)).collect();
        (xs, pts)
    }

    /// `(2/3) z^{3/2} = lambda xi(t)` along sampled contours.
    pub fn zeta_identity(rng: &mut impl Rng) -> Result<(), String> {
        for _ in 0..50 {
            let lambda = random_upper_lambda(rng);
            let (_, pts) = sampled(lambda, 200);
            for p in pts {
                let lhs = crate::special_functions::zeta(p.z);
                let rhs = lambda * p.xi;
                if (lhs - rhs).norm() > 1e-10 * rhs.norm().max(1.0) {
                    return Err(format!("lambda={lambda} x={} lhs={lhs} rhs={rhs}", p.x));
                }
            }
        }
        Ok(())
    }

    /// `|z|` strictly increases beyond `x_*`.
    pub fn monotone_modulus(rng: &mut impl Rng) -> Result<(), String> {
        for _ in 0..50 {
            let lambda = random_upper_lambda(rng);
            let (xs, pts) = sampled(lambda, 400);
            let tail: Vec<f64> = pts.iter().filter(|p| p.x > xs).map(|p| p.z.norm()).collect();
            if tail.windows(2).any(|w| w[1] <= w[0]) {
                return Err(format!("|z| not increasing after x_* for lambda={lambda}"));
            }
        }
        Ok(())
    }

    /// `h(x) = |exp((2/3) z^{3/2})|` is non-decreasing.
    pub fn exponential_weight(rng: &mut impl Rng) -> Result<(), String> {
        for i in 0..50 {
            let lambda = if i == 0 { C::new(50.0, 0.0) } else { random_upper_lambda(rng) };
            let (xs, pts) = sampled(lambda, 400);
            let from = if lambda.im == 0.0 { xs } else { 0.0 };
            let h: Vec<f64> = pts
                .iter()
                .filter(|p| p.x >= from)
                .map(|p| (lambda * p.xi).re)
                .collect();
            if h.windows(2).any(|w| w[1] < w[0] - 1e-12 * (1.0 + w[0].abs())) {
                return Err(format!("Re(lambda xi) decreases for lambda={lambda}"));
            }
        }
        Ok(())
    }

    /// `arg z in [-pi + (4/3) theta, 0)` with `lambda = |lambda| e^{2 i theta}`.
    pub fn sector_containment(rng: &mut impl Rng) -> Result<(), String> {
        for _ in 0..50 {
            let lambda = random_upper_lambda(rng);
            if lambda.arg() == 0.0 {
                continue;
            }
            let th = 0.5 * lambda.arg();
            let (_, pts) = sampled(lambda, 300);
            for p in pts {
                let a = arg_lower(p.z);
                if a < -PI + 4.0 / 3.0 * th - 1e-12 || a >= 0.0 {
                    return Err(format!("arg z = {a} outside sector for lambda={lambda}"));
                }
            }
        }
        Ok(())
    }

    /// `inf |z| >= |lambda|^{2/3} sin(theta)`.
    pub fn minimum_modulus(rng: &mut impl Rng) -> Result<(), String> {
        for _ in 0..50 {
            let lambda = random_upper_lambda(rng);
            let th = 0.5 * lambda.arg();
            let bound = lambda.norm().powf(2.0 / 3.0) * th.sin();
            let (_, pts) = sampled(lambda, 400);
            let m = pts.iter().map(|p| p.z.norm()).fold(f64::INFINITY, f64::min);
            if m < bound * (1.0 - 1e-12) {
                return Err(format!("min |z| = {m} below {bound} for lambda={lambda}"));
            }
        }
        Ok(())
    }

    /// `|xi(t) - (1/2)(t^2 - 1/2 - log 2t)| <= C |t|^{-2}` with `C <= 1`.
    pub fn xi_asymptotics() -> Result<(), String> {
        let mut c_fit: f64 = 0.0;
        for i in 0..40 {
            let r = 5.0 * 1.15f64.powi(i);
            for j in 0..=10 {
                let t = C::from_polar(r, -0.5 * PI * j as f64 / 10.0);
                let approx = 0.5 * (t * t - 0.5 - (2.0 * t).ln());
                c_fit = c_fit.max((xi(t) - approx).norm() * r * r);
            }
        }
        if c_fit > 1.0 {
            return Err(format!("fitted constant {c_fit} exceeds 1"));
        }
        Ok(())
    }

    /// `Im(e^{2 i theta} xi(r e^{-i theta}))` strictly decreases in `r` for
    /// `theta < pi/2`; at `theta = pi/2` it is constant.
    pub fn rotated_xi_decreasing() -> Result<(), String> {
        for j in 1..=20 {
            let th = 0.5 * PI * j as f64 / 20.0;
            let rot = C::from_polar(1.0, 2.0 * th);
            let mut prev = f64::INFINITY;
            for i in 1..=400 {
                let r = 0.02 * i as f64;
                let v = (rot * xi(C::from_polar(r, -th))).im;
                let slack = if j == 20 { 1e-13 } else { 0.0 };
                if v >= prev + slack {
                    return Err(format!("not decreasing at theta={th} r={r}"));
                }
                prev = v;
            }
        }
        Ok(())
    }

    /// `t_of_k(k_of_t(t)) = t` on sampled `t`.
    pub fn k_round_trip(rng: &mut impl Rng) -> Result<(), String> {
        for _ in 0..200 {
            let r = 6.0 * rng.gen::<f64>();
            let a = -0.5 * PI * rng.gen::<f64>();
            let t = C::from_polar(r, a);
            let back = t_of_k(k_of_t(t)).map_err(|e| e.to_string())?;
            if (back - t).norm() > 1e-10 * (1.0 + t.norm()) {
                return Err(format!("round trip t={t} -> {back}"));
            }
        }
        Ok(())
    }

    /// `|t_*| <= 1 / sin(pi/3)` for purely imaginary `lambda`.
    pub fn t_star_bound() -> Result<(), String> {
        for &r in &[5.0, 25.0, 100.0, 1000.0] {
            let lambda = C::new(0.0, r);
            let xs = x_star(lambda).map_err(|e| e.to_string())?;
            let t = z_of_x(xs, lambda).t;
            if t.norm() > 1.0 / (PI / 3.0).sin() + 1e-12 {
                return Err(format!("|t_*| = {} for lambda={lambda}", t.norm()));
            }
        }
        Ok(())
    }

    /// `|v0(k)| <= C (1 + |k|)^{-2}` with `C <= 10`.
    pub fn v0_envelope() -> Result<(), String> {
        let mut c_fit: f64 = 0.0;
        for i in 0..=60 {
            let r = 0.01 * 1.15f64.powi(i);
            for j in 0..=8 {
                let t = C::from_polar(r, -0.5 * PI * j as f64 / 8.0);
                let k = k_of_t(t);
                c_fit = c_fit.max(v0_of_t(t).norm() * (1.0 + k.norm()).powi(2));
            }
        }
        if c_fit > 10.0 {
            return Err(format!("fitted constant {c_fit} exceeds 10"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi(C::new(1.0, 0.0)), C::new(0.0, 0.0));
        assert!((xi(C::new(0.0, 0.0)) - C::new(0.0, PI / 4.0)).norm() < 1e-15);
        let oracle = adaptive_simpson(&|s: f64| (s * s - 1.0).sqrt(), 1.0, 2.0, 1e-13);
        assert!((xi(C::new(2.0, 0.0)).re - oracle).abs() < 1e-10);
        assert!((oracle - 1.073_571_859_106_47).abs() < 1e-9);
    }

    #[test]
    fn xi_series_agrees_with_closed_form() {
        for j in 0..=8 {
            let dir = C::from_polar(1.0, -PI * j as f64 / 8.0);
            let t = C::new(1.0, 0.0) + dir * (SERIES_SWITCH * 0.99);
            let (a, b) = (xi(t), xi_closed(t));
            assert!((a - b).norm() < 1e-13, "dir {dir}: {a} vs {b}");
        }
    }

    #[test]
    fn k_examples() {
        assert!((k_of_t(C::new(0.0, 0.0)).re - k_at_zero()).abs() < 1e-14);
        let t = 30.0;
        let k = k_of_t(C::new(t, 0.0)).re;
        let lead = 0.75f64.powf(2.0 / 3.0) * t.powf(4.0 / 3.0);
        assert!((k / lead - 1.0).abs() <= 0.1);
    }

    #[test]
    fn k_derivatives_match_finite_differences() {
        for &t in &[C::new(0.3, 0.0), C::new(2.0, 0.0), C::new(1.02, -0.01), C::new(0.7, -1.3), C::new(4.0, -2.0)] {
            let h = 1e-4;
            let j = k_jet(t);
            let jp = k_jet(t + h);
            let jm = k_jet(t - h);
            let fd1 = (k_of_t(t + h) - k_of_t(t - h)) / (2.0 * h);
            assert!((fd1 - j.k1).norm() < 1e-7 * (1.0 + j.k1.norm()), "t={t}");
            let fd2 = (jp.k1 - jm.k1) / (2.0 * h);
            assert!((fd2 - j.k2).norm() < 1e-7 * (1.0 + j.k2.norm()), "t={t}");
            let fd3 = (jp.k2 - jm.k2) / (2.0 * h);
            assert!((fd3 - j.k3).norm() < 1e-6 * (1.0 + j.k3.norm()), "t={t}");
        }
    }

    #[test]
    fn v0_matches_six_point_difference() {
        // d^2/dt^2 of (k')^{-1/2} by a sixth-order central stencil
        let t = 2.0;
        let g = |s: f64| k_prime(C::new(s, 0.0)).re.powf(-0.5);
        let h = 1e-2;
        let c = [2.0 / 180.0, -27.0 / 180.0, 270.0 / 180.0, -490.0 / 180.0];
        let d2 = (c[0] * (g(t - 3.0 * h) + g(t + 3.0 * h))
            + c[1] * (g(t - 2.0 * h) + g(t + 2.0 * h))
            + c[2] * (g(t - h) + g(t + h))
            + c[3] * g(t))
            / (h * h);
        let p = k_prime(C::new(t, 0.0)).re;
        let fd = d2 * p.powf(-1.5);
        let an = v0_of_t(C::new(t, 0.0)).re;
        assert!((fd - an).abs() < 1e-6 * an.abs(), "fd={fd} analytic={an}");
    }

    #[test]
    fn v0_is_finite_at_turning_point() {
        let a = v0_of_t(C::new(1.0, 0.0));
        let b = v0_of_t(C::new(1.0 + 0.051, 0.0));
        let c = v0_of_t(C::new(1.0 - 0.051, 0.0));
        assert!(a.norm().is_finite());
        assert!((a - b).norm() < 0.05 && (a - c).norm() < 0.05);
    }

    #[test]
    fn z_examples() {
        let lambda = C::new(9.0, 0.0);
        let p0 = z_of_x(0.0, lambda);
        assert!((p0.z - z0(lambda)).norm() < 1e-12 * z0(lambda).norm());
        assert_eq!(p0.z.im, 0.0);
        assert!(z_of_x(3.0, lambda).z.norm() < 1e-14);
        let p = z_of_x(6.0, lambda);
        let want = 9f64.powf(2.0 / 3.0) * k_of_t(C::new(2.0, 0.0)).re;
        assert!((p.z.re - want).abs() < 1e-12);
        let zt = crate::special_functions::zeta(p.z);
        assert!((zt.re - 9.0 * xi(C::new(2.0, 0.0)).re).abs() < 1e-10);
    }

    #[test]
    fn effective_potentials_vanish_for_zero_q() {
        let lambda = C::new(30.0, 0.0);
        let q = Potential::zero();
        for i in 0..20 {
            let p = z_of_x(0.7 * i as f64, lambda);
            assert_eq!(effective_potentials(&p, lambda, &q).vq, C::new(0.0, 0.0));
        }
    }

    #[test]
    fn contour_for_real_lambda() {
        let c = build_contour(C::new(25.0, 0.0), 400, 15.0).unwrap();
        assert_eq!(c.z_star, C::new(0.0, 0.0));
        assert_eq!(c.x_star, 5.0);
        assert!(c.points.iter().all(|p| p.point.z.im == 0.0));
        assert!(c.points[0].point.x < 0.1 && c.points[0].point.z.re > c.z0.re);
        assert!(c.points.windows(2).all(|w| w[1].point.z.re > w[0].point.z.re));
        assert!(build_contour(C::new(25.0, 0.0), 400, 4.0).is_err());
    }

    #[test]
    fn z_star_is_interior_argmin_in_small_sector() {
        let lambda = C::from_polar(25.0, 0.5 * delta());
        let xs = x_star(lambda).unwrap();
        let hi = 20.0;
        let n = 20_000;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=n {
            let x = hi * i as f64 / n as f64;
            let m = z_of_x(x, lambda).z.norm();
            if m < best.0 {
                best = (m, x);
            }
        }
        assert!(best.1 > 0.0 && best.1 < hi);
        assert!((best.1 - xs).abs() <= hi / n as f64);
        let m = z_of_x(xs, lambda).z.norm();
        assert!(m <= best.0 + 1e-12);
    }

    #[test]
    fn z_star_on_ray_for_wide_sector() {
        let lambda = C::new(0.0, 25.0);
        let xs = x_star(lambda).unwrap();
        let z = z_of_x(xs, lambda).z;
        assert!((arg_lower(z) + PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn delta_is_inside_its_interval() {
        let d = delta();
        assert!(d > 0.0 && d < (4.0 / 3.0) * 2f64.powf(-1.0 / 3.0).acos());
        assert!((d - 0.435_951_961_666_815_5).abs() < 1e-15);
    }

    #[test]
    fn geometry_properties() {
        let mut r = rng();
        checks::zeta_identity(&mut r).unwrap();
        checks::monotone_modulus(&mut r).unwrap();
        checks::exponential_weight(&mut r).unwrap();
        checks::sector_containment(&mut r).unwrap();
        checks::minimum_modulus(&mut r).unwrap();
        checks::xi_asymptotics().unwrap();
        checks::rotated_xi_decreasing().unwrap();
        checks::k_round_trip(&mut r).unwrap();
        checks::t_star_bound().unwrap();
        checks::v0_envelope().unwrap();
    }
}
