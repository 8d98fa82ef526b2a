//! Reference eigenvalues of `-d^2/dx^2 + x^2 + q(x)` on the line.
//!
//! The main method is a Galerkin projection onto the first `N` Hermite
//! functions; a Dirichlet finite-difference discretization on `[-L, L]`
//! serves as an independent cross-check.

use crate::potential::Potential;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("basis size {0} is too small (need at least 4)")]
    BasisTooSmall(usize),
    #[error("matrix is not symmetric: |A[{i}][{j}] - A[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
    #[error("QL iteration did not converge for eigenvalue {0}")]
    NoConvergence(usize),
    #[error("quadrature for matrix entry ({m}, {n}) did not converge (change {change:e})")]
    Quadrature { m: usize, n: usize, change: f64 },
    #[error("invalid finite-difference setup: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Galerkin,
    Fdiff,
    WronskianOde,
    WronskianAsym,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Galerkin => "galerkin",
            Solver::Fdiff => "fdiff",
            Solver::WronskianOde => "wronskian_ode",
            Solver::WronskianAsym => "wronskian_asym",
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "galerkin" => Ok(Solver::Galerkin),
            "fdiff" => Ok(Solver::Fdiff),
            "wronskian_ode" => Ok(Solver::WronskianOde),
            "wronskian_asym" => Ok(Solver::WronskianAsym),
            _ => Err(format!("unknown solver '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub n: u64,
    pub mu: f64,
    pub err_est: f64,
    pub solver: Solver,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EigenTable {
    pub entries: Vec<EigenEntry>,
    /// Indices dropped or flagged, with the reason.
    pub diagnostics: Vec<String>,
}

impl EigenTable {
    pub fn get(&self, n: u64) -> Option<&EigenEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    /// `mu` strictly increasing in `n` and every `err_est >= 0`.
    pub fn check_invariants(&self) -> Result<(), String> {
        for w in self.entries.windows(2) {
            if w[1].n > w[0].n && w[1].mu <= w[0].mu {
                return Err(format!("mu not increasing between n={} and n={}", w[0].n, w[1].n));
            }
        }
        if let Some(e) = self.entries.iter().find(|e| !(e.err_est >= 0.0)) {
            return Err(format!("negative error estimate at n={}", e.n));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GalerkinControls {
    /// Basis size; `None` picks `4 n_max + 200`.
    pub basis: Option<usize>,
    pub tol: f64,
}

impl Default for GalerkinControls {
    fn default() -> Self {
        Self { basis: None, tol: 1e-8 }
    }
}

/// Dense symmetric matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    pub n: usize,
    pub a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        Self {
            n,
            a: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn check_symmetric(&self, tol: f64) -> Result<(), SolverError> {
        let scale = self.a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..self.n {
            for j in 0..i {
                let diff = (self.get(i, j) - self.get(j, i)).abs();
                if diff > tol * scale {
                    return Err(SolverError::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(())
    }
}

/// Normalized Hermite functions `psi_0..psi_{n_max}` at `x`, by the three-term
/// recurrence carried with a separate exponent so that large `|x|` neither
/// underflows `psi_0` nor overflows the polynomial part.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut log_scale = -0.5 * x * x - 0.25 * PI.ln();
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    for n in 0..=n_max {
        out.push(cur * log_scale.exp());
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let m = cur.abs();
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            let s = m.ln();
            cur /= m;
            prev /= m;
            log_scale += s;
        }
    }
    out
}

/// Hermite functions stored on a symmetric grid, each on its own window
/// `|x| <= sqrt(2n+1) + 10`.
struct HermiteGrid {
    x: Vec<f64>,
    start: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl HermiteGrid {
    fn new(n: usize, l: f64, h: f64) -> Self {
        let half = (l / h).ceil() as usize;
        let x: Vec<f64> = (0..=2 * half).map(|j| (j as f64 - half as f64) * h).collect();
        let mut start = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        for k in 0..n {
            let w = (2.0 * k as f64 + 1.0).sqrt() + 10.0;
            let lo = half - ((w / h).floor() as usize).min(half);
            start.push(lo);
            rows.push(Vec::with_capacity(2 * (half - lo) + 1));
        }
        for (j, &xj) in x.iter().enumerate() {
            let vals = hermite_functions(n - 1, xj);
            for k in 0..n {
                if j >= start[k] && j <= 2 * half - start[k] {
                    rows[k].push(vals[k]);
                }
            }
        }
        Self { x, start, rows }
    }

    fn entry(&self, m: usize, n: usize, qw: &[f64]) -> f64 {
        // the window of the lower index is the narrower one
        let (a, b) = if m <= n { (m, n) } else { (n, m) };
        let off = self.start[a] - self.start[b];
        let ra = &self.rows[a];
        let rb = &self.rows[b][off..off + ra.len()];
        let qs = &qw[self.start[a]..self.start[a] + ra.len()];
        ra.iter().zip(rb).zip(qs).map(|((u, v), w)| u * v * w).sum()
    }
}

fn galerkin_step(n: usize, q: &Potential) -> (f64, f64) {
    let l = (2.0 * (2.0 * n as f64 + 1.0)).sqrt() + 10.0;
    let band = 2.0 * ((2.0 * n as f64 + 1.0).sqrt() + 8.0) + q.max_frequency();
    (l, 0.8 * 2.0 * PI / band)
}

fn is_even(q: &Potential, l: f64) -> bool {
    (0..=400).all(|i| {
        let x = l * i as f64 / 400.0;
        q.q(x) == q.q(-x)
    })
}

/// `H[m][n] = (2n+1) delta_mn + int psi_m q psi_n` by the trapezoid rule on
/// `[-L, L]`, `L = sqrt(2(2N+1)) + 10`.
pub fn galerkin_matrix(q: &Potential, n: usize) -> Result<SymMatrix, SolverError> {
    if n < 4 {
        return Err(SolverError::BasisTooSmall(n));
    }
    let (l, mut h) = galerkin_step(n, q);
    let even = is_even(q, l);
    let mut attempt = 0;
    loop {
        attempt += 1;
        let grid = HermiteGrid::new(n, l, h);
        let qw: Vec<f64> = grid.x.iter().map(|&x| h * q.q(x)).collect();
        let mut mat = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                if even && (i + j) % 2 == 1 {
                    continue;
                }
                let v = grid.entry(i, j, &qw) + if i == j { 2.0 * i as f64 + 1.0 } else { 0.0 };
                mat.set_sym(i, j, v);
            }
        }
        match check_step(q, n, l, h, &mat) {
            Ok(()) => return Ok(mat),
            Err(e) if attempt >= 4 => return Err(e),
            Err(_) => h *= 0.5,
        }
    }
}

/// Recomputes a few entries at half the step; all must agree to `1e-10`.
fn check_step(q: &Potential, n: usize, l: f64, h: f64, mat: &SymMatrix) -> Result<(), SolverError> {
    let pairs = [(0, 0), (0, 2), (n / 2, n / 2), (n / 2, n / 2 + 2), (n - 2, n - 1), (n - 1, n - 1), (n - 3, n - 1)];
    let hh = 0.5 * h;
    let half = (l / hh).ceil() as i64;
    let mut sums = [0.0; 7];
    for j in -half..=half {
        let x = j as f64 * hh;
        let vals = hermite_functions(n - 1, x);
        let w = hh * q.q(x);
        for (s, &(a, b)) in sums.iter_mut().zip(&pairs) {
            *s += vals[a] * vals[b] * w;
        }
    }
    for (s, &(a, b)) in sums.iter().zip(&pairs) {
        let full = mat.get(a, b) - if a == b { 2.0 * a as f64 + 1.0 } else { 0.0 };
        let change = (full - s).abs();
        if change > 1e-10 {
            return Err(SolverError::Quadrature { m: a, n: b, change });
        }
    }
    Ok(())
}

/// Householder reduction of a symmetric matrix to tridiagonal form; returns
/// the diagonal and the sub-diagonal (with `e[0] = 0`).
fn tridiagonalize(m: &SymMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in j + 1..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    (d, e)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<(), SolverError> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 30 {
                return Err(SolverError::NoConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix in ascending order (Householder
/// tridiagonalization followed by implicit QL).
pub fn eig_sym(m: &SymMatrix) -> Result<Vec<f64>, SolverError> {
    m.check_symmetric(1e-12)?;
    let (mut d, mut e) = tridiagonalize(m);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Cyclic Jacobi eigenvalues; slow but simple, used as an oracle.
pub fn eig_jacobi(m: &SymMatrix) -> Result<Vec<f64>, SolverError> {
    m.check_symmetric(1e-12)?;
    let n = m.n;
    let mut a = m.a.clone();
    let norm = m.frobenius().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off.sqrt() <= 1e-15 * norm {
            let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            d.sort_by(f64::total_cmp);
            return Ok(d);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(SolverError::NoConvergence(0))
}

/// Eigenvalues of the Galerkin matrix, using the parity split when `q` is even.
pub fn galerkin_spectrum(q: &Potential, n: usize) -> Result<Vec<f64>, SolverError> {
    let mat = galerkin_matrix(q, n)?;
    let (l, _) = galerkin_step(n, q);
    if !is_even(q, l) {
        return eig_sym(&mat);
    }
    let mut all = Vec::with_capacity(n);
    for parity in 0..2 {
        let idx: Vec<usize> = (parity..n).step_by(2).collect();
        let mut sub = SymMatrix::zeros(idx.len());
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                sub.a[i * idx.len() + j] = mat.get(a, b);
            }
        }
        all.extend(eig_sym(&sub)?);
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// `mu_n` for `n <= n_max` from a Galerkin run with basis `N` and its
/// error estimate from a second run with basis `2N`.
pub fn eigenvalues(q: &Potential, n_max: usize, controls: GalerkinControls) -> Result<EigenTable, SolverError> {
    let n = controls.basis.unwrap_or(4 * n_max + 200).max(n_max + 4);
    let coarse = galerkin_spectrum(q, n)?;
    let fine = galerkin_spectrum(q, 2 * n)?;
    let mut table = EigenTable::default();
    for k in 0..=n_max {
        let err_est = (coarse[k] - fine[k]).abs();
        if err_est < controls.tol {
            table.entries.push(EigenEntry {
                n: k as u64,
                mu: fine[k],
                err_est,
                solver: Solver::Galerkin,
            });
        } else {
            table.diagnostics.push(format!(
                "n={k}: basis {n} insufficient, err_est {err_est:e} >= tol {:e}",
                controls.tol
            ));
        }
    }
    Ok(table)
}

/// Number of eigenvalues below `lambda` of the tridiagonal matrix with
/// diagonal `d` and constant off-diagonal `off`.
fn sturm_count(d: &[f64], off: f64, lambda: f64) -> usize {
    let o2 = off * off;
    let mut count = 0;
    let mut p = 1.0;
    for (i, di) in d.iter().enumerate() {
        p = di - lambda - if i == 0 { 0.0 } else { o2 / p };
        if p == 0.0 {
            p = f64::EPSILON * (di.abs() + o2.sqrt());
        }
        if p < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th eigenvalue (from 0) of the tridiagonal matrix by bisection.
fn sturm_eigenvalue(d: &[f64], off: f64, k: usize) -> f64 {
    let lo0 = d.iter().fold(f64::INFINITY, |m, v| m.min(*v)) - 2.0 * off.abs();
    let hi0 = d.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) + 2.0 * off.abs();
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn fd_diagonal(q: &Potential, l: f64, h: f64) -> Vec<f64> {
    let m = (2.0 * l / h).round() as usize;
    (1..m)
        .map(|i| {
            let x = -l + i as f64 * h;
            2.0 / (h * h) + x * x + q.q(x)
        })
        .collect()
}

/// Dirichlet finite differences on `[-L, L]`, Richardson-extrapolated from
/// steps `h` and `h/2`.
pub fn fdiff_eigenvalues(q: &Potential, l: f64, h: f64, n_max: usize) -> Result<EigenTable, SolverError> {
    if !(h > 0.0 && h <= 0.05) {
        return Err(SolverError::InvalidGrid(format!("step {h} must lie in (0, 0.05]")));
    }
    let mut table = EigenTable::default();
    let need = (2.0 * (2.0 * n_max as f64 + 1.0)).sqrt() + 8.0;
    if l < need {
        table.diagnostics.push(format!(
            "L = {l} below {need}: truncation may dominate the error"
        ));
    }
    let d1 = fd_diagonal(q, l, h);
    let d2 = fd_diagonal(q, l, 0.5 * h);
    for k in 0..=n_max {
        let a = sturm_eigenvalue(&d1, -1.0 / (h * h), k);
        let b = sturm_eigenvalue(&d2, -4.0 / (h * h), k);
        table.entries.push(EigenEntry {
            n: k as u64,
            mu: (4.0 * b - a) / 3.0,
            err_est: (b - a).abs() / 3.0,
            solver: Solver::Fdiff,
        });
    }
    Ok(table)
}

/// Executable forms of the solver properties.
pub mod checks {
    use super::*;
    use rand::Rng;

    pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> SymMatrix {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.set_sym(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    /// QL against Jacobi, trace preservation and permutation invariance.
    pub fn eigensolver_oracle(rng: &mut impl Rng) -> Result<f64, String> {
        let mut worst: f64 = 0.0;
        for n in [5, 20, 37] {
            let m = random_symmetric(rng, n);
            let ql = eig_sym(&m).map_err(|e| e.to_string())?;
            let jc = eig_jacobi(&m).map_err(|e| e.to_string())?;
            for (a, b) in ql.iter().zip(&jc) {
                worst = worst.max((a - b).abs());
            }
            let tr: f64 = ql.iter().sum();
            if (tr - m.trace()).abs() > 1e-9 * m.frobenius() {
                return Err(format!("trace {tr} vs {}", m.trace()));
            }
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let mut p = SymMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    p.a[i * n + j] = m.get(perm[i], perm[j]);
                }
            }
            let pe = eig_sym(&p).map_err(|e| e.to_string())?;
            for (a, b) in ql.iter().zip(&pe) {
                worst = worst.max((a - b).abs());
            }
        }
        if worst > 1e-10 {
            return Err(format!("eigensolvers disagree by {worst:e}"));
        }
        Ok(worst)
    }

    /// `#{mu_n < 2N} = N` for `q = 0.5 cos x`.
    pub fn counting(lo: usize, hi: usize) -> Result<(), String> {
        let q = Potential::cosine(0.5, 1.0).map_err(|e| e.to_string())?;
        let spec = galerkin_spectrum(&q, 4 * hi + 200).map_err(|e| e.to_string())?;
        for n in lo..=hi {
            let c = spec.iter().filter(|&&m| m < 2.0 * n as f64).count();
            if c != n {
                return Err(format!("{c} eigenvalues below {}, expected {n}", 2 * n));
            }
        }
        Ok(())
    }

    /// `|mu_n - (2n+1)| <= sup |q|` for constants and small trig potentials.
    pub fn perturbation_bound() -> Result<(), String> {
        let qs = [
            Potential::constant(0.7),
            Potential::constant(-0.3),
            Potential::cosine(0.2, 1.0).map_err(|e| e.to_string())?,
            Potential::cosine(0.4, 2.5).map_err(|e| e.to_string())?,
        ];
        for q in &qs {
            let spec = galerkin_spectrum(q, 160).map_err(|e| e.to_string())?;
            for (n, mu) in spec.iter().take(30).enumerate() {
                if (mu - (2 * n + 1) as f64).abs() > q.sup_abs() + 1e-9 {
                    return Err(format!("n={n}: |mu - mu0| exceeds sup|q| for {q:?}"));
                }
            }
        }
        Ok(())
    }

    /// `err_est(2N) < err_est(N)` for the reported indices.
    pub fn monotone_error() -> Result<(), String> {
        let q = Potential::cosine(1.0, 1.0).map_err(|e| e.to_string())?;
        let a = galerkin_spectrum(&q, 40).map_err(|e| e.to_string())?;
        let b = galerkin_spectrum(&q, 80).map_err(|e| e.to_string())?;
        let c = galerkin_spectrum(&q, 160).map_err(|e| e.to_string())?;
        for n in 0..8 {
            let (e1, e2) = ((a[n] - b[n]).abs(), (b[n] - c[n]).abs());
            if !(e2 < e1 || e1 < 1e-13) {
                return Err(format!("n={n}: err_est grew from {e1:e} to {e2:e}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let h = 0.05;
        let mut gram = vec![0.0; 36];
        for j in -600..=600 {
            let v = hermite_functions(5, j as f64 * h);
            for a in 0..6 {
                for b in 0..6 {
                    gram[a * 6 + b] += h * v[a] * v[b];
                }
            }
        }
        for a in 0..6 {
            for b in 0..6 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * 6 + b] - want).abs() < 1e-13);
            }
        }
        let far = hermite_functions(2000, 60.0);
        assert!(far[2000].is_finite() && far[2000] != 0.0);
    }

    #[test]
    fn galerkin_matrix_examples() {
        let m = galerkin_matrix(&Potential::zero(), 6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 2.0 * i as f64 + 1.0 } else { 0.0 };
                assert_eq!(m.get(i, j), want);
            }
        }
        let m = galerkin_matrix(&Potential::constant(0.5), 6).unwrap();
        for i in 0..6 {
            assert!((m.get(i, i) - 2.0 * i as f64 - 1.5).abs() < 1e-13);
            assert!(m.get(i, (i + 1) % 6).abs() < 1e-13);
        }
        let m = galerkin_matrix(&Potential::cosine(1.0, 1.0).unwrap(), 6).unwrap();
        assert!((m.get(0, 0) - 1.0 - (-0.25f64).exp()).abs() < 1e-13);
        assert!(m.check_symmetric(0.0).is_ok());
        assert!(galerkin_matrix(&Potential::zero(), 3).is_err());
    }

    #[test]
    fn eig_sym_examples() {
        let id = SymMatrix::from_rows(&(0..5).map(|i| (0..5).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect::<Vec<_>>());
        assert_eq!(eig_sym(&id).unwrap(), vec![1.0; 5]);
        let d = SymMatrix::from_rows(&[vec![5.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 3.0]]);
        assert_eq!(eig_sym(&d).unwrap(), vec![1.0, 3.0, 5.0]);
        let bad = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(eig_sym(&bad).is_err());
    }

    #[test]
    fn eigensolver_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        checks::eigensolver_oracle(&mut rng).unwrap();
        checks::perturbation_bound().unwrap();
        checks::monotone_error().unwrap();
        checks::counting(20, 60).unwrap();
    }

    #[test]
    fn exact_spectra() {
        let t = eigenvalues(&Potential::zero(), 10, GalerkinControls::default()).unwrap();
        assert_eq!(t.entries.len(), 11);
        for e in &t.entries {
            assert!((e.mu - (2 * e.n + 1) as f64).abs() < 1e-9);
        }
        let t = eigenvalues(&Potential::constant(0.5), 10, GalerkinControls::default()).unwrap();
        for e in &t.entries {
            assert!((e.mu - (2 * e.n + 1) as f64 - 0.5).abs() < 1e-9);
        }
        t.check_invariants().unwrap();
    }

    #[test]
    fn fdiff_ground_state_and_sturm() {
        let t = fdiff_eigenvalues(&Potential::zero(), 12.0, 0.02, 0).unwrap();
        assert!((t.entries[0].mu - 1.0).abs() < 1e-5);
        // Sturm bisection against the dense solver on the same matrix
        let q = Potential::cosine(1.0, 1.0).unwrap();
        let h = 0.05;
        let d = fd_diagonal(&q, 201.0 * h / 2.0, h);
        assert_eq!(d.len(), 200);
        let d = &d[..];
        let mut m = SymMatrix::zeros(200);
        for i in 0..200 {
            m.set_sym(i, i, d[i]);
            if i + 1 < 200 {
                m.set_sym(i, i + 1, -1.0 / (h * h));
            }
        }
        let dense = eig_sym(&m).unwrap();
        for k in [0, 1, 50, 199] {
            let s = sturm_eigenvalue(d, -1.0 / (h * h), k);
            assert!((s - dense[k]).abs() < 1e-10 * dense[k].abs().max(1.0), "k={k}");
        }
        assert!(fdiff_eigenvalues(&q, 12.0, 0.1, 0).is_err());
    }

    #[test]
    fn galerkin_and_fdiff_agree_for_cosine() {
        let q = Potential::cosine(1.0, 1.0).unwrap();
        let g = eigenvalues(&q, 30, GalerkinControls { basis: Some(200), tol: 1e-6 }).unwrap();
        let l = (2.0 * 61.0f64).sqrt() + 10.0;
        let f = fdiff_eigenvalues(&q, l, 0.01, 30).unwrap();
        for n in 0..=30u64 {
            let a = g.get(n).unwrap();
            let b = f.get(n).unwrap();
            let d = (a.mu - b.mu).abs();
            assert!(d <= a.err_est + b.err_est + 1e-7, "n={n}: {} vs {} ({:e})", a.mu, b.mu, b.err_est);
        }
        g.check_invariants().unwrap();
    }
}
