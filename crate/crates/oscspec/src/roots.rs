//! Bracketed root finding: secant steps kept inside a shrinking bracket, with
//! bisection whenever the secant step is not a clear improvement.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{a}, {b}] (f(a) = {fa:e}, f(b) = {fb:e})")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("function returned a non-finite value at x = {0}")]
    NonFinite(f64),
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
}

/// Finds `x` in `[a, b]` with `f(x) = 0` to absolute tolerance `tol`.
pub fn secant_bisect<E: From<RootError>>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, E> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if !fa.is_finite() {
        return Err(RootError::NonFinite(a).into());
    }
    if !fb.is_finite() {
        return Err(RootError::NonFinite(b).into());
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoSignChange { a, b, fa, fb }.into());
    }
    for _ in 0..200 {
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if !fx.is_finite() {
            return Err(RootError::NonFinite(x).into());
        }
        if fx == 0.0 {
            return Ok(x);
        }
        let shrink_before = b - a;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // guarantee geometric shrinking with an extra bisection when needed
        if b - a > 0.5 * shrink_before {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if !fm.is_finite() {
                return Err(RootError::NonFinite(m).into());
            }
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
        if b - a <= tol {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
    }
    Err(RootError::NoConvergence(200).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<f64, RootError> {
        move |x| Ok(f(x))
    }

    #[test]
    fn finds_transcendental_roots() {
        let r = secant_bisect(ok(|x| x.cos() - x), 0.0, 1.0, 1e-13).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-12);
        let r = secant_bisect(ok(|x| (std::f64::consts::FRAC_PI_2 * x).cos()), 2.1, 3.9, 1e-12)
            .unwrap();
        assert!((r - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reports_missing_sign_change() {
        let r = secant_bisect(ok(|x| x * x + 1.0), -1.0, 1.0, 1e-10);
        assert!(matches!(r, Err(RootError::NoSignChange { .. })));
    }

    #[test]
    fn survives_flat_and_steep_functions() {
        let r = secant_bisect(ok(|x| (x - 0.3).powi(9)), -1.0, 2.0, 1e-10).unwrap();
        assert!((r - 0.3).abs() < 1e-1);
        let r = secant_bisect(ok(|x| (50.0 * (x - 0.123)).tanh()), -3.0, 5.0, 1e-12)
            .unwrap();
        assert!((r - 0.123).abs() < 1e-11);
    }
}
