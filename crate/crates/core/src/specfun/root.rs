//! Bracketed scalar root finding: bisection followed by a secant polish.

use serde::{Deserialize, Serialize};

use super::RootError;

const MAX_BISECTIONS: usize = 200;
const MAX_SECANT_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketedRoot {
    pub lo: f64,
    pub hi: f64,
    pub root: f64,
    pub residual: f64,
}

/// Finds a root of `f` in `[lo, hi]` given `f(lo)·f(hi) < 0`.
///
/// `tol` bounds `|f(root)|`. A sign change that survives down to machine
/// resolution without `|f|` becoming small is reported as a discontinuity
/// (a pole of a matching function, typically).
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<BracketedRoot, RootError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(BracketedRoot { lo: a, hi: a, root: a, residual: 0.0 });
    }
    if fb == 0.0 {
        return Ok(BracketedRoot { lo: b, hi: b, root: b, residual: 0.0 });
    }
    if !(fa * fb < 0.0) {
        return Err(RootError::NoSignChange { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }

    // Bisect until the bracket is narrow enough for the secant step to be safe.
    let mut iterations = 0;
    while (b - a) > 1e-6 * (a.abs() + b.abs()).max(1e-300) {
        iterations += 1;
        if iterations > MAX_BISECTIONS {
            return Err(RootError::MaxIterations { lo: a, hi: b });
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(BracketedRoot { lo: a, hi: b, root: mid, residual: 0.0 });
        }
        if fa * fm < 0.0 {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }

    // Safeguarded secant (regula falsi with bisection fallback) inside the bracket.
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..(MAX_SECANT_STEPS + MAX_BISECTIONS) {
        if best.1.abs() <= tol && (b - a) <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > a && x < b) || !x.is_finite() {
            x = 0.5 * (a + b);
        }
        // keep the bracket shrinking even if the secant stalls at one end
        let width = b - a;
        if x - a < 0.01 * width || b - x < 0.01 * width {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 {
            return Ok(BracketedRoot { lo: a, hi: b, root: x, residual: 0.0 });
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
        if b - a <= 4.0 * f64::EPSILON * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
    }
    if best.1.abs() <= tol {
        Ok(BracketedRoot { lo: a, hi: b, root: best.0, residual: best.1.abs() })
    } else {
        Err(RootError::Discontinuity { at: best.0, residual: best.1.abs() })
    }
}

/// Scans `[lo, hi]` on `n` equal steps and returns the first sign-change bracket.
pub fn first_bracket<F>(mut f: F, lo: f64, hi: f64, n: usize) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = lo + (hi - lo) * i as f64 / n as f64;
        let f1 = f(x1);
        if f0 == 0.0 || f0 * f1 < 0.0 {
            return Some((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    None
}

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`; returns `(argmax, max)`.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (1.0 + c.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
