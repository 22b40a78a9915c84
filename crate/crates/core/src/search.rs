//! One-dimensional maximization and root finding.

use crate::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const SCAN_POINTS: usize = 33;
const MAX_EXPANSIONS: usize = 64;

/// Result of a bracketed maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    /// Interval that contained the maximum after any expansion.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Maximizes a unimodal `f` over `x > 0`, starting from `[lo, hi]`.
///
/// The search runs in `ln x`. A log-spaced scan locates the best sample; if
/// it lands on an endpoint the bracket is doubled (or halved) in that
/// direction, up to 64 times. Golden-section refinement then runs until the
/// bracket is narrower than `rel_tol` relative to `x`.
pub fn maximize_positive<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Bracket { lo, hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut iterations = 0;
    let (a, b) = 'scan: {
        for _ in 0..=MAX_EXPANSIONS {
            let (ulo, uhi) = (libm::log(lo), libm::log(hi));
            let mut best = (0, f64::NEG_INFINITY);
            for i in 0..SCAN_POINTS {
                let u = ulo + (uhi - ulo) * i as f64 / (SCAN_POINTS - 1) as f64;
                let v = f(libm::exp(u))?;
                iterations += 1;
                if v > best.1 {
                    best = (i, v);
                }
            }
            let step = (uhi - ulo) / (SCAN_POINTS - 1) as f64;
            match best.0 {
                0 => {
                    hi = libm::exp(ulo + step);
                    lo *= 0.5;
                }
                i if i == SCAN_POINTS - 1 => {
                    lo = libm::exp(uhi - step);
                    hi *= 2.0;
                }
                i => {
                    let u = ulo + step * i as f64;
                    break 'scan (u - step, u + step);
                }
            }
            if !(lo > 0.0 && hi.is_finite()) {
                break;
            }
        }
        return Err(Error::Bracket { lo, hi });
    };
    let bracket = (libm::exp(a), libm::exp(b));
    let (u, value, n) = golden_section(|u| f(libm::exp(u)), a, b, rel_tol)?;
    Ok(Maximum {
        argmax: libm::exp(u),
        value,
        bracket,
        iterations: iterations + n,
    })
}

/// Golden-section maximization on `[a, b]` down to width `tol`.
pub fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut n = 2;
    while (b - a).abs() > tol && n < 500 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        n += 1;
    }
    Ok(if f1 >= f2 { (x1, f1, n) } else { (x2, f2, n) })
}

/// Brent's method for a root of `f` on `[lo, hi]`, which must bracket a sign change.
pub fn brent_root<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NoConvergence {
        op: "brent_root",
        iterations: max_iter,
    })
}
