//! Wright Omega and Lambert W on the real line.
//!
//! `wright_omega(x)` is the unique positive solution of `w + ln w = x`, which
//! equals `W0(e^x)` but stays representable when `e^x` overflows.

use crate::{Error, Result};
use core::f64::consts::E;

const MAX_ITERATIONS: usize = 12;

/// Below this argument `e^x < 2^-52` and `w = e^x (1 - e^x + ...)` rounds to `e^x`.
const EXPONENTIAL_REGIME: f64 = -40.0;

/// Solves `w + ln w = x` for real `x`.
///
/// Starts from a regime-dependent guess and applies the fourth-order
/// Fritsch-Shafer-Crowley update until the residual `x - w - ln w` is at
/// rounding level. For `x` below about -745 the result underflows to 0.
pub fn wright_omega(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("wright_omega", "NaN argument"));
    }
    if x == f64::INFINITY {
        return Err(Error::domain("wright_omega", "+inf argument"));
    }
    if x < EXPONENTIAL_REGIME {
        return Ok(libm::exp(x));
    }

    let mut w = initial_guess(x);
    let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
    for _ in 0..MAX_ITERATIONS {
        let r = x - w - libm::log(w);
        if r.abs() <= tol {
            break;
        }
        let wp1 = 1.0 + w;
        let t = wp1 * (wp1 + 2.0 * r / 3.0);
        w *= 1.0 + r / wp1 * (t - 0.5 * r) / (t - r);
    }
    Ok(w)
}

fn initial_guess(x: f64) -> f64 {
    if x < -2.0 {
        let ex = libm::exp(x);
        ex * (1.0 - ex)
    } else if x <= 2.0 {
        // Taylor series about x = 1, where w = 1.
        let y = x - 1.0;
        1.0 + y * (0.5 + y * (1.0 / 16.0 + y * (-1.0 / 192.0 + y * (-1.0 / 3072.0 + y * 13.0 / 61440.0))))
    } else {
        let l = libm::log(x);
        x - l + l / x
    }
}

/// `d/dx wright_omega(x) = w / (1 + w)`.
pub fn wright_omega_derivative(x: f64) -> Result<f64> {
    let w = wright_omega(x)?;
    Ok(w / (1.0 + w))
}

/// Principal branch of the Lambert W function, `W e^W = x` for `x >= -1/e`.
///
/// Solved directly by Halley iteration on `w e^w - x` so that it stays an
/// independent route from [`wright_omega`].
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("lambert_w0", "NaN argument"));
    }
    if x == f64::INFINITY {
        return Err(Error::domain("lambert_w0", "+inf argument"));
    }
    let branch = -1.0 / E;
    // Allow a few ulps of slack so that a computed -1/e maps onto the branch point.
    if x < branch - 4.0 * f64::EPSILON {
        return Err(Error::domain("lambert_w0", "argument below -1/e"));
    }
    if x <= branch {
        return Ok(-1.0);
    }
    if x == 0.0 || x.abs() < 1e-300 {
        return Ok(x);
    }

    let mut w = if x < -0.25 {
        let p = libm::sqrt(2.0 * (E * x + 1.0));
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0))
    } else if x < 3.0 {
        let l = libm::log1p(x);
        l * (1.0 - libm::log1p(l) / (2.0 + l))
    } else {
        let l1 = libm::log(x);
        let l2 = libm::log(l1);
        l1 - l2 + l2 / l1
    };

    for _ in 0..4 * MAX_ITERATIONS {
        let ew = libm::exp(w);
        let f = w * ew - x;
        if f.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) * x.abs() {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step == 0.0 {
            break;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;

    /// Plain bisection on `w + ln w - x`, kept separate from the Halley path.
    fn omega_bisect(x: f64) -> f64 {
        let (mut lo, mut hi) = (1e-300_f64, x.abs().max(10.0) + 10.0);
        for _ in 0..4000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mid + mid.ln() - x > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn omega_at_one_is_one() {
        assert_eq!(wright_omega(1.0).unwrap(), 1.0);
        assert_eq!(wright_omega_derivative(1.0).unwrap(), 0.5);
    }

    #[test]
    fn omega_matches_bisection_oracle() {
        // Frozen oracle values: 0 -> 0.5671432904097838, -10 -> 4.539786874921544e-5,
        // 19.975 -> 17.13393877950608.
        for (x, frozen) in [
            (0.0, 0.567_143_290_409_783_8),
            (-10.0, 4.539_786_874_921_544e-5),
            (19.975, 17.133_938_779_506_08),
        ] {
            let oracle = omega_bisect(x);
            assert!((oracle - frozen).abs() <= 1e-12 * frozen, "oracle drift at {x}");
            let w = wright_omega(x).unwrap();
            assert!((w - oracle).abs() <= 1e-13 * oracle, "x={x}: {w} vs {oracle}");
        }
    }

    #[test]
    fn derivative_at_zero() {
        let w = omega_bisect(0.0);
        let d = wright_omega_derivative(0.0).unwrap();
        assert!((d - w / (1.0 + w)).abs() < 1e-14);
        assert!((d - 0.361_896_3).abs() < 1e-7);
        assert!(wright_omega_derivative(600.0).unwrap() > 0.998);
    }

    #[test]
    fn omega_rejects_nan_and_underflows_quietly() {
        assert!(wright_omega(f64::NAN).is_err());
        let tiny = wright_omega(-800.0).unwrap();
        assert!((0.0..1e-300).contains(&tiny));
        assert_eq!(wright_omega(f64::NEG_INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn lambert_special_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w0(-1.0 / E).unwrap(), -1.0);
        assert!(lambert_w0(-0.4).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn lambert_residual_near_branch_and_large() {
        for x in [-0.3678, -0.36, -0.2, -1e-5, 1e-8, 0.5, 2.5, 10.0, 1e10, 1e300] {
            let w = lambert_w0(x).unwrap();
            let r = (w * w.exp() - x).abs() / x.abs();
            assert!(r <= 1e-12, "x={x}: residual {r}");
        }
    }
}
