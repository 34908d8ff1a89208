//! The coin-flip entropy `H(u) = -(u ln u + (1-u) ln(1-u))` and its derivatives.
//!
//! Besides the plain values, this module provides [`h_remainder`], the Taylor
//! remainder `H(e+h) - H(e) - h H'(e)` evaluated without cancellation. Every
//! entropy comparison in the crate is written in terms of this remainder: the
//! quantities being compared differ from `H(e)` by `O(δ²)` amounts that would
//! otherwise drown in rounding error.

use crate::error::{Error, Result};

/// `H(u)`, with the continuous extension `H(0) = H(1) = 0`.
///
/// The caller guarantees `0 <= u <= 1`; outside that range the result is NaN.
#[inline]
pub fn h(u: f64) -> f64 {
    let mut s = 0.0;
    if u > 0.0 {
        s -= u * u.ln();
    }
    if u < 1.0 {
        s -= (1.0 - u) * (-u).ln_1p();
    }
    if !(0.0..=1.0).contains(&u) {
        return f64::NAN;
    }
    s
}

/// `H'(u) = ln((1-u)/u)`.
#[inline]
pub fn h_prime(u: f64) -> f64 {
    (-u).ln_1p() - u.ln()
}

/// `H''(u) = -1/(u(1-u))`.
#[inline]
pub fn h_second(u: f64) -> f64 {
    -1.0 / (u * (1.0 - u))
}

/// Checked evaluation of `H` (order 0) or its first two derivatives.
pub fn h_entropy(u: f64, order: u8) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) || u.is_nan() {
        return Err(Error::Domain(format!("H argument {u} outside [0, 1]")));
    }
    match order {
        0 => Ok(h(u)),
        1 | 2 if u == 0.0 || u == 1.0 => Err(Error::Domain(format!(
            "H derivative of order {order} undefined at u = {u}"
        ))),
        1 => Ok(h_prime(u)),
        2 => Ok(h_second(u)),
        _ => Err(Error::Parameter(format!(
            "unsupported derivative order {order}"
        ))),
    }
}

/// `(1+x) ln(1+x) - x` for `x >= -1`; zero to second order at `x = 0`.
fn psi(x: f64) -> f64 {
    if x.abs() < 0.125 {
        // sum_{n>=2} (-x)^n / (n (n-1))
        let mut term = x * x;
        let mut sum = 0.0;
        let mut n = 2.0_f64;
        while n < 40.0 {
            let add = term / (n * (n - 1.0));
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
            term *= -x;
            n += 1.0;
        }
        sum
    } else if x == -1.0 {
        1.0
    } else {
        (1.0 + x) * x.ln_1p() - x
    }
}

const ENDPOINT_SLACK: f64 = 1e-12;

/// `H(e+h) - H(e) - h H'(e)` for `0 < e < 1` and `0 <= e+h <= 1`.
///
/// Always `<= 0` by concavity; NaN when `e+h` leaves `[0, 1]`.
#[inline]
pub fn h_remainder(e: f64, h: f64) -> f64 {
    let x = h / e;
    let y = -h / (1.0 - e);
    // Offsets that land on 0 or 1 up to rounding are snapped onto the endpoint.
    if x < -1.0 - ENDPOINT_SLACK || y < -1.0 - ENDPOINT_SLACK || x.is_nan() || y.is_nan() {
        return f64::NAN;
    }
    -(e * psi(x.max(-1.0)) + (1.0 - e) * psi(y.max(-1.0)))
}

/// The tripodal threshold `e0 = (3 - sqrt 3) / 6`.
pub fn tripodal_threshold() -> f64 {
    (3.0 - 3.0_f64.sqrt()) / 6.0
}
