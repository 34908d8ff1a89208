use crate::error::{Error, Result};

/// Brent's bracketing root finder (inverse quadratic / secant steps guarded by bisection).
///
/// Returns `x` in `bracket` with `|f(x)| <= tol` or a final bracket no wider than `tol`.
pub fn solve_scalar_root<F>(mut f: F, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!(
            "root tolerance {tol} must be positive"
        )));
    }
    let (mut a, mut b) = bracket;
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() || fa.signum() * fb.signum() > 0.0 {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::Numerical(format!("root function not finite at {b}")));
        }
    }
    Err(Error::Numerical(
        "root finder did not converge in 200 iterations".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = solve_scalar_root(|x| x * x - 2.0, (1.0, 2.0), 1e-14).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn root_at_edge() {
        assert_eq!(
            solve_scalar_root(|x| x - 1.0, (0.0, 1.0), 1e-12).unwrap(),
            1.0
        );
        let r =
            solve_scalar_root(|x| (x - 1.0) * (x * x + 1.0), (0.0, 1.0 + 1e-15), 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            solve_scalar_root(|x| x * x + 1.0, (-1.0, 1.0), 1e-10),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn steep_function() {
        let r =
            solve_scalar_root(|x: f64| (x - 0.3).powi(3) * 1e6 + 1e-9, (0.0, 1.0), 1e-15).unwrap();
        assert!((r - (0.3 - 1e-5)).abs() < 1e-6);
    }
}
