use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping and differencing controls for [`newton_maximize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Stop once an accepted step satisfies `|Δx|∞ < step_tol · max(1, |x|∞)`.
    pub step_tol: f64,
    /// Convergence requires `|∇f|∞ <= grad_tol`.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step; the gradient uses `fd_step`, the
    /// Hessian `10 · fd_step`, both scaled by `max(1, |x_i|)`.
    pub fd_step: f64,
    /// Backtracking factor in `(0, 1)`.
    pub damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            step_tol: 1e-12,
            grad_tol: 1e-10,
            max_iter: 50,
            fd_step: 1e-4,
            damping: 0.5,
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.step_tol, self.grad_tol, self.fd_step, self.damping];
        if positive.iter().any(|v| !(*v > 0.0)) || self.damping >= 1.0 || self.max_iter == 0 {
            return Err(Error::Parameter(format!("invalid Newton options {self:?}")));
        }
        Ok(())
    }

    /// Tightens both tolerances by `factor`.
    pub fn tightened(mut self, factor: f64) -> Self {
        self.step_tol /= factor;
        self.grad_tol /= factor;
        self.max_iter *= 2;
        self
    }
}

/// Result of a local maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMax {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// `|∇f|∞` at `point` in the coordinates the optimizer worked in; NaN if not computed.
    pub grad_norm: f64,
}

const MAX_BACKTRACKS: usize = 60;

/// Objective changes below this are rounding noise.
fn rounding(f: f64) -> f64 {
    16.0 * f64::EPSILON * f.abs().max(1e-300)
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn step_size(base: f64, x: f64) -> f64 {
    base * x.abs().max(1.0)
}

/// Central-difference gradient (fourth order where the stencil is feasible,
/// falling back to second-order central or one-sided stencils near the
/// feasibility boundary).
fn gradient<F: Fn(&[f64]) -> Option<f64>>(
    f: &F,
    x: &[f64],
    fx: f64,
    fd_step: f64,
) -> Option<Vec<f64>> {
    let mut probe = x.to_vec();
    let mut eval = |i: usize, dx: f64| {
        probe[i] = x[i] + dx;
        let v = f(&probe);
        probe[i] = x[i];
        v
    };
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut h = step_size(fd_step, x[i]);
        let mut found = None;
        for _ in 0..4 {
            let (p1, m1) = (eval(i, h), eval(i, -h));
            found = match (p1, m1) {
                (Some(p1), Some(m1)) => match (eval(i, 2.0 * h), eval(i, -2.0 * h)) {
                    (Some(p2), Some(m2)) => Some((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h)),
                    _ => Some((p1 - m1) / (2.0 * h)),
                },
                (Some(p1), None) => {
                    eval(i, 2.0 * h).map(|p2| (-3.0 * fx + 4.0 * p1 - p2) / (2.0 * h))
                }
                (None, Some(m1)) => {
                    eval(i, -2.0 * h).map(|m2| (3.0 * fx - 4.0 * m1 + m2) / (2.0 * h))
                }
                (None, None) => None,
            };
            if found.is_some() {
                break;
            }
            h *= 0.1;
        }
        grad.push(found?);
    }
    Some(grad)
}

/// Central second differences; `None` if a stencil stays infeasible after shrinking.
fn hessian<F: Fn(&[f64]) -> Option<f64>>(
    f: &F,
    x: &[f64],
    fx: f64,
    fd_step: f64,
) -> Option<DMatrix<f64>> {
    let n = x.len();
    let mut hm = DMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    let mut steps: Vec<f64> = x.iter().map(|&xi| step_size(10.0 * fd_step, xi)).collect();
    for i in 0..n {
        let mut ok = false;
        for _ in 0..4 {
            let h = steps[i];
            probe[i] = x[i] + h;
            let p = f(&probe);
            probe[i] = x[i] - h;
            let m = f(&probe);
            probe[i] = x[i];
            if let (Some(p), Some(m)) = (p, m) {
                hm[(i, i)] = (p - 2.0 * fx + m) / (h * h);
                ok = true;
                break;
            }
            steps[i] *= 0.1;
        }
        if !ok {
            return None;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (hi, hj) = (steps[i], steps[j]);
            let mut corner = |si: f64, sj: f64| {
                probe[i] = x[i] + si * hi;
                probe[j] = x[j] + sj * hj;
                let v = f(&probe);
                probe[i] = x[i];
                probe[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)?
                + corner(-1.0, -1.0)?)
                / (4.0 * hi * hj);
            hm[(i, j)] = v;
            hm[(j, i)] = v;
        }
    }
    Some(hm)
}

/// Damped Newton ascent with finite-difference derivatives.
///
/// Each iteration solves `-H p = ∇f` when the Hessian is negative definite and
/// otherwise takes a gradient step of length `0.1 · max(1, |x|∞)`. The step is
/// shortened by `damping` until the objective is feasible and does not fall
/// (Newton steps may fall by rounding noise only). The returned point never has
/// a lower value than `x0` beyond that rounding allowance.
pub fn newton_maximize<F>(f: F, x0: &[f64], opts: &NewtonOptions) -> Result<LocalMax>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    opts.validate()?;
    let f0 =
        f(x0).ok_or_else(|| Error::Domain(format!("objective invalid at start point {x0:?}")))?;
    let mut x = x0.to_vec();
    let mut fx = f0;
    let mut grad_norm = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let Some(g) = gradient(&f, &x, fx, opts.fd_step) else {
            break;
        };
        grad_norm = norm_inf(&g);
        if grad_norm <= opts.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let gv = DVector::from_column_slice(&g);
        let newton_dir = hessian(&f, &x, fx, opts.fd_step)
            .and_then(|hm| (-hm).cholesky())
            .map(|chol| chol.solve(&gv));
        let is_newton = newton_dir.is_some();
        let dir: Vec<f64> = match newton_dir {
            Some(p) => p.iter().copied().collect(),
            None => {
                let len = 0.1 * norm_inf(&x).max(1.0);
                g.iter().map(|gi| gi * len / grad_norm).collect()
            }
        };

        let noise = if is_newton { rounding(fx) } else { 0.0 };
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            if let Some(ft) = f(&trial) {
                if ft >= fx - noise {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            t *= opts.damping;
        }
        let Some((xn, fnew)) = accepted else { break };
        let step = t * norm_inf(&dir);
        x = xn;
        fx = fnew;
        if step < opts.step_tol * norm_inf(&x).max(1.0) {
            if let Some(g) = gradient(&f, &x, fx, opts.fd_step) {
                grad_norm = norm_inf(&g);
                converged = grad_norm <= opts.grad_tol;
            }
            break;
        }
    }
    if !converged && iterations >= opts.max_iter {
        if let Some(g) = gradient(&f, &x, fx, opts.fd_step) {
            grad_norm = norm_inf(&g);
            converged = grad_norm <= opts.grad_tol;
        }
    }

    if fx < f0 - rounding(f0) {
        let g0 = gradient(&f, x0, f0, opts.fd_step)
            .map(|g| norm_inf(&g))
            .unwrap_or(f64::NAN);
        return Ok(LocalMax {
            point: x0.to_vec(),
            value: f0,
            converged: g0 <= opts.grad_tol,
            iterations,
            grad_norm: g0,
        });
    }
    Ok(LocalMax {
        point: x,
        value: fx,
        converged,
        iterations,
        grad_norm,
    })
}

/// [`newton_maximize`] in the coordinates `u_i = x_i / scale_i`.
///
/// The objective and the returned point stay in `x`; differencing, step
/// control and the gradient tolerance act on `u`, which should be O(1) near the
/// solution.
pub fn newton_maximize_scaled<F>(
    f: F,
    x0: &[f64],
    scale: &[f64],
    opts: &NewtonOptions,
) -> Result<LocalMax>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    if scale.len() != x0.len() || scale.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::Parameter(format!("bad scale vector {scale:?}")));
    }
    let u0: Vec<f64> = x0.iter().zip(scale).map(|(x, s)| x / s).collect();
    let to_x = |u: &[f64]| -> Vec<f64> { u.iter().zip(scale).map(|(u, s)| u * s).collect() };
    let mut res = newton_maximize(|u: &[f64]| f(&to_x(u)), &u0, opts)?;
    res.point = to_x(&res.point);
    Ok(res)
}
