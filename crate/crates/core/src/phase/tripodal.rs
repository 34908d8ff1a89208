//! The best (2,1)-tripodal graphon at fixed `(e, δ)`.
//!
//! Objectives are the entropy excess over `H(e)` divided by `½δ²|H''(e)|`, so
//! values are O(1) and comparable with the bipodal excess, which is `-1` at
//! leading order in these units.

use serde::Serialize;

use super::{from_ridge, ridge_scale, to_ridge, BranchLabel, DMode};
use crate::closed_forms::{sym21_excess_raw, sym21_triangle_raw, Sym21Params};
use crate::entropy::{h, h_second};
use crate::error::{Error, Result};
use crate::optimizer::{newton_maximize_scaled, solve_scalar_root, LocalMax, NewtonOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripodalMax {
    pub params: Sym21Params,
    pub delta: f64,
    pub mode: DMode,
    pub branch: BranchLabel,
    /// `S - H(e)`.
    pub excess: f64,
    pub entropy: f64,
    pub local: LocalMax,
}

/// `|A|/e` below which the two symmetric podes have merged.
const COLLAPSE_TOL: f64 = 1e-2;

impl TripodalMax {
    /// `A ≈ 0` makes the first two podes equal, so the graphon is bipodal; at
    /// `c = ½, B = -2δ` it is the symmetric bipodal graphon itself.
    pub fn collapsed(&self) -> bool {
        self.params.a.abs() < COLLAPSE_TOL * self.params.e
    }
}

pub(crate) fn excess_norm(e: f64, delta: f64) -> f64 {
    2.0 / (delta * delta * h_second(e).abs())
}

/// `A³ - B³` as `(A - B)(A² + AB + B²)`, accurate when `A ≈ B`.
fn cube_gap(a: f64, b: f64) -> f64 {
    (a - b) * (a * a + a * b + b * b)
}

/// Ansatz excess with `c = δ (A³ - B³)^{-1/3}`.
pub(crate) fn ansatz_excess(e: f64, delta: f64, a: f64, b: f64) -> Option<f64> {
    let gap = cube_gap(a, b);
    if !(gap > 0.0) {
        return None;
    }
    sym21_excess_raw(e, a, b, delta / gap.cbrt(), 0.0)
}

/// `A` from the triangle constraint at given `(B, c, D)` (real cube root).
pub(crate) fn free_a(e: f64, delta: f64, b: f64, c: f64, d: f64) -> f64 {
    let d2 = d * d;
    let rest = delta.powi(3) + 0.75 * e * c * (1.0 - c) * d2 + 0.75 * c * c * (1.0 - c) * b * d2;
    (b.powi(3) + rest / c.powi(3)).cbrt()
}

pub(crate) fn free_excess(e: f64, delta: f64, b: f64, c: f64, d: f64) -> Option<f64> {
    if !(c > 0.0 && c < 1.0) {
        return None;
    }
    sym21_excess_raw(e, free_a(e, delta, b, c, d), b, c, d)
}

/// `c` on the Θ(1) face `g11 = 0`, where `A = e + (1-c)B`, solving
/// `c³ (A³ - B³) = δ³`.
pub(crate) fn face_c(e: f64, delta: f64, b: f64) -> Option<f64> {
    let phi = |c: f64| {
        let a = e + (1.0 - c) * b;
        c * ((e - c * b) * (a * a + a * b + b * b)).cbrt() - delta
    };
    let lo = delta / cube_gap(e + b, b).cbrt();
    if !(lo > 0.0 && lo < 1.0) {
        return None;
    }
    let mut hi = lo;
    loop {
        hi = (1.5 * hi).min(0.5 * (hi + 1.0));
        if phi(hi) > 0.0 {
            break;
        }
        if hi > 1.0 - 1e-9 {
            return None;
        }
    }
    if phi(lo) == 0.0 {
        return Some(lo);
    }
    solve_scalar_root(phi, (lo, hi), f64::MIN_POSITIVE).ok()
}

pub(crate) fn face_excess(e: f64, delta: f64, b: f64) -> Option<f64> {
    let c = face_c(e, delta, b)?;
    sym21_excess_raw(e, e + (1.0 - c) * b, b, c, 0.0)
}

/// Realized `δ = (e³ - τ)^{1/3}` of a parameter set, if positive.
fn realized_delta(p: &Sym21Params) -> Option<f64> {
    let deficit = p.e.powi(3) - sym21_triangle_raw(p.e, p.a, p.b, p.c, p.d);
    (p.c > 0.0 && p.c < 1.0 && deficit > 0.0).then(|| deficit.cbrt())
}

/// `c` for `seed` moved to deficit `delta`: rescaled in proportion to `δ`.
fn seed_c(seed: &Sym21Params, delta: f64) -> f64 {
    match realized_delta(seed) {
        Some(d0) => seed.c * delta / d0,
        None => {
            let gap = cube_gap(seed.a, seed.b);
            if gap > 0.0 {
                delta / gap.cbrt()
            } else {
                seed.c
            }
        }
    }
}

fn check_point(e: f64, delta: f64) -> Result<()> {
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::Domain(format!("edge density {e} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta <= e.min(1.0 - e)) {
        return Err(Error::Domain(format!(
            "δ = {delta} outside (0, min(e, 1-e)]"
        )));
    }
    Ok(())
}

/// Maximizes the (2,1)-tripodal entropy at `(e, δ)`.
///
/// `Ansatz` works in `(A, B)` with `D = 0` and `c` eliminated; `FreeD` works
/// in `(B, c, D)` with `A` eliminated. The seed's `c` is rescaled to `δ`.
pub fn best_tripodal(
    e: f64,
    delta: f64,
    mode: DMode,
    seed: &Sym21Params,
    opts: &NewtonOptions,
) -> Result<TripodalMax> {
    check_point(e, delta)?;
    let norm = excess_norm(e, delta);
    let floor = 1e-3 * e;
    let (local, params) = match mode {
        DMode::Ansatz => {
            let obj = |x: &[f64]| {
                let (a, b) = from_ridge(e, x);
                ansatz_excess(e, delta, a, b).map(|v| v * norm)
            };
            let x0 = to_ridge(e, seed.a, seed.b);
            let mut m = newton_maximize_scaled(obj, &x0, &ridge_scale(&x0), opts)?;
            let (a, b) = from_ridge(e, &m.point);
            m.point = vec![a, b];
            let c = delta / cube_gap(a, b).cbrt();
            (m, Sym21Params { e, a, b, c, d: 0.0 })
        }
        DMode::FreeD => {
            let obj = |x: &[f64]| free_excess(e, delta, x[0], x[1], x[2]).map(|v| v * norm);
            let c0 = seed_c(seed, delta);
            let x0 = [seed.b, c0, seed.d];
            let scale = [
                seed.b.abs().max(floor),
                c0.abs().max(1e-6),
                seed.d.abs().max(delta * delta / e),
            ];
            let m = newton_maximize_scaled(obj, &x0, &scale, opts)?;
            let (b, c, d) = (m.point[0], m.point[1], m.point[2]);
            (
                m,
                Sym21Params {
                    e,
                    a: free_a(e, delta, b, c, d),
                    b,
                    c,
                    d,
                },
            )
        }
    };
    let excess = local.value / norm;
    Ok(TripodalMax {
        params,
        delta,
        mode,
        branch: BranchLabel::of_point(e, params.a),
        excess,
        entropy: h(e) + excess,
        local,
    })
}

/// Maximizes the ansatz entropy at `(e, δ)` on the face `g11 = 0`, the
/// finite-`δ` continuation of the Θ(1) maximum of `F`. `seed_b` defaults to
/// `½ - e`.
pub fn best_theta1_face(
    e: f64,
    delta: f64,
    seed_b: Option<f64>,
    opts: &NewtonOptions,
) -> Result<TripodalMax> {
    check_point(e, delta)?;
    let norm = excess_norm(e, delta);
    let b0 = seed_b.unwrap_or(0.5 - e);
    let obj = |x: &[f64]| face_excess(e, delta, x[0]).map(|v| v * norm);
    let local = newton_maximize_scaled(obj, &[b0], &[b0.abs().max(1e-3 * e)], opts)?;
    let b = local.point[0];
    let c =
        face_c(e, delta, b).ok_or_else(|| Error::Numerical(format!("face c lost at B = {b}")))?;
    let params = Sym21Params {
        e,
        a: e + (1.0 - c) * b,
        b,
        c,
        d: 0.0,
    };
    let excess = local.value / norm;
    Ok(TripodalMax {
        params,
        delta,
        mode: DMode::Ansatz,
        branch: BranchLabel::Theta1,
        excess,
        entropy: h(e) + excess,
        local,
    })
}
