//! Maximizing `F(A, B)` at fixed `e` and following the maximizer in `e`.
//!
//! The O(e) maximum is interior and is refined by Newton in `(A, B)`. The
//! Θ(1) maximum sits on the face `e - A + B = 0` (the `g11` block at zero),
//! where `F` is a function of `u = 1 - e - A - B` alone, with
//! `A = (1-u)/2` and `B = (1-2e-u)/2`.

use serde::Serialize;

use super::{e0, from_ridge, linear_fit, ridge_scale, to_ridge, BranchLabel};
use crate::closed_forms::f_coefficient_raw;
use crate::entropy::h_second;
use crate::error::{Error, Result};
use crate::optimizer::{
    continuation_sweep, grid_scan, newton_maximize_scaled, LocalMax, NewtonOptions, SweepRange,
};
use crate::table::SweepTable;

pub const FM_COLUMNS: [&str; 6] = ["e", "A", "B", "F_m", "Hpp", "gap"];

const OE_GRID: usize = 96;
const FACE_GRID: usize = 400;

/// A refined local maximum of `F` at one edge density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchMax {
    pub branch: BranchLabel,
    pub e: f64,
    pub a: f64,
    pub b: f64,
    pub f: f64,
    pub converged: bool,
}

impl BranchMax {
    /// `F - H''(e)`.
    pub fn gap(&self) -> f64 {
        self.f - h_second(self.e)
    }
}

fn check_e(e: f64) -> Result<()> {
    if !(e > 0.0 && e < 0.5) {
        return Err(Error::Domain(format!("edge density {e} outside (0, ½)")));
    }
    Ok(())
}

/// `F / |H''(e)|` on `(A, B)`, invalid off the feasible region.
fn oe_objective(e: f64) -> impl Fn(&[f64]) -> Option<f64> + Sync {
    let norm = 1.0 / h_second(e).abs();
    move |x: &[f64]| {
        if !(x[0] > 0.0) {
            return None;
        }
        f_coefficient_raw(e, x[0], x[1]).map(|v| v * norm)
    }
}

fn face_point(e: f64, u: f64) -> (f64, f64) {
    (0.5 * (1.0 - u), 0.5 * (1.0 - 2.0 * e - u))
}

/// `F / |H''(e)|` along the face `e - A + B = 0`.
fn face_objective(e: f64) -> impl Fn(&[f64]) -> Option<f64> + Sync {
    let norm = 1.0 / h_second(e).abs();
    move |x: &[f64]| {
        let u = x[0];
        if !(u >= 0.0 && u <= 1.0 - 2.0 * e) {
            return None;
        }
        let (a, b) = face_point(e, u);
        f_coefficient_raw(e, a, b).map(|v| v * norm)
    }
}

/// Newton refinement of the O(e) branch from `seed = (A, B)`.
pub(crate) fn refine_oe(e: f64, seed: [f64; 2], opts: &NewtonOptions) -> Result<LocalMax> {
    let obj = oe_objective(e);
    let x0 = to_ridge(e, seed[0], seed[1]);
    let ridge = |x: &[f64]| {
        let (a, b) = from_ridge(e, x);
        obj(&[a, b])
    };
    let mut m = newton_maximize_scaled(ridge, &x0, &ridge_scale(&x0), opts)?;
    let (a, b) = from_ridge(e, &m.point);
    m.point = vec![a, b];
    Ok(m)
}

fn oe_from_local(e: f64, m: &LocalMax) -> BranchMax {
    BranchMax {
        branch: BranchLabel::of_point(e, m.point[0]),
        e,
        a: m.point[0],
        b: m.point[1],
        f: m.value * h_second(e).abs(),
        converged: m.converged,
    }
}

/// Best O(e) candidate from a grid over `A, B ∈ (0, min(10e, 0.45))`.
pub(crate) fn oe_grid_seed(e: f64) -> Result<[f64; 2]> {
    let hi = (10.0 * e).min(0.45);
    let cands = grid_scan(
        oe_objective(e),
        &[(0.0, hi), (0.0, hi)],
        &[OE_GRID, OE_GRID],
    )?;
    let best = cands.first().ok_or(Error::EmptyResult)?;
    Ok([best.point[0], best.point[1]])
}

/// The refined O(e) maximum; from a grid seed when `seed` is `None`.
pub fn oe_branch(e: f64, seed: Option<[f64; 2]>, opts: &NewtonOptions) -> Result<BranchMax> {
    check_e(e)?;
    let seed = match seed {
        Some(s) => s,
        None => oe_grid_seed(e)?,
    };
    Ok(oe_from_local(e, &refine_oe(e, seed, opts)?))
}

/// The refined Θ(1) maximum on the face `e - A + B = 0`.
///
/// `u_seed` is `1 - e - A - B` of a nearby solution; without one the face is
/// scanned first.
pub fn theta1_branch(e: f64, u_seed: Option<f64>, opts: &NewtonOptions) -> Result<BranchMax> {
    check_e(e)?;
    let obj = face_objective(e);
    let u0 = match u_seed.filter(|u| *u > 0.0 && *u < 1.0 - 2.0 * e) {
        Some(u) => u,
        None => {
            let cands = grid_scan(&obj, &[(0.0, 1.0 - 2.0 * e)], &[FACE_GRID])?;
            cands.first().ok_or(Error::EmptyResult)?.point[0]
        }
    };
    let m = newton_maximize_scaled(&obj, &[u0], &[u0], opts)?;
    let (a, b) = face_point(e, m.point[0]);
    Ok(BranchMax {
        branch: BranchLabel::Theta1,
        e,
        a,
        b,
        f: m.value * h_second(e).abs(),
        converged: m.converged,
    })
}

/// Local maxima of `F(e, ·, ·)`, best first.
///
/// Without seeds the O(e) branch comes from a grid scan and the Θ(1) branch
/// from a scan of its face. Seeds are labelled by `A < 10e` and refined on
/// their branch. Branches that fail to refine are dropped.
pub fn maximize_f_at(
    e: f64,
    seeds: Option<&[[f64; 2]]>,
    opts: &NewtonOptions,
) -> Result<Vec<BranchMax>> {
    check_e(e)?;
    let mut found = Vec::new();
    match seeds {
        None => {
            found.extend(oe_branch(e, None, opts).ok());
            found.extend(theta1_branch(e, None, opts).ok());
        }
        Some(list) => {
            for s in list {
                let r = match BranchLabel::of_point(e, s[0]) {
                    BranchLabel::OE => oe_branch(e, Some(*s), opts),
                    _ => theta1_branch(e, Some(1.0 - e - s[0] - s[1]), opts),
                };
                found.extend(r.ok());
            }
        }
    }
    if found.is_empty() {
        return Err(Error::Domain(format!(
            "no feasible maximum of F at e = {e}"
        )));
    }
    found.sort_by(|x, y| y.f.total_cmp(&x.f));
    Ok(found)
}

/// `(e, A, B, F_m, H''(e), F_m - H''(e))` along `range`, following the O(e)
/// maximizer by continuation from its grid-seeded solution at `range.start`.
///
/// Each row reports the better of the continued O(e) maximum and the Θ(1)
/// face maximum. Rows where the O(e) branch cannot be continued (above `e0`
/// the maximizer degenerates to `A = B = 0`) are gap rows; a truncated sweep
/// records `diagnostic` in the metadata.
pub fn fm_curve(range: SweepRange, opts: &NewtonOptions) -> Result<SweepTable> {
    let grid = range.values();
    if grid.iter().any(|e| !(*e > 0.0 && *e < 0.5)) {
        return Err(Error::Domain(format!("sweep {range:?} leaves (0, ½)")));
    }
    let config = serde_json::json!({ "range": range, "newton": opts }).to_string();
    let mut table = SweepTable::new("fm-curve", &FM_COLUMNS, &config);
    let seed = oe_grid_seed(range.start)?;
    let sweep = continuation_sweep(|e, s| refine_oe(e, [s[0], s[1]], opts), range, &seed)?;
    let mut u_prev = None;
    for p in &sweep.points {
        let e = p.param;
        let theta = theta1_branch(e, u_prev, opts).ok();
        u_prev = theta.as_ref().map(|t| 1.0 - e - t.a - t.b);
        let oe = p.solution.as_ref().map(|m| oe_from_local(e, m));
        let best = match (oe, theta) {
            (Some(o), Some(t)) => Some(if t.f > o.f { t } else { o }),
            (Some(o), None) => Some(o),
            (None, _) => None,
        };
        match best {
            Some(b) => table.push(vec![e, b.a, b.b, b.f, h_second(e), b.gap()])?,
            None => table.push_gap(e),
        }
    }
    if let Some(d) = sweep.diagnostic {
        table.set_meta("diagnostic", d);
    }
    Ok(table)
}

/// Where `gap` turns nonpositive, bracketed by the last positive row and the
/// next row. The gap vanishes like `(e0 - e)³` and beyond the crossing it is
/// zero up to rounding, so `gap^{1/3}` is extrapolated linearly from the last
/// two positive rows and clamped into the bracket. With a single positive row
/// `gap^{1/3}` is interpolated across the bracket (midpoint for a gap row).
/// `None` without a bracket.
pub fn gap_crossing(table: &SweepTable) -> Result<Option<f64>> {
    let (ie, ig) = (table.column_index("e")?, table.column_index("gap")?);
    let rows: Vec<(f64, f64)> = table.rows.iter().map(|r| (r[ie], r[ig])).collect();
    let Some(k) = rows
        .windows(2)
        .position(|w| w[0].1 > 0.0 && !(w[1].1 > 0.0))
    else {
        return Ok(None);
    };
    let ((e1, g1), (e2, g2)) = (rows[k], rows[k + 1]);
    let (lo, hi) = (e1.min(e2), e1.max(e2));
    if k >= 1 && rows[k - 1].1 > 0.0 {
        let (e0_, g0) = rows[k - 1];
        let (r0, r1) = (g0.cbrt(), g1.cbrt());
        if r0 > r1 {
            return Ok(Some((e1 + (e1 - e0_) * r1 / (r0 - r1)).clamp(lo, hi)));
        }
    }
    Ok(Some(if g2.is_finite() {
        let (r1, r2) = (g1.cbrt(), g2.cbrt());
        e1 + (e2 - e1) * r1 / (r1 - r2)
    } else {
        0.5 * (e1 + e2)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope_a: f64,
    pub slope_b: f64,
    pub slope_gap: f64,
    pub rows: usize,
}

/// Least-squares slopes of `ln A`, `ln B`, `ln gap` against `ln(e0 - e)` over
/// the rows with `e ∈ [e_lo, e_hi]`.
pub fn scaling_fit(table: &SweepTable, window: (f64, f64)) -> Result<ScalingFit> {
    let (lo, hi) = window;
    if !(lo < hi) || !(hi < e0()) {
        return Err(Error::Data(format!(
            "window [{lo}, {hi}] must be ordered and below e0"
        )));
    }
    let idx: Vec<usize> = ["e", "A", "B", "gap"]
        .iter()
        .map(|c| table.column_index(c))
        .collect::<Result<_>>()?;
    let mut x = Vec::new();
    let mut ys = [Vec::new(), Vec::new(), Vec::new()];
    for row in &table.rows {
        let e = row[idx[0]];
        if !(e >= lo && e <= hi) {
            continue;
        }
        for (k, y) in ys.iter_mut().enumerate() {
            let v = row[idx[k + 1]];
            if !(v > 0.0) {
                return Err(Error::Data(format!(
                    "{} = {v} at e = {e} is not positive",
                    FM_COLUMNS[[1, 2, 5][k]]
                )));
            }
            y.push(v.ln());
        }
        x.push((e0() - e).ln());
    }
    if x.len() < 10 {
        return Err(Error::Data(format!(
            "window holds {} rows, need at least 10",
            x.len()
        )));
    }
    let slope = |y: &[f64]| linear_fit(&x, y).0;
    Ok(ScalingFit {
        slope_a: slope(&ys[0]),
        slope_b: slope(&ys[1]),
        slope_gap: slope(&ys[2]),
        rows: x.len(),
    })
}

/// The edge density in `bracket` where the Θ(1) and O(e) maxima of `F` are equal.
pub fn f_dominance_crossover(bracket: (f64, f64), opts: &NewtonOptions) -> Result<f64> {
    let diff = |e: f64| -> f64 {
        match (theta1_branch(e, None, opts), oe_branch(e, None, opts)) {
            (Ok(t), Ok(o)) => (t.f - o.f) / h_second(e).abs(),
            _ => f64::NAN,
        }
    };
    crate::optimizer::solve_scalar_root(diff, bracket, 1e-9)
}
