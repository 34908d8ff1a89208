//! The tripodal/bipodal boundary `δ_m(e)`.
//!
//! `δ_m` is found in two stages. A scan in `δ` (steps of `1e-4`, refined when
//! the first step already loses) brackets the last `δ` at which the best
//! tripodal entropy still beats the symmetric bipodal one. Then two solves
//! alternate: with the tripodal parameters held fixed, a scalar root of the
//! entropy difference in `δ`; with `δ` held fixed, a re-maximization of the
//! parameters. Each root is a lower bound for `δ_m` with an error that is
//! second order in the previous one.

use serde::Serialize;

use super::fm::oe_branch;
use super::tripodal::{ansatz_excess, best_tripodal, excess_norm, free_excess, TripodalMax};
use super::{BranchLabel, DMode};
use crate::closed_forms::{bipodal_entropy_excess, Sym21Params};
use crate::entropy::h;
use crate::error::{Error, Result};
use crate::optimizer::{solve_scalar_root, NewtonOptions, SweepRange};
use crate::table::SweepTable;

pub const BOUNDARY_COLUMNS: [&str; 9] = [
    "e", "delta_m", "A", "B", "c", "D", "S_tri", "S_sb", "branch",
];

/// Scan step in `δ`.
pub const DELTA_SCAN_STEP: f64 = 1e-4;
pub const MAX_OUTER: usize = 100;
pub const OUTER_TOL: f64 = 1e-12;
/// Entropy agreement required of a converged row.
pub const ENTROPY_TOL: f64 = 1e-10;
const SCAN_REFINEMENTS: usize = 3;

/// Where `S_tri = S_sb` along `δ` at fixed `e`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseBoundaryRow {
    pub e: f64,
    pub delta_m: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub s_tri: f64,
    pub s_sb: f64,
    pub d_mode: DMode,
    pub branch: BranchLabel,
    pub outer_iterations: usize,
    pub converged: bool,
}

impl PhaseBoundaryRow {
    pub fn params(&self) -> Sym21Params {
        Sym21Params {
            e: self.e,
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
        }
    }

    pub fn to_row(&self) -> Vec<f64> {
        vec![
            self.e,
            self.delta_m,
            self.a,
            self.b,
            self.c,
            self.d,
            self.s_tri,
            self.s_sb,
            self.branch.code(),
        ]
    }
}

/// Result of [`alternate`].
pub(crate) struct Alternation<P> {
    pub delta: f64,
    pub params: P,
    pub iterations: usize,
    pub converged: bool,
}

/// Alternates a root solve of `gap_fixed(p, ·)` on `(δ, hi)` with
/// `remax(δ, p)`, starting from parameters `p` optimal at `lo`, until `δ`
/// moves by less than [`OUTER_TOL`].
///
/// `gap_fixed` is NaN where `p` is infeasible; `hi` is pulled towards the
/// current `δ` until it is feasible.
pub(crate) fn alternate<P: Clone>(
    lo: f64,
    hi: f64,
    p: P,
    gap_fixed: impl Fn(&P, f64) -> f64,
    mut remax: impl FnMut(f64, &P) -> Result<P>,
) -> Result<Alternation<P>> {
    let (mut delta, mut p) = (lo, p);
    for it in 1..=MAX_OUTER {
        let g_lo = gap_fixed(&p, delta);
        if !g_lo.is_finite() {
            return Err(Error::Numerical(format!(
                "entropy gap not finite at δ = {delta}"
            )));
        }
        if g_lo <= 0.0 {
            return Ok(Alternation {
                delta,
                params: p,
                iterations: it,
                converged: true,
            });
        }
        let mut top = hi;
        let mut g_top = gap_fixed(&p, top);
        let mut shrinks = 0;
        while !(g_top < 0.0) {
            if g_top.is_finite() || shrinks > 60 {
                return Err(Error::Numerical(format!(
                    "cannot bracket the entropy crossing above δ = {delta} (gap {g_top} at {top})"
                )));
            }
            top = delta + 0.5 * (top - delta);
            g_top = gap_fixed(&p, top);
            shrinks += 1;
        }
        let next = solve_scalar_root(|x| gap_fixed(&p, x), (delta, top), 1e-17)?;
        p = remax(next, &p)?;
        let moved = (next - delta).abs();
        delta = next;
        if moved < OUTER_TOL {
            return Ok(Alternation {
                delta,
                params: p,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(Alternation {
        delta,
        params: p,
        iterations: MAX_OUTER,
        converged: false,
    })
}

/// `(S_tri - S_sb) / (½δ²|H''|)` for the maximizer `t`.
fn opt_gap(t: &TripodalMax) -> f64 {
    let (e, delta) = (t.params.e, t.delta);
    (t.excess - bipodal_entropy_excess(e, delta)) * excess_norm(e, delta)
}

/// The same gap with `t`'s free parameters held fixed and `δ` varied.
fn fixed_gap(mode: DMode, p: &Sym21Params, delta: f64) -> f64 {
    if !(delta > 0.0) {
        return f64::NAN;
    }
    let e = p.e;
    let tri = match mode {
        DMode::Ansatz => ansatz_excess(e, delta, p.a, p.b),
        DMode::FreeD => free_excess(e, delta, p.b, p.c, p.d),
    };
    match tri {
        Some(v) => (v - bipodal_entropy_excess(e, delta)) * excess_norm(e, delta),
        None => f64::NAN,
    }
}

/// Bracket `(lo, t_lo, hi)` with `gap(t_lo) >= 0` at `lo` and a loss at `hi`.
fn scan_bracket(
    e: f64,
    mode: DMode,
    seed: &Sym21Params,
    opts: &NewtonOptions,
) -> Result<(f64, TripodalMax, f64)> {
    let cap = e.min(1.0 - e);
    let mut step = DELTA_SCAN_STEP;
    for _ in 0..=SCAN_REFINEMENTS {
        let mut prev: Option<(f64, TripodalMax)> = None;
        let mut p = *seed;
        let mut k = 1;
        loop {
            let delta = k as f64 * step;
            if delta > cap {
                return Err(Error::NoTripodalPhase { e });
            }
            let won = best_tripodal(e, delta, mode, &p, opts)
                .ok()
                .filter(|t| t.local.converged && !t.collapsed() && opt_gap(t) >= 0.0);
            match (won, prev.take()) {
                (Some(t), _) => {
                    p = t.params;
                    prev = Some((delta, t));
                }
                (None, Some((lo, t))) => return Ok((lo, t, delta)),
                (None, None) => break,
            }
            k += 1;
        }
        step *= 0.1;
    }
    Err(Error::NoTripodalPhase { e })
}

/// Bracket from a nearby boundary row: step from its `δ_m` towards the crossing.
fn seeded_bracket(
    e: f64,
    mode: DMode,
    seed: &PhaseBoundaryRow,
    opts: &NewtonOptions,
) -> Result<(f64, TripodalMax, f64)> {
    let step = (0.02 * seed.delta_m).clamp(1e-7, DELTA_SCAN_STEP);
    let cap = e.min(1.0 - e);
    let mut p = Sym21Params { e, ..seed.params() };
    let eval = |delta: f64, p: &Sym21Params| {
        best_tripodal(e, delta, mode, p, opts)
            .ok()
            .filter(|t| t.local.converged && !t.collapsed())
    };
    let mut delta = seed.delta_m.min(cap);
    let first = eval(delta, &p)
        .ok_or_else(|| Error::Numerical(format!("seeded solve failed at e = {e}")))?;
    if opt_gap(&first) >= 0.0 {
        let mut lo = (delta, first);
        loop {
            delta += step;
            if delta > cap {
                return Err(Error::NoTripodalPhase { e });
            }
            match eval(delta, &lo.1.params) {
                Some(t) if opt_gap(&t) >= 0.0 => lo = (delta, t),
                _ => return Ok((lo.0, lo.1, delta)),
            }
        }
    }
    p = first.params;
    let mut hi = delta;
    loop {
        delta -= step;
        if delta <= 0.0 {
            return Err(Error::NoTripodalPhase { e });
        }
        let t = eval(delta, &p)
            .ok_or_else(|| Error::Numerical(format!("seeded solve failed at e = {e}")))?;
        if opt_gap(&t) >= 0.0 {
            return Ok((delta, t, hi));
        }
        p = t.params;
        hi = delta;
    }
}

/// `δ_m(e)` by scan and alternation; `seed` is a boundary row at a nearby `e`
/// and replaces the scan when given. A seeded attempt that fails or does not
/// converge is retried from the scan.
pub fn delta_max(
    e: f64,
    mode: DMode,
    seed: Option<&PhaseBoundaryRow>,
    opts: &NewtonOptions,
) -> Result<PhaseBoundaryRow> {
    if !(e > 0.0 && e < 0.5) {
        return Err(Error::Domain(format!("edge density {e} outside (0, ½)")));
    }
    if let Some(s) = seed {
        match seeded_bracket(e, mode, s, opts).and_then(|b| boundary_from(e, mode, b, opts)) {
            Ok(row) if row.converged => return Ok(row),
            Err(err @ Error::NoTripodalPhase { .. }) => return Err(err),
            _ => {}
        }
    }
    boundary_from(e, mode, unseeded(e, mode, opts)?, opts)
}

fn boundary_from(
    e: f64,
    mode: DMode,
    (lo, t_lo, hi): (f64, TripodalMax, f64),
    opts: &NewtonOptions,
) -> Result<PhaseBoundaryRow> {
    let alt = alternate(
        lo,
        hi,
        t_lo,
        |t, delta| fixed_gap(mode, &t.params, delta),
        |delta, t| {
            let next = best_tripodal(e, delta, mode, &t.params, opts)?;
            if !next.local.converged || next.collapsed() {
                return Err(Error::Numerical(format!(
                    "re-maximization unconverged at e = {e}, δ = {delta}"
                )));
            }
            Ok(next)
        },
    )?;
    let t = alt.params;
    let delta = t.delta;
    let s_sb = h(e) + bipodal_entropy_excess(e, delta);
    let s_tri = t.entropy;
    Ok(PhaseBoundaryRow {
        e,
        delta_m: delta,
        a: t.params.a,
        b: t.params.b,
        c: t.params.c,
        d: t.params.d,
        s_tri,
        s_sb,
        d_mode: mode,
        branch: t.branch,
        outer_iterations: alt.iterations,
        converged: alt.converged && t.local.converged && (s_tri - s_sb).abs() <= ENTROPY_TOL,
    })
}

fn unseeded(e: f64, mode: DMode, opts: &NewtonOptions) -> Result<(f64, TripodalMax, f64)> {
    let f = oe_branch(e, None, opts)?;
    let seed = Sym21Params {
        e,
        a: f.a,
        b: f.b,
        c: 0.0,
        d: 0.0,
    };
    scan_bracket(e, mode, &seed, opts)
}

/// `δ_m` along `e` in both directions from the anchor `e = 0.1` (clamped
/// into the range), each row seeded by its neighbour.
///
/// A direction ends at the first `e` without a tripodal phase, or after three
/// consecutive unresolved rows, which sets `diagnostic`. Rows are returned in
/// increasing `e`; unresolved rows are gap rows.
pub fn boundary_curve(
    e_range: (f64, f64),
    step: f64,
    mode: DMode,
    opts: &NewtonOptions,
) -> Result<SweepTable> {
    let (lo, hi) = e_range;
    if !(lo > 0.0 && lo <= hi && hi < 0.5) {
        return Err(Error::Parameter(format!("bad e range [{lo}, {hi}]")));
    }
    let anchor = 0.1_f64.clamp(lo, hi);
    let config =
        serde_json::json!({ "e_range": [lo, hi], "step": step, "d_mode": mode, "newton": opts })
            .to_string();
    let mut table = SweepTable::new("boundary", &BOUNDARY_COLUMNS, &config);
    table.set_meta("d_mode", mode);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut diagnostics = Vec::new();

    let first = delta_max(anchor, mode, None, opts)?;
    let mut ends = Vec::new();
    for (stop, name) in [(lo, "low"), (hi, "high")] {
        let grid = SweepRange::new(anchor, stop, step)?.values();
        let mut last = first.clone();
        let mut fails = 0;
        for &e in &grid[1..] {
            match delta_max(e, mode, Some(&last), opts) {
                Ok(row) if row.converged => {
                    fails = 0;
                    rows.push(row.to_row());
                    last = row;
                }
                Err(Error::NoTripodalPhase { .. }) => {
                    ends.push(format!("{name}: no tripodal phase at e = {e}"));
                    break;
                }
                _ => {
                    fails += 1;
                    let mut gap = vec![f64::NAN; BOUNDARY_COLUMNS.len()];
                    gap[0] = e;
                    rows.push(gap);
                    if fails >= 3 {
                        diagnostics.push(format!(
                            "{name} sweep stopped after 3 unresolved rows at e = {e}"
                        ));
                        break;
                    }
                }
            }
        }
    }
    rows.push(first.to_row());
    rows.sort_by(|x, y| x[0].total_cmp(&y[0]));
    for r in rows {
        table.push(r)?;
    }
    if !ends.is_empty() {
        table.set_meta("ends", ends.join("; "));
    }
    if !diagnostics.is_empty() {
        table.set_meta("diagnostic", diagnostics.join("; "));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{sym21_graphon, symmetric_bipodal};

    fn opts() -> NewtonOptions {
        NewtonOptions::default()
    }

    #[test]
    fn ansatz_boundary_at_01() {
        let row = delta_max(0.1, DMode::Ansatz, None, &opts()).unwrap();
        assert!(row.converged);
        assert!((row.s_tri - row.s_sb).abs() <= ENTROPY_TOL);
        assert!(
            row.delta_m > 0.004 && row.delta_m < 0.005,
            "{}",
            row.delta_m
        );
        assert_eq!(row.d, 0.0);
    }

    #[test]
    fn free_boundary_not_below_ansatz() {
        let an = delta_max(0.1, DMode::Ansatz, None, &opts()).unwrap();
        let fr = delta_max(0.1, DMode::FreeD, None, &opts()).unwrap();
        assert!(fr.converged);
        assert!(fr.delta_m >= an.delta_m);
    }

    #[test]
    fn no_phase_above_threshold() {
        for mode in [DMode::Ansatz, DMode::FreeD] {
            assert!(matches!(
                delta_max(0.25, mode, None, &opts()),
                Err(Error::NoTripodalPhase { .. })
            ));
        }
    }

    #[test]
    fn seeded_matches_unseeded() {
        let a = delta_max(0.1, DMode::Ansatz, None, &opts()).unwrap();
        let b = delta_max(0.101, DMode::Ansatz, Some(&a), &opts()).unwrap();
        let c = delta_max(0.101, DMode::Ansatz, None, &opts()).unwrap();
        assert!((b.delta_m - c.delta_m).abs() < 1e-9);
    }

    #[test]
    fn boundary_jump_is_discontinuous() {
        let row = delta_max(0.1, DMode::Ansatz, None, &opts()).unwrap();
        let tri = sym21_graphon(&row.params()).unwrap();
        let sb = symmetric_bipodal(0.1, row.delta_m).unwrap();
        let sbv = [sb.values()[0][0], sb.values()[0][1]];
        let dist = tri
            .values()
            .iter()
            .flatten()
            .map(|v| {
                sbv.iter()
                    .map(|s| (v - s).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        assert!(dist > 0.01);
    }

    #[test]
    fn alternation_on_a_toy_problem() {
        // gap(p, δ) = 1 - δ² - (p - δ)², maximized by p = δ, so the optimal gap vanishes at δ = 1.
        let gap = |p: &f64, d: f64| 1.0 - d * d - (p - d).powi(2);
        let alt = alternate(0.5, 2.0, 0.5, gap, |d, _| Ok(d)).unwrap();
        assert!(alt.converged);
        assert!((alt.delta - 1.0).abs() < 1e-12);
        assert!(alt.iterations < 30);
    }
}
