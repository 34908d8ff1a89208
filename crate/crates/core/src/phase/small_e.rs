//! Competition between the Θ(1) and O(e) tripodal branches, and the
//! classification of a point `(e, t)` at or below the Erdős–Rényi curve.

use serde::Serialize;

use super::boundary::alternate;
use super::fm::{oe_branch, theta1_branch};
use super::tripodal::{
    ansatz_excess, best_theta1_face, best_tripodal, excess_norm, face_excess, TripodalMax,
};
use super::{BranchLabel, DMode};
use crate::closed_forms::{bipodal_entropy_excess, Sym21Params};
use crate::entropy::h;
use crate::error::{Error, Result};
use crate::optimizer::NewtonOptions;

/// Largest `e` accepted by [`theta1_crossing`].
pub const SMALL_E_MAX: f64 = 0.01;
/// Steps per unit `e` in the scan for the Θ(1)/O(e) crossing.
const CROSSING_SCAN: f64 = 1000.0;
/// Continuation steps from `δ = 0` used by [`classify_point`].
const CLASSIFY_STEPS: usize = 8;

#[derive(Clone)]
struct Pair {
    theta: TripodalMax,
    oe: TripodalMax,
}

fn pair_gap(p: &Pair, delta: f64) -> f64 {
    let e = p.oe.params.e;
    let th = face_excess(e, delta, p.theta.params.b);
    let oe = ansatz_excess(e, delta, p.oe.params.a, p.oe.params.b);
    match (th, oe) {
        (Some(t), Some(o)) => (t - o) * excess_norm(e, delta),
        _ => f64::NAN,
    }
}

fn solve_pair(e: f64, delta: f64, prev: &Pair, opts: &NewtonOptions) -> Result<Pair> {
    let theta = best_theta1_face(e, delta, Some(prev.theta.params.b), opts)?;
    let oe = best_tripodal(e, delta, DMode::Ansatz, &prev.oe.params, opts)?;
    if !(theta.local.converged && oe.local.converged) {
        return Err(Error::Numerical(format!(
            "branch tracking failed at e = {e}, δ = {delta}"
        )));
    }
    Ok(Pair { theta, oe })
}

/// The `δ` at which the Θ(1) branch (on its face `g11 = 0`) and the O(e)
/// branch have equal ansatz entropy; `None` when O(e) already wins as `δ -> 0`.
pub fn theta1_crossing(e: f64, opts: &NewtonOptions) -> Result<Option<f64>> {
    if !(e > 0.0 && e < SMALL_E_MAX) {
        return Err(Error::Parameter(format!(
            "theta1_crossing needs 0 < e < {SMALL_E_MAX}, got {e}"
        )));
    }
    let step = e / CROSSING_SCAN;
    let f_theta = theta1_branch(e, None, opts)?;
    let f_oe = oe_branch(e, None, opts)?;
    let start = Pair {
        theta: stub(e, f_theta.a, f_theta.b, BranchLabel::Theta1),
        oe: stub(e, f_oe.a, f_oe.b, BranchLabel::OE),
    };
    let mut cur = solve_pair(e, step, &start, opts)?;
    if pair_gap(&cur, step) <= 0.0 {
        return Ok(None);
    }
    let mut lo = step;
    let hi = loop {
        let delta = lo + step;
        if delta > e {
            return Err(Error::Numerical(format!(
                "no Θ(1)/O(e) crossing below δ = {e}"
            )));
        }
        let next = solve_pair(e, delta, &cur, opts)?;
        if pair_gap(&next, delta) <= 0.0 {
            break delta;
        }
        cur = next;
        lo = delta;
    };
    let alt = alternate(lo, hi, cur, pair_gap, |delta, p| {
        solve_pair(e, delta, p, opts)
    })?;
    if !alt.converged {
        return Err(Error::Numerical(format!(
            "Θ(1)/O(e) alternation unconverged at e = {e}"
        )));
    }
    Ok(Some(alt.delta))
}

fn stub(e: f64, a: f64, b: f64, branch: BranchLabel) -> TripodalMax {
    TripodalMax {
        params: Sym21Params {
            e,
            a,
            b,
            c: 0.0,
            d: 0.0,
        },
        delta: 0.0,
        mode: DMode::Ansatz,
        branch,
        excess: 0.0,
        entropy: h(e),
        local: crate::optimizer::LocalMax {
            point: vec![a, b],
            value: 0.0,
            converged: false,
            iterations: 0,
            grad_norm: f64::NAN,
        },
    }
}

/// Winner at one point, with every candidate's entropy (NaN when unavailable).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub e: f64,
    pub t: f64,
    pub delta: f64,
    pub label: BranchLabel,
    pub entropy: f64,
    pub params: Option<Sym21Params>,
    pub s_bipodal: f64,
    pub s_oe: f64,
    pub s_theta1: f64,
    /// A runner-up agreed with the winner within the tie tolerance.
    pub tie: bool,
}

/// Candidates within this relative distance of the best excess are ties.
const TIE_REL: f64 = 1e-12;

/// Classifies `(e, t)` with `t <= e³` by comparing the symmetric bipodal
/// entropy with both tripodal branches at `δ = (e³ - t)^{1/3}`. The O(e)
/// branch uses `mode`; the Θ(1) branch uses the ansatz on its face. Both are
/// continued from `δ = 0` in equal steps. Ties go to BIPODAL, then O_E.
pub fn classify_point(e: f64, t: f64, mode: DMode, opts: &NewtonOptions) -> Result<Classification> {
    if !(e > 0.0 && e < 0.5) {
        return Err(Error::Domain(format!("edge density {e} outside (0, ½)")));
    }
    if !(t > 0.0) || t > e.powi(3) {
        return Err(Error::Domain(format!(
            "t = {t} outside (0, e³]: only the region at or below t = e³ is covered"
        )));
    }
    let delta = (e.powi(3) - t).cbrt();
    if delta == 0.0 {
        return Ok(Classification {
            e,
            t,
            delta,
            label: BranchLabel::Bipodal,
            entropy: h(e),
            params: None,
            s_bipodal: h(e),
            s_oe: h(e),
            s_theta1: h(e),
            tie: true,
        });
    }
    let bip = (delta <= e.min(1.0 - e)).then(|| bipodal_entropy_excess(e, delta));
    let oe = oe_branch(e, None, opts).ok().and_then(|f| {
        let mut p = Sym21Params {
            e,
            a: f.a,
            b: f.b,
            c: 0.0,
            d: 0.0,
        };
        let mut last = None;
        for k in 1..=CLASSIFY_STEPS {
            let m =
                best_tripodal(e, delta * k as f64 / CLASSIFY_STEPS as f64, mode, &p, opts).ok()?;
            p = m.params;
            last = Some(m);
        }
        last.filter(|m| m.local.converged)
    });
    let theta = theta1_branch(e, None, opts).ok().and_then(|f| {
        let mut b = f.b;
        let mut last = None;
        for k in 1..=CLASSIFY_STEPS {
            let m = best_theta1_face(e, delta * k as f64 / CLASSIFY_STEPS as f64, Some(b), opts)
                .ok()?;
            b = m.params.b;
            last = Some(m);
        }
        last.filter(|m| m.local.converged)
    });

    let candidates: [(BranchLabel, Option<f64>, Option<Sym21Params>); 3] = [
        (BranchLabel::Bipodal, bip, None),
        (
            BranchLabel::OE,
            oe.as_ref().map(|m| m.excess),
            oe.as_ref().map(|m| m.params),
        ),
        (
            BranchLabel::Theta1,
            theta.as_ref().map(|m| m.excess),
            theta.as_ref().map(|m| m.params),
        ),
    ];
    let best = candidates
        .iter()
        .filter_map(|(_, x, _)| *x)
        .fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return Err(Error::Numerical(format!(
            "no candidate evaluated at e = {e}, t = {t}"
        )));
    }
    let tol = TIE_REL * best.abs();
    let near: Vec<&(BranchLabel, Option<f64>, Option<Sym21Params>)> = candidates
        .iter()
        .filter(|(_, x, _)| x.is_some_and(|v| v >= best - tol))
        .collect();
    let (label, excess, params) = *near[0];
    let s = |x: Option<f64>| x.map_or(f64::NAN, |v| h(e) + v);
    Ok(Classification {
        e,
        t,
        delta,
        label,
        entropy: h(e) + excess.unwrap_or(best),
        params,
        s_bipodal: s(bip),
        s_oe: s(oe.map(|m| m.excess)),
        s_theta1: s(theta.map(|m| m.excess)),
        tie: near.len() > 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> NewtonOptions {
        NewtonOptions::default()
    }

    #[test]
    fn crossing_exists_at_0001() {
        let d = theta1_crossing(0.001, &opts()).unwrap().expect("crossing");
        assert!(d > 0.0 && d < 0.001);
        let below = classify_point(
            0.001,
            0.001_f64.powi(3) - (0.5 * d).powi(3),
            DMode::Ansatz,
            &opts(),
        )
        .unwrap();
        assert!(below.s_theta1 > below.s_oe);
        let above = classify_point(
            0.001,
            0.001_f64.powi(3) - (1.5 * d).powi(3),
            DMode::Ansatz,
            &opts(),
        )
        .unwrap();
        assert!(above.s_oe > above.s_theta1);
    }

    #[test]
    fn no_crossing_at_0005() {
        assert_eq!(theta1_crossing(0.005, &opts()).unwrap(), None);
        assert!(theta1_crossing(0.02, &opts()).is_err());
    }

    #[test]
    fn classify_examples() {
        let o = opts();
        assert_eq!(
            classify_point(0.1, 0.001 - 1e-9, DMode::Ansatz, &o)
                .unwrap()
                .label,
            BranchLabel::OE
        );
        let bip = classify_point(0.1, 0.001 - 1e-6, DMode::FreeD, &o).unwrap();
        assert_eq!(bip.label, BranchLabel::Bipodal);
        let tiny = classify_point(0.001, 1e-9 - 1e-21, DMode::Ansatz, &o).unwrap();
        assert_eq!(tiny.label, BranchLabel::Theta1);
        assert!(classify_point(0.1, 0.0011, DMode::Ansatz, &o).is_err());
    }

    #[test]
    fn on_the_curve_is_a_bipodal_tie() {
        let c = classify_point(0.1, 0.1_f64.powi(3), DMode::Ansatz, &opts()).unwrap();
        assert_eq!(c.label, BranchLabel::Bipodal);
        assert!(c.tie);
    }
}
