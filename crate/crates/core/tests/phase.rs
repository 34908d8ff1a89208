use strauss_core::closed_forms::{f_coefficient_raw, Sym21Params};
use strauss_core::entropy::{h_second, tripodal_threshold};
use strauss_core::optimizer::{grid_scan, SweepRange};
use strauss_core::phase::{
    best_tripodal, classify_point, delta_max, fm_curve, gap_crossing, maximize_f_at, oe_branch,
    BranchLabel, DMode,
};
use strauss_core::NewtonOptions;

fn opts() -> NewtonOptions {
    NewtonOptions::default()
}

#[test]
fn boundary_rows_are_jumps_with_equal_entropy() {
    for &e in &[0.05, 0.1, 0.15] {
        for mode in [DMode::Ansatz, DMode::FreeD] {
            let row = delta_max(e, mode, None, &opts()).unwrap();
            assert!(row.converged, "{row:?}");
            assert!((row.s_tri - row.s_sb).abs() <= 1e-10);
            let blocks = row.params().block_values().unwrap();
            let (lo, hi) = (e - row.delta_m, e + row.delta_m);
            let jump = blocks
                .iter()
                .map(|v| (v - lo).abs().min((v - hi).abs()))
                .fold(0.0, f64::max);
            assert!(jump > 0.01, "e = {e}, {mode}: jump {jump}");
        }
    }
}

#[test]
fn boundary_row_is_stationary() {
    let o = opts();
    let row = delta_max(0.1, DMode::FreeD, None, &o).unwrap();
    let t = best_tripodal(0.1, row.delta_m, DMode::FreeD, &row.params(), &o).unwrap();
    assert!(t.local.converged);
    assert!((t.entropy - row.s_tri).abs() <= 1e-12);
}

#[test]
fn small_delta_matches_f_branch() {
    let o = opts();
    let e = 0.1;
    let f = &maximize_f_at(e, None, &o).unwrap()[0];
    let seed = Sym21Params {
        e,
        a: f.a,
        b: f.b,
        c: 0.0,
        d: 0.0,
    };
    for mode in [DMode::Ansatz, DMode::FreeD] {
        let t = best_tripodal(e, 1e-4, mode, &seed, &o).unwrap();
        assert!(
            (t.params.a - f.a).abs() <= 1e-3 && (t.params.b - f.b).abs() <= 1e-3,
            "{mode}: {:?}",
            t.params
        );
    }
}

#[test]
fn classification_is_stable_under_tighter_newton() {
    let loose = opts();
    let tight = loose.tightened(10.0);
    let mut points = Vec::new();
    for &e in &[0.001, 0.005, 0.05, 0.1, 0.15] {
        let dm = if e < 0.01 {
            e * 0.1
        } else {
            delta_max(e, DMode::Ansatz, None, &loose).unwrap().delta_m
        };
        for &r in &[0.05, 0.5, 0.8, 1.3] {
            points.push((e, e.powi(3) - (r * dm).powi(3)));
        }
    }
    assert_eq!(points.len(), 20);
    for (e, t) in points {
        let a = classify_point(e, t, DMode::Ansatz, &loose).unwrap();
        let b = classify_point(e, t, DMode::Ansatz, &tight).unwrap();
        assert_eq!(a.label, b.label, "e = {e}, t = {t}: {a:?} vs {b:?}");
    }
}

#[test]
fn fm_crossing_is_stable_under_step_halving() {
    let o = opts();
    let coarse = fm_curve(SweepRange::new(0.19, 0.23, 0.001).unwrap(), &o).unwrap();
    let fine = fm_curve(SweepRange::new(0.19, 0.23, 0.0005).unwrap(), &o).unwrap();
    let (x, y) = (
        gap_crossing(&coarse).unwrap().unwrap(),
        gap_crossing(&fine).unwrap().unwrap(),
    );
    assert!((x - y).abs() <= 5e-4, "{x} vs {y}");
    let gaps = coarse.column("gap").unwrap();
    let es = coarse.column("e").unwrap();
    for (e, g) in es.iter().zip(gaps) {
        if g.is_finite() {
            assert_eq!(g > 0.0, *e < x, "e = {e}, gap {g}");
        }
    }
}

#[test]
fn f_landscape_at_0001_has_two_basins() {
    // Feasibility confines (A, B) to the strip 0 < A - B <= e, so scan (A + B, (A - B)/e).
    // Below A + B = e the strip approaches B = -A, where F is flat to rounding.
    let e = 0.001;
    let to_ab = |x: &[f64]| (0.5 * (x[0] + e * x[1]), 0.5 * (x[0] - e * x[1]));
    let obj = |x: &[f64]| {
        let (a, b) = to_ab(x);
        f_coefficient_raw(e, a, b).map(|v| v / h_second(e).abs())
    };
    let cands = grid_scan(obj, &[(e, 1.0 - e), (0.0, 1.0)], &[4000, 50]).unwrap();
    let a: Vec<f64> = cands.iter().map(|m| to_ab(&m.point).0).collect();
    assert_eq!(a.len(), 2, "{a:?}");
    assert!(
        a.iter().any(|&a| a < 10.0 * e) && a.iter().any(|&a| a > 0.3),
        "{a:?}"
    );
}

#[test]
fn f_advantage_only_below_threshold() {
    let o = opts();
    assert!(oe_branch(0.1, None, &o).unwrap().gap() > 0.0);
    assert!(oe_branch(0.2, None, &o).unwrap().gap() > 0.0);
    let above = maximize_f_at(0.25, None, &o).unwrap();
    assert!(above[0].gap() <= 1e-12);
    assert!(tripodal_threshold() > 0.2113 && tripodal_threshold() < 0.2114);
}

#[test]
fn theta1_wins_at_tiny_deficit_for_tiny_e() {
    let c = classify_point(0.001, 1e-9 - 1e-21, DMode::Ansatz, &opts()).unwrap();
    assert_eq!(c.label, BranchLabel::Theta1);
    assert!(c.s_theta1 > c.s_oe);
}
