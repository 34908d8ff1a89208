use proptest::prelude::*;

use strauss_core::closed_forms::{
    corner_embed, f_coefficient, sym21_entropy, sym21_graphon, sym21_triangle, tripodal_ansatz,
    Sym21Params,
};
use strauss_core::entropy::h_second;
use strauss_core::graphon::{
    degree_vector, edge_density, graphon_entropy, triangle_density, StepGraphon,
};
use strauss_core::optimizer::{
    continuation_sweep, grid_scan, newton_maximize, LocalMax, SweepRange,
};
use strauss_core::NewtonOptions;

prop_compose! {
    fn step_graphon()(k in 1usize..=5)
        (raw in prop::collection::vec(0.05f64..1.0, k), vals in prop::collection::vec(0.0f64..=1.0, k * k))
        -> StepGraphon
    {
        let k = raw.len();
        let total: f64 = raw.iter().sum();
        let mut sizes: Vec<f64> = raw.iter().map(|s| s / total).collect();
        let head: f64 = sizes[..k - 1].iter().sum();
        sizes[k - 1] = 1.0 - head;
        let mut values = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                values[i][j] = vals[i * k + j];
                values[j][i] = vals[i * k + j];
            }
        }
        StepGraphon::new(sizes, values).unwrap()
    }
}

prop_compose! {
    fn sym21(with_d: bool)(
        e in 0.02f64..0.6, a in -0.4f64..0.4, b in -0.4f64..0.4, c in 0.01f64..0.9, d in -0.3f64..0.3
    ) -> Option<Sym21Params> {
        Sym21Params::new(e, a, b, c, if with_d { d } else { 0.0 }).ok()
    }
}

fn functionals(g: &StepGraphon) -> [f64; 3] {
    [edge_density(g), triangle_density(g), graphon_entropy(g)]
}

fn close(x: [f64; 3], y: [f64; 3], tol: f64) -> bool {
    x.iter().zip(&y).all(|(a, b)| (a - b).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn functionals_in_range(g in step_graphon()) {
        let [eps, tau, s] = functionals(&g);
        prop_assert!((0.0..=1.0).contains(&eps));
        prop_assert!((0.0..=1.0).contains(&tau));
        prop_assert!((0.0..=std::f64::consts::LN_2).contains(&s));
    }

    #[test]
    fn degrees_average_to_edge_density(g in step_graphon()) {
        let sum: f64 = degree_vector(&g).iter().zip(g.sizes()).map(|(d, c)| d * c).sum();
        prop_assert!((sum - edge_density(&g)).abs() <= 1e-14);
    }

    #[test]
    fn permutation_invariance(g in step_graphon(), rot in 0usize..5) {
        let k = g.podes();
        let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
        prop_assert!(close(functionals(&g), functionals(&g.permuted(&perm).unwrap()), 1e-14));
    }

    #[test]
    fn merge_invariance(g in step_graphon(), i in 0usize..5, f in 0.05f64..0.95) {
        let split = g.split_pode(i % g.podes(), f).unwrap();
        prop_assert_eq!(split.podes(), g.podes() + 1);
        prop_assert!(close(functionals(&g), functionals(&split), 1e-14));
    }

    #[test]
    fn constant_triangle_is_cube(p in 0.0f64..=1.0) {
        prop_assert_eq!(triangle_density(&StepGraphon::constant(p).unwrap()), p * p * p);
    }

    #[test]
    fn sym21_closed_forms_are_exact(p in sym21(true)) {
        prop_assume!(p.is_some());
        let p = p.unwrap();
        let g = sym21_graphon(&p).unwrap();
        prop_assert!((sym21_triangle(&p).unwrap() - triangle_density(&g)).abs() <= 1e-13);
        prop_assert!((sym21_entropy(&p).unwrap() - graphon_entropy(&g)).abs() <= 1e-13);
        prop_assert!((edge_density(&g) - p.e).abs() <= 1e-14);
    }

    #[test]
    fn reduction_chain(p in sym21(false)) {
        prop_assume!(p.is_some());
        let p = p.unwrap();
        let via_sym21 = functionals(&sym21_graphon(&p).unwrap());
        let via_ansatz = functionals(&tripodal_ansatz(p.e, p.a, p.b, p.c).unwrap());
        prop_assert!(close(via_sym21, via_ansatz, 1e-14));
        let flat = functionals(&sym21_graphon(&Sym21Params { a: 0.0, b: 0.0, ..p }).unwrap());
        prop_assert!(close(flat, functionals(&StepGraphon::constant(p.e).unwrap()), 1e-14));
    }

    #[test]
    fn corner_embedding_is_edge_neutral(g0 in step_graphon(), e in 0.2f64..0.8, c in 0.01f64..0.2) {
        if let Ok(g) = corner_embed(&g0, e, c) {
            prop_assert!((edge_density(&g) - e).abs() <= 1e-14);
        }
    }

    #[test]
    fn newton_never_loses_and_is_stationary(
        cx in -2.0f64..2.0, cy in -2.0f64..2.0, x0 in -3.0f64..3.0, y0 in -3.0f64..3.0, w in 0.5f64..4.0
    ) {
        let f = |x: &[f64]| Some(-(x[0] - cx).powi(2) - w * (x[1] - cy).powi(2) - 0.1 * (x[0] - cx).powi(4));
        let opts = NewtonOptions::default();
        let m = newton_maximize(f, &[x0, y0], &opts).unwrap();
        let f0 = f(&[x0, y0]).unwrap();
        prop_assert!(m.value >= f0 - 16.0 * f64::EPSILON * f0.abs());
        prop_assert!(m.converged);
        let h = 10.0 * opts.step_tol;
        for i in 0..2 {
            for s in [-h, h] {
                let mut p = m.point.clone();
                p[i] += s;
                prop_assert!(f(&p).unwrap() - m.value <= opts.grad_tol * h);
            }
        }
    }
}

#[test]
fn f_limit_is_taylor_consistent() {
    for &e in &[0.1, 0.3, 0.5] {
        let ratios: Vec<f64> = [1e-3, 3e-4, 1e-4, 3e-5]
            .iter()
            .map(|&a| (f_coefficient(e, a, 0.0).unwrap() - h_second(e)).abs() / a)
            .collect();
        let c = ratios[0] * 2.0;
        assert!(ratios.iter().all(|r| *r <= c), "e = {e}: {ratios:?}");
    }
}

#[test]
fn paraboloid_scan_then_newton_recovers_maximum() {
    let f = |x: &[f64]| Some(-(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.2).powi(2));
    let opts = NewtonOptions::default();
    let seed = grid_scan(f, &[(-1.0, 1.0), (-1.0, 1.0)], &[21, 21]).unwrap();
    assert_eq!(seed.len(), 1);
    let m = newton_maximize(f, &seed[0].point, &opts).unwrap();
    assert!((m.point[0] - 0.3).abs() <= opts.step_tol.max(1e-10));
    assert!((m.point[1] + 0.2).abs() <= opts.step_tol.max(1e-10));
}

#[test]
fn continuation_is_deterministic() {
    let solve = |t: f64, x: &[f64]| {
        newton_maximize(
            |y: &[f64]| Some(-(y[0] - t.sin()).powi(2)),
            x,
            &NewtonOptions::default(),
        )
    };
    let run = || -> Vec<LocalMax> {
        let sweep =
            continuation_sweep(solve, SweepRange::new(0.0, 2.0, 0.1).unwrap(), &[0.0]).unwrap();
        sweep.solved().map(|(_, m)| m.clone()).collect()
    };
    assert_eq!(run(), run());
}
