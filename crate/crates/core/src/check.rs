//! Identity suite: every closed form against the generic step-graphon
//! functionals, and those against the grid oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_forms::{
    corner_coefficient, corner_embed, f_coefficient, sym21_ds_dd, sym21_entropy, sym21_graphon,
    sym21_triangle, symmetric_bipodal, tripodal_ansatz, Sym21Params,
};
use crate::graphon::{
    degree_vector, edge_density, graphon_entropy, riemann_oracle, triangle_density, StepGraphon,
};

pub const DEFAULT_DRAWS: usize = 1000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest observed error.
    pub max_error: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl CheckResult {
    fn new(name: &str, errors: impl IntoIterator<Item = f64>, tolerance: f64) -> Self {
        let mut max_error = 0.0_f64;
        let mut cases = 0;
        let mut bad = false;
        for err in errors {
            cases += 1;
            bad |= !err.is_finite();
            max_error = max_error.max(err);
        }
        CheckResult {
            name: name.to_string(),
            passed: !bad && max_error <= tolerance,
            max_error,
            tolerance,
            cases,
        }
    }
}

/// Suite configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckConfig {
    pub draws: usize,
    pub seed: u64,
    /// Grid size for the Riemann oracle checks.
    pub n_grid: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            draws: DEFAULT_DRAWS,
            seed: DEFAULT_SEED,
            n_grid: 2000,
        }
    }
}

/// A random valid (2,1)-symmetric parameter set; `with_d` controls whether `D` is drawn.
pub fn random_sym21(rng: &mut impl Rng, with_d: bool) -> Sym21Params {
    loop {
        let e = rng.gen_range(0.02..0.6);
        let c = rng.gen_range(0.01..0.9);
        let a = rng.gen_range(-0.4..0.4);
        let b = rng.gen_range(-0.4..0.4);
        let d = if with_d {
            rng.gen_range(-0.3..0.3)
        } else {
            0.0
        };
        if let Ok(p) = Sym21Params::new(e, a, b, c, d) {
            return p;
        }
    }
}

fn random_step(rng: &mut impl Rng, k: usize) -> StepGraphon {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut sizes: Vec<f64> = raw.iter().map(|s| s / total).collect();
    let head: f64 = sizes[..k - 1].iter().sum();
    sizes[k - 1] = 1.0 - head;
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = rng.gen_range(0.0..1.0);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    StepGraphon::new(sizes, values).expect("valid random step graphon")
}

fn functionals(g: &StepGraphon) -> [f64; 3] {
    [edge_density(g), triangle_density(g), graphon_entropy(g)]
}

fn max_diff(x: [f64; 3], y: [f64; 3]) -> f64 {
    x.iter()
        .zip(&y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Runs every check. Results are in a fixed order.
pub fn run_checks(cfg: &CheckConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draws: Vec<Sym21Params> = (0..cfg.draws)
        .map(|_| random_sym21(&mut rng, true))
        .collect();
    let ansatz: Vec<Sym21Params> = (0..cfg.draws)
        .map(|_| random_sym21(&mut rng, false))
        .collect();
    let mut out = Vec::new();

    out.push(CheckResult::new(
        "sym21 triangle closed form = generic triangle density",
        draws.iter().map(|p| {
            (sym21_triangle(p).unwrap() - triangle_density(&sym21_graphon(p).unwrap())).abs()
        }),
        1e-13,
    ));
    out.push(CheckResult::new(
        "sym21 entropy closed form = generic entropy",
        draws.iter().map(|p| {
            (sym21_entropy(p).unwrap() - graphon_entropy(&sym21_graphon(p).unwrap())).abs()
        }),
        1e-13,
    ));
    out.push(CheckResult::new(
        "sym21 edge density = e and degrees = (e+(1-c)D/2, e+(1-c)D/2, e-cD/2)",
        draws.iter().map(|p| {
            let g = sym21_graphon(p).unwrap();
            let d = degree_vector(&g);
            let hi = p.e + 0.5 * (1.0 - p.c) * p.d;
            let lo = p.e - 0.5 * p.c * p.d;
            [
                (edge_density(&g) - p.e).abs(),
                (d[0] - hi).abs(),
                (d[1] - hi).abs(),
                (d[2] - lo).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        }),
        1e-14,
    ));
    out.push(CheckResult::new(
        "ansatz triangle density = e³ - c³(A³ - B³)",
        ansatz.iter().map(|p| {
            let g = tripodal_ansatz(p.e, p.a, p.b, p.c).unwrap();
            (triangle_density(&g) - (p.e.powi(3) - p.c.powi(3) * (p.a.powi(3) - p.b.powi(3)))).abs()
        }),
        1e-13,
    ));

    let mut corner_errors = Vec::new();
    for &e in &[0.05, 0.1, 0.15, 0.2, 0.3] {
        for i in 1..=6 {
            for j in 0..=6 {
                let a = e * (0.25 + 0.45 * i as f64);
                let b = a * j as f64 / 7.0;
                if e - a + b < 0.0 || e + a + b > 1.0 {
                    continue;
                }
                let g0 = StepGraphon::new(
                    vec![0.5, 0.5],
                    vec![vec![e - a + b, e + a + b], vec![e + a + b, e - a + b]],
                )
                .unwrap();
                let (cc, f) = (
                    corner_coefficient(&g0, e).unwrap(),
                    f_coefficient(e, a, b).unwrap(),
                );
                corner_errors.push((cc - f).abs());
            }
        }
    }
    out.push(CheckResult::new(
        "corner coefficient of bipodal g0 = F(e, A, B)",
        corner_errors,
        1e-13,
    ));

    let mut first = Vec::new();
    let mut second = Vec::new();
    for p in ansatz.iter().take(200).filter(|p| {
        p.block_values()
            .unwrap()
            .iter()
            .all(|v| *v > 0.1 && *v < 0.9)
    }) {
        let step = 1e-4;
        let s = |d: f64| sym21_entropy(&Sym21Params { d, ..*p });
        let (Ok(sp), Ok(s0), Ok(sm)) = (s(step), s(0.0), s(-step)) else {
            continue;
        };
        first.push((sym21_ds_dd(p, 1).unwrap() - (sp - sm) / (2.0 * step)).abs());
        second.push((sym21_ds_dd(p, 2).unwrap() - (sp - 2.0 * s0 + sm) / (step * step)).abs());
    }
    out.push(CheckResult::new(
        "dS/dD at D = 0 vs central difference",
        first,
        1e-7,
    ));
    out.push(CheckResult::new(
        "d²S/dD² at D = 0 vs central difference",
        second,
        1e-7,
    ));

    let mut corner_edge = Vec::new();
    for _ in 0..100 {
        let g0 = random_step(&mut rng, 3);
        let e = rng.gen_range(0.2..0.8);
        if let Ok(g) = corner_embed(&g0, e, 0.05) {
            corner_edge.push(
                degree_vector(&g)
                    .iter()
                    .map(|d| (d - e).abs())
                    .fold((edge_density(&g) - e).abs(), f64::max),
            );
        }
    }
    out.push(CheckResult::new(
        "corner embedding has constant degree e",
        corner_edge,
        1e-14,
    ));

    let mut perm = Vec::new();
    let mut merge = Vec::new();
    let mut ranges = Vec::new();
    for k in 1..=5 {
        for _ in 0..50 {
            let g = random_step(&mut rng, k);
            let base = functionals(&g);
            let order: Vec<usize> = (0..k).rev().collect();
            perm.push(max_diff(base, functionals(&g.permuted(&order).unwrap())));
            let i = rng.gen_range(0..k);
            merge.push(max_diff(
                base,
                functionals(&g.split_pode(i, rng.gen_range(0.1..0.9)).unwrap()),
            ));
            let [eps, tau, s] = base;
            let inside = (0.0..=1.0).contains(&eps)
                && (0.0..=1.0).contains(&tau)
                && (0.0..=std::f64::consts::LN_2).contains(&s);
            let dsum: f64 = degree_vector(&g)
                .iter()
                .zip(g.sizes())
                .map(|(d, c)| d * c)
                .sum();
            ranges.push(if inside {
                (dsum - eps).abs()
            } else {
                f64::INFINITY
            });
        }
    }
    out.push(CheckResult::new("pode permutation invariance", perm, 1e-14));
    out.push(CheckResult::new("pode split invariance", merge, 1e-14));
    out.push(CheckResult::new(
        "functional ranges and degree sum",
        ranges,
        1e-14,
    ));

    let n = cfg.n_grid.max(16);
    let aligned_n = n + n % 2;
    let sb = symmetric_bipodal(0.2, 0.1).unwrap();
    let est = riemann_oracle(&sb, aligned_n).unwrap();
    out.push(CheckResult::new(
        "grid oracle exact on aligned bipodal graphon",
        [max_diff(
            [est.edge, est.triangle, est.entropy],
            functionals(&sb),
        )],
        1e-12,
    ));
    let (s1, s2) = (1.0 / std::f64::consts::PI, 1.0 / std::f64::consts::E);
    let g = StepGraphon::new(
        vec![s1, s2, 1.0 - s1 - s2],
        vec![
            vec![0.1, 0.7, 0.3],
            vec![0.7, 0.2, 0.9],
            vec![0.3, 0.9, 0.5],
        ],
    )
    .unwrap();
    let est = riemann_oracle(&g, n).unwrap();
    out.push(CheckResult::new(
        "grid oracle within 5/n on irrational pode sizes",
        [max_diff(
            [est.edge, est.triangle, est.entropy],
            functionals(&g),
        )],
        5.0 / n as f64,
    ));
    out
}
