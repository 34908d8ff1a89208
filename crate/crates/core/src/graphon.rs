//! Step-function (multipodal) graphons and their exact functionals.
//!
//! A k-podal graphon is stored as the pode sizes `c_i` and the symmetric
//! block-value matrix `g_ij`. Edge density, triangle density, entropy and the
//! degree vector are finite sums over podes; [`riemann_oracle`] evaluates the
//! same integrals pointwise on a uniform grid and serves as the cross-check.

use serde::{Deserialize, Serialize};

use crate::entropy::h;
use crate::error::{Error, Result};

/// Entries within this distance outside `[0, 1]` are clamped onto the boundary.
pub const CLAMP_TOL: f64 = 1e-12;

/// Pode sizes must sum to one within this tolerance.
pub const SIZE_SUM_TOL: f64 = 1e-12;

/// Clamps `v` into `[0, 1]` if it lies within [`CLAMP_TOL`] of it.
pub(crate) fn clamp_unit(v: f64, what: &str) -> Result<f64> {
    if v.is_nan() {
        return Err(Error::Domain(format!("{what} is NaN")));
    }
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
        return Err(Error::Domain(format!("{what} = {v} lies outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// A k-podal graphon: constant `values[i][j]` on `I_i x I_j`, `|I_i| = sizes[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepGraphon", into = "RawStepGraphon")]
pub struct StepGraphon {
    sizes: Vec<f64>,
    values: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawStepGraphon {
    sizes: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<RawStepGraphon> for StepGraphon {
    type Error = Error;
    fn try_from(raw: RawStepGraphon) -> Result<Self> {
        StepGraphon::new(raw.sizes, raw.values)
    }
}

impl From<StepGraphon> for RawStepGraphon {
    fn from(g: StepGraphon) -> Self {
        RawStepGraphon {
            sizes: g.sizes,
            values: g.values,
        }
    }
}

impl StepGraphon {
    /// Validates and builds a step graphon.
    ///
    /// Sizes must be positive and sum to one; the matrix must be square,
    /// exactly symmetric, and have entries in `[0, 1]` up to [`CLAMP_TOL`].
    pub fn new(sizes: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let k = sizes.len();
        if k == 0 {
            return Err(Error::Domain("a graphon needs at least one pode".into()));
        }
        if let Some(bad) = sizes.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::Domain(format!("pode size {bad} is not positive")));
        }
        let total: f64 = sizes.iter().sum();
        if (total - 1.0).abs() > SIZE_SUM_TOL {
            return Err(Error::Domain(format!(
                "pode sizes sum to {total}, expected 1"
            )));
        }
        if values.len() != k || values.iter().any(|row| row.len() != k) {
            return Err(Error::Domain(format!("value matrix must be {k}x{k}")));
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if values[i][j] != values[j][i] {
                    return Err(Error::Domain(format!(
                        "value matrix not symmetric at ({i}, {j}): {} vs {}",
                        values[i][j], values[j][i]
                    )));
                }
            }
        }
        let mut clamped = values;
        for (i, row) in clamped.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = clamp_unit(*v, &format!("block ({i}, {j})"))?;
            }
        }
        Ok(StepGraphon {
            sizes,
            values: clamped,
        })
    }

    /// The constant graphon `g = p`.
    pub fn constant(p: f64) -> Result<Self> {
        StepGraphon::new(vec![1.0], vec![vec![p]])
    }

    pub fn podes(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Pointwise value `g(x, y)` for `x, y` in `[0, 1]`.
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        self.values[self.pode_of(x)][self.pode_of(y)]
    }

    /// Index of the pode containing `x` (podes laid out left to right).
    pub fn pode_of(&self, x: f64) -> usize {
        let mut acc = 0.0;
        for (i, s) in self.sizes.iter().enumerate() {
            acc += s;
            if x < acc {
                return i;
            }
        }
        self.sizes.len() - 1
    }

    /// Applies a pode permutation: new pode `i` is old pode `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let k = self.podes();
        let mut seen = vec![false; k];
        if perm.len() != k
            || perm
                .iter()
                .any(|&p| p >= k || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Parameter("not a permutation of the podes".into()));
        }
        let sizes = perm.iter().map(|&p| self.sizes[p]).collect();
        let values = perm
            .iter()
            .map(|&p| perm.iter().map(|&q| self.values[p][q]).collect())
            .collect();
        StepGraphon::new(sizes, values)
    }

    /// Splits pode `i` into two podes with sizes `fraction * c_i` and the rest,
    /// both carrying the original row of values.
    pub fn split_pode(&self, i: usize, fraction: f64) -> Result<Self> {
        if i >= self.podes() || !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::Parameter(format!(
                "cannot split pode {i} at fraction {fraction}"
            )));
        }
        let mut idx: Vec<usize> = (0..self.podes()).collect();
        idx.insert(i + 1, i);
        let mut sizes: Vec<f64> = idx.iter().map(|&p| self.sizes[p]).collect();
        sizes[i] = self.sizes[i] * fraction;
        sizes[i + 1] = self.sizes[i] - sizes[i];
        let values = idx
            .iter()
            .map(|&p| idx.iter().map(|&q| self.values[p][q]).collect())
            .collect();
        StepGraphon::new(sizes, values)
    }
}

/// `ε(g) = Σ_ij c_i c_j g_ij`.
pub fn edge_density(g: &StepGraphon) -> f64 {
    kernel_edge(&g.sizes, &g.values)
}

/// `τ(g) = Σ_ijk c_i c_j c_k g_ij g_jk g_ki`.
pub fn triangle_density(g: &StepGraphon) -> f64 {
    kernel_triangle(&g.sizes, &g.values)
}

/// `S(g) = Σ_ij c_i c_j H(g_ij)`.
pub fn graphon_entropy(g: &StepGraphon) -> f64 {
    let c = &g.sizes;
    let mut s = 0.0;
    for (i, row) in g.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            s += c[i] * c[j] * h(v);
        }
    }
    s
}

/// Degree of each pode: `d_i = Σ_j c_j g_ij`.
pub fn degree_vector(g: &StepGraphon) -> Vec<f64> {
    g.values
        .iter()
        .map(|row| row.iter().zip(&g.sizes).map(|(v, c)| v * c).sum())
        .collect()
}

/// Edge functional of an arbitrary (possibly signed) symmetric step kernel.
pub fn kernel_edge(sizes: &[f64], values: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            s += sizes[i] * sizes[j] * v;
        }
    }
    s
}

/// Triangle functional of an arbitrary (possibly signed) symmetric step kernel.
///
/// Used for `τ(g0 - e)` in the corner construction, where the kernel is not a graphon.
pub fn kernel_triangle(sizes: &[f64], values: &[Vec<f64>]) -> f64 {
    let k = sizes.len();
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..k {
            let w = sizes[i] * sizes[j] * values[i][j];
            let mut inner = 0.0;
            for l in 0..k {
                inner += sizes[l] * values[j][l] * values[l][i];
            }
            s += w * inner;
        }
    }
    s
}

/// Grid estimates of the three functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEstimate {
    pub edge: f64,
    pub triangle: f64,
    pub entropy: f64,
}

/// Midpoint-rule discretization of `ε`, `τ`, `S` on an `n x n` grid.
///
/// The graphon is sampled pointwise at `((p+½)/n, (q+½)/n)`. Edge and entropy
/// sums run over all `n²` cells. For the triangle sum, grid rows with identical
/// sampled values are grouped (a step graphon has at most k distinct rows), which
/// keeps the `n³` sum tractable while never consulting the pode sizes.
pub fn riemann_oracle(g: &StepGraphon, n: usize) -> Result<GridEstimate> {
    if n < 16 {
        return Err(Error::Parameter(format!("grid size {n} < 16")));
    }
    let inv = 1.0 / n as f64;
    let mid = |p: usize| (p as f64 + 0.5) * inv;

    let mut edge = 0.0;
    let mut entropy = 0.0;
    // Distinct sampled rows and how many grid points share each.
    let mut classes: Vec<(Vec<f64>, usize, usize)> = Vec::new();
    let mut row = vec![0.0; n];
    for p in 0..n {
        let x = mid(p);
        for (q, slot) in row.iter_mut().enumerate() {
            *slot = g.value_at(x, mid(q));
        }
        edge += row.iter().sum::<f64>();
        entropy += row.iter().map(|&v| h(v)).sum::<f64>();
        match classes.iter_mut().find(|(r, _, _)| *r == row) {
            Some(class) => class.1 += 1,
            None => classes.push((row.clone(), 1, p)),
        }
    }
    let m = classes.len();
    let weight: Vec<f64> = classes.iter().map(|c| c.1 as f64 * inv).collect();
    let block = |a: usize, b: usize| classes[a].0[classes[b].2];
    let mut triangle = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut inner = 0.0;
            for c in 0..m {
                inner += weight[c] * block(b, c) * block(c, a);
            }
            triangle += weight[a] * weight[b] * block(a, b) * inner;
        }
    }
    Ok(GridEstimate {
        edge: edge * inv * inv,
        triangle,
        entropy: entropy * inv * inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::h;
    use approx::assert_abs_diff_eq;

    fn two_podal() -> StepGraphon {
        StepGraphon::new(vec![0.3, 0.7], vec![vec![0.2, 0.5], vec![0.5, 0.8]]).unwrap()
    }

    #[test]
    fn constant_graphon_functionals() {
        let g = StepGraphon::constant(0.37).unwrap();
        assert_eq!(edge_density(&g), 0.37);
        assert_eq!(triangle_density(&g), 0.37 * 0.37 * 0.37);
        assert_eq!(graphon_entropy(&g), h(0.37));
        assert_eq!(degree_vector(&g), vec![0.37]);
    }

    #[test]
    fn two_podal_edge_density_by_hand() {
        let expected = 0.3 * 0.3 * 0.2 + 2.0 * 0.3 * 0.7 * 0.5 + 0.7 * 0.7 * 0.8;
        assert_abs_diff_eq!(edge_density(&two_podal()), expected, epsilon = 1e-15);
    }

    #[test]
    fn degrees_average_to_edge_density() {
        let g = two_podal();
        let d = degree_vector(&g);
        let avg: f64 = d.iter().zip(g.sizes()).map(|(d, c)| d * c).sum();
        assert_abs_diff_eq!(avg, edge_density(&g), epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(StepGraphon::new(vec![0.5, 0.4], vec![vec![0.1, 0.1], vec![0.1, 0.1]]).is_err());
        assert!(StepGraphon::new(vec![0.5, 0.5], vec![vec![0.1, 0.2], vec![0.3, 0.1]]).is_err());
        assert!(StepGraphon::new(vec![0.5, 0.5], vec![vec![0.1, 1.1], vec![1.1, 0.1]]).is_err());
        assert!(StepGraphon::new(vec![1.5, -0.5], vec![vec![0.1, 0.1], vec![0.1, 0.1]]).is_err());
        assert!(StepGraphon::new(vec![1.0], vec![vec![0.1, 0.1]]).is_err());
    }

    #[test]
    fn clamps_near_boundary_entries() {
        let g = StepGraphon::new(
            vec![0.5, 0.5],
            vec![vec![-1e-13, 1.0 + 1e-13], vec![1.0 + 1e-13, 0.3]],
        )
        .unwrap();
        assert_eq!(g.values()[0][0], 0.0);
        assert_eq!(g.values()[0][1], 1.0);
    }

    #[test]
    fn json_shape() {
        let g = two_podal();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(
            text,
            r#"{"sizes":[0.3,0.7],"values":[[0.2,0.5],[0.5,0.8]]}"#
        );
        let back: StepGraphon = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"sizes":[0.3,0.7],"values":[[0.2,0.5],[0.4,0.8]]}"#;
        assert!(serde_json::from_str::<StepGraphon>(bad).is_err());
    }

    #[test]
    fn oracle_is_exact_on_constant() {
        let g = StepGraphon::constant(0.5).unwrap();
        let est = riemann_oracle(&g, 100).unwrap();
        assert_abs_diff_eq!(est.edge, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(est.triangle, 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(est.entropy, std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn oracle_rejects_small_grids() {
        let g = StepGraphon::constant(0.5).unwrap();
        assert!(matches!(riemann_oracle(&g, 15), Err(Error::Parameter(_))));
    }

    #[test]
    fn oracle_converges_on_irrational_sizes() {
        let a = 1.0 / std::f64::consts::PI;
        let b = 1.0 / std::f64::consts::E - 0.05;
        let g = StepGraphon::new(
            vec![a, b, 1.0 - a - b],
            vec![
                vec![0.9, 0.1, 0.4],
                vec![0.1, 0.6, 0.25],
                vec![0.4, 0.25, 0.05],
            ],
        )
        .unwrap();
        let n = 4000;
        let est = riemann_oracle(&g, n).unwrap();
        let bound = 5.0 / n as f64;
        assert!((est.edge - edge_density(&g)).abs() < bound);
        assert!((est.triangle - triangle_density(&g)).abs() < bound);
        assert!((est.entropy - graphon_entropy(&g)).abs() < bound);
    }
}
