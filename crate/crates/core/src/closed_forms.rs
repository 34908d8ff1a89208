//! Closed forms for the graphon families near the Erdős–Rényi curve.
//!
//! * the symmetric bipodal graphon `g_sb(e, δ)`;
//! * the constant-degree tripodal ansatz with parameters `(e, A, B, c)`;
//! * the general (2,1)-symmetric tripodal family, which adds a degree split `D`;
//! * the corner embedding of an arbitrary step graphon `g0` and its entropy
//!   coefficient, of which the function `F(A, B)` is the bipodal special case.
//!
//! All tripodal members use podes `(c/2, c/2, 1-c)`. Entropies are also exposed
//! as *excess* over `H(e)`, computed from [`h_remainder`] so that differences of
//! order `δ²` keep their full precision.
//!
//! In the corner construction the large diagonal block (`I_2 x I_2`) carries `e + (c/(1-c))² B`,
//! and its off-diagonal rows are `e - (c/(1-c)) (d(x/c) - e)`; only with the
//! `- e` inside do the degrees come out constant and the symmetric-bipodal case
//! collapse onto the ansatz.

use serde::{Deserialize, Serialize};

use crate::entropy::{h, h_prime, h_remainder, h_second};
use crate::error::{Error, Result};
use crate::graphon::{
    clamp_unit, degree_vector, edge_density, graphon_entropy, kernel_triangle, StepGraphon,
};

/// The symmetric bipodal graphon: halves with `e - δ` on the diagonal blocks
/// and `e + δ` off the diagonal. Its triangle density is `e³ - δ³`.
pub fn symmetric_bipodal(e: f64, delta: f64) -> Result<StepGraphon> {
    check_bipodal(e, delta)?;
    let (lo, hi) = (e - delta, e + delta);
    StepGraphon::new(vec![0.5, 0.5], vec![vec![lo, hi], vec![hi, lo]])
}

fn check_bipodal(e: f64, delta: f64) -> Result<()> {
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::Domain(format!("edge density {e} outside (0, 1)")));
    }
    if !(delta >= 0.0 && delta <= e.min(1.0 - e) + 1e-12) {
        return Err(Error::Domain(format!(
            "δ = {delta} outside [0, min(e, 1-e)] for e = {e}"
        )));
    }
    Ok(())
}

/// `½ (H(e+δ) + H(e-δ))`.
pub fn bipodal_entropy(e: f64, delta: f64) -> Result<f64> {
    check_bipodal(e, delta)?;
    Ok(0.5 * (h((e + delta).min(1.0)) + h((e - delta).max(0.0))))
}

/// `S(g_sb) - H(e)`, computed without cancellation.
pub fn bipodal_entropy_excess(e: f64, delta: f64) -> f64 {
    0.5 * (h_remainder(e, delta) + h_remainder(e, -delta))
}

/// Parameters of the general (2,1)-symmetric tripodal graphon.
///
/// Block values, with `c_1 = c_2 = c/2` and `c_3 = 1 - c`:
///
/// ```text
/// g11 = g22 = e - A + (1-c)(B+D)
/// g12       = e + A + (1-c)(B+D)
/// g13 = g23 = e - cB + (1-2c) D/2
/// g33       = e + c²B/(1-c) - cD
/// ```
///
/// `D = 0` is the constant-degree ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sym21Params {
    pub e: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// The constant-degree ansatz `(e, A, B, c)`; equivalent to [`Sym21Params`] with `D = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripodalAnsatz {
    pub e: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TripodalAnsatz {
    pub fn new(e: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        Sym21Params::new(e, a, b, c, 0.0)?;
        Ok(TripodalAnsatz { e, a, b, c })
    }

    /// Builds the ansatz from a target deficit `δ`, solving for `c`.
    pub fn from_delta(e: f64, a: f64, b: f64, delta: f64) -> Result<Self> {
        TripodalAnsatz::new(e, a, b, c_from_delta(delta, a, b)?)
    }

    pub fn as_sym21(&self) -> Sym21Params {
        Sym21Params {
            e: self.e,
            a: self.a,
            b: self.b,
            c: self.c,
            d: 0.0,
        }
    }

    /// `δ = c (A³ - B³)^{1/3}`.
    pub fn delta(&self) -> f64 {
        self.c * (self.a.powi(3) - self.b.powi(3)).cbrt()
    }
}

/// Block offsets `g_ij - e` in the order `(11, 12, 13, 33)` plus their weights
/// `(c²/2, c²/2, 2c(1-c), (1-c)²)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Blocks {
    pub offsets: [f64; 4],
    pub weights: [f64; 4],
}

pub(crate) fn sym21_blocks(a: f64, b: f64, c: f64, d: f64) -> Blocks {
    let diag_shift = (1.0 - c) * (b + d);
    Blocks {
        offsets: [
            -a + diag_shift,
            a + diag_shift,
            -c * b + 0.5 * (1.0 - 2.0 * c) * d,
            c * c * b / (1.0 - c) - c * d,
        ],
        weights: [
            0.5 * c * c,
            0.5 * c * c,
            2.0 * c * (1.0 - c),
            (1.0 - c) * (1.0 - c),
        ],
    }
}

const BLOCK_NAMES: [&str; 4] = ["g11", "g12", "g13", "g33"];

/// Entropy excess over `H(e)` of the (2,1)-symmetric graphon, or `None` if
/// `c` is outside `(0, 1)` or any block leaves `[0, 1]`.
///
/// This is the hot path of the optimizers: no allocation, no error strings.
#[inline]
pub fn sym21_excess_raw(e: f64, a: f64, b: f64, c: f64, d: f64) -> Option<f64> {
    if !(c > 0.0 && c < 1.0) {
        return None;
    }
    let blocks = sym21_blocks(a, b, c, d);
    let mut s = 0.0;
    for (off, w) in blocks.offsets.iter().zip(blocks.weights) {
        let r = h_remainder(e, *off);
        if r.is_nan() {
            return None;
        }
        s += w * r;
    }
    Some(s)
}

impl Sym21Params {
    pub fn new(e: f64, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = Sym21Params { e, a, b, c, d };
        p.block_values()?;
        Ok(p)
    }

    /// The four distinct block values `(g11, g12, g13, g33)`, validated and clamped.
    pub fn block_values(&self) -> Result<[f64; 4]> {
        if !(self.e > 0.0 && self.e < 1.0) {
            return Err(Error::Domain(format!(
                "edge density {} outside (0, 1)",
                self.e
            )));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::Domain(format!(
                "pode size c = {} outside (0, 1)",
                self.c
            )));
        }
        let blocks = sym21_blocks(self.a, self.b, self.c, self.d);
        let mut out = [0.0; 4];
        for (k, off) in blocks.offsets.iter().enumerate() {
            out[k] = clamp_unit(self.e + off, BLOCK_NAMES[k])?;
        }
        Ok(out)
    }

    pub fn is_ansatz(&self) -> bool {
        self.d == 0.0
    }
}

fn tripodal_graphon(c: f64, blocks: [f64; 4]) -> Result<StepGraphon> {
    let [g11, g12, g13, g33] = blocks;
    StepGraphon::new(
        vec![0.5 * c, 0.5 * c, 1.0 - c],
        vec![
            vec![g11, g12, g13],
            vec![g12, g11, g13],
            vec![g13, g13, g33],
        ],
    )
}

/// The ansatz graphon. Edge density `e`, triangle density `e³ - c³(A³ - B³)`,
/// constant degree `e`.
pub fn tripodal_ansatz(e: f64, a: f64, b: f64, c: f64) -> Result<StepGraphon> {
    sym21_graphon(&Sym21Params { e, a, b, c, d: 0.0 })
}

/// `c = δ (A³ - B³)^{-1/3}`.
pub fn c_from_delta(delta: f64, a: f64, b: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("δ = {delta} is negative")));
    }
    let gap = a.powi(3) - b.powi(3);
    if !(gap > 0.0) {
        return Err(Error::Domain(format!("A³ - B³ = {gap} must be positive")));
    }
    Ok(delta / gap.cbrt())
}

/// The δ² coefficient of the ansatz entropy as `c -> 0`:
///
/// `F(A, B) = (H(e+A+B) + H(e-A+B) - 2H(e) - 2B H'(e)) / (A³ - B³)^{2/3}`.
///
/// A tripodal graphon beats the symmetric bipodal one just below the
/// Erdős–Rényi curve exactly when `F(A, B) > H''(e)`.
pub fn f_coefficient(e: f64, a: f64, b: f64) -> Result<f64> {
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::Domain(format!("edge density {e} outside (0, 1)")));
    }
    let (plus, minus) = (e + a + b, e - a + b);
    let inside =
        |v: f64| (-crate::graphon::CLAMP_TOL..=1.0 + crate::graphon::CLAMP_TOL).contains(&v);
    if !inside(plus) || !inside(minus) {
        return Err(Error::Domain(format!(
            "H arguments e+A+B = {plus}, e-A+B = {minus} must lie in [0, 1]"
        )));
    }
    let gap = a.powi(3) - b.powi(3);
    if gap == 0.0 {
        return Err(Error::Singular(format!("A³ = B³ at A = {a}, B = {b}")));
    }
    Ok(f_raw(e, a, b, gap))
}

#[inline]
fn f_raw(e: f64, a: f64, b: f64, gap: f64) -> f64 {
    let num = h_remainder(e, a + b) + h_remainder(e, b - a);
    num / gap.cbrt().powi(2)
}

/// Unchecked `F` for optimizer objectives; `None` when infeasible or `A <= B`.
#[inline]
pub fn f_coefficient_raw(e: f64, a: f64, b: f64) -> Option<f64> {
    let gap = a.powi(3) - b.powi(3);
    if !(gap > 0.0) {
        return None;
    }
    let v = f_raw(e, a, b, gap);
    v.is_finite().then_some(v)
}

/// `F` at `A = ½`, `B = ½ - e`, where both outer blocks sit at 0 and 1:
///
/// `(-2H(e) - (1-2e) H'(e)) / (¾e - 3/2 e² + e³)^{2/3}`.
pub fn f_theta1(e: f64) -> Result<f64> {
    if !(e > 0.0 && e < 0.5) {
        return Err(Error::Domain(format!("edge density {e} outside (0, ½)")));
    }
    let denom = 0.75 * e - 1.5 * e * e + e * e * e;
    Ok((-2.0 * h(e) - (1.0 - 2.0 * e) * h_prime(e)) / denom.cbrt().powi(2))
}

/// The (2,1)-symmetric tripodal graphon.
pub fn sym21_graphon(p: &Sym21Params) -> Result<StepGraphon> {
    tripodal_graphon(p.c, p.block_values()?)
}

/// `τ = e³ + ¾ec(1-c)D² + ¾c²(1-c)BD² + c³(B³ - A³)`; exact for this family.
pub fn sym21_triangle(p: &Sym21Params) -> Result<f64> {
    p.block_values()?;
    Ok(sym21_triangle_raw(p.e, p.a, p.b, p.c, p.d))
}

#[inline]
pub(crate) fn sym21_triangle_raw(e: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    e.powi(3) + 0.75 * e * c * (1.0 - c) * d * d + 0.75 * c * c * (1.0 - c) * b * d * d
        - c.powi(3) * (a.powi(3) - b.powi(3))
}

/// Triangle deficit `δ` with `τ = e³ - δ³` (real cube root).
pub fn sym21_delta(p: &Sym21Params) -> Result<f64> {
    Ok((p.e.powi(3) - sym21_triangle(p)?).cbrt())
}

/// Entropy of the (2,1)-symmetric graphon.
pub fn sym21_entropy(p: &Sym21Params) -> Result<f64> {
    Ok(h(p.e) + sym21_entropy_excess(p)?)
}

/// `S - H(e)` of the (2,1)-symmetric graphon.
pub fn sym21_entropy_excess(p: &Sym21Params) -> Result<f64> {
    p.block_values()?;
    sym21_excess_raw(p.e, p.a, p.b, p.c, p.d)
        .ok_or_else(|| Error::Domain(format!("infeasible parameters {p:?}")))
}

/// First (`order = 1`) or second (`order = 2`) derivative of the entropy in `D`.
///
/// The blocks are affine in `D`, so differentiating block by block is exact at
/// any `D`; at `D = 0` the first derivative reads
/// `½c²(1-c)(H'(g11) + H'(g12)) + c(1-c)(1-2c)H'(g13) - c(1-c)²H'(g33)`.
pub fn sym21_ds_dd(p: &Sym21Params, order: u8) -> Result<f64> {
    let g = p.block_values()?;
    if g.iter().any(|&v| v <= 0.0 || v >= 1.0) {
        return Err(Error::Domain(format!(
            "block at 0 or 1 in {g:?}; H' undefined"
        )));
    }
    let c = p.c;
    let w = sym21_blocks(p.a, p.b, c, p.d).weights;
    let slope = [1.0 - c, 1.0 - c, 0.5 * (1.0 - 2.0 * c), -c];
    let deriv: fn(f64) -> f64 = match order {
        1 => h_prime,
        2 => h_second,
        _ => {
            return Err(Error::Parameter(format!(
                "unsupported derivative order {order}"
            )))
        }
    };
    Ok((0..4)
        .map(|k| w[k] * slope[k].powi(order as i32) * deriv(g[k]))
        .sum())
}

/// Corner embedding of `g0` at scale `c` around edge density `e`.
///
/// A rescaled copy of `g0` occupies `[0, c)²`; the strips and the large block are
/// adjusted so the degree function is identically `e`:
///
/// ```text
/// [0,c)² : g0(x/c, y/c)
/// strips : e - (c/(1-c)) (d0(x/c) - e)
/// [c,1]² : e + (c/(1-c))² B,   B = ε(g0) - e
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct CornerEmbedding {
    pub g0: StepGraphon,
    pub e: f64,
    pub c: f64,
}

impl CornerEmbedding {
    pub fn graphon(&self) -> Result<StepGraphon> {
        corner_embed(&self.g0, self.e, self.c)
    }
}

/// See [`CornerEmbedding`]. A k-podal `g0` yields a (k+1)-podal result.
pub fn corner_embed(g0: &StepGraphon, e: f64, c: f64) -> Result<StepGraphon> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("corner size c = {c} outside (0, 1)")));
    }
    let k = g0.podes();
    let ratio = c / (1.0 - c);
    let b = edge_density(g0) - e;
    let d0 = degree_vector(g0);
    let strip: Vec<f64> = d0.iter().map(|d| e - ratio * (d - e)).collect();
    let corner = e + ratio * ratio * b;

    let worst = strip
        .iter()
        .chain(std::iter::once(&corner))
        .map(|&v| {
            if v < 0.0 {
                -v
            } else if v > 1.0 {
                v - 1.0
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    if worst > crate::graphon::CLAMP_TOL {
        return Err(Error::Domain(format!(
            "corner embedding leaves [0, 1] by {worst:e} (e = {e}, c = {c})"
        )));
    }

    let mut sizes: Vec<f64> = g0.sizes().iter().map(|s| s * c).collect();
    sizes.push(1.0 - c);
    let mut values: Vec<Vec<f64>> = g0
        .values()
        .iter()
        .zip(&strip)
        .map(|(row, &s)| {
            let mut r = row.clone();
            r.push(s);
            r
        })
        .collect();
    let mut last = strip.clone();
    last.push(corner);
    values.push(last);
    debug_assert_eq!(values.len(), k + 1);
    StepGraphon::new(sizes, values)
}

/// The δ²/2 coefficient of the corner construction:
/// `(2S(g0) - 2H(e) - 2B H'(e)) / τ(e - g0)^{2/3}`.
pub fn corner_coefficient(g0: &StepGraphon, e: f64) -> Result<f64> {
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::Domain(format!("edge density {e} outside (0, 1)")));
    }
    let deficit: Vec<Vec<f64>> = g0
        .values()
        .iter()
        .map(|row| row.iter().map(|v| e - v).collect())
        .collect();
    let tau = kernel_triangle(g0.sizes(), &deficit);
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("τ(e - g0) = {tau} must be positive")));
    }
    let b = edge_density(g0) - e;
    let num = 2.0 * graphon_entropy(g0) - 2.0 * h(e) - 2.0 * b * h_prime(e);
    Ok(num / tau.cbrt().powi(2))
}
