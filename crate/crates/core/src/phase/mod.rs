//! The phase structure below the Erdős–Rényi curve.
//!
//! * [`fm`]: `F_m(e) = max F(A, B)`, its continuation in `e`, and scaling fits;
//! * [`tripodal`]: the best (2,1)-tripodal entropy at fixed `(e, δ)`;
//! * [`boundary`]: the tripodal/bipodal boundary `δ_m(e)`;
//! * [`trace`]: optimal parameters as functions of `δ`;
//! * [`small_e`]: the Θ(1) versus O(e) competition and point classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub mod boundary;
pub mod fm;
pub mod small_e;
pub mod trace;
pub mod tripodal;

pub use boundary::{boundary_curve, delta_max, PhaseBoundaryRow, BOUNDARY_COLUMNS};
pub use fm::{
    f_dominance_crossover, fm_curve, gap_crossing, maximize_f_at, oe_branch, scaling_fit,
    theta1_branch, BranchMax, ScalingFit, FM_COLUMNS,
};
pub use small_e::{classify_point, theta1_crossing, Classification};
pub use trace::{trace_vs_delta, TRACE_COLUMNS};
pub use tripodal::{best_theta1_face, best_tripodal, TripodalMax};

/// Ordinary least squares `y ≈ slope·x + intercept`; returns `(slope, intercept, R²)`.
/// `(A, B)` to `(ln((e - A + B)/e), B/e)`; the O(e) maxima hug `e - A + B = 0`
/// at small `e` and are well conditioned only in these coordinates.
pub(crate) fn to_ridge(e: f64, a: f64, b: f64) -> [f64; 2] {
    [((e - a + b) / e).max(1e-12).ln(), b / e]
}

/// Newton scale for ridge coordinates.
pub(crate) fn ridge_scale(x: &[f64; 2]) -> [f64; 2] {
    [x[0].abs().max(1e-3), x[1].abs().max(1e-6)]
}

pub(crate) fn from_ridge(e: f64, x: &[f64]) -> (f64, f64) {
    let b = x[1] * e;
    (e + b - e * x[0].exp(), b)
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    (slope, my - slope * mx, r2)
}

/// `e0 = (3 - √3)/6`.
pub fn e0() -> f64 {
    crate::entropy::tripodal_threshold()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BranchLabel {
    /// `(A, B)` of order `e`, seeded near `(2.5e, 1.5e)`.
    #[serde(rename = "O_E")]
    OE,
    /// `(A, B)` of order one, seeded at `(½, ½ - e)`.
    #[serde(rename = "THETA_1")]
    Theta1,
    #[serde(rename = "BIPODAL")]
    Bipodal,
}

impl BranchLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchLabel::OE => "O_E",
            BranchLabel::Theta1 => "THETA_1",
            BranchLabel::Bipodal => "BIPODAL",
        }
    }

    /// Numeric code used in tables: 0 bipodal, 1 O(e), 2 Θ(1).
    pub fn code(self) -> f64 {
        match self {
            BranchLabel::Bipodal => 0.0,
            BranchLabel::OE => 1.0,
            BranchLabel::Theta1 => 2.0,
        }
    }

    /// Proximity rule for `F` maxima: `A < 10e` is O(e).
    pub fn of_point(e: f64, a: f64) -> Self {
        if a < 10.0 * e {
            BranchLabel::OE
        } else {
            BranchLabel::Theta1
        }
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the degree split `D` is pinned to zero or optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DMode {
    #[serde(rename = "ANSATZ")]
    Ansatz,
    #[serde(rename = "FREE_D")]
    FreeD,
}

impl DMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DMode::Ansatz => "ANSATZ",
            DMode::FreeD => "FREE_D",
        }
    }
}

impl fmt::Display for DMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "ansatz" => Ok(DMode::Ansatz),
            "free" | "free_d" | "free-d" => Ok(DMode::FreeD),
            _ => Err(Error::Parameter(format!("unknown d-mode {s:?}"))),
        }
    }
}
