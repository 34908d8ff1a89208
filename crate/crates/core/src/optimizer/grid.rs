use rayon::prelude::*;

use super::LocalMax;
use crate::error::{Error, Result};

/// Candidates whose values agree within this are ordered by their coordinates.
const TIE_TOL: f64 = 1e-12;

/// Strict local maxima of `f` over a cell-centred grid on `bounds`.
///
/// Grid point `i` in dimension `k` sits at `lo + (i + ½)(hi - lo)/n_k`, so the
/// box edges themselves are never evaluated. A point is a candidate when its
/// value exceeds that of every feasible neighbour (all `3^d - 1` offsets).
/// Candidates are returned best first, unrefined (`converged = false`).
pub fn grid_scan<F>(f: F, bounds: &[(f64, f64)], resolution: &[usize]) -> Result<Vec<LocalMax>>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    let dim = bounds.len();
    if dim == 0 || resolution.len() != dim {
        return Err(Error::Parameter(
            "bounds and resolution must have equal, nonzero length".into(),
        ));
    }
    if let Some(n) = resolution.iter().find(|&&n| n < 8) {
        return Err(Error::Parameter(format!("grid resolution {n} < 8")));
    }
    if bounds
        .iter()
        .any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && hi > lo))
    {
        return Err(Error::Parameter(format!("bad box {bounds:?}")));
    }
    let total: usize = resolution.iter().product();
    let coords = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0; dim];
        for k in (0..dim).rev() {
            out[k] = idx % resolution[k];
            idx /= resolution[k];
        }
        out
    };
    let point = |ix: &[usize]| -> Vec<f64> {
        ix.iter()
            .zip(bounds)
            .zip(resolution)
            .map(|((&i, (lo, hi)), &n)| lo + (i as f64 + 0.5) * (hi - lo) / n as f64)
            .collect()
    };
    let values: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|idx| f(&point(&coords(idx))).filter(|v| v.is_finite()))
        .collect();
    if values.iter().all(Option::is_none) {
        return Err(Error::EmptyResult);
    }

    let offsets: Vec<Vec<i64>> = (0..3_usize.pow(dim as u32))
        .map(|mut m| {
            (0..dim)
                .map(|_| {
                    let o = (m % 3) as i64 - 1;
                    m /= 3;
                    o
                })
                .collect::<Vec<i64>>()
        })
        .filter(|o| o.iter().any(|&v| v != 0))
        .collect();
    let flat = |ix: &[i64]| -> Option<usize> {
        let mut idx = 0usize;
        for (k, &i) in ix.iter().enumerate() {
            if i < 0 || i as usize >= resolution[k] {
                return None;
            }
            idx = idx * resolution[k] + i as usize;
        }
        Some(idx)
    };

    let mut found: Vec<LocalMax> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let v = values[idx]?;
            let ix: Vec<i64> = coords(idx).into_iter().map(|i| i as i64).collect();
            let strict = offsets.iter().all(|o| {
                let nb: Vec<i64> = ix.iter().zip(o).map(|(a, b)| a + b).collect();
                match flat(&nb).and_then(|j| values[j]) {
                    Some(w) => v > w,
                    None => true,
                }
            });
            strict.then(|| {
                let ux: Vec<usize> = ix.iter().map(|&i| i as usize).collect();
                LocalMax {
                    point: point(&ux),
                    value: v,
                    converged: false,
                    iterations: 0,
                    grad_norm: f64::NAN,
                }
            })
        })
        .collect();
    sort_candidates(&mut found);
    Ok(found)
}

/// Best value first; near-ties go to the lexicographically smallest point.
pub(crate) fn sort_candidates(found: &mut [LocalMax]) {
    found.sort_by(|a, b| {
        if (a.value - b.value).abs() <= TIE_TOL {
            a.point
                .partial_cmp(&b.point)
                .unwrap_or(std::cmp::Ordering::Equal)
        } else {
            b.value.total_cmp(&a.value)
        }
    });
}
