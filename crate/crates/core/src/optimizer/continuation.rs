use serde::Serialize;

use super::LocalMax;
use crate::error::{Error, Result};

/// Step halvings attempted on a failed continuation step before recording a gap.
pub const MAX_HALVINGS: u32 = 8;

/// Consecutive gap rows after which a sweep is abandoned.
const MAX_CONSECUTIVE_GAPS: usize = 3;

/// An evenly spaced parameter grid from `start` towards `stop`; `step` is a
/// positive magnitude and the direction follows `stop - start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
            return Err(Error::Parameter(format!(
                "bad sweep range {start} -> {stop} step {step}"
            )));
        }
        Ok(SweepRange { start, stop, step })
    }

    /// Grid values `start + k·step·sign`, computed without accumulation.
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let dir = if span < 0.0 { -1.0 } else { 1.0 };
        let count = (span.abs() / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| self.start + dir * k as f64 * self.step)
            .collect()
    }
}

/// One sweep row: the parameter value and its solution, or `None` for a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    pub solution: Option<LocalMax>,
}

/// Ordered sweep output; `diagnostic` is set when the sweep was cut short.
#[derive(Debug, Clone, PartialEq)]
pub struct Continuation {
    pub points: Vec<SweepPoint>,
    pub diagnostic: Option<String>,
}

impl Continuation {
    pub fn solved(&self) -> impl Iterator<Item = (f64, &LocalMax)> {
        self.points
            .iter()
            .filter_map(|p| p.solution.as_ref().map(|s| (p.param, s)))
    }
}

fn attempt<S>(solve: &mut S, param: f64, seed: &[f64]) -> Option<LocalMax>
where
    S: FnMut(f64, &[f64]) -> Result<LocalMax>,
{
    solve(param, seed)
        .ok()
        .filter(|m| m.converged && m.value.is_finite())
}

/// Natural-parameter continuation: each grid value is solved from the previous
/// solution. A failed step is retried as `2^k` substeps for `k = 1..=8`; if all
/// fail, the row becomes a gap and the next target is approached from the last
/// solved point. Three gaps in a row end the sweep with a diagnostic.
pub fn continuation_sweep<S>(mut solve: S, range: SweepRange, seed: &[f64]) -> Result<Continuation>
where
    S: FnMut(f64, &[f64]) -> Result<LocalMax>,
{
    let grid = range.values();
    let first = attempt(&mut solve, grid[0], seed).ok_or_else(|| {
        Error::Domain(format!(
            "seed {seed:?} does not solve the problem at {}",
            grid[0]
        ))
    })?;
    let mut last_param = grid[0];
    let mut last = first.clone();
    let mut points = vec![SweepPoint {
        param: grid[0],
        solution: Some(first),
    }];
    let mut gaps = 0;
    let mut diagnostic = None;

    for &target in &grid[1..] {
        let mut reached = attempt(&mut solve, target, &last.point);
        let mut level = 1;
        while reached.is_none() && level <= MAX_HALVINGS {
            let n = 1usize << level;
            let mut cur = last.clone();
            let mut ok = true;
            for k in 1..=n {
                let p = last_param + (target - last_param) * k as f64 / n as f64;
                match attempt(&mut solve, p, &cur.point) {
                    Some(m) => cur = m,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                reached = Some(cur);
            }
            level += 1;
        }
        match reached {
            Some(m) => {
                gaps = 0;
                last_param = target;
                last = m.clone();
                points.push(SweepPoint {
                    param: target,
                    solution: Some(m),
                });
            }
            None => {
                gaps += 1;
                points.push(SweepPoint {
                    param: target,
                    solution: None,
                });
                if gaps >= MAX_CONSECUTIVE_GAPS {
                    diagnostic = Some(format!(
                        "continuation failed at {MAX_CONSECUTIVE_GAPS} consecutive points ending at {target}; \
                         last solved parameter {last_param}"
                    ));
                    break;
                }
            }
        }
    }
    Ok(Continuation { points, diagnostic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{newton_maximize, NewtonOptions};

    #[test]
    fn grid_values_both_directions() {
        let up = SweepRange::new(0.1, 0.2, 0.025).unwrap().values();
        assert_eq!(up.len(), 5);
        assert!((up[4] - 0.2).abs() < 1e-15);
        let down = SweepRange::new(0.1, 0.05, 0.01).unwrap().values();
        assert_eq!(down.len(), 6);
        assert!(down.windows(2).all(|w| w[1] < w[0]));
        assert!(SweepRange::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn tracks_a_moving_quadratic() {
        let opts = NewtonOptions::default();
        let solve = |t: f64, seed: &[f64]| {
            newton_maximize(|x: &[f64]| Some(-(x[0] - t).powi(2)), seed, &opts)
        };
        let out =
            continuation_sweep(solve, SweepRange::new(0.0, 1.0, 0.1).unwrap(), &[0.0]).unwrap();
        assert_eq!(out.points.len(), 11);
        for (t, m) in out.solved() {
            assert!((m.point[0] - t).abs() < 1e-12);
        }
        assert!(out.diagnostic.is_none());
    }

    #[test]
    fn halving_rescues_steps_with_small_basins() {
        // The solver only accepts seeds within 0.03 of the answer.
        let solve = |t: f64, seed: &[f64]| -> Result<LocalMax> {
            if (seed[0] - t).abs() > 0.03 {
                return Err(Error::Numerical("seed too far".into()));
            }
            Ok(LocalMax {
                point: vec![t],
                value: 0.0,
                converged: true,
                iterations: 1,
                grad_norm: 0.0,
            })
        };
        let out =
            continuation_sweep(solve, SweepRange::new(0.0, 1.0, 0.1).unwrap(), &[0.0]).unwrap();
        assert!(out.points.iter().all(|p| p.solution.is_some()));
    }

    #[test]
    fn persistent_failure_truncates() {
        let solve = |t: f64, _: &[f64]| -> Result<LocalMax> {
            if t > 0.25 {
                return Err(Error::Numerical("no solution".into()));
            }
            Ok(LocalMax {
                point: vec![t],
                value: 0.0,
                converged: true,
                iterations: 1,
                grad_norm: 0.0,
            })
        };
        let out =
            continuation_sweep(solve, SweepRange::new(0.0, 1.0, 0.1).unwrap(), &[0.0]).unwrap();
        assert_eq!(out.points.len(), 6);
        assert!(out.points[3..].iter().all(|p| p.solution.is_none()));
        assert!(out.diagnostic.is_some());
    }

    #[test]
    fn bad_seed() {
        let solve = |_: f64, _: &[f64]| -> Result<LocalMax> { Err(Error::Numerical("x".into())) };
        assert!(
            continuation_sweep(solve, SweepRange::new(0.0, 1.0, 0.5).unwrap(), &[0.0]).is_err()
        );
    }
}
