//! Small-dimension maximization and root finding.
//!
//! Objectives are plain closures `Fn(&[f64]) -> Option<f64>`; `None` marks an
//! infeasible point (a block value outside `[0, 1]`, a derived pode size outside
//! `(0, 1)`, ...). Grid scans skip such points and Newton iterations backtrack
//! away from them.

mod continuation;
mod grid;
mod newton;
mod root;

pub use continuation::{continuation_sweep, Continuation, SweepPoint, SweepRange, MAX_HALVINGS};
pub use grid::grid_scan;
pub use newton::{newton_maximize, newton_maximize_scaled, LocalMax, NewtonOptions};
pub use root::solve_scalar_root;
