//! Entropy-maximizing graphons under edge and triangle density constraints.
//!
//! The crate covers the region just below the Erdős–Rényi curve `t = e³` for
//! `e < e0 = (3 - √3)/6`, where (2,1)-symmetric tripodal graphons beat the
//! symmetric bipodal graphon:
//!
//! * [`graphon`]: step graphons and exact functionals, plus a grid oracle;
//! * [`closed_forms`]: the bipodal, tripodal and corner-embedding families;
//! * [`optimizer`]: grid scans, damped Newton, scalar roots, continuation;
//! * [`phase`]: the `F_m(e)` curve, the phase boundary `δ_m(e)`, traces in `δ`,
//!   and the small-`e` branch comparison;
//! * [`table`]: self-describing CSV/JSON sweep tables;
//! * [`check`]: the identity suite cross-validating closed forms against the
//!   generic functionals.

pub mod check;
pub mod closed_forms;
pub mod entropy;
pub mod error;
pub mod graphon;
pub mod optimizer;
pub mod phase;
pub mod table;

pub use closed_forms::{Sym21Params, TripodalAnsatz};
pub use error::{Error, Result};
pub use graphon::StepGraphon;
pub use optimizer::{LocalMax, NewtonOptions};
pub use table::SweepTable;
