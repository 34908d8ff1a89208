//! Shared fixtures for the benchmarks.

use strauss_core::closed_forms::TripodalAnsatz;
use strauss_core::StepGraphon;

/// A generic 3-podal graphon with unequal podes.
pub fn three_podal() -> StepGraphon {
    StepGraphon::new(
        vec![0.2, 0.3, 0.5],
        vec![
            vec![0.9, 0.1, 0.4],
            vec![0.1, 0.6, 0.25],
            vec![0.4, 0.25, 0.05],
        ],
    )
    .expect("valid fixture")
}

/// The ansatz near the `F` maximizer at `e = 0.1`, at deficit `δ = 0.003`.
pub fn ansatz_near_optimum() -> TripodalAnsatz {
    TripodalAnsatz::from_delta(0.1, 0.103, 0.0333, 0.003).expect("valid fixture")
}
