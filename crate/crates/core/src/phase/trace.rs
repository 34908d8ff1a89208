use super::boundary::delta_max;
use super::fm::oe_branch;
use super::tripodal::best_tripodal;
use super::DMode;
use crate::closed_forms::{bipodal_entropy_excess, Sym21Params};
use crate::entropy::h;
use crate::error::{Error, Result};
use crate::optimizer::{continuation_sweep, LocalMax, NewtonOptions, SweepRange};
use crate::table::SweepTable;

pub const TRACE_COLUMNS: [&str; 8] = ["delta", "A", "B", "c", "D", "S_tri", "S_sb", "S_gap"];

/// Optimal tripodal parameters and entropies along `δ = δ_step, 2δ_step, …`
/// at fixed `e`, continued from the `F` maximizer with `D = 0`.
///
/// Without `delta_stop` the trace runs to `1.25 δ_m(e)`. The metadata entry
/// `boundary_delta` is the interpolated sign change of `S_gap = S_tri - S_sb`.
pub fn trace_vs_delta(
    e: f64,
    mode: DMode,
    delta_step: f64,
    delta_stop: Option<f64>,
    opts: &NewtonOptions,
) -> Result<SweepTable> {
    if !(e > 0.0 && e < 0.5) {
        return Err(Error::Domain(format!("edge density {e} outside (0, ½)")));
    }
    let stop = match delta_stop {
        Some(s) => s,
        None => 1.25 * delta_max(e, mode, None, opts)?.delta_m,
    };
    let stop = stop.min(e.min(1.0 - e));
    if !(delta_step > 0.0 && stop >= delta_step) {
        return Err(Error::Parameter(format!(
            "δ step {delta_step} with stop {stop}"
        )));
    }
    let config = serde_json::json!({
        "e": e, "d_mode": mode, "delta_step": delta_step, "delta_stop": stop, "newton": opts
    })
    .to_string();
    let mut table = SweepTable::new("trace", &TRACE_COLUMNS, &config);
    table.set_meta("d_mode", mode);

    let f = oe_branch(e, None, opts)?;
    let seed = [f.a, f.b, 0.0, 0.0];
    let solve = |delta: f64, x: &[f64]| -> Result<LocalMax> {
        let p = Sym21Params {
            e,
            a: x[0],
            b: x[1],
            c: x[2],
            d: x[3],
        };
        let t = best_tripodal(e, delta, mode, &p, opts)?;
        Ok(LocalMax {
            point: vec![t.params.a, t.params.b, t.params.c, t.params.d],
            value: t.entropy,
            converged: t.local.converged,
            iterations: t.local.iterations,
            grad_norm: t.local.grad_norm,
        })
    };
    let range = SweepRange::new(delta_step, stop, delta_step)?;
    let sweep = continuation_sweep(solve, range, &seed)?;
    for p in &sweep.points {
        let delta = p.param;
        match &p.solution {
            Some(m) => {
                let s_sb = h(e) + bipodal_entropy_excess(e, delta);
                let (a, b, c, d) = (m.point[0], m.point[1], m.point[2], m.point[3]);
                table.push(vec![delta, a, b, c, d, m.value, s_sb, m.value - s_sb])?;
            }
            None => table.push_gap(delta),
        }
    }
    if let Some(bd) = sign_change(&table)? {
        table.set_meta("boundary_delta", format!("{bd:.16e}"));
    }
    if let Some(d) = sweep.diagnostic {
        table.set_meta("diagnostic", d);
    }
    Ok(table)
}

/// First `δ` where `S_gap` turns nonpositive, linearly interpolated between finite rows.
fn sign_change(table: &SweepTable) -> Result<Option<f64>> {
    let (id, ig) = (table.column_index("delta")?, table.column_index("S_gap")?);
    let rows: Vec<(f64, f64)> = table.complete_rows().map(|r| (r[id], r[ig])).collect();
    Ok(rows
        .windows(2)
        .find(|w| w[0].1 > 0.0 && w[1].1 <= 0.0)
        .map(|w| w[0].0 + (w[1].0 - w[0].0) * w[0].1 / (w[0].1 - w[1].1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_trace_columns_and_marker() {
        let t = trace_vs_delta(
            0.1,
            DMode::Ansatz,
            5e-4,
            Some(0.0055),
            &NewtonOptions::default(),
        )
        .unwrap();
        assert_eq!(t.columns, TRACE_COLUMNS);
        assert_eq!(t.rows.len(), 11);
        assert_eq!(t.complete_rows().count(), 11);
        let bd: f64 = t.metadata["boundary_delta"].parse().unwrap();
        assert!(bd > 0.004 && bd < 0.005);
        let c = t.column("c").unwrap();
        assert!(c.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_steps() {
        let o = NewtonOptions::default();
        assert!(trace_vs_delta(0.1, DMode::Ansatz, 0.0, Some(0.01), &o).is_err());
        assert!(trace_vs_delta(0.1, DMode::Ansatz, 0.01, Some(0.001), &o).is_err());
    }
}
