use std::io::Write;

use rayon::prelude::*;

use super::trial::run_trial;
use crate::error::{invalid, Result};
use crate::json::format_f64;
use crate::recovery::{FilterKind, RecoveryConfig};
use crate::signal::gen_signal;

pub const CSV_HEADER: [&str; 7] = ["wts", "delta", "kind", "order", "max_pred_err", "max_rec_err", "success"];

/// One filter column of a sweep; difference filters carry their order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FilterChoice {
    pub kind: FilterKind,
    pub order: Option<u32>,
}

/// Grid of experiments. Trial `t` of every cell uses the signal generated
/// with seed `seed + t`, so all cells see the same signals.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub wts: Vec<f64>,
    pub deltas: Vec<f64>,
    pub filters: Vec<FilterChoice>,
    pub trials: u32,
    pub seed: u64,
    pub w: f64,
    pub energy: f64,
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub wts: f64,
    pub delta: f64,
    pub kind: FilterKind,
    /// `None` when the filter could not be built.
    pub order: Option<u32>,
    /// Largest prediction error on the true samples; NaN if the trial failed.
    pub max_pred_err: f64,
    pub max_rec_err: f64,
    pub success: bool,
}

/// Runs every `(wts, delta, filter, trial)` cell. Cells run in parallel but
/// rows come back in that nesting order. A cell that errors still yields a
/// row, with NaN errors and `success = false`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.trials == 0 {
        return Err(invalid("need at least one trial per cell"));
    }
    let signals = (0..spec.trials)
        .map(|t| gen_signal(spec.w, spec.energy, spec.terms, spec.seed.wrapping_add(t as u64)))
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    for &wts in &spec.wts {
        for &delta in &spec.deltas {
            for &filter in &spec.filters {
                for signal in &signals {
                    cells.push((wts, delta, filter, signal));
                }
            }
        }
    }
    Ok(cells
        .into_par_iter()
        .map(|(wts, delta, filter, signal)| {
            let failed = SweepRow {
                wts,
                delta,
                kind: filter.kind,
                order: filter.order,
                max_pred_err: f64::NAN,
                max_rec_err: f64::NAN,
                success: false,
            };
            let config = match RecoveryConfig::new(spec.w, spec.energy, signal.tail_t0(), signal.tail_rho(), delta, wts / spec.w) {
                Ok(c) => c,
                Err(_) => return failed,
            };
            match run_trial(signal, &config, filter.kind, filter.order, None) {
                Ok(t) => SweepRow {
                    order: Some(t.report.order),
                    max_pred_err: t.report.true_max_pred_error.unwrap_or(t.report.max_pred_error),
                    max_rec_err: t.report.max_recovery_error.unwrap_or(f64::NAN),
                    success: t.report.success,
                    ..failed
                },
                Err(_) => failed,
            }
        })
        .collect())
}

/// Writes the header and one line per row with LF endings.
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            format_f64(r.wts),
            format_f64(r.delta),
            r.kind.to_string(),
            r.order.map(|o| o.to_string()).unwrap_or_default(),
            format_f64(r.max_pred_err),
            format_f64(r.max_rec_err),
            r.success.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
