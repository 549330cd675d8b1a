use rug::Float;
use serde::{Deserialize, Serialize};

use super::config::{start_index, RecoveryConfig};
use super::filter::{FilterKind, PredictorFilter};
use crate::error::{invalid, Error, Result};
use crate::math::modulo::residual;
use crate::math::mod_reduce_float;
use crate::signal::{sample_precise, SampleStream, SignalSpec};

/// Recovery counts as exact when every sample is within this fraction of `delta`.
pub const SUCCESS_TOLERANCE: f64 = 1e-6;

/// Outcome of one decoding run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub config: RecoveryConfig,
    pub kind: FilterKind,
    pub order: u32,
    pub taps: usize,
    pub error_bound: Option<f64>,
    /// `true` when `delta >= sqrt(32 W E)`, so the order-1 filter was used by default.
    pub degenerate_order: bool,
    pub precision_bits: u32,
    pub n_start: i64,
    pub n_end: i64,
    /// Largest folded residual `|e*_n|` seen while decoding.
    pub max_pred_error: f64,
    /// Residuals with `|e*_n| >= (delta/2)(1 - margin)`; each is a likely wrap error.
    pub near_boundary: usize,
    pub first_near_boundary_index: Option<i64>,
    /// Largest `|e_n|` on the ground-truth samples.
    pub true_max_pred_error: Option<f64>,
    pub max_recovery_error: Option<f64>,
    /// Exact recovery against ground truth, or, without it, no near-boundary residuals.
    pub success: bool,
}

impl TrialReport {
    /// Fills in the ground-truth comparison. `truth` must cover
    /// `n_start - L ..= n_end`.
    pub fn compare_with_truth(
        &mut self,
        recovered: &SampleStream,
        truth: &SampleStream,
        filter: &PredictorFilter,
    ) -> Result<()> {
        truth.require(self.n_start - filter.len() as i64, self.n_end)?;
        recovered.require(self.n_start, self.n_end)?;
        let prec = recovered.precision().max(truth.precision());
        let mut worst = Float::new(prec);
        for n in self.n_start..=self.n_end {
            let d = Float::with_val(prec, recovered.get(n).unwrap() - truth.get(n).unwrap()).abs();
            if d > worst {
                worst = d;
            }
        }
        let rec = worst.to_f64();
        let delta = self.config.delta();
        self.max_recovery_error = Some(rec);
        self.true_max_pred_error = Some(max_prediction_error(truth, filter, self.n_start, self.n_end)?);
        self.success = rec <= SUCCESS_TOLERANCE * delta && self.max_pred_error < 0.5 * delta;
        Ok(())
    }
}

/// Sequentially unfolds `folded` from the start index to its last sample.
///
/// `warmup` holds the `L` unfolded samples just before the start index,
/// oldest first. When absent they are taken from `folded` itself: the
/// start-index rule makes those samples smaller than `delta/2`, so folding
/// left them unchanged.
pub fn unfold(
    folded: &SampleStream,
    filter: &PredictorFilter,
    config: &RecoveryConfig,
    warmup: Option<&[Float]>,
) -> Result<(SampleStream, TrialReport)> {
    let delta = config.delta();
    match folded.folded_delta() {
        Some(d) if d == delta => {}
        Some(d) => return Err(invalid(format!("stream folded with delta {d}, config expects {delta}"))),
        None => return Err(invalid("unfold needs a folded stream")),
    }
    let l = filter.len();
    let n_start = start_index(config);
    let n_end = folded.end_index();
    if n_end < n_start {
        return Err(Error::OutOfRange { missing: vec![n_start] });
    }
    let prec = folded.precision().max(filter.working_precision(config));

    // history[j] holds x_{n_start - l + j}; the decoded samples are appended.
    let mut history: Vec<Float> = Vec::with_capacity(l + (n_end - n_start + 1) as usize);
    match warmup {
        Some(w) => {
            if w.len() != l {
                return Err(Error::LengthMismatch { expected: l, got: w.len() });
            }
            folded.require(n_start, n_end)?;
            history.extend(w.iter().map(|v| Float::with_val(prec, v)));
        }
        None => {
            folded.require(n_start - l as i64, n_end)?;
            history.extend((n_start - l as i64..n_start).map(|n| Float::with_val(prec, folded.get(n).unwrap())));
        }
    }

    // Reversed taps so the dot product runs over a contiguous, oldest-first window.
    let taps_rev: Vec<Float> = filter.taps_float(prec).into_iter().rev().collect();
    let limit = config.decision_limit();
    let mut max_res = 0.0f64;
    let mut near_boundary = 0usize;
    let mut first_near = None;
    for n in n_start..=n_end {
        let pos = history.len() - l;
        let pred = Float::with_val(prec, Float::dot(taps_rev.iter().zip(&history[pos..])));
        let y = Float::with_val(prec, folded.get(n).unwrap());
        let diff = Float::with_val(prec, &y - &pred);
        let (e_star, m) = mod_reduce_float(&diff, delta)?;
        let r = e_star.to_f64().abs();
        max_res = max_res.max(r);
        if r >= limit {
            near_boundary += 1;
            first_near.get_or_insert(n);
        }
        // Equal to pred + e*, but keeps the output on y + delta*Z.
        history.push(residual(&y, &m, delta, prec));
    }

    let recovered = SampleStream::from_floats(n_start, history.split_off(l), folded.ts())?;
    let report = TrialReport {
        config: config.clone(),
        kind: filter.kind(),
        order: filter.order_param(),
        taps: l,
        error_bound: filter.error_bound(),
        degenerate_order: filter.kind() == FilterKind::Chebyshev && config.is_trivially_bounded(),
        precision_bits: prec,
        n_start,
        n_end,
        max_pred_error: max_res,
        near_boundary,
        first_near_boundary_index: first_near,
        true_max_pred_error: None,
        max_recovery_error: None,
        success: near_boundary == 0,
    };
    Ok((recovered, report))
}

/// `max |x_n - sum_i h_i x_{n-i}|` over `lo..=hi` of an unfolded stream.
pub fn max_prediction_error(stream: &SampleStream, filter: &PredictorFilter, lo: i64, hi: i64) -> Result<f64> {
    if stream.folded_delta().is_some() {
        return Err(invalid("prediction error needs unfolded samples"));
    }
    if lo > hi {
        return Err(invalid(format!("empty index range {lo}..={hi}")));
    }
    let l = filter.len() as i64;
    stream.require(lo - l, hi)?;
    let prec = stream.precision() + filter.len().max(2).ilog2() + 64;
    let taps_rev: Vec<Float> = filter.taps_float(prec).into_iter().rev().collect();
    let base = stream.start_index();
    let xs = stream.samples();
    let mut worst = Float::new(prec);
    for n in lo..=hi {
        let from = (n - l - base) as usize;
        let to = (n - base) as usize;
        let pred = Float::with_val(prec, Float::dot(taps_rev.iter().zip(&xs[from..to])));
        let e = Float::with_val(prec, &xs[to] - &pred).abs();
        if e > worst {
            worst = e;
        }
    }
    Ok(worst.to_f64())
}

/// Largest prediction error of `filter` on the exact samples of `spec` over
/// `lo..=hi`, sampled at the filter's working precision.
pub fn verify_error_bound(
    spec: &SignalSpec,
    filter: &PredictorFilter,
    config: &RecoveryConfig,
    lo: i64,
    hi: i64,
) -> Result<f64> {
    if lo > hi {
        return Err(invalid(format!("empty index range {lo}..={hi}")));
    }
    let prec = filter.working_precision(config);
    let truth = sample_precise(spec, config.ts(), lo - filter.len() as i64, hi, prec)?;
    max_prediction_error(&truth, filter, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::build_filter;
    use crate::signal::{fold, gen_signal, sample};

    fn trial(seed: u64, wts: f64, delta: f64, kind: FilterKind, order: Option<u32>) -> TrialReport {
        let spec = gen_signal(1.0, 1.0, 8, seed).unwrap();
        let config = RecoveryConfig::new(1.0, 1.0, spec.tail_t0(), 1.0, delta, wts).unwrap();
        let filter = build_filter(&config, kind, order).unwrap();
        let n = start_index(&config);
        let prec = filter.working_precision(&config);
        let truth = sample_precise(&spec, wts, n - filter.len() as i64, -n, prec).unwrap();
        let folded = fold(&truth, delta).unwrap();
        let (rec, mut report) = unfold(&folded, &filter, &config, None).unwrap();
        report.compare_with_truth(&rec, &truth, &filter).unwrap();
        report
    }

    #[test]
    fn no_wraps_returns_input() {
        let spec = SignalSpec::new(0.5, 0.6, vec![0.01], vec![0.0]).unwrap();
        let config = RecoveryConfig::for_signal(&spec, 0.5, 1.0).unwrap();
        let n = start_index(&config);
        let truth = sample(&spec, 0.5, n - 8, 40).unwrap();
        let folded = fold(&truth, 1.0).unwrap();
        for filter in [
            build_filter(&config, FilterKind::Chebyshev, None).unwrap(),
            build_filter(&config, FilterKind::Difference, Some(4)).unwrap(),
        ] {
            let (rec, report) = unfold(&folded, &filter, &config, None).unwrap();
            assert_eq!(rec.samples(), truth.slice(n, 40).unwrap().samples());
            assert!(report.success);
            assert_eq!(rec.folded_delta(), None);
        }
    }

    #[test]
    fn end_to_end_recovery() {
        for seed in 0..3 {
            let r = trial(seed, 0.25, 0.1, FilterKind::Chebyshev, None);
            assert_eq!(r.order, 6);
            assert!(r.success, "{r:?}");
            assert!(r.max_recovery_error.unwrap() <= 1e-7);
            assert!(r.true_max_pred_error.unwrap() < r.error_bound.unwrap());
        }
    }

    #[test]
    fn long_filter_recovery() {
        let r = trial(1, 0.45, 0.1, FilterKind::Chebyshev, None);
        assert!(r.order > 100);
        assert!(r.success, "{r:?}");
    }

    #[test]
    fn difference_baseline_fails_near_nyquist() {
        let r = trial(1, 0.45, 0.1, FilterKind::Difference, Some(6));
        assert!(!r.success);
        assert!(r.true_max_pred_error.unwrap() >= 0.05);
        assert!(r.max_recovery_error.unwrap() > 0.1);
    }

    #[test]
    fn output_is_causal() {
        let spec = gen_signal(1.0, 1.0, 8, 4).unwrap();
        let config = RecoveryConfig::for_signal(&spec, 0.25, 0.1).unwrap();
        let filter = build_filter(&config, FilterKind::Chebyshev, None).unwrap();
        let n = start_index(&config);
        let truth = sample_precise(&spec, 0.25, n - 12, -n, 128).unwrap();
        let folded = fold(&truth, 0.1).unwrap();
        let (full, _) = unfold(&folded, &filter, &config, None).unwrap();
        let cut = n + 7;
        let (part, _) = unfold(&folded.slice(folded.start_index(), cut).unwrap(), &filter, &config, None).unwrap();
        assert_eq!(part.samples(), full.slice(n, cut).unwrap().samples());
    }

    #[test]
    fn explicit_warmup() {
        let spec = gen_signal(1.0, 1.0, 8, 2).unwrap();
        let config = RecoveryConfig::for_signal(&spec, 0.25, 0.1).unwrap();
        let filter = build_filter(&config, FilterKind::Chebyshev, None).unwrap();
        let n = start_index(&config);
        let truth = sample_precise(&spec, 0.25, n - 12, -n, 128).unwrap();
        let folded = fold(&truth, 0.1).unwrap();
        let warm: Vec<Float> = (n - 12..n).map(|i| truth.get(i).unwrap().clone()).collect();
        let (a, _) = unfold(&folded, &filter, &config, None).unwrap();
        let (b, _) = unfold(&folded.slice(n, -n).unwrap(), &filter, &config, Some(&warm)).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            unfold(&folded, &filter, &config, Some(&warm[1..])),
            Err(Error::LengthMismatch { expected: 12, got: 11 })
        ));
        assert!(matches!(
            unfold(&folded.slice(n, -n).unwrap(), &filter, &config, None),
            Err(Error::OutOfRange { .. })
        ));
        assert!(unfold(&truth, &filter, &config, None).is_err());
    }

    #[test]
    fn error_bound_examples() {
        let config = RecoveryConfig::new(1.0, 1.0, 1.0, 1.0, 0.1, 0.25).unwrap();
        let filter = build_filter(&config, FilterKind::Chebyshev, None).unwrap();
        let zero = SignalSpec::new(0.95, 1.0, vec![0.0], vec![0.0]).unwrap();
        assert_eq!(verify_error_bound(&zero, &filter, &config, -20, 20).unwrap(), 0.0);

        let single = SignalSpec::new(0.95, 1.0, vec![1.0], vec![0.0]).unwrap();
        let e = verify_error_bound(&single, &filter, &config, -60, 60).unwrap();
        assert!(e > 0.0 && e <= 0.0442, "{e}");
    }
}
