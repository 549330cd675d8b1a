use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::error::{invalid, Result};
use crate::recovery::{build_filter, start_index, unfold, FilterKind, PredictorFilter, RecoveryConfig, TrialReport};
use crate::signal::{fold, sample_precise, SampleStream, SignalSpec};

/// I.i.d. uniform noise on `[-amplitude, amplitude]` added before folding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformNoise {
    pub amplitude: f64,
    pub seed: u64,
}

/// Everything produced by one sample-fold-unfold run.
#[derive(Clone, Debug)]
pub struct Trial {
    pub filter: PredictorFilter,
    /// Pre-fold samples (including any added noise) over `n_start - L ..= |n_start|`.
    pub truth: SampleStream,
    pub recovered: SampleStream,
    pub report: TrialReport,
}

/// Samples `spec` over `N - L ..= |N|`, optionally adds noise, folds, unfolds
/// and compares against the pre-fold samples.
///
/// Samples are taken at the filter's working precision so the decoder sees
/// the signal, not double rounding amplified by the filter gain.
pub fn run_trial(
    spec: &SignalSpec,
    config: &RecoveryConfig,
    kind: FilterKind,
    order: Option<u32>,
    noise: Option<UniformNoise>,
) -> Result<Trial> {
    let filter = build_filter(config, kind, order)?;
    let n = start_index(config);
    let lo = n - filter.len() as i64;
    let hi = n.abs();
    let prec = filter.working_precision(config);
    let mut truth = sample_precise(spec, config.ts(), lo, hi, prec)?;
    if let Some(noise) = noise {
        truth = add_noise(&truth, noise)?;
    }
    let folded = fold(&truth, config.delta())?;
    let (recovered, mut report) = unfold(&folded, &filter, config, None)?;
    report.compare_with_truth(&recovered, &truth, &filter)?;
    Ok(Trial { filter, truth, recovered, report })
}

fn add_noise(stream: &SampleStream, noise: UniformNoise) -> Result<SampleStream> {
    if !(noise.amplitude.is_finite() && noise.amplitude >= 0.0) {
        return Err(invalid(format!("noise amplitude must be non-negative, got {}", noise.amplitude)));
    }
    if noise.amplitude == 0.0 {
        return Ok(stream.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let dist = Uniform::new_inclusive(-noise.amplitude, noise.amplitude);
    let prec = stream.precision();
    let noisy = stream.samples().iter().map(|x| Float::with_val(prec, x + dist.sample(&mut rng))).collect();
    SampleStream::from_floats(stream.start_index(), noisy, stream.ts())
}
