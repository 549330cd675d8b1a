use rug::Float;
use serde::{Deserialize, Serialize};

use super::spec::{eval_signal, eval_signal_at_index, sinc, SignalSpec};
use crate::error::{invalid, Error, Result};
use crate::math::{mod_reduce, mod_reduce_float};

/// Precision of a plain double.
pub const F64_PRECISION: u32 = 53;

/// Consecutive samples `x_{n0}, x_{n0+1}, ...` taken every `ts` seconds.
///
/// Values are kept as MPFR floats of a common precision. Streams produced
/// from `f64` data use 53 bits; ground-truth streams for long predictors are
/// sampled at whatever precision the predictor needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampleStreamJson", into = "SampleStreamJson")]
pub struct SampleStream {
    start_index: i64,
    samples: Vec<Float>,
    ts: f64,
    folded_delta: Option<f64>,
    precision: u32,
}

/// On-disk form. `samples` always holds the nearest doubles; streams wider
/// than a double also carry `samples_exact` as decimal strings.
#[derive(Serialize, Deserialize)]
struct SampleStreamJson {
    start_index: i64,
    samples: Vec<f64>,
    ts: f64,
    folded_delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples_exact: Option<Vec<String>>,
}

impl SampleStream {
    pub fn from_f64(start_index: i64, samples: &[f64], ts: f64) -> Result<Self> {
        let values = samples.iter().map(|&v| Float::with_val(F64_PRECISION, v)).collect();
        Self::from_floats(start_index, values, ts)
    }

    /// All values are rounded to the widest precision among them.
    pub fn from_floats(start_index: i64, samples: Vec<Float>, ts: f64) -> Result<Self> {
        if !(ts.is_finite() && ts > 0.0) {
            return Err(invalid(format!("sampling period must be positive, got {ts}")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid("samples must be finite"));
        }
        let precision = samples.iter().map(Float::prec).max().unwrap_or(F64_PRECISION);
        let samples = samples
            .into_iter()
            .map(|v| if v.prec() == precision { v } else { Float::with_val(precision, v) })
            .collect();
        Ok(SampleStream { start_index, samples, ts, folded_delta: None, precision })
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    /// Index of the last sample, or `start_index - 1` for an empty stream.
    pub fn end_index(&self) -> i64 {
        self.start_index + self.samples.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn folded_delta(&self) -> Option<f64> {
        self.folded_delta
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn samples(&self) -> &[Float] {
        &self.samples
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.samples.iter().map(Float::to_f64).collect()
    }

    /// Sample at absolute index `n`.
    pub fn get(&self, n: i64) -> Option<&Float> {
        let off = n.checked_sub(self.start_index)?;
        usize::try_from(off).ok().and_then(|i| self.samples.get(i))
    }

    /// Copy restricted to indices `lo..=hi`, which must all be present.
    pub fn slice(&self, lo: i64, hi: i64) -> Result<SampleStream> {
        if lo > hi {
            return Err(invalid(format!("empty index range {lo}..={hi}")));
        }
        self.require(lo, hi)?;
        let from = (lo - self.start_index) as usize;
        let to = (hi - self.start_index) as usize;
        Ok(SampleStream {
            start_index: lo,
            samples: self.samples[from..=to].to_vec(),
            ..self.clone_meta()
        })
    }

    /// Errors with the list of indices in `lo..=hi` that are not present.
    pub fn require(&self, lo: i64, hi: i64) -> Result<()> {
        let (start, end) = (self.start_index, self.end_index());
        let missing: Vec<i64> = (lo..=hi).filter(|&n| n < start || n > end).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::OutOfRange { missing })
        }
    }

    /// Element-wise map into a new stream of the same shape.
    pub(crate) fn with_samples(&self, samples: Vec<Float>, folded_delta: Option<f64>) -> SampleStream {
        let precision = samples.first().map(Float::prec).unwrap_or(self.precision);
        SampleStream { samples, folded_delta, precision, ..self.clone_meta() }
    }

    fn clone_meta(&self) -> SampleStream {
        SampleStream {
            start_index: self.start_index,
            samples: Vec::new(),
            ts: self.ts,
            folded_delta: self.folded_delta,
            precision: self.precision,
        }
    }
}

impl TryFrom<SampleStreamJson> for SampleStream {
    type Error = Error;

    fn try_from(raw: SampleStreamJson) -> Result<Self> {
        let values = match (raw.precision_bits, raw.samples_exact) {
            (Some(prec), Some(exact)) => {
                if exact.len() != raw.samples.len() {
                    return Err(invalid("samples and samples_exact differ in length"));
                }
                if prec < F64_PRECISION {
                    return Err(invalid(format!("precision_bits {prec} below double precision")));
                }
                exact
                    .iter()
                    .map(|s| {
                        Float::parse(s)
                            .map(|p| Float::with_val(prec, p))
                            .map_err(|e| invalid(format!("bad sample literal {s:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            (None, None) => raw.samples.iter().map(|&v| Float::with_val(F64_PRECISION, v)).collect(),
            _ => return Err(invalid("precision_bits and samples_exact must appear together")),
        };
        let mut stream = SampleStream::from_floats(raw.start_index, values, raw.ts)?;
        if let Some(delta) = raw.folded_delta {
            if !(delta.is_finite() && delta > 0.0) {
                return Err(invalid(format!("folded_delta must be positive, got {delta}")));
            }
            let half = 0.5 * delta;
            if stream.samples.iter().any(|v| *v < -half || *v >= half) {
                return Err(invalid(format!("folded samples must lie in [-{half}, {half})")));
            }
            stream.folded_delta = Some(delta);
        }
        Ok(stream)
    }
}

impl From<SampleStream> for SampleStreamJson {
    fn from(s: SampleStream) -> Self {
        let wide = s.precision > F64_PRECISION;
        SampleStreamJson {
            start_index: s.start_index,
            samples: s.to_f64_vec(),
            ts: s.ts,
            folded_delta: s.folded_delta,
            precision_bits: wide.then_some(s.precision),
            samples_exact: wide.then(|| s.samples.iter().map(|v| v.to_string_radix(10, None)).collect()),
        }
    }
}

fn check_range(ts: f64, n_lo: i64, n_hi: i64) -> Result<()> {
    if !(ts.is_finite() && ts > 0.0) {
        return Err(invalid(format!("sampling period must be positive, got {ts}")));
    }
    if n_lo > n_hi {
        return Err(invalid(format!("empty index range {n_lo}..={n_hi}")));
    }
    Ok(())
}

/// `x(n ts)` for `n` in `n_lo..=n_hi`, in double precision.
pub fn sample(spec: &SignalSpec, ts: f64, n_lo: i64, n_hi: i64) -> Result<SampleStream> {
    check_range(ts, n_lo, n_hi)?;
    let values: Vec<f64> = (n_lo..=n_hi).map(|n| eval_signal(spec, n as f64 * ts)).collect();
    SampleStream::from_f64(n_lo, &values, ts)
}

/// Like [`sample`] but evaluated and stored with `prec` bits.
pub fn sample_precise(spec: &SignalSpec, ts: f64, n_lo: i64, n_hi: i64, prec: u32) -> Result<SampleStream> {
    check_range(ts, n_lo, n_hi)?;
    let prec = prec.max(F64_PRECISION);
    let values = (n_lo..=n_hi).map(|n| eval_signal_at_index(spec, n, ts, prec)).collect();
    SampleStream::from_floats(n_lo, values, ts)
}

/// Reduces every sample modulo `delta`.
///
/// Folding an already folded stream with the same modulus is a no-op.
pub fn fold(stream: &SampleStream, delta: f64) -> Result<SampleStream> {
    match stream.folded_delta {
        Some(d) if d == delta => return Ok(stream.clone()),
        Some(d) => return Err(invalid(format!("stream already folded with delta {d}, cannot refold with {delta}"))),
        None => {}
    }
    let folded = if stream.precision == F64_PRECISION {
        stream
            .samples
            .iter()
            .map(|v| mod_reduce(v.to_f64(), delta).map(|r| Float::with_val(F64_PRECISION, r)))
            .collect::<Result<Vec<_>>>()?
    } else {
        stream
            .samples
            .iter()
            .map(|v| mod_reduce_float(v, delta).map(|(r, _)| r))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(stream.with_samples(folded, Some(delta)))
}

/// Shannon-Whittaker interpolation truncated to samples with
/// `|n - t/ts| <= window`.
///
/// Fails if any sample inside the window is missing from the stream.
pub fn whittaker_reconstruct(stream: &SampleStream, t: f64, window: usize) -> Result<f64> {
    if stream.folded_delta.is_some() {
        return Err(invalid("interpolation needs unfolded samples"));
    }
    if !t.is_finite() {
        return Err(invalid("interpolation time must be finite"));
    }
    let mut pos = t / stream.ts;
    // Instants that are a grid point up to rounding interpolate to the sample itself.
    let nearest = pos.round();
    if (pos - nearest).abs() <= 4.0 * f64::EPSILON * nearest.abs().max(1.0) {
        pos = nearest;
    }
    let w = window as f64;
    let lo = (pos - w).ceil() as i64;
    let hi = (pos + w).floor() as i64;
    if lo > hi {
        return Err(invalid(format!("window {window} around t = {t} contains no sample instants")));
    }
    stream.require(lo, hi)?;
    let sum = (lo..=hi)
        .map(|n| {
            let x = stream.get(n).expect("range checked").to_f64();
            x * sinc(pos - n as f64)
        })
        .sum();
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::gen_signal;
    use std::f64::consts::PI;

    fn unit_sinc() -> SignalSpec {
        SignalSpec::new(0.5, 0.6, vec![1.0], vec![0.0]).unwrap()
    }

    #[test]
    fn sampling_examples() {
        let s = sample(&unit_sinc(), 1.0, -2, 2).unwrap();
        assert_eq!(s.to_f64_vec(), vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(s.start_index(), -2);
        assert_eq!(s.end_index(), 2);

        let s = sample(&unit_sinc(), 0.5, 0, 2).unwrap();
        let v = s.to_f64_vec();
        assert_eq!(v[0], 1.0);
        assert!((v[1] - 2.0 / PI).abs() < 1e-16);
        assert_eq!(v[2], 0.0);

        assert_eq!(sample(&unit_sinc(), 0.3, 4, 4).unwrap().len(), 1);
        assert!(sample(&unit_sinc(), 0.3, 5, 4).is_err());
        assert!(sample(&unit_sinc(), 0.0, 0, 4).is_err());
    }

    #[test]
    fn fold_examples() {
        let s = SampleStream::from_f64(0, &[0.6, -0.5, 2.25], 1.0).unwrap();
        let f = fold(&s, 1.0).unwrap();
        let v = f.to_f64_vec();
        assert!((v[0] + 0.4).abs() < 1e-15);
        assert_eq!(&v[1..], &[-0.5, 0.25]);
        assert_eq!(f.folded_delta(), Some(1.0));

        assert_eq!(fold(&f, 1.0).unwrap(), f);
        assert!(fold(&f, 2.0).is_err());

        let small = SampleStream::from_f64(3, &[0.1, -0.2, 0.49], 1.0).unwrap();
        assert_eq!(fold(&small, 1.0).unwrap().to_f64_vec(), small.to_f64_vec());
    }

    #[test]
    fn precise_fold_keeps_precision() {
        let spec = gen_signal(1.0, 1.0, 5, 2).unwrap();
        let s = sample_precise(&spec, 0.3, -5, 5, 160).unwrap();
        let f = fold(&s, 0.1).unwrap();
        assert_eq!(f.precision(), 160);
        for v in f.samples() {
            assert!(*v >= -0.05f64 && *v < 0.05f64);
        }
    }

    #[test]
    fn interpolation_on_grid_is_exact() {
        let spec = gen_signal(1.0, 1.0, 4, 9).unwrap();
        let ts = 0.3;
        let s = sample(&spec, ts, -100, 100).unwrap();
        for m in [-7i64, 0, 3, 12] {
            let got = whittaker_reconstruct(&s, m as f64 * ts, 50).unwrap();
            assert_eq!(got, s.get(m).unwrap().to_f64(), "m = {m}");
        }
    }

    #[test]
    fn interpolation_off_grid() {
        let ts = 0.25;
        let s = sample(&unit_sinc(), ts, -2100, 2100).unwrap();
        let got = whittaker_reconstruct(&s, 0.1, 2000).unwrap();
        assert!((got - sinc(0.1)).abs() < 1e-3);
    }

    #[test]
    fn interpolation_errors() {
        let s = sample(&unit_sinc(), 0.25, -10, 10).unwrap();
        match whittaker_reconstruct(&s, 0.0, 12) {
            Err(Error::OutOfRange { missing }) => {
                assert_eq!(missing, vec![-12, -11, 11, 12]);
            }
            other => panic!("expected out-of-range, got {other:?}"),
        }
        assert!(whittaker_reconstruct(&s, 0.1, 0).is_err());
        assert_eq!(whittaker_reconstruct(&s, 0.5, 0).unwrap(), s.get(2).unwrap().to_f64());
        let f = fold(&s, 0.5).unwrap();
        assert!(whittaker_reconstruct(&f, 0.0, 2).is_err());
    }

    #[test]
    fn json_carries_extended_precision() {
        let spec = gen_signal(1.0, 1.0, 3, 5).unwrap();
        let s = sample_precise(&spec, 0.4, -3, 3, 128).unwrap();
        let text = crate::json::to_string(&s).unwrap();
        assert!(text.contains("samples_exact"));
        let back: SampleStream = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);

        let plain = sample(&spec, 0.4, -3, 3).unwrap();
        let text = crate::json::to_string(&plain).unwrap();
        assert!(!text.contains("samples_exact"));
        let back: SampleStream = serde_json::from_str(&text).unwrap();
        assert_eq!(back, plain);
    }

    #[test]
    fn json_rejects_out_of_range_folded_values() {
        let text = r#"{"start_index":0,"samples":[0.7],"ts":1.0,"folded_delta":1.0}"#;
        assert!(serde_json::from_str::<SampleStream>(text).is_err());
    }
}
