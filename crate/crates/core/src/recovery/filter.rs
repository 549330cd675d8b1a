use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use super::config::{required_k, RecoveryConfig, MAX_CHEBYSHEV_ORDER};
use crate::error::{invalid, Error, Result};
use crate::math::dyadic::{Dyadic, DyadicPoly};
use crate::math::{build_pk, PkSequence, PredictorTaps};

/// How the predictor taps are constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    /// Taps of `z^K T_K^{[a,2]}(z + 1/z)`, sized so the residual stays below `delta/2`.
    Chebyshev,
    /// Taps of `(1 - z)^L`, the repeated-difference baseline.
    Difference,
}

impl FilterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterKind::Chebyshev => "chebyshev",
            FilterKind::Difference => "difference",
        }
    }
}

impl std::fmt::Display for FilterKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev" => Ok(FilterKind::Chebyshev),
            "difference" => Ok(FilterKind::Difference),
            other => Err(invalid(format!("unknown filter kind {other:?}"))),
        }
    }
}

/// A monic prediction filter `x_n ~ h_1 x_{n-1} + ... + h_L x_{n-L}`.
#[derive(Clone, Debug)]
pub struct PredictorFilter {
    kind: FilterKind,
    order_param: u32,
    taps: Vec<f64>,
    error_bound: Option<f64>,
    band_edge_a: Option<f64>,
    // exact 1 - h_1 z - ... - h_L z^L
    poly: DyadicPoly,
}

impl PredictorFilter {
    /// Wraps Chebyshev taps, attaching `sqrt(2 W E)` times their in-band bound.
    pub fn from_chebyshev(taps: PredictorTaps, amplitude_bound: f64) -> Self {
        PredictorFilter {
            kind: FilterKind::Chebyshev,
            order_param: taps.k(),
            taps: taps.taps().to_vec(),
            error_bound: Some(amplitude_bound * taps.guaranteed_bound()),
            band_edge_a: Some(taps.band_edge_a()),
            poly: taps.polynomial().clone(),
        }
    }

    /// `(1 - z)^order`, i.e. `h_i = (-1)^(i+1) binom(order, i)`.
    pub fn difference(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(invalid("difference order must be at least 1"));
        }
        let coeffs: Vec<Dyadic> = (0..=order)
            .map(|i| {
                let b = Integer::from(Integer::binomial_u(order, i));
                Dyadic::from_integer(if i % 2 == 0 { b } else { -b })
            })
            .collect();
        let poly = DyadicPoly::from_coeffs(&coeffs);
        let taps = (1..=order as usize).map(|i| -poly.coeff_f64(i)).collect();
        Ok(PredictorFilter {
            kind: FilterKind::Difference,
            order_param: order,
            taps,
            error_bound: None,
            band_edge_a: None,
            poly,
        })
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    /// `K` for Chebyshev filters, `L` for difference filters.
    pub fn order_param(&self) -> u32 {
        self.order_param
    }

    /// Number of taps `L`.
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// `h_1..h_L`, rounded to `f64`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Guaranteed bound on `|e_n|` (Chebyshev only).
    pub fn error_bound(&self) -> Option<f64> {
        self.error_bound
    }

    pub fn band_edge_a(&self) -> Option<f64> {
        self.band_edge_a
    }

    pub fn taps_float(&self, prec: u32) -> Vec<Float> {
        (1..=self.len()).map(|i| -self.poly.coeff_float(i, prec)).collect()
    }

    /// `log2(sum |h_i| + 1)`, rounded up.
    fn gain_log2(&self) -> i64 {
        self.poly.abs_sum_log2_ceil().unwrap_or(0).max(0)
    }

    /// Precision at which prediction is carried out: enough that rounding the
    /// samples and the products stays about 2^-64 * delta.
    pub fn working_precision(&self, config: &RecoveryConfig) -> u32 {
        let scale = config.amplitude_bound().max(config.delta()) / config.delta();
        let bits = self.gain_log2() + scale.log2().ceil().max(0.0) as i64 + 64;
        bits.max(64) as u32
    }
}

/// Builds the requested filter.
///
/// Chebyshev filters default to the order from [`required_k`]; if rounding in
/// that formula leaves the bound inside the safety margin the order is raised
/// until `error_bound <= decision_limit`. An explicit Chebyshev order that
/// misses the limit is an error. Difference filters need an explicit order.
pub fn build_filter(config: &RecoveryConfig, kind: FilterKind, order: Option<u32>) -> Result<PredictorFilter> {
    match kind {
        FilterKind::Difference => {
            let order = order.ok_or_else(|| invalid("difference filter needs an explicit order"))?;
            PredictorFilter::difference(order)
        }
        FilterKind::Chebyshev => {
            let a = config.band_edge_a();
            let amp = config.amplitude_bound();
            let limit = config.decision_limit();
            if let Some(k) = order {
                let filter = PredictorFilter::from_chebyshev(build_pk(k, a)?, amp);
                let bound = filter.error_bound.expect("chebyshev bound");
                if bound > limit {
                    return Err(Error::BoundViolation { bound, limit });
                }
                return Ok(filter);
            }
            let k0 = required_k(config)?;
            let mut seq = PkSequence::new(a)?.skip(k0 as usize - 1);
            loop {
                let taps = seq.next().expect("sequence is unbounded");
                let k = taps.k();
                let filter = PredictorFilter::from_chebyshev(taps, amp);
                let bound = filter.error_bound.expect("chebyshev bound");
                if bound <= limit {
                    return Ok(filter);
                }
                if k >= MAX_CHEBYSHEV_ORDER {
                    return Err(Error::BoundViolation { bound, limit });
                }
            }
        }
    }
}

/// `sum_i h_i history[i-1]` with `history` ordered most recent first.
pub fn predict(filter: &PredictorFilter, history: &[f64]) -> Result<f64> {
    if history.len() != filter.len() {
        return Err(Error::LengthMismatch { expected: filter.len(), got: history.len() });
    }
    Ok(filter.taps.iter().zip(history).map(|(h, x)| h * x).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ts: f64, delta: f64) -> RecoveryConfig {
        RecoveryConfig::new(1.0, 1.0, 1.0, 1.0, delta, ts).unwrap()
    }

    #[test]
    fn chebyshev_filter_from_required_k() {
        let f = build_filter(&cfg(0.25, 0.1), FilterKind::Chebyshev, None).unwrap();
        assert_eq!(f.order_param(), 6);
        assert_eq!(f.len(), 12);
        let bound = f.error_bound().unwrap();
        let expected = 2f64.sqrt() * 2.0 * 0.5f64.powi(6);
        assert!((bound - expected).abs() < 1e-15);
        assert!(bound < 0.05);
    }

    #[test]
    fn explicit_order_too_small_is_rejected() {
        assert!(matches!(
            build_filter(&cfg(0.25, 0.1), FilterKind::Chebyshev, Some(3)),
            Err(Error::BoundViolation { .. })
        ));
        assert!(build_filter(&cfg(0.25, 0.1), FilterKind::Chebyshev, Some(9)).is_ok());
    }

    #[test]
    fn difference_taps() {
        let f = build_filter(&cfg(0.25, 0.1), FilterKind::Difference, Some(2)).unwrap();
        assert_eq!(f.taps(), &[2.0, -1.0]);
        assert_eq!(PredictorFilter::difference(1).unwrap().taps(), &[1.0]);
        assert_eq!(PredictorFilter::difference(4).unwrap().taps(), &[4.0, -6.0, 4.0, -1.0]);
        assert!(f.error_bound().is_none());
        assert!(build_filter(&cfg(0.25, 0.1), FilterKind::Difference, None).is_err());
        assert!(PredictorFilter::difference(0).is_err());
    }

    #[test]
    fn predict_examples() {
        let d1 = PredictorFilter::difference(1).unwrap();
        assert_eq!(predict(&d1, &[3.0]).unwrap(), 3.0);
        let c1 = PredictorFilter::from_chebyshev(build_pk(1, 0.0).unwrap(), 1.0);
        assert_eq!(predict(&c1, &[5.0, 2.0]).unwrap(), 3.0);
        assert_eq!(predict(&c1, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(predict(&c1, &[1.0]), Err(Error::LengthMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn working_precision_grows_with_gain() {
        let c = cfg(0.45, 0.1);
        let long = build_filter(&c, FilterKind::Chebyshev, None).unwrap();
        let short = build_filter(&cfg(0.1, 0.1), FilterKind::Chebyshev, None).unwrap();
        assert!(long.working_precision(&c) > short.working_precision(&c) + 50);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("chebyshev".parse::<FilterKind>().unwrap(), FilterKind::Chebyshev);
        assert_eq!("difference".parse::<FilterKind>().unwrap(), FilterKind::Difference);
        assert!("lpc".parse::<FilterKind>().is_err());
    }
}
