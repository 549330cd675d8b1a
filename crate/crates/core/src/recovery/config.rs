use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::signal::SignalSpec;

/// Default safety margin on the decision threshold `delta/2`.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Largest Chebyshev order the filter builder will attempt.
pub const MAX_CHEBYSHEV_ORDER: u32 = 2048;

/// Class and acquisition parameters driving filter sizing and the start index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RecoveryConfigJson", into = "RecoveryConfigJson")]
pub struct RecoveryConfig {
    w: f64,
    energy_e: f64,
    tail_t0: f64,
    tail_rho: f64,
    delta: f64,
    ts: f64,
    margin: f64,
}

#[derive(Serialize, Deserialize)]
struct RecoveryConfigJson {
    w: f64,
    energy_e: f64,
    tail_t0: f64,
    tail_rho: f64,
    delta: f64,
    ts: f64,
    margin: f64,
}

impl RecoveryConfig {
    /// Validates the parameters; `w * ts` must be strictly below 1/2.
    pub fn new(w: f64, energy_e: f64, tail_t0: f64, tail_rho: f64, delta: f64, ts: f64) -> Result<Self> {
        let positive = [("w", w), ("energy_e", energy_e), ("tail_t0", tail_t0), ("tail_rho", tail_rho), ("delta", delta), ("ts", ts)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let wts = w * ts;
        if wts >= 0.5 {
            return Err(Error::InfeasibleRate { wts });
        }
        Ok(RecoveryConfig { w, energy_e, tail_t0, tail_rho, delta, ts, margin: DEFAULT_MARGIN })
    }

    /// Config whose class parameters are taken from `spec`.
    pub fn for_signal(spec: &SignalSpec, ts: f64, delta: f64) -> Result<Self> {
        Self::new(spec.w(), spec.energy_e(), spec.tail_t0(), spec.tail_rho(), delta, ts)
    }

    pub fn with_margin(mut self, margin: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&margin) {
            return Err(invalid(format!("margin must lie in [0, 1), got {margin}")));
        }
        self.margin = margin;
        Ok(self)
    }

    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn energy_e(&self) -> f64 {
        self.energy_e
    }
    pub fn tail_t0(&self) -> f64 {
        self.tail_t0
    }
    pub fn tail_rho(&self) -> f64 {
        self.tail_rho
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn ts(&self) -> f64 {
        self.ts
    }
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Normalized band edge `W * Ts`.
    pub fn wts(&self) -> f64 {
        self.w * self.ts
    }

    /// Band-edge parameter `a = 2 cos(2 pi W Ts)` of the Chebyshev interval `[a, 2]`.
    pub fn band_edge_a(&self) -> f64 {
        2.0 * (2.0 * PI * self.wts()).cos()
    }

    /// `sqrt(2 W E)`, which bounds `||X||_1` and therefore `sup |x(t)|`.
    pub fn amplitude_bound(&self) -> f64 {
        (2.0 * self.w * self.energy_e).sqrt()
    }

    /// Largest residual the decoder treats as safe: `(delta/2)(1 - margin)`.
    pub fn decision_limit(&self) -> f64 {
        0.5 * self.delta * (1.0 - self.margin)
    }

    /// `true` when `delta >= sqrt(32 W E)`, where any order already meets the bound.
    pub fn is_trivially_bounded(&self) -> bool {
        (32.0 * self.w * self.energy_e).sqrt() <= self.delta
    }
}

impl TryFrom<RecoveryConfigJson> for RecoveryConfig {
    type Error = Error;

    fn try_from(r: RecoveryConfigJson) -> Result<Self> {
        RecoveryConfig::new(r.w, r.energy_e, r.tail_t0, r.tail_rho, r.delta, r.ts)?.with_margin(r.margin)
    }
}

impl From<RecoveryConfig> for RecoveryConfigJson {
    fn from(c: RecoveryConfig) -> Self {
        RecoveryConfigJson {
            w: c.w,
            energy_e: c.energy_e,
            tail_t0: c.tail_t0,
            tail_rho: c.tail_rho,
            delta: c.delta,
            ts: c.ts,
            margin: c.margin,
        }
    }
}

/// Smallest integer `K` with
/// `K > ln(sqrt(32 W E)/delta) / ln(2/(1 - cos(2 pi W Ts)))`,
/// or 1 when the numerator is not positive.
pub fn required_k(config: &RecoveryConfig) -> Result<u32> {
    let wts = config.wts();
    if wts >= 0.5 {
        return Err(Error::InfeasibleRate { wts });
    }
    if config.is_trivially_bounded() {
        return Ok(1);
    }
    let numerator = ((32.0 * config.w * config.energy_e).sqrt() / config.delta).ln();
    // 1 - cos(2x) = 2 sin^2(x), which stays accurate for small W Ts.
    let half_gap = (PI * wts).sin();
    let denominator = -2.0 * half_gap.ln();
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::InfeasibleRate { wts });
    }
    let k = (numerator / denominator).floor() + 1.0;
    if k > MAX_CHEBYSHEV_ORDER as f64 {
        return Err(Error::OrderTooLarge { k: k as u64, max: MAX_CHEBYSHEV_ORDER });
    }
    Ok(k as u32)
}

/// First index that may be folded: all `n < N` satisfy `|x_n| < delta/2`.
///
/// `N = -ceil(max(T0, (delta/2)^(-1/rho)) / Ts) - 1`.
pub fn start_index(config: &RecoveryConfig) -> i64 {
    let horizon = config.tail_t0.max((0.5 * config.delta).powf(-1.0 / config.tail_rho));
    -((horizon / config.ts).ceil() as i64) - 1
}
