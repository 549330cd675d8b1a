use std::f64::consts::PI;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Ratio between the generated bandwidth `w0` and the declared class bandwidth `w`.
pub const INNER_BAND_RATIO: f64 = 0.95;

/// A finite mixture of grid-aligned sincs,
/// `x(t) = sum_k c_k sinc(2 w0 (t - tau_k))` with `tau_k = i_k / (2 w0)`.
///
/// Distinct grid offsets make the terms orthogonal, so the energy is exactly
/// `sum_k c_k^2 / (2 w0)`, and `|x(t)| <= 1/|t|` holds for `|t| >= tail_t0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalSpecJson", into = "SignalSpecJson")]
pub struct SignalSpec {
    w0: f64,
    w: f64,
    amps: Vec<f64>,
    centers: Vec<f64>,
    grid: Vec<i64>,
    energy_e: f64,
    tail_t0: f64,
    tail_rho: f64,
}

#[derive(Serialize, Deserialize)]
struct SignalSpecJson {
    w0: f64,
    w: f64,
    amps: Vec<f64>,
    centers: Vec<f64>,
    energy_e: f64,
    tail_t0: f64,
    tail_rho: f64,
}

impl SignalSpec {
    /// Builds a spec from amplitudes and centers (seconds). Centers must sit
    /// on the `1/(2 w0)` grid and be distinct.
    pub fn new(w0: f64, w: f64, amps: Vec<f64>, centers: Vec<f64>) -> Result<Self> {
        if !(w0.is_finite() && w0 > 0.0) {
            return Err(invalid(format!("inner bandwidth must be positive, got {w0}")));
        }
        if !(w.is_finite() && w0 < w) {
            return Err(invalid(format!("inner bandwidth {w0} must be below the class bandwidth {w}")));
        }
        if amps.is_empty() || amps.len() != centers.len() {
            return Err(invalid("need the same non-zero number of amplitudes and centers"));
        }
        if amps.iter().chain(&centers).any(|v| !v.is_finite()) {
            return Err(invalid("amplitudes and centers must be finite"));
        }
        let mut grid = Vec::with_capacity(centers.len());
        for &tau in &centers {
            let pos = 2.0 * w0 * tau;
            let idx = pos.round();
            if (pos - idx).abs() > 1e-9 * (1.0 + idx.abs()) {
                return Err(invalid(format!("center {tau} is not on the 1/(2 w0) grid")));
            }
            grid.push(idx as i64);
        }
        let mut sorted = grid.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(invalid("centers must be distinct"));
        }

        let energy_e = amps.iter().map(|c| c * c).sum::<f64>() / (2.0 * w0);
        let tail_t0 = tail_start(w0, &amps, &centers)?;
        Ok(SignalSpec { w0, w, amps, centers, grid, energy_e, tail_t0, tail_rho: 1.0 })
    }

    /// Inner bandwidth in Hz; the spectrum is supported on `[-w0, w0]`.
    pub fn w0(&self) -> f64 {
        self.w0
    }

    /// Declared class bandwidth `W`.
    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// L2 energy of `x(t)`.
    pub fn energy_e(&self) -> f64 {
        self.energy_e
    }

    pub fn tail_t0(&self) -> f64 {
        self.tail_t0
    }

    pub fn tail_rho(&self) -> f64 {
        self.tail_rho
    }

    /// Upper bound on `sup_t |x(t)|`.
    pub fn peak_bound(&self) -> f64 {
        self.amps.iter().map(|c| c.abs()).sum()
    }
}

/// Smallest `T0` for which the triangle-inequality bound gives
/// `|x(t)| <= 1/|t|` on `|t| >= T0`.
///
/// With `S = sum |c_k|` and `m = max |tau_k|`, each term is at most
/// `S / (2 pi w0 (|t| - m))`. For `S <= pi w0` the choice
/// `T0 = max(2m, 2S/(pi w0))` suffices; for `pi w0 < S < 2 pi w0` the
/// threshold becomes `2 pi w0 m / (2 pi w0 - S)`. Larger `S` admits no `T0`.
fn tail_start(w0: f64, amps: &[f64], centers: &[f64]) -> Result<f64> {
    let s: f64 = amps.iter().map(|c| c.abs()).sum();
    let m = centers.iter().fold(0.0f64, |acc, t| acc.max(t.abs()));
    let base = 2.0 * s / (PI * w0);
    let t0 = if s <= PI * w0 {
        base.max(2.0 * m)
    } else if s < 2.0 * PI * w0 {
        base.max(2.0 * PI * w0 * m / (2.0 * PI * w0 - s))
    } else {
        return Err(invalid(format!(
            "sum of |amplitudes| {s} too large for a 1/|t| tail (needs < 2 pi w0 = {})",
            2.0 * PI * w0
        )));
    };
    // Zero signal: any positive T0 works.
    Ok(if t0 > 0.0 { t0 } else { 1.0 / (2.0 * w0) })
}

impl TryFrom<SignalSpecJson> for SignalSpec {
    type Error = Error;

    fn try_from(raw: SignalSpecJson) -> Result<Self> {
        let spec = SignalSpec::new(raw.w0, raw.w, raw.amps, raw.centers)?;
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if !rel(spec.energy_e, raw.energy_e) {
            return Err(invalid(format!(
                "stored energy {} does not match amplitudes ({})",
                raw.energy_e, spec.energy_e
            )));
        }
        if raw.tail_rho != 1.0 {
            return Err(invalid("only tail exponent rho = 1 is supported"));
        }
        if raw.tail_t0 < spec.tail_t0 && !rel(spec.tail_t0, raw.tail_t0) {
            return Err(invalid(format!(
                "stored tail start {} is below the provable value {}",
                raw.tail_t0, spec.tail_t0
            )));
        }
        Ok(SignalSpec { tail_t0: raw.tail_t0.max(spec.tail_t0), ..spec })
    }
}

impl From<SignalSpec> for SignalSpecJson {
    fn from(s: SignalSpec) -> Self {
        SignalSpecJson {
            w0: s.w0,
            w: s.w,
            amps: s.amps,
            centers: s.centers,
            energy_e: s.energy_e,
            tail_t0: s.tail_t0,
            tail_rho: s.tail_rho,
        }
    }
}

/// Draws a random member of the signal class.
///
/// Amplitudes are uniform on `[-1, 1]` at distinct grid offsets in
/// `[-num_terms, num_terms]`, then scaled to the energy budget. When that
/// would push `sum |c_k|` past `pi w0`, they are scaled down further so the
/// tail bound keeps its simple form; the energy then ends up below budget.
pub fn gen_signal(w: f64, energy_budget: f64, num_terms: usize, seed: u64) -> Result<SignalSpec> {
    if !(w.is_finite() && w > 0.0) {
        return Err(invalid(format!("bandwidth must be positive, got {w}")));
    }
    if !(energy_budget.is_finite() && energy_budget > 0.0) {
        return Err(invalid(format!("energy budget must be positive, got {energy_budget}")));
    }
    if num_terms == 0 {
        return Err(invalid("need at least one sinc term"));
    }
    let w0 = INNER_BAND_RATIO * w;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = num_terms as i64;
    let mut offsets: Vec<i64> = rand::seq::index::sample(&mut rng, 2 * num_terms + 1, num_terms)
        .into_iter()
        .map(|i| i as i64 - half)
        .collect();
    offsets.sort_unstable();
    let dist = Uniform::new_inclusive(-1.0, 1.0);
    let mut amps: Vec<f64> = offsets.iter().map(|_| dist.sample(&mut rng)).collect();
    if amps.iter().all(|&c| c == 0.0) {
        amps[0] = 1.0;
    }

    let raw_energy = amps.iter().map(|c| c * c).sum::<f64>() / (2.0 * w0);
    let mut scale = (energy_budget / raw_energy).sqrt();
    let abs_sum: f64 = amps.iter().map(|c| c.abs()).sum();
    let abs_cap = PI * w0 * (1.0 - 1e-9);
    if abs_sum * scale > abs_cap {
        scale = abs_cap / abs_sum;
    }
    let centers: Vec<f64> = offsets.iter().map(|&i| i as f64 / (2.0 * w0)).collect();
    loop {
        let scaled: Vec<f64> = amps.iter().map(|c| c * scale).collect();
        let spec = SignalSpec::new(w0, w, scaled, centers.clone())?;
        if spec.energy_e <= energy_budget {
            return Ok(spec);
        }
        scale *= 1.0 - 4.0 * f64::EPSILON;
    }
}

/// `sin(pi x)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let mut r = x - 2.0 * (0.5 * x).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

/// Normalized sinc `sin(pi x)/(pi x)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        sin_pi(x) / (PI * x)
    }
}

fn sinc_float(x: &Float) -> Float {
    let prec = x.prec();
    if x.is_zero() {
        return Float::with_val(prec, 1);
    }
    let half = Float::with_val(prec, x / 2u32).round();
    let mut r = Float::with_val(prec + 8, x - half * 2u32);
    if r > 0.5f64 {
        r = 1u32 - r;
    } else if r < -0.5f64 {
        r = -1i32 - r;
    }
    let pi = Float::with_val(prec + 8, rug::float::Constant::Pi);
    let num = Float::with_val(prec + 8, &pi * &r).sin();
    Float::with_val(prec, num / (pi * x))
}

/// `x(t)` in double precision.
pub fn eval_signal(spec: &SignalSpec, t: f64) -> f64 {
    let scaled = 2.0 * spec.w0 * t;
    spec.amps
        .iter()
        .zip(&spec.grid)
        .map(|(c, &i)| c * sinc(scaled - i as f64))
        .sum()
}

/// `x(n ts)` evaluated in `prec`-bit arithmetic, with the sampling instant
/// formed exactly.
pub fn eval_signal_at_index(spec: &SignalSpec, n: i64, ts: f64, prec: u32) -> Float {
    let work = prec + 16;
    let t = Float::with_val(work + 128, n) * ts;
    let scaled = Float::with_val(work, t * (2.0 * spec.w0));
    let mut acc = Float::new(work);
    for (c, &i) in spec.amps.iter().zip(&spec.grid) {
        let u = Float::with_val(work, &scaled - i);
        acc += sinc_float(&u) * c;
    }
    Float::with_val(prec, acc)
}
