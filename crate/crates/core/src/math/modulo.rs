use rug::{Float, Integer};

use crate::error::{invalid, Result};

/// Reduces `x` into `[-delta/2, delta/2)`.
///
/// The returned value differs from `x` by an integer multiple of `delta`; the
/// multiple is subtracted with a fused multiply-add so only one rounding
/// occurs.
pub fn mod_reduce(x: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !x.is_finite() {
        return Err(invalid(format!("cannot reduce non-finite value {x}")));
    }
    let half = 0.5 * delta;
    let m = (x / delta + 0.5).floor();
    let mut r = (-delta).mul_add(m, x);
    // x/delta + 1/2 can round across an integer, leaving r one period off.
    if r >= half {
        r -= delta;
    } else if r < -half {
        r += delta;
    }
    Ok(r)
}

/// Multi-precision reduction: returns `(r, m)` with `r = x - m*delta` rounded
/// to the precision of `x`, and `r` in `[-delta/2, delta/2)`.
pub fn mod_reduce_float(x: &Float, delta: f64) -> Result<(Float, Integer)> {
    check_delta(delta)?;
    if !x.is_finite() {
        return Err(invalid("cannot reduce non-finite value"));
    }
    let prec = x.prec();
    let work = prec + 64;
    let q = Float::with_val(work, x / delta) + 0.5f64;
    let mut m = q.floor().to_integer().expect("finite quotient");
    let mut r = residual(x, &m, delta, prec);
    let half = 0.5 * delta;
    if r >= half {
        m += 1;
        r = residual(x, &m, delta, prec);
    } else if r < -half {
        m -= 1;
        r = residual(x, &m, delta, prec);
    }
    Ok((r, m))
}

/// `x - m*delta` with a single rounding to `prec` bits.
pub(crate) fn residual(x: &Float, m: &Integer, delta: f64, prec: u32) -> Float {
    // m*delta is formed exactly before the single rounding subtraction.
    let exact_prec = 53 + m.significant_bits().max(1);
    let multiple = Float::with_val(exact_prec, m) * delta;
    Float::with_val(prec, x - &multiple)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(invalid(format!("modulus must be positive and finite, got {delta}")));
    }
    Ok(())
}
