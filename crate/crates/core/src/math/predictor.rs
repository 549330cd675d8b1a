//! Chebyshev-based monic prediction polynomials.
//!
//! For a band edge `a = 2cos(2*pi*W*Ts)` the polynomial
//! `p_K(z) = z^K * T_K^{[a,2]}(z + 1/z) = 1 - h_1 z - ... - h_{2K} z^{2K}`
//! has modulus at most `2((2-a)/4)^K` on the in-band arc of the unit circle.
//! Its coefficients are produced by the recurrence
//!
//! ```text
//! Q_0 = 2,  Q_1 = z^2 - (a/2 + 1) z + 1,
//! Q_K = (z^2 - (a/2 + 1) z + 1) Q_{K-1} - s^2 z^2 Q_{K-2},   s = (2 - a)/4
//! ```
//!
//! carried out in exact dyadic arithmetic. The coefficients grow roughly like
//! the out-of-band gain of the filter (about 1e19 for K = 163 near Nyquist),
//! so anything computed from them needs precision well beyond `f64`.

use rug::{Assign, Float, Rational};

use super::dyadic::{Dyadic, DyadicPoly};
use crate::error::{invalid, Result};

/// Taps of `p_K` for one `(K, a)` pair.
#[derive(Clone, Debug)]
pub struct PredictorTaps {
    k: u32,
    band_edge_a: f64,
    taps: Vec<f64>,
    guaranteed_bound: f64,
    poly: DyadicPoly,
    bound_exact: Dyadic,
}

impl PredictorTaps {
    /// Chebyshev order `K`.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn band_edge_a(&self) -> f64 {
        self.band_edge_a
    }

    /// `h_1..h_{2K}` rounded to the nearest `f64`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// `2((2-a)/4)^K`, the maximum of `|p_K|` on the in-band arc.
    pub fn guaranteed_bound(&self) -> f64 {
        self.guaranteed_bound
    }

    pub fn guaranteed_bound_exact(&self) -> Rational {
        self.bound_exact.to_rational()
    }

    /// Exact coefficients of `p_K(z)`, lowest power first.
    pub fn polynomial(&self) -> &DyadicPoly {
        &self.poly
    }

    /// Exact tap `h_i` (1-based).
    pub fn tap_exact(&self, i: usize) -> Rational {
        -self.poly.coeff(i).to_rational()
    }

    /// Exact `1 - sum_i h_i`, i.e. `p_K(1)`.
    pub fn value_at_one(&self) -> Rational {
        self.poly.sum()
    }

    /// Taps rounded to `prec` bits.
    pub fn taps_float(&self, prec: u32) -> Vec<Float> {
        (1..=2 * self.k as usize).map(|i| -self.poly.coeff_float(i, prec)).collect()
    }
}

/// Builds `p_K` for band edge `a` in the open interval `(-2, 2)`.
pub fn build_pk(k: u32, band_edge_a: f64) -> Result<PredictorTaps> {
    if k == 0 {
        return Err(invalid("chebyshev order must be at least 1"));
    }
    let mut seq = PkSequence::new(band_edge_a)?;
    Ok(seq.nth(k as usize - 1).expect("sequence is unbounded"))
}

/// Yields `p_1, p_2, ...` for a fixed band edge, reusing the recurrence state.
#[derive(Clone, Debug)]
pub struct PkSequence {
    band_edge_a: f64,
    quad: DyadicPoly,
    s: Dyadic,
    s_sq: Dyadic,
    prev: DyadicPoly,
    cur: Option<DyadicPoly>,
    k: u32,
}

impl PkSequence {
    pub fn new(band_edge_a: f64) -> Result<Self> {
        if !(band_edge_a > -2.0 && band_edge_a < 2.0) {
            return Err(invalid(format!(
                "band edge a = {band_edge_a} must lie in (-2, 2); a = -2 is Nyquist-rate sampling"
            )));
        }
        let a = Dyadic::from_f64(band_edge_a);
        // c = a/2 + 1, s = (2 - a)/4, both exact
        let c = a.mul_pow2(-1).add(&Dyadic::from_int(1));
        let s = Dyadic::from_int(2).sub(&a).mul_pow2(-2);
        let one = Dyadic::from_int(1);
        let quad = DyadicPoly::from_coeffs(&[one.clone(), c.neg(), one]);
        Ok(PkSequence {
            band_edge_a,
            quad,
            s_sq: s.mul(&s),
            s,
            prev: DyadicPoly::constant(Dyadic::from_int(2)),
            cur: None,
            k: 0,
        })
    }
}

impl Iterator for PkSequence {
    type Item = PredictorTaps;

    fn next(&mut self) -> Option<PredictorTaps> {
        let next = match &self.cur {
            None => self.quad.clone(),
            Some(cur) => {
                let lead = self.quad.mul(cur);
                lead.sub(&self.prev.scale_shift(&self.s_sq, 2))
            }
        };
        if let Some(cur) = self.cur.take() {
            self.prev = cur;
        }
        self.cur = Some(next.clone());
        self.k += 1;

        let k = self.k;
        let bound_exact = self.s.pow(k).mul_pow2(1);
        let taps = (1..=2 * k as usize).map(|i| -next.coeff_f64(i)).collect();
        Some(PredictorTaps {
            k,
            band_edge_a: self.band_edge_a,
            taps,
            guaranteed_bound: bound_exact.to_f64(),
            poly: next,
            bound_exact,
        })
    }
}

/// Working precision for evaluating `p_K` on the unit circle with absolute
/// error far below the in-band bound.
fn eval_precision(taps: &PredictorTaps) -> u32 {
    let sum_log2 = taps.poly.abs_sum_log2_ceil().unwrap_or(0);
    let bound_log2 = taps.bound_exact.log2_floor().unwrap_or(0);
    let n = taps.poly.len() as f64;
    let growth = 2 * n.log2().ceil() as i64;
    (sum_log2 - bound_log2 + growth + 48).max(64) as u32
}

/// Coefficients at a given precision plus the machinery for repeated
/// evaluation on the unit circle.
struct CircleEvaluator {
    prec: u32,
    coeffs: Vec<Float>,
    pi2: Float,
}

impl CircleEvaluator {
    fn new(taps: &PredictorTaps) -> Self {
        let prec = eval_precision(taps);
        let coeffs = (0..taps.poly.len()).map(|j| taps.poly.coeff_float(j, prec)).collect();
        let pi2 = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        CircleEvaluator { prec, coeffs, pi2 }
    }

    /// `|p(e^{-2 pi i f})|` by Clenshaw's recurrence in the basis `e^{i j w}`.
    fn magnitude(&self, f_norm: f64) -> Float {
        let prec = self.prec;
        let omega = Float::with_val(prec, &self.pi2 * f_norm);
        let (sin, cos) = omega.sin_cos(Float::new(prec));
        let alpha = Float::with_val(prec, &cos * 2u32);

        let mut b0 = Float::new(prec);
        let mut b1 = Float::new(prec);
        let mut b2 = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            b0.assign(&alpha * &b1);
            b0 -= &b2;
            b0 += c;
            std::mem::swap(&mut b2, &mut b1);
            std::mem::swap(&mut b1, &mut b0);
        }
        // After the loop b1 holds b_0 and b2 holds b_1; sum = b_0 - b_1 e^{-iw}.
        let re = Float::with_val(prec, &b1 - Float::with_val(prec, &b2 * &cos));
        let im = Float::with_val(prec, &b2 * &sin);
        re.hypot(&im)
    }
}

/// `|p_K(e^{-2 pi i f})|` for normalized frequency `f`.
pub fn eval_on_unit_circle(taps: &PredictorTaps, f_norm: f64) -> f64 {
    eval_on_unit_circle_precise(taps, f_norm).to_f64()
}

/// Same as [`eval_on_unit_circle`] but without the final rounding to `f64`.
pub fn eval_on_unit_circle_precise(taps: &PredictorTaps, f_norm: f64) -> Float {
    CircleEvaluator::new(taps).magnitude(f_norm)
}

/// Maximum of `|p_K|` over a uniform grid of `grid_points` frequencies in
/// `[0, f_norm_edge]`.
pub fn in_band_max(taps: &PredictorTaps, f_norm_edge: f64, grid_points: usize) -> Result<f64> {
    in_band_max_precise(taps, f_norm_edge, grid_points).map(|m| m.to_f64())
}

/// Same as [`in_band_max`] without the final rounding; the relative error
/// is around `1e-12`.
///
/// `p_K` is palindromic, so on the unit circle `|p_K(e^{iw})| = |S(cos w)|`
/// with `S(x) = c_K + 2 sum_j c_{K-j} T_j(x)` of degree `K`. `S` is evaluated
/// in high precision only at the `K + 1` Chebyshev nodes of the in-band
/// interval of `x`, where its values are small. Interpolating those values
/// reproduces `S` exactly, and the resulting series is well conditioned
/// enough to scan the grid in `f64`.
pub fn in_band_max_precise(taps: &PredictorTaps, f_norm_edge: f64, grid_points: usize) -> Result<Float> {
    if grid_points < 2 {
        return Err(invalid("in-band grid needs at least two points"));
    }
    if !(f_norm_edge > 0.0 && f_norm_edge < 0.5) {
        return Err(invalid(format!("band edge frequency {f_norm_edge} outside (0, 1/2)")));
    }
    let last = (grid_points - 1) as f64;
    let grid = (0..grid_points).map(|i| f_norm_edge * (i as f64 / last));
    if !taps.poly.is_palindromic() || taps.poly.len().is_multiple_of(2) {
        let eval = CircleEvaluator::new(taps);
        let mut max = Float::new(eval.prec);
        for f in grid {
            let m = eval.magnitude(f);
            if m > max {
                max = m;
            }
        }
        return Ok(max);
    }

    let prec = eval_precision(taps);
    let k = taps.poly.degree() / 2;
    let d: Vec<Float> = (0..=k)
        .map(|j| {
            let c = taps.poly.coeff_float(k - j, prec);
            if j == 0 {
                c
            } else {
                c * 2u32
            }
        })
        .collect();

    // x = beta + alpha u maps u in [-1, 1] onto [cos(2 pi edge), 1].
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let x_lo = (Float::with_val(prec, &pi * 2u32) * f_norm_edge).cos();
    let alpha = Float::with_val(prec, 1u32 - &x_lo) / 2u32;
    let beta = Float::with_val(prec, 1u32 + &x_lo) / 2u32;
    let n = k + 1;
    let node_angle = |i: usize| (2 * i + 1) as f64 / (2 * n) as f64;
    let values: Vec<Float> = (0..n)
        .map(|i| {
            let u = Float::with_val(prec, &pi * node_angle(i)).cos();
            let x = Float::with_val(prec, &alpha * &u) + &beta;
            chebyshev_series(&d, &x)
        })
        .collect();
    let scale = values.iter().map(|v| Float::with_val(prec, v.abs_ref())).fold(Float::new(prec), |m, v| m.max(&v));
    if scale == 0 {
        return Ok(scale);
    }
    let v: Vec<f64> = values.iter().map(|x| Float::with_val(prec, x / &scale).to_f64()).collect();

    // Chebyshev coefficients (in u) of the degree-K interpolant.
    let g: Vec<f64> = (0..n)
        .map(|m| {
            let sum: f64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi * (std::f64::consts::PI * m as f64 * node_angle(i)).cos())
                .sum();
            let c = 2.0 * sum / n as f64;
            if m == 0 {
                0.5 * c
            } else {
                c
            }
        })
        .collect();

    // u = 1 - (1 - x)/alpha, with 1 - cos(2 pi f) = 2 sin^2(pi f) to avoid cancellation.
    let alpha = alpha.to_f64();
    let mut max = 0.0f64;
    for f in grid {
        let sin = (std::f64::consts::PI * f).sin();
        let u = (1.0 - 2.0 * sin * sin / alpha).clamp(-1.0, 1.0);
        max = max.max(chebyshev_series_f64(&g, u).abs());
    }
    Ok(scale * max)
}

/// `sum_j d_j T_j(x)` by Clenshaw's recurrence.
fn chebyshev_series(d: &[Float], x: &Float) -> Float {
    let prec = x.prec();
    let two_x = Float::with_val(prec, x * 2u32);
    let mut b1 = Float::new(prec);
    let mut b2 = Float::new(prec);
    let mut b0 = Float::new(prec);
    for c in d.iter().skip(1).rev() {
        b0.assign(&two_x * &b1);
        b0 -= &b2;
        b0 += c;
        std::mem::swap(&mut b2, &mut b1);
        std::mem::swap(&mut b1, &mut b0);
    }
    // b1 = b_1, b2 = b_2: sum = d_0 + x b_1 - b_2
    let mut out = Float::with_val(prec, x * &b1);
    out -= &b2;
    out += &d[0];
    out
}

fn chebyshev_series_f64(g: &[f64], u: f64) -> f64 {
    let (mut b1, mut b2) = (0.0f64, 0.0f64);
    for &c in g.iter().skip(1).rev() {
        let b0 = (2.0 * u).mul_add(b1, c - b2);
        b2 = b1;
        b1 = b0;
    }
    u.mul_add(b1, g[0] - b2)
}

/// Normalized band-edge frequency `acos(a/2) / 2pi` belonging to `a`.
pub fn band_edge_frequency(band_edge_a: f64) -> f64 {
    (band_edge_a / 2.0).acos() / (2.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_by_hand() {
        // z (z + 1/z - 1) = z^2 - z + 1
        let p = build_pk(1, 0.0).unwrap();
        assert_eq!(p.taps(), &[1.0, -1.0]);
        assert_eq!(p.guaranteed_bound(), 1.0);
        assert_eq!(p.k(), 1);
    }

    #[test]
    fn second_order_expansion() {
        // T_2^{[a,2]}(y) = (y - c)^2 - 2 s^2 with c = a/2 + 1; for a = 0: y^2 - 2y + 1/2.
        // z^2 (y^2 - 2y + 1/2) with y = z + 1/z: z^4 - 2z^3 + 2.5 z^2 - 2z + 1.
        let p = build_pk(2, 0.0).unwrap();
        assert_eq!(p.taps(), &[2.0, -2.5, 2.0, -1.0]);
        assert_eq!(p.value_at_one(), Rational::from((1, 2)));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(build_pk(0, 0.0).is_err());
        assert!(build_pk(3, 2.0).is_err());
        assert!(build_pk(3, -2.0).is_err());
        assert!(build_pk(3, f64::NAN).is_err());
    }

    #[test]
    fn sequence_matches_direct_build() {
        let seq: Vec<_> = PkSequence::new(-0.7).unwrap().take(6).collect();
        for (i, p) in seq.iter().enumerate() {
            let direct = build_pk(i as u32 + 1, -0.7).unwrap();
            assert_eq!(p.polynomial(), direct.polynomial());
        }
    }

    #[test]
    fn unit_circle_examples() {
        let p = build_pk(1, 0.0).unwrap();
        assert!((eval_on_unit_circle(&p, 0.25) - 1.0).abs() < 1e-15);
        assert!((eval_on_unit_circle(&p, 0.0) - 1.0).abs() < 1e-15);
        assert!((eval_on_unit_circle(&p, 0.5) - 3.0).abs() < 1e-15);
        assert!((eval_on_unit_circle(&p, -0.5) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn in_band_examples() {
        let p1 = build_pk(1, 0.0).unwrap();
        assert!(in_band_max(&p1, 0.25, 1001).unwrap() <= 1.0 + 1e-6);
        let p6 = build_pk(6, 0.0).unwrap();
        assert!(in_band_max(&p6, 0.25, 4097).unwrap() <= 0.03125 * (1.0 + 1e-6));
        // two points: the endpoints only
        let m = in_band_max(&p1, 0.1, 2).unwrap();
        let ends = eval_on_unit_circle(&p1, 0.0).max(eval_on_unit_circle(&p1, 0.1));
        assert!((m - ends).abs() <= 1e-12 * ends);
        assert!(in_band_max(&p1, 0.25, 1).is_err());
        assert!(in_band_max(&p1, 0.6, 10).is_err());
    }

    #[test]
    fn grid_max_matches_direct_evaluation() {
        for (k, a) in [(3, 0.0), (25, 1.0), (60, 1.9), (40, -1.5)] {
            let p = build_pk(k, a).unwrap();
            let edge = band_edge_frequency(a);
            let fast = in_band_max_precise(&p, edge, 257).unwrap();
            let direct = (0..257)
                .map(|i| eval_on_unit_circle_precise(&p, edge * (i as f64 / 256.0)))
                .fold(Float::new(64), |m, v| m.max(&v));
            let rel = (Float::with_val(64, &fast - &direct) / &direct).abs().to_f64();
            assert!(rel < 1e-10, "K={k} a={a}: {rel}");
            // beyond the band edge the interpolant still tracks the polynomial
            let wide = in_band_max_precise(&p, (edge * 1.2).min(0.49), 101).unwrap();
            let direct_wide = (0..101)
                .map(|i| eval_on_unit_circle_precise(&p, (edge * 1.2).min(0.49) * (i as f64 / 100.0)))
                .fold(Float::new(64), |m, v| m.max(&v));
            let rel = (Float::with_val(64, &wide - &direct_wide) / &direct_wide).abs().to_f64();
            assert!(rel < 1e-8, "K={k} a={a} wide: {rel}");
        }
    }

    #[test]
    fn band_edge_frequency_inverts() {
        let wts: f64 = 0.37;
        let a = 2.0 * (2.0 * std::f64::consts::PI * wts).cos();
        assert!((band_edge_frequency(a) - wts).abs() < 1e-14);
    }
}
