//! Exact arithmetic on dyadic rationals (`n * 2^e`).
//!
//! Every `f64` is a dyadic rational, and the predictor recurrence only adds
//! and multiplies, so its coefficients can be carried without any rounding.
//! Coefficients of a [`DyadicPoly`] share one binary exponent.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// A dyadic rational `mantissa * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: Integer,
    exp: i64,
}

impl Dyadic {
    /// Exact conversion; `x` must be finite.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "dyadic conversion of non-finite value");
        match Float::with_val(53, x).to_integer_exp() {
            Some((mantissa, exp)) => Dyadic { mantissa, exp: exp as i64 }.normalized(),
            None => Dyadic::zero(),
        }
    }

    pub fn from_integer(v: Integer) -> Self {
        Dyadic { mantissa: v, exp: 0 }.normalized()
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { mantissa: Integer::from(v), exp: 0 }.normalized()
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: Integer::new(), exp: 0 }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.min(other.exp);
        let a = Integer::from(&self.mantissa << (self.exp - exp) as u32);
        let b = Integer::from(&other.mantissa << (other.exp - exp) as u32);
        Dyadic { mantissa: a + b, exp }.normalized()
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mantissa: Integer::from(-&self.mantissa), exp: self.exp }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic { mantissa: Integer::from(&self.mantissa * &other.mantissa), exp: self.exp + other.exp }
            .normalized()
    }

    pub fn mul_pow2(&self, shift: i64) -> Dyadic {
        Dyadic { mantissa: self.mantissa.clone(), exp: self.exp + shift }.normalized()
    }

    pub fn pow(&self, k: u32) -> Dyadic {
        Dyadic { mantissa: Integer::from((&self.mantissa).pow(k)), exp: self.exp * k as i64 }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn to_rational(&self) -> Rational {
        scaled_rational(&self.mantissa, self.exp)
    }

    /// Nearest `f64`, including subnormal results.
    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64()
    }

    pub fn to_float(&self, prec: u32) -> Float {
        scaled_float(&self.mantissa, self.exp, prec)
    }

    /// `floor(log2 |x|)`, or `None` for zero.
    pub fn log2_floor(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.mantissa.significant_bits() as i64 - 1 + self.exp)
        }
    }

    fn normalized(mut self) -> Self {
        if self.mantissa == 0 {
            self.exp = 0;
            return self;
        }
        let tz = self.mantissa.find_one(0).unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exp += tz as i64;
        }
        self
    }
}

/// Polynomial `sum_j c_j z^j` with exact dyadic coefficients, lowest power
/// first. Trailing zero coefficients are trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicPoly {
    mantissas: Vec<Integer>,
    exp: i64,
}

impl DyadicPoly {
    pub fn from_coeffs(coeffs: &[Dyadic]) -> Self {
        let exp = coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.exp).min().unwrap_or(0);
        let mantissas = coeffs
            .iter()
            .map(|c| Integer::from(&c.mantissa << (c.exp - exp).max(0) as u32))
            .collect();
        DyadicPoly { mantissas, exp }.normalized()
    }

    pub fn constant(c: Dyadic) -> Self {
        Self::from_coeffs(&[c])
    }

    /// Number of stored coefficients (degree + 1).
    pub fn len(&self) -> usize {
        self.mantissas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mantissas.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn coeff(&self, j: usize) -> Dyadic {
        match self.mantissas.get(j) {
            Some(m) => Dyadic { mantissa: m.clone(), exp: self.exp }.normalized(),
            None => Dyadic::zero(),
        }
    }

    pub fn coeff_f64(&self, j: usize) -> f64 {
        self.coeff(j).to_f64()
    }

    pub fn coeff_float(&self, j: usize, prec: u32) -> Float {
        match self.mantissas.get(j) {
            Some(m) => scaled_float(m, self.exp, prec),
            None => Float::new(prec),
        }
    }

    /// Exact value at `z = 1`.
    pub fn sum(&self) -> Rational {
        let total: Integer = self.mantissas.iter().sum();
        scaled_rational(&total, self.exp)
    }

    /// Upper bound on `log2(sum_j |c_j|)`; `None` for the zero polynomial.
    pub fn abs_sum_log2_ceil(&self) -> Option<i64> {
        let total: Integer = self.mantissas.iter().map(|m| Integer::from(m.abs_ref())).sum();
        if total == 0 {
            None
        } else {
            Some(total.significant_bits() as i64 + self.exp)
        }
    }

    /// `true` when `c_j == c_{d-j}` for every `j`.
    pub fn is_palindromic(&self) -> bool {
        let n = self.mantissas.len();
        (0..n / 2).all(|j| self.mantissas[j] == self.mantissas[n - 1 - j])
    }

    pub fn mul(&self, other: &DyadicPoly) -> DyadicPoly {
        if self.is_empty() || other.is_empty() {
            return DyadicPoly { mantissas: Vec::new(), exp: 0 };
        }
        let mut out = vec![Integer::new(); self.len() + other.len() - 1];
        for (i, a) in self.mantissas.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.mantissas.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        DyadicPoly { mantissas: out, exp: self.exp + other.exp }.normalized()
    }

    /// Multiplies by the scalar `c` and by `z^shift`.
    pub fn scale_shift(&self, c: &Dyadic, shift: usize) -> DyadicPoly {
        let mut mantissas = vec![Integer::new(); shift];
        mantissas.extend(self.mantissas.iter().map(|m| Integer::from(m * &c.mantissa)));
        DyadicPoly { mantissas, exp: self.exp + c.exp }.normalized()
    }

    pub fn sub(&self, other: &DyadicPoly) -> DyadicPoly {
        let exp = self.exp.min(other.exp);
        let n = self.len().max(other.len());
        let ls = (self.exp - exp) as u32;
        let lo = (other.exp - exp) as u32;
        let mantissas = (0..n)
            .map(|j| {
                let a = self.mantissas.get(j).map(|m| Integer::from(m << ls)).unwrap_or_default();
                let b = other.mantissas.get(j).map(|m| Integer::from(m << lo)).unwrap_or_default();
                a - b
            })
            .collect();
        DyadicPoly { mantissas, exp }.normalized()
    }

    fn normalized(mut self) -> Self {
        while self.mantissas.last().is_some_and(|m| *m == 0) {
            self.mantissas.pop();
        }
        let tz = self
            .mantissas
            .iter()
            .filter(|m| **m != 0)
            .map(|m| m.find_one(0).unwrap_or(0))
            .min()
            .unwrap_or(0);
        if tz > 0 {
            for m in &mut self.mantissas {
                *m >>= tz;
            }
            self.exp += tz as i64;
        }
        if self.mantissas.is_empty() {
            self.exp = 0;
        }
        self
    }
}

fn scaled_rational(m: &Integer, exp: i64) -> Rational {
    let r = Rational::from(m);
    if exp >= 0 {
        r << exp as u32
    } else {
        r >> (-exp) as u32
    }
}

fn scaled_float(m: &Integer, exp: i64, prec: u32) -> Float {
    let f = Float::with_val(prec, m);
    // MPFR exponents span about +/-2^62, far beyond anything built here.
    f << exp as i32
}
