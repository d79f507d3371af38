//! Exact constants: Gaussian rationals, optionally scaled by a power of π.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element of Q(i): `re + im·i` with both parts reduced rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(v: i64) -> Self {
        GaussRat {
            re: BigRational::from_integer(BigInt::from(v)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRat {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn imag_unit() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn zero() -> Self {
        GaussRat::default()
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(GaussRat {
                re: self.re.recip(),
                im: BigRational::zero(),
            });
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat {
            re: &self.re / &norm,
            im: -(&self.im / &norm),
        })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// True when the "first nonzero" part is negative; used to pick a sign
    /// when rendering.
    pub fn is_negative_leading(&self) -> bool {
        if !self.re.is_zero() {
            self.re.is_negative()
        } else {
            self.im.is_negative()
        }
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Very large numerators or denominators: scale down by bit length first.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 900).max(0) as usize;
    let shift_d = (db - 900).max(0) as usize;
    let n = (r.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re + &rhs.re,
            im: if self.im.is_zero() && rhs.im.is_zero() {
                BigRational::zero()
            } else {
                &self.im + &rhs.im
            },
        }
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re - &rhs.re,
            im: if self.im.is_zero() && rhs.im.is_zero() {
                BigRational::zero()
            } else {
                &self.im - &rhs.im
            },
        }
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRat {
                re: &self.re * &rhs.re,
                im: BigRational::zero(),
            };
        }
        GaussRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -self.re,
            im: -self.im,
        }
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    /// Renders in the expression grammar: `3/2`, `-I`, `1/2*I`, `(1 + 2*I)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: &BigRational| -> String {
            if im.is_one() {
                "I".to_string()
            } else if (-im).is_one() {
                "-I".to_string()
            } else {
                format!("{}*I", fmt_ratio(im))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_ratio(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(
                    f,
                    "({} {} {})",
                    fmt_ratio(&self.re),
                    sign,
                    im_part(&self.im.abs())
                )
            }
        }
    }
}

/// An exact constant `c·π^p` with `c ∈ Q(i)`.
///
/// Zero is always stored with `pi_pow = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    value: GaussRat,
    pi_pow: i32,
}

impl Scalar {
    pub fn new(value: GaussRat, pi_pow: i32) -> Self {
        if value.is_zero() {
            Scalar {
                value,
                pi_pow: 0,
            }
        } else {
            Scalar { value, pi_pow }
        }
    }

    /// `re + im·i` from integer fractions, times `π^pi_pow`.
    pub fn from_parts(re: (i64, i64), im: (i64, i64), pi_pow: i32) -> Self {
        let value = GaussRat::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        );
        Scalar::new(value, pi_pow)
    }

    pub fn integer(v: i64) -> Self {
        Scalar::new(GaussRat::from_int(v), 0)
    }

    /// The Chern-Weil normalisation `i/(2π)`.
    pub fn i_over_two_pi() -> Self {
        Scalar::from_parts((0, 1), (1, 2), -1)
    }

    pub fn value(&self) -> &GaussRat {
        &self.value
    }

    pub fn pi_pow(&self) -> i32 {
        self.pi_pow
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = GaussRat::one();
        for _ in 0..k {
            acc = &acc * &self.value;
        }
        Scalar::new(acc, self.pi_pow * k as i32)
    }

    pub fn eval(&self) -> Complex64 {
        self.value.to_complex() * std::f64::consts::PI.powi(self.pi_pow)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.value * &rhs.value, self.pi_pow + rhs.pi_pow)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_pow {
            0 => write!(f, "{}", self.value),
            1 => write!(f, "{}*pi", self.value),
            p => write!(f, "{}*pi^{}", self.value, p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_over_two_pi_evaluates() {
        let s = Scalar::i_over_two_pi();
        let v = s.eval();
        assert_eq!(v.re, 0.0);
        assert!((v.im - 0.159_154_943_091_895_35).abs() < 1e-15);
    }

    #[test]
    fn square_of_i_over_two_pi() {
        let s = Scalar::i_over_two_pi().pow(2);
        assert_eq!(s.pi_pow(), -2);
        assert_eq!(s.value(), &GaussRat::from_ratio(-1, 4));
        assert!((s.eval().re + 0.025_330_295_910_584_444).abs() < 1e-15);
    }

    #[test]
    fn zero_is_unique() {
        let z = Scalar::new(GaussRat::zero(), 5);
        assert_eq!(z, Scalar::integer(0));
    }

    #[test]
    fn gauss_inverse() {
        let a = GaussRat::new(
            BigRational::from_integer(3.into()),
            BigRational::from_integer(4.into()),
        );
        let prod = &a * &a.inv().unwrap();
        assert!(prod.is_one());
        assert!(GaussRat::zero().inv().is_none());
    }

    #[test]
    fn renders_in_grammar() {
        assert_eq!(GaussRat::from_ratio(-3, 2).to_string(), "-3/2");
        assert_eq!(GaussRat::imag_unit().to_string(), "I");
        assert_eq!(Scalar::i_over_two_pi().to_string(), "1/2*I*pi^-1");
    }
}
