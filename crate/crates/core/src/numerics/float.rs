//! Fixed-precision binary floating point on top of `num-bigint`.
//!
//! A value is `mant · 2^exp` where `mant` has exactly `prec` significant bits
//! (or is zero). Every operation computes enough exact bits plus a sticky bit
//! and rounds once, to nearest with ties to even, so results are correctly
//! rounded.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{render_decimal, Mode, Rational, Scalar};
use crate::error::{Error, Result};

/// Default mantissa width in bits.
pub const DEFAULT_PRECISION: u32 = 512;

#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        assert!(prec >= 2, "float precision must be at least 2 bits");
        BigFloat { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn from_rational_prec(q: &Rational, prec: u32) -> Self {
        Self::from_ratio(q.numer(), q.denom(), 0, prec)
    }

    /// Round `sign · mag · 2^exp` to `prec` bits.
    fn round(sign: Sign, mag: BigUint, mut exp: i64, prec: u32) -> Self {
        if mag.is_zero() {
            return Self::zero(prec);
        }
        let bits = mag.bits();
        let p = u64::from(prec);
        let mag = match bits.cmp(&p) {
            Ordering::Greater => {
                let sh = bits - p;
                let mut q = &mag >> sh;
                let rem = &mag - (&q << sh);
                let half = BigUint::one() << (sh - 1);
                let round_up = match rem.cmp(&half) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => q.bit(0),
                };
                exp += sh as i64;
                if round_up {
                    q += 1u32;
                    if q.bits() > p {
                        q >>= 1;
                        exp += 1;
                    }
                }
                q
            }
            Ordering::Less => {
                let sh = p - bits;
                exp -= sh as i64;
                mag << sh
            }
            Ordering::Equal => mag,
        };
        BigFloat { mant: BigInt::from_biguint(sign, mag), exp, prec }
    }

    /// Correctly rounded `num / den · 2^exp`.
    fn from_ratio(num: &BigInt, den: &BigInt, exp: i64, prec: u32) -> Self {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return Self::zero(prec);
        }
        let sign = if num.sign() == den.sign() { Sign::Plus } else { Sign::Minus };
        let a = num.magnitude();
        let b = den.magnitude();
        let shift = (i64::from(prec) + 2 + b.bits() as i64 - a.bits() as i64).max(0) as u64;
        let scaled = a << shift;
        let q = &scaled / b;
        let sticky = &q * b != scaled;
        let q = (q << 1u32) | BigUint::from(u8::from(sticky));
        Self::round(sign, q, exp - shift as i64 - 1, prec)
    }

    fn check_prec(&self, other: &Self) {
        assert_eq!(
            self.prec, other.prec,
            "mixed float precisions ({} vs {} bits) in one expression",
            self.prec, other.prec
        );
    }

    fn add_impl(&self, other: &Self) -> Self {
        self.check_prec(other);
        if self.mant.is_zero() {
            return other.clone();
        }
        if other.mant.is_zero() {
            return self.clone();
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let gap = (hi.exp - lo.exp) as u64;
        let (sum, exp) = if gap > u64::from(self.prec) + 3 {
            // |lo| < ulp(hi)/8: only its sign matters for rounding.
            let nudge = BigInt::from(if lo.mant.is_negative() { -1 } else { 1 });
            ((&hi.mant << 3u32) + nudge, hi.exp - 3)
        } else {
            ((&hi.mant << gap) + &lo.mant, lo.exp)
        };
        let (sign, mag) = sum.into_parts();
        Self::round(sign, mag, exp, self.prec)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check_prec(other);
        let (sign, mag) = (&self.mant * &other.mant).into_parts();
        Self::round(sign, mag, self.exp + other.exp, self.prec)
    }

    fn div_impl(&self, other: &Self) -> Self {
        self.check_prec(other);
        Self::from_ratio(&self.mant, &other.mant, self.exp - other.exp, self.prec)
    }

    fn sqrt_impl(&self) -> Option<Self> {
        if self.mant.is_negative() {
            return None;
        }
        if self.mant.is_zero() {
            return Some(self.clone());
        }
        let m = self.mant.magnitude();
        let want = 2 * u64::from(self.prec) + 4;
        let mut shift = want.saturating_sub(m.bits());
        if (self.exp - shift as i64).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = m << shift;
        let r = scaled.sqrt();
        let sticky = &r * &r != scaled;
        let q = (r << 1u32) | BigUint::from(u8::from(sticky));
        let exp = (self.exp - shift as i64) / 2 - 1;
        Some(Self::round(Sign::Plus, q, exp, self.prec))
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = {
            let (a, b) = (self.mant.magnitude(), other.mant.magnitude());
            let ta = self.exp + a.bits() as i64;
            let tb = other.exp + b.bits() as i64;
            if ta != tb {
                ta.cmp(&tb)
            } else if self.exp >= other.exp {
                (a << (self.exp - other.exp) as u64).cmp(b)
            } else {
                a.cmp(&(b << (other.exp - self.exp) as u64))
            }
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }

    /// `mant · 2^exp` exactly.
    pub fn to_exact(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Decimal digits that round-trip at this precision.
    pub fn full_digits(&self) -> usize {
        (f64::from(self.prec) * std::f64::consts::LOG10_2).ceil() as usize + 2
    }

    /// `<decimal>@<bits>`, the annotated float text form.
    pub fn to_annotated(&self) -> String {
        format!("{}@{}", self.render(None), self.prec)
    }

    /// Parses `<decimal>@<bits>`; the decimal part is read exactly and then
    /// rounded once to the annotated precision.
    pub fn parse_annotated(s: &str) -> Result<Self> {
        let (value, bits) = s
            .rsplit_once('@')
            .ok_or_else(|| Error::Parse(format!("float text `{s}` lacks an @bits annotation")))?;
        let bits: u32 = bits
            .parse()
            .ok()
            .filter(|&b| b >= 2)
            .ok_or_else(|| Error::Parse(format!("bad precision annotation in `{s}`")))?;
        Ok(Self::from_rational_prec(&super::parse_rational(value)?, bits))
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(f.precision()))
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mant: -self.mant, ..self }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                self.$imp(&rhs)
            }
        }
        impl<'a> $trait<&'a BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                self.$imp(rhs)
            }
        }
        impl<'a> $trait<&'a BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                self.$imp(rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

impl BigFloat {
    fn sub_impl(&self, other: &Self) -> Self {
        self.add_impl(&-other.clone())
    }
}

binop!(Sub, sub, sub_impl);

impl Scalar for BigFloat {
    type Context = u32;

    fn context(&self) -> u32 {
        self.prec
    }

    fn mode_of(prec: u32) -> Mode {
        Mode::Float(prec)
    }

    fn from_rational(q: &Rational, prec: u32) -> Self {
        Self::from_rational_prec(q, prec)
    }

    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    fn sign(&self) -> Sign {
        self.mant.sign()
    }

    fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), ..self.clone() }
    }

    fn sqrt(&self) -> Option<Self> {
        self.sqrt_impl()
    }

    fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let r = if self.prec > 53 {
            let (sign, mag) = self.mant.clone().into_parts();
            Self::round(sign, mag, self.exp, 53)
        } else {
            self.clone()
        };
        let m = r.mant.to_f64().unwrap_or(f64::NAN);
        let e = r.exp.clamp(-4000, 4000) as i32;
        let half = e / 2;
        m * 2f64.powi(half) * 2f64.powi(e - half)
    }

    fn to_rational(&self) -> Rational {
        self.to_exact()
    }

    fn render(&self, digits: Option<usize>) -> String {
        render_decimal(&self.to_exact(), digits.unwrap_or_else(|| self.full_digits()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;
    use proptest::prelude::*;

    fn f(s: &str, prec: u32) -> BigFloat {
        BigFloat::from_rational_prec(&parse_rational(s).unwrap(), prec)
    }

    #[test]
    fn matches_ieee_double_at_53_bits() {
        for (a, b) in [(0.1, 0.2), (1.0 / 3.0, 3.0), (1e300, 1e-300), (-2.5, 7.25), (1.0, 1e-17)] {
            let fa = BigFloat::from_rational_prec(&Rational::from_float(a).unwrap(), 53);
            let fb = BigFloat::from_rational_prec(&Rational::from_float(b).unwrap(), 53);
            assert_eq!((fa.clone() + &fb).to_f64(), a + b);
            assert_eq!((fa.clone() - &fb).to_f64(), a - b);
            assert_eq!((fa.clone() * &fb).to_f64(), a * b);
            assert_eq!((fa.clone() / &fb).to_f64(), a / b);
        }
        let two = f("2", 53);
        assert_eq!(two.sqrt().unwrap().to_f64(), 2f64.sqrt());
    }

    #[test]
    fn ties_go_to_even() {
        // 1 + 2^-4 at 4 bits sits exactly between 1 and 1 + 2^-3.
        let one = f("1", 4);
        let tie = f("1/16", 8);
        let tie = BigFloat::from_rational_prec(&tie.to_exact(), 4);
        assert_eq!((one.clone() + &tie).to_exact(), parse_rational("1").unwrap());
        // 1.125 + 1/16 = 1.1875 is a tie between 1.125 and 1.25; 1.25 is even.
        let x = f("9/8", 4);
        assert_eq!((x + &tie).to_exact(), parse_rational("5/4").unwrap());
    }

    #[test]
    fn tiny_addend_keeps_sign_information() {
        let one = f("1", 64);
        let eps = f("1e-100", 64);
        assert_eq!(one.clone() + &eps, one);
        assert_eq!(one.clone() - &eps, one);
        let pow2 = f("1024", 8);
        assert_eq!(pow2.clone() - &f("1e-50", 8), pow2);
    }

    #[test]
    fn annotated_text_round_trip() {
        let x = f("-7/3", 512);
        let s = x.to_annotated();
        assert!(s.ends_with("@512"));
        assert_eq!(BigFloat::parse_annotated(&s).unwrap(), x);
        assert!(BigFloat::parse_annotated("1.0").is_err());
    }

    #[test]
    fn ordering() {
        let a = f("-3", 32);
        let b = f("1/1000", 32);
        assert!(a < b);
        assert!(-b.clone() > a);
        assert!(f("0", 32) < b);
        assert_eq!(f("0.5", 32), f("1/2", 32));
    }

    #[test]
    #[should_panic(expected = "mixed float precisions")]
    fn mixing_precisions_is_an_error() {
        let _ = f("1", 64) + f("1", 128);
    }

    proptest! {
        #[test]
        fn ops_are_correctly_rounded(a in -1_000_000i64..1_000_000, b in 1i64..1_000_000, c in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
            let prec = 40;
            let qa = Rational::new(a.into(), b.into());
            let qb = Rational::new(c.into(), d.into());
            let fa = BigFloat::from_rational_prec(&qa, prec);
            let fb = BigFloat::from_rational_prec(&qb, prec);
            let (ea, eb) = (fa.to_exact(), fb.to_exact());
            // op result equals the single rounding of the exact result of the rounded inputs
            prop_assert_eq!(fa.clone() + &fb, BigFloat::from_rational_prec(&(&ea + &eb), prec));
            prop_assert_eq!(fa.clone() - &fb, BigFloat::from_rational_prec(&(&ea - &eb), prec));
            prop_assert_eq!(fa.clone() * &fb, BigFloat::from_rational_prec(&(&ea * &eb), prec));
            if c != 0 {
                prop_assert_eq!(fa.clone() / &fb, BigFloat::from_rational_prec(&(&ea / &eb), prec));
            }
        }

        #[test]
        fn sqrt_brackets_exact_root(n in 1u64..u64::MAX) {
            let prec = 64;
            let x = BigFloat::from_rational_prec(&Rational::from_integer(n.into()), prec);
            let r = x.sqrt().unwrap().to_exact();
            let ulp = Rational::new(BigInt::one(), BigInt::one() << 62u32) * &r;
            let sq = &r * &r;
            let xe = x.to_exact();
            // |r^2 - x| <= 2 r ulp
            let err = if sq > xe { &sq - &xe } else { &xe - &sq };
            prop_assert!(err <= Rational::from_integer(2.into()) * &r * &ulp);
        }

        #[test]
        fn decimal_round_trip(a in any::<i64>(), b in 1i64..i64::MAX) {
            let x = BigFloat::from_rational_prec(&Rational::new(a.into(), b.into()), 128);
            let back = BigFloat::from_rational_prec(&parse_rational(&x.render(None)).unwrap(), 128);
            prop_assert_eq!(back, x);
        }
    }
}
