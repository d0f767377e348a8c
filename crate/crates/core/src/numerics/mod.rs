//! Arithmetic kernel shared by every other module.
//!
//! Two scalar types implement [`Scalar`]:
//!
//! * [`Rational`]: exact elements of ℚ, always in lowest terms with a positive
//!   denominator, so `is_zero` is an exact test.
//! * [`BigFloat`]: binary floating point with a fixed precision of `P` bits and
//!   round-to-nearest-even on every operation.
//!
//! Algorithms are written once, generically over `S: Scalar`. Exact and float
//! values are distinct types, so an expression cannot mix the two modes. Two
//! floats of different precision refuse to combine at runtime.

mod float;
mod stencil;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use float::{BigFloat, DEFAULT_PRECISION};
pub use stencil::{central_difference, central_difference_fourth, DerivOrder};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Which arithmetic a computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    /// Binary floating point with the given number of mantissa bits.
    Float(u32),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float(bits) => write!(f, "float:{bits}"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    /// Accepts `exact`, `float` (default precision) and `float:P`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Mode::Exact);
        }
        let rest = s
            .strip_prefix("float")
            .ok_or_else(|| Error::Parse(format!("unknown mode `{s}` (expected exact or float:P)")))?;
        if rest.is_empty() {
            return Ok(Mode::Float(DEFAULT_PRECISION));
        }
        let bits = rest
            .strip_prefix(':')
            .and_then(|b| b.parse::<u32>().ok())
            .filter(|&b| b >= 8)
            .ok_or_else(|| Error::Parse(format!("bad float precision in `{s}` (need float:P, P >= 8)")))?;
        Ok(Mode::Float(bits))
    }
}

/// The single arithmetic contract used by all algorithms.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// What is needed to build a constant: nothing for exact values, the bit
    /// precision for floats.
    type Context: Copy + fmt::Debug + PartialEq + Send + Sync;

    fn context(&self) -> Self::Context;
    fn mode_of(ctx: Self::Context) -> Mode;
    fn from_rational(q: &Rational, ctx: Self::Context) -> Self;

    fn from_int(n: i64, ctx: Self::Context) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)), ctx)
    }

    fn from_bigint(n: &BigInt, ctx: Self::Context) -> Self {
        Self::from_rational(&Rational::from_integer(n.clone()), ctx)
    }

    fn is_zero(&self) -> bool;
    fn sign(&self) -> Sign;
    fn abs(&self) -> Self;
    /// Square root; `None` for negative input, and in exact mode also when the
    /// root is irrational.
    fn sqrt(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// The exact value (floats are dyadic rationals).
    fn to_rational(&self) -> Rational;
    /// Text form: `p/q` (or `p`) for rationals, scientific decimal for floats
    /// with `digits` significant digits (full precision when `None`).
    fn render(&self, digits: Option<usize>) -> String;

    fn mode(&self) -> Mode {
        Self::mode_of(self.context())
    }

    /// Integer constant in the same context as `self`.
    fn int(&self, n: i64) -> Self {
        Self::from_int(n, self.context())
    }

    /// Rational constant in the same context as `self`.
    fn lift(&self, q: &Rational) -> Self {
        Self::from_rational(q, self.context())
    }

    fn is_positive(&self) -> bool {
        self.sign() == Sign::Plus
    }

    fn is_negative(&self) -> bool {
        self.sign() == Sign::Minus
    }

    fn powu(&self, e: u32) -> Self {
        let mut acc = self.int(1);
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }
}

impl Scalar for Rational {
    type Context = ();

    fn context(&self) {}

    fn mode_of(_: ()) -> Mode {
        Mode::Exact
    }

    fn from_rational(q: &Rational, _: ()) -> Self {
        q.clone()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn sign(&self) -> Sign {
        self.numer().sign()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn sqrt(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| Rational::new(n, d))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| rational_to_f64(self))
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn render(&self, digits: Option<usize>) -> String {
        match digits {
            None => self.to_string(),
            Some(d) => render_decimal(self, d),
        }
    }
}

fn rational_to_f64(q: &Rational) -> f64 {
    BigFloat::from_rational_prec(q, 53).to_f64()
}

/// Parses `p/q`, integers, decimals and scientific notation (`0.8`, `-1e-100`,
/// `2.5E3`) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= Rational::from_integer(scale);
    } else {
        value /= Rational::from_integer(scale);
    }
    Ok(if negative { -value } else { value })
}

/// Nearest integer, ties to even.
pub fn round_half_even(q: &Rational) -> BigInt {
    let (fl, rem) = q.numer().div_mod_floor(q.denom());
    let twice: BigInt = &rem * 2;
    match twice.cmp(q.denom()) {
        Ordering::Less => fl,
        Ordering::Greater => fl + 1,
        Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

/// Scientific decimal rendering with `digits` significant digits, e.g.
/// `-3.50000e0`.
pub fn render_decimal(q: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if Zero::is_zero(q) {
        return "0".to_string();
    }
    let negative = Signed::is_negative(q);
    let mag = Signed::abs(q);
    // log10 estimate from bit lengths, corrected below.
    let bits = mag.numer().bits() as f64 - mag.denom().bits() as f64;
    let mut k = (bits * std::f64::consts::LOG10_2).floor() as i64;
    let lower = num_traits::pow(BigInt::from(10), digits - 1);
    let upper = &lower * 10;
    let scaled = loop {
        let shift = digits as i64 - 1 - k;
        let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), shift.unsigned_abs() as usize));
        let s = if shift >= 0 { &mag * &scale } else { &mag / &scale };
        let r = round_half_even(&s);
        if r >= upper {
            k += 1;
        } else if r < lower {
            k -= 1;
        } else {
            break r;
        }
    };
    let text = scaled.to_string();
    let (head, tail) = text.split_at(1);
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{k}")
    } else {
        format!("{sign}{head}.{tail}e{k}")
    }
}

/// Rising factorial (a)_n = a(a+1)…(a+n−1); 1 for n = 0.
pub fn pochhammer<S: Scalar>(a: &S, n: usize) -> S {
    let mut acc = a.int(1);
    let mut term = a.clone();
    for _ in 0..n {
        acc = acc * &term;
        term = term + a.int(1);
    }
    acc
}

/// Binomial coefficient C(n, k) as an exact integer, 0 outside 0 ≤ k ≤ n.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// n! as an exact integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}
