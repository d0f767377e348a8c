//! The semi-classical Krawtchouk weight, its potential, and the terminating
//! hypergeometric sums that enter the initial conditions.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{factorial, parse_rational, pochhammer, BigFloat, Rational, Scalar};

/// Weight parameters `(N, α, c)`: support `{0..N}`, `α < 1`, `c > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightParams<S> {
    size: usize,
    alpha: S,
    c: S,
}

impl<S: Scalar> WeightParams<S> {
    pub fn new(size: usize, alpha: S, c: S) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("N must be a positive integer".into()));
        }
        if alpha.context() != c.context() {
            return Err(Error::InvalidParameter(
                "alpha and c must share one arithmetic context".into(),
            ));
        }
        if !(alpha.int(1) - &alpha).is_positive() {
            return Err(Error::InvalidParameter(format!("alpha < 1 required, got alpha = {alpha}")));
        }
        if !c.is_positive() {
            return Err(Error::InvalidParameter(format!("c > 0 required, got c = {c}")));
        }
        Ok(WeightParams { size, alpha, c })
    }

    /// `N`, the largest lattice point.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn c(&self) -> &S {
        &self.c
    }

    pub fn context(&self) -> S::Context {
        self.c.context()
    }

    pub fn int(&self, n: i64) -> S {
        self.c.int(n)
    }

    /// `N` as a scalar.
    pub fn big_n(&self) -> S {
        self.int(self.size as i64)
    }

    /// Same `N` and `α`, different `c`.
    pub fn with_c(&self, c: S) -> Result<Self> {
        Self::new(self.size, self.alpha.clone(), c)
    }

    /// All weights `w(0..=N)` by the running product
    /// `w(k+1) = w(k)·(N−k)c / ((k+1)(1−α+k))`, anchored at `w(0) = 1`.
    pub fn weights(&self) -> Vec<S> {
        let one_minus_alpha = self.int(1) - &self.alpha;
        let mut w = Vec::with_capacity(self.size + 1);
        w.push(self.int(1));
        for k in 0..self.size {
            let k_s = self.int(k as i64);
            let num = self.int((self.size - k) as i64) * &self.c;
            let den = self.int(k as i64 + 1) * (one_minus_alpha.clone() + &k_s);
            let next = w[k].clone() * num / den;
            w.push(next);
        }
        w
    }

    /// `w(k)`, with the boundary values `w(−1) = w(N+1) = 0`.
    pub fn weight_at(&self, k: i64) -> Result<S> {
        let n = self.size as i64;
        if k < -1 || k > n + 1 {
            return Err(Error::IndexOutOfRange { index: k, range: format!("-1..={}", n + 1) });
        }
        if k == -1 || k == n + 1 {
            return Ok(self.int(0));
        }
        Ok(self.weights().swap_remove(k as usize))
    }

    /// `u(x) = −1 + x(x−α) / (c(N+1−x))`, the closed form of `(w(x−1) − w(x))/w(x)`.
    pub fn potential_u(&self, x: &S) -> Result<S> {
        let gap = self.int(self.size as i64 + 1) - x;
        if gap.is_zero() {
            return Err(Error::Pole { at: x.to_string(), what: "potential u(x) at x = N+1".into() });
        }
        Ok(x.clone() * (x.clone() - &self.alpha) / (self.c.clone() * gap) - self.int(1))
    }
}

impl WeightParams<Rational> {
    /// Exact parameters from text (`"1/2"`, `"0.8"`, `"-2000"`, ...).
    pub fn parse(size: usize, alpha: &str, c: &str) -> Result<Self> {
        Self::new(size, parse_rational(alpha)?, parse_rational(c)?)
    }

    /// The same parameters rounded to `prec`-bit floats.
    pub fn to_float(&self, prec: u32) -> WeightParams<BigFloat> {
        WeightParams {
            size: self.size,
            alpha: BigFloat::from_rational(&self.alpha, prec),
            c: BigFloat::from_rational(&self.c, prec),
        }
    }
}

impl<S: Scalar> fmt::Display for WeightParams<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={}, alpha={}, c={}", self.size, self.alpha, self.c)
    }
}

/// `M(−m, b, z) = Σ_{s=0}^{m} (−m)_s z^s / ((b)_s s!)`, a finite sum.
pub fn kummer_m_terminating<S: Scalar>(m: usize, b: &S, z: &S) -> Result<S> {
    let mut term = z.int(1);
    let mut sum = term.clone();
    for s in 0..m {
        let b_s = b.clone() + z.int(s as i64);
        if b_s.is_zero() {
            return Err(Error::ZeroPochhammer { b: b.to_string(), s: s + 1 });
        }
        term = term * z.int(s as i64 - m as i64) * z / (b_s * z.int(s as i64 + 1));
        sum = sum + &term;
    }
    Ok(sum)
}

/// Laguerre polynomial `L_n^{(β)}(z) = Σ_k (−1)^k (β+k+1)_{n−k} / ((n−k)! k!) z^k`.
///
/// Summed from its explicit coefficients, independently of
/// [`kummer_m_terminating`], so the two can certify each other.
pub fn laguerre<S: Scalar>(n: usize, beta: &S, z: &S) -> S {
    let mut sum = z.int(0);
    let mut z_pow = z.int(1);
    let mut k_fact = z.int(1);
    for k in 0..=n {
        if k > 0 {
            z_pow = z_pow * z;
            k_fact = k_fact * z.int(k as i64);
        }
        let binom = pochhammer(&(beta.clone() + z.int(k as i64 + 1)), n - k)
            / S::from_bigint(&factorial((n - k) as u64), z.context());
        let term = binom * &z_pow / &k_fact;
        sum = if k % 2 == 0 { sum + term } else { sum - term };
    }
    sum
}
