//! Degeneration to the classical Krawtchouk weight `C(N,k) pᵏ(1−p)^{N−k}`.
//!
//! Sending `c, −α → ∞` with `−c/α = p/(1−p)` fixed, the coefficients tend to
//!
//! ```text
//! a_n² = n p(1−p)(N+1−n),     b_n = p(N−n) + n(1−p).
//! ```

use crate::convergence::ConvergenceReport;
use crate::dpsystem::trajectory;
use crate::error::{Error, Result};
use crate::moments::JacobiCoefficients;
use crate::numerics::{Rational, Scalar};
use crate::parallel::Execution;
use crate::weight::WeightParams;

fn check_p<S: Scalar>(p: &S) -> Result<()> {
    if !p.is_positive() || !(p.int(1) - p).is_positive() {
        return Err(Error::InvalidParameter(format!("0 < p < 1 required, got p = {p}")));
    }
    Ok(())
}

/// `(a_n², b_n)` of the classical weight, `0 ≤ n ≤ N`.
pub fn krawtchouk_exact<S: Scalar>(size: usize, p: &S, n: usize) -> Result<(S, S)> {
    check_p(p)?;
    if n > size {
        return Err(Error::IndexOutOfRange { index: n as i64, range: format!("0..={size}") });
    }
    Ok((krawtchouk_a_sq(size, p, n), krawtchouk_b(size, p, n)))
}

fn krawtchouk_a_sq<S: Scalar>(size: usize, p: &S, n: usize) -> S {
    let q = p.int(1) - p;
    p.int(n as i64) * p * q * p.int(size as i64 + 1 - n as i64)
}

fn krawtchouk_b<S: Scalar>(size: usize, p: &S, n: usize) -> S {
    let q = p.int(1) - p;
    p.clone() * p.int(size as i64 - n as i64) + p.int(n as i64) * q
}

/// All classical coefficients, `a_sq[0..=N+1]` and `b[0..=N]`.
pub fn krawtchouk_coefficients<S: Scalar>(size: usize, p: &S) -> Result<JacobiCoefficients<S>> {
    check_p(p)?;
    Ok(JacobiCoefficients {
        a_sq: (0..=size + 1).map(|n| krawtchouk_a_sq(size, p, n)).collect(),
        b: (0..=size).map(|n| krawtchouk_b(size, p, n)).collect(),
    })
}

/// `(N, α = −s, c = s p/(1−p))`.
pub fn embed(size: usize, p: &Rational, s: &Rational) -> Result<WeightParams<Rational>> {
    check_p(p)?;
    if !s.is_positive() {
        return Err(Error::InvalidParameter(format!("s > 0 required, got s = {s}")));
    }
    let one = Rational::from_integer(1.into());
    WeightParams::new(size, -s.clone(), s * p / (one - p))
}

/// Largest relative gap between two coefficient tables, over every entry that
/// is nonzero in `reference`; entries that vanish in `reference` must vanish
/// in `actual` too, or the gap is reported as infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub max_relative: Rational,
    /// `"a_sq"` or `"b"`, and the index where the maximum sits.
    pub at: (&'static str, usize),
    pub boundary_ok: bool,
}

impl Deviation {
    pub fn to_f64(&self) -> f64 {
        if self.boundary_ok {
            Scalar::to_f64(&self.max_relative)
        } else {
            f64::INFINITY
        }
    }
}

pub fn relative_deviation(
    actual: &JacobiCoefficients<Rational>,
    reference: &JacobiCoefficients<Rational>,
) -> Deviation {
    let mut best = Deviation { max_relative: Rational::from_integer(0.into()), at: ("b", 0), boundary_ok: true };
    let tables = [("a_sq", &actual.a_sq, &reference.a_sq), ("b", &actual.b, &reference.b)];
    for (name, got, want) in tables {
        for (n, (g, w)) in got.iter().zip(want).enumerate() {
            if Scalar::is_zero(w) {
                best.boundary_ok &= Scalar::is_zero(g);
                continue;
            }
            let rel = Scalar::abs(&((g - w) / w));
            if rel > best.max_relative {
                best.max_relative = rel;
                best.at = (name, n);
            }
        }
    }
    best
}

/// Deviation of the generalized coefficients at `embed(N, p, s)` from the
/// classical ones.
pub fn limit_deviation(size: usize, p: &Rational, s: &Rational) -> Result<Deviation> {
    let generalized = trajectory(&embed(size, p, s)?)?;
    Ok(relative_deviation(&generalized, &krawtchouk_coefficients(size, p)?))
}

/// Deviations along `ss`; on a doubling ladder the ratios sit near 2.
pub fn limit_ladder(
    size: usize,
    p: &Rational,
    ss: &[Rational],
    exec: Execution,
) -> Result<(Vec<Deviation>, ConvergenceReport)> {
    let devs = exec.try_map(ss, |s| limit_deviation(size, p, s))?;
    let report = ConvergenceReport::new(
        ss.iter().map(|s| 1.0 / Scalar::to_f64(s)).collect(),
        devs.iter().map(Deviation::to_f64).collect(),
    );
    Ok((devs, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::doubling_ladder;
    use crate::numerics::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let p = q("1/3");
        assert_eq!(krawtchouk_exact(80, &p, 0).unwrap(), (q("0"), q("80/3")));
        assert_eq!(krawtchouk_exact(80, &p, 1).unwrap().0, q("160/9"));
        let k = krawtchouk_coefficients(80, &p).unwrap();
        assert!(Scalar::is_zero(&k.a_sq[81]));
        k.check_invariants().unwrap();
        assert!(krawtchouk_exact(80, &p, 81).is_err());
        assert!(krawtchouk_exact(3, &q("1"), 0).is_err());
    }

    #[test]
    fn classical_matches_binomial_stieltjes() {
        // The binomial weight is the exact classical case; compare with the
        // Stieltjes procedure run on it directly.
        use crate::numerics::binomial;
        let (size, p) = (7usize, q("2/5"));
        let w: Vec<Rational> = (0..=size)
            .map(|k| {
                Rational::from_integer(binomial(size as u64, k as i64))
                    * Scalar::powu(&p, k as u32)
                    * Scalar::powu(&(q("1") - &p), (size - k) as u32)
            })
            .collect();
        let mut prev = vec![q("0"); size + 1];
        let mut cur = vec![q("1"); size + 1];
        let mut last_norm = q("1");
        for n in 0..=size {
            let norm: Rational = (0..=size).map(|k| &cur[k] * &cur[k] * &w[k]).sum();
            let mom: Rational = (0..=size).map(|k| &cur[k] * &cur[k] * &w[k] * q(&k.to_string())).sum();
            let b = &mom / &norm;
            let a_sq = if n == 0 { q("0") } else { &norm / &last_norm };
            let (ka, kb) = krawtchouk_exact(size, &p, n).unwrap();
            assert_eq!((a_sq.clone(), b.clone()), (ka, kb), "n = {n}");
            let next: Vec<Rational> =
                (0..=size).map(|k| (q(&k.to_string()) - &b) * &cur[k] - &a_sq * &prev[k]).collect();
            prev = std::mem::replace(&mut cur, next);
            last_norm = norm;
        }
    }

    #[test]
    fn embedding_keeps_the_ratio() {
        let w = embed(80, &q("1/3"), &q("2000")).unwrap();
        assert_eq!((w.alpha().clone(), w.c().clone()), (q("-2000"), q("1000")));
        for s in ["1/7", "3", "12345/2"] {
            let w = embed(10, &q("1/3"), &q(s)).unwrap();
            assert_eq!(-w.c() / w.alpha(), q("1/2"));
        }
        assert!(embed(10, &q("1/3"), &q("0")).is_err());
        assert!(embed(10, &q("3/2"), &q("1")).is_err());
    }

    #[test]
    fn deviation_decays_like_one_over_s() {
        let ss = doubling_ladder(&q("250"), 4);
        let (devs, rep) = limit_ladder(10, &q("1/2"), &ss, Execution::default()).unwrap();
        assert!(devs.iter().all(|d| d.boundary_ok));
        assert!(rep.monotone_after(0));
        assert!(rep.ratios_within(2.0, 0.3), "{:?}", rep.ratios);
    }

    #[test]
    fn deviation_flags_broken_boundary() {
        let k = krawtchouk_coefficients(3, &q("1/2")).unwrap();
        let mut bad = k.clone();
        bad.a_sq[4] = q("1/100");
        assert!(!relative_deviation(&bad, &k).boundary_ok);
        assert_eq!(relative_deviation(&k, &k).to_f64(), 0.0);
    }
}
