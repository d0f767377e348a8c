//! Central finite-difference stencils on equispaced samples.

use super::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
}

fn middle<S>(values: &[S], radius: usize) -> Result<usize> {
    if values.len() < 2 * radius + 1 || values.len() % 2 == 0 {
        return Err(Error::InsufficientValues { need: 2 * radius + 1, got: values.len() });
    }
    Ok(values.len() / 2)
}

fn check_step<S: Scalar>(h: &S) -> Result<()> {
    if !h.is_positive() {
        return Err(Error::InvalidParameter(format!("stencil step must be positive, got {h}")));
    }
    Ok(())
}

/// Second-order central difference at the middle sample:
/// `(f₊ − f₋)/(2h)` or `(f₊ − 2f₀ + f₋)/h²`.
pub fn central_difference<S: Scalar>(values: &[S], h: &S, order: DerivOrder) -> Result<S> {
    let m = middle(values, 1)?;
    check_step(h)?;
    let (fm, f0, fp) = (&values[m - 1], &values[m], &values[m + 1]);
    Ok(match order {
        DerivOrder::First => (fp.clone() - fm) / (h.int(2) * h),
        DerivOrder::Second => (fp.clone() - f0.int(2) * f0 + fm) / (h.clone() * h),
    })
}

/// Fourth-order five-point central difference at the middle sample.
pub fn central_difference_fourth<S: Scalar>(values: &[S], h: &S, order: DerivOrder) -> Result<S> {
    let m = middle(values, 2)?;
    check_step(h)?;
    let f = |j: isize| values[(m as isize + j) as usize].clone();
    Ok(match order {
        DerivOrder::First => {
            (f(-2) - h.int(8) * f(-1) + h.int(8) * f(1) - f(2)) / (h.int(12) * h)
        }
        DerivOrder::Second => {
            (-f(-2) + h.int(16) * f(-1) - h.int(30) * f(0) + h.int(16) * f(1) - f(2))
                / (h.int(12) * h * h)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{parse_rational, BigFloat, Rational};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn exact_on_quadratics() {
        let h = q("1/7");
        let one = q("1");
        let vals: Vec<Rational> = [-1, 0, 1]
            .iter()
            .map(|&j| {
                let x = &one + &h * Rational::from_integer(j.into());
                &x * &x
            })
            .collect();
        assert_eq!(central_difference(&vals, &h, DerivOrder::First).unwrap(), q("2"));
        assert_eq!(central_difference(&vals, &h, DerivOrder::Second).unwrap(), q("2"));
    }

    #[test]
    fn cubic_shows_truncation_term() {
        // f = x^3 at {-h, 0, h}: (h^3 + h^3)/(2h) = h^2, while f'(0) = 0.
        let h = q("1/10");
        let vals = vec![-(&h * &h * &h), q("0"), &h * &h * &h];
        assert_eq!(central_difference(&vals, &h, DerivOrder::First).unwrap(), &h * &h);
    }

    #[test]
    fn rejects_short_or_bad_input() {
        let h = q("1");
        assert!(central_difference(&[q("1"), q("2")], &h, DerivOrder::First).is_err());
        assert!(central_difference_fourth(&[q("1"), q("2"), q("3")], &h, DerivOrder::First).is_err());
        assert!(central_difference(&[q("1"), q("2"), q("3")], &q("0"), DerivOrder::First).is_err());
    }

    /// exp at 1 on a halving ladder: 3-point error ratio ≈ 4, 5-point ≈ 16.
    #[test]
    fn observed_orders_on_exp() {
        let prec = 256;
        let exp_at = |x: &BigFloat| -> BigFloat {
            // Taylor series, plenty of terms for |x| <= 2 at 256 bits.
            let mut term = x.int(1);
            let mut sum = x.int(1);
            for k in 1..120 {
                term = term * x / x.int(k);
                sum = sum + &term;
            }
            sum
        };
        let one = BigFloat::from_int(1, prec);
        let e = exp_at(&one).to_f64();
        let mut errs3 = vec![];
        let mut errs5 = vec![];
        for k in 3..8 {
            let h = BigFloat::from_rational(&Rational::new(1.into(), (1i64 << k).into()), prec);
            let vals: Vec<BigFloat> =
                (-2..=2).map(|j| exp_at(&(one.clone() + h.int(j) * &h))).collect();
            let d3 = central_difference(&vals[1..4], &h, DerivOrder::First).unwrap();
            let d5 = central_difference_fourth(&vals, &h, DerivOrder::First).unwrap();
            errs3.push((d3.to_f64() - e).abs());
            errs5.push((d5.to_f64() - e).abs());
        }
        for w in errs3.windows(2) {
            let r = w[0] / w[1];
            assert!((r - 4.0).abs() < 0.2, "3-point ratio {r}");
        }
        for w in errs5.windows(2) {
            let r = w[0] / w[1];
            assert!((r - 16.0).abs() < 1.0, "5-point ratio {r}");
        }
    }
}
