//! The Toda flow in `c`:
//!
//! ```text
//! d(a_n²)/dc = (a_n²/c)(b_n − b_{n−1}),     d(b_n)/dc = (a_{n+1}² − a_n²)/c,
//! ```
//!
//! checked by evaluating the coefficients on a `c`-grid and differencing.
//! With exact parameters the grid values are exact and the residual carries
//! only stencil truncation error.

use crate::convergence::ConvergenceReport;
use crate::error::{Error, Result};
use crate::moments::{stieltjes, JacobiCoefficients};
use crate::numerics::{central_difference, central_difference_fourth, DerivOrder, Scalar};
use crate::parallel::Execution;
use crate::weight::WeightParams;

#[derive(Clone, Debug, PartialEq)]
pub struct TodaResidual<S> {
    pub a_sq: S,
    pub b: S,
}

impl<S: Scalar> TodaResidual<S> {
    /// The larger of the two component magnitudes.
    pub fn magnitude(&self) -> f64 {
        self.a_sq.to_f64().abs().max(self.b.to_f64().abs())
    }
}

fn grid<S: Scalar>(
    p: &WeightParams<S>,
    n: usize,
    h: &S,
    radius: i64,
    exec: Execution,
) -> Result<Vec<JacobiCoefficients<S>>> {
    if n == 0 || n > p.size() {
        return Err(Error::IndexOutOfRange { index: n as i64, range: format!("1..={}", p.size()) });
    }
    if !h.is_positive() {
        return Err(Error::InvalidParameter(format!("grid step must be positive, got {h}")));
    }
    let lowest = p.c().clone() - h.int(radius) * h;
    if !lowest.is_positive() {
        return Err(Error::InvalidParameter(format!("grid reaches c = {lowest} <= 0")));
    }
    let cs: Vec<S> = (-radius..=radius).map(|j| p.c().clone() + h.int(j) * h).collect();
    exec.try_map(&cs, |c| stieltjes(&p.with_c(c.clone())?))
}

fn residual<S: Scalar>(
    p: &WeightParams<S>,
    n: usize,
    h: &S,
    coeffs: &[JacobiCoefficients<S>],
    diff: fn(&[S], &S, DerivOrder) -> Result<S>,
) -> Result<TodaResidual<S>> {
    let mid = &coeffs[coeffs.len() / 2];
    let a_vals: Vec<S> = coeffs.iter().map(|j| j.a_sq[n].clone()).collect();
    let b_vals: Vec<S> = coeffs.iter().map(|j| j.b[n].clone()).collect();
    let da = diff(&a_vals, h, DerivOrder::First)?;
    let db = diff(&b_vals, h, DerivOrder::First)?;
    let c = p.c();
    let rhs_a = mid.a_sq[n].clone() / c * (mid.b[n].clone() - &mid.b[n - 1]);
    let rhs_b = (mid.a_sq[n + 1].clone() - &mid.a_sq[n]) / c;
    Ok(TodaResidual { a_sq: da - rhs_a, b: db - rhs_b })
}

/// Three-point residual at `c` with step `h`; `O(h²)`. Requires `1 ≤ n ≤ N`,
/// `h > 0` and `c − h > 0`.
pub fn toda_residual<S: Scalar>(p: &WeightParams<S>, n: usize, h: &S) -> Result<TodaResidual<S>> {
    toda_residual_with(p, n, h, Execution::default())
}

pub fn toda_residual_with<S: Scalar>(
    p: &WeightParams<S>,
    n: usize,
    h: &S,
    exec: Execution,
) -> Result<TodaResidual<S>> {
    let coeffs = grid(p, n, h, 1, exec)?;
    residual(p, n, h, &coeffs, central_difference)
}

/// Five-point residual; `O(h⁴)`. Requires `c − 2h > 0`.
pub fn toda_residual_fourth<S: Scalar>(
    p: &WeightParams<S>,
    n: usize,
    h: &S,
    exec: Execution,
) -> Result<TodaResidual<S>> {
    let coeffs = grid(p, n, h, 2, exec)?;
    residual(p, n, h, &coeffs, central_difference_fourth)
}

/// Three-point residuals along a step ladder, with a convergence report per
/// component.
#[derive(Clone, Debug)]
pub struct TodaLadder<S> {
    pub residuals: Vec<TodaResidual<S>>,
    pub a_sq: ConvergenceReport,
    pub b: ConvergenceReport,
}

impl<S> TodaLadder<S> {
    pub fn ratios_within(&self, expected: f64, rel_tol: f64) -> bool {
        self.a_sq.ratios_within(expected, rel_tol) && self.b.ratios_within(expected, rel_tol)
    }
}

/// Levels are evaluated with `exec`.
pub fn toda_ladder<S: Scalar>(
    p: &WeightParams<S>,
    n: usize,
    hs: &[S],
    exec: Execution,
) -> Result<TodaLadder<S>> {
    let residuals = exec.try_map(hs, |h| toda_residual_with(p, n, h, Execution::Sequential))?;
    let steps: Vec<f64> = hs.iter().map(Scalar::to_f64).collect();
    let a_sq = ConvergenceReport::new(steps.clone(), residuals.iter().map(|r| r.a_sq.to_f64()).collect());
    let b = ConvergenceReport::new(steps, residuals.iter().map(|r| r.b.to_f64()).collect());
    Ok(TodaLadder { residuals, a_sq, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::halving_ladder;
    use crate::numerics::{parse_rational, Rational};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn p(n: usize, a: &str, c: &str) -> WeightParams<Rational> {
        WeightParams::parse(n, a, c).unwrap()
    }

    #[test]
    fn order_two_on_small_lattice() {
        let w = p(4, "1/2", "1");
        let coarse = toda_residual(&w, 2, &q("1/64")).unwrap();
        let fine = toda_residual(&w, 2, &q("1/128")).unwrap();
        for (a, b) in [(coarse.a_sq, fine.a_sq), (coarse.b, fine.b)] {
            let r = a.to_f64() / b.to_f64();
            assert!((r - 4.0).abs() < 0.8, "ratio {r}");
        }
    }

    #[test]
    fn top_index_uses_vanishing_boundary() {
        let w = p(1, "0", "3/2");
        let hs = halving_ladder(&q("1/8"), 4);
        let lad = toda_ladder(&w, 1, &hs, Execution::Sequential).unwrap();
        assert!(lad.ratios_within(4.0, 0.2), "{:?} {:?}", lad.a_sq.ratios, lad.b.ratios);
    }

    #[test]
    fn residuals_decrease_along_ladder() {
        let w = p(6, "-1", "2");
        let hs = halving_ladder(&q("1/4"), 6);
        let lad = toda_ladder(&w, 3, &hs, Execution::default()).unwrap();
        assert!(lad.a_sq.monotone_after(1) && lad.b.monotone_after(1));
    }

    #[test]
    fn fourth_order_stencil_isolates_truncation() {
        let w = p(5, "1/2", "1");
        let exec = Execution::default();
        let r4: Vec<f64> = ["1/16", "1/32"]
            .iter()
            .map(|h| toda_residual_fourth(&w, 2, &q(h), exec).unwrap().magnitude())
            .collect();
        let ratio = r4[0] / r4[1];
        assert!((ratio - 16.0).abs() < 3.2, "ratio {ratio}");
        let r2 = toda_residual(&w, 2, &q("1/32")).unwrap().magnitude();
        assert!(r4[1] < r2 / 100.0);
    }

    #[test]
    fn rejects_bad_grids() {
        let w = p(4, "0", "1");
        assert!(toda_residual(&w, 0, &q("1/8")).is_err());
        assert!(toda_residual(&w, 5, &q("1/8")).is_err());
        assert!(toda_residual(&w, 2, &q("1")).is_err());
        assert!(toda_residual(&w, 2, &q("-1/8")).is_err());
    }

    #[test]
    fn wrong_flow_is_detected() {
        // Swapping the sign of the b-equation leaves an O(1) residual.
        let w = p(4, "1/2", "1");
        let h = q("1/256");
        let coeffs = grid(&w, 2, &h, 1, Execution::Sequential).unwrap();
        let r = residual(&w, 2, &h, &coeffs, central_difference).unwrap();
        let mid = &coeffs[1];
        let flipped = r.b.clone() + (mid.a_sq[3].clone() - &mid.a_sq[2]) * q("2");
        assert!(flipped.to_f64().abs() > 1e-2);
        assert!(r.b.to_f64().abs() < 1e-3);
    }
}
