//! Observed order of convergence on a step ladder.

use crate::numerics::Rational;
use num_bigint::BigInt;

/// Residual magnitudes on a ladder of decreasing steps, with successive ratios
/// `|r_k| / |r_{k+1}|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl ConvergenceReport {
    pub fn new(steps: Vec<f64>, residuals: Vec<f64>) -> Self {
        let residuals: Vec<f64> = residuals.into_iter().map(f64::abs).collect();
        let ratios = residuals.windows(2).map(|w| w[0] / w[1]).collect();
        ConvergenceReport { steps, residuals, ratios }
    }

    /// `log2` of each ratio; on a halving ladder this is the observed order.
    pub fn observed_orders(&self) -> Vec<f64> {
        self.ratios.iter().map(|r| r.log2()).collect()
    }

    /// Every ratio lies within `expected · (1 ± rel_tol)`.
    pub fn ratios_within(&self, expected: f64, rel_tol: f64) -> bool {
        !self.ratios.is_empty()
            && self.ratios.iter().all(|r| r.is_finite() && (r / expected - 1.0).abs() <= rel_tol)
    }

    /// Residuals strictly decrease from index `skip` on.
    pub fn monotone_after(&self, skip: usize) -> bool {
        self.residuals.iter().skip(skip).collect::<Vec<_>>().windows(2).all(|w| w[1] < w[0])
    }

    /// Residual bound `K h²` with `K` calibrated from the coarsest level, which
    /// every finer level must respect (up to `slack`).
    pub fn within_calibrated_bound(&self, power: i32, slack: f64) -> bool {
        let Some((&h0, &r0)) = self.steps.first().zip(self.residuals.first()) else {
            return false;
        };
        let k = r0 / h0.powi(power);
        self.steps
            .iter()
            .zip(&self.residuals)
            .all(|(h, r)| *r <= slack * k * h.powi(power))
    }
}

/// `base, base/2, base/4, …` with `levels` entries.
pub fn halving_ladder(base: &Rational, levels: usize) -> Vec<Rational> {
    (0..levels)
        .map(|k| base / Rational::from_integer(BigInt::from(1u64) << k))
        .collect()
}

/// `base, 2·base, 4·base, …` with `levels` entries.
pub fn doubling_ladder(base: &Rational, levels: usize) -> Vec<Rational> {
    (0..levels)
        .map(|k| base * Rational::from_integer(BigInt::from(1u64) << k))
        .collect()
}
