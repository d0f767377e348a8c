//! Float-mode experiments on the forward iteration: sensitivity of the
//! trajectory to the initial value, and recovering `y₀` by shooting.

use serde::Serialize;

use crate::dpsystem::{initial_y, next_x, step, XYState};
use crate::error::{Error, Result};
use crate::numerics::{BigFloat, Rational, Scalar};
use crate::weight::WeightParams;

/// Forward run of the system from `(0, y₀)` in floating point, stopping at the
/// first singular step.
#[derive(Clone, Debug)]
pub struct FloatRun {
    /// `a_n²` for every index reached, starting at `n = 0`.
    pub a_sq: Vec<BigFloat>,
    /// Index and reason of a singular step, if one stopped the run.
    pub singular: Option<(usize, String)>,
}

impl FloatRun {
    /// The run reached `a_{N+1}²`.
    pub fn complete(&self, size: usize) -> bool {
        self.a_sq.len() == size + 2
    }

    /// First interior `n` (`1 ≤ n ≤ N`) with `a_n² ≤ 0`.
    pub fn first_nonpositive(&self, size: usize) -> Option<usize> {
        (1..self.a_sq.len().min(size + 1)).find(|&n| !self.a_sq[n].is_positive())
    }

    pub fn closing(&self, size: usize) -> Option<&BigFloat> {
        self.a_sq.get(size + 1)
    }
}

pub fn float_run(p: &WeightParams<BigFloat>, y0: BigFloat) -> FloatRun {
    let size = p.size();
    let mut s = XYState { n: 0, x: p.int(0), y: y0 };
    let a_sq_of = |n: usize, x: &BigFloat| p.c().clone() * (p.big_n() * x - p.int(n as i64));
    let mut a_sq = vec![a_sq_of(0, &s.x)];
    while s.n < size {
        match step(p, &s) {
            Ok(next) => {
                a_sq.push(a_sq_of(next.n, &next.x));
                s = next;
            }
            Err(e) => return FloatRun { a_sq, singular: Some((s.n + 1, e.to_string())) },
        }
    }
    match next_x(p, &s) {
        Ok(x) => a_sq.push(a_sq_of(size + 1, &x)),
        Err(e) => return FloatRun { a_sq, singular: Some((size + 1, e.to_string())) },
    }
    FloatRun { a_sq, singular: None }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileEntry {
    pub n: usize,
    pub a_sq: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbReport {
    pub delta: String,
    pub precision: u32,
    pub failed: bool,
    /// First interior index with `a_n² ≤ 0`.
    pub first_nonpositive: Option<usize>,
    pub singular_at: Option<usize>,
    /// `a_{N+1}²` in scientific notation, when the run got that far.
    pub closing: Option<String>,
    pub closing_tolerance: String,
    pub profile: Vec<ProfileEntry>,
}

/// Tolerance on `|a_{N+1}²|` for a run to count as closed.
pub fn closing_tolerance() -> Rational {
    Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), 20))
}

/// Iterates from the closed-form `y₀ + δ` at `prec` bits.
pub fn perturb(p: &WeightParams<Rational>, delta: &Rational, prec: u32) -> Result<PerturbReport> {
    let pf = p.to_float(prec);
    let y0 = initial_y(&pf)? + BigFloat::from_rational(delta, prec);
    let run = float_run(&pf, y0);
    let size = p.size();
    let tol = closing_tolerance();
    let closing_ok = run
        .closing(size)
        .is_some_and(|a| Scalar::abs(&a.to_rational()) <= tol);
    let first_nonpositive = run.first_nonpositive(size);
    Ok(PerturbReport {
        delta: delta.render(Some(6)),
        precision: prec,
        failed: first_nonpositive.is_some() || !closing_ok,
        first_nonpositive,
        singular_at: run.singular.as_ref().map(|(n, _)| *n),
        closing: run.closing(size).map(|a| a.render(Some(6))),
        closing_tolerance: "1e-20".into(),
        profile: run
            .a_sq
            .iter()
            .enumerate()
            .map(|(n, a)| ProfileEntry { n, a_sq: a.render(Some(12)) })
            .collect(),
    })
}

/// Shooting functional `y₀ ↦ a_{N+1}²`.
fn closing_value(p: &WeightParams<BigFloat>, y0: &BigFloat) -> Result<BigFloat> {
    let run = float_run(p, y0.clone());
    match (run.closing(p.size()), &run.singular) {
        (Some(a), _) => Ok(a.clone()),
        (None, Some((n, why))) => Err(Error::Singular {
            n: *n,
            reason: why.clone(),
            x: "-".into(),
            y: y0.render(Some(20)),
        }),
        (None, None) => Err(Error::Internal("float run ended early without a reason".into())),
    }
}

/// A zero of the shooting functional.
#[derive(Clone, Debug)]
pub struct ShotRoot {
    pub y0: BigFloat,
    pub closing: BigFloat,
    /// Every interior `a_n²` is positive and `|a_{N+1}²|` is within tolerance
    /// relative to the bracket values; otherwise the sign change was a pole or
    /// an inadmissible trajectory.
    pub admissible: bool,
    pub iterations: usize,
}

fn bisect(
    p: &WeightParams<BigFloat>,
    mut lo: BigFloat,
    mut hi: BigFloat,
    mut f_lo: BigFloat,
    scale: &BigFloat,
) -> Result<ShotRoot> {
    let prec = lo.precision();
    let two = lo.int(2);
    let width_goal = BigFloat::from_rational(&Rational::new(1.into(), num_bigint::BigInt::from(1u8) << (prec - 8)), prec)
        * (lo.abs() + lo.int(1));
    let mut iterations = 0;
    while (hi.clone() - &lo) > width_goal && iterations < 2 * prec as usize {
        iterations += 1;
        let mid = (lo.clone() + &hi) / &two;
        let f_mid = closing_value(p, &mid)?;
        if f_mid.is_zero() {
            lo = mid.clone();
            hi = mid;
            break;
        }
        if f_mid.sign() == f_lo.sign() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let y0 = (lo + hi) / two;
    let run = float_run(p, y0.clone());
    let closing = run.closing(p.size()).cloned().unwrap_or_else(|| y0.int(0));
    let size = p.size();
    // A pole leaves |a_{N+1}^2| large at the end of the bisection.
    let small = closing.abs() <= scale.clone() * y0.lift(&closing_tolerance());
    let admissible = run.complete(size) && run.first_nonpositive(size).is_none() && small;
    Ok(ShotRoot { y0, closing, admissible, iterations })
}

/// Bisection on `[lo, hi]`, which must straddle a sign change of `a_{N+1}²`.
pub fn shoot(p: &WeightParams<Rational>, lo: &Rational, hi: &Rational, prec: u32) -> Result<ShotRoot> {
    let pf = p.to_float(prec);
    let (lo, hi) = (BigFloat::from_rational(lo, prec), BigFloat::from_rational(hi, prec));
    let (f_lo, f_hi) = (closing_value(&pf, &lo)?, closing_value(&pf, &hi)?);
    if f_lo.sign() == f_hi.sign() || f_lo.is_zero() || f_hi.is_zero() {
        return Err(Error::NoSignChange { lo: lo.render(Some(20)), hi: hi.render(Some(20)) });
    }
    let scale = f_lo.abs().max_with(&f_hi.abs()).max_with(&lo.int(1));
    bisect(&pf, lo, hi, f_lo, &scale)
}

/// Splits `[lo, hi]` into `cells` equal pieces and bisects every sign change
/// of the shooting functional. Cells where the iteration is singular are
/// skipped. Every root is returned, admissible or not.
pub fn shoot_scan(
    p: &WeightParams<Rational>,
    lo: &Rational,
    hi: &Rational,
    cells: usize,
    prec: u32,
) -> Result<Vec<ShotRoot>> {
    if cells == 0 || lo >= hi {
        return Err(Error::InvalidParameter("scan needs lo < hi and at least one cell".into()));
    }
    let pf = p.to_float(prec);
    let width = (hi - lo) / Rational::from_integer(cells.into());
    let edges: Vec<BigFloat> = (0..=cells)
        .map(|k| BigFloat::from_rational(&(lo + &width * Rational::from_integer(k.into())), prec))
        .collect();
    let values: Vec<Option<BigFloat>> = edges.iter().map(|y| closing_value(&pf, y).ok()).collect();
    let mut roots = Vec::new();
    for k in 0..cells {
        let (Some(a), Some(b)) = (&values[k], &values[k + 1]) else { continue };
        if a.is_zero() || a.sign() == b.sign() {
            continue;
        }
        let scale = a.abs().max_with(&b.abs()).max_with(&a.int(1));
        if let Ok(root) = bisect(&pf, edges[k].clone(), edges[k + 1].clone(), a.clone(), &scale) {
            roots.push(root);
        }
    }
    Ok(roots)
}

trait MaxWith {
    fn max_with(self, other: &Self) -> Self;
}

impl MaxWith for BigFloat {
    fn max_with(self, other: &Self) -> Self {
        if &self >= other {
            self
        } else {
            other.clone()
        }
    }
}
