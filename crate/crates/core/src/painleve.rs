//! Painlevé V in `c` behind the discrete system.
//!
//! For fixed `n`, a function `y(c)` is tied to the trajectory through two
//! Bäcklund relations
//!
//! ```text
//! y_{n+1} = −(1+N+N y y_n)(N−n+(1+N−α+N y_n) y) / (N(N−n+(1+n+N y_n) y))
//! y_{n−1} = (1+c+N−α+N y_n − (1+N−α+N y_n) y) P
//!           / (N(y−1)(nc + N(1+c+N−α+N y_n − (1+N−α+N y_n) y) y_n))
//! P       = (N+1)c + N(c−n+2+2N−α+N y_n + (n−2N−2+α−N y_n) y) y_n
//! ```
//!
//! and the forward maps
//!
//! ```text
//! y_n = (N−n + y(1+n+c−α+(α−N−1)y) − c y′) / (2N(y−1)y)
//! x_n = ((cy′+n−N)² − 2(n−N)(n−N+cy′)y − A₁y⁴ + A₂y³ − A₃y²) / (4cN(y−1)y²)
//! ```
//!
//! with `A₁ = (1+N−α)²`, `A₂ = 2(1+N−α)(1+c+N−α)`, `A₃ = (1+c+n−α)(1+c−n+2N−α)`.
//! `y` solves
//!
//! ```text
//! y″ = (1/(2y) + 1/(y−1)) y′² − y′/c + (y−1)²/c² (Ay + B/y) + Cy/c + Dy(y+1)/(y−1)
//! ```
//!
//! with `A = (α−N−1)²/2`, `B = −(n−N)²/2`, `C = −(n+α)`, `D = −1/2`.
//!
//! The pipeline recovers `(y, y′)` from exact trajectory values at each point
//! of a rational `c`-grid and checks the differential equations by central
//! differences. Under `v = 4N y_n − (2α−4N+2n−3)`, `c = z²` the same data
//! satisfies the second-degree form
//!
//! ```text
//! (v″ − 6v² − α₁v − β₁)² = (v/z − 2z)² (v′² − 4v³ − α₁v² − 2β₁v − γ₁).
//! ```

use crate::convergence::ConvergenceReport;
use crate::dpsystem::{xy_trajectory, Trajectory};
use crate::error::{Error, Result};
use crate::numerics::{
    central_difference, central_difference_fourth, BigFloat, DerivOrder, Mode, Rational, Scalar,
};
use crate::parallel::Execution;
use crate::weight::WeightParams;

#[derive(Clone, Debug, PartialEq)]
pub struct P5Params<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

pub fn p5_params<S: Scalar>(n: usize, size: usize, alpha: &S) -> P5Params<S> {
    let half = alpha.int(1) / alpha.int(2);
    let shift = alpha.clone() - alpha.int(size as i64 + 1);
    let gap = alpha.int(n as i64 - size as i64);
    P5Params {
        a: shift.clone() * &shift * &half,
        b: -(gap.clone() * &gap * &half),
        c: -(alpha.int(n as i64) + alpha),
        d: -half,
    }
}

/// A point `(c, y(c), y′(c))` of a Painlevé V solution.
#[derive(Clone, Debug, PartialEq)]
pub struct P5Sample<S> {
    pub c: S,
    pub y: S,
    pub y_prime: S,
}

fn check_y<S: Scalar>(y: &S) -> Result<()> {
    if y.is_zero() || (y.clone() - y.int(1)).is_zero() {
        return Err(Error::SingularSample { y: y.render(Some(20)), reason: "y must avoid 0 and 1".into() });
    }
    Ok(())
}

fn nonzero<S: Scalar>(d: S, what: &str) -> Result<S> {
    if d.is_zero() {
        return Err(Error::Pole { at: what.to_string(), what: "vanishing denominator".into() });
    }
    Ok(d)
}

/// `y_{n+1}` from `y` and `y_n`.
pub fn backlund_next<S: Scalar>(p: &WeightParams<S>, n: usize, y: &S, y_n: &S) -> Result<S> {
    let big_n = p.big_n();
    let ny = big_n.clone() * y_n;
    let gap = p.int(p.size() as i64 - n as i64);
    let num = (p.int(p.size() as i64 + 1) + ny.clone() * y)
        * (gap.clone() + (p.int(p.size() as i64 + 1) - p.alpha() + &ny) * y);
    let den = nonzero(big_n * (gap + (p.int(n as i64 + 1) + ny) * y), "y_(n+1) relation")?;
    Ok(-num / den)
}

/// `y_{n−1}` from `y` and `y_n`.
pub fn backlund_prev<S: Scalar>(p: &WeightParams<S>, n: usize, y: &S, y_n: &S) -> Result<S> {
    let big_n = p.big_n();
    let c = p.c();
    let (size, alpha) = (p.size() as i64, p.alpha());
    let ny = big_n.clone() * y_n;
    let k = p.int(size + 1) - alpha + &ny;
    let lead = k.clone() + c - k * y;
    let inner = c.clone() - p.int(n as i64) + p.int(2 + 2 * size) - alpha + &ny
        + (p.int(n as i64 - 2 * size - 2) + alpha - &ny) * y;
    let big_p = p.int(size + 1) * c + big_n.clone() * inner * y_n;
    let den = big_n.clone()
        * (y.clone() - p.int(1))
        * (p.int(n as i64) * c + big_n * lead.clone() * y_n);
    Ok(lead * big_p / nonzero(den, "y_(n-1) relation")?)
}

/// A root of the `y_{n+1}` relation with the residuals of both relations.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCandidate<S> {
    pub y: S,
    pub next_residual: S,
    pub prev_residual: S,
}

/// Every real root of the `y_{n+1}` relation read as a quadratic in `y`, with
/// the `y_{n−1}` cross-check residual of each. Roots at a pole of either
/// relation are skipped.
pub fn backlund_roots<S: Scalar>(
    p: &WeightParams<S>,
    n: usize,
    y_n: &S,
    y_np1: &S,
    y_nm1: &S,
) -> Result<Vec<RootCandidate<S>>> {
    if n == 0 || n >= p.size() {
        return Err(Error::IndexOutOfRange { index: n as i64, range: format!("1..={}", p.size().saturating_sub(1)) });
    }
    let big_n = p.big_n();
    let np1 = p.int(p.size() as i64 + 1);
    let gap = p.int(p.size() as i64 - n as i64);
    let ny = big_n.clone() * y_n;
    let nq = big_n * y_np1;
    let k = np1.clone() - p.alpha() + &ny;
    let a2 = ny.clone() * &k;
    let a1 = np1.clone() * &k + ny.clone() * &gap + nq.clone() * (p.int(n as i64 + 1) + &ny);
    let a0 = np1 * &gap + nq * &gap;

    let roots: Vec<S> = if a2.is_zero() {
        if a1.is_zero() {
            return Err(Error::RootRecovery("the y_(n+1) relation does not involve y".into()));
        }
        vec![-a0 / a1]
    } else {
        let disc = a1.clone() * &a1 - p.int(4) * &a2 * &a0;
        if disc.is_negative() {
            return Err(Error::RootRecovery(format!("no real root (discriminant {})", disc.render(Some(12)))));
        }
        let root = disc.sqrt().ok_or_else(|| {
            Error::RootRecovery("irrational roots cannot be represented exactly; use float mode".into())
        })?;
        if root.is_zero() {
            vec![-a1 / (p.int(2) * a2)]
        } else {
            // q = −(a1 + sign(a1)√disc)/2 avoids cancellation.
            let signed = if a1.is_negative() { -root } else { root };
            let q = -(a1 + signed) / p.int(2);
            vec![q.clone() / &a2, a0 / q]
        }
    };

    let mut out = Vec::with_capacity(roots.len());
    for y in roots {
        let (Ok(next), Ok(prev)) = (backlund_next(p, n, &y, y_n), backlund_prev(p, n, &y, y_n)) else {
            continue;
        };
        out.push(RootCandidate {
            next_residual: (next - y_np1).abs(),
            prev_residual: (prev - y_nm1).abs(),
            y,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveredY<S> {
    pub y: S,
    /// `|y_{n−1}(y) − y_{n−1}|` for the selected root.
    pub cross_check: S,
    /// Both roots passed the cross-check; the one with the smaller residual
    /// was kept.
    pub ambiguous: bool,
}

/// Cross-check tolerance: zero in exact mode, `2^(−P/2)` relative in float.
fn tolerance<S: Scalar>(scale: &S) -> S {
    match scale.mode() {
        Mode::Exact => scale.int(0),
        Mode::Float(bits) => {
            let eps = Rational::new(1.into(), num_bigint::BigInt::from(1u8) << (bits / 2));
            scale.lift(&eps) * (scale.abs() + scale.int(1))
        }
    }
}

/// Recovers `y` from three consecutive trajectory values `y_{n−1}, y_n, y_{n+1}`.
pub fn recover_y<S: Scalar>(
    p: &WeightParams<S>,
    n: usize,
    y_n: &S,
    y_np1: &S,
    y_nm1: &S,
) -> Result<RecoveredY<S>> {
    let mut cands = backlund_roots(p, n, y_n, y_np1, y_nm1)?;
    let tol = tolerance(y_nm1);
    let passing = cands.iter().filter(|r| r.prev_residual <= tol).count();
    cands.sort_by(|a, b| a.prev_residual.partial_cmp(&b.prev_residual).expect("residuals are ordered"));
    let best = cands
        .into_iter()
        .next()
        .ok_or_else(|| Error::RootRecovery("every root sits on a pole of the relations".into()))?;
    if passing == 0 {
        return Err(Error::RootRecovery(format!(
            "no root passes the y_(n-1) cross-check (best residual {})",
            best.prev_residual.render(Some(6))
        )));
    }
    Ok(RecoveredY { y: best.y, cross_check: best.prev_residual, ambiguous: passing > 1 })
}

fn quadratic_part<S: Scalar>(p: &WeightParams<S>, n: usize, y: &S) -> S {
    let inner = p.int(n as i64 + 1) + p.c() - p.alpha()
        + (p.alpha().clone() - p.int(p.size() as i64 + 1)) * y;
    p.int(p.size() as i64 - n as i64) + y.clone() * inner
}

/// `y′` from `y` and `y_n` (the `y_n` forward map solved for `y′`).
pub fn recover_y_prime<S: Scalar>(p: &WeightParams<S>, n: usize, y: &S, y_n: &S) -> Result<S> {
    check_y(y)?;
    let twice = p.int(2) * p.big_n() * (y.clone() - p.int(1)) * y * y_n;
    Ok((quadratic_part(p, n, y) - twice) / p.c())
}

pub fn forward_y_n<S: Scalar>(p: &WeightParams<S>, n: usize, s: &P5Sample<S>) -> Result<S> {
    check_y(&s.y)?;
    let den = p.int(2) * p.big_n() * (s.y.clone() - p.int(1)) * &s.y;
    Ok((quadratic_part(p, n, &s.y) - p.c().clone() * &s.y_prime) / den)
}

pub fn forward_x_n<S: Scalar>(p: &WeightParams<S>, n: usize, s: &P5Sample<S>) -> Result<S> {
    check_y(&s.y)?;
    let (c, y) = (p.c(), &s.y);
    let shifted = p.int(p.size() as i64 + 1) - p.alpha();
    let a1 = shifted.clone() * &shifted;
    let a2 = p.int(2) * &shifted * (shifted.clone() + c);
    let n_s = p.int(n as i64);
    let a3 = (p.int(1) + c + &n_s - p.alpha())
        * (p.int(1) + c - &n_s + p.int(2 * p.size() as i64) - p.alpha());
    let d = p.int(n as i64 - p.size() as i64);
    let cyp = c.clone() * &s.y_prime;
    let y2 = y.clone() * y;
    let lead = cyp.clone() + &d;
    let num = lead.clone() * &lead - p.int(2) * &d * (d.clone() + &cyp) * y
        - a1 * &y2 * &y2
        + a2 * &y2 * y
        - a3 * &y2;
    let den = p.int(4) * c * p.big_n() * (y.clone() - p.int(1)) * y2;
    Ok(num / den)
}

/// `y_n′ = x_n + y_n + y_n(N+1+N y_n)(N+1−α+N y_n) / (cN(x_n+y_n))`.
pub fn toda_y_prime<S: Scalar>(p: &WeightParams<S>, x_n: &S, y_n: &S) -> Result<S> {
    let sum = nonzero(x_n.clone() + y_n, "x_n + y_n")?;
    let ny = p.big_n() * y_n;
    let np1 = p.int(p.size() as i64 + 1);
    let frac = y_n.clone() * (np1.clone() + &ny) * (np1 - p.alpha() + &ny) / (p.c().clone() * p.big_n() * &sum);
    Ok(sum + frac)
}

/// Right-hand side of the Painlevé V equation at one sample.
pub fn p5_rhs<S: Scalar>(q: &P5Params<S>, s: &P5Sample<S>) -> Result<S> {
    check_y(&s.y)?;
    let (c, y, yp) = (&s.c, &s.y, &s.y_prime);
    let one = y.int(1);
    let ym1 = y.clone() - &one;
    let coef = one.clone() / (y.int(2) * y) + one.clone() / &ym1;
    Ok(coef * yp * yp - yp.clone() / c
        + ym1.clone() * &ym1 / (c.clone() * c) * (q.a.clone() * y + q.b.clone() / y)
        + q.c.clone() * y / c
        + q.d.clone() * y * (y.clone() + &one) / ym1)
}

/// `y″ − RHS` at the middle sample, with `y″` estimated by differencing the
/// `y′` values (`from_first`) or the `y` values (`from_second`).
#[derive(Clone, Debug, PartialEq)]
pub struct P5Residual<S> {
    pub from_first: S,
    pub from_second: S,
}

/// Samples must be equispaced in `c` (odd count, at least three); the step is
/// read off the middle pair.
pub fn p5_residual<S: Scalar>(q: &P5Params<S>, samples: &[P5Sample<S>]) -> Result<P5Residual<S>> {
    if samples.len() < 3 || samples.len() % 2 == 0 {
        return Err(Error::InsufficientValues { need: 3, got: samples.len() });
    }
    let m = samples.len() / 2;
    let window = &samples[m - 1..=m + 1];
    let h = window[2].c.clone() - &window[1].c;
    let ys: Vec<S> = window.iter().map(|s| s.y.clone()).collect();
    let yps: Vec<S> = window.iter().map(|s| s.y_prime.clone()).collect();
    let rhs = p5_rhs(q, &window[1])?;
    Ok(P5Residual {
        from_first: central_difference(&yps, &h, DerivOrder::First)? - &rhs,
        from_second: central_difference(&ys, &h, DerivOrder::Second)? - rhs,
    })
}

/// `(α₁, β₁, γ₁)` of the second-degree form.
pub fn cosgrove_coefficients<S: Scalar>(n: usize, size: usize, alpha: &S) -> (S, S, S) {
    let (n, big_n) = (n as i64, size as i64);
    let two_a = alpha.int(2) * alpha;
    let a1 = alpha.int(4) * (two_a.clone() + alpha.int(6 * n - 4 * big_n - 1));
    let b1 = alpha.int(2 * (2 * n + 1) * (6 * n - 8 * big_n - 5))
        + alpha.int(8 * (2 * n + 1)) * alpha
        - alpha.int(8) * alpha * alpha;
    let g1 = alpha.int(4)
        * (two_a + alpha.int(2 * n - 4 * big_n - 3))
        * (alpha.int(4 * n * n + 4 * n + 1) - alpha.int(4) * alpha * alpha);
    (a1, b1, g1)
}

fn cosgrove_eval<S: Scalar>(
    n: usize,
    size: usize,
    alpha: &S,
    values: &[S],
    z0: &S,
    hz: &S,
    radius: i64,
    diff: fn(&[S], &S, DerivOrder) -> Result<S>,
) -> Result<S> {
    if !(z0.clone() - hz.int(radius) * hz).is_positive() {
        return Err(Error::InvalidParameter(format!("z-grid around {z0} crosses z = 0")));
    }
    let shift = alpha.int(2) * alpha + alpha.int(2 * n as i64 - 4 * size as i64 - 3);
    let four_n = alpha.int(4 * size as i64);
    let v: Vec<S> = values.iter().map(|y| four_n.clone() * y - &shift).collect();
    let vp = diff(&v, hz, DerivOrder::First)?;
    let vpp = diff(&v, hz, DerivOrder::Second)?;
    let vm = v[v.len() / 2].clone();
    let (a1, b1, g1) = cosgrove_coefficients(n, size, alpha);
    let v2 = vm.clone() * &vm;
    let left = vpp - alpha.int(6) * &v2 - a1.clone() * &vm - &b1;
    let factor = vm.clone() / z0 - alpha.int(2) * z0;
    let right = vp.clone() * &vp - alpha.int(4) * &v2 * &vm - a1 * &v2 - alpha.int(2) * b1 * &vm - g1;
    Ok(left.clone() * left - factor.clone() * factor * right)
}

/// Residual of the second-degree form at `z0` from `y_n` values at
/// `z0 + j·hz` (odd count; the central three are used).
pub fn cosgrove_residual<S: Scalar>(
    n: usize,
    size: usize,
    alpha: &S,
    values: &[S],
    z0: &S,
    hz: &S,
) -> Result<S> {
    if values.len() < 3 || values.len() % 2 == 0 {
        return Err(Error::InsufficientValues { need: 3, got: values.len() });
    }
    let m = values.len() / 2;
    cosgrove_eval(n, size, alpha, &values[m - 1..=m + 1], z0, hz, 1, central_difference)
}

/// Same with five-point stencils (five values).
pub fn cosgrove_residual_fourth<S: Scalar>(
    n: usize,
    size: usize,
    alpha: &S,
    values: &[S],
    z0: &S,
    hz: &S,
) -> Result<S> {
    cosgrove_eval(n, size, alpha, values, z0, hz, 2, central_difference_fourth)
}

/// Perturbation of one trajectory value, applied before any recovery.
#[derive(Clone, Debug, PartialEq)]
pub struct Tamper {
    pub index: usize,
    pub delta: Rational,
}

/// Everything the pipeline derives at one point of the `c`-grid.
#[derive(Clone, Debug)]
pub struct PipelinePoint {
    pub c: Rational,
    pub sample: P5Sample<BigFloat>,
    pub recovered: RecoveredY<BigFloat>,
    pub x_n: BigFloat,
    pub y_n: BigFloat,
    pub x_n_forward: BigFloat,
    pub y_n_forward: BigFloat,
    /// `y_n′` from the Toda relation.
    pub y_n_prime: BigFloat,
}

impl PipelinePoint {
    /// `|x_n(y, y′) − x_n|`.
    pub fn x_error(&self) -> f64 {
        (self.x_n_forward.clone() - &self.x_n).abs().to_f64()
    }

    /// `|y_n(y, y′) − y_n|`.
    pub fn y_error(&self) -> f64 {
        (self.y_n_forward.clone() - &self.y_n).abs().to_f64()
    }
}

/// Runs recovery and the forward maps on a given exact trajectory.
pub fn pipeline_from_trajectory(
    p: &WeightParams<Rational>,
    t: &Trajectory<Rational>,
    n: usize,
    prec: u32,
) -> Result<PipelinePoint> {
    let pf = p.to_float(prec);
    let f = |q: &Rational| BigFloat::from_rational(q, prec);
    let (x_n, y_n) = (f(&t.x[n]), f(&t.y[n]));
    let recovered = recover_y(&pf, n, &y_n, &f(&t.y[n + 1]), &f(&t.y[n - 1]))?;
    let y_prime = recover_y_prime(&pf, n, &recovered.y, &y_n)?;
    let sample = P5Sample { c: pf.c().clone(), y: recovered.y.clone(), y_prime };
    Ok(PipelinePoint {
        c: p.c().clone(),
        x_n_forward: forward_x_n(&pf, n, &sample)?,
        y_n_forward: forward_y_n(&pf, n, &sample)?,
        y_n_prime: toda_y_prime(&pf, &x_n, &y_n)?,
        sample,
        recovered,
        x_n,
        y_n,
    })
}

/// Exact trajectory at `p`, optionally tampered, then [`pipeline_from_trajectory`].
pub fn pipeline_point(
    p: &WeightParams<Rational>,
    n: usize,
    prec: u32,
    tamper: Option<&Tamper>,
) -> Result<PipelinePoint> {
    let mut t = xy_trajectory(p)?;
    if let Some(tp) = tamper {
        let slot = t.y.get_mut(tp.index).ok_or(Error::IndexOutOfRange {
            index: tp.index as i64,
            range: format!("0..={}", p.size()),
        })?;
        *slot += &tp.delta;
    }
    pipeline_from_trajectory(p, &t, n, prec)
}

/// `y` within `1e-6` of 0 or 1.
pub fn near_singular(y: &BigFloat) -> bool {
    let v = y.to_f64();
    v.abs() < 1e-6 || (v - 1.0).abs() < 1e-6 * v.abs().max(1.0)
}

/// The grid centre actually used: `c` itself, or `c` nudged by `c/64` steps
/// when `y(c)` lies too close to 0 or 1.
pub fn p5_center(p: &WeightParams<Rational>, n: usize, prec: u32) -> Result<Rational> {
    let step = p.c() / Rational::from_integer(64.into());
    for k in 0..8i64 {
        let c = p.c() + &step * Rational::from_integer(k.into());
        let pt = pipeline_point(&p.with_c(c.clone())?, n, prec, None)?;
        if !near_singular(&pt.sample.y) {
            return Ok(c);
        }
    }
    Err(Error::SingularSample { y: "near 0 or 1".into(), reason: format!("no clear grid centre near c = {}", p.c()) })
}

#[derive(Clone, Debug)]
pub struct P5Level {
    pub h: Rational,
    pub points: Vec<PipelinePoint>,
    pub residual: P5Residual<BigFloat>,
}

#[derive(Clone, Debug)]
pub struct P5Ladder {
    pub center: Rational,
    pub levels: Vec<P5Level>,
    pub from_first: ConvergenceReport,
    pub from_second: ConvergenceReport,
}

/// P5 residuals on `c ± h` for every `h` in `hs`. The tamper, if any, is
/// applied to the middle point of every level only.
pub fn p5_ladder(
    p: &WeightParams<Rational>,
    n: usize,
    hs: &[Rational],
    prec: u32,
    tamper: Option<&Tamper>,
    exec: Execution,
) -> Result<P5Ladder> {
    let center = p5_center(p, n, prec)?;
    let mut jobs = Vec::with_capacity(3 * hs.len());
    for h in hs {
        if &center - h <= Rational::from_integer(0.into()) {
            return Err(Error::InvalidParameter(format!("grid step {h} reaches c <= 0")));
        }
        for j in -1i64..=1 {
            jobs.push((&center + h * Rational::from_integer(j.into()), j == 0));
        }
    }
    let points = exec.try_map(&jobs, |(c, mid)| {
        pipeline_point(&p.with_c(c.clone())?, n, prec, if *mid { tamper } else { None })
    })?;
    let q = p5_params(n, p.size(), &BigFloat::from_rational(p.alpha(), prec));
    let mut levels = Vec::with_capacity(hs.len());
    for (h, chunk) in hs.iter().zip(points.chunks(3)) {
        let samples: Vec<_> = chunk.iter().map(|pt| pt.sample.clone()).collect();
        let residual = p5_residual(&q, &samples)?;
        levels.push(P5Level { h: h.clone(), points: chunk.to_vec(), residual });
    }
    let steps: Vec<f64> = hs.iter().map(Scalar::to_f64).collect();
    let from_first =
        ConvergenceReport::new(steps.clone(), levels.iter().map(|l| l.residual.from_first.to_f64()).collect());
    let from_second =
        ConvergenceReport::new(steps, levels.iter().map(|l| l.residual.from_second.to_f64()).collect());
    Ok(P5Ladder { center, levels, from_first, from_second })
}

/// Rational grid centre for the `z`-form: `√c` when it is rational, else two
/// Newton steps from the nearest integer (at least 1), e.g. `17/12` for `c = 2`.
pub fn default_z0(c: &Rational) -> Rational {
    if let Some(r) = Scalar::sqrt(c) {
        return r;
    }
    let guess = Scalar::to_f64(c).sqrt().round().max(1.0) as i64;
    let mut z = Rational::from_integer(guess.into());
    let two = Rational::from_integer(2.into());
    for _ in 0..2 {
        z = (&z + c / &z) / &two;
    }
    z
}

/// Cosgrove residuals on `z0 ± hz` for every `hz` in `hzs`, computed exactly
/// and rounded once. The tamper hits the middle point of every level.
pub fn cosgrove_ladder(
    p: &WeightParams<Rational>,
    n: usize,
    z0: &Rational,
    hzs: &[Rational],
    tamper: Option<&Tamper>,
    exec: Execution,
) -> Result<(Vec<Rational>, ConvergenceReport)> {
    if n > p.size() {
        return Err(Error::IndexOutOfRange { index: n as i64, range: format!("0..={}", p.size()) });
    }
    let mut jobs = Vec::with_capacity(3 * hzs.len());
    for hz in hzs {
        for j in -1i64..=1 {
            jobs.push((z0 + hz * Rational::from_integer(j.into()), j == 0));
        }
    }
    let zero = Rational::from_integer(0.into());
    if jobs.iter().any(|(z, _)| *z <= zero) {
        return Err(Error::InvalidParameter(format!("z-grid around {z0} crosses z = 0")));
    }
    let values = exec.try_map(&jobs, |(z, mid)| -> Result<Rational> {
        let t = xy_trajectory(&p.with_c(z * z)?)?;
        let mut y = t.y[n].clone();
        if let Some(tp) = tamper.filter(|tp| *mid && tp.index == n) {
            y += &tp.delta;
        }
        Ok(y)
    })?;
    let res = hzs
        .iter()
        .zip(values.chunks(3))
        .map(|(hz, vals)| cosgrove_residual(n, p.size(), p.alpha(), vals, z0, hz))
        .collect::<Result<Vec<_>>>()?;
    let report = ConvergenceReport::new(
        hzs.iter().map(Scalar::to_f64).collect(),
        res.iter().map(Scalar::to_f64).collect(),
    );
    Ok((res, report))
}
