//! The coupled discrete system for
//!
//! ```text
//! x_n = (a_n²/c + n)/N,      y_n = −(b_n + N + 1 + c − n − α)/N,
//! ```
//!
//! ```text
//! (x_n + y_n)(x_{n+1} + y_n) = −y_n(N+1+N y_n)(N+1−α+N y_n) / (cN)
//! (x_n + y_n)(x_n + y_{n−1}) = x_n(−N−1+N x_n)(α−N−1+N x_n) / (N(N x_n − n))
//! ```
//!
//! iterated forward from `x₀ = 0` and the closed-form `y₀`. Each step solves
//! the first equation for `x_{n+1}` and the second, at index `n+1`, for
//! `y_{n+1}`; both solves are linear.
//!
//! The forward iteration is violently unstable in floating point (a relative
//! perturbation of `y₀` is amplified by many orders of magnitude over `N`
//! steps), so the default is exact arithmetic.

use crate::error::{Error, Result};
use crate::moments::JacobiCoefficients;
use crate::numerics::Scalar;
use crate::weight::{kummer_m_terminating, WeightParams};

#[derive(Clone, Debug, PartialEq)]
pub struct XYState<S> {
    pub n: usize,
    pub x: S,
    pub y: S,
}

/// `x_n` for `n = 0..=N+1` and `y_n` for `n = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
}

impl<S: Scalar> Trajectory<S> {
    pub fn state(&self, n: usize) -> XYState<S> {
        XYState { n, x: self.x[n].clone(), y: self.y[n].clone() }
    }

    /// Inverts the definitions: `a_n² = c(N x_n − n)`, `b_n = −N y_n − (N+1+c−n−α)`.
    pub fn coefficients(&self, p: &WeightParams<S>) -> JacobiCoefficients<S> {
        let big_n = p.big_n();
        let a_sq = self
            .x
            .iter()
            .enumerate()
            .map(|(n, x)| p.c().clone() * (big_n.clone() * x - p.int(n as i64)))
            .collect();
        let b = self
            .y
            .iter()
            .enumerate()
            .map(|(n, y)| {
                -(big_n.clone() * y) - (p.int(p.size() as i64 + 1 - n as i64) + p.c() - p.alpha())
            })
            .collect();
        JacobiCoefficients { a_sq, b }
    }

    /// The `(x_n, y_n)` belonging to known coefficients.
    pub fn from_coefficients(p: &WeightParams<S>, j: &JacobiCoefficients<S>) -> Self {
        let big_n = p.big_n();
        let x = j
            .a_sq
            .iter()
            .enumerate()
            .map(|(n, a)| (a.clone() / p.c() + p.int(n as i64)) / &big_n)
            .collect();
        let y = j
            .b
            .iter()
            .enumerate()
            .map(|(n, b)| {
                -(b.clone() + p.int(p.size() as i64 + 1 - n as i64) + p.c() - p.alpha()) / &big_n
            })
            .collect();
        Trajectory { x, y }
    }
}

fn singular<S: Scalar>(n: usize, reason: &str, x: &S, y: &S) -> Error {
    Error::Singular { n, reason: reason.to_string(), x: x.render(Some(20)), y: y.render(Some(20)) }
}

/// `y₀ = −(N+1+c−α)/N − c/(1−α) · M(−N+1, 2−α, −c) / M(−N, 1−α, −c)`.
pub fn initial_y<S: Scalar>(p: &WeightParams<S>) -> Result<S> {
    let n = p.size();
    let big_n = p.big_n();
    let one_minus_alpha = p.int(1) - p.alpha();
    let minus_c = -p.c().clone();
    let upper = kummer_m_terminating(n - 1, &(p.int(2) - p.alpha()), &minus_c)?;
    let lower = kummer_m_terminating(n, &one_minus_alpha, &minus_c)?;
    let head = (p.int(n as i64 + 1) + p.c() - p.alpha()) / big_n;
    Ok(-head - p.c().clone() / one_minus_alpha * upper / lower)
}

pub fn initial_state<S: Scalar>(p: &WeightParams<S>) -> Result<XYState<S>> {
    Ok(XYState { n: 0, x: p.int(0), y: initial_y(p)? })
}

/// `x_{n+1}` from the first equation; valid for `n ≤ N` (at `n = N` this is the
/// closing value with `N x_{N+1} = N+1`).
pub fn next_x<S: Scalar>(p: &WeightParams<S>, s: &XYState<S>) -> Result<S> {
    if s.n > p.size() {
        return Err(Error::IndexOutOfRange { index: s.n as i64, range: format!("0..={}", p.size()) });
    }
    let sum = s.x.clone() + &s.y;
    if sum.is_zero() {
        return Err(singular(s.n, "x_n + y_n = 0", &s.x, &s.y));
    }
    let big_n = p.big_n();
    let ny = big_n.clone() * &s.y;
    let f1 = p.int(p.size() as i64 + 1) + &ny;
    let f2 = p.int(p.size() as i64 + 1) - p.alpha() + &ny;
    Ok(-(s.y.clone() * f1 * f2) / (p.c().clone() * big_n * sum) - &s.y)
}

/// One full step `(x_n, y_n) → (x_{n+1}, y_{n+1})`, for `n < N`.
pub fn step<S: Scalar>(p: &WeightParams<S>, s: &XYState<S>) -> Result<XYState<S>> {
    if s.n >= p.size() {
        return Err(Error::IndexOutOfRange {
            index: s.n as i64,
            range: format!("0..{} (use next_x for the closing x_(N+1))", p.size()),
        });
    }
    let x1 = next_x(p, s)?;
    let m = s.n + 1;
    let big_n = p.big_n();
    let nx = big_n.clone() * &x1;
    let gap = nx.clone() - p.int(m as i64);
    if gap.is_zero() {
        return Err(singular(m, "N x_n = n (vanishing a_n^2 inside the lattice)", &x1, &s.y));
    }
    let mixed = x1.clone() + &s.y;
    if mixed.is_zero() {
        return Err(singular(m, "x_n + y_(n-1) = 0", &x1, &s.y));
    }
    let f1 = nx.clone() - p.int(p.size() as i64 + 1);
    let f2 = p.alpha().clone() - p.int(p.size() as i64 + 1) + &nx;
    let y1 = x1.clone() * f1 * f2 / (big_n * gap * mixed) - &x1;
    Ok(XYState { n: m, x: x1, y: y1 })
}

/// Iterates from `x₀ = 0` and the given `y₀` through `x_{N+1}`.
pub fn iterate<S: Scalar>(p: &WeightParams<S>, y0: S) -> Result<Trajectory<S>> {
    let n_max = p.size();
    let mut x = Vec::with_capacity(n_max + 2);
    let mut y = Vec::with_capacity(n_max + 1);
    let mut s = XYState { n: 0, x: p.int(0), y: y0 };
    for _ in 0..n_max {
        let next = step(p, &s)?;
        x.push(s.x);
        y.push(s.y);
        s = next;
    }
    let closing = next_x(p, &s)?;
    x.push(s.x);
    y.push(s.y);
    x.push(closing);
    Ok(Trajectory { x, y })
}

pub fn xy_trajectory<S: Scalar>(p: &WeightParams<S>) -> Result<Trajectory<S>> {
    iterate(p, initial_y(p)?)
}

/// Recurrence coefficients from the discrete system.
pub fn trajectory<S: Scalar>(p: &WeightParams<S>) -> Result<JacobiCoefficients<S>> {
    Ok(xy_trajectory(p)?.coefficients(p))
}

/// Both system equations at index `n` with all denominators cleared:
///
/// ```text
/// e1 = cN(x_n+y_n)(x_{n+1}+y_n) + y_n(N+1+N y_n)(N+1−α+N y_n)                 (n ≤ N)
/// e2 = N(N x_n − n)(x_n+y_n)(x_n+y_{n−1}) − x_n(−N−1+N x_n)(α−N−1+N x_n)     (1 ≤ n ≤ N)
/// ```
///
/// `e2` is `None` at `n = 0`.
pub fn system_residuals<S: Scalar>(p: &WeightParams<S>, t: &Trajectory<S>, n: usize) -> (S, Option<S>) {
    let big_n = p.big_n();
    let np1 = p.int(p.size() as i64 + 1);
    let (x, y) = (&t.x[n], &t.y[n]);
    let ny = big_n.clone() * y;
    let e1 = p.c().clone() * &big_n * (x.clone() + y) * (t.x[n + 1].clone() + y)
        + y.clone() * (np1.clone() + &ny) * (np1.clone() - p.alpha() + &ny);
    let e2 = (n >= 1).then(|| {
        let nx = big_n.clone() * x;
        big_n.clone() * (nx.clone() - p.int(n as i64)) * (x.clone() + y) * (x.clone() + &t.y[n - 1])
            - x.clone() * (nx.clone() - &np1) * (p.alpha().clone() - &np1 + &nx)
    });
    (e1, e2)
}

/// Ladder quantities `t_n = a_n²/c + n` and `T_n = (b_n + 1 + c − n − α)/c`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderQuantities<S> {
    pub n: usize,
    pub big_t: S,
    pub t: S,
}

impl<S: Scalar> LadderQuantities<S> {
    /// `(x_n, y_n) = (t_n/N, −c T_n/N − 1)`.
    pub fn to_xy(&self, p: &WeightParams<S>) -> (S, S) {
        let big_n = p.big_n();
        (self.t.clone() / &big_n, -(p.c().clone() * &self.big_t) / big_n - p.int(1))
    }
}

pub fn ladder_quantities<S: Scalar>(
    p: &WeightParams<S>,
    j: &JacobiCoefficients<S>,
    n: usize,
) -> Result<LadderQuantities<S>> {
    if n > p.size() {
        return Err(Error::IndexOutOfRange { index: n as i64, range: format!("0..={}", p.size()) });
    }
    let n_s = p.int(n as i64);
    let t = j.a_sq[n].clone() / p.c() + &n_s;
    let big_t = (j.b[n].clone() + p.int(1) + p.c() - n_s - p.alpha()) / p.c();
    Ok(LadderQuantities { n, big_t, t })
}

/// Residuals of the two ladder compatibility relations at index `n` and
/// abscissa `x`, for the closed forms
///
/// ```text
/// A_n(x)/a_n = x/(c(N−x)) + T_n/(N−x),   B_n(x) = t_n/(N−x).
/// ```
///
/// Both residuals are returned multiplied by `c(N−x)`, which clears every
/// denominator, so the result is a polynomial in `x` of degree at most 2 that
/// must vanish identically. Requires `1 ≤ n ≤ N−1` and `x ≠ N`.
pub fn compatibility_residuals<S: Scalar>(
    p: &WeightParams<S>,
    j: &JacobiCoefficients<S>,
    n: usize,
    x: &S,
) -> Result<(S, S)> {
    let size = p.size();
    if n == 0 || n + 1 > size {
        return Err(Error::IndexOutOfRange { index: n as i64, range: format!("1..={}", size.saturating_sub(1)) });
    }
    let gap = p.big_n() - x;
    if gap.is_zero() {
        return Err(Error::Pole { at: x.to_string(), what: "ladder coefficients at x = N".into() });
    }
    let c = p.c();
    let lq: Vec<LadderQuantities<S>> =
        (0..=n + 1).map(|k| ladder_quantities(p, j, k)).collect::<Result<_>>()?;
    // c(N−x)·A_k/a_k and c(N−x)·B_k
    let a_hat = |k: usize| x.clone() + c.clone() * &lq[k].big_t;
    let b_hat = |k: usize| c.clone() * &lq[k].t;
    let cleared = c.clone() * &gap;
    // c(N−x)·u(x+1)
    let x1 = x.clone() + p.int(1);
    let u_hat = x1.clone() * (x1 - p.alpha()) - &cleared;
    let b_n = &j.b[n];
    let sum_a = (0..=n).fold(p.int(0), |acc, k| acc + a_hat(k));

    let r1 = b_hat(n) + b_hat(n + 1) - ((x.clone() - b_n) * a_hat(n) - u_hat + sum_a);
    let r2 = j.a_sq[n + 1].clone() * a_hat(n + 1)
        - j.a_sq[n].clone() * a_hat(n - 1)
        - ((x.clone() - b_n) * b_hat(n + 1) - (x.clone() + p.int(1) - b_n) * b_hat(n) + cleared);
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::stieltjes;
    use crate::numerics::{parse_rational, Rational};
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn p(n: usize, a: &str, c: &str) -> WeightParams<Rational> {
        WeightParams::parse(n, a, c).unwrap()
    }

    #[test]
    fn two_point_micro_instance() {
        let w = p(1, "0", "1");
        let s0 = initial_state(&w).unwrap();
        assert_eq!((s0.x.clone(), s0.y.clone()), (q("0"), q("-7/2")));
        let s1 = step(&w, &s0).unwrap();
        assert_eq!((s1.x.clone(), s1.y.clone()), (q("5/4"), q("-5/2")));
        assert_eq!(next_x(&w, &s1).unwrap(), q("2"));
        assert!(step(&w, &s1).is_err());
        let j = trajectory(&w).unwrap();
        assert_eq!(j.a_sq, vec![q("0"), q("1/4"), q("0")]);
        assert_eq!(j.b, vec![q("1/2"), q("1/2")]);
    }

    #[test]
    fn initial_y_agrees_with_moment_b0() {
        let w = p(2, "1/2", "1");
        let b0 = stieltjes(&w).unwrap().b[0].clone();
        let expected = -(b0 + q("3") + q("1") - q("1/2")) / q("2");
        assert_eq!(initial_y(&w).unwrap(), expected);
    }

    #[test]
    fn singular_state_is_reported() {
        let w = p(3, "0", "1");
        let s = XYState { n: 1, x: q("2"), y: q("-2") };
        match step(&w, &s) {
            Err(Error::Singular { n, .. }) => assert_eq!(n, 1),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn ladder_quantities_examples() {
        let w = p(1, "0", "1");
        let j = stieltjes(&w).unwrap();
        let l0 = ladder_quantities(&w, &j, 0).unwrap();
        assert_eq!(l0.t, q("0"));
        let l1 = ladder_quantities(&w, &j, 1).unwrap();
        assert_eq!(l1.t, q("5/4"));
        assert_eq!(l1.big_t, q("3/2"));
        let t = xy_trajectory(&w).unwrap();
        assert_eq!(l1.to_xy(&w), (t.x[1].clone(), t.y[1].clone()));
    }

    #[test]
    fn compatibility_examples() {
        let w = p(2, "1/2", "1");
        let j = stieltjes(&w).unwrap();
        for x in ["1/3", "-5"] {
            let (r1, r2) = compatibility_residuals(&w, &j, 1, &q(x)).unwrap();
            assert_eq!((r1, r2), (q("0"), q("0")));
        }
        assert!(compatibility_residuals(&w, &j, 1, &q("2")).is_err());
        assert!(compatibility_residuals(&w, &j, 0, &q("1/3")).is_err());
        assert!(compatibility_residuals(&w, &j, 2, &q("1/3")).is_err());
    }

    #[test]
    fn compatibility_detects_wrong_coefficients() {
        let w = p(6, "1/2", "1");
        let mut j = stieltjes(&w).unwrap();
        j.b[3] += q("1/1000");
        let (r1, r2) = compatibility_residuals(&w, &j, 3, &q("1/3")).unwrap();
        assert!(!Scalar::is_zero(&r1) || !Scalar::is_zero(&r2));
    }

    #[test]
    fn figure_one_shape() {
        // a_n^2 rises to a single maximum and falls back to a_(N+1)^2 = 0.
        let w = p(80, "-1", "2");
        let j = trajectory(&w).unwrap();
        let peak = (0..=81).max_by(|&a, &b| j.a_sq[a].partial_cmp(&j.a_sq[b]).unwrap()).unwrap();
        assert!(peak > 5 && peak < 76);
        assert!((0..peak).all(|n| j.a_sq[n] < j.a_sq[n + 1]));
        assert!((peak..=80).all(|n| j.a_sq[n] > j.a_sq[n + 1]));
        assert!(Scalar::is_zero(&j.a_sq[81]));
    }

    fn arb_params() -> impl Strategy<Value = WeightParams<Rational>> {
        (1usize..14, -60i64..60, 1i64..9, 1i64..80, 1i64..9).prop_filter_map(
            "valid",
            |(n, an, ad, cn, cd)| {
                WeightParams::new(n, Rational::new(an.into(), ad.into()), Rational::new(cn.into(), cd.into())).ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn matches_stieltjes_exactly(w in arb_params()) {
            prop_assert_eq!(trajectory(&w).unwrap(), stieltjes(&w).unwrap());
        }

        #[test]
        fn closes_boundary_and_solves_system(w in arb_params()) {
            let t = xy_trajectory(&w).unwrap();
            let n = w.size();
            prop_assert_eq!(w.big_n() * &t.x[n + 1], w.int(n as i64 + 1));
            for k in 0..=n {
                let (e1, e2) = system_residuals(&w, &t, k);
                prop_assert!(Scalar::is_zero(&e1));
                if let Some(e2) = e2 {
                    prop_assert!(Scalar::is_zero(&e2));
                }
            }
        }

        #[test]
        fn ladder_relations(w in arb_params()) {
            prop_assume!(w.size() >= 2);
            let j = stieltjes(&w).unwrap();
            for n in 0..=w.size() {
                let l = ladder_quantities(&w, &j, n).unwrap();
                // c T_n − b_n − 1 + α − c + n = 0
                let rel = w.c().clone() * &l.big_t - &j.b[n] - w.int(1) + w.alpha() - w.c() + w.int(n as i64);
                prop_assert!(Scalar::is_zero(&rel));
            }
            for n in 1..w.size() {
                for x in ["-5", "1/3", "7/2", "101"] {
                    let x = q(x);
                    if x == w.big_n() { continue; }
                    let (r1, r2) = compatibility_residuals(&w, &j, n, &x).unwrap();
                    prop_assert!(Scalar::is_zero(&r1) && Scalar::is_zero(&r2));
                }
            }
        }
    }
}
