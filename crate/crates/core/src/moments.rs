//! Ground-truth recurrence coefficients straight from the weight, by the
//! Stieltjes procedure over the finite lattice.
//!
//! Monic polynomials are carried as their value vectors on `{0..N}`:
//!
//! ```text
//! π₋₁ ≡ 0, π₀ ≡ 1,
//! b_n   = ⟨x π_n, π_n⟩ / ⟨π_n, π_n⟩,
//! a_n²  = ⟨π_n, π_n⟩ / ⟨π_{n−1}, π_{n−1}⟩,
//! π_{n+1}(k) = (k − b_n) π_n(k) − a_n² π_{n−1}(k),
//! ```
//!
//! with `⟨f, g⟩ = Σ_k f(k) g(k) w(k)`. No square roots appear, so exact mode
//! stays in ℚ and the output equals the orthonormal coefficients `a_n², b_n`.

use crate::error::{Error, Result};
use crate::numerics::Scalar;
use crate::weight::{kummer_m_terminating, WeightParams};

/// Squared off-diagonal `a_sq[0..=N+1]` and diagonal `b[0..=N]` of the Jacobi
/// matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiCoefficients<S> {
    pub a_sq: Vec<S>,
    pub b: Vec<S>,
}

impl<S: Scalar> JacobiCoefficients<S> {
    /// `N`, inferred from the length of `b`.
    pub fn size(&self) -> usize {
        self.b.len() - 1
    }

    /// Checks boundary zeros, interior positivity, `0 < b_n < N` and (exact
    /// mode only) the trace identity `Σ b_n = 0 + 1 + ⋯ + N`.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.size();
        if self.a_sq.len() != n + 2 {
            return Err(Error::Internal(format!(
                "a_sq has {} entries, expected {}",
                self.a_sq.len(),
                n + 2
            )));
        }
        if !self.a_sq[0].is_zero() || !self.a_sq[n + 1].is_zero() {
            return Err(Error::Internal(format!(
                "boundary values a_0^2 = {}, a_(N+1)^2 = {} must vanish",
                self.a_sq[0],
                self.a_sq[n + 1]
            )));
        }
        if let Some(k) = (1..=n).find(|&k| !self.a_sq[k].is_positive()) {
            return Err(Error::Internal(format!("a_{k}^2 = {} is not positive", self.a_sq[k])));
        }
        let top = self.b[0].int(n as i64);
        if let Some(k) = (0..=n).find(|&k| !self.b[k].is_positive() || self.b[k] >= top) {
            return Err(Error::Internal(format!("b_{k} = {} outside (0, N)", self.b[k])));
        }
        if self.b[0].mode() == crate::numerics::Mode::Exact {
            let trace = self.b.iter().fold(self.b[0].int(0), |acc, x| acc + x);
            let expected = self.b[0].int((n * (n + 1) / 2) as i64);
            if trace != expected {
                return Err(Error::Internal(format!("trace {trace} != {expected}")));
            }
        }
        Ok(())
    }
}

/// `μ_j = Σ_k k^j w(k)`.
pub fn moment<S: Scalar>(p: &WeightParams<S>, j: u32) -> S {
    p.weights()
        .iter()
        .enumerate()
        .fold(p.int(0), |acc, (k, w)| acc + p.int(k as i64).powu(j) * w)
}

/// Full Stieltjes run: the coefficients plus every monic polynomial's lattice
/// values `π_0..=π_{N+1}` and squared norms `⟨π_n, π_n⟩` for `n ≤ N`.
#[derive(Clone, Debug)]
pub struct StieltjesRun<S> {
    pub coefficients: JacobiCoefficients<S>,
    pub polys: Vec<Vec<S>>,
    pub norms: Vec<S>,
}

impl<S: Scalar> StieltjesRun<S> {
    /// `⟨π_m, π_n⟩` under the weight that produced this run.
    pub fn inner(&self, weights: &[S], m: usize, n: usize) -> S {
        weights
            .iter()
            .zip(self.polys[m].iter().zip(&self.polys[n]))
            .fold(weights[0].int(0), |acc, (w, (f, g))| acc + f.clone() * g * w)
    }
}

pub fn stieltjes<S: Scalar>(p: &WeightParams<S>) -> Result<JacobiCoefficients<S>> {
    stieltjes_run(p).map(|r| r.coefficients)
}

pub fn stieltjes_run<S: Scalar>(p: &WeightParams<S>) -> Result<StieltjesRun<S>> {
    let n_max = p.size();
    let w = p.weights();
    let xs: Vec<S> = (0..=n_max).map(|k| p.int(k as i64)).collect();
    let zero = p.int(0);

    let mut polys: Vec<Vec<S>> = Vec::with_capacity(n_max + 2);
    let mut norms: Vec<S> = Vec::with_capacity(n_max + 1);
    let mut a_sq = vec![zero.clone()];
    let mut b = Vec::with_capacity(n_max + 1);
    polys.push(vec![p.int(1); n_max + 1]);

    for n in 0..=n_max {
        let cur = &polys[n];
        let (norm, moment1) = cur.iter().zip(&w).zip(&xs).fold(
            (zero.clone(), zero.clone()),
            |(nn, mm), ((f, wk), x)| {
                let fw = f.clone() * f * wk;
                (nn + &fw, mm + fw * x)
            },
        );
        if norm.is_zero() {
            return Err(Error::Internal(format!("<pi_{n}, pi_{n}> vanished before n = N+1")));
        }
        if n > 0 {
            a_sq.push(norm.clone() / &norms[n - 1]);
        }
        let b_n = moment1 / &norm;
        let next: Vec<S> = (0..=n_max)
            .map(|k| {
                let lead = (xs[k].clone() - &b_n) * &cur[k];
                if n == 0 {
                    lead
                } else {
                    lead - a_sq[n].clone() * &polys[n - 1][k]
                }
            })
            .collect();
        b.push(b_n);
        norms.push(norm);
        polys.push(next);
    }
    // π_{N+1} vanishes on the whole support, so a_{N+1}^2 = 0 by definition.
    a_sq.push(zero);
    Ok(StieltjesRun { coefficients: JacobiCoefficients { a_sq, b }, polys, norms })
}

/// The two expressions for `b₀`: the moment ratio `μ₁/μ₀` and the closed form
/// `cN/(1−α) · M(−N+1, 2−α, −c) / M(−N, 1−α, −c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelB0<S> {
    pub moment_ratio: S,
    pub closed_form: S,
}

pub fn hankel_b0<S: Scalar>(p: &WeightParams<S>) -> Result<HankelB0<S>> {
    let n = p.size();
    let moment_ratio = moment(p, 1) / moment(p, 0);
    let one_minus_alpha = p.int(1) - p.alpha();
    let minus_c = -p.c().clone();
    let upper = kummer_m_terminating(n - 1, &(p.int(2) - p.alpha()), &minus_c)?;
    let lower = kummer_m_terminating(n, &one_minus_alpha, &minus_c)?;
    let closed_form = p.c().clone() * p.big_n() / one_minus_alpha * upper / lower;
    Ok(HankelB0 { moment_ratio, closed_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{parse_rational, Rational};
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn p(n: usize, a: &str, c: &str) -> WeightParams<Rational> {
        WeightParams::parse(n, a, c).unwrap()
    }

    /// Determinant by fraction-exact Gaussian elimination.
    fn det(mut m: Vec<Vec<Rational>>) -> Rational {
        let n = m.len();
        let mut acc = q("1");
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !Scalar::is_zero(&m[r][col])) else {
                return q("0");
            };
            if piv != col {
                m.swap(piv, col);
                acc = -acc;
            }
            acc *= m[col][col].clone();
            for r in col + 1..n {
                let f = &m[r][col] / &m[col][col];
                for cc in col..n {
                    let v = &f * &m[col][cc];
                    m[r][cc] -= v;
                }
            }
        }
        acc
    }

    /// Hankel-determinant oracle: with D_n = det[μ_{i+j}]_{i,j<n} and D'_n the
    /// same with the last column shifted by one,
    /// a_n^2 = D_{n+1} D_{n-1} / D_n^2 and b_n = D'_{n+1}/D_{n+1} − D'_n/D_n.
    fn hankel_oracle(p: &WeightParams<Rational>) -> JacobiCoefficients<Rational> {
        let n_max = p.size();
        let mu: Vec<Rational> = (0..=2 * n_max as u32 + 2).map(|j| moment(p, j)).collect();
        let d = |n: usize| -> Rational {
            if n == 0 {
                return q("1");
            }
            det((0..n).map(|i| (0..n).map(|j| mu[i + j].clone()).collect()).collect())
        };
        let dp = |n: usize| -> Rational {
            if n == 0 {
                return q("0");
            }
            det((0..n)
                .map(|i| (0..n).map(|j| mu[i + j + usize::from(j == n - 1)].clone()).collect())
                .collect())
        };
        let mut a_sq = vec![q("0")];
        for n in 1..=n_max {
            a_sq.push(d(n + 1) * d(n - 1) / (d(n) * d(n)));
        }
        a_sq.push(q("0"));
        let b = (0..=n_max).map(|n| dp(n + 1) / d(n + 1) - dp(n) / d(n)).collect();
        JacobiCoefficients { a_sq, b }
    }

    #[test]
    fn moments_two_point() {
        let w = p(1, "0", "1");
        assert_eq!(moment(&w, 0), q("2"));
        assert_eq!(moment(&w, 1), q("1"));
    }

    #[test]
    fn stieltjes_two_point_lattice() {
        // Gram–Schmidt on {0, 1} with equal masses: b = 1/2, a_1^2 = 1/4.
        let j = stieltjes(&p(1, "0", "1")).unwrap();
        assert_eq!(j.a_sq, vec![q("0"), q("1/4"), q("0")]);
        assert_eq!(j.b, vec![q("1/2"), q("1/2")]);
        j.check_invariants().unwrap();
    }

    #[test]
    fn stieltjes_matches_hankel_oracle() {
        for (n, a, c) in [(2, "1/2", "1"), (3, "-1", "2"), (5, "4/5", "1/10"), (6, "0", "30")] {
            let w = p(n, a, c);
            assert_eq!(stieltjes(&w).unwrap(), hankel_oracle(&w), "{w}");
        }
    }

    #[test]
    fn b0_is_moment_ratio() {
        for (n, a, c) in [(1, "0", "1"), (2, "1/2", "1"), (7, "-2000", "1000")] {
            let w = p(n, a, c);
            let j = stieltjes(&w).unwrap();
            let h = hankel_b0(&w).unwrap();
            assert_eq!(j.b[0], h.moment_ratio);
            assert_eq!(h.moment_ratio, h.closed_form);
        }
        assert_eq!(hankel_b0(&p(1, "0", "1")).unwrap().closed_form, q("1/2"));
    }

    #[test]
    fn float_mode_tracks_exact() {
        let exact = p(12, "1/2", "3");
        let e = stieltjes(&exact).unwrap();
        let f = stieltjes(&exact.to_float(256)).unwrap();
        for (x, y) in e.b.iter().zip(&f.b) {
            assert!((y.to_rational() - x).to_f64().abs() < 1e-60);
        }
        f.check_invariants().unwrap();
    }

    #[test]
    fn invariant_check_catches_damage() {
        let mut j = stieltjes(&p(3, "0", "1")).unwrap();
        j.a_sq[2] = -j.a_sq[2].clone();
        assert!(j.check_invariants().is_err());
        let mut j = stieltjes(&p(3, "0", "1")).unwrap();
        j.b[1] += q("1/1000");
        assert!(j.check_invariants().is_err());
    }

    fn arb_params() -> impl Strategy<Value = WeightParams<Rational>> {
        (1usize..9, -40i64..40, 1i64..9, 1i64..50, 1i64..9).prop_filter_map(
            "valid",
            |(n, an, ad, cn, cd)| {
                WeightParams::new(n, Rational::new(an.into(), ad.into()), Rational::new(cn.into(), cd.into())).ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn output_invariants(w in arb_params()) {
            stieltjes(&w).unwrap().check_invariants().unwrap();
        }

        #[test]
        fn orthogonality_certificate(w in arb_params()) {
            let run = stieltjes_run(&w).unwrap();
            let ws = w.weights();
            let n = w.size();
            for m in 0..=n {
                for k in 0..m {
                    prop_assert!(Scalar::is_zero(&run.inner(&ws, m, k)));
                }
            }
            // pi_{N+1} vanishes on every lattice point
            prop_assert!(run.polys[n + 1].iter().all(Scalar::is_zero));
        }
    }
}
