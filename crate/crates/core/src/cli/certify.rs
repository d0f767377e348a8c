//! Certification suites behind `genkraw certify`.

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use crate::convergence::{doubling_ladder, halving_ladder};
use crate::dpsystem::{compatibility_residuals, xy_trajectory};
use crate::error::Result;
use crate::limit::limit_ladder;
use crate::numerics::{factorial, pochhammer, Rational, Scalar};
use crate::painleve::{cosgrove_ladder, default_z0, p5_ladder, Tamper};
use crate::parallel::Execution;
use crate::toda::toda_ladder;
use crate::weight::{kummer_m_terminating, laguerre, WeightParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Compat,
    Toda,
    P5,
    Cosgrove,
    Kummer,
    Limit,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Compat, Suite::Toda, Suite::P5, Suite::Cosgrove, Suite::Kummer, Suite::Limit];
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub n: usize,
    pub suites: Vec<Suite>,
    pub tamper: Option<Tamper>,
    pub precision: u32,
    pub seed: u64,
    pub limit_p: Rational,
    pub exec: Execution,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub summary: String,
    pub details: serde_json::Value,
}

impl SuiteReport {
    fn errored(suite: Suite, e: impl std::fmt::Display) -> Self {
        SuiteReport { suite, passed: false, summary: format!("error: {e}"), details: serde_json::Value::Null }
    }
}

/// Relative ratio band used for every order-2 check.
const ORDER_TOL: f64 = 0.2;

fn ladder_base(scale: &Rational) -> Rational {
    scale / Rational::from_integer(16.into())
}

fn compat(p: &WeightParams<Rational>, tamper: Option<&Tamper>) -> Result<SuiteReport> {
    let mut t = xy_trajectory(p)?;
    if let Some(tp) = tamper {
        if let Some(y) = t.y.get_mut(tp.index) {
            *y += &tp.delta;
        }
    }
    let j = t.coefficients(p);
    let size = p.size() as i64;
    let xs: Vec<Rational> = [(-5, 1), (1, 3), (7, 2), (2 * size + 1, 2)]
        .iter()
        .map(|&(a, b)| Rational::new(a.into(), b.into()))
        .collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 1..p.size() {
        for x in &xs {
            let (r1, r2) = compatibility_residuals(p, &j, n, x)?;
            checked += 1;
            if !Scalar::is_zero(&r1) || !Scalar::is_zero(&r2) {
                failures.push(json!({"n": n, "x": x.to_string()}));
            }
        }
    }
    Ok(SuiteReport {
        suite: Suite::Compat,
        passed: failures.is_empty(),
        summary: format!("{} of {checked} residual pairs exactly zero", checked - failures.len()),
        details: json!({"checked": checked, "failures": failures}),
    })
}

fn toda(p: &WeightParams<Rational>, n: usize, exec: Execution) -> Result<SuiteReport> {
    let hs = halving_ladder(&ladder_base(p.c()), 5);
    let lad = toda_ladder(p, n, &hs, exec)?;
    let passed = lad.ratios_within(4.0, ORDER_TOL);
    Ok(SuiteReport {
        suite: Suite::Toda,
        passed,
        summary: format!("order-2 ratios a_sq {:?}, b {:?}", short(&lad.a_sq.ratios), short(&lad.b.ratios)),
        details: json!({
            "h": hs.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "residual_a_sq": lad.a_sq.residuals,
            "residual_b": lad.b.residuals,
        }),
    })
}

fn p5(p: &WeightParams<Rational>, opts: &CertifyOptions) -> Result<SuiteReport> {
    let hs = halving_ladder(&ladder_base(p.c()), 5);
    let lad = p5_ladder(p, opts.n, &hs, opts.precision, opts.tamper.as_ref(), opts.exec)?;
    let points = lad.levels.iter().flat_map(|l| &l.points);
    let worst_cross = points.clone().map(|pt| pt.recovered.cross_check.to_f64()).fold(0.0, f64::max);
    let worst_x = points.clone().map(|pt| pt.x_error()).fold(0.0, f64::max);
    let worst_y = points.clone().map(|pt| pt.y_error()).fold(0.0, f64::max);
    let ambiguous = points.filter(|pt| pt.recovered.ambiguous).count();
    let algebra_ok = worst_cross < 1e-30 && worst_x < 1e-30 && worst_y < 1e-30;
    let order_ok = lad.from_first.ratios_within(4.0, ORDER_TOL) && lad.from_second.ratios_within(4.0, ORDER_TOL);
    Ok(SuiteReport {
        suite: Suite::P5,
        passed: algebra_ok && order_ok,
        summary: format!(
            "max |x_n err| {worst_x:.1e}, max cross-check {worst_cross:.1e}, residual ratios {:?}",
            short(&lad.from_first.ratios)
        ),
        details: json!({
            "center": lad.center.to_string(),
            "h": hs.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "residual_from_first": lad.from_first.residuals,
            "residual_from_second": lad.from_second.residuals,
            "max_cross_check": worst_cross,
            "max_x_error": worst_x,
            "max_y_error": worst_y,
            "ambiguous_roots": ambiguous,
        }),
    })
}

fn cosgrove(p: &WeightParams<Rational>, opts: &CertifyOptions) -> Result<SuiteReport> {
    let z0 = default_z0(p.c());
    let hzs = halving_ladder(&ladder_base(&z0), 5);
    let (_, rep) = cosgrove_ladder(p, opts.n, &z0, &hzs, opts.tamper.as_ref(), opts.exec)?;
    Ok(SuiteReport {
        suite: Suite::Cosgrove,
        passed: rep.ratios_within(4.0, ORDER_TOL),
        summary: format!("z0 = {z0}, residual ratios {:?}", short(&rep.ratios)),
        details: json!({"z0": z0.to_string(), "residuals": rep.residuals}),
    })
}

/// `M(−N, 1−α, −c) = N!/(1−α)_N · L_N^{(−α)}(−c)` on random rational inputs.
fn kummer(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..count {
        let size: usize = rng.random_range(1..=50);
        let den: i64 = rng.random_range(1..=12);
        let alpha = Rational::new(rng.random_range(-50 * den..den).into(), den.into());
        let c = Rational::new(rng.random_range(1..=200i64).into(), rng.random_range(1..=12i64).into());
        let b = Rational::from_integer(1.into()) - &alpha;
        let z = -c.clone();
        let lhs = kummer_m_terminating(size, &b, &z)?;
        let rhs = Rational::from_integer(factorial(size as u64)) / pochhammer(&b, size) * laguerre(size, &-alpha.clone(), &z);
        if lhs != rhs {
            failures.push(json!({"N": size, "alpha": alpha.to_string(), "c": c.to_string()}));
        }
    }
    Ok(SuiteReport {
        suite: Suite::Kummer,
        passed: failures.is_empty(),
        summary: format!("{} of {count} exact identities hold (seed {seed})", count - failures.len()),
        details: json!({"seed": seed, "failures": failures}),
    })
}

fn limit(size: usize, p: &Rational, exec: Execution) -> Result<SuiteReport> {
    let ss = doubling_ladder(&Rational::from_integer(BigInt::from(500)), 4);
    let (devs, rep) = limit_ladder(size, p, &ss, exec)?;
    let passed = devs.iter().all(|d| d.boundary_ok) && rep.monotone_after(0) && rep.ratios_within(2.0, 0.3);
    Ok(SuiteReport {
        suite: Suite::Limit,
        passed,
        summary: format!("p = {p}, deviations {:?}, ratios {:?}", short(&rep.residuals), short(&rep.ratios)),
        details: json!({
            "p": p.to_string(),
            "s": ss.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "max_relative_deviation": rep.residuals,
        }),
    })
}

fn short(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| format!("{x:.3e}")).collect()
}

/// Runs the selected suites; a suite that errors counts as failed.
pub fn certify(p: &WeightParams<Rational>, opts: &CertifyOptions) -> Vec<SuiteReport> {
    opts.suites
        .iter()
        .map(|&suite| {
            let r = match suite {
                Suite::Compat => compat(p, opts.tamper.as_ref()),
                Suite::Toda => toda(p, opts.n, opts.exec),
                Suite::P5 => p5(p, opts),
                Suite::Cosgrove => cosgrove(p, opts),
                Suite::Kummer => kummer(opts.seed, 20),
                Suite::Limit => limit(p.size(), &opts.limit_p, opts.exec),
            };
            r.unwrap_or_else(|e| SuiteReport::errored(suite, e))
        })
        .collect()
}
