//! Coefficient tables as JSON or CSV.

use serde::Serialize;

use crate::moments::JacobiCoefficients;
use crate::numerics::{Mode, Rational, Scalar};
use crate::weight::WeightParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct ParamsDoc {
    #[serde(rename = "N")]
    n: usize,
    alpha: String,
    c: String,
}

#[derive(Serialize)]
struct Row {
    n: usize,
    a_sq: String,
    b: Option<String>,
}

#[derive(Serialize)]
struct TableDoc {
    params: ParamsDoc,
    mode: String,
    coeffs: Vec<Row>,
}

fn rows<S: Scalar>(j: &JacobiCoefficients<S>, digits: Option<usize>) -> Vec<Row> {
    j.a_sq
        .iter()
        .enumerate()
        .map(|(n, a)| Row { n, a_sq: a.render(digits), b: j.b.get(n).map(|b| b.render(digits)) })
        .collect()
}

/// `{"params": …, "mode": …, "coeffs": [{"n", "a_sq", "b"}, …]}`, one row per
/// `n = 0..=N+1` (`b` is null in the last row).
pub fn to_json<S: Scalar>(p: &WeightParams<Rational>, mode: Mode, j: &JacobiCoefficients<S>, digits: Option<usize>) -> String {
    let doc = TableDoc {
        params: ParamsDoc { n: p.size(), alpha: p.alpha().to_string(), c: p.c().to_string() },
        mode: mode.to_string(),
        coeffs: rows(j, digits),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
    s.push('\n');
    s
}

/// Header `n,a_sq,b`; `b` is empty in the last row.
pub fn to_csv<S: Scalar>(j: &JacobiCoefficients<S>, digits: Option<usize>) -> String {
    let mut out = String::from("n,a_sq,b\n");
    for r in rows(j, digits) {
        out.push_str(&format!("{},{},{}\n", r.n, r.a_sq, r.b.unwrap_or_default()));
    }
    out
}
