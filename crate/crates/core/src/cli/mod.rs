//! The `genkraw` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 singular trajectory or sample,
//! 3 certification failure (including an exact-mode mismatch in `compare`).

pub mod certify;
pub mod experiments;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::dpsystem::{initial_y, trajectory};
use crate::error::{Error, Result};
use crate::limit::{embed, krawtchouk_coefficients, relative_deviation};
use crate::moments::{stieltjes, JacobiCoefficients};
use crate::numerics::{parse_rational, BigFloat, Mode, Rational, Scalar};
use crate::painleve::Tamper;
use crate::parallel::Execution;
use crate::weight::WeightParams;

use certify::{certify, CertifyOptions, Suite};
use experiments::{perturb, shoot, shoot_scan};
use table::{to_csv, to_json, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SINGULAR: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "genkraw", version, about = "Recurrence coefficients for the generalized Krawtchouk weight")]
pub struct Cli {
    /// Default float precision in bits.
    #[arg(long, global = true, env = "GENKRAW_PRECISION", default_value_t = crate::numerics::DEFAULT_PRECISION)]
    pub precision: u32,

    /// Run parameter sweeps on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Largest lattice point.
    #[arg(long = "N")]
    pub size: usize,
    /// alpha < 1, as p/q, an integer or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// c > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub c: String,
}

impl ParamArgs {
    fn parse(&self) -> Result<WeightParams<Rational>> {
        WeightParams::parse(self.size, &self.alpha, &self.c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Dpsystem,
    Stieltjes,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a_n^2 (n = 0..N+1) and b_n (n = 0..N).
    Compute {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Method::Dpsystem)]
        method: Method,
        /// exact, float or float:P.
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Significant digits for decimal output (CSV defaults to 20).
        #[arg(long)]
        digits: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run both methods and compare them entry by entry.
    Compare {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "exact")]
        mode: String,
    },
    /// Perturb y0 and report where the float iteration breaks down.
    Perturb {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
    },
    /// Recover y0 by bisection on a_(N+1)^2.
    Shoot {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        lo: String,
        #[arg(long, allow_hyphen_values = true)]
        hi: String,
        /// Split the bracket into this many cells and report every root.
        #[arg(long)]
        scan: Option<usize>,
    },
    /// Write the data behind the figures as CSV files.
    Figures {
        /// Figure ids (1-4); all when omitted.
        ids: Vec<u8>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        digits: usize,
    },
    /// Run certification suites and print a JSON report.
    Certify {
        #[command(flatten)]
        params: ParamArgs,
        /// Index n for the Toda, Painleve V and Cosgrove suites.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, value_delimiter = ',')]
        suites: Vec<Suite>,
        /// Add delta to y_index before checking, as index:delta.
        #[arg(long, allow_hyphen_values = true)]
        tamper: Option<String>,
        /// Precision of the Painleve V pipeline.
        #[arg(long, default_value_t = 256)]
        p5_precision: u32,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Krawtchouk p for the limit suite.
        #[arg(long, default_value = "1/3")]
        limit_p: String,
    },
}

/// Error plus the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidParameter(_) | Error::Parse(_) | Error::IndexOutOfRange { .. } | Error::NoSignChange { .. } => {
                EXIT_USAGE
            }
            Error::Singular { .. } | Error::SingularSample { .. } | Error::Pole { .. } | Error::ZeroPochhammer { .. } => {
                EXIT_SINGULAR
            }
            _ => EXIT_FAILED,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_USAGE, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn exec(cli: &Cli) -> Execution {
    if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn parse_mode(s: &str, default_bits: u32) -> Result<Mode> {
    if s.trim().eq_ignore_ascii_case("float") {
        return Ok(Mode::Float(default_bits));
    }
    s.parse()
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Compute { params, method, mode, format, digits, output } => {
            let p = params.parse()?;
            let mode = parse_mode(mode, cli.precision)?;
            let text = match mode {
                Mode::Exact => render(&p, mode, &coefficients(&p, *method)?, *format, *digits),
                Mode::Float(bits) => render(&p, mode, &coefficients(&p.to_float(bits), *method)?, *format, *digits),
            };
            emit(&text, output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Compare { params, mode } => compare(&params.parse()?, parse_mode(mode, cli.precision)?, out),
        Command::Perturb { params, delta } => {
            let report = perturb(&params.parse()?, &parse_rational(delta)?, cli.precision)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
            Ok(EXIT_OK)
        }
        Command::Shoot { params, lo, hi, scan } => {
            let p = params.parse()?;
            shoot_cmd(&p, &parse_rational(lo)?, &parse_rational(hi)?, *scan, cli.precision, out)
        }
        Command::Figures { ids, out_dir, digits } => figures(ids, out_dir, *digits, out, err),
        Command::Certify { params, n, suites, tamper, p5_precision, seed, limit_p } => {
            let p = params.parse()?;
            let opts = CertifyOptions {
                n: *n,
                suites: if suites.is_empty() { Suite::ALL.to_vec() } else { suites.clone() },
                tamper: tamper.as_deref().map(parse_tamper).transpose()?,
                precision: *p5_precision,
                seed: *seed,
                limit_p: parse_rational(limit_p)?,
                exec: exec(cli),
            };
            let reports = certify(&p, &opts);
            let passed = reports.iter().all(|r| r.passed);
            let doc = json!({
                "params": {"N": p.size(), "alpha": p.alpha().to_string(), "c": p.c().to_string()},
                "n": n,
                "tamper": tamper,
                "passed": passed,
                "suites": reports,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("report serializes"))?;
            Ok(if passed { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

fn coefficients<S: Scalar>(p: &WeightParams<S>, method: Method) -> Result<JacobiCoefficients<S>> {
    match method {
        Method::Dpsystem => trajectory(p),
        Method::Stieltjes => stieltjes(p),
    }
}

fn render<S: Scalar>(
    p: &WeightParams<Rational>,
    mode: Mode,
    j: &JacobiCoefficients<S>,
    format: Format,
    digits: Option<usize>,
) -> String {
    match format {
        Format::Json => to_json(p, mode, j, digits),
        Format::Csv => to_csv(j, digits.or(Some(20))),
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(path) => std::fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn parse_tamper(s: &str) -> Result<Tamper> {
    let (index, delta) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("tamper must look like index:delta, got `{s}`")))?;
    let index = index.trim().parse().map_err(|_| Error::Parse(format!("bad tamper index `{index}`")))?;
    Ok(Tamper { index, delta: parse_rational(delta)? })
}

fn compare(p: &WeightParams<Rational>, mode: Mode, out: &mut dyn Write) -> CmdResult {
    let entries = 2 * (p.size() + 1);
    match mode {
        Mode::Exact => {
            let t0 = Instant::now();
            let d = trajectory(p)?;
            let t1 = Instant::now();
            let s = stieltjes(p)?;
            let t2 = Instant::now();
            let timing = format!(
                "dpsystem {:.3}s, stieltjes {:.3}s",
                (t1 - t0).as_secs_f64(),
                (t2 - t1).as_secs_f64()
            );
            match first_difference(&d, &s) {
                None => {
                    writeln!(out, "identical ({entries} entries); {timing}")?;
                    Ok(EXIT_OK)
                }
                Some((name, n)) => {
                    writeln!(out, "MISMATCH in exact mode: first difference at {name}[{n}]; {timing}")?;
                    Ok(EXIT_FAILED)
                }
            }
        }
        Mode::Float(bits) => {
            let exact = stieltjes(p)?;
            let pf = p.to_float(bits);
            let s = stieltjes(&pf)?;
            let line = match trajectory(&pf) {
                Ok(d) => {
                    let dev = |j: &JacobiCoefficients<BigFloat>| {
                        let as_exact = JacobiCoefficients {
                            a_sq: j.a_sq.iter().map(Scalar::to_rational).collect(),
                            b: j.b.iter().map(Scalar::to_rational).collect(),
                        };
                        relative_deviation(&as_exact, &exact).to_f64()
                    };
                    format!(
                        "float:{bits} divergence (informational): max relative error dpsystem {:.3e}, stieltjes {:.3e}",
                        dev(&d),
                        dev(&s)
                    )
                }
                Err(e) => format!("float:{bits} divergence (informational): dpsystem iteration failed: {e}"),
            };
            writeln!(out, "{line}")?;
            Ok(EXIT_OK)
        }
    }
}

fn first_difference<S: PartialEq>(a: &JacobiCoefficients<S>, b: &JacobiCoefficients<S>) -> Option<(&'static str, usize)> {
    if let Some(n) = (0..a.a_sq.len().max(b.a_sq.len())).find(|&n| a.a_sq.get(n) != b.a_sq.get(n)) {
        return Some(("a_sq", n));
    }
    (0..a.b.len().max(b.b.len())).find(|&n| a.b.get(n) != b.b.get(n)).map(|n| ("b", n))
}

fn shoot_cmd(
    p: &WeightParams<Rational>,
    lo: &Rational,
    hi: &Rational,
    scan: Option<usize>,
    prec: u32,
    out: &mut dyn Write,
) -> CmdResult {
    let closed = initial_y(&p.to_float(prec))?;
    let roots = match scan {
        Some(cells) => shoot_scan(p, lo, hi, cells, prec)?,
        None => vec![shoot(p, lo, hi, prec)?],
    };
    let admissible = roots.iter().filter(|r| r.admissible).count();
    let doc = json!({
        "params": {"N": p.size(), "alpha": p.alpha().to_string(), "c": p.c().to_string()},
        "precision": prec,
        "closed_form_y0": closed.render(Some(40)),
        "admissible_roots": admissible,
        "roots": roots.iter().map(|r| json!({
            "y0": r.y0.render(Some(40)),
            "a_sq_closing": r.closing.render(Some(6)),
            "admissible": r.admissible,
            "distance_to_closed_form": (r.y0.clone() - &closed).abs().render(Some(3)),
            "iterations": r.iterations,
        })).collect::<Vec<_>>(),
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("report serializes"))?;
    Ok(EXIT_OK)
}

/// Caption parameters of the four figures.
pub fn figure_params(id: u8) -> Option<(usize, &'static str, &'static str)> {
    match id {
        1 => Some((80, "-1", "2")),
        2 => Some((80, "0.8", "2")),
        3 => Some((80, "-1", "30")),
        4 => Some((80, "-2000", "1000")),
        _ => None,
    }
}

fn figures(ids: &[u8], dir: &Path, digits: usize, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let ids: Vec<u8> = if ids.is_empty() { vec![1, 2, 3, 4] } else { ids.to_vec() };
    if let Some(bad) = ids.iter().find(|&&id| figure_params(id).is_none()) {
        return Err(Error::InvalidParameter(format!("unknown figure {bad} (expected 1-4)")).into());
    }
    std::fs::create_dir_all(dir)?;
    for id in ids {
        let (size, alpha, c) = figure_params(id).expect("checked above");
        let p = WeightParams::parse(size, alpha, c)?;
        let j = trajectory(&p)?;
        let name = if id == 4 { "fig4_generalized.csv".to_string() } else { format!("fig{id}.csv") };
        std::fs::write(dir.join(&name), to_csv(&j, Some(digits)))?;
        writeln!(out, "figure {id}: {p} -> {}", dir.join(&name).display())?;
        if id == 4 {
            let prob = parse_rational("1/3")?;
            let classical = krawtchouk_coefficients(size, &prob)?;
            debug_assert_eq!(embed(size, &prob, &parse_rational("2000")?)?, p);
            std::fs::write(dir.join("fig4_classical.csv"), to_csv(&classical, Some(digits)))?;
            let dev = relative_deviation(&j, &classical);
            writeln!(out, "figure 4: classical p = 1/3 -> {}", dir.join("fig4_classical.csv").display())?;
            writeln!(
                out,
                "figure 4: max relative gap {:.3e} at {}[{}]",
                dev.to_f64(),
                dev.at.0,
                dev.at.1
            )?;
            if !dev.boundary_ok {
                writeln!(err, "warning: boundary values differ")?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("genkraw").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn compute_micro_instance() {
        let (code, out, _) = run_args(&["compute", "--N", "1", "--alpha", "0", "--c", "1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let a: Vec<&str> = v["coeffs"].as_array().unwrap().iter().map(|r| r["a_sq"].as_str().unwrap()).collect();
        assert_eq!(a, ["0", "1/4", "0"]);
    }

    #[test]
    fn bad_alpha_names_the_precondition() {
        let (code, _, err) = run_args(&["compute", "--N", "3", "--alpha", "1", "--c", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("alpha < 1"));
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(run_args(&["compute", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn negative_values_parse() {
        let (code, out, _) = run_args(&["compute", "--N", "2", "--alpha", "-1/2", "--c", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("n,a_sq,b\n0,0,"));
    }

    #[test]
    fn compare_reports_entry_count() {
        let (code, out, _) = run_args(&["compare", "--N", "20", "--alpha", "1/2", "--c", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("identical (42 entries)"), "{out}");
    }

    #[test]
    fn tamper_parsing() {
        let t = parse_tamper("3:1e-3").unwrap();
        assert_eq!(t.index, 3);
        assert!(parse_tamper("3").is_err());
        assert!(parse_tamper("x:1").is_err());
    }

    #[test]
    fn mismatch_is_located() {
        let p = WeightParams::parse(3, "0", "1").unwrap();
        let a = stieltjes(&p).unwrap();
        let mut b = a.clone();
        b.b[2] += parse_rational("1").unwrap();
        assert_eq!(first_difference(&a, &a), None);
        assert_eq!(first_difference(&a, &b), Some(("b", 2)));
    }

    #[test]
    fn figure_two_parses_exactly() {
        let (size, alpha, c) = figure_params(2).unwrap();
        let p = WeightParams::parse(size, alpha, c).unwrap();
        assert_eq!(p.alpha(), &parse_rational("4/5").unwrap());
        assert!(figure_params(5).is_none());
    }
}
