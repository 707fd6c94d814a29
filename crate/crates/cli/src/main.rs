//! Command-line front end: every library operation behind one binary, with
//! text, json, and csv reports. Exact numbers cross the text boundary as
//! rationals "p/q" (complex "a+bi" with rational parts), polynomials as
//! comma-separated ascending coefficients.
//!
//! Exit codes double as a regression gate: 0 on success, 2 when an identity
//! check lands outside its tolerance, 1 on input errors.

use std::collections::{BTreeMap, BTreeSet};

use clap::{Parser, Subcommand, ValueEnum};
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::Serialize;

use gammaprod::accel::{
    self, accelerate_product, accelerate_sum, digits_table, kepler_bouwkamp_reference,
    zeta_approx, FactorSpec, Outer, Scale,
};
use gammaprod::gammaid::{
    chowla_selberg_check, nijenhuis_coset, totient_gamma_product, zetasumphi_check, CoprimeSet,
};
use gammaprod::mp::poly::{CPoly, Poly, RatPoly};
use gammaprod::mp::{self};
use gammaprod::ratprod::{self, GammaQuotient, Prefactor, RationalFunctionSpec};
use gammaprod::thuemorse::{
    block_product_lhs_gamma, fm_eval, limit_f, prouhet_check, q_estimate, ProductRoute,
};
use gammaprod::CheckReport;

#[derive(Parser)]
#[command(
    name = "gammaprod",
    version,
    about = "Evaluates convergent rational products in gamma closed form, folds slow tails \
             through diagonal approximants, and certifies a catalog of gamma-value identities"
)]
struct Cli {
    /// Output format; tables emit text or csv only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Decimal digits to target. Falls back to $GAMMAPROD_DIGITS, then 30
    /// (tables: 200, the grid's working precision).
    #[arg(long, global = true)]
    digits: Option<u32>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form value of the product of num(k)/den(k) over k >= start.
    ProdRational {
        /// Numerator coefficients, ascending; rational "p/q" or complex "a+bi".
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        /// Denominator coefficients, ascending.
        #[arg(long, allow_hyphen_values = true)]
        den: String,
        /// First index of the product.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        start: i64,
        /// Indices to skip, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        exclude: Option<String>,
    },
    /// Product of f(c/k^power) over k >= start, tail-folded at the given order.
    ProdAccelerate {
        #[arg(long, value_enum)]
        outer: OuterKind,
        /// Coefficients of the polynomial outer, ascending; constant term 1.
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        /// The constant c: "p/q", "pi", or "p/q*pi".
        #[arg(long, allow_hyphen_values = true)]
        scale: String,
        /// Index exponent d in f(c/k^d).
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        start: i64,
        /// Diagonal approximant order.
        #[arg(long)]
        order: usize,
        /// First index folded through the approximant instead of multiplied.
        #[arg(long = "tail-start")]
        tail_start: i64,
    },
    /// Sum of num(k)/den(k) over k >= start, tail-folded through exp.
    SumAccelerate {
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        #[arg(long, allow_hyphen_values = true)]
        den: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        start: i64,
        #[arg(long)]
        order: usize,
        #[arg(long = "tail-start")]
        tail_start: i64,
    },
    /// zeta(m) through the order-n fold of the defining product.
    Zeta {
        /// Zeta argument, at least 2.
        #[arg(long)]
        m: u32,
        /// Diagonal approximant order.
        #[arg(long)]
        order: usize,
    },
    /// Gamma products over coprime residues of n, checked against closed forms.
    GammaId {
        #[arg(long)]
        n: i64,
        #[arg(long, value_enum, default_value_t = IdCheck::Totient)]
        check: IdCheck,
        /// Series cutoff for the zetasumphi check.
        #[arg(long = "k-max", default_value_t = 200)]
        k_max: u32,
    },
    /// Coset gamma products modulo 2n and the rational product they induce.
    Nijenhuis {
        /// Odd n > 1; the coset group lives modulo 2n.
        #[arg(long)]
        n: i64,
        /// Coset representative, coprime to 2n.
        #[arg(long, default_value_t = 1)]
        rep: i64,
    },
    /// Two-sided class number formula check for discriminant -d.
    ChowlaSelberg {
        #[arg(long)]
        d: i64,
    },
    /// Sign-sequence identities and cutoff limits.
    ThueMorse {
        #[arg(long, value_enum)]
        check: TmCheck,
        /// Block or cutoff exponent; defaulted per check.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Accuracy grids: "kb" over orders x tail starts, or a "zeta" digit row.
    Tables {
        #[arg(long, value_enum)]
        which: TableKind,
        /// Approximant orders, comma separated.
        #[arg(long)]
        n: String,
        /// Tail starts for the kb grid, comma separated.
        #[arg(long = "N")]
        tail_starts: Option<String>,
        /// Zeta argument for the zeta row.
        #[arg(long, default_value_t = 3)]
        m: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum OuterKind {
    Cos,
    Exp,
    Poly,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum IdCheck {
    Totient,
    Zetasumphi,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum TmCheck {
    Duplication,
    Blocks,
    Prouhet,
    Limits,
    Q,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum TableKind {
    Kb,
    Zeta,
}

/// Everything that determines a run. Rebuilt from any json report: the
/// params map holds exactly the flags (defaults filled in), so feeding them
/// back reproduces the invocation bit for bit.
#[derive(Debug, Clone, PartialEq)]
struct JobSpec {
    command: &'static str,
    params: BTreeMap<String, String>,
    digits: u32,
    format: Format,
}

impl JobSpec {
    fn new(command: &'static str, digits: u32, format: Format) -> Self {
        let mut params = BTreeMap::new();
        params.insert("digits".into(), digits.to_string());
        JobSpec {
            command,
            params,
            digits,
            format,
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }
}

#[derive(Serialize)]
struct Report {
    command: String,
    params: BTreeMap<String, String>,
    value: Option<ValueJson>,
    closed_form: Option<String>,
    checks: Vec<CheckJson>,
    version: &'static str,
    /// Extra human-oriented lines for text mode; never serialized.
    #[serde(skip)]
    notes: Vec<String>,
}

#[derive(Serialize)]
struct ValueJson {
    re: String,
    im: String,
    digits: f64,
}

#[derive(Serialize)]
struct CheckJson {
    name: String,
    pass: bool,
    delta: f64,
}

impl Report {
    fn build(
        job: &JobSpec,
        value: Option<ValueJson>,
        closed_form: Option<String>,
        checks: Vec<CheckJson>,
    ) -> Self {
        Report {
            command: job.command.to_string(),
            params: job.params.clone(),
            value,
            closed_form,
            checks,
            version: env!("CARGO_PKG_VERSION"),
            notes: Vec::new(),
        }
    }

    fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }

    fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| !c.pass)
    }
}

fn check_json(report: &CheckReport) -> CheckJson {
    CheckJson {
        name: report.name.clone(),
        pass: report.pass,
        delta: report.abs_diff.to_f64(),
    }
}

fn float_string(f: &Float) -> String {
    f.to_string_radix(10, None)
}

fn value_json_complex(c: &Complex, digits: f64) -> ValueJson {
    ValueJson {
        re: float_string(c.real()),
        im: float_string(c.imag()),
        digits,
    }
}

fn value_json_real(f: &Float, digits: f64) -> ValueJson {
    ValueJson {
        re: float_string(f),
        im: "0".into(),
        digits,
    }
}

/// Gamma arguments at 25 digits. Imaginary parts far below the printed
/// resolution are root-finding noise on a real root and are dropped.
fn format_arg(c: &Complex) -> String {
    let re = c.real().to_string_radix(10, Some(25));
    let noise = Float::with_val(64, c.real())
        .abs()
        .max(&Float::with_val(64, 1u32))
        * Float::with_val(64, 1e-40);
    if c.imag().is_zero() || Float::with_val(64, c.imag()).abs() < noise {
        return re;
    }
    let im = c.imag().to_string_radix(10, Some(25));
    if c.imag().is_sign_negative() {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

fn quotient_text(prefactor: &Prefactor, num: Vec<String>, den: Vec<String>) -> String {
    let mut out = String::new();
    if !prefactor.is_one() {
        match prefactor {
            Prefactor::Exact(r) => out.push_str(&format!("{r} * ")),
            Prefactor::Big(c) => out.push_str(&format!("{} * ", format_arg(c))),
        }
    }
    if num.is_empty() && den.is_empty() {
        out.push('1');
        return out;
    }
    out.push_str(&if num.is_empty() { "1".into() } else { num.join(" ") });
    if !den.is_empty() {
        out.push_str(&format!(" / [{}]", den.join(" ")));
    }
    out
}

fn format_quotient(gq: &GammaQuotient) -> String {
    let num = gq.num_args.iter().map(|a| format!("G({})", format_arg(a))).collect();
    let den = gq.den_args.iter().map(|a| format!("G({})", format_arg(a))).collect();
    quotient_text(&gq.prefactor, num, den)
}

/// Exact display when both polynomials factor completely over the
/// rationals: every gamma argument is then a known p/q. Decimal arguments
/// from [format_quotient] are the fallback.
fn exact_quotient_text(spec: &RationalFunctionSpec, gq: &GammaQuotient) -> Option<String> {
    let (num_roots, num_rem) = spec.num.exact()?.rational_roots();
    let (den_roots, den_rem) = spec.den.exact()?.rational_roots();
    if num_rem.degree() > 0 || den_rem.degree() > 0 {
        return None;
    }
    let start = Rational::from(spec.start);
    let arg_list = |roots: &[Rational]| {
        let mut args: Vec<Rational> = roots.iter().map(|r| Rational::from(&start - r)).collect();
        args.sort();
        args.iter().map(|a| format!("G({a})")).collect::<Vec<_>>()
    };
    Some(quotient_text(&gq.prefactor, arg_list(&den_roots), arg_list(&num_roots)))
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim().trim_start_matches('+');
    t.parse::<Rational>()
        .map_err(|_| format!("'{s}' is not a rational (expected p or p/q)"))
}

/// "a+bi" with rational parts; plain rationals have zero imaginary part.
fn parse_complex(s: &str) -> Result<(Rational, Rational), String> {
    let t: String = s.trim().chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok((parse_rational(&t)?, Rational::new()));
    };
    let split = body
        .char_indices()
        .rev()
        .find(|&(pos, c)| (c == '+' || c == '-') && pos > 0)
        .map(|(pos, _)| pos);
    match split {
        Some(pos) => {
            let re = parse_rational(&body[..pos])?;
            let imtxt = &body[pos..];
            let im = match imtxt {
                "+" => Rational::from(1),
                "-" => Rational::from(-1),
                _ => parse_rational(imtxt)?,
            };
            Ok((re, im))
        }
        None => {
            let im = match body {
                "" => Rational::from(1),
                "-" => Rational::from(-1),
                _ => parse_rational(body)?,
            };
            Ok((Rational::new(), im))
        }
    }
}

/// Ascending coefficient list; any complex entry switches the whole
/// polynomial to the big route at `prec` bits.
fn parse_poly(s: &str, prec: u32) -> Result<Poly, String> {
    let entries: Vec<(Rational, Rational)> = s
        .split(',')
        .map(parse_complex)
        .collect::<Result<_, _>>()?;
    if entries.is_empty() {
        return Err("empty coefficient list".into());
    }
    if entries.iter().all(|(_, im)| im.cmp0() == std::cmp::Ordering::Equal) {
        let coeffs = entries.into_iter().map(|(re, _)| re).collect();
        Ok(Poly::Exact(RatPoly::new(coeffs)))
    } else {
        let coeffs = entries
            .into_iter()
            .map(|(re, im)| {
                Complex::with_val(
                    prec,
                    (
                        mp::float_from_rational(&re, prec),
                        mp::float_from_rational(&im, prec),
                    ),
                )
            })
            .collect();
        Ok(Poly::Big(CPoly::new(prec, coeffs)))
    }
}

fn parse_exact_poly(s: &str) -> Result<RatPoly, String> {
    let coeffs: Vec<Rational> = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<_, _>>()?;
    if coeffs.is_empty() {
        return Err("empty coefficient list".into());
    }
    Ok(RatPoly::new(coeffs))
}

/// "p/q", "pi", or "p/q*pi".
fn parse_scale(s: &str) -> Result<Scale, String> {
    let t = s.trim();
    if t == "pi" {
        return Ok(Scale::PiRational(Rational::from(1)));
    }
    if let Some(front) = t.strip_suffix("*pi") {
        return Ok(Scale::PiRational(parse_rational(front)?));
    }
    Ok(Scale::Rational(parse_rational(t)?))
}

fn parse_i64_list(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| format!("'{t}' is not an integer"))
        })
        .collect()
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("'{t}' is not a nonnegative integer"))
        })
        .collect()
}

/// Prefix a parse failure with the flag it came from.
fn flagged<T>(flag: &str, parsed: Result<T, String>) -> Result<T, String> {
    parsed.map_err(|e| format!("--{flag}: {e}"))
}

fn effective_digits(flag: Option<u32>, fallback: u32) -> Result<u32, String> {
    let digits = match flag {
        Some(d) => d,
        None => match std::env::var("GAMMAPROD_DIGITS") {
            Ok(s) => s
                .trim()
                .parse::<u32>()
                .map_err(|_| format!("GAMMAPROD_DIGITS='{s}' is not a digit count"))?,
            Err(_) => fallback,
        },
    };
    if digits == 0 {
        return Err("digits must be at least 1".into());
    }
    Ok(digits)
}

fn decimal_tolerance(digits: u32) -> Float {
    Float::with_val(64, 10).pow(-(digits.max(3) as i32 - 2))
}

fn distinct_prime_factors(n: i64) -> Vec<i64> {
    let mut rest = n.abs();
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            primes.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    primes
}

fn main() {
    // Die quietly when the reader closes the pipe (e.g. piping into `head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    exit_code(run(cli))
}

/// 0 on success, 2 when a check failed its tolerance, 1 on input errors.
fn exit_code(outcome: Result<bool, String>) -> i32 {
    match outcome {
        Ok(identity_failed) => {
            if identity_failed {
                2
            } else {
                0
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let format = cli.format;
    if let Cmd::Tables { .. } = cli.command {
        if format == Format::Json {
            return Err("tables emit csv or text; use --format csv".into());
        }
    } else if format == Format::Csv {
        return Err("csv output is only defined for tables".into());
    }

    let fallback = if matches!(cli.command, Cmd::Tables { .. }) {
        200
    } else {
        30
    };
    let digits = effective_digits(cli.digits, fallback)?;

    let report = match &cli.command {
        Cmd::ProdRational {
            num,
            den,
            start,
            exclude,
        } => cmd_prod_rational(num, den, *start, exclude.as_deref(), digits, format)?,
        Cmd::ProdAccelerate {
            outer,
            poly,
            scale,
            power,
            start,
            order,
            tail_start,
        } => cmd_prod_accelerate(
            *outer,
            poly.as_deref(),
            scale,
            *power,
            *start,
            *order,
            *tail_start,
            digits,
            format,
        )?,
        Cmd::SumAccelerate {
            num,
            den,
            start,
            order,
            tail_start,
        } => cmd_sum_accelerate(num, den, *start, *order, *tail_start, digits, format)?,
        Cmd::Zeta { m, order } => cmd_zeta(*m, *order, digits, format)?,
        Cmd::GammaId { n, check, k_max } => cmd_gamma_id(*n, *check, *k_max, digits, format)?,
        Cmd::Nijenhuis { n, rep } => cmd_nijenhuis(*n, *rep, digits, format)?,
        Cmd::ChowlaSelberg { d } => cmd_chowla_selberg(*d, digits, format)?,
        Cmd::ThueMorse { check, m } => cmd_thue_morse(*check, *m, digits, format)?,
        Cmd::Tables {
            which,
            n,
            tail_starts,
            m,
        } => {
            let text = cmd_tables(*which, n, tail_starts.as_deref(), *m, digits, format)?;
            print!("{text}");
            return Ok(false);
        }
    };

    emit(&report, format);
    Ok(report.any_failed())
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(report).expect("report serializes")
            );
        }
        _ => {
            println!("command: {}", report.command);
            for (k, v) in &report.params {
                println!("  {k} = {v}");
            }
            if let Some(v) = &report.value {
                // A numerically found real product carries rounding noise in
                // the imaginary slot; keep the text line real when that noise
                // sits below the certified digits. Json always has both parts.
                let im_mag = v.im.parse::<f64>().map(f64::abs).unwrap_or(f64::NAN);
                let re_mag = v.re.parse::<f64>().map(f64::abs).unwrap_or(0.0).max(1.0);
                if im_mag == 0.0 || im_mag < re_mag * 10f64.powf(-v.digits) {
                    println!("value: {}", v.re);
                } else {
                    println!("value: {} + ({})i", v.re, v.im);
                }
                println!("digits: {:.2}", v.digits);
            }
            if let Some(cf) = &report.closed_form {
                println!("closed form: {cf}");
            }
            for line in &report.notes {
                println!("{line}");
            }
            for c in &report.checks {
                let verdict = if c.pass { "pass" } else { "FAIL" };
                println!("check: {} -> {verdict} (|delta| = {:.3e})", c.name, c.delta);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_prod_rational(
    num: &str,
    den: &str,
    start: i64,
    exclude: Option<&str>,
    digits: u32,
    format: Format,
) -> Result<Report, String> {
    let mut job = JobSpec::new("prod-rational", digits, format)
        .param("num", num)
        .param("den", den)
        .param("start", start);
    let excluded: BTreeSet<i64> = match exclude {
        Some(s) => {
            job = job.param("exclude", s);
            flagged("exclude", parse_i64_list(s))?.into_iter().collect()
        }
        None => BTreeSet::new(),
    };
    let wp = mp::bits_for(digits) + 64;
    let spec = RationalFunctionSpec::new(
        flagged("num", parse_poly(num, wp))?,
        flagged("den", parse_poly(den, wp))?,
        start,
        excluded,
    )
    .map_err(|e| e.to_string())?;
    let evaluation = ratprod::evaluate(&spec, digits).map_err(|e| e.to_string())?;
    let closed = exact_quotient_text(&spec, &evaluation.closed_form)
        .unwrap_or_else(|| format_quotient(&evaluation.closed_form));
    Ok(Report::build(
        &job,
        Some(value_json_complex(
            &evaluation.value,
            evaluation.digits_certified as f64,
        )),
        Some(closed),
        vec![],
    )
    .note(format!(
        "head terms: {}, exclusions: {}",
        evaluation.diagnostics.head_terms, evaluation.diagnostics.exclusions_applied
    )))
}

#[allow(clippy::too_many_arguments)]
fn cmd_prod_accelerate(
    outer: OuterKind,
    poly: Option<&str>,
    scale: &str,
    power: u32,
    start: i64,
    order: usize,
    tail_start: i64,
    digits: u32,
    format: Format,
) -> Result<Report, String> {
    let mut job = JobSpec::new("prod-accelerate", digits, format)
        .param("outer", format!("{outer:?}").to_lowercase())
        .param("scale", scale)
        .param("power", power)
        .param("start", start)
        .param("order", order)
        .param("tail-start", tail_start);
    let outer = match outer {
        OuterKind::Cos => Outer::Cos,
        OuterKind::Exp => Outer::Exp,
        OuterKind::Poly => {
            let coeffs = poly.ok_or("--outer poly needs --poly coefficients")?;
            job = job.param("poly", coeffs);
            Outer::Poly(flagged("poly", parse_exact_poly(coeffs))?)
        }
    };
    let f = FactorSpec::new(outer, flagged("scale", parse_scale(scale))?, power, start).map_err(|e| e.to_string())?;
    let result = accelerate_product(&f, order, tail_start, digits).map_err(|e| e.to_string())?;
    Ok(accel_report(job, &result))
}

fn accel_report(job: JobSpec, result: &accel::AccelResult) -> Report {
    Report::build(
        &job,
        Some(value_json_real(&result.value, result.digits_estimate)),
        Some(format_quotient(&result.closed_form)),
        vec![],
    )
    .note(format!(
        "fold order used: {}, head terms: {}",
        result.order, result.head_terms
    ))
}

fn cmd_sum_accelerate(
    num: &str,
    den: &str,
    start: i64,
    order: usize,
    tail_start: i64,
    digits: u32,
    format: Format,
) -> Result<Report, String> {
    let job = JobSpec::new("sum-accelerate", digits, format)
        .param("num", num)
        .param("den", den)
        .param("start", start)
        .param("order", order)
        .param("tail-start", tail_start);
    let result = accelerate_sum(
        &flagged("num", parse_exact_poly(num))?,
        &flagged("den", parse_exact_poly(den))?,
        start,
        order,
        tail_start,
        digits,
    )
    .map_err(|e| e.to_string())?;
    Ok(accel_report(job, &result))
}

fn cmd_zeta(m: u32, order: usize, digits: u32, format: Format) -> Result<Report, String> {
    let job = JobSpec::new("zeta", digits, format)
        .param("m", m)
        .param("order", order);
    let value = zeta_approx(m, order, digits).map_err(|e| e.to_string())?;
    Ok(Report::build(
        &job,
        Some(value_json_real(&value, digits as f64)),
        None,
        vec![],
    ))
}

fn cmd_gamma_id(
    n: i64,
    check: IdCheck,
    k_max: u32,
    digits: u32,
    format: Format,
) -> Result<Report, String> {
    match check {
        IdCheck::Totient => {
            let job = JobSpec::new("gamma-id", digits, format)
                .param("n", n)
                .param("check", "totient");
            let (closed, report) = totient_gamma_product(n, digits).map_err(|e| e.to_string())?;
            let phi = CoprimeSet::new(n).map_err(|e| e.to_string())?.phi();
            let primes = distinct_prime_factors(n);
            let closed_form = if primes.len() == 1 {
                format!("(2*pi)^({phi}/2) / sqrt({})", primes[0])
            } else {
                format!("(2*pi)^({phi}/2)")
            };
            Ok(Report::build(
                &job,
                Some(value_json_real(&closed, digits as f64)),
                Some(closed_form),
                vec![check_json(&report)],
            ))
        }
        IdCheck::Zetasumphi => {
            let job = JobSpec::new("gamma-id", digits, format)
                .param("n", n)
                .param("check", "zetasumphi")
                .param("k-max", k_max);
            let report = zetasumphi_check(n, k_max, digits).map_err(|e| e.to_string())?;
            Ok(Report::build(
                &job,
                Some(value_json_real(&report.lhs, digits as f64)),
                Some("(log(2*pi) - euler_gamma)/2".into()),
                vec![check_json(&report)],
            ))
        }
    }
}

fn cmd_nijenhuis(n: i64, rep: i64, digits: u32, format: Format) -> Result<Report, String> {
    let job = JobSpec::new("nijenhuis", digits, format)
        .param("n", n)
        .param("rep", rep);
    let coset = nijenhuis_coset(n, rep, digits).map_err(|e| e.to_string())?;
    let (spec, expected) =
        gammaprod::gammaid::coset_to_rational_product(&coset.members, coset.modulus)
            .map_err(|e| e.to_string())?;
    let engine = ratprod::evaluate(&spec, digits).map_err(|e| e.to_string())?;
    let engine_check = CheckReport::new_relative(
        "engine rational product",
        Float::with_val(engine.value.prec().0, engine.value.real()),
        mp::float_from_rational(&expected, engine.value.prec().0),
        decimal_tolerance(digits),
    );
    let closed = format!(
        "2^{} * pi^({}/2); rational product {}",
        coset.b,
        coset.members.len(),
        expected
    );
    Ok(Report::build(
        &job,
        Some(value_json_real(&coset.gamma_check.lhs, digits as f64)),
        Some(closed),
        vec![
            check_json(&coset.gamma_check),
            check_json(&coset.ratio_check),
            check_json(&engine_check),
        ],
    )
    .note(format!("coset members mod {}: {:?}", coset.modulus, coset.members)))
}

fn cmd_chowla_selberg(d: i64, digits: u32, format: Format) -> Result<Report, String> {
    let job = JobSpec::new("chowla-selberg", digits, format).param("d", d);
    let report = chowla_selberg_check(d, digits).map_err(|e| e.to_string())?;
    Ok(Report::build(
        &job,
        Some(value_json_real(&report.lhs, digits as f64)),
        None,
        vec![check_json(&report)],
    ))
}

fn cmd_thue_morse(
    check: TmCheck,
    m: Option<u32>,
    digits: u32,
    format: Format,
) -> Result<Report, String> {
    let name = match check {
        TmCheck::Duplication => "duplication",
        TmCheck::Blocks => "blocks",
        TmCheck::Prouhet => "prouhet",
        TmCheck::Limits => "limits",
        TmCheck::Q => "q",
    };
    let m = m.unwrap_or(match check {
        TmCheck::Duplication => 6,
        TmCheck::Blocks => 3,
        TmCheck::Prouhet => 8,
        TmCheck::Limits => 16,
        TmCheck::Q => 20,
    });
    let job = JobSpec::new("thue-morse", digits, format)
        .param("check", name)
        .param("m", m);
    let prec = mp::bits_for(digits) + 32;
    match check {
        TmCheck::Duplication => {
            let mut checks = Vec::new();
            for x in [
                Rational::from((1, 3)),
                Rational::from((2, 5)),
                Rational::from((7, 2)),
                Rational::from((-13, 4)),
            ] {
                let lhs = fm_eval(m + 1, &Rational::from(2 * x.clone()))
                    .and_then(|a| {
                        Ok(a * fm_eval(m, &Rational::from(&x + Rational::from((1, 2))))?)
                    })
                    .map_err(|e| e.to_string())?;
                let rhs = fm_eval(m, &x).map_err(|e| e.to_string())?;
                checks.push(CheckJson {
                    name: format!("duplication at x={x}"),
                    pass: lhs == rhs,
                    delta: 0.0,
                });
            }
            Ok(Report::build(&job, None, None, checks))
        }
        TmCheck::Blocks => {
            let reports = block_product_lhs_gamma(m, digits).map_err(|e| e.to_string())?;
            let gamma = &reports[0];
            let exact = reports
                .iter()
                .find(|r| r.route == ProductRoute::Factorial)
                .and_then(|r| r.exact_value.clone())
                .expect("factorial route carries the exact value");
            let delta = Float::with_val(
                64,
                &gamma.numeric_value
                    - mp::float_from_rational(&exact, gamma.numeric_value.prec()),
            )
            .abs();
            let checks = vec![CheckJson {
                name: "infinite product against the exact block value".into(),
                pass: delta <= decimal_tolerance(digits),
                delta: delta.to_f64(),
            }];
            Ok(Report::build(
                &job,
                Some(value_json_real(&gamma.numeric_value, digits as f64)),
                Some(exact.to_string()),
                checks,
            ))
        }
        TmCheck::Prouhet => {
            let report = prouhet_check(m).map_err(|e| e.to_string())?;
            let checks = vec![CheckJson {
                name: format!("power sums balance below {m} and split at {m}"),
                pass: report.first_failure == m,
                delta: (i64::from(report.first_failure) - i64::from(m)).unsigned_abs() as f64,
            }];
            Ok(Report::build(&job, None, None, checks))
        }
        TmCheck::Limits => {
            let p = limit_f(&Rational::from(1), m, prec).map_err(|e| e.to_string())?;
            let h = limit_f(&Rational::from((1, 2)), m, prec).map_err(|e| e.to_string())?;
            let root_half = Float::with_val(prec, 0.5f32).sqrt();
            let p_gap = Float::with_val(64, &p.estimate - root_half).abs();
            let h_gap = Float::with_val(64, &h.estimate - 0.5f32).abs();
            let digits_est = -p.uncertainty.to_f64().max(f64::MIN_POSITIVE).log10();
            let checks = vec![
                CheckJson {
                    name: "f(1) within its uncertainty of 1/sqrt(2)".into(),
                    pass: p_gap <= p.uncertainty,
                    delta: p_gap.to_f64(),
                },
                CheckJson {
                    name: "f(1/2) within its uncertainty of 1/2".into(),
                    pass: h_gap <= h.uncertainty,
                    delta: h_gap.to_f64(),
                },
            ];
            Ok(Report::build(
                &job,
                Some(value_json_real(&p.estimate, digits_est)),
                None,
                checks,
            )
            .note(format!(
                "f(1) uncertainty: {:.3e}, f(1/2) uncertainty: {:.3e}",
                p.uncertainty.to_f64(),
                h.uncertainty.to_f64()
            )))
        }
        TmCheck::Q => {
            let (q, check) = q_estimate(m, prec).map_err(|e| e.to_string())?;
            let digits_est = -q.uncertainty.to_f64().max(f64::MIN_POSITIVE).log10();
            Ok(Report::build(
                &job,
                Some(value_json_real(&q.estimate, digits_est)),
                None,
                vec![check_json(&check)],
            )
            .note(format!("uncertainty: {:.3e}", q.uncertainty.to_f64())))
        }
    }
}

fn cmd_tables(
    which: TableKind,
    n: &str,
    tail_starts: Option<&str>,
    m: u32,
    digits: u32,
    format: Format,
) -> Result<String, String> {
    let orders = flagged("n", parse_usize_list(n))?;
    if orders.is_empty() {
        return Err("need at least one order".into());
    }
    match which {
        TableKind::Kb => {
            let tails = flagged("N", parse_i64_list(tail_starts.ok_or("the kb grid needs --N tail starts")?))?;
            if tails.is_empty() {
                return Err("need at least one tail start".into());
            }
            let f = FactorSpec::new(
                Outer::Cos,
                Scale::PiRational(Rational::from(1)),
                1,
                3,
            )
            .map_err(|e| e.to_string())?;
            let grid = digits_table(&f, &orders, &tails, kepler_bouwkamp_reference(), digits)
                .map_err(|e| e.to_string())?;
            let mut rows = Vec::with_capacity(orders.len() + 1);
            let header: Vec<String> = std::iter::once("n\\N".to_string())
                .chain(tails.iter().map(|t| t.to_string()))
                .collect();
            rows.push(header);
            for (row, &order) in grid.iter().zip(&orders) {
                rows.push(
                    std::iter::once(order.to_string())
                        .chain(row.iter().map(|d| format!("{d:.4}")))
                        .collect(),
                );
            }
            Ok(render_rows(&rows, format))
        }
        TableKind::Zeta => {
            let wp = mp::bits_for(digits) + 32;
            let reference = mp::zeta_int(m, wp);
            let mut rows = vec![vec!["n".to_string(), "digits".to_string()]];
            for &order in &orders {
                let value = zeta_approx(m, order, digits).map_err(|e| e.to_string())?;
                let gap = Float::with_val(64, &value - &reference).abs();
                let agreement = if gap.is_zero() {
                    mp::digits_capacity(wp) as f64
                } else {
                    -gap.to_f64().log10()
                };
                rows.push(vec![order.to_string(), format!("{agreement:.4}")]);
            }
            Ok(render_rows(&rows, format))
        }
    }
}

fn render_rows(rows: &[Vec<String>], format: Format) -> String {
    match format {
        Format::Csv => rows
            .iter()
            .map(|r| r.join(","))
            .collect::<Vec<_>>()
            .join("\n")
            + "\n",
        _ => {
            let widths: Vec<usize> = (0..rows[0].len())
                .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
                .collect();
            rows.iter()
                .map(|r| {
                    r.iter()
                        .zip(&widths)
                        .map(|(cell, w)| format!("{cell:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                })
                .collect::<Vec<_>>()
                .join("\n")
                + "\n"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parser_accepts_signs_and_quotients() {
        assert_eq!(parse_rational("3/4").unwrap(), Rational::from((3, 4)));
        assert_eq!(parse_rational(" -7 ").unwrap(), Rational::from(-7));
        assert_eq!(parse_rational("+2/6").unwrap(), Rational::from((1, 3)));
        assert!(parse_rational("3.5").is_err());
        assert!(parse_rational("a").is_err());
    }

    #[test]
    fn complex_parser_splits_the_last_sign() {
        let q = |p: i64, d: u64| Rational::from((p, d));
        assert_eq!(parse_complex("3/4-2/5i").unwrap(), (q(3, 4), q(-2, 5)));
        assert_eq!(parse_complex("-1/2+3i").unwrap(), (q(-1, 2), q(3, 1)));
        assert_eq!(parse_complex("i").unwrap(), (q(0, 1), q(1, 1)));
        assert_eq!(parse_complex("-i").unwrap(), (q(0, 1), q(-1, 1)));
        assert_eq!(parse_complex("5i").unwrap(), (q(0, 1), q(5, 1)));
        assert_eq!(parse_complex("1+i").unwrap(), (q(1, 1), q(1, 1)));
        assert_eq!(parse_complex("7/2").unwrap(), (q(7, 2), q(0, 1)));
        assert!(parse_complex("1+2j").is_err());
    }

    #[test]
    fn scale_parser_handles_pi_multiples() {
        assert!(matches!(parse_scale("pi").unwrap(), Scale::PiRational(r) if r == 1));
        assert!(matches!(parse_scale("2/3*pi").unwrap(), Scale::PiRational(r) if r == Rational::from((2, 3))));
        assert!(matches!(parse_scale("-5/2").unwrap(), Scale::Rational(r) if r == Rational::from((-5, 2))));
        assert!(parse_scale("two*pi").is_err());
    }

    #[test]
    fn poly_parser_picks_the_exact_route_for_rationals() {
        match parse_poly("4,8,4", 64).unwrap() {
            Poly::Exact(p) => assert_eq!(p.degree(), 2),
            other => panic!("expected the exact route, got {other:?}"),
        }
        match parse_poly("1,1+i", 64).unwrap() {
            Poly::Big(p) => assert_eq!(p.degree(), 1),
            other => panic!("expected the big route, got {other:?}"),
        }
        assert!(parse_poly("", 64).is_err());
    }

    #[test]
    fn exit_code_comes_from_check_outcomes() {
        let job = JobSpec::new("prod-rational", 30, Format::Text);
        let mut report = Report::build(&job, None, None, vec![]);
        assert!(!report.any_failed());
        assert_eq!(exit_code(Ok(report.any_failed())), 0);
        report.checks.push(CheckJson {
            name: "synthetic".into(),
            pass: false,
            delta: 1.0,
        });
        assert!(report.any_failed());
        assert_eq!(exit_code(Ok(report.any_failed())), 2);
        assert_eq!(exit_code(Err("bad input".into())), 1);
    }

    #[test]
    fn digit_fallback_validates() {
        assert_eq!(effective_digits(Some(50), 30).unwrap(), 50);
        assert!(effective_digits(Some(0), 30).is_err());
    }

    #[test]
    fn fully_rational_specs_print_exact_arguments() {
        let spec = RationalFunctionSpec::new(
            parse_poly("4,8,4", 64).unwrap(),
            parse_poly("3,8,4", 64).unwrap(),
            0,
            BTreeSet::new(),
        )
        .unwrap();
        let evaluation = ratprod::evaluate(&spec, 10).unwrap();
        let text = exact_quotient_text(&spec, &evaluation.closed_form).unwrap();
        assert_eq!(text, "G(1/2) G(3/2) / [G(1) G(1)]");

        // An irreducible quadratic denominator forces the decimal fallback.
        let spec = RationalFunctionSpec::new(
            parse_poly("1,2,1", 64).unwrap(),
            parse_poly("2,2,1", 64).unwrap(),
            1,
            BTreeSet::new(),
        )
        .unwrap();
        let evaluation = ratprod::evaluate(&spec, 10).unwrap();
        assert!(exact_quotient_text(&spec, &evaluation.closed_form).is_none());
    }

    #[test]
    fn quotient_formatting_is_compact() {
        let gq = GammaQuotient::new(
            vec![Complex::with_val(64, 2)],
            vec![Complex::with_val(64, (1, 1))],
            Prefactor::Exact(Rational::from((3, 2))),
        )
        .unwrap();
        let text = format_quotient(&gq);
        assert!(text.starts_with("3/2 * G(2"), "{text}");
        assert!(text.contains("+1.000"), "{text}");
    }
}
