//! The closed-form engine for infinite products of rational functions.
//!
//! A product ∏_{k≥k0} num(k)/den(k) converges to a nonzero value exactly when
//! the two polynomials share degree, leading coefficient, and subleading
//! coefficient (the root sums agree). In that case the value is a finite
//! quotient of gamma functions: writing the product over k ≥ s as
//! ∏ num(k)/den(k) with roots ρ, the value is
//! ∏_ρ∈den Γ(s − ρ) / ∏_ρ∈num Γ(s − ρ), and any factors between k0 and s
//! (the head) multiply in exactly. Excluded indices are handled by raising s
//! past them, so removed-term products (where the excluded factor vanishes)
//! need no special casing.

pub mod apps;

use crate::error::{Error, Result};
use crate::mp::{self, gamma, poly::Poly, roots};
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

/// How far the integer zero/pole scan walks past the start index. Roots
/// beyond this window are still caught: exact specs fall back to rational
/// root extraction, and every spec is re-checked when the gamma arguments
/// are formed.
const SCAN_WINDOW: i64 = 100_000;

/// One factor family num(k)/den(k) with its start index and any indices the
/// product skips.
#[derive(Debug, Clone)]
pub struct RationalFunctionSpec {
    pub num: Poly,
    pub den: Poly,
    pub start: i64,
    pub excluded: BTreeSet<i64>,
}

impl RationalFunctionSpec {
    pub fn new(num: Poly, den: Poly, start: i64, excluded: BTreeSet<i64>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Precondition(
                "denominator is identically zero".into(),
            ));
        }
        if num.is_zero() {
            return Err(Error::Precondition("numerator is identically zero".into()));
        }
        if start < 0 {
            return Err(Error::Precondition("start index must be nonnegative".into()));
        }
        if let Some(&bad) = excluded.iter().find(|&&m| m < start) {
            return Err(Error::Precondition(format!(
                "excluded index {bad} lies before the start index {start}"
            )));
        }
        Ok(RationalFunctionSpec {
            num,
            den,
            start,
            excluded,
        })
    }

    /// Exact-integer-coefficient convenience constructor.
    pub fn from_integers(num: &[i64], den: &[i64], start: i64) -> Result<Self> {
        Self::new(
            Poly::Exact(crate::mp::poly::RatPoly::from_integers(num)),
            Poly::Exact(crate::mp::poly::RatPoly::from_integers(den)),
            start,
            BTreeSet::new(),
        )
    }

    pub fn is_exact(&self) -> bool {
        self.num.is_exact() && self.den.is_exact()
    }

    /// Working precision carried by float-coefficient polynomials (exact
    /// specs report the conventional 128).
    fn coeff_prec(&self) -> u32 {
        let p = |poly: &Poly| match poly {
            Poly::Exact(_) => None,
            Poly::Big(q) => Some(q.prec()),
        };
        match (p(&self.num), p(&self.den)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 128,
        }
    }

    /// First index the infinite tail runs from: past every excluded index.
    fn effective_start(&self) -> i64 {
        match self.excluded.iter().next_back() {
            Some(&m) => self.start.max(m + 1),
            None => self.start,
        }
    }
}

/// Outcome of the convergence test, with the failed condition on divergence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    Converges,
    Diverges(DivergenceReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivergenceReason {
    /// deg num ≠ deg den: factors approach 0 or ∞.
    DegreeMismatch { num: usize, den: usize },
    /// Leading coefficients differ: factors approach a constant ≠ 1.
    LeadingMismatch,
    /// Subleading (monic-normalized) coefficients differ: the root sums are
    /// unequal, so partial products behave like a power of M.
    SubleadingMismatch,
}

impl fmt::Display for DivergenceReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceReason::DegreeMismatch { num, den } => write!(
                f,
                "numerator degree {num} differs from denominator degree {den}"
            ),
            DivergenceReason::LeadingMismatch => {
                write!(f, "leading coefficients differ, factors do not approach 1")
            }
            DivergenceReason::SubleadingMismatch => write!(
                f,
                "subleading coefficients differ (root sums unequal), partial products drift like a power of the cutoff"
            ),
        }
    }
}

/// Scalar multiplier accumulated from head factors, exact when the spec is.
#[derive(Debug, Clone)]
pub enum Prefactor {
    Exact(Rational),
    Big(Complex),
}

impl Prefactor {
    pub fn eval(&self, prec: u32) -> Complex {
        match self {
            Prefactor::Exact(r) => mp::complex_from_rational(r, prec),
            Prefactor::Big(c) => Complex::with_val(prec, c),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Prefactor::Exact(r) => *r == 1u32,
            Prefactor::Big(c) => c.real() == &1u32 && c.imag().is_zero(),
        }
    }
}

/// A finite gamma quotient: prefactor · ∏Γ(num_args) / ∏Γ(den_args).
#[derive(Debug, Clone)]
pub struct GammaQuotient {
    pub num_args: Vec<Complex>,
    pub den_args: Vec<Complex>,
    pub prefactor: Prefactor,
}

impl GammaQuotient {
    /// Validates the type invariants: equal argument counts, no argument at
    /// a gamma pole, nonzero prefactor.
    pub fn new(num_args: Vec<Complex>, den_args: Vec<Complex>, prefactor: Prefactor) -> Result<Self> {
        if num_args.len() != den_args.len() {
            return Err(Error::Precondition(format!(
                "gamma quotient needs matching argument counts, got {} over {}",
                num_args.len(),
                den_args.len()
            )));
        }
        for arg in num_args.iter().chain(den_args.iter()) {
            if gamma::is_nonpositive_integer(arg) {
                return Err(gamma::pole_error(arg));
            }
        }
        let zero = match &prefactor {
            Prefactor::Exact(r) => r.cmp0() == std::cmp::Ordering::Equal,
            Prefactor::Big(c) => c.real().is_zero() && c.imag().is_zero(),
        };
        if zero {
            return Err(Error::Precondition("prefactor is zero".into()));
        }
        Ok(GammaQuotient {
            num_args,
            den_args,
            prefactor,
        })
    }

    /// Σ log Γ(num) − Σ log Γ(den), ignoring the prefactor, at a working
    /// precision padded by the log-gamma magnitudes so cancellation in the
    /// sum cannot eat the target bits. Callers after the logarithm of the
    /// product (rather than the product itself) read this directly and skip
    /// an exp/log round trip.
    pub fn log_eval(&self, prec: u32) -> Result<Complex> {
        let mut mag = 0f64;
        for arg in self.num_args.iter().chain(self.den_args.iter()) {
            let m = Float::with_val(53, arg.abs_ref()).to_f64().max(1.0);
            mag += m * m.ln().abs() + m + 2.0;
        }
        let wp = prec + 32 + (mag.max(1.0)).log2().ceil() as u32;
        let mut acc = Complex::new(wp);
        for arg in &self.num_args {
            acc += gamma::complex_loggamma(&Complex::with_val(wp, arg), wp)?;
        }
        for arg in &self.den_args {
            acc -= gamma::complex_loggamma(&Complex::with_val(wp, arg), wp)?;
        }
        Ok(acc)
    }

    /// Numeric value at `prec` bits: exp of [`Self::log_eval`] times the
    /// prefactor.
    pub fn eval(&self, prec: u32) -> Result<Complex> {
        let log = self.log_eval(prec)?;
        let wp = log.prec().0;
        let value = log.exp() * self.prefactor.eval(wp);
        Ok(Complex::with_val(prec, value))
    }
}

impl fmt::Display for GammaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |args: &[Complex]| -> String {
            if args.is_empty() {
                return "1".into();
            }
            args.iter()
                .map(|a| format!("Γ({})", fmt_complex_short(a)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if !self.prefactor.is_one() {
            match &self.prefactor {
                Prefactor::Exact(r) => write!(f, "{r} · ")?,
                Prefactor::Big(c) => write!(f, "{} · ", fmt_complex_short(c))?,
            }
        }
        write!(f, "{} / [{}]", part(&self.num_args), part(&self.den_args))
    }
}

/// Compact display of a complex number for human-facing closed forms
/// (shortest f64 round-trip form, so exact dyadics print exactly).
pub fn fmt_complex_short(z: &Complex) -> String {
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    if im == 0.0 {
        format!("{re}")
    } else if im.is_sign_negative() {
        format!("{re} - {}i", -im)
    } else {
        format!("{re} + {im}i")
    }
}

/// Evaluation outcome: the value, the closed form it came from, the digit
/// bookkeeping, and how the engine got there.
#[derive(Debug, Clone)]
pub struct EvaluationReport {
    pub value: Complex,
    pub closed_form: GammaQuotient,
    pub digits_requested: u32,
    pub digits_certified: u32,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// Factors multiplied exactly before the gamma tail takes over.
    pub head_terms: usize,
    pub exclusions_applied: usize,
    pub elapsed: Duration,
}

/// Fujiwara-style bound on root magnitudes, in f64 (coefficients probed at
/// 64 bits; the bound is only used to size integer scan windows).
fn root_bound(p: &Poly) -> f64 {
    let n = p.degree();
    if n == 0 {
        return 0.0;
    }
    let lead = Float::with_val(64, p.coeff_complex(n, 64).abs_ref());
    let mut best = Float::new(64);
    for k in 1..=n {
        let mag =
            (Float::with_val(64, p.coeff_complex(n - k, 64).abs_ref()) / &lead).root(k as u32);
        if mag > best {
            best = mag;
        }
    }
    2.0 * best.to_f64()
}

/// Is p(k) zero at the integer k: exactly for exact coefficients, below the
/// 2^(−prec/2) noise floor for float coefficients.
fn vanishes_at(p: &Poly, k: i64, prec: u32) -> bool {
    match p {
        Poly::Exact(q) => q.eval_int(k).cmp0() == std::cmp::Ordering::Equal,
        Poly::Big(q) => {
            let v = q.eval(&Complex::with_val(64.max(prec), (k, 0i64)));
            let n = q.degree();
            let scale = q
                .coeffs()
                .iter()
                .map(|c| Float::with_val(64, c.abs_ref()))
                .fold(Float::with_val(64, 1), |a, b| if b > a { b } else { a })
                * (n as u32 + 1)
                * Float::with_val(64, k.unsigned_abs().max(1)).pow(n as u32);
            Float::with_val(prec, v.abs_ref())
                <= scale * Float::with_val(64, Float::i_exp(1, -((prec / 2) as i32)))
        }
    }
}

/// Error out if a non-excluded integer index at or past the start is a root
/// of either polynomial. Exact polynomials additionally get their rational
/// roots extracted so integer roots beyond the scan window are still found.
fn scan_zero_factors(spec: &RationalFunctionSpec) -> Result<()> {
    let prec = spec.coeff_prec();
    let num_bound = root_bound(&spec.num).ceil() as i64;
    let den_bound = root_bound(&spec.den).ceil() as i64;
    let hi = num_bound
        .max(den_bound)
        .min(spec.start.saturating_add(SCAN_WINDOW));
    for k in spec.start..=hi {
        if spec.excluded.contains(&k) {
            continue;
        }
        if k <= den_bound && vanishes_at(&spec.den, k, prec) {
            return Err(Error::ZeroFactor {
                index: k,
                is_pole: true,
            });
        }
        if k <= num_bound && vanishes_at(&spec.num, k, prec) {
            return Err(Error::ZeroFactor {
                index: k,
                is_pole: false,
            });
        }
    }
    // Exact backstop past the window (cheap: candidate divisors only).
    for (poly, is_pole) in [(&spec.den, true), (&spec.num, false)] {
        if let Poly::Exact(q) = poly {
            for root in q.rational_roots().0 {
                if root.is_integer() {
                    if let Some(k) = root.numer().to_i64() {
                        if k > hi && !spec.excluded.contains(&k) {
                            return Err(Error::ZeroFactor { index: k, is_pole });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Decide convergence from the coefficients alone: equal degrees, equal
/// leading coefficients, equal subleading coefficients. Exact specs are
/// decided exactly; float specs to relative tolerance 2^(−prec/2).
pub fn check_convergence(spec: &RationalFunctionSpec) -> Result<ConvergenceVerdict> {
    scan_zero_factors(spec)?;
    let (dn, dd) = (spec.num.degree(), spec.den.degree());
    if dn != dd {
        return Ok(ConvergenceVerdict::Diverges(
            DivergenceReason::DegreeMismatch { num: dn, den: dd },
        ));
    }
    let prec = spec.coeff_prec();
    let close = |x: &Complex, y: &Complex| -> bool {
        let scale = Float::with_val(64, y.abs_ref()) + 1u32;
        mp::abs_diff_complex(x, y) <= scale * Float::with_val(64, Float::i_exp(1, -((prec / 2) as i32)))
    };
    match (spec.num.exact(), spec.den.exact()) {
        (Some(n), Some(d)) => {
            if n.leading() != d.leading() {
                return Ok(ConvergenceVerdict::Diverges(DivergenceReason::LeadingMismatch));
            }
            if dn > 0 {
                let sub_n = Rational::from(n.coeff(dn - 1) / n.leading().unwrap());
                let sub_d = Rational::from(d.coeff(dd - 1) / d.leading().unwrap());
                if sub_n != sub_d {
                    return Ok(ConvergenceVerdict::Diverges(
                        DivergenceReason::SubleadingMismatch,
                    ));
                }
            }
        }
        _ => {
            let wp = prec.max(64);
            let ln = spec.num.coeff_complex(dn, wp);
            let ld = spec.den.coeff_complex(dd, wp);
            if !close(&ln, &ld) {
                return Ok(ConvergenceVerdict::Diverges(DivergenceReason::LeadingMismatch));
            }
            if dn > 0 {
                let sub_n = Complex::with_val(wp, spec.num.coeff_complex(dn - 1, wp) / &ln);
                let sub_d = Complex::with_val(wp, spec.den.coeff_complex(dd - 1, wp) / &ld);
                if !close(&sub_n, &sub_d) {
                    return Ok(ConvergenceVerdict::Diverges(
                        DivergenceReason::SubleadingMismatch,
                    ));
                }
            }
        }
    }
    Ok(ConvergenceVerdict::Converges)
}

/// Is this computed gamma argument indistinguishable from a nonpositive
/// integer at the root-finding precision?
fn near_nonpositive_integer(arg: &Complex, prec: u32) -> Option<i64> {
    let tol = Float::with_val(64, Float::i_exp(1, -((prec / 2) as i32)))
        * (Float::with_val(64, arg.abs_ref()) + 1u32);
    if Float::with_val(64, arg.imag().clone().abs()) > tol {
        return None;
    }
    let rounded = arg.real().to_f64().round();
    if rounded > 0.0 {
        return None;
    }
    let diff = Float::with_val(64, arg.real() - Float::with_val(64, rounded)).abs();
    (diff <= tol).then_some(rounded as i64)
}

/// The closed form of a convergent spec: head prefactor over [k0, s), gamma
/// arguments s − ρ for the tail from s = effective start.
pub fn to_gamma_quotient(spec: &RationalFunctionSpec, prec: u32) -> Result<GammaQuotient> {
    match check_convergence(spec)? {
        ConvergenceVerdict::Converges => {}
        ConvergenceVerdict::Diverges(reason) => {
            return Err(Error::Diverges {
                reason: reason.to_string(),
            })
        }
    }
    let s = spec.effective_start();

    let wp = prec + 32;
    let prefactor = if spec.is_exact() {
        let (num, den) = (spec.num.exact().unwrap(), spec.den.exact().unwrap());
        let mut acc = Rational::from(1);
        for k in spec.start..s {
            if spec.excluded.contains(&k) {
                continue;
            }
            acc *= Rational::from(num.eval_int(k) / den.eval_int(k));
        }
        Prefactor::Exact(acc)
    } else {
        let mut acc = Complex::with_val(wp, 1);
        for k in spec.start..s {
            if spec.excluded.contains(&k) {
                continue;
            }
            let kc = Complex::with_val(wp, (k, 0i64));
            acc *= spec.num.eval_complex(&kc, wp);
            acc /= spec.den.eval_complex(&kc, wp);
        }
        Prefactor::Big(acc)
    };

    let find_roots = |p: &Poly| -> Result<Vec<Complex>> {
        if p.degree() == 0 {
            // Constants contribute no gamma factors (equal constants cancel,
            // enforced by the convergence check).
            Ok(Vec::new())
        } else {
            roots::poly_roots_any(p, prec)
        }
    };
    let num_roots = find_roots(&spec.num)?;
    let den_roots = find_roots(&spec.den)?;
    let to_args = |rts: &[Complex], from_den: bool| -> Result<Vec<Complex>> {
        rts.iter()
            .map(|rho| {
                let mut arg = Complex::with_val(prec, (Float::with_val(prec, s), Float::new(prec)));
                arg -= rho;
                if near_nonpositive_integer(&arg, prec).is_some() {
                    // An integer root at or past s slipped through the scan
                    // (huge coefficients): surface it with its index.
                    return Err(Error::ZeroFactor {
                        index: rho.real().to_f64().round() as i64,
                        is_pole: from_den,
                    });
                }
                Ok(arg)
            })
            .collect()
    };
    // Denominator roots feed numerator gamma arguments and vice versa.
    let num_args = to_args(&den_roots, true)?;
    let den_args = to_args(&num_roots, false)?;
    GammaQuotient::new(num_args, den_args, prefactor)
}

/// Evaluate the closed form to `digits` certified decimal digits.
pub fn evaluate(spec: &RationalFunctionSpec, digits: u32) -> Result<EvaluationReport> {
    let t0 = Instant::now();
    let (value, certified) = mp::certify_complex(digits, |wp| {
        let gq = to_gamma_quotient(spec, wp)?;
        gq.eval(wp)
    })?;
    let closed_form = to_gamma_quotient(spec, mp::bits_for(digits))?;
    let s = spec.effective_start();
    let head_terms = (spec.start..s)
        .filter(|k| !spec.excluded.contains(k))
        .count();
    Ok(EvaluationReport {
        value,
        closed_form,
        digits_requested: digits,
        digits_certified: certified,
        diagnostics: Diagnostics {
            head_terms,
            exclusions_applied: spec.excluded.len(),
            elapsed: t0.elapsed(),
        },
    })
}

/// Brute-force oracle: ∏_{k=k0}^{M} num(k)/den(k), skipping exclusions.
pub fn evaluate_partial(spec: &RationalFunctionSpec, m: i64, prec: u32) -> Result<Complex> {
    if m < spec.start {
        return Err(Error::Precondition(format!(
            "partial product cutoff {m} lies before the start index {}",
            spec.start
        )));
    }
    let wp = prec + 32;
    let mut acc = Complex::with_val(wp, 1);
    match (spec.num.exact(), spec.den.exact()) {
        (Some(num), Some(den)) => {
            for k in spec.start..=m {
                if spec.excluded.contains(&k) {
                    continue;
                }
                let d = den.eval_int(k);
                if d.cmp0() == std::cmp::Ordering::Equal {
                    return Err(Error::ZeroFactor {
                        index: k,
                        is_pole: true,
                    });
                }
                let n = num.eval_int(k);
                if n.cmp0() == std::cmp::Ordering::Equal {
                    return Err(Error::ZeroFactor {
                        index: k,
                        is_pole: false,
                    });
                }
                acc *= mp::complex_from_rational(&Rational::from(n / d), wp);
            }
        }
        _ => {
            for k in spec.start..=m {
                if spec.excluded.contains(&k) {
                    continue;
                }
                let kc = Complex::with_val(wp, (k, 0i64));
                let d = spec.den.eval_complex(&kc, wp);
                if d.real().is_zero() && d.imag().is_zero() {
                    return Err(Error::ZeroFactor {
                        index: k,
                        is_pole: true,
                    });
                }
                let n = spec.num.eval_complex(&kc, wp);
                if n.real().is_zero() && n.imag().is_zero() {
                    return Err(Error::ZeroFactor {
                        index: k,
                        is_pole: false,
                    });
                }
                acc *= n / d;
            }
        }
    }
    Ok(Complex::with_val(prec, acc))
}
