//! Tail acceleration for slowly convergent products and sums.
//!
//! A product ∏ f(c/kᵈ) with f analytic at 0 and f(0) = 1 converges, but for
//! small d far too slowly to multiply out term by term. Replacing f beyond a
//! cutoff by its diagonal Padé approximant turns the tail into a quotient of
//! polynomial products that [`crate::ratprod`] collapses into finitely many
//! gamma factors. The head below the cutoff is handled directly, so the
//! approximant only has to be good on |x| ≤ c/Nᵈ where its error is tiny:
//! accuracy grows like (2n+1)·log₁₀N digits for order n. Sums ride the same
//! machinery through Σ aₖ = log ∏ exp(aₖ).

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::mp::pade::{cos_series, pade_from_series};
use crate::mp::poly::{CPoly, Poly, RatPoly};
use crate::mp::{self, roots};
use crate::ratprod::{self, GammaQuotient, Prefactor, RationalFunctionSpec};

/// The function applied to each scaled index before multiplying.
#[derive(Debug, Clone)]
pub enum Outer {
    /// cos x; the polygon-circumscribing products live here.
    Cos,
    /// exp x; products of exponentials, which are sums in disguise.
    Exp,
    /// An explicit polynomial with constant term 1. Its approximant at
    /// sufficient order is the polynomial itself, making the fold exact.
    Poly(RatPoly),
}

/// The constant c in f(c/kᵈ): an exact rational, or π times one. Keeping
/// the distinction lets exact scales stay exact through the fold while π
/// scales are rebuilt at every working precision.
#[derive(Debug, Clone)]
pub enum Scale {
    Rational(Rational),
    PiRational(Rational),
}

impl Scale {
    /// Numeric value at `prec` bits.
    pub fn value(&self, prec: u32) -> Float {
        match self {
            Scale::Rational(q) => mp::float_from_rational(q, prec),
            Scale::PiRational(q) => {
                Float::with_val(prec, mp::pi(prec) * mp::float_from_rational(q, prec))
            }
        }
    }
}

/// One factor family f(c/kᵈ), k running from `start`.
#[derive(Debug, Clone)]
pub struct FactorSpec {
    outer: Outer,
    scale: Scale,
    power: u32,
    start: i64,
}

impl FactorSpec {
    pub fn new(outer: Outer, scale: Scale, power: u32, start: i64) -> Result<Self> {
        if power == 0 {
            return Err(Error::Precondition("index power must be >= 1".into()));
        }
        if start < 1 {
            return Err(Error::Precondition(
                "scaled products are indexed from k >= 1".into(),
            ));
        }
        if let Outer::Poly(p) = &outer {
            if p.coeff(0) != 1u32 {
                return Err(Error::Precondition(
                    "outer polynomial needs constant term 1".into(),
                ));
            }
        }
        Ok(FactorSpec {
            outer,
            scale,
            power,
            start,
        })
    }

    pub fn start(&self) -> i64 {
        self.start
    }
}

/// Outcome of a tail-folded evaluation.
#[derive(Debug, Clone)]
pub struct AccelResult {
    /// Certified value at the requested digit count.
    pub value: Float,
    /// Approximant order actually used; lower than requested when the
    /// requested table is degenerate and a smaller one is exact.
    pub order: usize,
    /// Number of head terms handled directly before the fold.
    pub head_terms: i64,
    /// The folded tail as a finite gamma quotient.
    pub closed_form: GammaQuotient,
    /// −log₁₀ of the spread against an order-(n+2) rerun; a cheap and
    /// usually slightly conservative accuracy gauge.
    pub digits_estimate: f64,
}

/// Numerator fₙ of the diagonal approximant of exp, exact:
/// exp x ≈ fₙ(x)/fₙ(−x) with fₙ(x) = Σⱼ (2n−j)!·n!/((2n)!·j!·(n−j)!) xʲ.
pub fn exp_pade_poly(n: usize) -> RatPoly {
    let n = n as u32;
    let full = Integer::from(Integer::factorial(2 * n));
    let half = Integer::from(Integer::factorial(n));
    let coeffs = (0..=n)
        .map(|j| {
            let num = Integer::from(Integer::factorial(2 * n - j)) * &half;
            let den = full.clone()
                * Integer::from(Integer::factorial(j))
                * Integer::from(Integer::factorial(n - j));
            Rational::from((num, den))
        })
        .collect();
    RatPoly::new(coeffs)
}

fn alternate_signs(p: &RatPoly) -> RatPoly {
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            if j % 2 == 1 {
                Rational::from(-a)
            } else {
                a.clone()
            }
        })
        .collect();
    RatPoly::new(coeffs)
}

/// Exact numerator and denominator of the order-n diagonal approximant of
/// the outer function, plus the order that actually worked. A degenerate
/// table falls back to the next lower order; exp never degenerates and uses
/// its closed-form coefficients directly.
fn pade_polys(outer: &Outer, n: usize) -> Result<(RatPoly, RatPoly, usize)> {
    if n == 0 {
        return Err(Error::Precondition("approximant order must be >= 1".into()));
    }
    match outer {
        Outer::Exp => {
            let num = exp_pade_poly(n);
            let den = alternate_signs(&num);
            Ok((num, den, n))
        }
        Outer::Cos => pade_polys_from_series(&cos_series(2 * n), n),
        Outer::Poly(p) => {
            let coeffs: Vec<Rational> = (0..=2 * n).map(|j| p.coeff(j)).collect();
            pade_polys_from_series(&coeffs, n)
        }
    }
}

fn pade_polys_from_series(coeffs: &[Rational], n: usize) -> Result<(RatPoly, RatPoly, usize)> {
    for order in (1..=n).rev() {
        match pade_from_series(&coeffs[..2 * order + 1], order, 64) {
            Ok(p) => {
                let num = p.num.exact().expect("exact input gives an exact table");
                let den = p.den.exact().expect("exact input gives an exact table");
                return Ok((num.clone(), den.clone(), order));
            }
            Err(Error::DegenerateTable { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateTable { n })
}

/// k^{d·clear} · A(c/kᵈ) as an exact polynomial in k.
fn fold_exact(a: &RatPoly, c: &Rational, power: u32, clear: usize) -> RatPoly {
    let d = power as usize;
    let mut coeffs = vec![Rational::new(); d * clear + 1];
    let mut cj = Rational::from(1);
    for j in 0..=a.degree() {
        coeffs[d * (clear - j)] = a.coeff(j) * cj.clone();
        cj *= c;
    }
    RatPoly::new(coeffs)
}

fn fold_big(a: &RatPoly, c: &Float, power: u32, clear: usize, wp: u32) -> CPoly {
    let d = power as usize;
    let mut coeffs = vec![Complex::new(wp); d * clear + 1];
    let mut cj = Float::with_val(wp, 1);
    for j in 0..=a.degree() {
        let v = mp::float_from_rational(&a.coeff(j), wp) * &cj;
        coeffs[d * (clear - j)] = Complex::with_val(wp, v);
        cj *= c;
    }
    CPoly::new(wp, coeffs)
}

fn folded_spec(
    f: &FactorSpec,
    num_r: &RatPoly,
    den_r: &RatPoly,
    clear: usize,
    tail_start: i64,
    wp: u32,
) -> Result<RationalFunctionSpec> {
    match &f.scale {
        Scale::Rational(q) => RationalFunctionSpec::new(
            Poly::Exact(fold_exact(num_r, q, f.power, clear)),
            Poly::Exact(fold_exact(den_r, q, f.power, clear)),
            tail_start,
            BTreeSet::new(),
        ),
        Scale::PiRational(q) => {
            let c = Float::with_val(wp, mp::pi(wp) * mp::float_from_rational(q, wp));
            RationalFunctionSpec::new(
                Poly::Big(fold_big(num_r, &c, f.power, clear, wp)),
                Poly::Big(fold_big(den_r, &c, f.power, clear, wp)),
                tail_start,
                BTreeSet::new(),
            )
        }
    }
}

fn outer_value(outer: &Outer, x: &Float, wp: u32) -> Float {
    match outer {
        Outer::Cos => x.clone().cos(),
        Outer::Exp => x.clone().exp(),
        Outer::Poly(p) => {
            let mut acc = Float::new(wp);
            for a in p.coeffs().iter().rev() {
                acc = acc * x + mp::float_from_rational(a, wp);
            }
            acc
        }
    }
}

fn head_product(f: &FactorSpec, tail_start: i64, wp: u32) -> Float {
    let c = f.scale.value(wp);
    let mut acc = Float::with_val(wp, 1);
    for k in f.start..tail_start {
        let kd = Float::with_val(wp, Integer::from(k).pow(f.power));
        let x = Float::with_val(wp, &c / &kd);
        acc *= outer_value(&f.outer, &x, wp);
    }
    acc
}

fn digit_agreement(a: &Float, b: &Float) -> f64 {
    let p = a.prec().min(b.prec());
    let d = Float::with_val(p, a - b).abs();
    if d.is_zero() {
        mp::digits_capacity(p) as f64
    } else {
        -d.log10().to_f64()
    }
}

fn tail_folded_value(
    f: &FactorSpec,
    n: usize,
    tail_start: i64,
    digits: u32,
) -> Result<(Float, usize, GammaQuotient)> {
    let (num_r, den_r, order) = pade_polys(&f.outer, n)?;
    let clear = num_r.degree().max(den_r.degree());
    let folded_degree = clear * f.power as usize;
    if folded_degree > 64 {
        return Err(Error::Precondition(format!(
            "folded tail degree {folded_degree} exceeds the root solver cap of 64"
        )));
    }
    let mut closed = None;
    let (value, _) = mp::certify_real(digits, |wp| {
        let spec = folded_spec(f, &num_r, &den_r, clear, tail_start, wp)?;
        let quotient = ratprod::to_gamma_quotient(&spec, wp)?;
        let tail = quotient.eval(wp)?;
        let head = head_product(f, tail_start, wp);
        let v = Float::with_val(wp, head * tail.real());
        closed = Some(quotient);
        Ok(v)
    })?;
    Ok((value, order, closed.expect("certification ran the closure")))
}

/// Evaluates ∏_{k ≥ start} f(c/kᵈ) by multiplying the head below
/// `tail_start` directly and folding the tail through the order-n diagonal
/// approximant into the closed-form engine. Divergent configurations are
/// rejected by the engine's convergence test on the folded quotient.
pub fn accelerate_product(
    f: &FactorSpec,
    n: usize,
    tail_start: i64,
    digits: u32,
) -> Result<AccelResult> {
    if tail_start < f.start {
        return Err(Error::Precondition(format!(
            "tail start {tail_start} precedes the product start {}",
            f.start
        )));
    }
    let (value, order, closed_form) = tail_folded_value(f, n, tail_start, digits)?;
    let probe = match tail_folded_value(f, n + 2, tail_start, digits) {
        Ok((v, _, _)) => v,
        // Order n + 2 can overflow the folded-degree cap even when n fits;
        // an order-(n−2) probe bounds the coarser of the two runs instead.
        Err(Error::Precondition(_)) if n > 2 => tail_folded_value(f, n - 2, tail_start, digits)?.0,
        Err(e) => return Err(e),
    };
    Ok(AccelResult {
        digits_estimate: digit_agreement(&value, &probe),
        value,
        order,
        head_terms: tail_start - f.start,
        closed_form,
    })
}

/// ∏_{k ≥ 3} cos(π/k), the limiting radius ratio of nested regular polygons,
/// with the tail beyond `tail_start` folded at order n.
pub fn kepler_bouwkamp(n: usize, tail_start: i64, digits: u32) -> Result<AccelResult> {
    let f = FactorSpec::new(Outer::Cos, Scale::PiRational(Rational::from(1)), 1, 3)?;
    accelerate_product(&f, n, tail_start, digits)
}

/// Shared 200-digit reference for the polygon product: a single order-20
/// run folded from k = 2000, spot checked against the known leading digits.
pub fn kepler_bouwkamp_reference() -> &'static Float {
    static REFERENCE: OnceLock<Float> = OnceLock::new();
    REFERENCE.get_or_init(|| {
        let value = kepler_bouwkamp(20, 2000, 200)
            .expect("reference fold converges")
            .value;
        let known = Float::with_val(96, Float::parse("0.1149420448532962").unwrap());
        assert!(
            Float::with_val(96, &value - &known).abs() < 1e-16,
            "polygon product reference drifted from its known leading digits"
        );
        value
    })
}

/// The accuracy grid −log₁₀|approx − reference| over orders × tail starts.
/// Every entry is an independent run at `digits` working digits, so the
/// reference must be accurate beyond the finest entry for the grid to mean
/// anything.
pub fn digits_table(
    f: &FactorSpec,
    orders: &[usize],
    tail_starts: &[i64],
    reference: &Float,
    digits: u32,
) -> Result<Vec<Vec<f64>>> {
    orders
        .iter()
        .map(|&n| {
            tail_starts
                .iter()
                .map(|&tail_start| {
                    let (value, _, _) = tail_folded_value(f, n, tail_start, digits)?;
                    Ok(digit_agreement(&value, reference))
                })
                .collect()
        })
        .collect()
}

fn folded_sum_value(
    u: &RatPoly,
    v: &RatPoly,
    start: i64,
    n: usize,
    tail_start: i64,
    digits: u32,
) -> Result<(Float, GammaQuotient)> {
    let folded_degree = n * v.degree();
    if folded_degree > 64 {
        return Err(Error::Precondition(format!(
            "folded tail degree {folded_degree} exceeds the root solver cap of 64"
        )));
    }
    // The tail product ∏ fₙ(a(k))/fₙ(−a(k)) clears denominators to
    // P(k)/Q(k) with P = Σⱼ cⱼ uʲ v^{n−j} and Q its alternating twin.
    let c = exp_pade_poly(n);
    let mut upow = vec![RatPoly::one()];
    let mut vpow = vec![RatPoly::one()];
    for _ in 0..n {
        upow.push(upow.last().unwrap().mul(u));
        vpow.push(vpow.last().unwrap().mul(v));
    }
    let mut p = RatPoly::zero();
    let mut q = RatPoly::zero();
    for j in 0..=n {
        let term = upow[j].mul(&vpow[n - j]).scale(&c.coeff(j));
        p = p.add(&term);
        q = if j % 2 == 0 { q.add(&term) } else { q.sub(&term) };
    }
    let spec = RationalFunctionSpec::new(Poly::Exact(p), Poly::Exact(q), tail_start, BTreeSet::new())?;
    let mut closed = None;
    let (value, _) = mp::certify_real(digits, |wp| {
        let quotient = ratprod::to_gamma_quotient(&spec, wp)?;
        debug_assert!(quotient.prefactor.is_one(), "fold starts at the spec start");
        let log_tail = quotient.log_eval(wp)?;
        let mut head = Rational::new();
        for k in start..tail_start {
            head += u.eval_int(k) / v.eval_int(k);
        }
        let total = Float::with_val(wp, mp::float_from_rational(&head, wp) + log_tail.real());
        closed = Some(quotient);
        Ok(total)
    })?;
    Ok((value, closed.expect("certification ran the closure")))
}

/// Evaluates Σ_{k ≥ start} u(k)/v(k) as an exact head sum plus the logarithm
/// of a folded tail: Σ aₖ = log ∏ exp aₖ, and exp folds through its diagonal
/// approximant exactly. Terms must decay at least like 1/k²; the degree gap
/// is reported otherwise. Integer zeros of v at or past `start` are poles of
/// the sum and are rejected up front, since after clearing they are no
/// longer visible to the engine's own scan.
pub fn accelerate_sum(
    term_num: &RatPoly,
    term_den: &RatPoly,
    start: i64,
    n: usize,
    tail_start: i64,
    digits: u32,
) -> Result<AccelResult> {
    if term_den.is_zero() {
        return Err(Error::Precondition(
            "term denominator is identically zero".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Precondition("approximant order must be >= 1".into()));
    }
    if start < 0 || tail_start < start {
        return Err(Error::Precondition(
            "need 0 <= start <= tail start".into(),
        ));
    }
    let (den_roots, _) = term_den.rational_roots();
    for r in &den_roots {
        if r.is_integer() {
            let k = r.numer().to_i64().unwrap_or(i64::MAX);
            if k >= start {
                return Err(Error::ZeroFactor {
                    index: k,
                    is_pole: true,
                });
            }
        }
    }
    if term_num.is_zero() {
        let prec = mp::bits_for(digits);
        return Ok(AccelResult {
            value: Float::new(prec),
            order: n,
            head_terms: tail_start - start,
            closed_form: GammaQuotient::new(
                Vec::new(),
                Vec::new(),
                Prefactor::Exact(Rational::from(1)),
            )?,
            digits_estimate: mp::digits_capacity(prec) as f64,
        });
    }
    let gap = term_den.degree() as i64 - term_num.degree() as i64;
    if gap < 2 {
        return Err(Error::Summability { gap });
    }
    let (value, closed_form) = folded_sum_value(term_num, term_den, start, n, tail_start, digits)?;
    let probe = match folded_sum_value(term_num, term_den, start, n + 2, tail_start, digits) {
        Ok((v, _)) => v,
        Err(Error::Precondition(_)) if n > 2 => {
            folded_sum_value(term_num, term_den, start, n - 2, tail_start, digits)?.0
        }
        Err(e) => return Err(e),
    };
    Ok(AccelResult {
        digits_estimate: digit_agreement(&value, &probe),
        value,
        order: n,
        head_terms: tail_start - start,
        closed_form,
    })
}

/// The order-n folded stand-in for ζ(m): the logarithm of
/// ∏_{k ≥ 1} fₙ(k^{−m})/fₙ(−k^{−m}). Clearing denominators head-on gives a
/// degree m·n polynomial in k, hopeless for large m; but the cleared
/// numerator is Ã(kᵐ) with Ã(y) = Σⱼ cⱼ y^{n−j}, so only the degree-n
/// polynomial in y is solved and every k-root is an m-th root of a y-root.
pub fn zeta_approx(m: u32, n: usize, digits: u32) -> Result<Float> {
    if m < 2 {
        return Err(Error::Precondition(
            "need exponent m >= 2 for convergence".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Precondition("approximant order must be >= 1".into()));
    }
    if (m as u64) * (n as u64) > 4096 {
        return Err(Error::Precondition(
            "m·n gamma arguments per side capped at 4096".into(),
        ));
    }
    let c = exp_pade_poly(n);
    let mut at = vec![Rational::new(); n + 1];
    let mut bt = vec![Rational::new(); n + 1];
    for j in 0..=n {
        at[n - j] = c.coeff(j);
        bt[n - j] = if j % 2 == 0 {
            c.coeff(j)
        } else {
            Rational::from(-c.coeff(j))
        };
    }
    let a_tilde = RatPoly::new(at);
    let b_tilde = RatPoly::new(bt);
    let (value, _) = mp::certify_real(digits, |wp| {
        // Γ arguments are 1 − k-root; the m-th roots of each y-root come in
        // full ξ_m orbits, so the argument sums balance automatically.
        let expand = |ys: Vec<Complex>| -> Vec<Complex> {
            let mut args = Vec::with_capacity(ys.len() * m as usize);
            for y in ys {
                let principal = Complex::with_val(wp, y.ln() / m).exp();
                for t in 0..m {
                    let xi = mp::root_of_unity(m, t, wp);
                    let kroot = Complex::with_val(wp, &principal * &xi);
                    args.push(Complex::with_val(wp, 1u32 - kroot));
                }
            }
            args
        };
        let num_args = expand(roots::rat_poly_roots(&b_tilde, wp)?);
        let den_args = expand(roots::rat_poly_roots(&a_tilde, wp)?);
        let quotient =
            GammaQuotient::new(num_args, den_args, Prefactor::Exact(Rational::from(1)))?;
        Ok(Float::with_val(wp, quotient.log_eval(wp)?.real()))
    })?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::from((p, q))
    }

    #[test]
    fn exp_approximant_coefficients_are_exact() {
        let f2 = exp_pade_poly(2);
        assert_eq!(f2.coeffs(), &[rat(1, 1), rat(1, 2), rat(1, 12)]);
        assert_eq!(f2.eval(&rat(1, 1)) / f2.eval(&rat(-1, 1)), rat(19, 7));
        let f3 = exp_pade_poly(3);
        assert_eq!(f3.eval(&rat(1, 1)) / f3.eval(&rat(-1, 1)), rat(193, 71));
    }

    #[test]
    fn polynomial_outer_with_enough_order_is_exact() {
        // ∏_{k≥1} (1 − 1/(4k²)) = 2/π, and the approximant of a polynomial
        // is the polynomial itself once the order covers its degree.
        let outer = Outer::Poly(RatPoly::new(vec![rat(1, 1), rat(0, 1), rat(-1, 4)]));
        let f = FactorSpec::new(outer, Scale::Rational(rat(1, 1)), 1, 1).unwrap();
        let r = accelerate_product(&f, 5, 20, 40).unwrap();
        assert_eq!(r.order, 2);
        assert_eq!(r.head_terms, 19);

        let direct = ratprod::evaluate(
            &RationalFunctionSpec::from_integers(&[-1, 0, 4], &[0, 0, 4], 1).unwrap(),
            40,
        )
        .unwrap();
        assert!(Float::with_val(64, &r.value - direct.value.real()).abs() < 1e-38);

        let two_over_pi = Float::with_val(256, 2) / mp::pi(256);
        assert!(Float::with_val(64, &r.value - &two_over_pi).abs() < 1e-38);
        assert!(r.digits_estimate > 35.0);
    }

    #[test]
    fn degenerate_orders_step_down_to_the_polynomial() {
        // 1 + 1/k² folds exactly at effective order 1: ∏_{k≥1} = sinh(π)/π.
        let outer = Outer::Poly(RatPoly::new(vec![rat(1, 1), rat(1, 1)]));
        let f = FactorSpec::new(outer, Scale::Rational(rat(1, 1)), 2, 1).unwrap();
        let r = accelerate_product(&f, 3, 10, 30).unwrap();
        assert_eq!(r.order, 1);
        let want = mp::pi(192).sinh() / mp::pi(192);
        assert!(Float::with_val(64, &r.value - &want).abs() < 1e-28);
    }

    #[test]
    fn exp_outer_with_linear_power_is_rejected() {
        let f = FactorSpec::new(Outer::Exp, Scale::Rational(rat(1, 1)), 1, 1).unwrap();
        match accelerate_product(&f, 3, 10, 20) {
            Err(Error::Diverges { .. }) => {}
            other => panic!("harmonic exponential product must diverge, got {other:?}"),
        }
    }

    #[test]
    fn cos_order_one_table_is_degenerate() {
        match kepler_bouwkamp(1, 10, 20) {
            Err(Error::DegenerateTable { n: 1 }) => {}
            other => panic!("cos has no [1,1] approximant, got {other:?}"),
        }
    }

    #[test]
    fn polygon_product_short_fold_hits_twelve_digits() {
        let r = kepler_bouwkamp(4, 10, 30).unwrap();
        let known = Float::with_val(96, Float::parse("0.1149420448532962").unwrap());
        assert!(Float::with_val(96, &r.value - &known).abs() < 1e-11);
        assert!(
            r.digits_estimate > 10.0 && r.digits_estimate < 16.0,
            "estimate {} out of range",
            r.digits_estimate
        );
    }

    #[test]
    fn harmonic_square_sum_matches_zeta_two() {
        let u = RatPoly::from_integers(&[1]);
        let v = RatPoly::from_integers(&[0, 0, 1]);
        let r = accelerate_sum(&u, &v, 1, 6, 10, 25).unwrap();
        assert_eq!(r.head_terms, 9);
        let want = mp::zeta_int(2, 256);
        assert!(Float::with_val(64, &r.value - &want).abs() < 1e-15);
    }

    #[test]
    fn sum_with_zero_numerator_is_zero() {
        let r = accelerate_sum(
            &RatPoly::zero(),
            &RatPoly::from_integers(&[0, 0, 1]),
            1,
            4,
            10,
            20,
        )
        .unwrap();
        assert!(r.value.is_zero());
    }

    #[test]
    fn harmonic_sum_reports_its_gap() {
        let u = RatPoly::from_integers(&[1]);
        let v = RatPoly::from_integers(&[0, 1]);
        match accelerate_sum(&u, &v, 1, 4, 10, 20) {
            Err(Error::Summability { gap: 1 }) => {}
            other => panic!("1/k is not summable, got {other:?}"),
        }
    }

    #[test]
    fn tail_pole_past_the_fold_is_reported() {
        // v(k) = (k − 12)² vanishes inside the folded tail, invisible to the
        // engine once cleared; the up-front scan has to catch it.
        let u = RatPoly::from_integers(&[1]);
        let v = RatPoly::from_roots(&[rat(12, 1), rat(12, 1)]);
        match accelerate_sum(&u, &v, 1, 4, 10, 20) {
            Err(Error::ZeroFactor { index: 12, .. }) => {}
            other => panic!("pole at k = 12 must surface, got {other:?}"),
        }
    }

    #[test]
    fn zeta_three_small_orders_gain_digits() {
        let z = mp::zeta_int(3, 256);
        let d2 = -Float::with_val(64, zeta_approx(3, 2, 30).unwrap() - &z)
            .abs()
            .log10()
            .to_f64();
        assert!((2.7..3.0).contains(&d2), "order 2 gave {d2} digits");
        let d4 = -Float::with_val(64, zeta_approx(3, 4, 30).unwrap() - &z)
            .abs()
            .log10()
            .to_f64();
        assert!((7.2..7.6).contains(&d4), "order 4 gave {d4} digits");
    }

    #[test]
    fn zeta_rejects_divergent_exponent() {
        assert!(matches!(
            zeta_approx(1, 4, 20),
            Err(Error::Precondition(_))
        ));
    }
}
