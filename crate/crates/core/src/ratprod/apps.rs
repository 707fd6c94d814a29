//! Named products with known gamma closed forms, built either directly from
//! their gamma arguments or through the engine, plus the cross-checks that
//! tie the two routes together.

use crate::error::{Error, Result};
use crate::mp::{self, gamma, poly::Poly, poly::RatPoly};
use crate::ratprod::{
    evaluate, fmt_complex_short, to_gamma_quotient, Diagnostics, EvaluationReport, GammaQuotient,
    Prefactor, RationalFunctionSpec,
};
use crate::report::CheckReport;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use std::collections::BTreeSet;
use std::time::Instant;

/// 10^(−digits) at comparison precision, for relative check tolerances.
fn decimal_tol(digits: u32) -> Float {
    Float::with_val(64, 10).pow(-(digits as i32))
}

/// Certify a closed form built fresh at each working precision (used when
/// the gamma arguments are known analytically, so no root finding happens).
fn certify_direct(
    digits: u32,
    mut build: impl FnMut(u32) -> Result<GammaQuotient>,
) -> Result<EvaluationReport> {
    let t0 = Instant::now();
    let (value, certified) = mp::certify_complex(digits, |wp| build(wp)?.eval(wp))?;
    let closed_form = build(mp::bits_for(digits))?;
    Ok(EvaluationReport {
        value,
        closed_form,
        digits_requested: digits,
        digits_certified: certified,
        diagnostics: Diagnostics {
            head_terms: 0,
            exclusions_applied: 0,
            elapsed: t0.elapsed(),
        },
    })
}

/// ∏_{n≥1} (1 + ((α+β)/(n+α))³) as a gamma quotient. The cube of a single
/// shifted-linear ratio splits over the cube roots of −1, giving arguments
/// 1+α (three times) against 1+2α+β and the conjugate pair
/// 1 + (α−β ± i(α+β)√3)/2.
///
/// When α = β is real the value collapses to the hyperbolic form
/// Γ(1+α)³/Γ(1+3α) · sinh(πα√3)/(πα√3); that route is evaluated and
/// compared whenever it applies.
pub fn phi_ramanujan(
    alpha: &Complex,
    beta: &Complex,
    digits: u32,
) -> Result<(EvaluationReport, Option<CheckReport>)> {
    let build = |wp: u32| -> Result<GammaQuotient> {
        let a = Complex::with_val(wp, alpha);
        let b = Complex::with_val(wp, beta);
        let sqrt3 = Float::with_val(wp, 3u32).sqrt();
        let shear = Complex::with_val(wp, (Float::new(wp), sqrt3)) * Complex::with_val(wp, &a + &b);
        let diff = Complex::with_val(wp, &a - &b);
        let num_args = vec![Complex::with_val(wp, 1u32 + &a); 3];
        let den_args = vec![
            Complex::with_val(wp, 1u32 + Complex::with_val(wp, 2u32 * &a) + &b),
            Complex::with_val(wp, 1u32 + Complex::with_val(wp, &diff + &shear) / 2u32),
            Complex::with_val(wp, 1u32 + Complex::with_val(wp, &diff - &shear) / 2u32),
        ];
        GammaQuotient::new(num_args, den_args, Prefactor::Exact(Rational::from(1)))
    };
    let report = certify_direct(digits, build)?;

    let check = if alpha == beta && alpha.imag().is_zero() {
        let wp = mp::bits_for(digits) + 32;
        let a = Float::with_val(wp, alpha.real());
        let hyper = if a.is_zero() {
            Float::with_val(wp, 1u32)
        } else {
            let x = mp::pi(wp) * &a * Float::with_val(wp, 3u32).sqrt();
            let g1 = gamma::gamma_real(&Float::with_val(wp, 1u32 + &a), wp)?;
            let g3 = gamma::gamma_real(&Float::with_val(wp, 1u32 + Float::with_val(wp, 3u32 * &a)), wp)?;
            g1.pow(3u32) / g3 * x.clone().sinh() / x
        };
        let report_check = CheckReport::new_relative(
            "hyperbolic sinh form",
            report.value.real().clone(),
            hyper,
            decimal_tol(digits.saturating_sub(3)),
        );
        assert!(
            report_check.pass,
            "gamma quotient and sinh form disagree: {}",
            report_check.summary()
        );
        Some(report_check)
    } else {
        None
    };
    Ok((report, check))
}

/// ∏_{k≥2} 1/(1 − k^(−n)) for n ≥ 2: the generating value whose Dirichlet
/// coefficients count multiplicative partitions. Equals
/// ∏_{j=1}^{n−1} Γ(2 − ξ) over the nontrivial n-th roots of unity ξ; the
/// conjugate-closed argument set makes the value real.
pub fn multpart_value(n: u32, digits: u32) -> Result<EvaluationReport> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "n must be at least 2 (factors vanish for n = {n})"
        )));
    }
    let build = |wp: u32| -> Result<GammaQuotient> {
        let num_args = (1..n)
            .map(|j| Complex::with_val(wp, 2u32 - mp::root_of_unity(n, j, wp)))
            .collect();
        let den_args = vec![Complex::with_val(wp, 1u32); (n - 1) as usize];
        GammaQuotient::new(num_args, den_args, Prefactor::Exact(Rational::from(1)))
    };
    let mut report = certify_direct(digits, build)?;
    let scale = Float::with_val(64, report.value.real().clone().abs()).max(&Float::with_val(64, 1u32));
    let imag = Float::with_val(64, report.value.imag().clone().abs());
    assert!(
        imag <= scale * decimal_tol(digits),
        "conjugate-paired gamma arguments left an imaginary residue of {imag}"
    );
    let prec = report.value.prec().0;
    report.value = Complex::with_val(prec, report.value.real());
    Ok(report)
}

/// Number of ways to write n as an unordered product of integers ≥ 2, with
/// 1 counted as the empty product.
pub fn count_multiplicative_partitions(n: u64) -> u64 {
    fn divisors_of(n: u64) -> Vec<u64> {
        let mut small = Vec::new();
        let mut large = Vec::new();
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                small.push(d);
                if d != n / d {
                    large.push(n / d);
                }
            }
            d += 1;
        }
        large.reverse();
        small.extend(large);
        small
    }
    fn count(n: u64, max: u64) -> u64 {
        if n == 1 {
            return 1;
        }
        divisors_of(n)
            .into_iter()
            .filter(|&d| d >= 2 && d <= max)
            .map(|d| count(n / d, d))
            .sum()
    }
    count(n, n)
}

/// ∏_k (k^n − z^n)/(k^n + z^n) from k = 0, optionally with one index
/// removed.
///
/// Plain mode (`removed = None`) takes any z that is not a nonnegative
/// integer (those put a zero or pole on the index ladder) and checks the
/// engine value against the alternating gamma product over the 2n-th roots
/// of unity, ∏_{j=1}^{2n} Γ(zξ^j)^(±1) with sign (−1)^(j+n+1).
///
/// Removed mode (`removed = Some(m)`) requires z = m, skips the vanishing
/// factor at k = m, and checks against
/// (−1)^m m! (2m/n) ∏_{j=1}^{2n−1} Γ(−mξ^j)^((−1)^(j+1)); for m = 0 the
/// product telescopes to 1 and there is no nontrivial closed form to check.
pub fn cyclotomic_power_product(
    n: u32,
    z: &Complex,
    digits: u32,
    removed: Option<u32>,
) -> Result<(EvaluationReport, Vec<CheckReport>)> {
    if n == 0 {
        return Err(Error::Precondition("exponent n must be positive".into()));
    }
    match removed {
        None => {
            let nonneg_integer =
                z.imag().is_zero() && z.real().is_integer() && z.real().is_sign_positive()
                    || (z.real().is_zero() && z.imag().is_zero());
            if nonneg_integer {
                return Err(Error::Pole {
                    arg: fmt_complex_short(z),
                });
            }
            let t0 = Instant::now();
            let spec_at = |wp: u32| -> RationalFunctionSpec {
                let zn = Complex::with_val(wp, z).pow(n);
                let mut num = vec![Complex::new(wp); (n + 1) as usize];
                let mut den = num.clone();
                num[0] = Complex::with_val(wp, -zn.clone());
                num[n as usize] = Complex::with_val(wp, 1u32);
                den[0] = zn;
                den[n as usize] = Complex::with_val(wp, 1u32);
                RationalFunctionSpec::new(
                    Poly::Big(crate::mp::poly::CPoly::new(wp, num)),
                    Poly::Big(crate::mp::poly::CPoly::new(wp, den)),
                    0,
                    BTreeSet::new(),
                )
                .expect("coefficient lists are nonzero by construction")
            };
            let (value, certified) = mp::certify_complex(digits, |wp| {
                to_gamma_quotient(&spec_at(wp), wp)?.eval(wp)
            })?;
            let closed_form = to_gamma_quotient(&spec_at(mp::bits_for(digits)), mp::bits_for(digits))?;
            let report = EvaluationReport {
                value: value.clone(),
                closed_form,
                digits_requested: digits,
                digits_certified: certified,
                diagnostics: Diagnostics {
                    head_terms: 0,
                    exclusions_applied: 0,
                    elapsed: t0.elapsed(),
                },
            };

            let wp = mp::bits_for(digits) + 48;
            let zz = Complex::with_val(wp, z);
            let mut acc = Complex::new(wp);
            for j in 1..=2 * n {
                let arg = Complex::with_val(wp, &zz * mp::root_of_unity(2 * n, j, wp));
                let lg = gamma::complex_loggamma(&arg, wp)?;
                if (j + n + 1) % 2 == 0 {
                    acc += lg;
                } else {
                    acc -= lg;
                }
            }
            let closed = acc.exp();
            Ok((report, compare_complex("alternating gamma product", &value, &closed, digits)))
        }
        Some(m) => {
            let z_matches = z.imag().is_zero() && *z.real() == m;
            if !z_matches {
                return Err(Error::Precondition(format!(
                    "removed index {m} requires z = {m}, got z = {}",
                    fmt_complex_short(z)
                )));
            }
            let mn = Rational::from(Integer::from(m).pow(n));
            let mut num = vec![Rational::new(); (n + 1) as usize];
            let mut den = num.clone();
            num[0] = -mn.clone();
            num[n as usize] = Rational::from(1);
            den[0] = mn;
            den[n as usize] = Rational::from(1);
            let spec = RationalFunctionSpec::new(
                Poly::Exact(RatPoly::new(num)),
                Poly::Exact(RatPoly::new(den)),
                0,
                BTreeSet::from([m as i64]),
            )?;
            let report = evaluate(&spec, digits)?;
            if m == 0 {
                return Ok((report, Vec::new()));
            }

            let wp = mp::bits_for(digits) + 48;
            let mut acc = Complex::new(wp);
            for j in 1..2 * n {
                let arg = Complex::with_val(wp, -Float::with_val(wp, m) * mp::root_of_unity(2 * n, j, wp));
                let lg = gamma::complex_loggamma(&arg, wp)?;
                if j % 2 == 1 {
                    acc += lg;
                } else {
                    acc -= lg;
                }
            }
            let mut pref = Rational::from((2 * m, n));
            pref *= Rational::from(Integer::factorial(m));
            if m % 2 == 1 {
                pref = -pref;
            }
            let closed = acc.exp() * mp::complex_from_rational(&pref, wp);
            Ok((
                report.clone(),
                compare_complex("removed-index gamma product", &report.value, &closed, digits),
            ))
        }
    }
}

/// Real-part (and, when it matters, imaginary-part) agreement reports for
/// two complex values, at relative tolerance 10^(−digits+3).
fn compare_complex(name: &str, got: &Complex, want: &Complex, digits: u32) -> Vec<CheckReport> {
    let tol = decimal_tol(digits.saturating_sub(3));
    let mut checks = vec![CheckReport::new_relative(
        format!("{name} (real part)"),
        got.real().clone(),
        want.real().clone(),
        tol.clone(),
    )];
    let scale = Float::with_val(64, want.abs_ref());
    let visible = Float::with_val(64, want.imag().clone().abs()) > Float::with_val(64, &scale * &tol);
    if visible {
        checks.push(CheckReport::new(
            format!("{name} (imaginary part)"),
            got.imag().clone(),
            want.imag().clone(),
            scale * tol,
        ));
    }
    checks
}

/// ∫₀^∞ Γ(b)²|Γ(a+ix)|² / (Γ(a)²|Γ(b+ix)|²) dx against its two closed
/// forms, for real 0 < a and b > a + 1/2 (the integrand must decay faster
/// than 1/x). Returns the quadrature-vs-closed-form report and the internal
/// agreement report between the two closed forms.
pub fn mellin_barnes_check(a: &Float, b: &Float, digits: u32) -> Result<Vec<CheckReport>> {
    if !(a.is_finite() && b.is_finite()) || a.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Precondition("a must be finite and positive".into()));
    }
    let gap = Float::with_val(64, b - a);
    if gap <= 0.5 {
        return Err(Error::Precondition(format!(
            "need b − a > 1/2 for the integral to converge, got {gap}"
        )));
    }
    let wp = mp::bits_for(digits) + 48;
    let a = Float::with_val(wp, a);
    let b = Float::with_val(wp, b);
    let g = |x: &Float| -> Float {
        gamma::gamma_real(&Float::with_val(wp, x), wp)
            .expect("argument is positive")
    };

    // Weight normalized to W(0) = 1.
    let k_scale = {
        let gb = g(&b);
        let ga = g(&a);
        Float::with_val(wp, &gb / &ga).square()
    };
    let mut weight = |x: &Float| -> Float {
        let za = Complex::with_val(wp, (a.clone(), x.clone()));
        let zb = Complex::with_val(wp, (b.clone(), x.clone()));
        let la = gamma::complex_loggamma(&za, wp).expect("re > 0 keeps gamma regular");
        let lb = gamma::complex_loggamma(&zb, wp).expect("re > 0 keeps gamma regular");
        let d = Float::with_val(wp, la.real() - lb.real()) * 2u32;
        Float::with_val(wp, &k_scale * d.exp())
    };

    let closed1 = {
        let half = Rational::from((1, 2));
        let sqrt_pi = mp::pi(wp).sqrt();
        let top = g(&Float::with_val(wp, &a + mp::float_from_rational(&half, wp)))
            * g(&b)
            * g(&Float::with_val(wp, Float::with_val(wp, &b - &a) - mp::float_from_rational(&half, wp)));
        let bot = g(&a)
            * g(&Float::with_val(wp, &b - mp::float_from_rational(&half, wp)))
            * g(&Float::with_val(wp, &b - &a));
        sqrt_pi / 2u32 * top / bot
    };
    let closed2 = {
        let top = g(&Float::with_val(wp, 2u32 * &a))
            * g(&Float::with_val(wp, Float::with_val(wp, 2u32 * &b) - Float::with_val(wp, 2u32 * &a) - 1u32));
        let bot = g(&Float::with_val(wp, &b - &a)).square()
            * g(&Float::with_val(wp, Float::with_val(wp, 2u32 * &b) - 1u32));
        top / bot
    };
    let bridge = CheckReport::new_relative(
        "closed forms agree",
        closed1.clone(),
        mp::pi(wp) * &k_scale * &closed2,
        decimal_tol(digits),
    );

    // Absolute error budget: half to truncation, half to quadrature.
    let target = Float::with_val(wp, closed1.clone().abs()) * decimal_tol(digits) / 4u32;
    let decay = Float::with_val(wp, 2u32 * Float::with_val(wp, &b - &a)) - 1u32;
    let mut upper = Float::with_val(wp, 64u32);
    let mut tail = Float::with_val(wp, weight(&upper) * &upper) / &decay;
    for _ in 0..60 {
        if tail < target {
            break;
        }
        upper *= 2u32;
        tail = Float::with_val(wp, weight(&upper) * &upper) / &decay;
    }

    let zero = Float::new(wp);
    let f0 = weight(&zero);
    let f2 = weight(&upper);
    let mid = Float::with_val(wp, &upper / 2u32);
    let f1 = weight(&mid);
    let s = Float::with_val(wp, &upper / 6u32) * Float::with_val(wp, &f0 + Float::with_val(wp, 4u32 * &f1) + &f2);
    let quad = adaptive_simpson(&mut weight, &zero, &upper, &f0, &f1, &f2, &s, &target, 48, wp);

    let integral = quad + tail;
    Ok(vec![
        CheckReport::new_relative(
            "integral matches closed form",
            integral,
            closed1,
            decimal_tol(digits),
        ),
        bridge,
    ])
}

/// One recursion step of adaptive Simpson with Richardson correction; `s` is
/// the single-interval estimate over [x0, x2] with midpoint value f1.
#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &mut dyn FnMut(&Float) -> Float,
    x0: &Float,
    x2: &Float,
    f0: &Float,
    f1: &Float,
    f2: &Float,
    s: &Float,
    tol: &Float,
    depth: u32,
    wp: u32,
) -> Float {
    let x1 = Float::with_val(wp, x0 + x2) / 2u32;
    let xl = Float::with_val(wp, x0 + &x1) / 2u32;
    let xr = Float::with_val(wp, &x1 + x2) / 2u32;
    let fl = f(&xl);
    let fr = f(&xr);
    let h12 = Float::with_val(wp, x2 - x0) / 12u32;
    let sl = Float::with_val(wp, &h12 * Float::with_val(wp, f0 + Float::with_val(wp, 4u32 * &fl) + f1));
    let sr = Float::with_val(wp, &h12 * Float::with_val(wp, f1 + Float::with_val(wp, 4u32 * &fr) + f2));
    let s2 = Float::with_val(wp, &sl + &sr);
    let err = Float::with_val(wp, &s2 - s).abs() / 15u32;
    if depth == 0 || err <= *tol {
        let corr = Float::with_val(wp, &s2 - s) / 15u32;
        return s2 + corr;
    }
    let half_tol = Float::with_val(wp, tol / 2u32);
    adaptive_simpson(f, x0, &x1, f0, &fl, f1, &sl, &half_tol, depth - 1, wp)
        + adaptive_simpson(f, &x1, x2, f1, &fr, f2, &sr, &half_tol, depth - 1, wp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: f64, prec: u32) -> Complex {
        Complex::with_val(prec, (v, 0.0))
    }

    #[test]
    fn phi_at_equal_unit_arguments() {
        // φ(1,1) = (1/6)·sinh(√3 π)/(√3 π).
        let one = real(1.0, 128);
        let (report, check) = phi_ramanujan(&one, &one, 30).unwrap();
        let wp = 256;
        let x = mp::pi(wp) * Float::with_val(wp, 3u32).sqrt();
        let want = x.clone().sinh() / x / 6u32;
        let diff = Float::with_val(wp, report.value.real() - &want).abs();
        assert!(diff < 1e-28, "φ(1,1) off by {diff}");
        let check = check.expect("α = β is the hyperbolic case");
        assert!(check.pass);
    }

    #[test]
    fn phi_distinct_arguments_match_partial_product() {
        let (report, check) = phi_ramanujan(&real(1.0, 128), &real(2.0, 128), 20).unwrap();
        assert!(check.is_none());
        // ∏_{n=1}^{N} (1 + (3/(n+1))³) with N = 20000: converges cubically,
        // so ~8 digits; compare loosely.
        let wp = 128;
        let mut partial = Float::with_val(wp, 1u32);
        for n in 1..=20_000u32 {
            let t = Float::with_val(wp, 3u32) / Float::with_val(wp, n + 1);
            partial *= 1u32 + t.pow(3u32);
        }
        let rel = Float::with_val(wp, report.value.real() - &partial).abs() / partial;
        assert!(rel.to_f64() < 1e-7, "φ(1,2) vs partial product: rel {rel}");
    }

    #[test]
    fn phi_rejects_gamma_poles() {
        // α = −2 puts 1+α = −1 at a pole.
        let err = phi_ramanujan(&real(-2.0, 128), &real(-2.0, 128), 10);
        assert!(matches!(err, Err(Error::Pole { .. })));
    }

    #[test]
    fn multiplicative_partition_counts() {
        // 1, 12 = 2·6 = 3·4 = 2·2·3 = 12, 30 = 2·15 = 3·10 = 5·6 = 2·3·5 = 30.
        assert_eq!(count_multiplicative_partitions(1), 1);
        assert_eq!(count_multiplicative_partitions(12), 4);
        assert_eq!(count_multiplicative_partitions(30), 5);
        assert_eq!(count_multiplicative_partitions(64), 11);
    }

    #[test]
    fn multpart_small_cases() {
        // n = 2: ∏ k²/(k²−1) over k ≥ 2 telescopes to 2.
        let r2 = multpart_value(2, 30).unwrap();
        let two = Float::with_val(256, 2u32);
        assert!(Float::with_val(256, r2.value.real() - &two).abs() < 1e-28);
        assert!(r2.value.imag().is_zero());
        assert!(multpart_value(1, 10).is_err());
    }

    #[test]
    fn mellin_barnes_unit_case() {
        // a = 1, b = 3: the integral is π/3 (closed form collapses to
        // (√π/2)·Γ(3/2)·2·Γ(3/2) / (Γ(5/2)·Γ(2)) = π/3).
        let checks = mellin_barnes_check(
            &Float::with_val(64, 1u32),
            &Float::with_val(64, 3u32),
            8,
        )
        .unwrap();
        for c in &checks {
            assert!(c.pass, "{}", c.summary());
        }
        let third_pi = mp::pi(128) / 3u32;
        let diff = Float::with_val(128, &checks[0].rhs - &third_pi).abs();
        assert!(diff < 1e-20, "closed form is not π/3: {diff}");
    }

    #[test]
    fn mellin_barnes_preconditions() {
        let f = |v: f64| Float::with_val(64, v);
        assert!(matches!(
            mellin_barnes_check(&f(1.0), &f(1.4), 8),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            mellin_barnes_check(&f(-1.0), &f(3.0), 8),
            Err(Error::Precondition(_))
        ));
    }
}
