//! Numeric substrate: precision bookkeeping, agreement counting, the
//! certification loop, and the special-function / polynomial submodules.
//!
//! All values are MPFR/MPC-backed (`rug::Float`, `rug::Complex`) and carry
//! their precision explicitly; nothing here reads ambient state. Individual
//! arithmetic operations are correctly rounded by MPFR (well inside the
//! 4-ulp budget the rest of the crate assumes); accumulated error is managed
//! by evaluating at guarded working precision and certifying by two-precision
//! agreement.

pub mod bernoulli;
pub mod gamma;
pub mod pade;
pub mod poly;
pub mod roots;

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::{Complex, Float, Rational};

pub(crate) const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Bits that comfortably carry `digits` decimal digits, with guard room.
pub fn bits_for(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 32
}

/// Decimal digits faithfully representable at `prec` bits.
pub fn digits_capacity(prec: u32) -> u32 {
    (prec as f64 / LOG2_10).floor() as u32
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// log(2π) at `prec` bits.
pub fn ln_2pi(prec: u32) -> Float {
    let two_pi = pi(prec + 8) * 2u32;
    Float::with_val(prec, two_pi.ln_ref())
}

/// ζ(k) for integer k ≥ 2 (MPFR). Plumbing for checks whose *inputs* are
/// zeta values; the acceleration module computes its own zeta when zeta
/// itself is the claim under test.
pub fn zeta_int(k: u32, prec: u32) -> Float {
    assert!(k >= 2, "zeta_int wants k >= 2, got {k}");
    Float::with_val(prec, Float::zeta_u(k))
}

pub fn float_from_rational(q: &Rational, prec: u32) -> Float {
    Float::with_val(prec, q)
}

pub fn complex_from_rational(q: &Rational, prec: u32) -> Complex {
    Complex::with_val(prec, Float::with_val(prec, q))
}

/// e^{2πi t/n} at `prec` bits.
pub fn root_of_unity(n: u32, t: u32, prec: u32) -> Complex {
    assert!(n > 0);
    let angle = pi(prec + 8) * 2u32 * Float::with_val(prec + 8, t) / Float::with_val(prec + 8, n);
    let (s, c) = angle.sin_cos(Float::new(prec + 8));
    Complex::with_val(prec, (c, s))
}

/// |a - b| as a Float at the larger operand precision.
pub fn abs_diff_complex(a: &Complex, b: &Complex) -> Float {
    let prec = a.prec().0.max(b.prec().0);
    Float::with_val(prec, Complex::with_val(prec, a - b).abs_ref())
}

/// Decimal digits to which `a` agrees with `b`, relative to |b|.
///
/// `b` is the reference (typically the higher-precision run). Exact equality
/// maxes out at the smaller operand's representable digits.
pub fn agreed_digits(a: &Complex, b: &Complex) -> u32 {
    let prec = a.prec().0.max(b.prec().0);
    let diff = abs_diff_complex(a, b);
    let scale = Float::with_val(prec, b.abs_ref());
    if diff.is_zero() {
        return digits_capacity(a.prec().0.min(b.prec().0));
    }
    if scale.is_zero() {
        return 0;
    }
    let lg = Float::with_val(64, (diff / scale).log10_ref());
    let d = -lg.to_f64();
    if d <= 0.0 {
        0
    } else {
        d.floor() as u32
    }
}

pub fn agreed_digits_real(a: &Float, b: &Float) -> u32 {
    let pa = a.prec();
    let pb = b.prec();
    agreed_digits(
        &Complex::with_val(pa, (a, &Float::new(pa))),
        &Complex::with_val(pb, (b, &Float::new(pb))),
    )
}

/// Run `eval` at increasing working precision until two runs 32 bits apart
/// agree to `digits` decimal digits; returns the higher-precision value and
/// the agreement count.
pub fn certify_complex<F>(digits: u32, mut eval: F) -> Result<(Complex, u32)>
where
    F: FnMut(u32) -> Result<Complex>,
{
    let mut wp = bits_for(digits) + 16;
    let mut best = 0u32;
    for _ in 0..6 {
        let lo = eval(wp)?;
        let hi = eval(wp + 32)?;
        let agreed = agreed_digits(&lo, &hi);
        if agreed >= digits {
            return Ok((hi, agreed));
        }
        best = best.max(agreed);
        wp += ((digits - agreed) as f64 * LOG2_10).ceil() as u32 + 64;
    }
    Err(Error::Certification {
        requested: digits,
        achieved: best,
    })
}

/// Real-valued counterpart of [`certify_complex`].
pub fn certify_real<F>(digits: u32, mut eval: F) -> Result<(Float, u32)>
where
    F: FnMut(u32) -> Result<Float>,
{
    let (value, agreed) = certify_complex(digits, |wp| {
        let v = eval(wp)?;
        let zero = Float::new(v.prec());
        Ok(Complex::with_val(v.prec(), (v, zero)))
    })?;
    Ok((value.into_real_imag().0, agreed))
}
