//! Complex log-gamma via the Stirling series with argument shifting,
//! reflection for the left half-plane, and Euler's constant from the same
//! digamma machinery.
//!
//! The returned log is the principal value of log applied to Γ(z) (imaginary
//! part in (−π, π]). Sums of such logs can differ from the log of the product
//! by multiples of 2πi, which disappears under exp; the product engine only
//! ever exponentiates.

use crate::error::{Error, Result};
use crate::mp::{self, bernoulli::bernoulli_number};
use rug::{Complex, Float, Rational};
use std::sync::Mutex;

/// z ∈ {0, −1, −2, …}, exactly.
pub fn is_nonpositive_integer(z: &Complex) -> bool {
    z.imag().is_zero() && z.real().is_integer() && *z.real() <= 0i32
}

pub(crate) fn pole_error(z: &Complex) -> Error {
    Error::Pole {
        arg: format!("{} + {}i", z.real().to_f64(), z.imag().to_f64()),
    }
}

/// Rough lgamma for the f64-level truncation bound only.
fn lgamma_f64(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
}

/// Series length M and shift radius r such that M Bernoulli terms at
/// |w| ≥ r, Re w ≥ 0 keep the Stirling truncation below 2^−(wp+8).
fn stirling_params(wp: u32) -> (usize, f64) {
    let m = (wp as f64 / 5.19).ceil() as usize + 2;
    let m2 = 2.0 * m as f64;
    // |R_M| ≤ 4|B_{2M+2}| / ((2M+1)(2M+2) r^{2M+1}) · 2^{M+1}, and
    // |B_{2M+2}| ≤ 4 (2M+2)! / (2π)^{2M+2}; solve |R_M| = 2^−(wp+8) for r.
    let ln_bound = 4f64.ln() + lgamma_f64(m2 + 3.0)
        - (m2 + 2.0) * (2.0 * std::f64::consts::PI).ln()
        - ((m2 + 1.0) * (m2 + 2.0)).ln()
        + (m as f64 + 1.0) * std::f64::consts::LN_2
        + (wp as f64 + 8.0) * std::f64::consts::LN_2;
    let r = (ln_bound / (m2 + 1.0)).exp();
    (m, r.max(2.0))
}

/// Stirling sum at w with Re w ≥ 1/2 and |w| ≥ the radius for `m_terms`.
fn stirling_series(w: &Complex, wp: u32, m_terms: usize) -> Complex {
    let ln_w = Complex::with_val(wp, w.ln_ref());
    let mut acc = Complex::with_val(wp, w - 0.5f64);
    acc *= &ln_w;
    acc -= w;
    acc += mp::ln_2pi(wp) / 2u32;

    // tail = (1/w) · (b_1 + t(b_2 + t(b_3 + …))), t = 1/w², b_m = B_2m/((2m)(2m−1))
    let t = Complex::with_val(wp, w.square_ref()).recip();
    let mut s = Complex::new(wp);
    for m in (1..=m_terms).rev() {
        let m = m as u32;
        let b = bernoulli_number(2 * m) / Rational::from((2 * m) * (2 * m - 1));
        s *= &t;
        s += mp::float_from_rational(&b, wp);
    }
    s /= w;
    acc + s
}

/// log Γ(z) with Re z ≥ 1/2: shift upward until the series radius is reached,
/// then subtract the logs of the shift factors.
fn loggamma_right_half(z: &Complex, wp: u32) -> Complex {
    let (m_terms, radius) = stirling_params(wp);
    let abs_z = Float::with_val(wp, z.abs_ref()).to_f64();
    let shift = if abs_z >= radius {
        0u32
    } else {
        (radius - z.real().to_f64()).ceil().max(0.0) as u32
    };
    let w = Complex::with_val(wp, z + shift);
    let mut lg = stirling_series(&w, wp, m_terms);
    for i in 0..shift {
        let factor = Complex::with_val(wp, z + i);
        lg -= factor.ln();
    }
    lg
}

/// Reduce the imaginary part into (−π, π], making the value the principal
/// log of Γ(z).
fn reduce_to_principal(mut lg: Complex, wp: u32) -> Complex {
    let two_pi = mp::pi(wp) * 2u32;
    let turns = Float::with_val(wp, lg.imag() / &two_pi).round();
    if !turns.is_zero() {
        *lg.mut_imag() -= turns * &two_pi;
    }
    let pi_hi = mp::pi(wp);
    if *lg.imag() > pi_hi {
        *lg.mut_imag() -= &two_pi;
    } else {
        let neg_pi = -pi_hi;
        if *lg.imag() <= neg_pi {
            *lg.mut_imag() += &two_pi;
        }
    }
    lg
}

/// Principal log Γ(z) to `prec` bits.
pub fn complex_loggamma(z: &Complex, prec: u32) -> Result<Complex> {
    if is_nonpositive_integer(z) {
        return Err(pole_error(z));
    }
    let zmag = Float::with_val(64, z.abs_ref());
    let mag_bits = zmag.get_exp().unwrap_or(0).max(0) as u32;
    let wp = prec + 48 + mag_bits + 10;
    let z_wp = Complex::with_val(wp, z);
    let lg = if z.real().to_f64() < 0.5 {
        // Γ(z)Γ(1−z) = π/sin(πz)
        let one_minus = Complex::with_val(wp, 1u32 - &z_wp);
        let rhs = loggamma_right_half(&one_minus, wp);
        let sin_piz = Complex::with_val(wp, &z_wp * mp::pi(wp)).sin();
        let ln_pi = Float::with_val(wp, mp::pi(wp).ln_ref());
        Complex::with_val(wp, ln_pi) - sin_piz.ln() - rhs
    } else {
        loggamma_right_half(&z_wp, wp)
    };
    Ok(Complex::with_val(prec, reduce_to_principal(lg, wp)))
}

/// Γ(z) = exp(complex_loggamma(z)); real arguments take the MPFR fast path.
pub fn complex_gamma(z: &Complex, prec: u32) -> Result<Complex> {
    if is_nonpositive_integer(z) {
        return Err(pole_error(z));
    }
    if z.imag().is_zero() {
        let g = gamma_real(&Float::with_val(prec + 16, z.real()), prec)?;
        return Ok(Complex::with_val(prec, g));
    }
    let lg = complex_loggamma(z, prec + 16)?;
    Ok(Complex::with_val(prec, lg.exp_ref()))
}

/// Γ(x) for real x (any sign, poles rejected), via MPFR.
pub fn gamma_real(x: &Float, prec: u32) -> Result<Float> {
    if x.is_integer() && *x <= 0i32 {
        return Err(Error::Pole {
            arg: format!("{}", x.to_f64()),
        });
    }
    Ok(Float::with_val(prec, x.gamma_ref()))
}

/// ψ(n) = ln n − 1/(2n) − Σ B_{2m}/(2m n^{2m}), n at or beyond the Stirling
/// radius for `wp`.
fn digamma_asymptotic(n: u32, wp: u32, m_terms: usize) -> Float {
    let nf = Float::with_val(wp, n);
    let mut acc = Float::with_val(wp, nf.ln_ref());
    acc -= Float::with_val(wp, 0.5) / &nf;
    let t = Float::with_val(wp, nf.square_ref()).recip();
    let mut s = Float::new(wp);
    for m in (1..=m_terms).rev() {
        let m = m as u32;
        let b = bernoulli_number(2 * m) / Rational::from(2 * m);
        s *= &t;
        s += mp::float_from_rational(&b, wp);
    }
    s *= &t;
    acc - s
}

fn euler_gamma_at(n: u32, wp: u32, m_terms: usize) -> Float {
    // H_{n−1} − ψ(n)
    let mut h = Float::new(wp);
    for k in 1..n {
        h += Float::with_val(wp, k).recip();
    }
    h - digamma_asymptotic(n, wp, m_terms)
}

static EULER_CACHE: Mutex<Option<Float>> = Mutex::new(None);

/// Euler's constant γ to `prec` bits, via H_{N−1} − ψ(N) with the digamma
/// asymptotic, certified by recomputation at 2N, cached at the highest
/// precision seen.
pub fn euler_gamma(prec: u32) -> Float {
    let mut cache = EULER_CACHE.lock().unwrap();
    if let Some(cached) = cache.as_ref() {
        if cached.prec() >= prec {
            return Float::with_val(prec, cached);
        }
    }
    let wp = prec + 48;
    let (m_terms, radius) = stirling_params(wp);
    let n = radius.ceil() as u32 + 1;
    let first = euler_gamma_at(n, wp, m_terms);
    let second = euler_gamma_at(2 * n, wp, m_terms);
    let agreement = mp::agreed_digits_real(&first, &second);
    assert!(
        agreement >= mp::digits_capacity(prec),
        "euler constant runs at N = {n} and {} disagree: {agreement} digits",
        2 * n
    );
    *cache = Some(second.clone());
    Float::with_val(prec, second)
}
