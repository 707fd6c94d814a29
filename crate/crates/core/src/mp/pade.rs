//! Diagonal Padé approximants from Maclaurin coefficients.
//!
//! The denominator coefficients solve an n×n Toeplitz system. When the input
//! series is exact-rational the system is solved exactly and the defining
//! property (series agreement through order 2n) is asserted with exact
//! equality; the float path solves at twice the target precision with
//! magnitude pivoting and verifies to a guarded tolerance.

use crate::error::{Error, Result};
use crate::mp::poly::{CPoly, Poly, RatPoly};
use crate::mp::roots;
use rug::{Complex, Float, Rational};
use std::cmp::Ordering;

/// An [n,n] rational approximant with its located zeros and poles.
#[derive(Debug, Clone)]
pub struct PadeApproximant {
    pub n: usize,
    pub num: Poly,
    pub den: Poly,
    /// Zeros of the numerator, at the precision passed to the constructor.
    pub roots: Vec<Complex>,
    /// Zeros of the denominator.
    pub poles: Vec<Complex>,
    /// Largest |num(root)| over the returned roots (0 when there are none).
    pub root_residual: Float,
    /// Largest |den(pole)| over the returned poles.
    pub pole_residual: Float,
}

impl PadeApproximant {
    /// Evaluate num(z)/den(z).
    pub fn eval_complex(&self, z: &Complex, prec: u32) -> Complex {
        let wp = prec + 16;
        let zw = Complex::with_val(wp, z);
        let n = self.num.eval_complex(&zw, wp);
        let d = self.den.eval_complex(&zw, wp);
        Complex::with_val(prec, n / d)
    }

    /// Exact evaluation, available in exact-coefficient mode only.
    pub fn eval_rational(&self, x: &Rational) -> Option<Rational> {
        let (num, den) = (self.num.exact()?, self.den.exact()?);
        let d = den.eval(x);
        if d.cmp0() == Ordering::Equal {
            return None;
        }
        Some(Rational::from(num.eval(x) / d))
    }
}

/// Exact-rational Gaussian elimination; None when the matrix is singular.
fn solve_exact(mut a: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].clone().abs().cmp(&a[j][col].clone().abs()))
            .unwrap();
        if a[piv][col].cmp0() == Ordering::Equal {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            if a[row][col].cmp0() == Ordering::Equal {
                continue;
            }
            let f = Rational::from(&a[row][col] / &a[col][col]);
            for k in col..n {
                let sub = Rational::from(&f * &a[col][k]);
                a[row][k] -= sub;
            }
            let sub = Rational::from(&f * &rhs[col]);
            rhs[row] -= sub;
        }
    }
    let mut x = vec![Rational::new(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc -= Rational::from(&a[row][k] * &x[k]);
        }
        x[row] = Rational::from(&acc / &a[row][row]);
    }
    Some(x)
}

/// Float Gaussian elimination with magnitude pivoting; None when the largest
/// available pivot is negligible against the initial coefficient scale.
fn solve_float(mut a: Vec<Vec<Float>>, mut rhs: Vec<Float>, wp: u32) -> Option<Vec<Float>> {
    let n = rhs.len();
    let scale = a
        .iter()
        .flatten()
        .map(|v| v.clone().abs())
        .fold(Float::new(wp), |acc, v| if v > acc { v } else { acc });
    if scale.is_zero() {
        return None;
    }
    let negligible = scale * Float::with_val(wp, Float::i_exp(1, -(wp as i32) + 32));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .clone()
                    .abs()
                    .partial_cmp(&a[j][col].clone().abs())
                    .unwrap_or(Ordering::Equal)
            })
            .unwrap();
        if a[piv][col].clone().abs() <= negligible {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = Float::with_val(wp, &a[row][col] / &a[col][col]);
            for k in col..n {
                let sub = Float::with_val(wp, &f * &a[col][k]);
                a[row][k] -= sub;
            }
            let sub = Float::with_val(wp, &f * &rhs[col]);
            rhs[row] -= sub;
        }
    }
    let mut x = vec![Float::new(wp); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc -= Float::with_val(wp, &a[row][k] * &x[k]);
        }
        x[row] = Float::with_val(wp, &acc / &a[row][row]);
    }
    Some(x)
}

/// Re-expand num/den as a Maclaurin series through order 2n:
/// d_m = (a_m − Σ_{j=1..min(m,n)} b_j d_{m−j}) / b_0.
fn reexpand_exact(num: &RatPoly, den: &RatPoly, order: usize) -> Vec<Rational> {
    let b0 = den.coeff(0);
    let mut d: Vec<Rational> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut acc = num.coeff(m);
        for j in 1..=m.min(den.degree()) {
            acc -= Rational::from(den.coeff(j) * &d[m - j]);
        }
        d.push(Rational::from(acc / &b0));
    }
    d
}

fn reexpand_float(num: &[Float], den: &[Float], order: usize, wp: u32) -> Vec<Float> {
    let zero = Float::new(wp);
    let mut d: Vec<Float> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut acc = num.get(m).cloned().unwrap_or_else(|| zero.clone());
        for (j, bj) in den.iter().enumerate().skip(1) {
            if j > m {
                break;
            }
            acc -= Float::with_val(wp, bj * &d[m - j]);
        }
        d.push(Float::with_val(wp, acc / &den[0]));
    }
    d
}

fn locate(poly: &Poly, prec: u32) -> Result<(Vec<Complex>, Float)> {
    if poly.degree() == 0 {
        return Ok((Vec::new(), Float::new(prec)));
    }
    let found = roots::poly_roots_any(poly, prec)?;
    let mut worst = Float::new(prec);
    for r in &found {
        let v = poly.eval_complex(r, prec + 32);
        let mag = Float::with_val(prec, v.abs_ref());
        if mag > worst {
            worst = mag;
        }
    }
    Ok((found, worst))
}

/// The [n,n] approximant of a series given by exact-rational Maclaurin
/// coefficients. Needs 2n+1 coefficients with nonzero constant term; `prec`
/// drives only the root/pole location.
pub fn pade_from_series(coeffs: &[Rational], n: usize, prec: u32) -> Result<PadeApproximant> {
    if n == 0 {
        return Err(Error::Precondition("approximant order must be >= 1".into()));
    }
    if coeffs.len() < 2 * n + 1 {
        return Err(Error::Precondition(format!(
            "order {n} needs {} Maclaurin coefficients, got {}",
            2 * n + 1,
            coeffs.len()
        )));
    }
    if coeffs[0].cmp0() == Ordering::Equal {
        return Err(Error::Precondition(
            "series must have a nonzero constant term".into(),
        ));
    }
    let c = &coeffs[..2 * n + 1];

    // Rows m = n+1 .. 2n of the agreement conditions, unknowns b_1..b_n:
    //   Σ_j c_{m−j} b_j = −c_m.
    let a: Vec<Vec<Rational>> = (0..n)
        .map(|r| (0..n).map(|j| c[n + r - j].clone()).collect())
        .collect();
    let rhs: Vec<Rational> = (0..n).map(|r| -c[n + 1 + r].clone()).collect();
    let b_tail = solve_exact(a, rhs).ok_or(Error::DegenerateTable { n })?;

    let mut den_coeffs = Vec::with_capacity(n + 1);
    den_coeffs.push(Rational::from(1));
    den_coeffs.extend(b_tail);
    let den = RatPoly::new(den_coeffs);

    let num_coeffs: Vec<Rational> = (0..=n)
        .map(|m| {
            let mut acc = Rational::new();
            for j in 0..=m.min(n) {
                acc += Rational::from(den.coeff(j) * &c[m - j]);
            }
            acc
        })
        .collect();
    let num = RatPoly::new(num_coeffs);

    // Defining property, exact: re-expansion reproduces the series.
    let d = reexpand_exact(&num, &den, 2 * n);
    for (m, (dm, cm)) in d.iter().zip(c.iter()).enumerate() {
        assert_eq!(dm, cm, "re-expansion diverges from input at order {m}");
    }

    let (found_roots, root_residual) = locate(&Poly::Exact(num.clone()), prec)?;
    let (found_poles, pole_residual) = locate(&Poly::Exact(den.clone()), prec)?;
    Ok(PadeApproximant {
        n,
        num: Poly::Exact(num),
        den: Poly::Exact(den),
        roots: found_roots,
        poles: found_poles,
        root_residual,
        pole_residual,
    })
}

/// Float-coefficient path, solved at twice the target precision.
pub fn pade_from_series_float(coeffs: &[Float], n: usize, prec: u32) -> Result<PadeApproximant> {
    if n == 0 {
        return Err(Error::Precondition("approximant order must be >= 1".into()));
    }
    if coeffs.len() < 2 * n + 1 {
        return Err(Error::Precondition(format!(
            "order {n} needs {} Maclaurin coefficients, got {}",
            2 * n + 1,
            coeffs.len()
        )));
    }
    if coeffs[0].is_zero() {
        return Err(Error::Precondition(
            "series must have a nonzero constant term".into(),
        ));
    }
    let wp = 2 * prec + 32;
    let c: Vec<Float> = coeffs[..2 * n + 1]
        .iter()
        .map(|v| Float::with_val(wp, v))
        .collect();

    let a: Vec<Vec<Float>> = (0..n)
        .map(|r| (0..n).map(|j| c[n + r - j].clone()).collect())
        .collect();
    let rhs: Vec<Float> = (0..n).map(|r| -c[n + 1 + r].clone()).collect();
    let b_tail = solve_float(a, rhs, wp).ok_or(Error::DegenerateTable { n })?;

    let mut den_coeffs = Vec::with_capacity(n + 1);
    den_coeffs.push(Float::with_val(wp, 1));
    den_coeffs.extend(b_tail);

    let num_coeffs: Vec<Float> = (0..=n)
        .map(|m| {
            let mut acc = Float::new(wp);
            for j in 0..=m.min(n) {
                acc += Float::with_val(wp, &den_coeffs[j] * &c[m - j]);
            }
            acc
        })
        .collect();

    // Verification with a guarded tolerance: residual solving at 2× precision
    // leaves slack unless the table is effectively degenerate.
    let d = reexpand_float(&num_coeffs, &den_coeffs, 2 * n, wp);
    let scale = c
        .iter()
        .map(|v| v.clone().abs())
        .fold(Float::with_val(wp, 1), |acc, v| if v > acc { v } else { acc });
    let tol = scale * Float::with_val(wp, Float::i_exp(1, -(prec as i32) + 24));
    for (dm, cm) in d.iter().zip(c.iter()) {
        if Float::with_val(wp, dm - cm).abs() > tol {
            return Err(Error::DegenerateTable { n });
        }
    }

    let to_cpoly = |v: &[Float]| {
        CPoly::new(
            wp,
            v.iter()
                .map(|x| Complex::with_val(wp, (x, Float::new(wp))))
                .collect(),
        )
    };
    let num = Poly::Big(to_cpoly(&num_coeffs));
    let den = Poly::Big(to_cpoly(&den_coeffs));
    let (found_roots, root_residual) = locate(&num, prec)?;
    let (found_poles, pole_residual) = locate(&den, prec)?;
    Ok(PadeApproximant {
        n,
        num,
        den,
        roots: found_roots,
        poles: found_poles,
        root_residual,
        pole_residual,
    })
}

/// Maclaurin coefficients of cos through order `order` (exact).
pub fn cos_series(order: usize) -> Vec<Rational> {
    let mut c = vec![Rational::new(); order + 1];
    let mut fact = rug::Integer::from(1);
    for (m, item) in c.iter_mut().enumerate() {
        if m > 0 {
            fact *= m as u32;
        }
        if m % 2 == 0 {
            *item = Rational::from((if m % 4 == 0 { 1 } else { -1 }, fact.clone()));
        }
    }
    c
}

/// Maclaurin coefficients of exp through order `order` (exact).
pub fn exp_series(order: usize) -> Vec<Rational> {
    let mut c = Vec::with_capacity(order + 1);
    let mut fact = rug::Integer::from(1);
    for m in 0..=order {
        if m > 0 {
            fact *= m as u32;
        }
        c.push(Rational::from((1, fact.clone())));
    }
    c
}
