//! Polynomial root finding by simultaneous Aberth–Ehrlich iteration at
//! elevated working precision, validated by residual and Vieta checks.
//!
//! Working precision is 2× the requested precision plus the coefficient
//! magnitude spread, so clusters and double roots still come out accurate to
//! the caller's precision. No explicit deflation: all roots are refined
//! together, which is robust at the degrees (≤ 64) this crate needs.

use crate::error::{Error, Result};
use crate::mp::poly::{CPoly, Poly, RatPoly};
use rug::ops::Pow;
use rug::{Complex, Float};

pub const MAX_DEGREE: usize = 64;

/// All complex roots of `p` (multiplicity included) to roughly `prec` bits.
pub fn poly_roots(p: &CPoly, prec: u32) -> Result<Vec<Complex>> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::Precondition(
            "root finding needs degree >= 1".into(),
        ));
    }
    if p.degree() > MAX_DEGREE {
        return Err(Error::Precondition(format!(
            "degree {} exceeds the supported maximum {MAX_DEGREE}",
            p.degree()
        )));
    }

    // Exact zero roots come off first (zero constant coefficients are exact
    // in both coefficient modes whenever they are structural).
    let mut coeffs = p.coeffs().to_vec();
    let mut zero_roots = 0usize;
    while coeffs.len() > 1 && coeffs[0].real().is_zero() && coeffs[0].imag().is_zero() {
        coeffs.remove(0);
        zero_roots += 1;
    }

    let mut roots = vec![Complex::new(prec); zero_roots];
    if coeffs.len() == 1 {
        // Pure monomial: nothing left after the zero roots.
        return Ok(roots);
    }

    let lead_exp = Float::with_val(64, coeffs.last().unwrap().abs_ref())
        .get_exp()
        .unwrap_or(0);
    let max_exp = coeffs
        .iter()
        .filter_map(|c| Float::with_val(64, c.abs_ref()).get_exp())
        .max()
        .unwrap_or(0);
    let mag_bits = (max_exp - lead_exp).max(0) as u32;
    let wp = (2 * prec + 32 + mag_bits).max(p.prec());

    if coeffs.len() == 2 {
        let root = Complex::with_val(wp, -Complex::with_val(wp, &coeffs[0] / &coeffs[1]));
        roots.push(Complex::with_val(prec, root));
        return Ok(roots);
    }

    let q = CPoly::new(wp, coeffs).monic();
    let dq = q.derivative();
    let n = q.degree();

    // Fujiwara's bound 2·max_k |q_{n−k}|^{1/k} on the root magnitudes. Much
    // tighter than the Cauchy bound when coefficients are large (an integer
    // ladder of 20 roots has coefficients near 2^64 but Fujiwara stays at
    // ~2·Σroots), which keeps the walk from the initial circle short.
    let radius = {
        let mut fuji = Float::new(64);
        for k in 1..=n {
            let mag = Float::with_val(64, q.coeff(n - k).abs_ref()).root(k as u32);
            if mag > fuji {
                fuji = mag;
            }
        }
        (2.0 * fuji.to_f64()).max(1e-3)
    };

    // Perturbed circle: radii spread into the annulus, angles offset so no
    // start point sits on an axis of any real-coefficient symmetry.
    let mut z: Vec<Complex> = (0..n)
        .map(|i| {
            let r = radius * (0.45 + 0.55 * (i as f64 + 1.0) / n as f64);
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64) + 0.7;
            Complex::with_val(wp, (r * theta.cos(), r * theta.sin()))
        })
        .collect();

    let step_tol = Float::with_val(wp, Float::i_exp(1, -(prec as i32 + 16)));
    let max_coeff = q
        .coeffs()
        .iter()
        .map(|c| Float::with_val(wp, c.abs_ref()))
        .fold(Float::new(wp), |a, b| if b > a { b } else { a });
    // Accepting |q(z)| at this threshold bounds a double root's location
    // error by about 2^(−prec), since the residual scales as the squared
    // distance there; wp = 2·prec + 32 leaves the evaluation noise floor
    // 2^24 below it.
    let residual_tol_at = |zi: &Complex| -> Float {
        let grow = Float::with_val(wp, zi.abs_ref()).max(&Float::with_val(wp, 1));
        let pow = grow.pow(n as u32);
        Float::with_val(wp, Float::i_exp(1, -2 * (prec as i32) - 8))
            * (n as u32 + 1)
            * &max_coeff
            * pow
    };

    let budget = 200 + 20 * n;
    let mut settled = false;
    for _sweep in 0..budget {
        let mut max_rel_step = Float::new(wp);
        let mut residuals_ok = true;
        for i in 0..n {
            let pv = q.eval(&z[i]);
            if Float::with_val(wp, pv.abs_ref()) > residual_tol_at(&z[i]) {
                residuals_ok = false;
            }
            let dv = dq.eval(&z[i]);
            if dv.real().is_zero() && dv.imag().is_zero() {
                // Sitting on a critical point: nudge off and retry next sweep.
                z[i] += Complex::with_val(wp, (1e-3, 1.7e-3));
                residuals_ok = false;
                max_rel_step = Float::with_val(wp, 1);
                continue;
            }
            let w = Complex::with_val(wp, &pv / &dv);
            let mut repel = Complex::new(wp);
            let mut collided = false;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let diff = Complex::with_val(wp, &z[i] - &z[j]);
                if diff.real().is_zero() && diff.imag().is_zero() {
                    collided = true;
                    break;
                }
                repel += diff.recip();
            }
            if collided {
                z[i] += Complex::with_val(wp, (2.3e-4, -1.1e-4));
                residuals_ok = false;
                max_rel_step = Float::with_val(wp, 1);
                continue;
            }
            let denom = Complex::with_val(wp, 1u32 - Complex::with_val(wp, &w * &repel));
            let step = if denom.real().is_zero() && denom.imag().is_zero() {
                w
            } else {
                Complex::with_val(wp, &w / &denom)
            };
            let rel = Float::with_val(wp, step.abs_ref())
                / (Float::with_val(wp, z[i].abs_ref()) + 1u32);
            if rel > max_rel_step {
                max_rel_step = rel;
            }
            z[i] -= step;
        }
        if max_rel_step <= step_tol || residuals_ok {
            settled = true;
            break;
        }
    }

    if !settled {
        return Err(Error::NonConvergence {
            degree: n,
            prec,
        });
    }

    // Validation: residual at every root, plus the Vieta sum against the
    // second-highest coefficient. The Vieta gate is deliberately coarse
    // (2^(−prec/2)): it catches gross failures such as two approximants
    // landing on one simple root, while tolerating the barycenter drift a
    // residual-accepted high-multiplicity cluster legitimately carries.
    let mut vieta = Complex::new(wp);
    for zi in &z {
        let pv = q.eval(zi);
        if Float::with_val(wp, pv.abs_ref()) > residual_tol_at(zi) {
            return Err(Error::NonConvergence { degree: n, prec });
        }
        vieta += zi;
    }
    vieta += q.coeff(n - 1);
    let scale = z
        .iter()
        .map(|zi| Float::with_val(wp, zi.abs_ref()))
        .fold(Float::with_val(wp, 1), |a, b| a + b);
    let vieta_tol =
        Float::with_val(wp, Float::i_exp(1, -((prec / 2) as i32))) * (n as u32) * scale;
    if Float::with_val(wp, vieta.abs_ref()) > vieta_tol {
        return Err(Error::NonConvergence { degree: n, prec });
    }

    roots.extend(z.into_iter().map(|zi| Complex::with_val(prec, zi)));
    Ok(roots)
}

/// Roots of an exact-rational polynomial: converted at the elevated working
/// precision so conversion never limits root accuracy.
pub fn rat_poly_roots(p: &RatPoly, prec: u32) -> Result<Vec<Complex>> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::Precondition(
            "root finding needs degree >= 1".into(),
        ));
    }
    let probe = p.to_cpoly(64);
    let mag_bits = (probe.max_coeff_exp()
        - Float::with_val(64, probe.leading().unwrap().abs_ref())
            .get_exp()
            .unwrap_or(0))
    .max(0) as u32;
    let cp = p.to_cpoly(2 * prec + 48 + mag_bits);
    poly_roots(&cp, prec)
}

/// Dispatch on the coefficient mode.
pub fn poly_roots_any(p: &Poly, prec: u32) -> Result<Vec<Complex>> {
    match p {
        Poly::Exact(q) => rat_poly_roots(q, prec),
        Poly::Big(q) => poly_roots(q, prec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rug::Rational;

    /// Greedy-match two root multisets within `tol`.
    fn assert_root_sets_match(got: &[Complex], want: &[Complex], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut unused: Vec<Complex> = want.to_vec();
        for g in got {
            let (idx, dist) = unused
                .iter()
                .enumerate()
                .map(|(i, w)| (i, mp::abs_diff_complex(g, w).to_f64()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(dist < tol, "unmatched root (best distance {dist:.3e})");
            unused.remove(idx);
        }
    }

    #[test]
    fn quadratics_with_known_roots() {
        let prec = 128;
        let p = RatPoly::from_integers(&[-1, 0, 1]); // k² − 1
        let got = rat_poly_roots(&p, prec).unwrap();
        let want = [
            Complex::with_val(prec, (1, 0)),
            Complex::with_val(prec, (-1, 0)),
        ];
        assert_root_sets_match(&got, &want, 1e-30);

        let p2 = RatPoly::from_integers(&[12, 0, -5]); // 12 − 5x²
        let got2 = rat_poly_roots(&p2, prec).unwrap();
        let r = (Float::with_val(prec, 12) / 5u32).sqrt();
        let want2 = [
            Complex::with_val(prec, (r.clone(), Float::new(prec))),
            Complex::with_val(prec, (-r, Float::new(prec))),
        ];
        assert_root_sets_match(&got2, &want2, 1e-30);

        let p3 = RatPoly::from_integers(&[1, 0, 1]); // x² + 1
        let got3 = rat_poly_roots(&p3, prec).unwrap();
        let want3 = [
            Complex::with_val(prec, (0, 1)),
            Complex::with_val(prec, (0, -1)),
        ];
        assert_root_sets_match(&got3, &want3, 1e-30);
    }

    #[test]
    fn composed_kepler_numerator_roots() {
        // 12k² − 5π² has roots ±π√(5/12)
        let prec = 192;
        let pi = mp::pi(prec + 16);
        let c0 = Complex::with_val(prec, -(pi.clone().square() * 5u32));
        let p = CPoly::new(
            prec,
            vec![c0, Complex::new(prec), Complex::with_val(prec, 12)],
        );
        let got = poly_roots(&p, prec).unwrap();
        let want_mag = mp::pi(prec) * (Float::with_val(prec, 5) / 12u32).sqrt();
        let want = [
            Complex::with_val(prec, (want_mag.clone(), Float::new(prec))),
            Complex::with_val(prec, (-want_mag, Float::new(prec))),
        ];
        assert_root_sets_match(&got, &want, 1e-45);
    }

    #[test]
    fn random_root_sets_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xab3);
        let prec = 128;
        for _ in 0..25 {
            let deg = rng.random_range(2..=12);
            let roots: Vec<Rational> = (0..deg)
                .map(|_| Rational::from((rng.random_range(-40i64..=40), 2u64)))
                .collect();
            let p = RatPoly::from_roots(&roots);
            let got = rat_poly_roots(&p, prec).unwrap();
            let want: Vec<Complex> = roots
                .iter()
                .map(|r| mp::complex_from_rational(r, prec))
                .collect();
            // 2^(−prec/2) perturbation budget: clusters of nearby half-integers
            // are common in this draw, so allow the square-root loss.
            assert_root_sets_match(&got, &want, 2f64.powi(-(prec as i32) / 2 + 8));
        }
    }

    #[test]
    fn integer_ladder_roots_survive_big_coefficients() {
        // ∏ (x − j), j = 1..20: huge coefficient spread, exact recovery wanted.
        let roots: Vec<Rational> = (1..=20).map(Rational::from).collect();
        let p = RatPoly::from_roots(&roots);
        let prec = 128;
        let got = rat_poly_roots(&p, prec).unwrap();
        let want: Vec<Complex> = roots
            .iter()
            .map(|r| mp::complex_from_rational(r, prec))
            .collect();
        assert_root_sets_match(&got, &want, 1e-25);
    }

    #[test]
    fn pure_monomial_gives_zero_roots() {
        let p = RatPoly::from_integers(&[0, 0, 0, 1]); // x³
        let got = rat_poly_roots(&p, 96).unwrap();
        assert_eq!(got.len(), 3);
        for r in got {
            assert!(Float::with_val(96, r.abs_ref()).is_zero());
        }
    }

    #[test]
    fn double_root_cluster_is_resolved() {
        // (x − 1/2)² (x + 3)
        let p = RatPoly::from_roots(&[
            Rational::from((1, 2)),
            Rational::from((1, 2)),
            Rational::from(-3),
        ]);
        let prec = 192;
        let got = rat_poly_roots(&p, prec).unwrap();
        let want = [
            mp::complex_from_rational(&Rational::from((1, 2)), prec),
            mp::complex_from_rational(&Rational::from((1, 2)), prec),
            mp::complex_from_rational(&Rational::from(-3), prec),
        ];
        assert_root_sets_match(&got, &want, 1e-20);
    }

    #[test]
    fn degree_bounds_are_enforced() {
        let too_big = RatPoly::from_roots(&(0..65).map(Rational::from).collect::<Vec<_>>());
        assert!(matches!(
            rat_poly_roots(&too_big, 64),
            Err(Error::Precondition(_))
        ));
        assert!(rat_poly_roots(&RatPoly::one(), 64).is_err());
        assert!(rat_poly_roots(&RatPoly::zero(), 64).is_err());
    }
}
