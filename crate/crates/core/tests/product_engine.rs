//! Randomized structural invariants of the product engine: truncation error
//! obeys the second-moment tail bound, the value is stable under index
//! shifts, exclusions factor out exactly, and conjugate-closed root sets
//! produce real values.

use gammaprod::mp::poly::{Poly, RatPoly};
use gammaprod::ratprod::{check_convergence, evaluate, evaluate_partial, ConvergenceVerdict, RationalFunctionSpec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};
use std::collections::BTreeSet;

/// Odd numerator over 2: never an integer, so never a zero factor.
fn half_odd(rng: &mut ChaCha8Rng) -> Rational {
    Rational::from((2 * rng.random_range(-10..10i64) + 1, 2))
}

/// Convergent spec with matched root sums: denominator roots are the
/// numerator roots nudged by integers that sum to zero.
fn random_spec(rng: &mut ChaCha8Rng) -> (RationalFunctionSpec, Vec<Rational>, Vec<Rational>) {
    let degree = rng.random_range(1..=4usize);
    let num_roots: Vec<Rational> = (0..degree).map(|_| half_odd(rng)).collect();
    let mut nudges: Vec<i64> = (0..degree - 1).map(|_| rng.random_range(-3..=3i64)).collect();
    nudges.push(-nudges.iter().sum::<i64>());
    let den_roots: Vec<Rational> = num_roots
        .iter()
        .zip(&nudges)
        .map(|(r, &t)| Rational::from(r + Rational::from(t)))
        .collect();
    let start = rng.random_range(0..3i64);
    let spec = RationalFunctionSpec::new(
        Poly::Exact(RatPoly::from_roots(&num_roots)),
        Poly::Exact(RatPoly::from_roots(&den_roots)),
        start,
        BTreeSet::new(),
    )
    .unwrap();
    (spec, num_roots, den_roots)
}

#[test]
fn truncation_error_obeys_second_moment_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11_b0cd);
    for trial in 0..50 {
        let (spec, num_roots, den_roots) = random_spec(&mut rng);
        assert_eq!(check_convergence(&spec).unwrap(), ConvergenceVerdict::Converges);

        let max_root = num_roots
            .iter()
            .chain(&den_roots)
            .map(|r| r.to_f64().abs())
            .fold(0.0f64, f64::max);
        let second_moment: f64 = num_roots
            .iter()
            .chain(&den_roots)
            .map(|r| r.to_f64().powi(2))
            .sum();
        let cutoff = (10.0 * (1.0 + max_root)).ceil() as i64;
        let bound = 2.0 * second_moment / cutoff as f64;

        let full = evaluate(&spec, 20).unwrap().value;
        let partial = evaluate_partial(&spec, cutoff, 192).unwrap();
        let ratio = Float::with_val(192, partial.real() / full.real());
        let drift = (ratio - 1u32).abs().to_f64();
        assert!(
            drift <= bound,
            "trial {trial}: |partial/full - 1| = {drift:.3e} exceeds 2C/M = {bound:.3e}"
        );
    }
}

#[test]
fn value_is_stable_under_index_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51f7_0001);
    for _ in 0..10 {
        let (spec, _, _) = random_spec(&mut rng);
        let whole = evaluate(&spec, 25).unwrap().value;

        // Route 1: move the first factor out by hand.
        let bumped = RationalFunctionSpec::new(
            spec.num.clone(),
            spec.den.clone(),
            spec.start + 1,
            BTreeSet::new(),
        )
        .unwrap();
        let tail = evaluate(&bumped, 25).unwrap().value;
        let first = Rational::from(
            spec.num.exact().unwrap().eval_int(spec.start)
                / spec.den.exact().unwrap().eval_int(spec.start),
        );
        let recombined = tail.clone() * gammaprod::mp::complex_from_rational(&first, 128);
        let rel = gammaprod::mp::abs_diff_complex(&whole, &recombined)
            / Float::with_val(128, whole.abs_ref());
        assert!(rel.to_f64() < 1e-20, "factor split drifted by {rel}");

        // Route 2: substitute k -> k+1 in the polynomials instead.
        let one = Rational::from(1);
        let shifted = RationalFunctionSpec::new(
            Poly::Exact(spec.num.exact().unwrap().shift(&one)),
            Poly::Exact(spec.den.exact().unwrap().shift(&one)),
            spec.start,
            BTreeSet::new(),
        )
        .unwrap();
        let via_shift = evaluate(&shifted, 25).unwrap().value;
        let rel = gammaprod::mp::abs_diff_complex(&tail, &via_shift)
            / Float::with_val(128, tail.abs_ref());
        assert!(rel.to_f64() < 1e-20, "polynomial shift drifted by {rel}");
    }
}

#[test]
fn exclusions_factor_out_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe8c1_4d2f);
    for _ in 0..10 {
        let (spec, _, _) = random_spec(&mut rng);
        let skipped = spec.start + rng.random_range(0..8i64);
        let factor = Rational::from(
            spec.num.exact().unwrap().eval_int(skipped)
                / spec.den.exact().unwrap().eval_int(skipped),
        );
        assert_ne!(factor.cmp0(), std::cmp::Ordering::Equal);

        let with_hole = RationalFunctionSpec::new(
            spec.num.clone(),
            spec.den.clone(),
            spec.start,
            BTreeSet::from([skipped]),
        )
        .unwrap();
        let whole = evaluate(&spec, 25).unwrap().value;
        let holed = evaluate(&with_hole, 25).unwrap().value;
        let recombined = holed * gammaprod::mp::complex_from_rational(&factor, 128);
        let rel = gammaprod::mp::abs_diff_complex(&whole, &recombined)
            / Float::with_val(128, whole.abs_ref());
        assert!(rel.to_f64() < 1e-20, "excluded factor drifted by {rel}");
    }
}

#[test]
fn conjugate_root_pairs_give_real_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c0a_57a1);
    for _ in 0..10 {
        // Numerator x² + bx + c with negative discriminant; denominator
        // splits the same root sum -b into two half-odd reals.
        let b = rng.random_range(-6..=6i64);
        let bump = rng.random_range(1..=5i64);
        let c = Rational::from((b * b, 4)) + Rational::from(bump);
        let num = RatPoly::new(vec![c, Rational::from(b), Rational::from(1)]);
        let p = 2 * rng.random_range(-5..5i64) + 1;
        let den = RatPoly::from_roots(&[Rational::from((p, 2)), Rational::from((-2 * b - p, 2))]);
        let spec = RationalFunctionSpec::new(
            Poly::Exact(num),
            Poly::Exact(den),
            rng.random_range(0..3i64),
            BTreeSet::new(),
        )
        .unwrap();
        let value = evaluate(&spec, 25).unwrap().value;
        let prec = value.prec().0 as i32;
        let ceiling = Float::with_val(64, Float::i_exp(1, -prec + 16))
            * Float::with_val(64, value.real().clone().abs()).max(&Float::with_val(64, 1));
        let imag = Float::with_val(64, value.imag().clone().abs());
        assert!(
            imag <= ceiling,
            "conjugate-closed spec left imaginary part {imag} (allowed {ceiling})"
        );
    }
}
