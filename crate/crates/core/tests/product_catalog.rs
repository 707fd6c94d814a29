//! Named products evaluated end to end and pinned against independently
//! computed reference digits (or exact constants where the value collapses
//! to one).

use gammaprod::error::Error;
use gammaprod::mp;
use gammaprod::mp::poly::{Poly, RatPoly};
use gammaprod::ratprod::apps::{
    count_multiplicative_partitions, cyclotomic_power_product, mellin_barnes_check, multpart_value,
    phi_ramanujan,
};
use gammaprod::ratprod::{evaluate, RationalFunctionSpec};
use proptest::prelude::*;
use rug::{Complex, Float, Rational};
use std::collections::BTreeSet;

fn assert_close(value: &Float, want: f64, tol: f64, what: &str) {
    let diff = Float::with_val(128, value - &Float::with_val(128, want))
        .abs()
        .to_f64();
    assert!(diff < tol, "{what}: got {value}, want {want} (off by {diff:.3e})");
}

#[test]
fn wallis_product_is_half_pi() {
    let spec = RationalFunctionSpec::from_integers(&[4, 8, 4], &[3, 8, 4], 0).unwrap();
    let report = evaluate(&spec, 40).unwrap();
    let half_pi = mp::pi(256) / 2u32;
    let rel = Float::with_val(256, report.value.real() - &half_pi).abs() / half_pi;
    assert!(rel.to_f64() < 1e-38);
    assert!(report.digits_certified >= 40);
}

#[test]
fn cubes_adjacent_to_fourth_multiples() {
    // ∏_{j≥1} ((4j−1)³+1)((4j+1)³−1) / ((4j−1)³(4j+1)³), split into the two
    // cube factorizations 4j(16j² ± 12j + 3) / (4j ± 1)³ and recombined.
    // The value is (π/12)(1 + √2·cosh(√3π/4)).
    let q = |p: i64, d: u64| Rational::from((p, d));
    let plus = RationalFunctionSpec::new(
        Poly::Exact(RatPoly::new(vec![q(0, 1), q(3, 16), q(3, 4), q(1, 1)])),
        Poly::Exact(RatPoly::from_roots(&[q(-1, 4), q(-1, 4), q(-1, 4)])),
        1,
        BTreeSet::new(),
    )
    .unwrap();
    let minus = RationalFunctionSpec::new(
        Poly::Exact(RatPoly::new(vec![q(0, 1), q(3, 16), q(-3, 4), q(1, 1)])),
        Poly::Exact(RatPoly::from_roots(&[q(1, 4), q(1, 4), q(1, 4)])),
        1,
        BTreeSet::new(),
    )
    .unwrap();
    let a = evaluate(&plus, 30).unwrap().value;
    let b = evaluate(&minus, 30).unwrap().value;
    let product = Float::with_val(192, a.real() * b.real());

    let pi = mp::pi(192);
    let want = pi.clone() / 12u32
        * (1u32
            + Float::with_val(192, 2u32).sqrt()
                * (Float::with_val(192, 3u32).sqrt() * pi / 4u32).cosh());
    let diff = Float::with_val(192, &product - &want).abs();
    assert!(diff.to_f64() < 1e-25, "cube pairing off by {diff}");
    assert_close(&product, 1.03081178171, 1e-10, "frozen digits");
}

#[test]
fn phi_catalog_values() {
    let one = Complex::with_val(128, (1, 0));
    let two = Complex::with_val(128, (2, 0));
    let (at_11, check) = phi_ramanujan(&one, &one, 20).unwrap();
    assert!(check.unwrap().pass);
    assert_close(
        &Float::with_val(128, at_11.value.real()),
        3.534_022_123_347_67,
        1e-13,
        "φ(1,1)",
    );
    let (at_12, _) = phi_ramanujan(&one, &two, 20).unwrap();
    assert_close(
        &Float::with_val(128, at_12.value.real()),
        23.246_772_929_6,
        1e-9,
        "φ(1,2)",
    );
}

#[test]
fn multpart_catalog_values() {
    let frozen = [
        (2, 2.0),
        (3, 1.235_488_267_746_5),
        (4, 1.088_116_219_928_5),
        (5, 1.038_145_017_331),
        (6, 1.017_620_839_826_2),
    ];
    for (n, want) in frozen {
        let report = multpart_value(n, 25).unwrap();
        assert_close(
            &Float::with_val(128, report.value.real()),
            want,
            1e-12,
            &format!("reciprocal (1 - k^-{n}) product"),
        );
        assert!(report.digits_certified >= 25);
    }
}

#[test]
fn cyclotomic_removed_catalog() {
    let frozen: &[(u32, u32, f64, f64)] = &[
        (2, 1, -0.272_029_055, 1e-8),
        (2, 2, 0.023_467_059_31, 1e-9),
        (4, 1, -0.848_054_049_4, 1e-8),
        (5, 1, -0.928_786_935_8, 1e-8),
        (5, 2, 0.652_165_907_92, 1e-9),
    ];
    for &(n, m, want, tol) in frozen {
        let z = Complex::with_val(128, (m, 0));
        let (report, checks) = cyclotomic_power_product(n, &z, 25, Some(m)).unwrap();
        assert!(!checks.is_empty());
        for c in &checks {
            assert!(c.pass, "n={n} m={m}: {}", c.summary());
        }
        assert_close(
            &Float::with_val(128, report.value.real()),
            want,
            tol,
            &format!("removed-index product n={n}, m={m}"),
        );
    }
}

#[test]
fn cyclotomic_removed_rational_cases() {
    // n = 3 collapses to plain rationals: −2/3 at m = 1 and 2/9 at m = 2.
    for (m, num, den) in [(1u32, -2i64, 3u64), (2, 2, 9)] {
        let z = Complex::with_val(128, (m, 0));
        let (report, checks) = cyclotomic_power_product(3, &z, 30, Some(m)).unwrap();
        for c in &checks {
            assert!(c.pass, "{}", c.summary());
        }
        let want = mp::float_from_rational(&Rational::from((num, den)), 192);
        let diff = Float::with_val(192, report.value.real() - &want).abs();
        assert!(diff.to_f64() < 1e-25, "n=3 m={m}: off by {diff}");
    }
}

#[test]
fn cyclotomic_removed_zero_index_is_trivial() {
    let z = Complex::with_val(128, (0, 0));
    let (report, checks) = cyclotomic_power_product(3, &z, 15, Some(0)).unwrap();
    assert!(checks.is_empty());
    let diff = Float::with_val(128, report.value.real() - 1u32).abs();
    assert!(diff.to_f64() < 1e-14);
}

#[test]
fn cyclotomic_plain_at_one_half() {
    // n = 2, z = 1/2: the k = 0 factor is −1 and the rest telescopes
    // through the sine and hyperbolic-sine products to −1/sinh(π/2).
    let z = Complex::with_val(192, (0.5, 0.0));
    let (report, checks) = cyclotomic_power_product(2, &z, 25, None).unwrap();
    for c in &checks {
        assert!(c.pass, "{}", c.summary());
    }
    let want = -(Float::with_val(192, mp::pi(192) / 2u32).sinh().recip());
    let diff = Float::with_val(192, report.value.real() - &want).abs();
    assert!(diff.to_f64() < 1e-23, "plain cyclotomic off by {diff}");
    assert!(report.value.imag().clone().abs().to_f64() < 1e-20);
}

#[test]
fn cyclotomic_plain_rejects_lattice_z() {
    let z = Complex::with_val(64, (3, 0));
    assert!(matches!(
        cyclotomic_power_product(2, &z, 10, None),
        Err(Error::Pole { .. })
    ));
    let zero = Complex::with_val(64, (0, 0));
    assert!(matches!(
        cyclotomic_power_product(2, &zero, 10, None),
        Err(Error::Pole { .. })
    ));
}

#[test]
fn cyclotomic_linear_case_diverges() {
    let z = Complex::with_val(64, (0.5, 0.0));
    assert!(matches!(
        cyclotomic_power_product(1, &z, 10, None),
        Err(Error::Diverges { .. })
    ));
}

#[test]
fn mellin_barnes_catalog() {
    // a = 1/2, b = 2 collapses to 2/π.
    let checks = mellin_barnes_check(&Float::with_val(64, 0.5), &Float::with_val(64, 2), 10).unwrap();
    for c in &checks {
        assert!(c.pass, "{}", c.summary());
    }
    let want = 2u32 / mp::pi(128);
    let diff = Float::with_val(128, &checks[0].rhs - &want).abs();
    assert!(diff.to_f64() < 1e-20, "closed form is not 2/π: {diff}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semiprimes_have_exactly_two_factorizations(
        i in 0usize..8,
        j in 0usize..8,
    ) {
        const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
        prop_assume!(i != j);
        let (p, q) = (PRIMES[i], PRIMES[j]);
        prop_assert_eq!(count_multiplicative_partitions(p * q), 2);
        prop_assert_eq!(count_multiplicative_partitions(p), 1);
    }
}
