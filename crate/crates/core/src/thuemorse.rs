//! Products signed by the Thue-Morse sequence: the finite block identities
//! that collapse to odd-number quotients, the f_m partial products with their
//! exact duplication law, and numeric cutoff estimates for the limits f(1/2),
//! P = f(1), and Q, none of which have a known closed form beyond P = 1/√2.
//!
//! Finite identities are verified in exact rational arithmetic; floats enter
//! only for the infinite products, evaluated either through the gamma-quotient
//! engine (when the block is one the engine's degree bound accommodates) or as
//! partial products cut off at powers of two, where the sign balance is best.

use std::collections::BTreeSet;

use rug::ops::Pow;
use rug::{Assign, Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::mp::poly::{Poly, RatPoly};
use crate::mp::{self};
use crate::ratprod::{self, RationalFunctionSpec};
use crate::report::CheckReport;

/// Sign of the j-th term: +1 when the binary expansion of j has evenly many
/// ones, −1 otherwise. Satisfies p(2j) = p(j) and p(2j+1) = −p(j).
pub fn tm_sign(j: u64) -> i32 {
    if j.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The underlying bit: t_j = 0 or 1, with tm_sign(j) = (−1)^t_j.
pub fn tm_bit(j: u64) -> u32 {
    j.count_ones() % 2
}

/// Outcome of testing Σ_{p(j)=+1} jⁿ = Σ_{p(j)=−1} jⁿ over j < 2^m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProuhetReport {
    pub m: u32,
    /// Smallest exponent where the two power sums differ; always equals m.
    pub first_failure: u32,
}

/// Splits j < 2^m by sign and finds the first exponent where the power sums
/// over the two halves disagree. They agree for every n < m and split at m.
pub fn prouhet_check(m: u32) -> Result<ProuhetReport> {
    if m < 1 || m > 24 {
        return Err(Error::Precondition(
            "block exponent must be between 1 and 24".into(),
        ));
    }
    let count = 1u64 << m;
    for n in 0..=m {
        let mut gap = Integer::new();
        for j in 0..count {
            let power = Integer::from(j).pow(n);
            if tm_sign(j) > 0 {
                gap += power;
            } else {
                gap -= power;
            }
        }
        if gap != 0 {
            assert!(n == m, "power sums split at n={n} instead of m={m}");
            return Ok(ProuhetReport {
                m,
                first_failure: n,
            });
        }
    }
    unreachable!("power sums over a length-2^{m} block stayed balanced past n={m}");
}

/// ∏_{j<2^{m−1}} (2j+1)^{p(j)}, the odd-number quotient every length-2^m
/// block of signed factorials reduces to.
pub fn block_product_rhs(m: u32) -> Result<Rational> {
    if m < 2 || m > 24 {
        return Err(Error::Precondition(
            "block exponent must be between 2 and 24".into(),
        ));
    }
    let mut acc = Rational::from(1);
    for j in 0..(1u64 << (m - 1)) {
        if tm_sign(j) > 0 {
            acc *= 2 * j + 1;
        } else {
            acc /= 2 * j + 1;
        }
    }
    Ok(acc)
}

/// ∏_{j<2^m} (j!)^{−p(j)}, exactly. Consecutive even/odd pairs collapse to
/// single odd integers, so the accumulator never grows past one factorial.
pub fn block_product_factorials(m: u32) -> Result<Rational> {
    if m < 2 || m > 16 {
        return Err(Error::Precondition(
            "block exponent must be between 2 and 16".into(),
        ));
    }
    let mut acc = Rational::from(1);
    let mut factorial = Integer::from(1);
    for j in 0..(1u64 << m) {
        if tm_sign(j) > 0 {
            acc /= &factorial;
        } else {
            acc *= &factorial;
        }
        factorial *= j + 1;
    }
    Ok(acc)
}

/// Which evaluation produced a block-product value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductRoute {
    /// The infinite product ∏_{k≥1} ∏_{j<2^m} (k+j)^{p(j)} in gamma closed
    /// form.
    Gamma,
    /// The signed factorial quotient.
    Factorial,
    /// The odd-number quotient.
    Direct,
}

/// One route's value for the length-2^m block product.
#[derive(Debug, Clone)]
pub struct TMProductReport {
    pub m: u32,
    pub route: ProductRoute,
    /// Present for the two exact routes.
    pub exact_value: Option<Rational>,
    pub numeric_value: Float,
}

/// Evaluates the block product all three ways and asserts agreement: the
/// factorial and odd-quotient routes must match exactly, and the infinite
/// product through the gamma engine must land within 10^(2−digits) of them.
pub fn block_product_lhs_gamma(m: u32, digits: u32) -> Result<Vec<TMProductReport>> {
    if !(2..=6).contains(&m) {
        return Err(Error::Precondition(
            "the closed-form route needs 2 <= m <= 6 to keep the root solve tame".into(),
        ));
    }
    let exact = block_product_factorials(m)?;
    let direct = block_product_rhs(m)?;
    assert_eq!(
        exact, direct,
        "factorial and odd-quotient routes disagree at m={m}"
    );

    let mut num_roots = Vec::new();
    let mut den_roots = Vec::new();
    for j in 0..(1i64 << m) {
        if tm_sign(j as u64) > 0 {
            num_roots.push(Rational::from(-j));
        } else {
            den_roots.push(Rational::from(-j));
        }
    }
    let spec = RationalFunctionSpec::new(
        Poly::Exact(RatPoly::from_roots(&num_roots)),
        Poly::Exact(RatPoly::from_roots(&den_roots)),
        1,
        BTreeSet::new(),
    )?;
    let evaluation = ratprod::evaluate(&spec, digits)?;
    let wp = evaluation.value.prec().0;
    let numeric = Float::with_val(wp, evaluation.value.real());
    let gap = Float::with_val(
        64,
        &numeric - mp::float_from_rational(&exact, wp),
    )
    .abs();
    let tol = Float::with_val(64, 10).pow(2 - digits as i32);
    assert!(
        gap <= tol,
        "gamma route drifted {gap} from the exact value at m={m}"
    );

    Ok(vec![
        TMProductReport {
            m,
            route: ProductRoute::Gamma,
            exact_value: None,
            numeric_value: numeric,
        },
        TMProductReport {
            m,
            route: ProductRoute::Factorial,
            exact_value: Some(exact.clone()),
            numeric_value: mp::float_from_rational(&exact, wp),
        },
        TMProductReport {
            m,
            route: ProductRoute::Direct,
            exact_value: Some(direct.clone()),
            numeric_value: mp::float_from_rational(&direct, wp),
        },
    ])
}

/// f_m(x) = ∏_{j<2^m} (x+j)^{p(j)} in exact arithmetic. A vanishing factor
/// is an error either way: a zero of the product when its sign is positive,
/// a pole when negative.
pub fn fm_eval(m: u32, x: &Rational) -> Result<Rational> {
    if m > 24 {
        return Err(Error::Precondition("block exponent capped at 24".into()));
    }
    let count = 1u64 << m;
    if x.denom() == &1 {
        let neg = Rational::from(-x.clone());
        if let Some(j) = neg.numer().to_u64() {
            if j < count {
                return Err(Error::ZeroFactor {
                    index: j as i64,
                    is_pole: tm_sign(j) < 0,
                });
            }
        }
    }
    let mut acc = Rational::from(1);
    for j in 0..count {
        let factor = Rational::from(x + j);
        if tm_sign(j) > 0 {
            acc *= factor;
        } else {
            acc /= factor;
        }
    }
    Ok(acc)
}

/// f_m at a complex point, at the given precision.
pub fn fm_eval_complex(m: u32, x: &Complex, prec: u32) -> Result<Complex> {
    if m > 24 {
        return Err(Error::Precondition("block exponent capped at 24".into()));
    }
    let wp = prec + 32;
    let mut acc = Complex::with_val(wp, 1);
    for j in 0..(1u64 << m) {
        let factor = Complex::with_val(wp, x + j);
        if factor == 0u32 {
            return Err(Error::ZeroFactor {
                index: j as i64,
                is_pole: tm_sign(j) < 0,
            });
        }
        if tm_sign(j) > 0 {
            acc *= factor;
        } else {
            acc /= factor;
        }
    }
    Ok(Complex::with_val(prec, acc))
}

/// Partial products of a signed infinite product, recorded at every
/// power-of-two cutoff where the sign balance is complete.
#[derive(Debug, Clone)]
pub struct LimitEstimate {
    /// The deepest cutoff value.
    pub estimate: Float,
    /// Twice the sum of the last two cutoff-to-cutoff deltas. The true rate
    /// is unknown, so this is a stabilization heuristic, not a bound.
    pub uncertainty: Float,
    /// cutoff_values[m] is the partial product over the first 2^m indices.
    pub cutoff_values: Vec<Float>,
}

fn delta_uncertainty(cutoffs: &[Float]) -> Float {
    let last = cutoffs.len() - 1;
    let d1 = Float::with_val(64, &cutoffs[last] - &cutoffs[last - 1]).abs();
    let d2 = Float::with_val(64, &cutoffs[last - 1] - &cutoffs[last - 2]).abs();
    // Once the deltas sink below the output resolution, rounding owns the
    // error; keep the reported uncertainty above that floor.
    let rounding = Float::with_val(64, cutoffs[last].abs_ref())
        * Float::with_val(64, Float::i_exp(1, 4 - cutoffs[last].prec() as i32));
    Float::with_val(64, 2 * (d1 + d2) + rounding)
}

/// f(x) = ∏_{j≥0} ((2j+x)/(2j+x+1))^{p(j)} estimated at cutoffs 2^m,
/// m ≤ m_max. f(1) = 1/√2 exactly; f(1/2) approaches 1/2; the rate is not
/// known in closed form, so the uncertainty is the delta heuristic.
pub fn limit_f(x: &Rational, m_max: u32, prec: u32) -> Result<LimitEstimate> {
    if x.cmp0() != std::cmp::Ordering::Greater {
        return Err(Error::Precondition(
            "cutoff estimates are defined for x > 0".into(),
        ));
    }
    if !(2..=26).contains(&m_max) {
        return Err(Error::Precondition(
            "cutoff exponent must be between 2 and 26".into(),
        ));
    }
    let wp = prec + 32;
    let mut acc = Float::with_val(wp, 1);
    let mut cutoffs = Vec::with_capacity(m_max as usize + 1);
    let mut numer = Integer::new();
    let mut denom = Integer::new();
    for j in 0..(1u64 << m_max) {
        numer.assign(2 * j);
        numer *= x.denom();
        numer += x.numer();
        denom.assign(&numer);
        denom += x.denom();
        if tm_sign(j) > 0 {
            acc *= &numer;
            acc /= &denom;
        } else {
            acc *= &denom;
            acc /= &numer;
        }
        if (j + 1).is_power_of_two() {
            cutoffs.push(Float::with_val(prec, &acc));
        }
    }
    Ok(LimitEstimate {
        estimate: cutoffs.last().unwrap().clone(),
        uncertainty: delta_uncertainty(&cutoffs),
        cutoff_values: cutoffs,
    })
}

/// Q = ∏_{j≥1} (2j/(2j+1))^{p(j)} at power-of-two cutoffs, plus the
/// consistency check the product obeys: splitting ∏ (j/(j+1))^{p(j)} by
/// parity shows P·Q = Q/(2P), so the P estimate must satisfy P² = 1/2.
pub fn q_estimate(m_max: u32, prec: u32) -> Result<(LimitEstimate, CheckReport)> {
    if !(4..=26).contains(&m_max) {
        return Err(Error::Precondition(
            "cutoff exponent must be between 4 and 26".into(),
        ));
    }
    let wp = prec + 32;
    let mut acc = Float::with_val(wp, 1);
    let mut cutoffs = vec![Float::with_val(prec, 1)];
    for j in 1..(1u64 << m_max) {
        if tm_sign(j) > 0 {
            acc *= 2 * j;
            acc /= 2 * j + 1;
        } else {
            acc *= 2 * j + 1;
            acc /= 2 * j;
        }
        if (j + 1).is_power_of_two() {
            cutoffs.push(Float::with_val(prec, &acc));
        }
    }
    let estimate = LimitEstimate {
        estimate: cutoffs.last().unwrap().clone(),
        uncertainty: delta_uncertainty(&cutoffs),
        cutoff_values: cutoffs,
    };
    let p = limit_f(&Rational::from(1), m_max, prec)?;
    let squared = Float::with_val(prec, &p.estimate * &p.estimate);
    let tolerance = Float::with_val(64, 3 * &p.uncertainty);
    let check = CheckReport::new(
        format!("P squared at cutoff 2^{m_max}"),
        squared,
        Float::with_val(prec, 0.5f32),
        tolerance,
    );
    Ok((estimate, check))
}

/// The shifted block product ∏_{k≥0} ∏_{j<2^m} (x+k+j)^{p(j)} through the
/// gamma engine, against its exact closed form ∏_{j<2^{m−1}} (x+2j)^{p(j)}.
pub fn generalized_block_check(m: u32, x: &Rational, digits: u32) -> Result<CheckReport> {
    if !(2..=6).contains(&m) {
        return Err(Error::Precondition(
            "the closed-form route needs 2 <= m <= 6 to keep the root solve tame".into(),
        ));
    }
    if x.cmp0() != std::cmp::Ordering::Greater {
        return Err(Error::Precondition(
            "shift must be positive so no factor vanishes".into(),
        ));
    }
    let mut num_roots = Vec::new();
    let mut den_roots = Vec::new();
    for j in 0..(1u64 << m) {
        let root = -Rational::from(x + j);
        if tm_sign(j) > 0 {
            num_roots.push(root);
        } else {
            den_roots.push(root);
        }
    }
    let spec = RationalFunctionSpec::new(
        Poly::Exact(RatPoly::from_roots(&num_roots)),
        Poly::Exact(RatPoly::from_roots(&den_roots)),
        0,
        BTreeSet::new(),
    )?;
    let evaluation = ratprod::evaluate(&spec, digits)?;
    let wp = evaluation.value.prec().0;

    let mut closed = Rational::from(1);
    for j in 0..(1u64 << (m - 1)) {
        let factor = Rational::from(x + 2 * j);
        if tm_sign(j) > 0 {
            closed *= factor;
        } else {
            closed /= factor;
        }
    }
    let tolerance = Float::with_val(64, 10).pow(2 - digits as i32);
    Ok(CheckReport::new_relative(
        format!("shifted block product m={m}, x={x}"),
        Float::with_val(wp, evaluation.value.real()),
        mp::float_from_rational(&closed, wp),
        tolerance,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn signs_follow_the_popcount_recurrences() {
        assert_eq!(tm_sign(0), 1);
        assert_eq!(tm_sign(3), 1);
        assert_eq!(tm_bit(3), 0);
        assert_eq!(tm_sign(7), -1);
        for j in 0..(1u64 << 20) {
            assert_eq!(tm_sign(2 * j), tm_sign(j));
            assert_eq!(tm_sign(2 * j + 1), -tm_sign(j));
        }
    }

    #[test]
    fn signs_balance_over_every_block() {
        let mut sum = 0i64;
        for j in 0..(1u64 << 20) {
            sum += tm_sign(j) as i64;
            if (j + 1).is_power_of_two() && j > 0 {
                assert_eq!(sum, 0, "imbalance in the first {} signs", j + 1);
            }
        }
    }

    #[test]
    fn power_sums_split_exactly_at_the_block_exponent() {
        assert_eq!(prouhet_check(1).unwrap().first_failure, 1);
        assert_eq!(prouhet_check(3).unwrap().first_failure, 3);
        assert_eq!(prouhet_check(8).unwrap().first_failure, 8);
        // The m=3 split in explicit form.
        for n in 0..3u32 {
            let lhs: u64 = [0u64, 3, 5, 6].iter().map(|j| j.pow(n)).sum();
            let rhs: u64 = [1u64, 2, 4, 7].iter().map(|j| j.pow(n)).sum();
            assert_eq!(lhs, rhs, "n={n}");
        }
        assert!(prouhet_check(0).is_err());
    }

    #[test]
    fn odd_quotients_match_hand_expansion() {
        assert_eq!(block_product_rhs(2).unwrap(), Rational::from((1, 3)));
        assert_eq!(block_product_rhs(3).unwrap(), Rational::from((7, 15)));
        let segment = block_product_rhs(4).unwrap() / block_product_rhs(3).unwrap();
        assert_eq!(segment, Rational::from((11 * 13, 9 * 15)));
        assert!(block_product_rhs(1).is_err());
    }

    #[test]
    fn factorial_quotient_collapses_to_the_odd_quotient() {
        for m in 2..=8 {
            assert_eq!(
                block_product_factorials(m).unwrap(),
                block_product_rhs(m).unwrap(),
                "m={m}"
            );
        }
    }

    #[test]
    fn all_three_block_routes_agree() {
        let reports = block_product_lhs_gamma(3, 30).unwrap();
        assert_eq!(reports.len(), 3);
        assert_eq!(reports[0].route, ProductRoute::Gamma);
        assert_eq!(
            reports[1].exact_value.as_ref().unwrap(),
            &Rational::from((7, 15))
        );
        assert_eq!(
            reports[2].exact_value.as_ref().unwrap(),
            &Rational::from((7, 15))
        );
        let gap = Float::with_val(
            64,
            &reports[0].numeric_value - &reports[1].numeric_value,
        )
        .abs();
        assert!(gap < 1e-27, "gamma route off by {gap}");
        assert!(block_product_lhs_gamma(7, 20).is_err());
    }

    #[test]
    fn partial_product_values_and_poles() {
        assert_eq!(
            fm_eval(2, &Rational::from(1)).unwrap(),
            Rational::from((2, 3))
        );
        match fm_eval(2, &Rational::from(-1)) {
            Err(Error::ZeroFactor { index: 1, is_pole: true }) => {}
            other => panic!("expected a pole at j=1, got {other:?}"),
        }
        match fm_eval(2, &Rational::from(0)) {
            Err(Error::ZeroFactor { index: 0, is_pole: false }) => {}
            other => panic!("expected a zero at j=0, got {other:?}"),
        }
        let exact = fm_eval(3, &Rational::from((1, 3))).unwrap();
        let numeric = fm_eval_complex(3, &Complex::with_val(128, Rational::from((1, 3))), 128)
            .unwrap();
        let gap = Float::with_val(
            64,
            Complex::with_val(128, numeric - mp::float_from_rational(&exact, 160)).abs_ref(),
        );
        assert!(gap < 1e-30);
    }

    #[test]
    fn duplication_identity_holds_exactly() {
        for m in 2..=6u32 {
            let x = Rational::from((1, 3));
            let lhs = fm_eval(m + 1, &Rational::from(2 * x.clone())).unwrap()
                * fm_eval(m, &Rational::from(&x + Rational::from((1, 2)))).unwrap();
            assert_eq!(lhs, fm_eval(m, &x).unwrap(), "m={m}");
        }
    }

    #[test]
    fn cutoff_preconditions() {
        assert!(limit_f(&Rational::from(-1), 10, 64).is_err());
        assert!(limit_f(&Rational::from(1), 1, 64).is_err());
        assert!(q_estimate(3, 64).is_err());
    }

    #[test]
    fn short_cutoffs_already_near_the_known_limits() {
        let p = limit_f(&Rational::from(1), 14, 96).unwrap();
        let truth = Float::with_val(96, 0.5f32).sqrt();
        let gap = Float::with_val(64, &p.estimate - truth).abs();
        assert!(gap < 1e-2, "f(1) cutoff off by {gap}");
        assert_eq!(p.cutoff_values.len(), 15);

        let half = limit_f(&Rational::from((1, 2)), 14, 96).unwrap();
        let gap = Float::with_val(64, &half.estimate - 0.5f32).abs();
        assert!(gap < 1e-2, "f(1/2) cutoff off by {gap}");
    }
}
