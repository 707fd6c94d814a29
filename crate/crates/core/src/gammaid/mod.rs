//! Gamma-product identities over coprime residues: the totient product
//! ∏ Γ(k/n) with its (2π)^{φ(n)/2} closed form, coset products and the
//! rational products they induce, exact power sums over Φ(n), a
//! zeta-weighted totient sum with a modulus-independent limit, and a numeric
//! two-sided check of the class number formula (Kronecker symbol, reduced
//! quadratic forms, Dedekind eta).

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::mp::bernoulli::bernoulli_number;
use crate::mp::poly::{Poly, RatPoly};
use crate::mp::{self, gamma};
use crate::ratprod::RationalFunctionSpec;
use crate::report::CheckReport;

/// 10^(−digits) at comparison precision, for relative check tolerances.
fn decimal_tol(digits: u32) -> Float {
    Float::with_val(64, 10).pow(-(digits as i32))
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Prime factorization by trial division, (prime, exponent) pairs.
fn prime_factors(n: i64) -> Vec<(i64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn squarefree(n: i64) -> bool {
    prime_factors(n).iter().all(|&(_, e)| e == 1)
}

/// The residues in [1, n) coprime to n.
#[derive(Debug, Clone)]
pub struct CoprimeSet {
    pub n: i64,
    pub members: Vec<i64>,
}

impl CoprimeSet {
    pub fn new(n: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(
                "coprime residues need a modulus >= 2".into(),
            ));
        }
        let members = (1..n).filter(|&k| gcd(k, n) == 1).collect();
        Ok(CoprimeSet { n, members })
    }

    /// φ(n), the member count.
    pub fn phi(&self) -> usize {
        self.members.len()
    }
}

/// Closed form of ∏_{k ∈ Φ(n)} Γ(k/n): (2π)^{φ(n)/2}, additionally divided
/// by √p when n is a power of the prime p. Returns the closed form and a
/// numeric check multiplying the gammas directly.
pub fn totient_gamma_product(n: i64, digits: u32) -> Result<(Float, CheckReport)> {
    let set = CoprimeSet::new(n)?;
    let wp = mp::bits_for(digits) + 64;
    let two_pi = Float::with_val(wp, 2 * mp::pi(wp));
    let mut closed = two_pi.pow(&Float::with_val(wp, set.phi() as f64 / 2.0));
    let factors = prime_factors(n);
    if factors.len() == 1 {
        closed /= Float::with_val(wp, factors[0].0).sqrt();
    }
    let mut product = Float::with_val(wp, 1);
    for &k in &set.members {
        product *= gamma::gamma_real(&Float::with_val(wp, Rational::from((k, n))), wp)?;
    }
    let check = CheckReport::new_relative(
        format!("totient gamma product n={n}"),
        product,
        closed.clone(),
        decimal_tol(digits.saturating_sub(2)),
    );
    Ok((closed, check))
}

/// One coset of the cyclic subgroup ⟨n+2⟩ ≤ Φ(2n) for odd n > 1, with the
/// two product identities it satisfies.
#[derive(Debug, Clone)]
pub struct NijenhuisCoset {
    /// The modulus 2n.
    pub modulus: i64,
    pub members: Vec<i64>,
    /// Count of members above the midpoint n; the power of 2 in the closed
    /// forms.
    pub b: u32,
    /// ∏_{k ∈ A} Γ(k/2n) = 2^b π^{|A|/2}.
    pub gamma_check: CheckReport,
    /// ∏_{k ∈ A} Γ(k/2n)/Γ(1 − k/2n) = 2^{2b − |A|}.
    pub ratio_check: CheckReport,
}

pub fn nijenhuis_coset(n: i64, rep: i64, digits: u32) -> Result<NijenhuisCoset> {
    if n <= 1 || n % 2 == 0 {
        return Err(Error::Precondition(
            "coset construction needs odd n > 1".into(),
        ));
    }
    let modulus = 2 * n;
    let rep = rep.rem_euclid(modulus);
    if gcd(rep, modulus) != 1 {
        return Err(Error::Precondition(format!(
            "representative {rep} shares a factor with {modulus}"
        )));
    }
    let generator = (n + 2) % modulus;
    let mut seen = BTreeSet::new();
    let mut a = rep;
    while seen.insert(a) {
        a = ((a as i128 * generator as i128) % modulus as i128) as i64;
    }
    let members: Vec<i64> = seen.into_iter().collect();
    let b = members.iter().filter(|&&k| k > n).count() as u32;

    let wp = mp::bits_for(digits) + 64;
    let mut prod = Float::with_val(wp, 1);
    let mut ratio = Float::with_val(wp, 1);
    for &k in &members {
        let g = gamma::gamma_real(&Float::with_val(wp, Rational::from((k, modulus))), wp)?;
        let reflected =
            gamma::gamma_real(&Float::with_val(wp, Rational::from((modulus - k, modulus))), wp)?;
        prod *= &g;
        ratio *= g / reflected;
    }
    let closed = Float::with_val(wp, Float::i_exp(1, b as i32))
        * mp::pi(wp).pow(&Float::with_val(wp, members.len() as f64 / 2.0));
    let gamma_check = CheckReport::new_relative(
        format!("coset gamma product mod {modulus}, rep {}", members[0]),
        prod,
        closed,
        decimal_tol(digits.saturating_sub(2)),
    );
    let closed_ratio = Float::with_val(
        wp,
        Float::i_exp(1, 2 * b as i32 - members.len() as i32),
    );
    let ratio_check = CheckReport::new_relative(
        format!("coset reflection ratio mod {modulus}, rep {}", members[0]),
        ratio,
        closed_ratio,
        decimal_tol(digits.saturating_sub(2)),
    );
    Ok(NijenhuisCoset {
        modulus,
        members,
        b,
        gamma_check,
        ratio_check,
    })
}

/// The rational product a residue set induces: a spec for
/// ∏_{k≥0} ∏_{a∈A} (k + 1 − a/2n)/(k + a/2n) together with its expected
/// exact value 2^{2b−|A|}. The value is only guaranteed for unions of
/// ⟨n+2⟩ cosets; for anything else the engine's convergence check is the
/// arbiter, since the product converges exactly when Σ_{a∈A} a = n·|A|.
pub fn coset_to_rational_product(
    members: &[i64],
    modulus: i64,
) -> Result<(RationalFunctionSpec, Rational)> {
    if modulus < 6 || modulus % 2 != 0 {
        return Err(Error::Precondition(
            "need an even modulus of at least 6".into(),
        ));
    }
    if members.is_empty() {
        return Err(Error::Precondition("empty residue set".into()));
    }
    for &a in members {
        if a <= 0 || a >= modulus || gcd(a, modulus) != 1 {
            return Err(Error::Precondition(format!(
                "residue {a} is invalid modulo {modulus}"
            )));
        }
    }
    let num_roots: Vec<Rational> = members
        .iter()
        .map(|&a| Rational::from((a, modulus)) - 1u32)
        .collect();
    let den_roots: Vec<Rational> = members
        .iter()
        .map(|&a| Rational::from((-a, modulus)))
        .collect();
    let spec = RationalFunctionSpec::new(
        Poly::Exact(RatPoly::from_roots(&num_roots)),
        Poly::Exact(RatPoly::from_roots(&den_roots)),
        0,
        BTreeSet::new(),
    )?;
    let half = modulus / 2;
    let b = members.iter().filter(|&&a| a > half).count() as i64;
    let expo = 2 * b - members.len() as i64;
    let expected = if expo >= 0 {
        Rational::from(Integer::from(1) << (expo as u32))
    } else {
        Rational::from((1, Integer::from(1) << ((-expo) as u32)))
    };
    Ok((spec, expected))
}

/// Ψ_k(n) = Σ_{x ∈ Φ(n)} x^k by the Bernoulli closed form
/// (n^{k+1}/(k+1)) Σ_{m=0}^{⌊k/2⌋} C(k+1,2m) (B_{2m}/n^{2m}) ∏_{p|n} (1 − p^{2m−1}),
/// cross-checked against direct summation whenever n ≤ 10⁴.
pub fn psi_power_sum(k: u32, n: i64) -> Result<Rational> {
    if n < 2 {
        return Err(Error::Precondition(
            "power sums need a modulus >= 2".into(),
        ));
    }
    let primes: Vec<i64> = prime_factors(n).into_iter().map(|(p, _)| p).collect();
    let mut sum = Rational::new();
    for m in 0..=(k / 2) {
        let mut term =
            Rational::from(Integer::from(k + 1).binomial(2 * m)) * bernoulli_number(2 * m);
        term /= Rational::from(Integer::from(n).pow(2 * m));
        for &p in &primes {
            if m == 0 {
                term *= Rational::from((p - 1, p));
            } else {
                term *= Rational::from(Integer::from(1) - Integer::from(p).pow(2 * m - 1));
            }
        }
        sum += term;
    }
    let psi = sum * Rational::from((Integer::from(n).pow(k + 1), Integer::from(k + 1)));
    if n <= 10_000 {
        let mut brute = Integer::new();
        for x in 1..n {
            if gcd(x, n) == 1 {
                brute += Integer::from(x).pow(k);
            }
        }
        assert_eq!(psi, brute, "closed form disagrees with summation at k={k}, n={n}");
    }
    Ok(psi)
}

/// Σ_{k=2}^{K} (ζ(k)/k) Ψ_k(n)/(φ(n)·nᵏ) against its limit (log 2π − γ)/2.
/// The limit is independent of n whenever n has two distinct prime factors;
/// prime powers pick up an extra log p term and are rejected. The geometric
/// tail beyond K is folded into the check tolerance.
pub fn zetasumphi_check(n: i64, k_max: u32, digits: u32) -> Result<CheckReport> {
    if n < 2 {
        return Err(Error::Precondition("modulus must be >= 2".into()));
    }
    if prime_factors(n).len() < 2 {
        return Err(Error::Precondition(format!(
            "the sum is modulus-independent only away from prime powers, and {n} is one"
        )));
    }
    if k_max < 2 {
        return Err(Error::Precondition("need k_max >= 2".into()));
    }
    let set = CoprimeSet::new(n)?;
    let phi = set.phi() as u32;
    let wp = mp::bits_for(digits) + 64;
    let mut sum = Float::new(wp);
    for k in 2..=k_max {
        let weight = psi_power_sum(k, n)? / (Rational::from(Integer::from(n).pow(k)) * phi);
        sum += mp::zeta_int(k, wp) * mp::float_from_rational(&weight, wp) / k;
    }
    let target = Float::with_val(wp, (mp::ln_2pi(wp) - gamma::euler_gamma(wp)) / 2u32);
    // Each dropped term is at most ζ(2)/K times the mean of (x/n)^k over
    // Φ(n), which is below ((n−1)/n)^k; the geometric sum gives the bound.
    let ratio = Rational::from((n - 1, n));
    let tail = Float::with_val(wp, mp::zeta_int(2, wp) / k_max)
        * mp::float_from_rational(&Rational::from(ratio.pow(k_max + 1) * n), wp);
    let tolerance = Float::with_val(64, tail + decimal_tol(digits));
    Ok(CheckReport::new(
        format!("zeta-weighted totient sum n={n}, K={k_max}"),
        sum,
        target,
        tolerance,
    ))
}

/// The Kronecker symbol (D|m), the totally multiplicative extension of the
/// Jacobi symbol to arbitrary integers.
pub fn kronecker_symbol(d: i64, m: i64) -> i32 {
    Integer::from(d).kronecker(&Integer::from(m))
}

/// A primitive reduced positive-definite form ax² + bxy + cy² of
/// discriminant b² − 4ac = −d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The form's root in the upper half-plane, (−b + i√d)/(2a).
    pub fn root(&self, prec: u32) -> Complex {
        let root_d = Float::with_val(prec, -self.discriminant()).sqrt();
        Complex::with_val(prec, (Float::with_val(prec, -self.b), root_d)) / (2 * self.a)
    }
}

/// Whether −d is a fundamental discriminant: −d ≡ 1 mod 4 and squarefree,
/// or −d = 4D with D squarefree and D ≡ 2 or 3 mod 4.
pub fn is_fundamental(d: i64) -> bool {
    if d <= 0 {
        return false;
    }
    if d % 4 == 3 {
        return squarefree(d);
    }
    if d % 4 == 0 {
        let q = d / 4;
        return (q % 4 == 1 || q % 4 == 2) && squarefree(q);
    }
    false
}

/// All primitive reduced forms of fundamental discriminant −d, enumerated
/// by a ≤ √(d/3). The count is the class number h(−d).
pub fn reduced_forms(d: i64) -> Result<Vec<QuadraticForm>> {
    if !is_fundamental(d) {
        return Err(Error::NotFundamental {
            d: d.unsigned_abs(),
        });
    }
    let mut forms = Vec::new();
    let mut a = 1;
    while 3 * a * a <= d {
        for b in (-a + 1)..=a {
            if (b * b + d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + d) / (4 * a);
            if c < a {
                continue;
            }
            // On the boundary a = c (and b = −a, already outside the range)
            // only the nonnegative-b member of the pair is reduced.
            if b < 0 && a == c {
                continue;
            }
            if gcd(gcd(a, b), c) != 1 {
                continue;
            }
            forms.push(QuadraticForm { a, b, c });
        }
        a += 1;
    }
    Ok(forms)
}

/// A truncated eta evaluation with its certified truncation count.
#[derive(Debug, Clone)]
pub struct EtaValue {
    pub tau: Complex,
    pub value: Complex,
    /// Product terms taken before |q|ᵏ fell below 2^(−prec−8).
    pub terms: usize,
}

/// η(τ) = e^{πiτ/12} ∏_{k≥1} (1 − qᵏ) with q = e^{2πiτ}, truncated once
/// |q|ᵏ < 2^(−prec−8); the geometric tail then sits below the last bit of
/// the result.
pub fn dedekind_eta(tau: &Complex, prec: u32) -> Result<EtaValue> {
    if tau.imag().cmp0() != Some(Ordering::Greater) {
        return Err(Error::Precondition("eta needs Im τ > 0".into()));
    }
    let wp = prec + 32;
    let t = Complex::with_val(wp, tau);
    let two_pi_i = Complex::with_val(wp, (Float::new(wp), 2 * mp::pi(wp)));
    let q = Complex::with_val(wp, &two_pi_i * &t).exp();
    let qabs = Float::with_val(wp, q.abs_ref());
    let planned = (prec + 8) as f64 / -qabs.to_f64().log2().min(-f64::MIN_POSITIVE);
    if planned > 2e6 {
        return Err(Error::Precondition(
            "τ is too close to the real axis for a desk evaluation".into(),
        ));
    }
    let threshold = Float::with_val(wp, Float::i_exp(1, -(prec as i32) - 8));
    let mut value = Complex::with_val(wp, 1);
    let mut qk = q.clone();
    let mut terms = 0usize;
    while Float::with_val(wp, qk.abs_ref()) >= threshold {
        value *= Complex::with_val(wp, 1u32 - &qk);
        qk *= &q;
        terms += 1;
    }
    value *= (Complex::with_val(wp, &two_pi_i * &t) / 24u32).exp();
    Ok(EtaValue {
        tau: Complex::with_val(prec, tau),
        value: Complex::with_val(prec, value),
        terms,
    })
}

/// Numeric two-sided check of the class number formula: the character-
/// weighted gamma product ∏_{m=1}^{d} Γ(m/d)^{(−d|m)} against
/// [∏_j 4π√d·y_j·|η(z_j)|⁴]^{2/w} over the reduced forms of −d, with
/// w = 6, 4, 2 for d = 3, 4 and everything else.
pub fn chowla_selberg_check(d: i64, digits: u32) -> Result<CheckReport> {
    if d > 200 {
        return Err(Error::Precondition(
            "discriminants beyond 200 are out of desk scale".into(),
        ));
    }
    let forms = reduced_forms(d)?;
    let wp = mp::bits_for(digits) + 64;
    let mut lhs = Float::with_val(wp, 1);
    for m in 1..d {
        match kronecker_symbol(-d, m) {
            1 => lhs *= gamma::gamma_real(&Float::with_val(wp, Rational::from((m, d))), wp)?,
            -1 => lhs /= gamma::gamma_real(&Float::with_val(wp, Rational::from((m, d))), wp)?,
            _ => {}
        }
    }
    let w: u32 = match d {
        3 => 6,
        4 => 4,
        _ => 2,
    };
    let sqrt_d = Float::with_val(wp, d).sqrt();
    let mut rhs = Float::with_val(wp, 1);
    for form in &forms {
        let y = Float::with_val(wp, &sqrt_d / (2 * form.a));
        let eta = dedekind_eta(&form.root(wp), wp)?;
        let eta4 = Float::with_val(wp, eta.value.abs_ref()).pow(4);
        rhs *= Float::with_val(wp, 4 * mp::pi(wp)) * &sqrt_d * y * eta4;
    }
    let rhs = match w {
        2 => rhs,
        4 => rhs.sqrt(),
        _ => rhs.root(3),
    };
    Ok(CheckReport::new_relative(
        format!("class number formula d={d}"),
        lhs,
        rhs,
        decimal_tol(digits.saturating_sub(4)),
    ))
}
