//! Dense univariate polynomial algebra in two coefficient modes: exact
//! rationals and complex floats at explicit precision. Coefficients are
//! ascending; the zero polynomial is the empty coefficient list.

use crate::mp;
use rug::{Complex, Float, Integer, Rational};

/// Polynomial over Q, always trimmed (no trailing zero coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.cmp0() == std::cmp::Ordering::Equal) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly::constant(Rational::from(1))
    }

    pub fn constant(c: Rational) -> Self {
        RatPoly::new(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::new(); k];
        coeffs.push(c);
        RatPoly::new(coeffs)
    }

    /// Convenience for integer coefficient lists (ascending).
    pub fn from_integers(coeffs: &[i64]) -> Self {
        RatPoly::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// Monic ∏ (x − r) over the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        let mut p = RatPoly::one();
        for r in roots {
            let neg = -r.clone();
            p = p.mul_linear(&neg);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the convention that constants (including zero) have
    /// degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_int(&self, k: i64) -> Rational {
        self.eval(&Rational::from(k))
    }

    pub fn eval_complex(&self, z: &Complex, prec: u32) -> Complex {
        let wp = prec.max(z.prec().0);
        let mut acc = Complex::new(wp);
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += mp::float_from_rational(c, wp);
        }
        Complex::with_val(prec, acc)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        RatPoly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatPoly::new(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        RatPoly::new(out)
    }

    /// self · (x + a).
    pub fn mul_linear(&self, a: &Rational) -> Self {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let n = self.coeffs.len();
        let mut out = vec![Rational::new(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + 1] += c;
            out[i] += Rational::from(c * a);
        }
        RatPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = RatPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// p(x + a), by Horner over the shifted variable.
    pub fn shift(&self, a: &Rational) -> Self {
        let mut r = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            r = r.mul_linear(a);
            if r.coeffs.is_empty() {
                r.coeffs.push(c.clone());
            } else {
                r.coeffs[0] += c;
            }
            r = RatPoly::new(r.coeffs);
        }
        r
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| Rational::from(c * Rational::from(i as u64 + 1)))
                .collect(),
        )
    }

    pub fn to_cpoly(&self, prec: u32) -> CPoly {
        CPoly::new(
            prec,
            self.coeffs
                .iter()
                .map(|c| mp::complex_from_rational(c, prec))
                .collect(),
        )
    }

    /// All rational roots (with multiplicity) and the rational-root-free
    /// cofactor, by the rational-root theorem with exact deflation.
    ///
    /// Gives up (returns no roots) when the scaled integer coefficients are
    /// too large to factor cheaply; callers use this for display and exact
    /// bookkeeping, never for correctness of numerics.
    pub fn rational_roots(&self) -> (Vec<Rational>, RatPoly) {
        let mut roots = Vec::new();
        if self.is_zero() || self.degree() == 0 {
            return (roots, self.clone());
        }
        // Clear denominators to a primitive integer polynomial.
        let mut lcm = Integer::from(1);
        for c in &self.coeffs {
            lcm.lcm_mut(c.denom());
        }
        let mut ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&lcm / c.denom())))
            .collect();

        // Deflate zero roots exactly.
        while ints.first().is_some_and(|c| c.cmp0() == std::cmp::Ordering::Equal) && ints.len() > 1 {
            ints.remove(0);
            roots.push(Rational::new());
        }

        const DIVISOR_CAP: u64 = 1_000_000_000_000;
        loop {
            if ints.len() <= 1 {
                break;
            }
            let c0 = ints[0].clone().abs();
            let cn = ints.last().unwrap().clone().abs();
            let (Some(c0u), Some(cnu)) = (c0.to_u64(), cn.to_u64()) else {
                break;
            };
            if c0u > DIVISOR_CAP || cnu > DIVISOR_CAP {
                break;
            }
            let mut found = None;
            'search: for p in divisors(c0u) {
                for q in divisors(cnu) {
                    for sign in [1i64, -1] {
                        let cand = Rational::from((sign * p as i64, q));
                        if eval_ints(&ints, &cand).cmp0() == std::cmp::Ordering::Equal {
                            found = Some(cand);
                            break 'search;
                        }
                    }
                }
            }
            let Some(r) = found else { break };
            ints = deflate_ints(&ints, &r);
            roots.push(r);
        }
        let cofactor = RatPoly::new(ints.iter().map(Rational::from).collect());
        (roots, cofactor)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return vec![1];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
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

fn eval_ints(coeffs: &[Integer], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += Rational::from(c);
    }
    acc
}

/// Divide the integer polynomial exactly by (x − r), r = p/q a known root:
/// synthetic division on q·x − p after scaling.
fn deflate_ints(coeffs: &[Integer], r: &Rational) -> Vec<Integer> {
    // Work over rationals, then re-clear denominators.
    let rat = RatPoly::new(coeffs.iter().map(Rational::from).collect());
    let n = rat.coeffs.len();
    let mut quotient = vec![Rational::new(); n - 1];
    let mut carry = Rational::new();
    for i in (0..n - 1).rev() {
        carry = rat.coeff(i + 1) + Rational::from(&carry * r);
        quotient[i] = carry.clone();
    }
    let mut lcm = Integer::from(1);
    for c in &quotient {
        lcm.lcm_mut(c.denom());
    }
    quotient
        .iter()
        .map(|c| Integer::from(c.numer() * Integer::from(&lcm / c.denom())))
        .collect()
}

/// Polynomial with complex-float coefficients at a fixed working precision.
#[derive(Clone, Debug)]
pub struct CPoly {
    prec: u32,
    coeffs: Vec<Complex>,
}

impl CPoly {
    pub fn new(prec: u32, coeffs: Vec<Complex>) -> Self {
        let mut coeffs: Vec<Complex> = coeffs
            .into_iter()
            .map(|c| Complex::with_val(prec, c))
            .collect();
        while coeffs.last().is_some_and(|c| c.real().is_zero() && c.imag().is_zero()) {
            coeffs.pop();
        }
        CPoly { prec, coeffs }
    }

    pub fn from_real(prec: u32, coeffs: &[Float]) -> Self {
        CPoly::new(
            prec,
            coeffs
                .iter()
                .map(|c| Complex::with_val(prec, c))
                .collect(),
        )
    }

    /// Monic ∏ (x − r).
    pub fn from_roots(prec: u32, roots: &[Complex]) -> Self {
        let mut coeffs = vec![Complex::with_val(prec, 1u32)];
        for r in roots {
            let mut next = vec![Complex::new(prec); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= Complex::with_val(prec, c * r);
            }
            coeffs = next;
        }
        CPoly { prec, coeffs }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Complex::new(self.prec))
    }

    pub fn leading(&self) -> Option<&Complex> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        let wp = self.prec.max(z.prec().0);
        let mut acc = Complex::new(wp);
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return CPoly {
                prec: self.prec,
                coeffs: Vec::new(),
            };
        }
        CPoly::new(
            self.prec,
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| Complex::with_val(self.prec, c * (i as u32 + 1)))
                .collect(),
        )
    }

    /// Divide through by the leading coefficient.
    pub fn monic(&self) -> Self {
        let Some(lead) = self.leading() else {
            return self.clone();
        };
        CPoly::new(
            self.prec,
            self.coeffs
                .iter()
                .map(|c| Complex::with_val(self.prec, c / lead))
                .collect(),
        )
    }

    /// 1 + max |c_i| / |c_n|: every root lies inside this radius.
    pub fn cauchy_radius(&self) -> Float {
        let mut best = Float::new(self.prec);
        let lead = Float::with_val(self.prec, self.coeffs.last().unwrap().abs_ref());
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let ratio = Float::with_val(self.prec, c.abs_ref()) / &lead;
            if ratio > best {
                best = ratio;
            }
        }
        best + 1u32
    }

    /// Largest binary exponent among coefficient magnitudes (0 when empty).
    pub fn max_coeff_exp(&self) -> i32 {
        self.coeffs
            .iter()
            .filter_map(|c| Float::with_val(64, c.abs_ref()).get_exp())
            .max()
            .unwrap_or(0)
    }
}

/// Engine polynomial: exact rationals when the input is exact, complex
/// floats otherwise. The two modes never mix within one polynomial.
#[derive(Clone, Debug)]
pub enum Poly {
    Exact(RatPoly),
    Big(CPoly),
}

impl Poly {
    pub fn degree(&self) -> usize {
        match self {
            Poly::Exact(p) => p.degree(),
            Poly::Big(p) => p.degree(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Poly::Exact(p) => p.is_zero(),
            Poly::Big(p) => p.is_zero(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Poly::Exact(_))
    }

    pub fn exact(&self) -> Option<&RatPoly> {
        match self {
            Poly::Exact(p) => Some(p),
            Poly::Big(_) => None,
        }
    }

    pub fn to_cpoly(&self, prec: u32) -> CPoly {
        match self {
            Poly::Exact(p) => p.to_cpoly(prec),
            Poly::Big(p) => CPoly::new(prec, p.coeffs().to_vec()),
        }
    }

    pub fn coeff_complex(&self, k: usize, prec: u32) -> Complex {
        match self {
            Poly::Exact(p) => mp::complex_from_rational(&p.coeff(k), prec),
            Poly::Big(p) => Complex::with_val(prec, p.coeff(k)),
        }
    }

    pub fn eval_complex(&self, z: &Complex, prec: u32) -> Complex {
        match self {
            Poly::Exact(p) => p.eval_complex(z, prec),
            Poly::Big(p) => Complex::with_val(prec, p.eval(z)),
        }
    }
}
