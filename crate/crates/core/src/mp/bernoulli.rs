//! Exact Bernoulli numbers by the tangent-number recurrence, memoized.
//!
//! Tangent numbers are computed with integer-only arithmetic (no rational
//! intermediate blowup), then B_{2n} = (-1)^(n-1) · 2n · T_n / (4^n (4^n - 1)).
//! Convention: B_1 = -1/2; odd indices above 1 are zero.

use rug::{Integer, Rational};
use std::sync::Mutex;

/// Cached B_{2n} values, indexed by n (so CACHE[0] = B_0 = 1).
static CACHE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// Tangent numbers T_1..T_n (T_1 = 1, T_2 = 2, T_3 = 16, ...).
fn tangent_numbers(n: usize) -> Vec<Integer> {
    let mut t = vec![Integer::new(); n + 1];
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u32 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let lower = Integer::from(&t[j - 1] * (j - k) as u32);
            let here = Integer::from(&t[j] * (j - k + 2) as u32);
            t[j] = lower + here;
        }
    }
    t.remove(0);
    t
}

/// Exact B_k. B_1 = -1/2; B_k = 0 for odd k ≥ 3.
pub fn bernoulli_number(k: u32) -> Rational {
    if k == 0 {
        return Rational::from(1);
    }
    if k == 1 {
        return Rational::from((-1, 2));
    }
    if k % 2 == 1 {
        return Rational::new();
    }
    let n = (k / 2) as usize;
    let mut cache = CACHE.lock().unwrap();
    if cache.is_empty() {
        cache.push(Rational::from(1));
    }
    if n >= cache.len() {
        // Rebuild the tangent table through the new top; the quadratic cost
        // is trivial at the sizes Stirling tails and power sums ask for.
        let tangents = tangent_numbers(n);
        for m in cache.len()..=n {
            let four_m = Integer::from(1) << (2 * m as u32);
            let denom = Integer::from(&four_m * Integer::from(&four_m - 1u32));
            let numer = Integer::from(&tangents[m - 1] * Integer::from(2 * m));
            let mut b = Rational::from((numer, denom));
            if m % 2 == 0 {
                b = -b;
            }
            cache.push(b);
        }
    }
    cache[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_table_start() {
        assert_eq!(
            tangent_numbers(5),
            vec![1, 2, 16, 272, 7936]
                .into_iter()
                .map(Integer::from)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn known_small_values() {
        let expect: Vec<(u32, (i64, u64))> = vec![
            (0, (1, 1)),
            (1, (-1, 2)),
            (2, (1, 6)),
            (3, (0, 1)),
            (4, (-1, 30)),
            (6, (1, 42)),
            (8, (-1, 30)),
            (10, (5, 66)),
            (12, (-691, 2730)),
        ];
        for (k, (p, q)) in expect {
            assert_eq!(bernoulli_number(k), Rational::from((p, q)), "B_{k}");
        }
    }

    #[test]
    fn defining_recurrence() {
        // sum_{j=0}^{n} C(n+1, j) B_j = 0 for n >= 1, the textbook definition,
        // checked in exact arithmetic against an independently built Pascal row.
        for n in 1usize..=40 {
            let mut row = vec![Integer::from(1)]; // C(n+1, 0..=n+1)
            for j in 0..=n {
                let next = Integer::from(&row[j] * (n + 1 - j) as u32) / (j as u32 + 1);
                row.push(next);
            }
            let mut sum = Rational::new();
            for (j, c) in row.iter().take(n + 1).enumerate() {
                sum += bernoulli_number(j as u32) * Rational::from(c);
            }
            assert_eq!(sum, Rational::new(), "recurrence fails at n = {n}");
        }
    }

    #[test]
    fn sign_pattern_and_odd_zeros() {
        for m in 1u32..=15 {
            let b = bernoulli_number(2 * m);
            assert_eq!(b > 0, m % 2 == 1, "sign of B_{}", 2 * m);
            assert_eq!(bernoulli_number(2 * m + 1), Rational::new());
        }
    }

    #[test]
    fn concurrent_access_is_consistent() {
        let handles: Vec<_> = (0..4)
            .map(|i| std::thread::spawn(move || bernoulli_number(60 + 2 * (i % 2))))
            .collect();
        let got: Vec<Rational> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert_eq!(got[0], bernoulli_number(60));
        assert_eq!(got[1], bernoulli_number(62));
    }
}
