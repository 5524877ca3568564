//! Exact counting primitives.
//!
//! All results are arbitrary precision; nothing in here touches floating point.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Nonnegative arbitrary-precision count.
pub type BigCount = BigUint;

/// Exact fraction in lowest terms with a positive denominator.
pub type BigRational = num_rational::BigRational;

pub fn factorial(k: u64) -> BigCount {
    (2..=k).fold(BigCount::one(), |acc, i| acc * i)
}

/// `a (a-1) ⋯ (a-k+1)`; zero once the product reaches a zero factor.
pub fn falling_factorial(a: u64, k: u64) -> BigCount {
    if k > a {
        return BigCount::zero();
    }
    (0..k).fold(BigCount::one(), |acc, i| acc * (a - i))
}

/// `C(a, b)`, zero outside `0 ≤ b ≤ a`.
pub fn binomial(a: u64, b: i64) -> BigCount {
    if b < 0 || b as u64 > a {
        return BigCount::zero();
    }
    let b = (b as u64).min(a - b as u64);
    // Running product stays integral: C(a-b+i, i) at step i.
    let mut acc = BigCount::one();
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}

/// Product of two power series, truncated after degree `cap`.
pub(crate) fn truncated_mul(lhs: &[BigCount], rhs: &[BigCount], cap: usize) -> Vec<BigCount> {
    let mut out = vec![BigCount::zero(); cap + 1];
    for (i, a) in lhs.iter().enumerate().take(cap + 1) {
        if a.is_zero() {
            continue;
        }
        for (j, b) in rhs.iter().enumerate().take(cap + 1 - i) {
            if !b.is_zero() {
                out[i + j] += a * b;
            }
        }
    }
    out
}

/// Coefficients of `(1+z)^w − 1` up to degree `cap`.
pub(crate) fn shifted_binomial_series(w: u64, cap: usize) -> Vec<BigCount> {
    (0..=cap)
        .map(|i| {
            if i == 0 {
                BigCount::zero()
            } else {
                binomial(w, i as i64)
            }
        })
        .collect()
}

/// Successive powers `((1+z)^w − 1)^k`, `k = 1, 2, …`, each truncated at `cap`.
pub(crate) fn shifted_binomial_powers(w: u64, cap: usize) -> impl Iterator<Item = Vec<BigCount>> {
    let base = shifted_binomial_series(w, cap);
    let mut current: Option<Vec<BigCount>> = None;
    std::iter::from_fn(move || {
        let next = match current.take() {
            None => base.clone(),
            Some(prev) => truncated_mul(&prev, &base, cap),
        };
        current = Some(next.clone());
        Some(next)
    })
}

/// `[z^j] ((1+z)^w − 1)^k`: the sum over compositions `i_1+…+i_k = j`, `i_l ≥ 1`,
/// of `∏ C(w, i_l)`.
pub fn surjective_series_coeff(w: u64, k: u64, j: u64) -> BigCount {
    if k == 0 {
        return if j == 0 {
            BigCount::one()
        } else {
            BigCount::zero()
        };
    }
    let cap = j as usize;
    shifted_binomial_powers(w, cap)
        .nth(k as usize - 1)
        .map(|p| p[cap].clone())
        .unwrap_or_default()
}

/// Row `S(p, 0..=p)` of the Stirling numbers of the second kind.
fn stirling_row(p: usize) -> Vec<BigCount> {
    let mut row = vec![BigCount::one()];
    for n in 1..=p {
        let mut next = vec![BigCount::zero(); n + 1];
        for c in 1..=n {
            let mut v = if c < row.len() {
                &row[c] * c
            } else {
                BigCount::zero()
            };
            v += &row[c - 1];
            next[c] = v;
        }
        row = next;
    }
    row
}

/// Stirling numbers of the second kind, memoized by row for one caller.
#[derive(Debug, Default, Clone)]
pub struct StirlingTable {
    rows: BTreeMap<usize, Vec<BigCount>>,
}

impl StirlingTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Full row `S(p, 0..=p)`.
    pub fn row(&mut self, p: usize) -> &[BigCount] {
        self.rows.entry(p).or_insert_with(|| stirling_row(p))
    }

    pub fn get(&mut self, p: usize, c: usize) -> BigCount {
        self.row(p).get(c).cloned().unwrap_or_default()
    }
}

/// Number of partitions of a `p`-set into `c` nonempty blocks.
pub fn stirling2(p: u64, c: u64) -> BigCount {
    if c > p {
        return BigCount::zero();
    }
    stirling_row(p as usize).swap_remove(c as usize)
}

/// Number of unordered disjoint families with the given part sizes whose union is a
/// fixed set of `Σ parts` elements: `w! / (∏ w_i! · ∏_p m_p!)` where `m_p` counts the
/// parts of size `p`.
pub fn family_multiplicity(parts: &[usize]) -> BigCount {
    let w: u64 = parts.iter().map(|&p| p as u64).sum();
    let mut denominator = BigCount::one();
    let mut multiplicities: BTreeMap<usize, u64> = BTreeMap::new();
    for &p in parts {
        denominator *= factorial(p as u64);
        *multiplicities.entry(p).or_default() += 1;
    }
    for &m in multiplicities.values() {
        denominator *= factorial(m);
    }
    factorial(w) / denominator
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn big(x: u64) -> BigCount {
        BigCount::from(x)
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), big(1));
        assert_eq!(factorial(5), big(120));
        assert_eq!(factorial(10), big(3628800));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), big(10));
        assert_eq!(binomial(4, 0), big(1));
        assert_eq!(binomial(3, 5), big(0));
        assert_eq!(binomial(3, -1), big(0));
        assert_eq!(binomial(0, 0), big(1));
    }

    #[test]
    fn falling_factorial_values() {
        assert_eq!(falling_factorial(7, 3), big(210));
        assert_eq!(falling_factorial(4, 0), big(1));
        assert_eq!(falling_factorial(3, 5), big(0));
        assert_eq!(falling_factorial(0, 0), big(1));
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(3, 2), big(3));
        assert_eq!(stirling2(4, 2), big(7));
        assert_eq!(stirling2(5, 0), big(0));
        assert_eq!(stirling2(0, 0), big(1));
        assert_eq!(stirling2(2, 3), big(0));
        let mut table = StirlingTable::new();
        assert_eq!(table.get(10, 4), big(34105));
        assert_eq!(table.get(10, 4), stirling2(10, 4));
    }

    #[test]
    fn surjective_coefficients() {
        assert_eq!(surjective_series_coeff(2, 1, 2), big(1));
        assert_eq!(surjective_series_coeff(2, 2, 3), big(4));
        // (3z + 3z² + z³)²: z⁴ collects 3·1 + 3·3 + 1·3
        assert_eq!(surjective_series_coeff(3, 2, 4), big(15));
        assert_eq!(surjective_series_coeff(3, 2, 1), big(0));
    }

    #[test]
    fn family_multiplicity_values() {
        assert_eq!(family_multiplicity(&[1, 1]), big(1));
        assert_eq!(family_multiplicity(&[2, 3]), big(10));
        assert_eq!(family_multiplicity(&[2, 2]), big(3));
        assert_eq!(family_multiplicity(&[1, 1, 1, 1, 1]), big(1));
        assert_eq!(family_multiplicity(&[1, 2]), big(3));
    }

    #[test]
    fn stirling_falling_factorial_identity() {
        for p in 0..=6u64 {
            for m in 0..=6u64 {
                let lhs: BigCount = (0..=p)
                    .map(|c| stirling2(p, c) * falling_factorial(m, c))
                    .sum();
                assert_eq!(lhs, BigCount::from(m).pow(p as u32), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn surjective_matches_composition_enumeration() {
        for w in 1..=4u64 {
            for k in 1..=3u64 {
                for j in 0..=8u64 {
                    let brute: BigCount = (0..k)
                        .map(|_| 1..=w)
                        .multi_cartesian_product()
                        .filter(|c| c.iter().sum::<u64>() == j)
                        .map(|c| {
                            c.iter()
                                .map(|&i| binomial(w, i as i64))
                                .product::<BigCount>()
                        })
                        .sum();
                    assert_eq!(surjective_series_coeff(w, k, j), brute, "w={w} k={k} j={j}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn binomial_symmetry(a in 0u64..120, b in 0u64..120) {
            prop_assume!(b <= a);
            prop_assert_eq!(binomial(a, b as i64), binomial(a, (a - b) as i64));
        }

        #[test]
        fn falling_factorial_is_factorial_ratio(a in 0u64..60, k in 0u64..60) {
            prop_assume!(k <= a);
            prop_assert_eq!(falling_factorial(a, k), factorial(a) / factorial(a - k));
        }

        #[test]
        fn singleton_families_are_unique(s in 1usize..12) {
            prop_assert_eq!(family_multiplicity(&vec![1; s]), BigCount::one());
        }
    }
}
