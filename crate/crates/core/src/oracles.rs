//! Brute-force reference implementations.
//!
//! Nothing here shares code with the closed forms or the resampling engine:
//! subsets come from `itertools`, row predicates use hash sets instead of
//! pairwise comparisons, and counts are plain enumerations. Every exponential
//! path has a hard size guard.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::combinatorics::{binomial, BigCount, BigRational};
use crate::error::{Error, Result};
use crate::matrix::HashMatrix;

/// Largest `C(n, w)` accepted by [`brute_gamma_k`].
pub const MAX_SUBSETS: u64 = 10_000;
/// Largest `m^w` accepted by the row enumerations.
pub const MAX_ROWS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    BadSubset,
    BadFamily,
}

/// A column set (or disjoint family) that no row handles. Columns are 0-based;
/// `Display` prints them 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Witness {
    pub kind: WitnessKind,
    pub columns: Vec<Vec<usize>>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |set: &Vec<usize>| {
            let inner: Vec<String> = set.iter().map(|c| (c + 1).to_string()).collect();
            format!("{{{}}}", inner.join(","))
        };
        match self.kind {
            WitnessKind::BadSubset => write!(f, "{}", show(&self.columns[0])),
            WitnessKind::BadFamily => {
                let parts: Vec<String> = self.columns.iter().map(show).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

fn distinct_on(row: &[u32], cols: &[usize]) -> bool {
    let mut seen = HashSet::with_capacity(cols.len());
    cols.iter().all(|&c| seen.insert(row[c]))
}

fn separated_on(row: &[u32], family: &[Vec<usize>]) -> bool {
    let sets: Vec<HashSet<u32>> = family
        .iter()
        .map(|part| part.iter().map(|&c| row[c]).collect())
        .collect();
    sets.iter()
        .tuple_combinations()
        .all(|(a, b)| a.is_disjoint(b))
}

/// `None` iff every `w`-subset of columns has an injective row; otherwise the
/// lexicographically first failing subset.
pub fn verify_phf(a: &HashMatrix, w: usize) -> Option<Witness> {
    (0..a.cols())
        .combinations(w)
        .find(|cols| !a.iter_rows().any(|row| distinct_on(row, cols)))
        .map(|cols| Witness {
            kind: WitnessKind::BadSubset,
            columns: vec![cols],
        })
}

/// Ordered assignments of the labels `0..s` (label `i` used `sizes[i]` times) to
/// `slots` positions, without repeats.
fn label_assignments(sizes: &[usize]) -> Vec<Vec<usize>> {
    fn rec(
        remaining: &mut [usize],
        current: &mut Vec<usize>,
        total: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == total {
            out.push(current.clone());
            return;
        }
        for label in 0..remaining.len() {
            if remaining[label] > 0 {
                remaining[label] -= 1;
                current.push(label);
                rec(remaining, current, total, out);
                current.pop();
                remaining[label] += 1;
            }
        }
    }
    let total = sizes.iter().sum();
    let mut out = Vec::new();
    rec(
        &mut sizes.to_vec(),
        &mut Vec::with_capacity(total),
        total,
        &mut out,
    );
    out
}

/// Every unordered disjoint family with the given part sizes, canonicalised
/// (parts by non-increasing size, ties broken lexicographically) and sorted.
pub fn enumerate_families(n: usize, parts: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let w: usize = parts.iter().sum();
    let assignments = label_assignments(parts);
    let mut families = BTreeSet::new();
    for union in (0..n).combinations(w) {
        for labels in &assignments {
            let mut family = vec![Vec::new(); parts.len()];
            for (&col, &label) in union.iter().zip(labels) {
                family[label].push(col);
            }
            family.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            families.insert(family);
        }
    }
    families.into_iter().collect()
}

/// `None` iff every disjoint family is separated by some row; otherwise the first
/// failing family in canonical order.
pub fn verify_shf(a: &HashMatrix, parts: &[usize]) -> Option<Witness> {
    enumerate_families(a.cols(), parts)
        .into_iter()
        .find(|family| !a.iter_rows().any(|row| separated_on(row, family)))
        .map(|family| Witness {
            kind: WitnessKind::BadFamily,
            columns: family,
        })
}

/// Direct count of `k`-sets of pairwise disjoint `w`-subsets of `[n]` that each meet
/// `{0, …, w−1}` (that set itself included).
pub fn brute_gamma_k(w: usize, n: usize, k: usize) -> Result<BigCount> {
    let subsets = binomial(n as u64, w as i64).to_u64().unwrap_or(u64::MAX);
    if subsets > MAX_SUBSETS || n > 128 {
        return Err(Error::InstanceTooLarge(format!(
            "C({n}, {w}) = {subsets} subsets"
        )));
    }
    let reference: u128 = (1u128 << w) - 1;
    let masks: Vec<u128> = (0..n)
        .combinations(w)
        .map(|c| c.iter().fold(0u128, |m, &i| m | (1u128 << i)))
        .filter(|m| m & reference != 0)
        .collect();

    fn count(masks: &[u128], start: usize, used: u128, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        (start..masks.len())
            .filter(|&i| masks[i] & used == 0)
            .map(|i| count(masks, i + 1, used | masks[i], left - 1))
            .sum()
    }
    Ok(BigCount::from(count(&masks, 0, 0, k)))
}

fn guard_rows(m: u64, w: usize) -> Result<()> {
    let rows = (m as f64).powi(w as i32);
    if rows > MAX_ROWS as f64 {
        return Err(Error::InstanceTooLarge(format!("{m}^{w} rows")));
    }
    Ok(())
}

/// Every row in `[1..m]^w`, in odometer order.
fn all_rows(m: u64, w: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..w).map(|_| 1..=m as u32).multi_cartesian_product()
}

/// Assigns consecutive columns `0..w` to the parts in order.
fn consecutive_family(parts: &[usize]) -> Vec<Vec<usize>> {
    let mut next = 0;
    parts
        .iter()
        .map(|&p| {
            let part = (next..next + p).collect();
            next += p;
            part
        })
        .collect()
}

/// Proper `m`-colourings of the complete multipartite graph, by enumeration.
pub fn brute_chromatic(parts: &[usize], m: u64) -> Result<BigCount> {
    let w: usize = parts.iter().sum();
    guard_rows(m, w)?;
    let family = consecutive_family(parts);
    if m == 0 {
        return Ok(BigCount::from(u8::from(w == 0)));
    }
    Ok(BigCount::from(
        all_rows(m, w)
            .filter(|row| separated_on(row, &family))
            .count(),
    ))
}

/// What a single row must achieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowPredicate {
    /// Injective on `w` columns.
    Injective(usize),
    /// Separates a family with these part sizes.
    Separating(Vec<usize>),
}

/// Exact probability that a uniform row fails the predicate.
pub fn brute_row_failure_probability(predicate: &RowPredicate, m: u64) -> Result<BigRational> {
    type RowCheck = Box<dyn Fn(&[u32]) -> bool>;
    let (w, ok): (usize, RowCheck) = match predicate {
        RowPredicate::Injective(w) => {
            let cols: Vec<usize> = (0..*w).collect();
            (*w, Box::new(move |row| distinct_on(row, &cols)))
        }
        RowPredicate::Separating(parts) => {
            let family = consecutive_family(parts);
            (
                parts.iter().sum(),
                Box::new(move |row| separated_on(row, &family)),
            )
        }
    };
    guard_rows(m, w)?;
    let mut total = 0u64;
    let mut failing = 0u64;
    for row in all_rows(m, w) {
        total += 1;
        if !ok(&row) {
            failing += 1;
        }
    }
    Ok(BigRational::new(BigInt::from(failing), BigInt::from(total)))
}
