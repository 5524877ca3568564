//! Moser–Tardos resampling specialised to perfect and separating hash families.
//!
//! The variables are the `N·n` matrix entries, each uniform on `1..=m`. The bad
//! event for a column set `W` (or a disjoint family `S`) occurs when no row is
//! injective on `W` (separates `S`). While some bad event occurs, one is chosen
//! and every entry in its columns is redrawn.
//!
//! # Reproducibility
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), and each
//! entry is drawn with `Rng::random_range(1..=m)`. Entries are consumed
//! row-major when the matrix is first sampled and row-major within the
//! resampled column block (columns in increasing order) afterwards. Under
//! [`BadEventPolicy::Random`] one extra draw selects the event before its block
//! is resampled. A run is therefore a pure function of
//! `(spec, N, seed, policy)`.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::FamilySpec;
use crate::combinatorics::binomial;
use crate::error::{Error, Result};
pub use crate::matrix::HashMatrix;

/// How an occurring bad event is picked when several occur.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum BadEventPolicy {
    /// The first occurring event in canonical enumeration order.
    #[default]
    LexFirst,
    /// Uniformly among all occurring events.
    Random,
}

/// A selected bad event: a `w`-subset of columns, or a disjoint family of column sets.
/// Columns are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BadEvent {
    Subset(Vec<usize>),
    Family(Vec<Vec<usize>>),
}

impl BadEvent {
    /// Sorted union of the event's columns.
    pub fn columns(&self) -> Vec<usize> {
        match self {
            BadEvent::Subset(c) => c.clone(),
            BadEvent::Family(parts) => {
                let mut all: Vec<usize> = parts.concat();
                all.sort_unstable();
                all
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MtStats {
    pub seed: u64,
    pub resamples: u64,
    /// Passes over the event family (one per loop iteration).
    pub iterations: u64,
    /// Bad events examined across all passes.
    pub scans: u64,
    /// Entry-pair comparisons performed while examining events.
    pub comparisons: u64,
    pub succeeded: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct MtOptions {
    pub policy: BadEventPolicy,
    /// Resampling cap; `None` means `100·C(n, w)`.
    pub max_resamples: Option<u64>,
    /// Keep the sequence of selected events.
    pub record_transcript: bool,
}

impl Default for MtOptions {
    fn default() -> Self {
        Self {
            policy: BadEventPolicy::LexFirst,
            max_resamples: None,
            record_transcript: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MtOutcome {
    pub matrix: HashMatrix,
    pub stats: MtStats,
    pub transcript: Vec<BadEvent>,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default resampling cap `100·C(n, w)`, saturating.
pub fn default_max_resamples(spec: &FamilySpec) -> u64 {
    binomial(spec.n() as u64, spec.w() as i64)
        .to_u64()
        .unwrap_or(u64::MAX)
        .saturating_mul(100)
}

/// `rows × cols` matrix of independent uniform entries, drawn row-major.
pub fn sample_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    m: u64,
    rng: &mut R,
) -> Result<HashMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSpec(format!(
            "matrix must be non-empty, got {rows}×{cols}"
        )));
    }
    if m < 2 || m > u32::MAX as u64 {
        return Err(Error::InvalidSpec(format!(
            "alphabet size m = {m} must be in 2..=2^32−1"
        )));
    }
    let m = m as u32;
    let entries = (0..rows * cols).map(|_| rng.random_range(1..=m)).collect();
    HashMatrix::new(rows, cols, m as u64, entries)
}

fn injective_counted(row: &[u32], cols: &[usize], comparisons: &mut u64) -> bool {
    for (i, &a) in cols.iter().enumerate() {
        for &b in &cols[i + 1..] {
            *comparisons += 1;
            if row[a] == row[b] {
                return false;
            }
        }
    }
    true
}

fn separates_counted(row: &[u32], family: &[Vec<usize>], comparisons: &mut u64) -> bool {
    for (r, part) in family.iter().enumerate() {
        for other in &family[r + 1..] {
            for &a in part {
                for &b in other {
                    *comparisons += 1;
                    if row[a] == row[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `true` iff the row's entries at `cols` are pairwise distinct.
pub fn row_is_injective(row: &[u32], cols: &[usize]) -> bool {
    injective_counted(row, cols, &mut 0)
}

/// `true` iff the row's value sets on distinct parts are pairwise disjoint.
pub fn row_separates(row: &[u32], family: &[Vec<usize>]) -> bool {
    separates_counted(row, family, &mut 0)
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// Visits every `w`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, w: usize, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) {
    if w > n {
        return;
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        if visit(&idx).is_break() {
            return;
        }
        if !next_combination(&mut idx, n) {
            return;
        }
    }
}

/// Visits every unordered disjoint family with the given part sizes exactly once.
///
/// Canonical order: parts sorted by non-increasing size; the first part runs over
/// its combinations in lexicographic order, then the second over the remaining
/// columns, and so on. Consecutive parts of equal size must have increasing least
/// elements. The resulting sequence is lexicographic in `(part_1, part_2, …)`.
pub fn for_each_family(
    n: usize,
    parts: &[usize],
    mut visit: impl FnMut(&[Vec<usize>]) -> ControlFlow<()>,
) {
    let mut sizes = parts.to_vec();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut used = vec![false; n];
    let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(sizes.len());
    let _ = family_rec(n, &sizes, &mut used, &mut chosen, &mut visit);
}

fn family_rec(
    n: usize,
    sizes: &[usize],
    used: &mut [bool],
    chosen: &mut Vec<Vec<usize>>,
    visit: &mut impl FnMut(&[Vec<usize>]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let level = chosen.len();
    if level == sizes.len() {
        return visit(chosen);
    }
    let size = sizes[level];
    let free: Vec<usize> = (0..n).filter(|&c| !used[c]).collect();
    let floor = match level {
        0 => None,
        _ if sizes[level - 1] == size => Some(chosen[level - 1][0]),
        _ => None,
    };
    if size > free.len() {
        return ControlFlow::Continue(());
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let part: Vec<usize> = idx.iter().map(|&i| free[i]).collect();
        if floor.is_none_or(|f| part[0] > f) {
            for &c in &part {
                used[c] = true;
            }
            chosen.push(part);
            let flow = family_rec(n, sizes, used, chosen, visit);
            let part = chosen.pop().expect("pushed above");
            for &c in &part {
                used[c] = false;
            }
            flow?;
        }
        if !next_combination(&mut idx, free.len()) {
            return ControlFlow::Continue(());
        }
    }
}

#[derive(Debug, Default)]
struct ScanCounts {
    events: u64,
    comparisons: u64,
}

fn phf_event_occurs(a: &HashMatrix, cols: &[usize], counts: &mut ScanCounts) -> bool {
    counts.events += 1;
    !a.iter_rows()
        .any(|row| injective_counted(row, cols, &mut counts.comparisons))
}

fn shf_event_occurs(a: &HashMatrix, family: &[Vec<usize>], counts: &mut ScanCounts) -> bool {
    counts.events += 1;
    !a.iter_rows()
        .any(|row| separates_counted(row, family, &mut counts.comparisons))
}

fn scan_phf<R: Rng + ?Sized>(
    a: &HashMatrix,
    w: usize,
    policy: BadEventPolicy,
    rng: &mut R,
    counts: &mut ScanCounts,
) -> Option<Vec<usize>> {
    match policy {
        BadEventPolicy::LexFirst => {
            let mut found = None;
            for_each_subset(a.cols(), w, |cols| {
                if phf_event_occurs(a, cols, counts) {
                    found = Some(cols.to_vec());
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            found
        }
        BadEventPolicy::Random => {
            let mut all = Vec::new();
            for_each_subset(a.cols(), w, |cols| {
                if phf_event_occurs(a, cols, counts) {
                    all.push(cols.to_vec());
                }
                ControlFlow::Continue(())
            });
            pick(all, rng)
        }
    }
}

fn scan_shf<R: Rng + ?Sized>(
    a: &HashMatrix,
    parts: &[usize],
    policy: BadEventPolicy,
    rng: &mut R,
    counts: &mut ScanCounts,
) -> Option<Vec<Vec<usize>>> {
    let mut all = Vec::new();
    for_each_family(a.cols(), parts, |family| {
        if shf_event_occurs(a, family, counts) {
            all.push(family.to_vec());
            if policy == BadEventPolicy::LexFirst {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    pick(all, rng)
}

fn pick<T, R: Rng + ?Sized>(mut all: Vec<T>, rng: &mut R) -> Option<T> {
    match all.len() {
        0 => None,
        1 => all.pop(),
        len => Some(all.swap_remove(rng.random_range(0..len))),
    }
}

/// An occurring `E_W`, or `None` if every `w`-subset has an injective row.
pub fn find_bad_event_phf<R: Rng + ?Sized>(
    a: &HashMatrix,
    w: usize,
    policy: BadEventPolicy,
    rng: &mut R,
) -> Option<Vec<usize>> {
    scan_phf(a, w, policy, rng, &mut ScanCounts::default())
}

/// An occurring `E_S`, or `None` if every disjoint family is separated by some row.
pub fn find_bad_event_shf<R: Rng + ?Sized>(
    a: &HashMatrix,
    parts: &[usize],
    policy: BadEventPolicy,
    rng: &mut R,
) -> Option<Vec<Vec<usize>>> {
    scan_shf(a, parts, policy, rng, &mut ScanCounts::default())
}

fn resample<R: Rng + ?Sized>(a: &mut HashMatrix, cols: &[usize], rng: &mut R) {
    let m = a.alphabet() as u32;
    for r in 0..a.rows() {
        for &c in cols {
            a.set(r, c, rng.random_range(1..=m));
        }
    }
}

/// Runs the resampling algorithm for `rows` rows.
///
/// On success the matrix is a perfect (separating) hash family. Exceeding the
/// resample cap returns [`Error::ResampleLimit`] with the run's statistics; that
/// indicates `rows` is probably too small, not that no family exists.
pub fn construct(
    spec: &FamilySpec,
    rows: usize,
    seed: u64,
    options: &MtOptions,
) -> Result<MtOutcome> {
    let start = Instant::now();
    let limit = options
        .max_resamples
        .unwrap_or_else(|| default_max_resamples(spec));
    let mut rng = rng_from_seed(seed);
    let mut matrix = sample_matrix(rows, spec.n(), spec.m(), &mut rng)?;
    let mut stats = MtStats {
        seed,
        resamples: 0,
        iterations: 0,
        scans: 0,
        comparisons: 0,
        succeeded: false,
        elapsed: Duration::ZERO,
    };
    let mut transcript = Vec::new();
    let mut counts = ScanCounts::default();

    loop {
        stats.iterations += 1;
        let event = match spec {
            FamilySpec::Phf(s) => {
                scan_phf(&matrix, s.w, options.policy, &mut rng, &mut counts).map(BadEvent::Subset)
            }
            FamilySpec::Shf(s) => {
                scan_shf(&matrix, &s.parts, options.policy, &mut rng, &mut counts)
                    .map(BadEvent::Family)
            }
        };
        stats.scans = counts.events;
        stats.comparisons = counts.comparisons;
        let Some(event) = event else {
            stats.succeeded = true;
            stats.elapsed = start.elapsed();
            return Ok(MtOutcome {
                matrix,
                stats,
                transcript,
            });
        };
        if stats.resamples >= limit {
            stats.elapsed = start.elapsed();
            return Err(Error::ResampleLimit {
                limit,
                stats: Box::new(stats),
            });
        }
        resample(&mut matrix, &event.columns(), &mut rng);
        stats.resamples += 1;
        if options.record_transcript {
            transcript.push(event);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ShfSpec;
    use crate::cluster_expansion::PhfSpec;
    use crate::combinatorics::family_multiplicity;

    fn m(rows: &[Vec<u32>]) -> HashMatrix {
        HashMatrix::from_rows(4, rows).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let a = sample_matrix(2, 3, 4, &mut rng_from_seed(7)).unwrap();
        let b = sample_matrix(2, 3, 4, &mut rng_from_seed(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.entries().iter().all(|&e| (1..=4).contains(&e)));
        assert!(sample_matrix(1, 1, 1, &mut rng_from_seed(0)).is_err());
        assert!(sample_matrix(0, 3, 4, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn row_predicates() {
        assert!(row_is_injective(&[1, 2, 3], &[0, 1]));
        assert!(!row_is_injective(&[1, 1, 2], &[0, 1]));
        assert!(row_is_injective(&[1, 1, 2], &[2]));
        assert!(row_separates(&[1, 1, 2], &[vec![0, 1], vec![2]]));
        assert!(!row_separates(&[1, 2, 1], &[vec![0, 1], vec![2]]));
        assert!(row_separates(&[1, 2, 1], &[vec![0, 2], vec![1]]));
        assert!(row_separates(&[1, 1, 1], &[vec![0, 1, 2]]));
    }

    #[test]
    fn lex_first_phf_events() {
        let mut rng = rng_from_seed(0);
        let p = BadEventPolicy::LexFirst;
        assert_eq!(
            find_bad_event_phf(&m(&[vec![1, 1, 2]]), 2, p, &mut rng),
            Some(vec![0, 1])
        );
        assert_eq!(
            find_bad_event_phf(&m(&[vec![1, 2, 3]]), 2, p, &mut rng),
            None
        );
        assert_eq!(
            find_bad_event_phf(&m(&[vec![1, 1, 1], vec![1, 2, 3]]), 3, p, &mut rng),
            None
        );
        assert_eq!(
            find_bad_event_phf(&m(&[vec![1, 2, 2]]), 2, p, &mut rng),
            Some(vec![1, 2])
        );
    }

    #[test]
    fn lex_first_shf_events() {
        let mut rng = rng_from_seed(0);
        let p = BadEventPolicy::LexFirst;
        assert_eq!(
            find_bad_event_shf(&m(&[vec![1, 2]]), &[1, 1], p, &mut rng),
            None
        );
        assert_eq!(
            find_bad_event_shf(&m(&[vec![1, 1]]), &[1, 1], p, &mut rng),
            Some(vec![vec![0], vec![1]])
        );
        let a = m(&[vec![1, 1, 2], vec![1, 2, 2], vec![2, 1, 2]]);
        assert_eq!(find_bad_event_shf(&a, &[2, 1], p, &mut rng), None);
        assert_eq!(
            find_bad_event_shf(&m(&[vec![1, 1, 2]]), &[2, 1], p, &mut rng),
            Some(vec![vec![0, 2], vec![1]])
        );
    }

    #[test]
    fn random_policy_picks_an_occurring_event() {
        let a = m(&[vec![1, 1, 1, 1]]);
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let ev = find_bad_event_phf(&a, 2, BadEventPolicy::Random, &mut rng).unwrap();
            assert!(!row_is_injective(a.row(0), &ev));
        }
    }

    #[test]
    fn family_enumeration_counts() {
        for (n, parts) in [
            (6, vec![1, 1]),
            (6, vec![2, 1]),
            (7, vec![2, 2]),
            (8, vec![2, 2, 1]),
            (6, vec![1, 1, 1]),
        ] {
            let mut count = 0u64;
            let mut seen = std::collections::BTreeSet::new();
            for_each_family(n, &parts, |fam| {
                count += 1;
                let mut canon: Vec<Vec<usize>> = fam.to_vec();
                canon.sort();
                assert!(seen.insert(canon), "family visited twice");
                ControlFlow::Continue(())
            });
            let w: usize = parts.iter().sum();
            let expected = binomial(n as u64, w as i64) * family_multiplicity(&parts);
            assert_eq!(count, expected.to_u64().unwrap(), "n={n} parts={parts:?}");
        }
    }

    #[test]
    fn construct_small_phf() {
        let spec = FamilySpec::Phf(PhfSpec::new(4, 4, 2).unwrap());
        let out = construct(&spec, 2, 1, &MtOptions::default()).unwrap();
        assert!(out.stats.succeeded);
        assert_eq!(
            find_bad_event_phf(
                &out.matrix,
                2,
                BadEventPolicy::LexFirst,
                &mut rng_from_seed(0)
            ),
            None
        );
    }

    #[test]
    fn construct_single_event() {
        let spec = FamilySpec::Phf(PhfSpec::new(4, 5, 4).unwrap());
        let out = construct(&spec, 1, 9, &MtOptions::default()).unwrap();
        assert!(row_is_injective(out.matrix.row(0), &[0, 1, 2, 3]));
    }

    #[test]
    fn resampling_touches_only_event_columns() {
        let mut rng = rng_from_seed(9);
        let before = sample_matrix(6, 7, 5, &mut rng).unwrap();
        let mut after = before.clone();
        resample(&mut after, &[1, 4], &mut rng);
        for r in 0..6 {
            for c in [0, 2, 3, 5, 6] {
                assert_eq!(before.get(r, c), after.get(r, c));
            }
        }
        assert_ne!(before, after);
    }

    #[test]
    fn resample_limit_reports_stats() {
        // a single row over {1,2} cannot be injective on all three pairs of 3 columns
        let spec = FamilySpec::Phf(PhfSpec::new(3, 2, 2).unwrap());
        let opts = MtOptions {
            max_resamples: Some(5),
            ..MtOptions::default()
        };
        match construct(&spec, 1, 1, &opts) {
            Err(Error::ResampleLimit { limit, stats }) => {
                assert_eq!(limit, 5);
                assert_eq!(stats.resamples, 5);
                assert!(!stats.succeeded);
            }
            other => panic!("expected resample limit, got {other:?}"),
        }
    }

    #[test]
    fn construct_small_shf() {
        let spec = FamilySpec::Shf(ShfSpec::new(5, 3, vec![1, 2]).unwrap());
        let out = construct(&spec, 6, 4, &MtOptions::default()).unwrap();
        assert_eq!(
            find_bad_event_shf(
                &out.matrix,
                &[2, 1],
                BadEventPolicy::LexFirst,
                &mut rng_from_seed(0)
            ),
            None
        );
    }
}
