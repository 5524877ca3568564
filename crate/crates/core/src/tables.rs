//! Published comparison tables for perfect hash families, and the row
//! computation that reproduces them.
//!
//! The last four rows of the first table list `w` before `m` (`(1000, 8, 50)`
//! is `w = 8`, `m = 50`); read with the printed header they would need an
//! injective row of 50 symbols from 8 letters. They are stored here as
//! `(n, m, w)`.

use crate::bounds::{expurgation_phf_bound, phf_min_rows};
use crate::cluster_expansion::PhfSpec;
use crate::error::Result;
use crate::real::Real;

/// One published row: parameters and the two printed bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublishedRow {
    pub n: usize,
    pub m: u64,
    pub w: usize,
    pub theorem: u64,
    pub expurgation: u64,
}

const fn row(n: usize, m: u64, w: usize, theorem: u64, expurgation: u64) -> PublishedRow {
    PublishedRow {
        n,
        m,
        w,
        theorem,
        expurgation,
    }
}

/// `w ≥ 7`.
pub const PUBLISHED_TABLE_1: [PublishedRow; 11] = [
    row(15, 7, 7, 1437, 1926),
    row(50, 7, 7, 3034, 3191),
    row(200, 7, 7, 4529, 4572),
    row(1000, 7, 7, 6139, 6152),
    row(50, 8, 8, 8463, 9159),
    row(200, 8, 8, 12965, 13282),
    row(1000, 8, 8, 17774, 17988),
    row(1000, 12, 8, 900, 911),
    row(1000, 50, 8, 53, 54),
    row(1000, 50, 15, 730, 781),
    row(1000, 50, 18, 2812, 3037),
];

/// `w < 7`.
pub const PUBLISHED_TABLE_2: [PublishedRow; 10] = [
    row(10, 4, 4, 57, 62),
    row(15, 4, 4, 76, 77),
    row(50, 4, 4, 121, 114),
    row(10, 5, 5, 144, 187),
    row(15, 5, 5, 211, 234),
    row(50, 5, 5, 369, 364),
    row(15, 6, 6, 558, 681),
    row(50, 6, 6, 1072, 1092),
    row(90, 6, 6, 1284, 1287),
    row(200, 6, 6, 1557, 1546),
];

/// Both tables in print order.
pub fn published_rows() -> impl Iterator<Item = PublishedRow> {
    PUBLISHED_TABLE_1.into_iter().chain(PUBLISHED_TABLE_2)
}

/// Computed `(cluster-expansion bound, expurgation bound)` for one parameter set.
#[derive(Debug)]
pub struct ComputedRow {
    pub n: usize,
    pub m: u64,
    pub w: usize,
    pub theorem: Result<u64>,
    pub expurgation: Result<u64>,
}

pub fn compute_row<F: Real>(n: usize, m: u64, w: usize) -> ComputedRow {
    let theorem = PhfSpec::new(n, m, w)
        .and_then(|s| phf_min_rows::<F>(&s))
        .map(|r| r.n_clll);
    let expurgation = PhfSpec::new(n, m, w).and_then(|s| expurgation_phf_bound::<F>(&s));
    ComputedRow {
        n,
        m,
        w,
        theorem,
        expurgation,
    }
}
