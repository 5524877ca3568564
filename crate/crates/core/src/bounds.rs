//! Minimal row counts for perfect and separating hash families, together with
//! the competing local-lemma, expurgation and Stinson–Zaverucha bounds.
//!
//! Per-row failure probabilities are formed as exact rationals and only then
//! logged; `1 − π/m^w` cancels catastrophically in floating point when `m ≫ w`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::cluster_expansion::{a_n_w, ClusterNumerator, PhfSpec};
use crate::combinatorics::{
    binomial, factorial, falling_factorial, family_multiplicity, BigCount, BigRational,
    StirlingTable,
};
use crate::error::{Error, Result};
use crate::real::{floor_exp, ln_big, neg_ln_complement, Real};

/// Parameters `(n, m, {w_1..w_s})` of a separating hash family. Parts are kept
/// in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShfSpec {
    pub n: usize,
    pub m: u64,
    pub parts: Vec<usize>,
}

impl ShfSpec {
    pub fn new(n: usize, m: u64, parts: impl Into<Vec<usize>>) -> Result<Self> {
        let mut parts = parts.into();
        if parts.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "a separating family needs at least 2 parts, got {}",
                parts.len()
            )));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidSpec("part sizes must be positive".into()));
        }
        let w: usize = parts.iter().sum();
        if w > n {
            return Err(Error::InvalidSpec(format!("w = {w} exceeds n = {n}")));
        }
        if m < 2 {
            return Err(Error::InvalidSpec(format!(
                "alphabet size m = {m} must be at least 2"
            )));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { n, m, parts })
    }

    /// `w = Σ w_i`.
    pub fn w(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn s(&self) -> usize {
        self.parts.len()
    }

    /// The perfect-hash parameters with the same `(n, m, w)`; both families share `Γ_k(w, n)`.
    pub fn phf_shape(&self) -> PhfSpec {
        PhfSpec {
            n: self.n,
            m: self.m,
            w: self.w(),
        }
    }
}

/// Either kind of family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    Phf(PhfSpec),
    Shf(ShfSpec),
}

impl FamilySpec {
    pub fn n(&self) -> usize {
        match self {
            FamilySpec::Phf(s) => s.n,
            FamilySpec::Shf(s) => s.n,
        }
    }

    pub fn m(&self) -> u64 {
        match self {
            FamilySpec::Phf(s) => s.m,
            FamilySpec::Shf(s) => s.m,
        }
    }

    pub fn w(&self) -> usize {
        match self {
            FamilySpec::Phf(s) => s.w,
            FamilySpec::Shf(s) => s.w(),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Phf(s) => write!(f, "PHF(n={}, m={}, w={})", s.n, s.m, s.w),
            FamilySpec::Shf(s) => {
                let parts: Vec<String> = s.parts.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "SHF(n={}, m={}, parts={{{}}})",
                    s.n,
                    s.m,
                    parts.join(",")
                )
            }
        }
    }
}

/// All bounds for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<F> {
    pub spec: FamilySpec,
    /// `A_n(w)` for perfect families, `S_n(w) = A_n(w) + ln m_w` for separating ones.
    pub a_n: F,
    /// `D_m(w)` for perfect families, `ln(1/q)` for separating ones.
    pub d_m: F,
    /// Minimal `N` guaranteed by the cluster-expansion bound.
    pub n_clll: u64,
    /// Classical local lemma bound (perfect families only).
    pub n_lll: Option<u64>,
    pub n_expurgation: Option<u64>,
    /// Stinson–Zaverucha maximum column count at `N = n_clll` (two-part families only).
    pub sz_max_columns: Option<BigCount>,
    /// Maximum column count implied asymptotically by the cluster-expansion bound at `N = n_clll`.
    pub clll_asymptotic_max_columns: Option<BigCount>,
    /// Per-row failure probability of a separating family.
    pub q: Option<BigRational>,
    pub log_phi_prime: Option<F>,
    pub m_w: BigCount,
    /// `false` when `n < 2w` and `A_n(w)` is a supremum rather than a maximum.
    pub attained: bool,
}

/// Smallest integer `N ≥ ratio`, at least 1. Ratios within `1e−9` (relative) of an
/// integer are treated as that integer, so exact ties are not pushed up by rounding noise.
pub fn min_rows<F: Real>(ratio: F) -> u64 {
    let x = ratio.to_f64().unwrap_or(f64::INFINITY);
    let nearest = x.round();
    let n = if (x - nearest).abs() <= 1e-9 * x.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    if n.is_finite() {
        (n as u64).max(1)
    } else {
        u64::MAX
    }
}

/// `D_m(w) = ln(m^w) − ln(m^w − w! C(m, w))`.
pub fn d_m_w<F: Real>(m: u64, w: usize) -> Result<F> {
    if w < 2 {
        return Err(Error::InvalidSpec(format!("w = {w} must be at least 2")));
    }
    if w as u64 > m {
        return Err(Error::AlphabetTooSmall { m, w });
    }
    let injective = falling_factorial(m, w as u64);
    let all = BigUint::from(m).pow(w as u32);
    Ok(neg_ln_complement(&injective, &all))
}

/// Cluster-expansion bound for a perfect hash family, with the LLL and expurgation
/// bounds for comparison.
pub fn phf_min_rows<F: Real>(spec: &PhfSpec) -> Result<BoundReport<F>> {
    let d_m = d_m_w::<F>(spec.m, spec.w)?;
    let ClusterNumerator {
        value: a_n,
        attained,
        log_phi_prime,
        ..
    } = a_n_w::<F>(spec)?;
    Ok(BoundReport {
        spec: FamilySpec::Phf(*spec),
        a_n,
        d_m,
        n_clll: min_rows(a_n / d_m),
        n_lll: Some(min_rows(l_n_w::<F>(spec) / d_m)),
        n_expurgation: Some(min_rows(e_n_w::<F>(spec) / d_m)),
        sz_max_columns: None,
        clll_asymptotic_max_columns: None,
        q: None,
        log_phi_prime,
        m_w: BigCount::one(),
        attained,
    })
}

/// Number of proper `m`-colourings of the complete multipartite graph with the given part sizes.
pub fn chromatic_multipartite(parts: &[usize], m: u64) -> BigCount {
    let mut table = StirlingTable::new();
    // Generating polynomial in the total number of colour classes.
    let mut classes = vec![BigCount::one()];
    for &p in parts {
        let row = table.row(p);
        let mut next = vec![BigCount::zero(); classes.len() + p];
        for (i, a) in classes.iter().enumerate() {
            for (c, s) in row.iter().enumerate().skip(1) {
                next[i + c] += a * s;
            }
        }
        classes = next;
    }
    classes
        .iter()
        .enumerate()
        .filter(|(_, count)| !count.is_zero())
        .map(|(t, count)| count * falling_factorial(m, t as u64))
        .sum()
}

/// Probability `q = 1 − π(m)/m^w` that one random row fails to separate a family.
pub fn q_shf(spec: &ShfSpec) -> Result<BigRational> {
    let (proper, all) = separation_counts(&spec.parts, spec.m)?;
    let fail = &all - &proper;
    Ok(BigRational::new(BigInt::from(fail), BigInt::from(all)))
}

/// `(π(m), m^w)` with the degenerate cases rejected.
fn separation_counts(parts: &[usize], m: u64) -> Result<(BigCount, BigCount)> {
    let w: usize = parts.iter().sum();
    let proper = chromatic_multipartite(parts, m);
    let all = BigUint::from(m).pow(w as u32);
    if proper.is_zero() {
        return Err(Error::NoSeparatingRow { m });
    }
    if proper == all {
        return Err(Error::AlwaysSeparating);
    }
    Ok((proper, all))
}

/// Cluster-expansion bound for a separating hash family.
pub fn shf_min_rows<F: Real>(spec: &ShfSpec) -> Result<BoundReport<F>> {
    let (proper, all) = separation_counts(&spec.parts, spec.m)?;
    let ln_inv_q: F = neg_ln_complement(&proper, &all);
    let m_w = family_multiplicity(&spec.parts);
    let numerator = a_n_w::<F>(&spec.phf_shape())?;
    let s_n = numerator.value + ln_big::<F>(&m_w);
    let n_clll = min_rows(s_n / ln_inv_q);

    let two_part = spec.s() == 2;
    let n_expurgation = if two_part {
        Some(min_rows(f_n_w::<F>(spec)? / ln_inv_q))
    } else {
        None
    };
    let (sz, asymptotic) = if two_part {
        let cmp = sz_max_columns::<F>(n_clll, spec.m, &spec.parts)?;
        (Some(cmp.sz), Some(cmp.clll_asymptotic))
    } else {
        (None, None)
    };
    let fail = &all - &proper;
    Ok(BoundReport {
        spec: FamilySpec::Shf(spec.clone()),
        a_n: s_n,
        d_m: ln_inv_q,
        n_clll,
        n_lll: None,
        n_expurgation,
        sz_max_columns: sz,
        clll_asymptotic_max_columns: asymptotic,
        q: Some(BigRational::new(BigInt::from(fail), BigInt::from(all))),
        log_phi_prime: numerator.log_phi_prime,
        m_w,
        attained: numerator.attained,
    })
}

/// Report for either family.
pub fn min_rows_report<F: Real>(spec: &FamilySpec) -> Result<BoundReport<F>> {
    match spec {
        FamilySpec::Phf(s) => phf_min_rows(s),
        FamilySpec::Shf(s) => shf_min_rows(s),
    }
}

/// `L_n(w) = ln[e (C(n,w) − C(n−w,w))]`.
pub fn l_n_w<F: Real>(spec: &PhfSpec) -> F {
    let (n, w) = (spec.n as u64, spec.w as i64);
    let intersecting = binomial(n, w) - binomial(n - w as u64, w);
    F::one() + ln_big::<F>(&intersecting)
}

/// `E_n(w) = ln C(2n, w) − ln n`.
pub fn e_n_w<F: Real>(spec: &PhfSpec) -> F {
    ln_big::<F>(&binomial(2 * spec.n as u64, spec.w as i64)) - F::of_usize(spec.n).ln()
}

/// `F_n(w) = ln C(2n, w_1) + ln C(2n − w_1, w_2) − ln n` for two-part families.
pub fn f_n_w<F: Real>(spec: &ShfSpec) -> Result<F> {
    if spec.s() != 2 {
        return Err(Error::PartCount {
            expected: 2,
            got: spec.s(),
        });
    }
    let two_n = 2 * spec.n as u64;
    let (w1, w2) = (spec.parts[0] as u64, spec.parts[1] as i64);
    Ok(
        ln_big::<F>(&binomial(two_n, w1 as i64)) + ln_big::<F>(&binomial(two_n - w1, w2))
            - F::of_usize(spec.n).ln(),
    )
}

pub fn lll_phf_bound<F: Real>(spec: &PhfSpec) -> Result<u64> {
    Ok(min_rows(l_n_w::<F>(spec) / d_m_w::<F>(spec.m, spec.w)?))
}

pub fn expurgation_phf_bound<F: Real>(spec: &PhfSpec) -> Result<u64> {
    Ok(min_rows(e_n_w::<F>(spec) / d_m_w::<F>(spec.m, spec.w)?))
}

pub fn expurgation_shf_bound<F: Real>(spec: &ShfSpec) -> Result<u64> {
    let numerator = f_n_w::<F>(spec)?;
    let (proper, all) = separation_counts(&spec.parts, spec.m)?;
    Ok(min_rows(numerator / neg_ln_complement::<F>(&proper, &all)))
}

fn require_attained(spec: &PhfSpec) -> Result<()> {
    if spec.n < 2 * spec.w {
        return Err(Error::Degenerate {
            n: spec.n,
            w: spec.w,
        });
    }
    Ok(())
}

/// `Δ_n(w) = E_n(w) − A_n(w)` from its expanded form
/// `ln(2^w/w) + Σ_{0<j<w} ln((1 − j/2n)/(1 − w/n)) − ln φ′(τ)`.
/// Positive values mean the cluster-expansion bound is the smaller one.
pub fn delta_n<F: Real>(spec: &PhfSpec) -> Result<F> {
    require_attained(spec)?;
    let log_phi_prime = a_n_w::<F>(spec)?
        .log_phi_prime
        .expect("n ≥ 2w leaves outer columns");
    let (n, w) = (F::of_usize(spec.n), F::of_usize(spec.w));
    let shrink = (-(w / n)).ln_1p();
    let sum = (1..spec.w).fold(F::zero(), |acc, j| {
        acc + (-(F::of_usize(j) / (F::of(2.0) * n))).ln_1p() - shrink
    });
    Ok(w * F::LN_2() - w.ln() + sum - log_phi_prime)
}

/// `E_n(w) − A_n(w)` by direct subtraction.
pub fn delta_n_by_difference<F: Real>(spec: &PhfSpec) -> Result<F> {
    require_attained(spec)?;
    Ok(e_n_w::<F>(spec) - a_n_w::<F>(spec)?.value)
}

/// Largest column counts admitted by two existence results for `SHF(N; n, m, {w_1, w_2})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SzComparison {
    /// `⌊(1 − 1/C_w) (1/q)^{N/(w−1)}⌋`.
    pub sz: BigCount,
    /// `⌊(C_w/w²)^{1/(w−1)} (w−1)/w (1/q)^{N/(w−1)}⌋`, the cluster-expansion bound with
    /// `φ′(τ)` replaced by its large-`n` limit.
    pub clll_asymptotic: BigCount,
}

pub fn sz_max_columns<F: Real>(rows: u64, m: u64, parts: &[usize]) -> Result<SzComparison> {
    if parts.len() != 2 {
        return Err(Error::PartCount {
            expected: 2,
            got: parts.len(),
        });
    }
    let (w1, w2) = (parts[0], parts[1]);
    let w = w1 + w2;
    let (proper, all) = separation_counts(parts, m)?;
    let ln_inv_q: F = neg_ln_complement(&proper, &all);

    let mut c_w = factorial(w1 as u64) * factorial(w2 as u64);
    if w1 == w2 {
        c_w *= 2u32;
    }
    let ln_c: F = ln_big(&c_w);
    let wm1 = F::of_usize(w - 1);
    let growth = F::of(rows as f64) / wm1 * ln_inv_q;

    let ln_sz = (-(-ln_c).exp()).ln_1p() + growth;
    let ln_clll =
        (ln_c - F::of(2.0) * F::of_usize(w).ln()) / wm1 + (wm1 / F::of_usize(w)).ln() + growth;
    Ok(SzComparison {
        sz: floor_exp(ln_sz),
        clll_asymptotic: floor_exp(ln_clll),
    })
}

/// Which bound is smaller as `n → ∞` for fixed `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticWinner {
    Clll,
    Expurgation,
}

/// The cluster-expansion bound wins asymptotically iff
/// `2 ln w + (w−1) ln(1 + 1/(w−1)) < w ln 2`, i.e. for `w ≥ 7`.
pub fn asymptotic_winner(w: usize) -> AsymptoticWinner {
    let wf = w as f64;
    let lhs = 2.0 * wf.ln() + (wf - 1.0) * (1.0 / (wf - 1.0)).ln_1p();
    if lhs < wf * std::f64::consts::LN_2 {
        AsymptoticWinner::Clll
    } else {
        AsymptoticWinner::Expurgation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phf(n: usize, m: u64, w: usize) -> PhfSpec {
        PhfSpec::new(n, m, w).unwrap()
    }

    fn big(x: u64) -> BigCount {
        BigCount::from(x)
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn shf_spec_validation() {
        assert!(ShfSpec::new(4, 4, vec![2]).is_err());
        assert!(ShfSpec::new(4, 4, vec![2, 0]).is_err());
        assert!(ShfSpec::new(2, 4, vec![2, 1]).is_err());
        assert!(ShfSpec::new(4, 1, vec![1, 1]).is_err());
        let s = ShfSpec::new(8, 4, vec![1, 2]).unwrap();
        assert_eq!(s.parts, vec![2, 1]);
        assert_eq!(s.w(), 3);
    }

    #[test]
    fn d_m_w_values() {
        assert!((d_m_w::<f64>(4, 2).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert!((d_m_w::<f64>(4, 4).unwrap() - (256.0f64 / 232.0).ln()).abs() < 1e-12);
        assert!(matches!(
            d_m_w::<f64>(2, 3),
            Err(Error::AlphabetTooSmall { m: 2, w: 3 })
        ));
    }

    #[test]
    fn min_rows_rounding() {
        assert_eq!(min_rows(56.81f64), 57);
        assert_eq!(min_rows(57.0f64), 57);
        assert_eq!(min_rows(57.000_000_000_01f64), 57);
        assert_eq!(min_rows(0.0f64), 1);
    }

    #[test]
    fn phf_small_bound() {
        let r = phf_min_rows::<f64>(&phf(4, 4, 2)).unwrap();
        assert_eq!(r.n_clll, 2);
        assert_eq!(r.n_lll, Some(2));
        assert!(r.attained);
        assert_eq!(r.n_clll, min_rows(r.a_n / r.d_m));
    }

    #[test]
    fn phf_degenerate_bound_uses_supremum() {
        let r = phf_min_rows::<f64>(&phf(5, 5, 3)).unwrap();
        assert!(!r.attained);
        assert!((r.a_n - 10f64.ln()).abs() < 1e-14);
        let r = phf_min_rows::<f64>(&phf(3, 3, 3)).unwrap();
        assert_eq!(r.a_n, 0.0);
        assert_eq!(r.n_clll, 1);
        assert_eq!(r.log_phi_prime, None);
    }

    #[test]
    fn chromatic_values() {
        assert_eq!(chromatic_multipartite(&[1, 1], 3), big(6));
        assert_eq!(chromatic_multipartite(&[2, 1], 3), big(12));
        for m in 0..8 {
            assert_eq!(
                chromatic_multipartite(&[1, 1, 1], m),
                falling_factorial(m, 3)
            );
        }
        assert_eq!(chromatic_multipartite(&[2, 2], 2), big(2));
    }

    #[test]
    fn q_values() {
        assert_eq!(
            q_shf(&ShfSpec::new(4, 4, vec![1, 1]).unwrap()).unwrap(),
            rat(1, 4)
        );
        assert_eq!(
            q_shf(&ShfSpec::new(4, 3, vec![2, 1]).unwrap()).unwrap(),
            rat(5, 9)
        );
        assert!(matches!(
            q_shf(&ShfSpec::new(4, 2, vec![1, 1, 1]).unwrap()),
            Err(Error::NoSeparatingRow { m: 2 })
        ));
    }

    #[test]
    fn shf_small_bound_matches_phf() {
        let s = shf_min_rows::<f64>(&ShfSpec::new(4, 4, vec![1, 1]).unwrap()).unwrap();
        assert_eq!(s.n_clll, 2);
        let p = phf_min_rows::<f64>(&phf(4, 4, 2)).unwrap();
        assert_eq!(s.a_n, p.a_n);
        assert_eq!(s.d_m, p.d_m);
    }

    #[test]
    fn lll_small() {
        let s = phf(4, 4, 2);
        assert!((l_n_w::<f64>(&s) - (1.0 + 5f64.ln())).abs() < 1e-14);
        assert_eq!(lll_phf_bound::<f64>(&s).unwrap(), 2);
    }

    #[test]
    fn expurgation_shf_small() {
        let s = ShfSpec::new(10, 4, vec![1, 1]).unwrap();
        assert!((f_n_w::<f64>(&s).unwrap() - 38f64.ln()).abs() < 1e-13);
        assert_eq!(expurgation_shf_bound::<f64>(&s).unwrap(), 3);
        let three = ShfSpec::new(10, 4, vec![1, 1, 1]).unwrap();
        assert!(matches!(
            expurgation_shf_bound::<f64>(&three),
            Err(Error::PartCount {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn expurgation_numerators_agree_for_singletons() {
        // C(2n,1)·C(2n−1,1) = C(2n,2)·2!
        let s = ShfSpec::new(10, 4, vec![1, 1]).unwrap();
        let f = f_n_w::<f64>(&s).unwrap();
        let e = e_n_w::<f64>(&phf(10, 4, 2));
        assert!((f - (e + 2f64.ln())).abs() < 1e-13);
    }

    #[test]
    fn delta_routes_agree() {
        for (n, w) in [(10, 4), (50, 4), (90, 6), (200, 6), (1000, 7)] {
            let s = phf(n, w as u64, w);
            let a = delta_n::<f64>(&s).unwrap();
            let b = delta_n_by_difference::<f64>(&s).unwrap();
            assert!((a - b).abs() < 1e-8, "n={n} w={w}: {a} vs {b}");
        }
        assert!(matches!(
            delta_n::<f64>(&phf(5, 3, 3)),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn sz_small() {
        // q = 1/4, C_w = 2: ⌊(1/2)·4^{4/1}⌋
        let c = sz_max_columns::<f64>(4, 4, &[1, 1]).unwrap();
        assert_eq!(c.sz, big(128));
        assert!(sz_max_columns::<f64>(4, 4, &[1, 1, 1]).is_err());
    }

    #[test]
    fn winner_threshold() {
        assert_eq!(asymptotic_winner(2), AsymptoticWinner::Expurgation);
        assert_eq!(asymptotic_winner(6), AsymptoticWinner::Expurgation);
        assert_eq!(asymptotic_winner(7), AsymptoticWinner::Clll);
    }
}
