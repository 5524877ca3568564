//! Independent-set counts of the perfect-hash dependency graph and the
//! stationary point of the cluster-expansion polynomial.
//!
//! Two bad events `E_W`, `E_W'` are adjacent iff `W ∩ W' ≠ ∅`, so every
//! vertex neighbourhood looks alike. `Γ_k(w, n)` counts the families of `k`
//! pairwise disjoint `w`-subsets of `[n]` that each meet a fixed `w`-subset
//! `W` (with `W` itself allowed). With a uniform weight `μ` the local lemma
//! denominator becomes
//!
//! ```text
//! Ψ(μ) = 1 + Σ_{k=1}^{K} Γ_k μ^k,        K = min(⌊n/w⌋, w)
//! ```
//!
//! and the best admissible per-event probability is `max_μ μ / Ψ(μ)`. The
//! rescaled polynomial `φ_{w,n}(α) = Ψ(μ)` with `α = (n−w)^{w−1}/(w−1)! · μ`
//! has coefficients `C(w,k) Γ̃_k`.
//!
//! The counts grow to thousands of bits for realistic parameters, so `Γ_k`
//! is kept exact and the optimisation runs on `t = ln μ` with log-sum-exp.

use num_traits::Zero;

use crate::combinatorics::{
    binomial, factorial, falling_factorial, shifted_binomial_powers, BigCount,
};
use crate::error::{Error, Result};
use crate::real::{ln_big, log_sum_exp, Real};

/// Parameters `(n, m, w)` of a perfect hash family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhfSpec {
    pub n: usize,
    pub m: u64,
    pub w: usize,
}

impl PhfSpec {
    pub fn new(n: usize, m: u64, w: usize) -> Result<Self> {
        if w < 2 {
            return Err(Error::InvalidSpec(format!("w = {w} must be at least 2")));
        }
        if w > n {
            return Err(Error::InvalidSpec(format!("w = {w} exceeds n = {n}")));
        }
        if m < 2 {
            return Err(Error::InvalidSpec(format!(
                "alphabet size m = {m} must be at least 2"
            )));
        }
        Ok(Self { n, m, w })
    }

    /// Number of nontrivial coefficients of `Ψ`.
    pub fn degree(&self) -> usize {
        (self.n / self.w).min(self.w)
    }

    fn check_k(&self, k: usize) -> Result<()> {
        let max = self.degree();
        if k == 0 || k > max {
            return Err(Error::KOutOfRange { k, max });
        }
        Ok(())
    }
}

/// `ln((n−w)^{w−1} / (w−1)!)`, the scale between the `μ` and `α` variables.
/// `None` when `n = w`.
pub fn log_alpha_scale<F: Real>(w: usize, n: usize) -> Option<F> {
    (n > w).then(|| {
        F::of_usize(w - 1) * F::of_usize(n - w).ln() - ln_big::<F>(&factorial(w as u64 - 1))
    })
}

fn gamma_with_power(w: usize, n: usize, k: usize, power: &[BigCount]) -> Result<BigCount> {
    let outer = (n - w) as u64;
    let base = ((k - 1) * w) as u64;
    let w_fact = factorial(w as u64);
    let mut ff = falling_factorial(outer, base);
    let mut total = BigCount::zero();
    // i0 counts the elements of W left uncovered by the family.
    for i0 in 0..=(w - k) {
        if i0 > 0 {
            let taken = base + i0 as u64 - 1;
            if taken >= outer {
                break;
            }
            ff *= outer - taken;
        }
        if ff.is_zero() {
            break;
        }
        let w_over_i0 = falling_factorial(w as u64, (w - i0) as u64);
        total += w_over_i0 * &ff * &power[w - i0];
    }
    let denominator = factorial(k as u64) * w_fact.pow(k as u32);
    let (quotient, remainder) = num_integer::Integer::div_rem(&total, &denominator);
    if !remainder.is_zero() {
        return Err(Error::InexactDivision(format!("Γ_{k}(w = {w}, n = {n})")));
    }
    Ok(quotient)
}

/// Exact `Γ_k(w, n)`.
pub fn gamma_k(spec: &PhfSpec, k: usize) -> Result<BigCount> {
    spec.check_k(k)?;
    let power = shifted_binomial_powers(spec.w as u64, spec.w)
        .nth(k - 1)
        .expect("power iterator is infinite");
    gamma_with_power(spec.w, spec.n, k, &power)
}

/// `Γ̃_k(w, n)` evaluated from its own double-sum representation, independently of
/// [`gamma_k`]. Summed in the log domain so long products cannot underflow midway.
pub fn gamma_tilde<F: Real>(spec: &PhfSpec, k: usize) -> Result<F> {
    spec.check_k(k)?;
    let (w, n) = (spec.w, spec.n);
    if n == w {
        return Err(Error::NoOuterColumns { n });
    }
    let outer = F::of_usize(n - w);
    let wf = F::of_usize(w);
    let cap = w - k;

    // g(z) = Σ_i z^i / ((i+1) i!) ∏_{s=1}^{i} (1 − s/w)
    let mut g = Vec::with_capacity(cap + 1);
    let mut h = F::one();
    for i in 0..=cap {
        if i > 0 {
            h = h * (F::one() - F::of_usize(i) / wf) / F::of_usize(i);
        }
        g.push(h / F::of_usize(i + 1));
    }
    let mut power = vec![F::zero(); cap + 1];
    power[0] = F::one();
    for _ in 0..k {
        let mut next = vec![F::zero(); cap + 1];
        for (i, &a) in power.iter().enumerate() {
            for (j, &b) in g.iter().enumerate().take(cap + 1 - i) {
                next[i + j] = next[i + j] + a * b;
            }
        }
        power = next;
    }

    let mut terms = Vec::with_capacity(cap + 1);
    let mut ln_j_fact = F::zero();
    for (j, &coeff) in power.iter().enumerate() {
        if j > 0 {
            ln_j_fact = ln_j_fact + F::of_usize(j).ln();
        }
        if coeff <= F::zero() {
            continue;
        }
        let upper = (k * (w - 1)) as i64 - j as i64 - 1;
        if upper >= (n - w) as i64 {
            // the product hits the factor ℓ = n − w
            continue;
        }
        let ln_prod = (1..=upper.max(0)).fold(F::zero(), |acc, l| {
            acc + (-(F::of(l as f64) / outer)).ln_1p()
        });
        let ln_binom = ln_big::<F>(&binomial((w - k) as u64, j as i64));
        terms
            .push(ln_binom + ln_prod + F::of_usize(j) * (wf / outer).ln() + ln_j_fact + coeff.ln());
    }
    Ok(log_sum_exp(terms).exp())
}

/// `Ψ(μ) = 1 + Σ Γ_k μ^k` for one `(w, n)`, exact coefficients plus their logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPolynomial<F> {
    pub w: usize,
    pub n: usize,
    pub gammas: Vec<BigCount>,
    pub log_gammas: Vec<F>,
}

pub fn build_cluster_polynomial<F: Real>(spec: &PhfSpec) -> Result<ClusterPolynomial<F>> {
    let (w, n) = (spec.w, spec.n);
    let gammas = shifted_binomial_powers(w as u64, w)
        .take(spec.degree())
        .enumerate()
        .map(|(i, power)| gamma_with_power(w, n, i + 1, &power))
        .collect::<Result<Vec<_>>>()?;
    let log_gammas = gammas.iter().map(ln_big).collect();
    Ok(ClusterPolynomial {
        w,
        n,
        gammas,
        log_gammas,
    })
}

impl<F: Real> ClusterPolynomial<F> {
    /// `K`, the number of nontrivial coefficients.
    pub fn degree(&self) -> usize {
        self.gammas.len()
    }

    /// `ln Ψ(e^t)`.
    pub fn log_psi(&self, t: F) -> F {
        let terms = self
            .log_gammas
            .iter()
            .enumerate()
            .map(|(i, &lg)| lg + F::of_usize(i + 1) * t);
        log_sum_exp(std::iter::once(F::zero()).chain(terms).collect::<Vec<_>>())
    }

    /// `ln Σ_{k≥2} (k−1) Γ_k e^{kt}`; the stationary point is where this crosses zero.
    fn log_excess(&self, t: F) -> F {
        let terms: Vec<F> = self
            .log_gammas
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &lg)| F::of_usize(i).ln() + lg + F::of_usize(i + 1) * t)
            .collect();
        log_sum_exp(terms)
    }

    /// `Ψ(μ) − μΨ′(μ) = 1 − Σ_{k≥2} (k−1) Γ_k μ^k`.
    pub fn stationary_residual(&self, mu: F) -> F {
        F::one() - self.log_excess(mu.ln()).exp()
    }

    /// `ln Ψ′(e^t)`.
    pub fn log_psi_prime(&self, t: F) -> F {
        let terms: Vec<F> = self
            .log_gammas
            .iter()
            .enumerate()
            .map(|(i, &lg)| F::of_usize(i + 1).ln() + lg + F::of_usize(i) * t)
            .collect();
        log_sum_exp(terms)
    }
}

/// The maximiser of `μ / Ψ(μ)` on `μ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint<F> {
    pub mu_star: F,
    pub log_mu_star: F,
    /// `ln(μ* / Ψ(μ*))`.
    pub log_max_ratio: F,
    /// Final `ln μ` bracket; the residual is positive at the left end and negative at the right.
    pub bracket: (F, F),
}

/// Bisection on `t = ln μ`. The excess `Σ_{k≥2}(k−1)Γ_k μ^k` is strictly increasing, so
/// the root is unique.
pub fn solve_stationary_point<F: Real>(poly: &ClusterPolynomial<F>) -> Result<StationaryPoint<F>> {
    if poly.degree() < 2 {
        return Err(Error::Degenerate {
            n: poly.n,
            w: poly.w,
        });
    }
    let ln_k = F::of_usize(poly.degree()).ln();
    let coeffs: Vec<(F, F)> = poly
        .log_gammas
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &lg)| (F::of_usize(i + 1), F::of_usize(i).ln() + lg))
        .collect();
    // At `hi` one term alone reaches 1; at `lo` every term is below 1/K.
    let mut hi = coeffs
        .iter()
        .map(|&(k, c)| -c / k)
        .fold(F::infinity(), F::min);
    let mut lo = coeffs
        .iter()
        .map(|&(k, c)| (-c - ln_k) / k)
        .fold(F::infinity(), F::min)
        - F::one();
    debug_assert!(poly.log_excess(lo) < F::zero() && poly.log_excess(hi) >= F::zero());

    let two = F::of(2.0);
    for _ in 0..4096 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if poly.log_excess(mid) < F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (lo + hi) / two;
    Ok(StationaryPoint {
        mu_star: t.exp(),
        log_mu_star: t,
        log_max_ratio: t - poly.log_psi(t),
        bracket: (lo, hi),
    })
}

/// Numerator `A_n(w)` of the perfect-hash bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterNumerator<F> {
    /// `A_n(w) = −ln max_μ μ/Ψ(μ)`, or `ln Γ_1` when the supremum is not attained.
    pub value: F,
    /// `false` for `n < 2w`, where `μ/Ψ(μ)` increases towards `1/Γ_1` without reaching it.
    pub attained: bool,
    /// `ln φ′_{w,n}(τ)`; `None` when `n = w`.
    pub log_phi_prime: Option<F>,
    pub mu_star: Option<F>,
}

pub fn a_n_w_from<F: Real>(poly: &ClusterPolynomial<F>) -> Result<ClusterNumerator<F>> {
    let scale = log_alpha_scale::<F>(poly.w, poly.n);
    if poly.degree() < 2 {
        let value = poly.log_gammas[0];
        return Ok(ClusterNumerator {
            value,
            attained: false,
            log_phi_prime: scale.map(|s| value - s),
            mu_star: None,
        });
    }
    let point = solve_stationary_point(poly)?;
    let value = -point.log_max_ratio;
    Ok(ClusterNumerator {
        value,
        attained: true,
        log_phi_prime: scale.map(|s| value - s),
        mu_star: Some(point.mu_star),
    })
}

pub fn a_n_w<F: Real>(spec: &PhfSpec) -> Result<ClusterNumerator<F>> {
    a_n_w_from(&build_cluster_polynomial::<F>(spec)?)
}

/// `lim_{n→∞} φ′_{w,n}(τ) = w (1 + 1/(w−1))^{w−1}`.
pub fn phi_prime_limit<F: Real>(w: usize) -> F {
    let wf = F::of_usize(w);
    let e = F::of_usize(w - 1);
    wf * (F::one() + F::one() / e).powf(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, w: usize) -> PhfSpec {
        PhfSpec::new(n, w as u64, w).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(PhfSpec::new(4, 4, 1).is_err());
        assert!(PhfSpec::new(3, 4, 4).is_err());
        assert!(PhfSpec::new(4, 1, 2).is_err());
        assert_eq!(PhfSpec::new(10, 4, 4).unwrap().degree(), 2);
        assert_eq!(PhfSpec::new(1000, 50, 8).unwrap().degree(), 8);
    }

    #[test]
    fn gamma_small_values() {
        assert_eq!(gamma_k(&spec(4, 2), 1).unwrap(), BigCount::from(5u32));
        assert_eq!(gamma_k(&spec(4, 2), 2).unwrap(), BigCount::from(2u32));
        assert!(matches!(
            gamma_k(&spec(4, 2), 3),
            Err(Error::KOutOfRange { k: 3, max: 2 })
        ));
        assert!(gamma_k(&spec(4, 2), 0).is_err());
    }

    #[test]
    fn gamma_one_counts_intersecting_subsets() {
        for (n, w) in [(5, 2), (9, 3), (40, 5), (1000, 8)] {
            let s = spec(n, w);
            let expected = binomial(n as u64, w as i64) - binomial((n - w) as u64, w as i64);
            assert_eq!(gamma_k(&s, 1).unwrap(), expected);
        }
    }

    #[test]
    fn polynomial_shapes() {
        let p = build_cluster_polynomial::<f64>(&spec(4, 2)).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.gammas, vec![BigCount::from(5u32), BigCount::from(2u32)]);
        let p = build_cluster_polynomial::<f64>(&spec(5, 2)).unwrap();
        assert_eq!(p.gammas[0], BigCount::from(7u32));
        let p = build_cluster_polynomial::<f64>(&spec(3, 3)).unwrap();
        assert_eq!(p.gammas, vec![BigCount::from(1u32)]);
    }

    #[test]
    fn log_gammas_track_exact_values() {
        let p = build_cluster_polynomial::<f64>(&PhfSpec::new(1000, 50, 50).unwrap()).unwrap();
        assert_eq!(p.degree(), 20);
        for (g, lg) in p.gammas.iter().zip(&p.log_gammas) {
            assert!(!g.is_zero());
            let bits = g.bits() as f64;
            // ln g lies within one bit of its bit length
            assert!((lg / std::f64::consts::LN_2 - bits).abs() <= 1.0);
        }
    }

    #[test]
    fn gamma_tilde_small_values() {
        let t: f64 = gamma_tilde(&spec(4, 2), 1).unwrap();
        assert!((t - 1.25).abs() < 1e-15);
        let t: f64 = gamma_tilde(&spec(4, 2), 2).unwrap();
        assert!((t - 0.5).abs() < 1e-15);
        assert!(matches!(
            gamma_tilde::<f64>(&spec(3, 3), 1),
            Err(Error::NoOuterColumns { .. })
        ));
    }

    #[test]
    fn stationary_point_w2_n4() {
        let p = build_cluster_polynomial::<f64>(&spec(4, 2)).unwrap();
        let sp = solve_stationary_point(&p).unwrap();
        assert!((sp.mu_star - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        // ln(μ*/Ψ(μ*)) with Ψ(μ*) = 2 + 5/√2
        let expected = (std::f64::consts::FRAC_1_SQRT_2 / (2.0 + 5.0 / 2f64.sqrt())).ln();
        assert!((sp.log_max_ratio - expected).abs() < 1e-12);
        assert!(p.stationary_residual(sp.mu_star).abs() < 1e-9);
    }

    #[test]
    fn degenerate_polynomial_is_rejected_by_solver() {
        let p = build_cluster_polynomial::<f64>(&spec(5, 3)).unwrap();
        assert!(matches!(
            solve_stationary_point(&p),
            Err(Error::Degenerate { .. })
        ));
        let a = a_n_w::<f64>(&spec(5, 3)).unwrap();
        assert!(!a.attained);
        assert!((a.value - 10f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn a_n_w_closed_form_w2_n4() {
        let a = a_n_w::<f64>(&spec(4, 2)).unwrap();
        assert!(a.attained);
        // ln φ′(τ) + ln 2 with φ′(τ) = 2.5 + √2
        let closed = (2.5 + 2f64.sqrt()).ln() + 2f64.ln();
        assert!((a.value - closed).abs() < 1e-12);
        assert!((a.log_phi_prime.unwrap() - (2.5 + 2f64.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn phi_prime_limit_values() {
        assert_eq!(phi_prime_limit::<f64>(2), 4.0);
        assert!((phi_prime_limit::<f64>(5) - 12.20703125).abs() < 1e-12);
        let big: f64 = phi_prime_limit(100_000);
        assert!((big / 100_000.0 - std::f64::consts::E).abs() < 1e-4);
    }

    #[test]
    fn generic_over_f32() {
        let a = a_n_w::<f32>(&spec(4, 2)).unwrap();
        assert!((a.value - 2.057_761_6).abs() < 1e-5);
    }
}
