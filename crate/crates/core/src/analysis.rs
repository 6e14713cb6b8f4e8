//! Exact binomial computations for threshold selection, analytic soundness
//! curves, and parameter-sweep tables.
//!
//! Tails and mass functions are computed by direct term recurrences in
//! linear space with power-of-two rescaling, never through normal
//! approximations, so desk-scale parameters get results accurate to a few
//! hundred ulp.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "no threshold on the 0.01 grid reaches completeness {target} at N={n} \
         (best failure probability {best_failure})"
    )]
    InfeasibleTarget {
        n: u32,
        target: f64,
        best_failure: f64,
    },
}

fn domain(msg: impl Into<String>) -> AnalysisError {
    AnalysisError::Domain(msg.into())
}

/// Per-qubit success probability of the optimal single-angle projective
/// cheating measurement (the 45° Breidbart-type measurement): (2 + √2)/4.
pub const BREIDBART_RATE: f64 = (2.0 + std::f64::consts::SQRT_2) / 4.0;

/// A non-negative f64 carried with a power-of-two scale so products of
/// thousands of factors survive underflow and overflow.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    value: f64,
    exp2: i32,
}

impl Scaled {
    fn one() -> Self {
        Scaled { value: 1.0, exp2: 0 }
    }

    fn mul(&mut self, f: f64) {
        self.value *= f;
        self.renorm();
    }

    fn renorm(&mut self) {
        if self.value == 0.0 {
            self.exp2 = 0;
            return;
        }
        while self.value < 1e-270 {
            self.value *= 2f64.powi(512);
            self.exp2 -= 512;
        }
        while self.value > 1e270 {
            self.value *= 2f64.powi(-512);
            self.exp2 += 512;
        }
    }

    fn to_f64(self) -> f64 {
        // 2^exp2 in two steps so a representable product of an extreme pair
        // does not round through infinity or zero prematurely.
        let half = self.exp2 / 2;
        self.value * 2f64.powi(half) * 2f64.powi(self.exp2 - half)
    }
}

fn check_p(p: f64) -> Result<(), AnalysisError> {
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(domain(format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Exact upper tail P[X ≥ k] for X ~ Binomial(n, p).
pub fn binomial_tail(n: u64, k: u64, p: f64) -> Result<f64, AnalysisError> {
    check_p(p)?;
    if k > n {
        return Err(domain(format!("k = {k} exceeds n = {n}")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let q = 1.0 - p;

    // First term C(n, k) p^k q^(n-k), folding the binomial coefficient and
    // the p powers together to keep the running product tame.
    let mut term = Scaled::one();
    for j in 1..=k {
        term.mul((n - k + j) as f64 / j as f64);
        term.mul(p);
    }
    for _ in 0..(n - k) {
        term.mul(q);
    }

    // Sum upward on a shared power-of-two scale; terms beyond the mode
    // decay geometrically, so stop once they cannot move the running sum.
    let mode = ((n + 1) as f64 * p).floor() as u64;
    let ratio = p / q;
    let mut exp2 = term.exp2;
    let mut sum_v = term.value;
    let mut t_v = term.value;
    let mut i = k;
    while i < n {
        i += 1;
        t_v *= (n - i + 1) as f64 / i as f64 * ratio;
        sum_v += t_v;
        if sum_v > 1e270 {
            sum_v *= 2f64.powi(-512);
            t_v *= 2f64.powi(-512);
            exp2 += 512;
        }
        if i > mode && t_v < sum_v * 1e-20 {
            break;
        }
    }
    let sum = Scaled {
        value: sum_v,
        exp2,
    };
    Ok(sum.to_f64().min(1.0))
}

/// Full probability mass function of Binomial(n, p) as a vector indexed by
/// the count. Entries below f64 range underflow to zero.
pub fn binomial_pmf_all(n: u64, p: f64) -> Result<Vec<f64>, AnalysisError> {
    check_p(p)?;
    let len = n as usize + 1;
    if p == 0.0 {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return Ok(v);
    }
    if p == 1.0 {
        let mut v = vec![0.0; len];
        v[n as usize] = 1.0;
        return Ok(v);
    }
    let q = 1.0 - p;
    let ratio = p / q;
    let mut out = vec![0.0; len];
    let mut term = Scaled::one();
    for _ in 0..n {
        term.mul(q);
    }
    out[0] = term.to_f64();
    let mut t = term;
    for m in 0..n {
        t.mul((n - m) as f64 / (m + 1) as f64 * ratio);
        out[m as usize + 1] = t.to_f64();
    }
    Ok(out)
}

/// Largest mismatch count that still passes `count / total ≤ tau`, using
/// the same floating-point comparison as the verifier.
pub fn max_passing_mismatches(total: u64, tau: f64) -> u64 {
    let mut k = (tau * total as f64).floor() as i64;
    k = k.clamp(0, total as i64);
    let mut k = k as u64;
    while k < total && (k + 1) as f64 / total as f64 <= tau {
        k += 1;
    }
    while k > 0 && k as f64 / total as f64 > tau {
        k -= 1;
    }
    k
}

/// Smallest mismatch count that reaches `count / total ≥ rho`; returns
/// `total + 1` when no count does.
pub fn min_rejecting_mismatches(total: u64, rho: f64) -> u64 {
    let mut k = (rho * total as f64).ceil() as i64;
    k = k.clamp(0, total as i64 + 1);
    let mut k = k as u64;
    while k > 0 && (k - 1) as f64 / total as f64 >= rho {
        k -= 1;
    }
    while k <= total && (k as f64 / total as f64) < rho {
        k += 1;
    }
    k
}

/// Probability that an honest run fails the same-basis acceptance check at
/// threshold `tau`, accounting for the random same-basis count (binomial
/// N/2 split thinned by detection). A run with zero same-basis qubits
/// cannot be accepted and counts as a failure.
pub fn completeness_failure_prob(n: u32, e: f64, eta: f64, tau: f64) -> Result<f64, AnalysisError> {
    if n < 1 {
        return Err(domain("n must be at least 1"));
    }
    if !(e.is_finite() && (0.0..0.5).contains(&e)) {
        return Err(domain(format!("e must lie in [0, 0.5), got {e}")));
    }
    if !(eta.is_finite() && eta > 0.0 && eta <= 1.0) {
        return Err(domain(format!("eta must lie in (0, 1], got {eta}")));
    }
    if !(tau.is_finite() && (0.0..0.5).contains(&tau)) {
        return Err(domain(format!("tau must lie in [0, 0.5), got {tau}")));
    }
    let weights = binomial_pmf_all(n as u64, eta / 2.0)?;
    let mut failure = 0.0;
    for (m, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let fail_given_m = if m == 0 {
            1.0
        } else {
            let k_pass = max_passing_mismatches(m as u64, tau);
            if k_pass >= m as u64 {
                0.0
            } else {
                binomial_tail(m as u64, k_pass + 1, e)?
            }
        };
        failure += w * fail_given_m;
    }
    Ok(failure.min(1.0))
}

/// Exact acceptance probability of an honest run under the full verifier:
/// same-basis mismatch bound, conjugate-basis rejection bound, and the
/// minimum same-basis count, jointly over the random basis/detection split.
pub fn honest_acceptance_prob(
    n: u32,
    e: f64,
    eta: f64,
    tau: f64,
    rho: f64,
    min_same_basis: u32,
) -> Result<f64, AnalysisError> {
    if n < 1 {
        return Err(domain("n must be at least 1"));
    }
    check_p(eta)?;
    if eta == 0.0 {
        return Err(domain("eta must be positive"));
    }
    check_p(e)?;
    check_p(tau)?;
    check_p(rho)?;

    let n = n as u64;
    // Same-basis pass probability for every possible same-basis count.
    let mut pass_same = vec![0.0; n as usize + 1];
    for (s, slot) in pass_same.iter_mut().enumerate() {
        if (s as u64) < min_same_basis as u64 || s == 0 {
            continue;
        }
        let k_pass = max_passing_mismatches(s as u64, tau);
        *slot = if k_pass >= s as u64 {
            1.0
        } else {
            1.0 - binomial_tail(s as u64, k_pass + 1, e)?
        };
    }
    // Conjugate-basis rejection probability: honest outcomes on conjugate
    // preparations are uniform, noise included.
    let mut pass_conj = vec![0.0; n as usize + 1];
    for (c, slot) in pass_conj.iter_mut().enumerate() {
        if c == 0 {
            continue;
        }
        let k_min = min_rejecting_mismatches(c as u64, rho);
        *slot = if k_min > c as u64 {
            0.0
        } else {
            binomial_tail(c as u64, k_min, 0.5)?
        };
    }

    // Per qubit: same-basis detected with eta/2, conjugate detected with
    // eta/2, undetected otherwise.
    let p_cat = eta / 2.0;
    let same_weights = binomial_pmf_all(n, p_cat)?;
    let mut accept = 0.0;
    for (s, &ws) in same_weights.iter().enumerate() {
        if ws == 0.0 || pass_same[s] == 0.0 {
            continue;
        }
        let rest = n - s as u64;
        // Conditional detection-category probability among the rest.
        let p_conj = if (1.0 - p_cat) > 0.0 {
            p_cat / (1.0 - p_cat)
        } else {
            1.0
        };
        if rest == 0 {
            continue; // no conjugate qubits possible
        }
        let conj_weights = binomial_pmf_all(rest, p_conj)?;
        let mut inner = 0.0;
        for (c, &wc) in conj_weights.iter().enumerate() {
            if wc == 0.0 {
                continue;
            }
            inner += wc * pass_conj[c.min(n as usize)];
        }
        accept += ws * pass_same[s] * inner;
    }
    Ok(accept.clamp(0.0, 1.0))
}

/// A feasible operating point produced by `plan_thresholds`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPlan {
    pub n: u32,
    pub e: f64,
    pub eta: f64,
    pub tau_accept: f64,
    pub rho_reject: f64,
    pub completeness_failure_prob: f64,
    /// Breidbart-rate bound at the expected same-basis count N·eta/2.
    pub strict_soundness_bound: f64,
}

/// Select the smallest `tauAccept` on a 0.01 grid whose completeness
/// failure probability fits the target, and place `rhoReject` midway
/// between it and 1/2.
pub fn plan_thresholds(
    n: u32,
    e: f64,
    eta: f64,
    target_completeness: f64,
) -> Result<ThresholdPlan, AnalysisError> {
    if !(target_completeness.is_finite() && target_completeness > 0.0 && target_completeness < 1.0)
    {
        return Err(domain(format!(
            "target completeness must lie in (0, 1), got {target_completeness}"
        )));
    }
    let budget = 1.0 - target_completeness;
    let mut best_failure = f64::INFINITY;
    for step in 0..50u32 {
        let tau = step as f64 * 0.01;
        let failure = completeness_failure_prob(n, e, eta, tau)?;
        best_failure = best_failure.min(failure);
        if failure <= budget {
            return Ok(ThresholdPlan {
                n,
                e,
                eta,
                tau_accept: tau,
                rho_reject: (tau + 0.5) / 2.0,
                completeness_failure_prob: failure,
                strict_soundness_bound: BREIDBART_RATE.powf(n as f64 * eta / 2.0),
            });
        }
    }
    Err(AnalysisError::InfeasibleTarget {
        n,
        target: target_completeness,
        best_failure,
    })
}

/// One row of a soundness table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundnessPoint {
    pub n: u32,
    /// Bound counting only the expected N/2 basis-matching qubits.
    pub per_relevant_bound: f64,
    /// Bound counting all N transmitted qubits.
    pub strict_bound: f64,
}

/// Geometric decay of the cheating success bound in the security
/// parameter, in both counting conventions.
pub fn soundness_curve(n_values: &[u32], per_qubit_rate: f64) -> Result<Vec<SoundnessPoint>, AnalysisError> {
    if !(per_qubit_rate.is_finite() && per_qubit_rate > 0.0 && per_qubit_rate < 1.0) {
        return Err(domain(format!(
            "per-qubit rate must lie in (0, 1), got {per_qubit_rate}"
        )));
    }
    Ok(n_values
        .iter()
        .map(|&n| SoundnessPoint {
            n,
            per_relevant_bound: per_qubit_rate.powf(n as f64 / 2.0),
            strict_bound: per_qubit_rate.powi(n as i32),
        })
        .collect())
}

/// CSV table for a soundness curve, 6 significant digits.
pub fn soundness_curve_csv(points: &[SoundnessPoint]) -> String {
    let mut out = String::from("N,perRelevantBound,strictBound\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            p.n,
            dec6(p.per_relevant_bound),
            dec6(p.strict_bound)
        ));
    }
    out
}

/// Wilson 95%-style score interval for a binomial rate; well behaved for
/// rates near zero. Always contains the point estimate.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundary counts the exact endpoints are 0 and 1; pin them so
    // rounding dust cannot exclude the point estimate.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo.min(p), hi.max(p))
}

/// Plain decimal notation with 6 significant digits.
pub fn dec6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use rand::Rng;

    /// Arbitrary-precision reference tail: p is taken as the exact binary
    /// rational the f64 represents, so the comparison is apples to apples.
    fn exact_tail(n: u64, k: u64, p: f64) -> BigRational {
        let p = BigRational::from_float(p).expect("finite p");
        let q = BigRational::one() - p.clone();
        let mut coeff = BigInt::one();
        let mut sum = BigRational::zero();
        // C(n, i) built incrementally; add terms for i >= k.
        let mut p_pow = BigRational::one();
        let mut q_pows = vec![BigRational::one()];
        for _ in 0..n {
            q_pows.push(q_pows.last().unwrap() * q.clone());
        }
        for i in 0..=n {
            if i >= k {
                let term = BigRational::from(coeff.clone())
                    * p_pow.clone()
                    * q_pows[(n - i) as usize].clone();
                sum += term;
            }
            if i < n {
                coeff = coeff * BigInt::from(n - i) / BigInt::from(i + 1);
                p_pow *= p.clone();
            }
        }
        sum
    }

    fn rel_err(got: f64, want: &BigRational) -> f64 {
        let want_f = want.to_f64().unwrap();
        if want_f == 0.0 {
            got.abs()
        } else {
            ((got - want_f) / want_f).abs()
        }
    }

    #[test]
    fn tail_trivial_examples() {
        assert_eq!(binomial_tail(2, 1, 0.5).unwrap(), 0.75);
        assert_eq!(binomial_tail(10, 0, 0.3).unwrap(), 1.0);
        assert_eq!(binomial_tail(5, 5, 1.0).unwrap(), 1.0);
        assert_eq!(binomial_tail(5, 1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn tail_domain_errors() {
        assert!(binomial_tail(3, 4, 0.5).is_err());
        assert!(binomial_tail(3, 1, -0.1).is_err());
        assert!(binomial_tail(3, 1, 1.5).is_err());
        assert!(binomial_tail(3, 1, f64::NAN).is_err());
    }

    #[test]
    fn tail_matches_arbitrary_precision_reference() {
        let cases: [(u64, u64, f64); 7] = [
            (2, 1, 0.5),
            (10, 3, 0.3),
            (50, 20, 0.17),
            (60, 55, 0.9),
            (128, 4, 0.01),
            (500, 75, 0.05),
            (1000, 150, 0.05),
        ];
        for (n, k, p) in cases {
            let got = binomial_tail(n, k, p).unwrap();
            let want = exact_tail(n, k, p);
            assert!(
                rel_err(got, &want) < 1e-12,
                "tail({n},{k},{p}) = {got}, reference {}",
                want.to_f64().unwrap()
            );
        }
    }

    #[test]
    fn completeness_tail_example_is_tiny() {
        // Same-basis failures at N = 500 relevant qubits, e = 0.05,
        // tau = 0.15: needing more than 75 mismatches.
        let got = binomial_tail(500, 76, 0.05).unwrap();
        assert!(got < 1e-6, "tail {got}");
        let want = exact_tail(500, 76, 0.05);
        assert!(rel_err(got, &want) < 1e-12);
    }

    #[test]
    fn tail_cross_validates_against_monte_carlo() {
        let mut rng = seeded_rng(21);
        for (n, k, p) in [(20u64, 8u64, 0.3f64), (50, 30, 0.5), (40, 4, 0.1)] {
            let trials = 200_000;
            let mut hits = 0u64;
            for _ in 0..trials {
                let count = (0..n).filter(|_| rng.random::<f64>() < p).count() as u64;
                hits += (count >= k) as u64;
            }
            let freq = hits as f64 / trials as f64;
            let exact = binomial_tail(n, k, p).unwrap();
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!(
                (freq - exact).abs() <= 3.0 * sigma + 1e-9,
                "tail({n},{k},{p}): mc {freq} vs exact {exact}"
            );
        }
    }

    #[test]
    fn pmf_sums_to_one() {
        for (n, p) in [(10u64, 0.5f64), (100, 0.05), (1000, 0.5)] {
            let pmf = binomial_pmf_all(n, p).unwrap();
            let total: f64 = pmf.iter().sum();
            assert!((total - 1.0).abs() < 1e-10, "sum {total}");
        }
    }

    #[test]
    fn mismatch_cutoffs_match_fraction_comparisons() {
        for total in 1u64..=40 {
            for grid in 0..50 {
                let tau = grid as f64 * 0.01;
                let k = max_passing_mismatches(total, tau);
                assert!(k as f64 / total as f64 <= tau || k == 0);
                if k < total {
                    assert!((k + 1) as f64 / total as f64 > tau);
                }
                let rho = 0.01 + grid as f64 * 0.01;
                let k_min = min_rejecting_mismatches(total, rho);
                if k_min <= total {
                    assert!(k_min as f64 / total as f64 >= rho);
                }
                if k_min > 0 && k_min <= total {
                    assert!((k_min - 1) as f64 / (total as f64) < rho);
                }
            }
        }
    }

    /// Exhaustive enumeration over every basis split and error pattern of a
    /// 4-qubit run.
    fn enumerate_failure_n4(e: f64, tau: f64) -> f64 {
        let mut failure = 0.0;
        for split in 0u32..16 {
            let m = split.count_ones() as u64; // same-basis count
            let w_split = 1.0 / 16.0;
            if m == 0 {
                failure += w_split;
                continue;
            }
            let k_pass = max_passing_mismatches(m, tau);
            // Enumerate mismatch patterns among the m same-basis qubits.
            let mut fail_m = 0.0;
            for pattern in 0u32..(1 << m) {
                let bad = pattern.count_ones() as u64;
                let prob = e.powi(bad as i32) * (1.0 - e).powi((m - bad) as i32);
                if bad > k_pass {
                    fail_m += prob;
                }
            }
            failure += w_split * fail_m;
        }
        failure
    }

    #[test]
    fn completeness_failure_matches_exhaustive_enumeration_at_n4() {
        for tau in [0.0, 0.15, 0.3, 0.49] {
            let exact = enumerate_failure_n4(0.05, tau);
            let got = completeness_failure_prob(4, 0.05, 1.0, tau).unwrap();
            assert!(
                (got - exact).abs() < 1e-12,
                "tau {tau}: {got} vs enumerated {exact}"
            );
        }
    }

    #[test]
    fn plan_at_desk_scale_keeps_tau_at_or_below_015() {
        let plan = plan_thresholds(1000, 0.05, 1.0, 0.99).unwrap();
        assert!(plan.tau_accept <= 0.15, "tau {}", plan.tau_accept);
        assert!(plan.completeness_failure_prob <= 0.01);
        assert!(plan.tau_accept < plan.rho_reject && plan.rho_reject < 0.5);
    }

    #[test]
    fn plan_with_no_noise_needs_no_slack() {
        let plan = plan_thresholds(1000, 0.0, 1.0, 0.99).unwrap();
        assert_eq!(plan.tau_accept, 0.0);
        // Only the 2^-N no-same-basis floor remains.
        assert!(plan.completeness_failure_prob < 1e-200);
    }

    #[test]
    fn plan_is_infeasible_for_tiny_n_and_extreme_target() {
        let err = plan_thresholds(4, 0.05, 1.0, 0.999999).unwrap_err();
        match err {
            AnalysisError::InfeasibleTarget { best_failure, .. } => {
                // The zero-same-basis floor alone is 1/16.
                assert!(best_failure >= 1.0 / 16.0 - 1e-12);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn plan_grid_always_separates_thresholds() {
        for n in [64u32, 200, 1000] {
            for e in [0.0, 0.02, 0.05, 0.1] {
                for eta in [0.5, 1.0] {
                    if let Ok(plan) = plan_thresholds(n, e, eta, 0.99) {
                        assert!(plan.tau_accept < plan.rho_reject);
                        assert!(plan.rho_reject < 0.5);
                    }
                }
            }
        }
    }

    #[test]
    fn honest_acceptance_is_near_one_at_desk_scale() {
        let p = honest_acceptance_prob(1000, 0.05, 1.0, 0.15, 0.3, 16).unwrap();
        assert!(p > 0.999999, "acceptance {p}");
    }

    #[test]
    fn honest_acceptance_degrades_at_tight_tau() {
        // tau below the error rate cannot hold at large N.
        let p = honest_acceptance_prob(1000, 0.1, 1.0, 0.05, 0.3, 16).unwrap();
        assert!(p < 0.01, "acceptance {p}");
    }

    #[test]
    fn soundness_curve_examples() {
        let points = soundness_curve(&[0, 10, 20], BREIDBART_RATE).unwrap();
        assert_eq!(points[0].strict_bound, 1.0);
        assert_eq!(points[0].per_relevant_bound, 1.0);
        let strict20 = points[2].strict_bound;
        assert!((strict20 - 0.0421).abs() < 5e-4, "bound {strict20}");
        assert!((strict20 - BREIDBART_RATE.powi(20)).abs() < 1e-15);

        let halves = soundness_curve(&[10], 0.5).unwrap();
        assert_eq!(halves[0].strict_bound, 2f64.powi(-10));
        assert!((halves[0].strict_bound - 9.766e-4).abs() < 1e-6);
    }

    #[test]
    fn soundness_curve_is_monotone_decreasing() {
        let ns: Vec<u32> = (0..40).collect();
        let points = soundness_curve(&ns, 0.8535).unwrap();
        for pair in points.windows(2) {
            assert!(pair[1].strict_bound < pair[0].strict_bound);
            assert!(pair[1].per_relevant_bound < pair[0].per_relevant_bound);
        }
    }

    #[test]
    fn soundness_curve_rejects_degenerate_rates() {
        assert!(soundness_curve(&[10], 0.0).is_err());
        assert!(soundness_curve(&[10], 1.0).is_err());
    }

    #[test]
    fn wilson_contains_the_point_estimate() {
        for (s, t) in [(0u64, 100u64), (1, 100), (50, 100), (100, 100), (3, 7)] {
            let (lo, hi) = wilson_interval(s, t, 1.96);
            let p = s as f64 / t as f64;
            assert!(lo <= p && p <= hi, "({s},{t}): [{lo},{hi}] vs {p}");
        }
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
    }

    #[test]
    fn dec6_is_plain_decimal() {
        assert_eq!(dec6(0.0421345678), "0.0421346");
        assert_eq!(dec6(1000.0), "1000.00");
        assert_eq!(dec6(0.5), "0.500000");
        assert_eq!(dec6(0.0), "0.00000");
        assert!(!dec6(1.77e-3).contains('e'));
    }

    #[test]
    fn breidbart_rate_value() {
        assert!((BREIDBART_RATE - 0.853553).abs() < 1e-6);
    }
}
