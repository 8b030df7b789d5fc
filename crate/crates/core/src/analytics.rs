//! Closed-form expressions for the number/phase protocol and the resource
//! diagnostics.
//!
//! These are exact series or elementary functions, used both as a
//! calculator and as the oracle layer the numerical protocol is tested
//! against. Series are summed until the running term falls below 1e−15 of
//! the partial sum, with a hard cap at the adaptive cutoff.
//!
//! One printed form of the negative-branch outcome probability diverges
//! as m → −∞ (λ^{−2|m|}); the normalizable λ^{+2|m|} form is implemented
//! here, and the brute-force oracle in the test suite is what settles the
//! choice.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::adaptive_cutoff;

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            requirement: "0 <= lambda < 1",
        });
    }
    Ok(())
}

/// Relative size at which a series term stops contributing.
const TERM_TOL: f64 = 1e-15;

/// Σ_{n≥0} wⁿ a^{n+m} / (n+m)! for a ≥ 0, 0 ≤ w < 1, m ≥ 0.
///
/// Terms grow until n + m ≈ wa, so the stopping rule only fires past the
/// peak; `cap` bounds the summation length.
fn weighted_exp_series(w: f64, a: f64, m: u64, cap: usize) -> f64 {
    let mut term = 1.0f64;
    for j in 1..=m {
        term *= a / j as f64;
    }
    let mut sum = term;
    for n in 1..=cap.max(8) as u64 {
        term *= w * a / (m + n) as f64;
        sum += term;
        if term < sum * TERM_TOL && (m + n) as f64 > w * a {
            break;
        }
    }
    sum
}

fn series_cap(lambda: f64) -> usize {
    adaptive_cutoff(lambda, 1e-12).unwrap_or(64).max(64)
}

/// Probability of photon-number difference m for a number-state target
/// |N⟩: (1−λ²)λ^{2(N−m)} for m ≤ N, zero above.
pub fn p_m_number(n: usize, lambda: f64, m: i64) -> Result<f64> {
    check_lambda(lambda)?;
    let n = n as i64;
    if m > n {
        return Ok(0.0);
    }
    Ok((1.0 - lambda * lambda) * lambda.powi(2 * (n - m) as i32))
}

/// Probability of photon-number difference m for a coherent target of
/// magnitude `alpha`.
pub fn p_m_coherent(alpha: f64, lambda: f64, m: i64) -> Result<f64> {
    check_lambda(lambda)?;
    let a = alpha * alpha;
    let one_minus = 1.0 - lambda * lambda;
    if m < 0 {
        // normalizable branch: λ^{+2|m|}
        Ok(one_minus * lambda.powi(2 * (-m) as i32) * (-a * one_minus).exp())
    } else {
        let s = weighted_exp_series(lambda * lambda, a, m as u64, series_cap(lambda));
        Ok(one_minus * (-a).exp() * s)
    }
}

/// Fidelity of the displaced output given outcome m for a coherent target.
pub fn f_m_coherent(alpha: f64, lambda: f64, m: i64) -> Result<f64> {
    check_lambda(lambda)?;
    let a = alpha * alpha;
    if m < 0 {
        return Ok((-a * (1.0 - lambda) * (1.0 - lambda)).exp());
    }
    let p = p_m_coherent(alpha, lambda, m)?;
    if p <= 0.0 {
        return Err(Error::InvalidOutcome(m));
    }
    let s = weighted_exp_series(lambda, a, m as u64, series_cap(lambda));
    Ok((1.0 - lambda * lambda) / p * (-2.0 * a).exp() * s * s)
}

/// Fidelity at outcome m = 0 when the output is left undisplaced:
/// e^{−|α|²(1−λ)²}.
pub fn f0_undisplaced(alpha: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok((-(alpha * alpha) * (1.0 - lambda) * (1.0 - lambda)).exp())
}

/// The same quantity written through mean photon numbers,
/// exp{−(n̄/n̄_SV)λ²}.
///
/// This form reproduces [`f0_undisplaced`] only for n̄_SV = λ²/(1−λ)²;
/// with the squeezed-vacuum value λ²/(1−λ²) the exponent is off by a
/// factor (1+λ)/(1−λ), so it is an approximation valid as λ → 1.
pub fn f0_ratio_form(n_target: f64, n_sv: f64, lambda: f64) -> f64 {
    (-(n_target / n_sv) * lambda * lambda).exp()
}

/// Variance of the squeezed joint quadratures: 2e^{−2r}.
pub fn epr_variance(r: f64) -> f64 {
    2.0 * (-2.0 * r).exp()
}

/// Coherent target paired with the resource strength; the magnitude of
/// `alpha` is what every formula uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentParams {
    pub alpha: C64,
    pub lambda: f64,
}

impl CoherentParams {
    pub fn new(alpha: C64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { alpha, lambda })
    }

    /// Mean photon number of the target, |α|².
    pub fn mean_photon(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn p_m(&self, m: i64) -> Result<f64> {
        p_m_coherent(self.alpha.norm(), self.lambda, m)
    }

    pub fn f_m(&self, m: i64) -> Result<f64> {
        f_m_coherent(self.alpha.norm(), self.lambda, m)
    }

    pub fn f0_undisplaced(&self) -> Result<f64> {
        f0_undisplaced(self.alpha.norm(), self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    #[test]
    fn number_state_probabilities() {
        assert_abs_diff_eq!(p_m_number(5, 0.9, 5).unwrap(), 0.19, epsilon = 1e-15);
        assert_eq!(p_m_number(5, 0.9, 6).unwrap(), 0.0);
        assert_abs_diff_eq!(
            p_m_number(3, 0.7, 1).unwrap(),
            (1.0 - 0.49) * 0.7f64.powi(4),
            epsilon = 1e-15
        );
    }

    #[test]
    fn number_state_probabilities_sum_to_one() {
        let (n, lambda) = (5usize, 0.8f64);
        let mut sum = 0.0;
        for m in -400..=(n as i64) {
            sum += p_m_number(n, lambda, m).unwrap();
        }
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_probabilities_sum_to_one() {
        for (alpha, lambda) in [(2.0, 0.7), (6.0, 0.9), (1.0, 0.3)] {
            let mut sum = 0.0;
            for m in -600..=200i64 {
                sum += p_m_coherent(alpha, lambda, m).unwrap();
            }
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn vacuum_target_distribution() {
        // alpha = 0 against an unsqueezed resource is pinned to m = 0
        assert_abs_diff_eq!(p_m_coherent(0.0, 0.0, 0).unwrap(), 1.0, epsilon = 0.0);
        assert_eq!(p_m_coherent(0.0, 0.0, -1).unwrap(), 0.0);
        assert_eq!(p_m_coherent(0.0, 0.0, 1).unwrap(), 0.0);
        // at finite squeezing the thermal partner spreads it over m <= 0
        let lambda = 0.6f64;
        assert_abs_diff_eq!(
            p_m_coherent(0.0, lambda, 0).unwrap(),
            1.0 - lambda * lambda,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            p_m_coherent(0.0, lambda, -2).unwrap(),
            (1.0 - lambda * lambda) * lambda.powi(4),
            epsilon = 1e-15
        );
        assert_eq!(p_m_coherent(0.0, lambda, 1).unwrap(), 0.0);
    }

    /// Outcome probabilities enumerated directly over the product number
    /// basis, with no branch formulas: the target amplitude c_{n_T} pairs
    /// with the diagonal resource weight (1−λ²)λ^{2n_A}.
    fn brute_force_pmf(c: &[C64], lambda: f64, max_na: usize) -> BTreeMap<i64, f64> {
        let mut pmf = BTreeMap::new();
        let w = 1.0 - lambda * lambda;
        for (nt, amp) in c.iter().enumerate() {
            for na in 0..=max_na {
                let p = w * lambda.powi(2 * na as i32) * amp.norm_sqr();
                *pmf.entry(nt as i64 - na as i64).or_insert(0.0) += p;
            }
        }
        pmf
    }

    fn coherent_coeffs(alpha: f64, len: usize) -> Vec<C64> {
        let mut c = Vec::with_capacity(len);
        let mut v = (-0.5 * alpha * alpha).exp();
        c.push(C64::from(v));
        for n in 1..len {
            v *= alpha / (n as f64).sqrt();
            c.push(C64::from(v));
        }
        c
    }

    #[test]
    fn closed_form_matches_brute_force_enumeration() {
        let (alpha, lambda) = (2.0, 0.7);
        let pmf = brute_force_pmf(&coherent_coeffs(alpha, 60), lambda, 400);
        for m in [-6i64, -3, -1, 0, 1, 2, 5, 9] {
            let brute = pmf.get(&m).copied().unwrap_or(0.0);
            let closed = p_m_coherent(alpha, lambda, m).unwrap();
            assert_abs_diff_eq!(brute, closed, epsilon = 1e-12);
        }
    }

    #[test]
    fn negative_branch_misprint_is_rejected() {
        // the λ^{−2|m|} reading diverges; brute force confirms λ^{+2|m|}
        let (alpha, lambda) = (2.0f64, 0.7f64);
        let pmf = brute_force_pmf(&coherent_coeffs(alpha, 60), lambda, 400);
        let a = alpha * alpha;
        for m in [-4i64, -6] {
            let brute = pmf[&m];
            let kept = (1.0 - lambda * lambda)
                * lambda.powi(2 * (-m) as i32)
                * (-a * (1.0 - lambda * lambda)).exp();
            let rejected = (1.0 - lambda * lambda)
                * lambda.powi(-2 * (-m) as i32)
                * (-a * (1.0 - lambda * lambda)).exp();
            assert_abs_diff_eq!(brute, kept, epsilon = 1e-12);
            assert!(
                (rejected - brute).abs() > 10.0 * brute,
                "divergent branch not distinguishable at m={m}"
            );
        }
    }

    #[test]
    fn displaced_fidelity_negative_branch_value() {
        assert_abs_diff_eq!(
            f_m_coherent(6.0, 0.9, -3).unwrap(),
            (-0.36f64).exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!((-0.36f64).exp(), 0.69768, epsilon = 1e-5);
    }

    #[test]
    fn displaced_fidelity_stays_high_until_mean_photon_number() {
        let (alpha, lambda) = (6.0, 0.99);
        for m in [0i64, 10, 20] {
            assert!(f_m_coherent(alpha, lambda, m).unwrap() > 0.99, "m={m}");
        }
        // the drop sets in as m approaches the mean photon number 36
        let at_mean = f_m_coherent(alpha, lambda, 36).unwrap();
        assert!((0.3..0.7).contains(&at_mean), "F(36) = {at_mean}");
        let past = f_m_coherent(alpha, lambda, 50).unwrap();
        assert!(past < 0.05, "expected falloff past the mean photon number, got {past}");
    }

    #[test]
    fn undisplaced_fidelity_values() {
        assert_abs_diff_eq!(f0_undisplaced(6.0, 0.9).unwrap(), (-0.36f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(f0_undisplaced(0.0, 0.4).unwrap(), 1.0, epsilon = 0.0);
        assert!(f0_undisplaced(6.0, 0.999999).unwrap() > 1.0 - 1e-4);
    }

    #[test]
    fn undisplaced_fidelity_ratio_form_reconciliation() {
        let (alpha, lambda) = (6.0f64, 0.9f64);
        let primary = f0_undisplaced(alpha, lambda).unwrap();
        // exact when the resource mean photon number is read as λ²/(1−λ)²
        let reconciled = f0_ratio_form(
            alpha * alpha,
            lambda * lambda / ((1.0 - lambda) * (1.0 - lambda)),
            lambda,
        );
        assert_abs_diff_eq!(primary, reconciled, epsilon = 1e-15);
        // with the squeezed-vacuum n̄ the exponent is inflated by (1+λ)/(1−λ)
        let printed = f0_ratio_form(
            alpha * alpha,
            lambda * lambda / (1.0 - lambda * lambda),
            lambda,
        );
        let ratio = printed.ln() / primary.ln();
        assert_abs_diff_eq!(ratio, (1.0 + lambda) / (1.0 - lambda), epsilon = 1e-12);
    }

    #[test]
    fn epr_variance_values() {
        assert_eq!(epr_variance(0.0), 2.0);
        assert_abs_diff_eq!(epr_variance(1.0), 0.27067, epsilon = 1e-5);
    }

    #[test]
    fn coherent_params_wrap_the_magnitude() {
        let p = CoherentParams::new(C64::new(3.0, 4.0), 0.5).unwrap();
        assert_abs_diff_eq!(p.mean_photon(), 25.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            p.p_m(0).unwrap(),
            p_m_coherent(5.0, 0.5, 0).unwrap(),
            epsilon = 1e-15
        );
        assert!(CoherentParams::new(C64::ONE, 1.0).is_err());
    }

    #[test]
    fn rejects_unit_lambda() {
        assert!(p_m_number(2, 1.0, 0).is_err());
        assert!(p_m_coherent(1.0, 1.5, 0).is_err());
        assert!(f_m_coherent(1.0, 1.0, 0).is_err());
    }
}
