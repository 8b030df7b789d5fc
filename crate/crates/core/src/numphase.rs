//! Teleportation by photon-number-difference and phase-sum measurements.
//!
//! Outcomes of the number-difference measurement are stored as the integer
//! m = N_T − N_A; the half-integer pseudo-angular-momentum value k = m/2
//! appears only inside phase bookkeeping. Given m, the sender's second
//! measurement (the canonical phase sum) multiplies the receiver amplitude
//! at index j by e^{−iφ₊(j + m/2)} and has a uniform outcome density
//! 1/2π, because the receiver's basis states stay orthogonal. The receiver
//! undoes the phases with e^{iφ₊(N̂ ± k)} and, when told m, shifts the
//! number index by m.
//!
//! Downshifts destroy amplitude below the shift; that situation is
//! surfaced as [`Error::LossyDownshift`] instead of being truncated away,
//! since it is the protocol's fundamental limitation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{adaptive_cutoff, tail_cutoff};

/// Mass below the pmf's own resolution is dropped from its support.
const PMF_TAIL_TOL: f64 = 1e-12;

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

/// Target state in the number basis, unit normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetCoeffs {
    c: Vec<C64>,
}

impl TargetCoeffs {
    pub fn new(c: Vec<C64>) -> Result<Self> {
        let mut t = Self { c };
        let n: f64 = t.c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        for a in &mut t.c {
            *a /= n;
        }
        Ok(t)
    }

    /// Number state |n⟩.
    pub fn number(n: usize) -> Self {
        let mut c = vec![C64::ZERO; n + 1];
        c[n] = C64::ONE;
        Self { c }
    }

    /// Coherent state truncated at `cutoff`.
    pub fn coherent(alpha: C64, cutoff: usize) -> Self {
        let mut c = Vec::with_capacity(cutoff + 1);
        let mut v = C64::from((-0.5 * alpha.norm_sqr()).exp());
        c.push(v);
        for n in 1..=cutoff {
            v *= alpha / (n as f64).sqrt();
            c.push(v);
        }
        Self::new(c).expect("coherent amplitudes are nonzero")
    }

    /// Coherent state truncated where the Poisson tail drops below
    /// `tail_tol`.
    pub fn coherent_adaptive(alpha: C64, tail_tol: f64) -> Self {
        let mean = alpha.norm_sqr();
        let guess = (mean + 12.0 * mean.sqrt().max(2.0)).ceil() as usize;
        let full = Self::coherent(alpha, guess);
        let n = tail_cutoff(&full.c, tail_tol);
        Self::new(full.c[..=n].to_vec()).expect("truncation keeps the bulk")
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// Amplitude c_m, zero past the stored support.
    pub fn amp(&self, m: usize) -> C64 {
        self.c.get(m).copied().unwrap_or(C64::ZERO)
    }

    pub fn amps(&self) -> &[C64] {
        &self.c
    }
}

/// Distribution of the measured photon-number difference.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomePmf {
    entries: BTreeMap<i64, f64>,
}

impl OutcomePmf {
    pub fn prob(&self, m: i64) -> f64 {
        self.entries.get(&m).copied().unwrap_or(0.0)
    }

    /// Entries in ascending outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().map(|(&m, &p)| (m, p))
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.keys().copied()
    }

    /// Inverse-CDF sample; `u` must lie in [0, 1).
    fn sample(&self, u: f64) -> i64 {
        let mut acc = 0.0;
        let mut last = 0;
        for (&m, &p) in &self.entries {
            acc += p;
            last = m;
            if u < acc {
                return m;
            }
        }
        last
    }
}

/// Distribution of m = N_T − N_A for the given target against the
/// λ-diagonal resource, by direct summation at the adaptive cutoff.
pub fn jz_pmf(c: &TargetCoeffs, lambda: f64) -> Result<OutcomePmf> {
    check_lambda(lambda)?;
    let l2 = lambda * lambda;
    let w = 1.0 - l2;
    let mut entries = BTreeMap::new();

    // m >= 0: Σ_n λ^{2n} |c_{n+m}|², support bounded by the target
    for m in 0..c.len() as i64 {
        let mut p = 0.0;
        let mut weight = w;
        for n in 0..c.len() - m as usize {
            p += weight * c.amp(n + m as usize).norm_sqr();
            weight *= l2;
        }
        if p > 0.0 {
            entries.insert(m, p);
        }
    }

    // m < 0: Σ_{n≥|m|} λ^{2n} |c_{n−|m|}|², support bounded by the
    // resource's geometric weights
    let neg_reach = if lambda == 0.0 {
        0
    } else {
        (PMF_TAIL_TOL.ln() / (2.0 * lambda.ln())).ceil() as i64
    };
    for mm in 1..=neg_reach {
        let mut p = 0.0;
        let mut weight = w * l2.powi(mm as i32);
        for n in 0..c.len() {
            p += weight * c.amp(n).norm_sqr();
            weight *= l2;
        }
        if p > 0.0 {
            entries.insert(-mm, p);
        }
    }

    Ok(OutcomePmf { entries })
}

/// Receiver-side state conditioned on an outcome, before or after the
/// phase bookkeeping.
#[derive(Clone, Debug)]
pub struct ConditionalState {
    amps: Vec<C64>,
    outcome: i64,
    phase_applied: Option<f64>,
    normalized: bool,
}

impl ConditionalState {
    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn outcome(&self) -> i64 {
        self.outcome
    }

    pub fn phase_applied(&self) -> Option<f64> {
        self.phase_applied
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        for a in &mut self.amps {
            *a /= n;
        }
        self.normalized = true;
        Ok(n)
    }
}

/// Receiver amplitudes after the number-difference measurement alone,
/// unnormalized so that the squared norm is exactly the outcome
/// probability.
pub fn conditional_after_outcome(
    c: &TargetCoeffs,
    lambda: f64,
    m: i64,
) -> Result<ConditionalState> {
    check_lambda(lambda)?;
    let scale = (1.0 - lambda * lambda).sqrt();
    let amps: Vec<C64> = if m >= 0 {
        let m = m as usize;
        if m >= c.len() {
            return Err(Error::InvalidOutcome(m as i64));
        }
        (0..c.len() - m)
            .map(|n| scale * lambda.powi(n as i32) * c.amp(n + m))
            .collect()
    } else {
        let shift = (-m) as usize;
        (0..c.len() + shift)
            .map(|j| {
                if j < shift {
                    C64::ZERO
                } else {
                    scale * lambda.powi(j as i32) * c.amp(j - shift)
                }
            })
            .collect()
    };
    let state = ConditionalState { amps, outcome: m, phase_applied: None, normalized: false };
    if state.norm_sqr() == 0.0 {
        return Err(Error::InvalidOutcome(m));
    }
    Ok(state)
}

/// Imprint the phase-sum outcome φ₊: amplitude j picks up
/// e^{−iφ₊(j + m/2)}.
pub fn apply_phase_outcome(state: &ConditionalState, phi_plus: f64) -> Result<ConditionalState> {
    if !(-PI..PI).contains(&phi_plus) {
        return Err(Error::InvalidParameter {
            name: "phi_plus",
            value: phi_plus,
            requirement: "-pi <= phi_plus < pi",
        });
    }
    let half_m = state.outcome as f64 / 2.0;
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(j, a)| a * C64::from_polar(1.0, -phi_plus * (j as f64 + half_m)))
        .collect();
    Ok(ConditionalState {
        amps,
        outcome: state.outcome,
        phase_applied: Some(phi_plus),
        normalized: state.normalized,
    })
}

/// Conditional density of the phase-sum outcome given m with respect to
/// dφ₊: uniformly 1/2π, because the receiver's number states are
/// orthogonal so no φ₊ value is favoured.
pub fn phase_outcome_density(c: &TargetCoeffs, lambda: f64, m: i64) -> Result<f64> {
    // validates that the outcome can occur at all
    conditional_after_outcome(c, lambda, m)?;
    Ok(1.0 / (2.0 * PI))
}

/// The receiver's phase correction e^{iφ(N̂ ± k)}; with the phase-sum
/// convention above this removes every φ₊-dependent phase exactly.
pub fn phase_correction(state: &ConditionalState, phi_plus: f64) -> ConditionalState {
    let half_m = state.outcome as f64 / 2.0;
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(j, a)| a * C64::from_polar(1.0, phi_plus * (j as f64 + half_m)))
        .collect();
    ConditionalState {
        amps,
        outcome: state.outcome,
        phase_applied: None,
        normalized: state.normalized,
    }
}

/// Shift every number index by `shift`. Downshifts require the low
/// amplitudes to be empty (below 1e−12); anything else is reported as a
/// lossy downshift with the mass that would be destroyed.
pub fn number_displace(state: &ConditionalState, shift: i64) -> Result<ConditionalState> {
    let amps = if shift >= 0 {
        let mut v = vec![C64::ZERO; shift as usize];
        v.extend_from_slice(&state.amps);
        v
    } else {
        let s = (-shift) as usize;
        let head = &state.amps[..s.min(state.amps.len())];
        if head.iter().any(|a| a.norm() > 1e-12) {
            let lost: f64 = head.iter().map(|a| a.norm_sqr()).sum();
            return Err(Error::LossyDownshift { shift, lost });
        }
        if s >= state.amps.len() {
            return Err(Error::ZeroNorm);
        }
        state.amps[s..].to_vec()
    };
    Ok(ConditionalState {
        amps,
        outcome: state.outcome,
        phase_applied: state.phase_applied,
        normalized: state.normalized,
    })
}

/// |⟨target|state⟩|² with the state normalized first.
fn fidelity_to_target(c: &TargetCoeffs, amps: &[C64]) -> Result<f64> {
    let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let ov: C64 = c.amps().iter().zip(amps).map(|(t, s)| t.conj() * s).sum();
    Ok(ov.norm_sqr() / norm_sqr)
}

/// Fidelity of the corrected and number-displaced output against the
/// target, for outcome m.
pub fn fidelity_displaced(c: &TargetCoeffs, lambda: f64, m: i64) -> Result<f64> {
    let cond = conditional_after_outcome(c, lambda, m)?;
    let displaced = number_displace(&cond, m)?;
    fidelity_to_target(c, displaced.amps())
}

/// Fidelity of the corrected but unshifted output against the target.
pub fn fidelity_undisplaced(c: &TargetCoeffs, lambda: f64, m: i64) -> Result<f64> {
    let cond = conditional_after_outcome(c, lambda, m)?;
    fidelity_to_target(c, cond.amps())
}

/// One sampled teleportation trial.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub m: i64,
    pub phi_plus: f64,
    /// None when the number displacement would have been lossy.
    pub fidelity_displaced: Option<f64>,
    pub fidelity_undisplaced: f64,
}

fn run_with_pmf(
    c: &TargetCoeffs,
    lambda: f64,
    pmf: &OutcomePmf,
    seed: u64,
) -> Result<RunRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: f64 = rng.random();
    let m = pmf.sample(u);
    let phi_plus: f64 = rng.random_range(-PI..PI);

    let cond = conditional_after_outcome(c, lambda, m)?;
    let phased = apply_phase_outcome(&cond, phi_plus)?;
    let corrected = phase_correction(&phased, phi_plus);
    let fidelity_undisplaced = fidelity_to_target(c, corrected.amps())?;
    let fidelity_displaced = match number_displace(&corrected, m) {
        Ok(d) => Some(fidelity_to_target(c, d.amps())?),
        Err(Error::LossyDownshift { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RunRecord { seed, m, phi_plus, fidelity_displaced, fidelity_undisplaced })
}

/// Sample one full trial: outcome m from its pmf, φ₊ uniform, phases,
/// correction and displacement. Deterministic in the seed.
pub fn sample_run(c: &TargetCoeffs, lambda: f64, seed: u64) -> Result<RunRecord> {
    let pmf = jz_pmf(c, lambda)?;
    run_with_pmf(c, lambda, &pmf, seed)
}

/// A batch of trials seeded `base_seed`, `base_seed + 1`, …; the pmf is
/// computed once.
pub fn sample_runs(
    c: &TargetCoeffs,
    lambda: f64,
    base_seed: u64,
    trials: u64,
) -> Result<Vec<RunRecord>> {
    let pmf = jz_pmf(c, lambda)?;
    (0..trials)
        .map(|i| run_with_pmf(c, lambda, &pmf, base_seed.wrapping_add(i)))
        .collect()
}

/// Cutoff serving both the resource weights and the target tail, per the
/// adaptive rule.
pub fn protocol_cutoff(c: &TargetCoeffs, lambda: f64, tail_tol: f64) -> Result<usize> {
    Ok(adaptive_cutoff(lambda, tail_tol)?.max(tail_cutoff(c.amps(), tail_tol)))
}
