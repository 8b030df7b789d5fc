//! Property tests over randomly drawn states and parameters.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use cvteleport::analytics;
use cvteleport::fock::{self, ModeState};
use cvteleport::numphase::{self, TargetCoeffs};
use cvteleport::quad;
use cvteleport::resource;

fn arb_mode_state(max_len: usize) -> impl Strategy<Value = ModeState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..max_len)
        .prop_filter_map("zero state", |parts| {
            let amps: Vec<C64> = parts.iter().map(|&(re, im)| C64::new(re, im)).collect();
            if amps.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-6 {
                return None;
            }
            let mut s = ModeState::from_amps(amps).ok()?;
            s.normalize().ok()?;
            Some(s)
        })
}

proptest! {
    #[test]
    fn kernel_is_symmetric_in_its_arguments(
        x1 in -10.0f64..10.0,
        x2 in -10.0f64..10.0,
        r in 0.0f64..3.0,
    ) {
        prop_assert_eq!(quad::kernel_g(x1, x2, r), quad::kernel_g(x2, x1, r));
        prop_assert!(quad::kernel_g(x1, x2, r) >= 0.0);
    }

    #[test]
    fn phase_pdf_depends_only_on_the_phase_sum(
        lambda in 0.0f64..0.95,
        sum in -3.0f64..3.0,
        d1 in -3.0f64..3.0,
        d2 in -3.0f64..3.0,
    ) {
        let a = resource::joint_phase_pdf(lambda, sum / 2.0 + d1, sum / 2.0 - d1).unwrap();
        let b = resource::joint_phase_pdf(lambda, sum / 2.0 + d2, sum / 2.0 - d2).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn outcome_pmf_is_a_probability_distribution(
        alpha in 0.0f64..3.0,
        lambda in 0.02f64..0.9,
    ) {
        let c = TargetCoeffs::coherent_adaptive(C64::from(alpha), 1e-14);
        let pmf = numphase::jz_pmf(&c, lambda).unwrap();
        for (_, p) in pmf.iter() {
            prop_assert!(p >= 0.0);
        }
        prop_assert!((pmf.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn number_target_pmf_matches_the_closed_form(
        n in 0usize..12,
        lambda in 0.05f64..0.95,
        m in -30i64..14,
    ) {
        let pmf = numphase::jz_pmf(&TargetCoeffs::number(n), lambda).unwrap();
        let closed = analytics::p_m_number(n, lambda, m).unwrap();
        prop_assert!((pmf.prob(m) - closed).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_bounded_and_reflexive(s in arb_mode_state(12)) {
        let f = fock::fidelity(s.amps(), s.amps()).unwrap();
        prop_assert!((f - 1.0).abs() < 1e-12);
        let vac = ModeState::vacuum(s.cutoff());
        let cross = fock::fidelity(s.amps(), vac.amps()).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&cross));
    }

    #[test]
    fn number_displacement_round_trips(
        alpha in 0.2f64..2.0,
        lambda in 0.1f64..0.9,
        shift in 1i64..12,
    ) {
        let c = TargetCoeffs::coherent_adaptive(C64::from(alpha), 1e-14);
        let cond = numphase::conditional_after_outcome(&c, lambda, 0).unwrap();
        let up = numphase::number_displace(&cond, shift).unwrap();
        let back = numphase::number_displace(&up, -shift).unwrap();
        prop_assert_eq!(back.amps(), cond.amps());
    }

    #[test]
    fn displaced_fidelity_lies_in_the_unit_interval(
        alpha in 0.2f64..4.0,
        lambda in 0.1f64..0.95,
        m in -20i64..10,
    ) {
        let c = TargetCoeffs::coherent_adaptive(C64::from(alpha), 1e-14);
        // outcomes past the truncated support cannot occur
        if let Ok(f) = numphase::fidelity_displaced(&c, lambda, m) {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
            let closed = analytics::f_m_coherent(alpha, lambda, m).unwrap();
            prop_assert!((f - closed).abs() < 1e-6, "f={} closed={}", f, closed);
        }
    }
}
