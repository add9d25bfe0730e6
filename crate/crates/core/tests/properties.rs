use std::f64::consts::FRAC_PI_4;

use proptest::prelude::*;
use seqrac::protocol::*;
use seqrac::qcore::{max_entangled_state, Mat2, TwoQubitState};

fn params() -> impl Strategy<Value = ProtocolParams> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=FRAC_PI_4, 0.0f64..=FRAC_PI_4)
        .prop_map(|(a, b, c, d)| ProtocolParams::new(a, b, c, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closed_forms_match_enumeration(p in params()) {
        prop_assert!((p_ab_closed(&p) - p_ab_bruteforce(&p)).abs() <= 1e-10);
        prop_assert!((p_ac_closed(&p) - p_ac_bruteforce(&p)).abs() <= 1e-10);
        prop_assert!((p_abc(&p) - p_abc_bruteforce(&p)).abs() <= 1e-10);
    }

    #[test]
    fn probabilities_are_probabilities(p in params()) {
        let r = SuccessReport::evaluate(&p, Branch::Unbiased);
        for v in [r.p_ab, r.p_ac, r.p_abc] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn swapping_sharpnesses_changes_nothing(p in params()) {
        let q = ProtocolParams::new(p.eta1, p.eta0, p.alpha, p.beta).unwrap();
        prop_assert_eq!(p_ab_closed(&p), p_ab_closed(&q));
        prop_assert!((p_ac_closed(&p) - p_ac_closed(&q)).abs() <= 1e-15);
    }

    #[test]
    fn sharper_bob_helps_bob_and_hurts_charlie(p in params(), d in 0.0f64..0.5) {
        let q = ProtocolParams::new((p.eta0 + d).min(1.0), p.eta1, p.alpha, p.beta).unwrap();
        prop_assert!(p_ab_closed(&q) >= p_ab_closed(&p) - 1e-15);
        prop_assert!(p_ac_closed(&q) <= p_ac_closed(&p) + 1e-15);
    }

    #[test]
    fn channel_keeps_a_valid_state(p in params()) {
        let out = rho_ac(&max_entangled_state(), &p);
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(TwoQubitState::new(*out.matrix()).is_ok());
    }

    #[test]
    fn measurements_are_complete(p in params()) {
        for y in Bit::BOTH {
            let pair = bob_kraus_pair(y, &p);
            prop_assert!(pair.completeness().max_abs_diff(&Mat2::identity()) <= 1e-12);
            let sum = bob_povm(y, Bit::Zero, &p) + bob_povm(y, Bit::One, &p);
            prop_assert!(sum.max_abs_diff(&Mat2::identity()) <= 1e-12);
            let sum = charlie_povm(y, Bit::Zero, p.beta) + charlie_povm(y, Bit::One, p.beta);
            prop_assert!(sum.max_abs_diff(&Mat2::identity()) <= 1e-12);
        }
    }

    #[test]
    fn conditional_vectors_closed_form(p in params()) {
        let a = charlie_conditional_vectors(&p);
        let b = charlie_conditional_vectors_closed(&p);
        for x in 0..2 {
            for o in 0..2 {
                prop_assert!(a[x][o].distance(&b[x][o]) <= 1e-12);
            }
        }
    }
}
