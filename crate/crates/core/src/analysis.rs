//! CHSH values of both decoder pairs, the min-entropy they certify, and the
//! joint-decoding comparison between unbiased and maximin settings.

use serde::Serialize;

use crate::error::{check_range, Result};
use crate::optimizer::{optimize, OptimalSetting};
use crate::protocol::{
    alice_direction, bob_observable, charlie_direction, charlie_weights, p_abc, rho_ac, Bit,
    ProtocolParams,
};
use crate::qcore::{max_entangled_state, Mat2, TwoQubitState};

/// Tsirelson's bound `2√2`.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// `Σ_{x,d} (−1)^{x·d} ⟨A_x ⊗ B_d⟩` with Alice's `A_x = r_x·σ`.
fn chsh(state: &TwoQubitState, observable: impl Fn(Bit) -> Mat2) -> f64 {
    let mut total = 0.0;
    for x in Bit::BOTH {
        let a = alice_direction(x).sigma_dot();
        for d in Bit::BOTH {
            let sign = if x == Bit::One && d == Bit::One { -1.0 } else { 1.0 };
            total += sign * state.local_expectation(&a, &observable(d));
        }
    }
    total
}

/// CHSH values `(I_AB, I_AC)` from correlators on `ρ_AB` and on `ρ_AC`.
pub fn chsh_values(params: &ProtocolParams) -> (f64, f64) {
    let rho = max_entangled_state();
    let i_ab = chsh(&rho, |y| bob_observable(y, params).observable());
    let after = rho_ac(&rho, params);
    let i_ac = chsh(&after, |z| charlie_direction(z, params.beta).sigma_dot());
    (i_ab, i_ac)
}

/// Closed forms `I_AB = (η₀+η₁)(cos α + sin α)` and `I_AC = 2M + N S`.
pub fn chsh_closed(params: &ProtocolParams) -> (f64, f64) {
    let i_ab = (params.eta0 + params.eta1) * (params.alpha.cos() + params.alpha.sin());
    let (m, n) = charlie_weights(params.alpha, params.beta);
    (i_ab, 2.0 * m + n * params.residual())
}

/// CHSH value equivalent to an average success probability, `I = 8P − 4`.
pub fn chsh_from_success(p: f64) -> f64 {
    8.0 * p - 4.0
}

/// Certified randomness in bits per round,
/// `max(0, 1 − log₂(1 + √(2 − I²/4)))`.
pub fn min_entropy(i: f64) -> f64 {
    let radicand = (2.0 - i * i / 4.0).max(0.0);
    (1.0 - (1.0 + radicand.sqrt()).log2()).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RandomnessReport {
    pub i_ab: f64,
    pub i_ac: f64,
    pub hmin_ab: f64,
    pub hmin_ac: f64,
    pub hmin_total: f64,
}

impl RandomnessReport {
    pub fn from_chsh(i_ab: f64, i_ac: f64) -> Result<Self> {
        check_range("I_AB", i_ab, 0.0, TSIRELSON + 1e-6, "[0, 2√2]")?;
        check_range("I_AC", i_ac, 0.0, TSIRELSON + 1e-6, "[0, 2√2]")?;
        let (hmin_ab, hmin_ac) = (min_entropy(i_ab), min_entropy(i_ac));
        Ok(Self {
            i_ab,
            i_ac,
            hmin_ab,
            hmin_ac,
            hmin_total: hmin_ab + hmin_ac,
        })
    }

    pub fn from_params(params: &ProtocolParams) -> Self {
        let (i_ab, i_ac) = chsh_values(params);
        let (hmin_ab, hmin_ac) = (min_entropy(i_ab), min_entropy(i_ac));
        Self {
            i_ab,
            i_ac,
            hmin_ab,
            hmin_ac,
            hmin_total: hmin_ab + hmin_ac,
        }
    }
}

/// Joint decoding probability at unbiased and at maximin settings for the
/// same pair of sharpnesses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointDecodeComparison {
    pub eta0: f64,
    pub eta1: f64,
    pub p_abc_unbiased: f64,
    pub p_abc_optimized: f64,
    pub setting: OptimalSetting,
}

impl JointDecodeComparison {
    pub fn gain(&self) -> f64 {
        self.p_abc_optimized - self.p_abc_unbiased
    }
}

pub fn compare_joint_decode(eta0: f64, eta1: f64) -> Result<JointDecodeComparison> {
    let setting = optimize(eta0, eta1)?;
    let unbiased = ProtocolParams::unbiased(eta0, eta1)?;
    Ok(JointDecodeComparison {
        eta0,
        eta1,
        p_abc_unbiased: p_abc(&unbiased),
        p_abc_optimized: p_abc(&setting.params()),
        setting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::sharpness_from_theta;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    #[test]
    fn chsh_examples() {
        let sharp = ProtocolParams::unbiased(1.0, 1.0).unwrap();
        let (i_ab, i_ac) = chsh_values(&sharp);
        assert!((i_ab - TSIRELSON).abs() < 1e-12);
        assert!((i_ac - SQRT_2).abs() < 1e-12);

        let blind = ProtocolParams::unbiased(0.0, 0.0).unwrap();
        assert!(chsh_values(&blind).0.abs() < 1e-15);

        let eta = sharpness_from_theta(10f64.to_radians());
        let (i_ab, i_ac) = chsh_values(&ProtocolParams::unbiased(eta, eta).unwrap());
        assert!((i_ab - 2.167).abs() < 1e-3);
        assert!((i_ac - 2.32).abs() < 0.01);
        assert!((i_ab - 2.141).abs() < 0.05 && (i_ac - 2.308).abs() < 0.05);
    }

    #[test]
    fn min_entropy_examples() {
        assert!((min_entropy(TSIRELSON) - 1.0).abs() < 1e-12);
        assert_eq!(min_entropy(2.0), 0.0);
        assert_eq!(min_entropy(1.5), 0.0);
        let total = min_entropy(2.141) + min_entropy(2.308);
        assert!((total - 0.194).abs() < 0.005, "{total}");
    }

    #[test]
    fn randomness_report_validates() {
        assert!(RandomnessReport::from_chsh(3.0, 1.0).is_err());
        let r = RandomnessReport::from_chsh(TSIRELSON, 2.0).unwrap();
        assert!((r.hmin_total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimized_joint_decode_beats_unbiased() {
        let eta1 = sharpness_from_theta(6f64.to_radians());
        let c = compare_joint_decode(std::f64::consts::FRAC_1_SQRT_2, eta1).unwrap();
        assert!(c.gain() > 0.0);
        assert!((c.p_abc_optimized - 0.494).abs() < 0.02);
    }

    #[test]
    fn success_probability_and_chsh_agree() {
        let p = ProtocolParams::new(0.8, 0.6, 0.3, 0.5).unwrap();
        let (i_ab, i_ac) = chsh_closed(&p);
        assert!((chsh_from_success(crate::protocol::p_ab_closed(&p)) - i_ab).abs() < 1e-14);
        assert!((chsh_from_success(crate::protocol::p_ac_closed(&p)) - i_ac).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn chsh_closed_matches_correlators(
            e0 in 0.0f64..=1.0,
            e1 in 0.0f64..=1.0,
            a in 0.0f64..=FRAC_PI_4,
            b in 0.0f64..=FRAC_PI_4,
        ) {
            let p = ProtocolParams::new(e0, e1, a, b).unwrap();
            let (x, y) = chsh_values(&p);
            let (u, v) = chsh_closed(&p);
            prop_assert!((x - u).abs() <= 1e-10);
            prop_assert!((y - v).abs() <= 1e-10);
        }

        #[test]
        fn min_entropy_is_monotone(i in 2.0f64..TSIRELSON, d in 0.0f64..0.1) {
            let j = (i + d).min(TSIRELSON);
            prop_assert!(min_entropy(j) >= min_entropy(i));
        }
    }
}
