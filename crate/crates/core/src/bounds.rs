//! Bounds on sharpness, biasness and incompatibility inferred from observed
//! success probabilities alone.
//!
//! Every function here takes probabilities as measured, so finite
//! statistics can push inputs beyond the region where the algebra is
//! valid. Results are then clamped to their physical range and the clamp is
//! reported instead of producing NaN.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use serde::Serialize;

use crate::analysis::{chsh_from_success, min_entropy};
use crate::error::{check_range, Error, Result};
use crate::numeric::{bisect, linspace};
use crate::optimizer::best_beta;
use crate::protocol::{charlie_conditional_vectors, p_ac_at, residual, ProtocolParams};

/// A bound together with whether it had to be clamped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub clamped: bool,
}

impl Bound {
    fn clamp(value: f64, lo: f64, hi: f64) -> Self {
        let c = value.clamp(lo, hi);
        Self {
            value: c,
            clamped: c != value,
        }
    }

    fn exact(value: f64) -> Self {
        Self {
            value,
            clamped: false,
        }
    }
}

fn check_probability(what: &'static str, p: f64) -> Result<()> {
    check_range(what, p, 0.0, 1.0, "[0, 1]")
}

/// Lower bound `η_low = √2 (2P_AB − 1)`.
pub fn eta_lower(p_ab: f64) -> Result<Bound> {
    check_probability("p_ab", p_ab)?;
    Ok(Bound::clamp(SQRT_2 * (2.0 * p_ab - 1.0), 0.0, 1.0))
}

/// Upper bound `η_up = 2√((2 + √2 − 4P_AC)(2P_AC − 1))`.
pub fn eta_upper(p_ac: f64) -> Result<Bound> {
    check_probability("p_ac", p_ac)?;
    let radicand = (2.0 + SQRT_2 - 4.0 * p_ac) * (2.0 * p_ac - 1.0);
    let raw = 2.0 * radicand.max(0.0).sqrt();
    let b = Bound::clamp(raw, 0.0, 1.0);
    Ok(Bound {
        clamped: b.clamped || radicand < 0.0,
        ..b
    })
}

/// `(η_low, η_up)` from observed `P_AB` and `P_AC`.
pub fn sharpness_bounds(p_ab: f64, p_ac: f64) -> Result<(Bound, Bound)> {
    Ok((eta_lower(p_ab)?, eta_upper(p_ac)?))
}

/// Upper bound on Bob's overlap `|s₀·s₁|`.
///
/// With `x = (8P_AB − 4)/(η₀ + η₁)` the bound reads `x√(2 − x²)`, which is
/// only informative for `x ∈ [1, √2]`. Below 1 nothing is excluded and the
/// bound is the trivial 1.
pub fn bob_biasness_upper(p_ab: f64, eta0: f64, eta1: f64) -> Result<Bound> {
    check_probability("p_ab", p_ab)?;
    check_range("eta0", eta0, 0.0, 1.0, "[0, 1]")?;
    check_range("eta1", eta1, 0.0, 1.0, "[0, 1]")?;
    if eta0 + eta1 == 0.0 {
        return Err(Error::UndefinedBound("η₀ + η₁ = 0 in the biasness bound"));
    }
    let x = (8.0 * p_ab - 4.0) / (eta0 + eta1);
    if x <= 1.0 {
        return Ok(Bound::exact(1.0));
    }
    let radicand = 2.0 - x * x;
    if radicand < 0.0 {
        return Ok(Bound {
            value: 0.0,
            clamped: true,
        });
    }
    Ok(Bound::clamp(x * radicand.sqrt(), 0.0, 1.0))
}

/// Upper bound on Charlie's overlap `|t₀·t₁|`.
///
/// Bob's angle is set to `α = arccos(s_up)/2` and the observed `P_AC` is
/// inverted for `β`. `P_AC` rises on `[0, β*]` and falls on `[β*, π/4]`; the
/// smallest root is taken, which gives the largest `cos 2β`. An observation
/// above the attainable maximum is clamped to `β*`; one that no `β` can
/// explain from below is clamped to `β = 0`.
pub fn charlie_biasness_upper(p_ac: f64, eta0: f64, eta1: f64, s_up: f64) -> Result<Bound> {
    check_probability("p_ac", p_ac)?;
    check_range("eta0", eta0, 0.0, 1.0, "[0, 1]")?;
    check_range("eta1", eta1, 0.0, 1.0, "[0, 1]")?;
    check_range("s_up", s_up, 0.0, 1.0, "[0, 1]")?;
    let alpha = s_up.acos() / 2.0;
    let s = residual(eta0, eta1);
    let f = |beta: f64| p_ac_at(alpha, beta, s) - p_ac;
    let peak = best_beta(alpha, eta0, eta1);

    let (beta, clamped) = if f(peak) <= 1e-12 && f(peak) >= -1e-12 {
        (peak, false)
    } else if f(peak) < 0.0 {
        (peak, true)
    } else if f(0.0) <= 0.0 {
        (bisect(f, 0.0, peak, 1e-13), false)
    } else if f(FRAC_PI_4) <= 0.0 {
        (bisect(f, peak, FRAC_PI_4, 1e-13), false)
    } else {
        (0.0, true)
    };
    let b = Bound::clamp((2.0 * beta).cos(), 0.0, 1.0);
    Ok(Bound {
        clamped: b.clamped || clamped,
        ..b
    })
}

/// Largest distance between Charlie's two conditional states for either
/// of Alice's settings.
pub fn conditional_distance(params: &ProtocolParams) -> f64 {
    let m = charlie_conditional_vectors(params);
    m.iter()
        .map(|pair| pair[0].distance(&pair[1]))
        .fold(0.0, f64::max)
}

/// `D_s ≥ 8P_AB − 6` and `D_t ≥ (16P_AC − 8)/m − 2`, both clamped to `[0, 2]`.
pub fn incompatibility_bounds(
    p_ab: f64,
    p_ac: f64,
    params: &ProtocolParams,
) -> Result<(Bound, Bound)> {
    check_probability("p_ab", p_ab)?;
    check_probability("p_ac", p_ac)?;
    let m = conditional_distance(params);
    if m <= 0.0 {
        return Err(Error::UndefinedBound(
            "Charlie's conditional states coincide (m = 0)",
        ));
    }
    Ok((
        Bound::clamp(8.0 * p_ab - 6.0, 0.0, 2.0),
        Bound::clamp((16.0 * p_ac - 8.0) / m - 2.0, 0.0, 2.0),
    ))
}

/// Everything certifiable from one observed pair `(P_AB, P_AC)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub p_ab: f64,
    pub p_ac: f64,
    pub eta_low: f64,
    pub eta_up: f64,
    pub s_up: f64,
    pub t_up: f64,
    pub d_s_low: f64,
    pub d_t_low: f64,
    /// Maximum distance between Charlie's conditional Bloch vectors.
    pub m: f64,
    pub hmin_ab: f64,
    pub hmin_ac: f64,
    /// Names of every quantity that had to be clamped.
    pub clamped: Vec<&'static str>,
}

/// Largest biasness bounds over every common sharpness in `[lo, hi]`.
///
/// Bob's bound depends on `η` through `x = (8P_AB − 4)/2η` only and peaks at
/// `x = 1`, so it is 1 whenever that point lies inside the interval and an
/// endpoint value otherwise. Charlie's bound is scanned on a grid.
fn biasness_over_interval(p_ab: f64, p_ac: f64, lo: f64, hi: f64) -> Result<(Bound, Bound)> {
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    let candidates: Vec<f64> = linspace(lo, hi, 201)
        .into_iter()
        .filter(|&e| e > 0.0)
        .collect();
    if candidates.is_empty() {
        return Err(Error::UndefinedBound("η_up = 0 in the biasness bound"));
    }
    let peak = (8.0 * p_ab - 4.0) / 2.0;
    let mut s_best: Option<Bound> = None;
    let mut t_best: Option<Bound> = None;
    for &e in &candidates {
        let s = if (lo..=hi).contains(&peak) {
            Bound::exact(1.0)
        } else {
            bob_biasness_upper(p_ab, e, e)?
        };
        let t = charlie_biasness_upper(p_ac, e, e, s.value)?;
        if s_best.map_or(true, |b| s.value > b.value) {
            s_best = Some(s);
        }
        if t_best.map_or(true, |b| t.value > b.value) {
            t_best = Some(t);
        }
    }
    Ok((s_best.unwrap(), t_best.unwrap()))
}

impl BoundsReport {
    /// Builds the report from observed probabilities.
    ///
    /// With `eta = Some((η₀, η₁))` the sharpnesses are taken as known.
    /// Otherwise both biasness bounds are maximised over a common sharpness
    /// `η ∈ [η_low, η_up]`, and `η_up` is used when computing `m`.
    pub fn from_observed(p_ab: f64, p_ac: f64, eta: Option<(f64, f64)>) -> Result<Self> {
        let (low, up) = sharpness_bounds(p_ab, p_ac)?;
        let mut clamped = Vec::new();
        let mut note = |name: &'static str, b: Bound| {
            if b.clamped {
                clamped.push(name);
            }
            b.value
        };
        let eta_low = note("eta_low", low);
        let eta_up = note("eta_up", up);
        let (s_bound, t_bound, m_eta) = match eta {
            Some(e) => {
                let s = bob_biasness_upper(p_ab, e.0, e.1)?;
                (s, charlie_biasness_upper(p_ac, e.0, e.1, s.value)?, e)
            }
            None => {
                let (s, t) = biasness_over_interval(p_ab, p_ac, eta_low, eta_up)?;
                (s, t, (eta_up, eta_up))
            }
        };
        let s_up = note("s_up", s_bound);
        let t_up = note("t_up", t_bound);
        let alpha = s_up.acos() / 2.0;
        let params = ProtocolParams::new(m_eta.0, m_eta.1, alpha, FRAC_PI_4)?;
        let (ds, dt) = incompatibility_bounds(p_ab, p_ac, &params)?;
        let d_s_low = note("d_s_low", ds);
        let d_t_low = note("d_t_low", dt);
        Ok(Self {
            p_ab,
            p_ac,
            eta_low,
            eta_up,
            s_up,
            t_up,
            d_s_low,
            d_t_low,
            m: conditional_distance(&params),
            hmin_ab: min_entropy(chsh_from_success(p_ab)),
            hmin_ac: min_entropy(chsh_from_success(p_ac)),
            clamped,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::optimize;
    use crate::protocol::{p_ab_closed, p_ac_closed, sharpness_from_theta};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn sharpness_examples() {
        let up = eta_upper((4.0 + SQRT_2) / 8.0).unwrap();
        assert!((up.value - 1.0).abs() < 1e-12);
        let low = eta_lower(0.75).unwrap();
        assert!((low.value - FRAC_1_SQRT_2).abs() < 1e-15);
        let (l, u) = sharpness_bounds(0.7915, 0.7685).unwrap();
        assert!((l.value - 0.826).abs() < 0.01 && (u.value - 0.853).abs() < 0.01);
    }

    #[test]
    fn sharpness_clamps_out_of_range_data() {
        let low = eta_lower(0.45).unwrap();
        assert_eq!(low.value, 0.0);
        assert!(low.clamped);
        let up = eta_upper(0.9).unwrap();
        assert_eq!(up.value, 0.0);
        assert!(up.clamped);
        assert!(eta_lower(f64::NAN).is_err());
    }

    #[test]
    fn bob_biasness_examples() {
        let b = bob_biasness_upper((2.0 + SQRT_2) / 4.0, 1.0, 1.0).unwrap();
        assert!(b.value.abs() < 1e-7);
        let b = bob_biasness_upper(0.75229, 0.990, 0.990).unwrap();
        assert!((b.value - (2.0 * 1.12f64.to_radians()).cos()).abs() < 1e-3);
        assert!(matches!(
            bob_biasness_upper(0.7, 0.0, 0.0),
            Err(Error::UndefinedBound(_))
        ));
        assert_eq!(bob_biasness_upper(0.6, 0.9, 0.9).unwrap().value, 1.0);
    }

    #[test]
    fn charlie_biasness_sharp_unbiased() {
        let t = charlie_biasness_upper((4.0 + SQRT_2) / 8.0, 1.0, 1.0, 0.0).unwrap();
        assert!(t.value.abs() < 1e-6);
        assert!(!t.clamped);
    }

    #[test]
    fn charlie_biasness_recovers_true_angle() {
        let p = ProtocolParams::new(0.9, 0.8, 0.4, 0.3).unwrap();
        let s_up = (2.0 * p.alpha).cos();
        let t = charlie_biasness_upper(p_ac_closed(&p), p.eta0, p.eta1, s_up).unwrap();
        assert!((t.value - (2.0 * p.beta).cos()).abs() < 1e-9);
    }

    #[test]
    fn charlie_biasness_flags_unreachable_data() {
        let t = charlie_biasness_upper(0.99, 0.9, 0.9, 0.5).unwrap();
        assert!(t.clamped);
        let t = charlie_biasness_upper(0.2, 0.9, 0.9, 0.5).unwrap();
        assert!(t.clamped);
        assert_eq!(t.value, 1.0);
    }

    #[test]
    fn incompatibility_examples() {
        let p = ProtocolParams::unbiased(0.9, 0.9).unwrap();
        let (ds, _) = incompatibility_bounds(0.75, 0.75, &p).unwrap();
        assert_eq!(ds.value, 0.0);
        let (ds, _) = incompatibility_bounds(0.7768, 0.75, &p).unwrap();
        assert!((ds.value - 0.214).abs() < 1e-3);
    }

    #[test]
    fn sharp_unbiased_conditional_distance() {
        // Bob does nothing at zero sharpness, so Charlie sees pure states.
        let p = ProtocolParams::unbiased(0.0, 0.0).unwrap();
        assert!((conditional_distance(&p) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn report_on_ideal_data_is_consistent() {
        let eta = sharpness_from_theta(8f64.to_radians());
        let s = optimize(eta, eta).unwrap();
        let p = s.params();
        let r = BoundsReport::from_observed(p_ab_closed(&p), p_ac_closed(&p), Some((eta, eta)))
            .unwrap();
        assert!((r.s_up - (2.0 * s.alpha).cos()).abs() < 1e-9);
        assert!((r.t_up - (2.0 * s.beta).cos()).abs() < 1e-6);
        assert!(r.d_s_low > 0.0);
    }

    proptest! {
        #[test]
        fn sharpness_interval_contains_truth(eta in FRAC_1_SQRT_2..1.0f64) {
            let p = ProtocolParams::unbiased(eta, eta).unwrap();
            let (l, u) = sharpness_bounds(p_ab_closed(&p), p_ac_closed(&p)).unwrap();
            prop_assert!(l.value - 1e-9 <= eta && eta <= u.value + 1e-9);
        }

        #[test]
        fn bob_bound_is_sound(
            e0 in 0.05f64..=1.0,
            e1 in 0.05f64..=1.0,
            a in 0.0f64..=FRAC_PI_4,
        ) {
            let p = ProtocolParams::new(e0, e1, a, 0.0).unwrap();
            let b = bob_biasness_upper(p_ab_closed(&p), e0, e1).unwrap();
            prop_assert!(b.value >= (2.0 * a).cos() - 1e-9);
        }
    }

    #[test]
    fn unknown_sharpness_bounds_cover_the_truth() {
        let mut covered = 0;
        for theta in (0..=22).map(f64::from) {
            let eta = sharpness_from_theta(theta.to_radians());
            let opt = optimize(eta, eta).unwrap();
            let p = opt.params();
            let blind = BoundsReport::from_observed(p_ab_closed(&p), p_ac_closed(&p), None).unwrap();
            if !(blind.eta_low <= eta && eta <= blind.eta_up) {
                continue;
            }
            covered += 1;
            assert!(blind.s_up >= (2.0 * opt.alpha).cos() - 1e-9, "θ={theta}");
            assert!(blind.t_up >= (2.0 * opt.beta).cos() - 1e-9, "θ={theta}");
        }
        assert!(covered >= 3, "{covered}");
    }
}
