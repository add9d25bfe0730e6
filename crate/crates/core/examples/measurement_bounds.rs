//! Bounds on the unknown measurements from observed success rates alone.

use seqrac::bounds::{sharpness_bounds, BoundsReport};
use seqrac::optimizer::optimize;
use seqrac::protocol::sharpness_from_theta;

fn main() -> seqrac::Result<()> {
    println!("true eta  P_AB      P_AC      eta_low  eta_up");
    for theta_deg in [2.0, 6.0, 10.0, 14.0] {
        let eta = sharpness_from_theta(f64::to_radians(theta_deg));
        let r = optimize(eta, eta)?.report();
        let (low, up) = sharpness_bounds(r.p_ab, r.p_ac)?;
        println!(
            "{eta:.4}    {:.6}  {:.6}  {:.4}   {:.4}{}",
            r.p_ab,
            r.p_ac,
            low.value,
            up.value,
            if low.clamped || up.clamped { "  (clamped)" } else { "" }
        );
    }

    // With and without knowledge of the sharpness.
    let (p_ab, p_ac) = (0.7915, 0.7685);
    let blind = BoundsReport::from_observed(p_ab, p_ac, None)?;
    let known = BoundsReport::from_observed(p_ab, p_ac, Some((0.85, 0.85)))?;
    for (label, b) in [("eta unknown", blind), ("eta = 0.85", known)] {
        println!(
            "\n{label}: s_up={:.4} t_up={:.4} D_s>={:.4} D_t>={:.4} m={:.4} clamped={:?}",
            b.s_up, b.t_up, b.d_s_low, b.d_t_low, b.m, b.clamped
        );
    }
    Ok(())
}
