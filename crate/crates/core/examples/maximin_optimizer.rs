//! Maximin search: pick Bob's and Charlie's measurement angles so that the
//! worse of the two decoders is as good as possible.

use std::f64::consts::FRAC_1_SQRT_2;

use seqrac::optimizer::{best_beta, optimize, unbiased_violation_interval};
use seqrac::protocol::sharpness_from_theta;

fn main() -> seqrac::Result<()> {
    let (lo, hi) = unbiased_violation_interval();
    println!("unbiased measurements give a double violation for eta in ({lo:.5}, {hi:.5})\n");

    println!("theta_deg  eta0    eta1    alpha    beta     min P     branch");
    for theta_deg in (0..=11).map(|k| 2.0 * k as f64) {
        let eta1 = sharpness_from_theta(f64::to_radians(theta_deg));
        let mut seen = Vec::new();
        for eta0 in [1.0, FRAC_1_SQRT_2, eta1] {
            if seen.contains(&eta0) {
                continue;
            }
            seen.push(eta0);
            let s = optimize(eta0, eta1)?;
            println!(
                "{theta_deg:9.1}  {eta0:.4}  {eta1:.4}  {:6.2}  {:6.2}  {:.6}  {}",
                s.alpha_deg(),
                s.beta_deg(),
                s.p_equal,
                s.branch.as_str()
            );
        }
    }

    let alpha = 30f64.to_radians();
    println!(
        "\nCharlie's best response to alpha=30 at eta=0.9: beta={:.3} deg",
        best_beta(alpha, 0.9, 0.9).to_degrees()
    );
    Ok(())
}
