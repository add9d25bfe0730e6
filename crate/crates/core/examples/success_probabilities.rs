//! Success probabilities for Bob, Charlie and joint decoding, printed next to
//! the brute-force Born-rule enumeration for the same settings.

use seqrac::protocol::{
    p_ab_bruteforce, p_ab_closed, p_abc, p_abc_bruteforce, p_ac_bruteforce, p_ac_closed,
    sharpness_from_theta, ProtocolParams,
};

fn main() -> seqrac::Result<()> {
    println!("theta_deg  eta     P_AB      P_AC      P_ABC     |closed-brute|");
    for theta_deg in [0.0, 4.0, 8.0, 12.0, 16.0, 20.0, 22.5] {
        let eta = sharpness_from_theta(f64::to_radians(theta_deg));
        let p = ProtocolParams::unbiased(eta, eta)?;
        let worst = [
            p_ab_closed(&p) - p_ab_bruteforce(&p),
            p_ac_closed(&p) - p_ac_bruteforce(&p),
            p_abc(&p) - p_abc_bruteforce(&p),
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        println!(
            "{theta_deg:9.1}  {eta:.4}  {:.6}  {:.6}  {:.6}  {worst:.1e}",
            p_ab_closed(&p),
            p_ac_closed(&p),
            p_abc(&p)
        );
    }

    // Biased measurements trade Bob's advantage for Charlie's.
    let p = ProtocolParams::new(0.95, 0.95, 20f64.to_radians(), 30f64.to_radians())?;
    println!(
        "\nalpha=20 beta=30 at eta=0.95: P_AB={:.6} P_AC={:.6}",
        p_ab_closed(&p),
        p_ac_closed(&p)
    );
    Ok(())
}
