//! Poisson-count simulation of the experiment and the spread of the
//! reconstructed success probabilities.

use seqrac::montecarlo::{
    estimate_sd, mean_sd, reconstruct, simulate_counts, simulate_many, McConfig, TrialSchedule,
};
use seqrac::optimizer::optimize;
use seqrac::protocol::{p_ab_closed, p_ac_closed};

fn main() -> seqrac::Result<()> {
    let params = optimize(0.95, 0.95)?.params();
    let config = McConfig::default();

    let schedule = TrialSchedule::bob(config.total_counts, config.duration, config.groups)?;
    let record = simulate_counts(&schedule, &params, 7);
    let rec = reconstruct(&schedule, &record)?;
    let sd = estimate_sd(&schedule, &record, config.groups, 7)?;
    println!("single run, {} counts", record.total());
    for (k, (p, s)) in rec.per_input.iter().zip(&sd.per_input).enumerate() {
        println!("  input {k}: {p:.5} +/- {s:.5}");
    }
    println!("  P_AB = {:.5} +/- {:.5} (theory {:.5})", rec.p, sd.p, p_ab_closed(&params));

    let runs = simulate_many(&params, &config, 2021, 50)?;
    let (m_ab, s_ab) = mean_sd(&runs.iter().map(|r| r.p_ab).collect::<Vec<_>>());
    let (m_ac, s_ac) = mean_sd(&runs.iter().map(|r| r.p_ac).collect::<Vec<_>>());
    println!("\n50 runs:");
    println!("  P_AB mean {m_ab:.5}, spread {s_ab:.5}, theory {:.5}", p_ab_closed(&params));
    println!("  P_AC mean {m_ac:.5}, spread {s_ac:.5}, theory {:.5}", p_ac_closed(&params));
    Ok(())
}
