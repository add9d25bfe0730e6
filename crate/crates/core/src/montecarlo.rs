//! Finite-statistics emulation of the experiment.
//!
//! Every trial fixes all party choices and outcomes, so its coincidence
//! count is Poisson with mean `pair_rate × duration × Born probability`.
//! Each trial window is cut into equal sub-windows whose counts are drawn
//! independently; the sub-counts later feed the grouped error estimate.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::protocol::{
    alice_povm, bob_kraus_pair, charlie_povm, decodes, Bit, ProtocolParams,
};
use crate::qcore::max_entangled_state;

/// Expected coincidences per full measurement of one decoder.
pub const DEFAULT_TOTAL_COUNTS: f64 = 4.0e5;
/// Length of one trial window in seconds.
pub const DEFAULT_DURATION: f64 = 4.0;
/// Sub-windows per trial, and hence counting groups.
pub const DEFAULT_GROUPS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    Bob,
    Charlie,
}

/// Every choice and outcome fixed in one trial. For Charlie's trials `y` is
/// the setting Bob used on the way and `choice` is Charlie's `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrialSetting {
    pub x0: Bit,
    pub x1: Bit,
    pub choice: Bit,
    pub y: Bit,
    pub a: Bit,
    pub outcome: Bit,
}

impl TrialSetting {
    pub fn input(&self) -> (Bit, Bit, Bit) {
        (self.x0, self.x1, self.choice)
    }

    pub fn success(&self) -> bool {
        decodes(self.x0, self.x1, self.choice, self.a, self.outcome)
    }
}

/// List of trials for one decoder together with the counting parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSchedule {
    pub decoder: Decoder,
    pub trials: Vec<TrialSetting>,
    /// Source pair rate in counts per second.
    pub pair_rate: f64,
    /// Window length per trial in seconds.
    pub duration: f64,
    pub sub_windows: usize,
}

impl TrialSchedule {
    /// 32 trials over `(x₀, x₁, y, a, b)` calibrated so that a full
    /// measurement yields `total_counts` coincidences on average.
    pub fn bob(total_counts: f64, duration: f64, sub_windows: usize) -> Result<Self> {
        let mut trials = Vec::with_capacity(32);
        for [x0, x1, y, a, b] in bits::<5>() {
            trials.push(TrialSetting {
                x0,
                x1,
                choice: y,
                y,
                a,
                outcome: b,
            });
        }
        Self::calibrated(Decoder::Bob, trials, 8, total_counts, duration, sub_windows)
    }

    /// 64 trials over `(x₀, x₁, z, y, a, c)`; Bob's outcome is not recorded.
    pub fn charlie(total_counts: f64, duration: f64, sub_windows: usize) -> Result<Self> {
        let mut trials = Vec::with_capacity(64);
        for [x0, x1, z, y, a, c] in bits::<6>() {
            trials.push(TrialSetting {
                x0,
                x1,
                choice: z,
                y,
                a,
                outcome: c,
            });
        }
        Self::calibrated(Decoder::Charlie, trials, 16, total_counts, duration, sub_windows)
    }

    fn calibrated(
        decoder: Decoder,
        trials: Vec<TrialSetting>,
        settings: usize,
        total_counts: f64,
        duration: f64,
        sub_windows: usize,
    ) -> Result<Self> {
        check_range("total counts", total_counts, 0.0, f64::MAX, "[0, ∞)")?;
        if !(duration > 0.0) {
            return Err(Error::Domain {
                what: "duration",
                value: duration,
                range: "(0, ∞)",
            });
        }
        if sub_windows == 0 {
            return Err(Error::Grouping("need at least one sub-window".into()));
        }
        // Outcome probabilities sum to one for each of the `settings`
        // choices of inputs.
        let pair_rate = total_counts / (settings as f64 * duration);
        Ok(Self {
            decoder,
            trials,
            pair_rate,
            duration,
            sub_windows,
        })
    }

    /// Born probability of the trial's outcomes given its inputs.
    pub fn probability(&self, trial: &TrialSetting, params: &ProtocolParams) -> f64 {
        let rho = max_entangled_state();
        let x = trial.x0 ^ trial.x1;
        let ma = alice_povm(x, trial.a);
        let pair = bob_kraus_pair(trial.y, params);
        let effect = match self.decoder {
            Decoder::Bob => {
                let k = pair.get(trial.outcome);
                k.adjoint() * *k
            }
            Decoder::Charlie => {
                let mc = charlie_povm(trial.choice, trial.outcome, params.beta);
                Bit::BOTH
                    .iter()
                    .map(|&b| {
                        let k = pair.get(b);
                        k.adjoint() * mc * *k
                    })
                    .sum()
            }
        };
        rho.local_expectation(&ma, &effect).max(0.0)
    }

    pub fn expected_counts(&self, params: &ProtocolParams) -> Vec<f64> {
        self.trials
            .iter()
            .map(|t| self.pair_rate * self.duration * self.probability(t, params))
            .collect()
    }

    pub fn expected_total(&self, params: &ProtocolParams) -> f64 {
        self.expected_counts(params).iter().sum()
    }
}

fn bits<const N: usize>() -> impl Iterator<Item = [Bit; N]> {
    (0..1usize << N).map(|k| std::array::from_fn(|i| Bit::from_index(k >> (N - 1 - i))))
}

/// Observed counts for one schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountsRecord {
    pub seed: u64,
    /// `sub_counts[trial][window]`.
    pub sub_counts: Vec<Vec<u64>>,
}

impl CountsRecord {
    pub fn counts(&self) -> Vec<u64> {
        self.sub_counts.iter().map(|w| w.iter().sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.sub_counts.iter().flatten().sum()
    }
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

fn draw(schedule: &TrialSchedule, params: &ProtocolParams, rng: &mut ChaCha8Rng, seed: u64) -> CountsRecord {
    let windows = schedule.sub_windows as f64;
    let sub_counts = schedule
        .expected_counts(params)
        .into_iter()
        .map(|mean| {
            (0..schedule.sub_windows)
                .map(|_| poisson(rng, mean / windows))
                .collect()
        })
        .collect();
    CountsRecord { seed, sub_counts }
}

/// Draws every sub-window count from a generator seeded with `seed`.
pub fn simulate_counts(schedule: &TrialSchedule, params: &ProtocolParams, seed: u64) -> CountsRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw(schedule, params, &mut rng, seed)
}

/// Success fraction for each of the eight inputs `(x₀, x₁, choice)` and
/// their mean.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reconstruction {
    pub per_input: Vec<f64>,
    pub p: f64,
}

fn fractions(
    schedule: &TrialSchedule,
    count: impl Fn(usize) -> u64,
) -> Result<Reconstruction> {
    let mut tally: BTreeMap<(Bit, Bit, Bit), (u64, u64)> = BTreeMap::new();
    for (i, t) in schedule.trials.iter().enumerate() {
        let n = count(i);
        let e = tally.entry(t.input()).or_default();
        e.1 += n;
        if t.success() {
            e.0 += n;
        }
    }
    let mut per_input = Vec::with_capacity(tally.len());
    for ((x0, x1, d), (good, all)) in tally {
        if all == 0 {
            return Err(Error::Grouping(format!(
                "no counts for input x0={}, x1={}, choice={}",
                x0.index(),
                x1.index(),
                d.index()
            )));
        }
        per_input.push(good as f64 / all as f64);
    }
    let p = per_input.iter().sum::<f64>() / per_input.len() as f64;
    Ok(Reconstruction { per_input, p })
}

/// Estimates the average success probability from all counts.
pub fn reconstruct(schedule: &TrialSchedule, record: &CountsRecord) -> Result<Reconstruction> {
    check_shape(schedule, record)?;
    let totals = record.counts();
    fractions(schedule, |i| totals[i])
}

fn check_shape(schedule: &TrialSchedule, record: &CountsRecord) -> Result<()> {
    if record.sub_counts.len() != schedule.trials.len() {
        return Err(Error::Grouping(format!(
            "record has {} trials, schedule has {}",
            record.sub_counts.len(),
            schedule.trials.len()
        )));
    }
    Ok(())
}

/// Grouped error estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdEstimate {
    /// Standard error of each input's success fraction.
    pub per_input: Vec<f64>,
    /// `(1/8) Σ` of the per-input values.
    pub p: f64,
}

/// Standard deviation of the reconstructed probability from `groups`
/// randomly formed counting sets.
///
/// Each trial's sub-window counts are shuffled with a generator seeded by
/// `seed`, and group `g` collects the `g`-th shuffled sub-count of every
/// trial. The spread of each input's success fraction across groups,
/// divided by `√groups`, estimates the error of the full-data fraction.
/// Per-input errors are then summed with weight `1/8`.
pub fn estimate_sd(
    schedule: &TrialSchedule,
    record: &CountsRecord,
    groups: usize,
    seed: u64,
) -> Result<SdEstimate> {
    check_shape(schedule, record)?;
    if groups < 2 {
        return Err(Error::Grouping("need at least two groups".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = record.sub_counts.clone();
    for (i, w) in shuffled.iter_mut().enumerate() {
        if w.len() < groups {
            return Err(Error::Grouping(format!(
                "trial {i} has {} sub-windows, fewer than {groups} groups",
                w.len()
            )));
        }
        w.shuffle(&mut rng);
    }
    let per_group = (0..groups)
        .map(|g| {
            // Leftover sub-windows beyond a multiple of `groups` are
            // spread round-robin.
            fractions(schedule, |i| {
                shuffled[i].iter().skip(g).step_by(groups).sum()
            })
            .map_err(|e| Error::Grouping(format!("group {g}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let inputs = per_group[0].per_input.len();
    let n = groups as f64;
    let per_input: Vec<f64> = (0..inputs)
        .map(|k| {
            let values: Vec<f64> = per_group.iter().map(|r| r.per_input[k]).collect();
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        })
        .collect();
    let p = per_input.iter().sum::<f64>() / inputs as f64;
    Ok(SdEstimate { per_input, p })
}

/// Counting parameters shared by both decoders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McConfig {
    pub total_counts: f64,
    pub duration: f64,
    pub groups: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            total_counts: DEFAULT_TOTAL_COUNTS,
            duration: DEFAULT_DURATION,
            groups: DEFAULT_GROUPS,
        }
    }
}

/// One emulated run of both decoders.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McRun {
    pub seed: u64,
    pub p_ab: f64,
    pub p_ac: f64,
    pub sd_ab: f64,
    pub sd_ac: f64,
    pub counts_ab: u64,
    pub counts_ac: u64,
}

/// Emulates both measurements with independent streams derived from `seed`.
pub fn simulate_experiment(params: &ProtocolParams, config: &McConfig, seed: u64) -> Result<McRun> {
    let bob = TrialSchedule::bob(config.total_counts, config.duration, config.groups)?;
    let charlie = TrialSchedule::charlie(config.total_counts, config.duration, config.groups)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ab = draw(&bob, params, &mut rng, seed);
    rng.set_stream(1);
    let ac = draw(&charlie, params, &mut rng, seed);
    let (rab, rac) = (reconstruct(&bob, &ab)?, reconstruct(&charlie, &ac)?);
    Ok(McRun {
        seed,
        p_ab: rab.p,
        p_ac: rac.p,
        sd_ab: estimate_sd(&bob, &ab, config.groups, seed)?.p,
        sd_ac: estimate_sd(&charlie, &ac, config.groups, seed ^ 0x5eed)?.p,
        counts_ab: ab.total(),
        counts_ac: ac.total(),
    })
}

/// Runs `runs` independent experiments in parallel. Run `k` uses stream `k`
/// of the generator seeded by `master_seed`, so results do not depend on
/// scheduling.
pub fn simulate_many(
    params: &ProtocolParams,
    config: &McConfig,
    master_seed: u64,
    runs: usize,
) -> Result<Vec<McRun>> {
    (0..runs)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(k as u64);
            let seed = rand::RngCore::next_u64(&mut rng);
            simulate_experiment(params, config, seed)
        })
        .collect()
}

/// Mean and standard deviation of a sample.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}
