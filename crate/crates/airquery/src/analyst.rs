//! Query policies and Monte-Carlo accuracy evaluation.
//!
//! Two analysts bracket the threat model:
//!
//! - **Benign** ([`RandomAnalyst`]): every round is a fresh random binary
//!   query, independent of the answers. This is the well-behaved scientist;
//!   the accuracy bound must hold for them with room to spare.
//! - **Adversarial** ([`OverfitAttack`]): spends `k − 1` rounds on random
//!   binary probes, then correlates each probe with the sign of its
//!   observed answer and submits the majority-vote query
//!   `final(x) = 1{Σ_j sign(answer_j − μ)·(2·probe_j(x) − 1) > 0}`. On a
//!   low-noise channel the probe answers leak which domain points are in
//!   the sample, and the final query's empirical mean runs far above its
//!   population mean — the classic adaptive overfitting failure the noise
//!   budget exists to prevent. More noise per answer means less leaked
//!   sign information per probe, which is exactly the trade the bounds
//!   quantify.
//!
//! [`evaluate_accuracy`] runs many independent sessions (parallelized over
//! trials, each on its own derived random streams, so the report is
//! identical regardless of scheduling) and summarizes the per-trial worst
//! errors against a target `α` with a Wilson score interval on the failure
//! rate.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::csvio::{fmt_f64, CsvDoc};
use crate::sim::{
    run_session, sample_dataset, stream_rng, Analyst, ChannelModel, Population, QueryTable,
    SimError, StreamKind, Transcript,
};

/// Which analyst drives a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Non-adaptive random binary queries.
    Benign,
    /// Probe-then-correlate overfitting attack.
    Attack,
}

/// Error for unrecognized policy names.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown policy '{0}' (expected 'benign' or 'attack')")]
pub struct ParsePolicyError(String);

impl std::str::FromStr for Policy {
    type Err = ParsePolicyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "benign" => Ok(Policy::Benign),
            "attack" => Ok(Policy::Attack),
            other => Err(ParsePolicyError(other.to_string())),
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Policy::Benign => "benign",
            Policy::Attack => "attack",
        })
    }
}

/// Draws a uniform random binary query: each domain point independently 0
/// or 1. Bits are taken 64 at a time from the stream, so generation is
/// cheap even for thousand-query sessions on a 10⁴ domain.
pub fn make_random_query(domain: u32, rng: &mut impl Rng) -> QueryTable {
    let mut values = Vec::with_capacity(domain as usize);
    let mut bits: u64 = 0;
    for i in 0..domain {
        if i % 64 == 0 {
            bits = rng.random();
        }
        values.push(((bits >> (i % 64)) & 1) as f64);
    }
    QueryTable::new(values).expect("binary values lie in [0,1]")
}

/// The benign analyst: a fresh random binary query every round, never
/// refusing. Adaptivity is available but unused.
pub struct RandomAnalyst {
    domain: u32,
    rng: ChaCha12Rng,
}

impl RandomAnalyst {
    /// Builds the analyst over the given domain, drawing from `rng`
    /// (conventionally the [`StreamKind::Analyst`] stream of the trial).
    pub fn new(domain: u32, rng: ChaCha12Rng) -> Self {
        Self { domain, rng }
    }
}

impl Analyst for RandomAnalyst {
    fn next_query(&mut self, _history: &Transcript) -> Option<Arc<QueryTable>> {
        Some(Arc::new(make_random_query(self.domain, &mut self.rng)))
    }
}

/// Builds the attack's final query from the probe history: majority vote of
/// the probes, each weighted by the sign of its observed answer minus the
/// population mean `μ` (exact zero differences contribute nothing).
///
/// Scores are accumulated in integers — probes are strictly binary, so the
/// vote is exact and ties are unambiguous (a tied score yields 0).
pub fn overfit_final_query(
    history: &Transcript,
    population_mean: f64,
    domain: u32,
) -> QueryTable {
    let mut scores = vec![0i64; domain as usize];
    for round in &history.rounds {
        let diff = round.normalized - population_mean;
        let sgn: i64 = if diff > 0.0 {
            1
        } else if diff < 0.0 {
            -1
        } else {
            0
        };
        if sgn == 0 {
            continue;
        }
        for (x, score) in scores.iter_mut().enumerate() {
            let pm: i64 = if round.query.value(x as u32) > 0.5 { 1 } else { -1 };
            *score += sgn * pm;
        }
    }
    let values = scores
        .into_iter()
        .map(|s| if s > 0 { 1.0 } else { 0.0 })
        .collect();
    QueryTable::new(values).expect("binary values lie in [0,1]")
}

/// The adversarial analyst: `k − 1` random binary probes, then the
/// correlation query, then refusal.
pub struct OverfitAttack {
    domain: u32,
    k_total: u64,
    population_mean: f64,
    rng: ChaCha12Rng,
}

impl OverfitAttack {
    /// Plans an attack spending `k_total` rounds in all (the last one being
    /// the overfit query). `population_mean` is the attacker's reference
    /// point for answer signs — `0.5` for binary probes on a uniform
    /// population.
    pub fn new(domain: u32, k_total: u64, population_mean: f64, rng: ChaCha12Rng) -> Self {
        Self { domain, k_total, population_mean, rng }
    }
}

impl Analyst for OverfitAttack {
    fn next_query(&mut self, history: &Transcript) -> Option<Arc<QueryTable>> {
        let issued = history.rounds.len() as u64;
        if self.k_total == 0 || issued >= self.k_total {
            None
        } else if issued == self.k_total - 1 {
            Some(Arc::new(overfit_final_query(
                history,
                self.population_mean,
                self.domain,
            )))
        } else {
            Some(Arc::new(make_random_query(self.domain, &mut self.rng)))
        }
    }
}

/// Everything needed to run one trial: deployment shape, channel, session
/// length, and the analyst policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    /// Population domain size `N`.
    pub domain: u32,
    /// Samples per device.
    pub n0: usize,
    /// Number of devices (`1` = point-to-point).
    pub l: usize,
    /// Channel noise standard deviation (`0` allowed: noiseless control).
    pub sigma_ch: f64,
    /// Transmit amplitude.
    pub a_t: f64,
    /// Session budget: number of rounds offered to the analyst.
    pub k: u64,
    /// Which analyst plays.
    pub policy: Policy,
    /// The attack's sign reference; ignored by the benign policy.
    pub population_mean: f64,
}

impl ExperimentSpec {
    /// Instantiates the policy with its own random stream.
    fn make_analyst(&self, rng: ChaCha12Rng) -> Box<dyn Analyst> {
        match self.policy {
            Policy::Benign => Box::new(RandomAnalyst::new(self.domain, rng)),
            Policy::Attack => Box::new(OverfitAttack::new(
                self.domain,
                self.k,
                self.population_mean,
                rng,
            )),
        }
    }
}

/// Runs one complete trial: fresh datasets, fresh channel noise, fresh
/// analyst randomness, all derived from (`master`, `trial`).
pub fn run_trial(
    pop: &Population,
    spec: &ExperimentSpec,
    master: u64,
    trial: u64,
) -> Result<Transcript, SimError> {
    let mut data_rng = stream_rng(master, StreamKind::Data, trial);
    let datasets: Vec<_> = (0..spec.l)
        .map(|_| sample_dataset(pop, spec.n0, &mut data_rng))
        .collect();
    let mut channel = ChannelModel::new(spec.sigma_ch, spec.a_t)?;
    let mut channel_rng = stream_rng(master, StreamKind::Channel, trial);
    let mut analyst = spec.make_analyst(stream_rng(master, StreamKind::Analyst, trial));
    run_session(
        pop,
        &datasets,
        analyst.as_mut(),
        &mut channel,
        spec.k,
        &mut channel_rng,
    )
}

/// The 95% z-value used for all reported intervals.
pub const WILSON_Z95: f64 = 1.96;

/// Wilson score interval for a binomial proportion — well-behaved at the
/// boundary rates Monte-Carlo runs actually produce (0 failures out of n
/// still yields an informative upper limit, unlike the Wald interval).
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Monte-Carlo summary of per-trial worst-case answer errors against a
/// target `α`.
#[derive(Debug, Clone)]
pub struct AccuracyReport {
    /// The target the trials were judged against.
    pub alpha: f64,
    /// Per-trial `max_r |true − normalized|`, in trial order.
    pub max_errors: Vec<f64>,
    /// Trials whose worst error reached `α`.
    pub failures: u64,
    /// `failures / trials`.
    pub failure_rate: f64,
    /// 95% Wilson interval on the failure probability.
    pub wilson95: (f64, f64),
}

impl AccuracyReport {
    /// Number of trials summarized.
    pub fn trials(&self) -> u64 {
        self.max_errors.len() as u64
    }

    /// Lays the report out as CSV: `trial,max_error` rows in trial order,
    /// then a `summary,<failure_rate>` row; the failure count and Wilson
    /// interval ride along as comments. Callers prepend their configuration
    /// comments.
    pub fn to_csv_doc(&self) -> CsvDoc {
        let mut doc = CsvDoc::new(&["trial", "max_error"]);
        doc.comment(format!(
            "failures = {} of {} trials at alpha = {}",
            self.failures,
            self.trials(),
            fmt_f64(self.alpha)
        ));
        doc.comment(format!(
            "wilson95 = [{}, {}]",
            fmt_f64(self.wilson95.0),
            fmt_f64(self.wilson95.1)
        ));
        for (i, e) in self.max_errors.iter().enumerate() {
            doc.push_row(vec![i.to_string(), fmt_f64(*e)]);
        }
        doc.push_row(vec!["summary".into(), fmt_f64(self.failure_rate)]);
        doc
    }
}

/// Runs `trials` independent sessions and reports the failure rate against
/// `alpha`.
///
/// Trials are distributed across threads but derive their randomness from
/// their own trial index, so the resulting report is bit-identical whatever
/// the thread count — including none.
pub fn evaluate_accuracy(
    pop: &Population,
    spec: &ExperimentSpec,
    alpha: f64,
    master: u64,
    trials: u64,
) -> Result<AccuracyReport, SimError> {
    let max_errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(pop, spec, master, t).map(|tr| tr.max_abs_error()))
        .collect::<Result<_, _>>()?;
    let failures = max_errors.iter().filter(|&&e| e >= alpha).count() as u64;
    let failure_rate = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
    let wilson95 = wilson_interval(failures, trials, WILSON_Z95);
    Ok(AccuracyReport {
        alpha,
        max_errors,
        failures,
        failure_rate,
        wilson95,
    })
}
