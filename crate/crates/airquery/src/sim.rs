//! Executable protocol: the objects the bounds reason about, made runnable.
//!
//! A [`Population`] is a distribution over a finite domain `{0, …, N−1}`;
//! each of `L` edge devices holds a [`Dataset`] of `n₀` i.i.d. samples from
//! it. One protocol round answers one statistical query — a [`QueryTable`]
//! mapping every domain point to a value in `[0, 1]` — as follows: every
//! device computes its local dataset mean of the query, scales it by the
//! transmit amplitude `A_t`, and all devices transmit simultaneously. The
//! Gaussian multiple-access channel superimposes the signals, so the
//! receiver sees
//!
//! ```text
//! y = A_t·Σ_ℓ mean_ℓ + N(0, σ_ch²)
//! ```
//!
//! and normalizes by `L·A_t` to get the pooled empirical answer plus noise
//! of standard deviation `σ_ch/(L·A_t)` — exactly the equivalent
//! point-to-point mechanism of [`crate::bounds::to_equivalent`]. Channel
//! noise is not an impairment here; it is the Gaussian mechanism that keeps
//! the adaptive session honest. `L = 1` gives the plain point-to-point
//! protocol.
//!
//! An [`Analyst`] chooses each round's query after seeing the full
//! [`Transcript`] so far — that adaptivity is the entire point — and
//! [`run_session`] drives the exchange.
//!
//! # Randomness
//!
//! All stochastic pieces (data sampling, channel noise, analyst choices)
//! draw from ChaCha12 streams derived from one master seed via
//! [`stream_rng`], keyed by purpose and trial index. Streams never share
//! state: changing the analyst's strategy cannot perturb the data, and
//! trials are independent and individually reproducible, which is what
//! makes parallel Monte-Carlo runs order-insensitive.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::csvio::{fmt_f64, CsvDoc};

/// Default population domain size used by the CLI and examples.
pub const DEFAULT_DOMAIN: u32 = 10_000;

/// Errors from simulation setup and session execution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// A population weight was negative or non-finite.
    #[error("population weight at index {index} is invalid: {value}")]
    BadWeight { index: usize, value: f64 },
    /// The weight vector was empty or summed to zero.
    #[error("population weights must be non-empty with a positive sum")]
    DegenerateWeights,
    /// A query value fell outside `[0, 1]`.
    #[error("query value at index {index} is outside [0,1]: {value}")]
    BadQueryValue { index: usize, value: f64 },
    /// A query table's length does not match the population domain.
    #[error("query table has {query_len} entries but the domain has {domain}")]
    DomainMismatch { query_len: usize, domain: u32 },
    /// A channel parameter failed its domain requirement.
    #[error("{name} must satisfy {requirement}, got {value}")]
    BadParam {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    /// No datasets were supplied to a session.
    #[error("a session needs at least one device dataset")]
    NoDatasets,
    /// Device datasets had different sizes.
    #[error("device datasets must have equal sizes; got {first} and {other}")]
    UnequalDatasets { first: usize, other: usize },
    /// A dataset sample index fell outside the population domain.
    #[error("dataset sample {value} outside domain of size {domain}")]
    SampleOutOfDomain { value: u32, domain: u32 },
}

/// The purpose-keyed random streams of one experiment.
///
/// The discriminants are part of the reproducibility contract: they enter
/// the ChaCha seed bytes, so renumbering them would silently change every
/// simulated artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamKind {
    /// Dataset sampling from the population.
    Data = 1,
    /// Channel noise.
    Channel = 2,
    /// Analyst-internal choices (e.g. random query generation).
    Analyst = 3,
}

/// Derives the ChaCha12 stream for (`master`, `kind`, `trial`).
///
/// The 32-byte seed is the little-endian concatenation
/// `master || kind || trial || 0⁸`; distinct coordinates give independent
/// streams, and the derivation is pure, so any trial can be replayed in
/// isolation.
pub fn stream_rng(master: u64, kind: StreamKind, trial: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&(kind as u64).to_le_bytes());
    seed[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha12Rng::from_seed(seed)
}

/// A probability distribution over the finite domain `{0, …, N−1}`.
#[derive(Debug, Clone)]
pub struct Population {
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl Population {
    /// The uniform distribution over a domain of `size` points.
    pub fn uniform(size: u32) -> Self {
        let p = 1.0 / size.max(1) as f64;
        Self::from_weights(vec![p; size.max(1) as usize]).expect("uniform weights are valid")
    }

    /// Builds a population from non-negative weights (not necessarily
    /// normalized).
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, SimError> {
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(SimError::BadWeight { index, value: w });
            }
        }
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || total <= 0.0 {
            return Err(SimError::DegenerateWeights);
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self { probs, cdf })
    }

    /// Domain size `N`.
    pub fn domain(&self) -> u32 {
        self.probs.len() as u32
    }

    /// Probability of domain point `x`.
    pub fn prob(&self, x: u32) -> f64 {
        self.probs[x as usize]
    }

    /// The true population answer `E[q(X)] = Σ_x p(x)·q(x)`.
    pub fn mean_query(&self, query: &QueryTable) -> f64 {
        self.probs
            .iter()
            .zip(query.values())
            .map(|(p, q)| p * q)
            .sum()
    }

    /// Draws one sample by inverse-CDF lookup — exactly one `f64` from the
    /// stream per sample, so dataset generation is stride-predictable.
    pub fn sample(&self, rng: &mut impl Rng) -> u32 {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        (idx as u32).min(self.domain() - 1)
    }
}

/// One device's local data: `n₀` sample indices into the population domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    samples: Vec<u32>,
}

impl Dataset {
    /// Wraps raw sample indices (validated against a domain at session
    /// start).
    pub fn from_samples(samples: Vec<u32>) -> Self {
        Self { samples }
    }

    /// Number of samples `n₀`.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// True when the dataset holds no samples.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The raw sample indices.
    pub fn samples(&self) -> &[u32] {
        &self.samples
    }

    /// The local empirical answer `(1/n₀)·Σ_i q(x_i)`.
    pub fn mean_query(&self, query: &QueryTable) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let total: f64 = self.samples.iter().map(|&x| query.value(x)).sum();
        total / self.samples.len() as f64
    }
}

/// Draws an i.i.d. dataset of `n0` samples from the population.
pub fn sample_dataset(pop: &Population, n0: usize, rng: &mut impl Rng) -> Dataset {
    let samples = (0..n0).map(|_| pop.sample(rng)).collect();
    Dataset::from_samples(samples)
}

/// A statistical query: one value in `[0, 1]` per domain point.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTable {
    values: Vec<f64>,
}

impl QueryTable {
    /// Validates that every value lies in `[0, 1]`.
    pub fn new(values: Vec<f64>) -> Result<Self, SimError> {
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(SimError::BadQueryValue { index, value: v });
            }
        }
        Ok(Self { values })
    }

    /// Number of domain points covered.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the table is empty.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The query value at domain point `x`.
    pub fn value(&self, x: u32) -> f64 {
        self.values[x as usize]
    }

    /// All values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The Gaussian multiple-access channel, with a draw counter that makes
/// noise consumption auditable.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    sigma_ch: f64,
    a_t: f64,
    draws: u64,
}

impl ChannelModel {
    /// Builds a channel. `σ_ch = 0` is the noiseless control case — useful
    /// for isolating data-sampling effects — and still consumes one stream
    /// draw per round so that noisy and noiseless runs stay aligned on the
    /// same random streams.
    pub fn new(sigma_ch: f64, a_t: f64) -> Result<Self, SimError> {
        if !(sigma_ch >= 0.0 && sigma_ch.is_finite()) {
            return Err(SimError::BadParam {
                name: "sigma_ch",
                value: sigma_ch,
                requirement: "sigma_ch >= 0",
            });
        }
        if !(a_t > 0.0 && a_t.is_finite()) {
            return Err(SimError::BadParam {
                name: "A_t",
                value: a_t,
                requirement: "A_t > 0",
            });
        }
        Ok(Self { sigma_ch, a_t, draws: 0 })
    }

    /// Channel noise standard deviation.
    pub fn sigma_ch(&self) -> f64 {
        self.sigma_ch
    }

    /// Transmit amplitude.
    pub fn a_t(&self) -> f64 {
        self.a_t
    }

    /// One round of over-the-air aggregation: every device transmits
    /// `A_t·mean_ℓ` simultaneously, and the superposition plus one Gaussian
    /// draw is what the receiver sees (the raw `y`).
    pub fn transmit_sum(&mut self, device_means: &[f64], rng: &mut impl Rng) -> f64 {
        let superposed: f64 = device_means.iter().map(|m| self.a_t * m).sum();
        let z: f64 = rng.sample(StandardNormal);
        self.draws += 1;
        superposed + self.sigma_ch * z
    }

    /// Number of Gaussian draws consumed so far — exactly one per round.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

/// One completed round of the protocol.
#[derive(Debug, Clone)]
pub struct Round {
    /// The query the analyst posed.
    pub query: Arc<QueryTable>,
    /// The population ground truth `E[q(X)]`.
    pub true_answer: f64,
    /// The raw channel output `y` before normalization.
    pub received: f64,
    /// `y/(L·A_t)`: the pooled empirical answer plus normalized noise —
    /// what the analyst actually learns.
    pub normalized: f64,
}

impl Round {
    /// `|true − normalized|`: this round's answer error.
    pub fn abs_error(&self) -> f64 {
        (self.true_answer - self.normalized).abs()
    }
}

/// The full record of a session: what an auditor would keep.
#[derive(Debug, Clone, Default)]
pub struct Transcript {
    /// Completed rounds in order.
    pub rounds: Vec<Round>,
    /// True when the analyst refused a query before the budget ran out.
    pub ended_early: bool,
}

impl Transcript {
    /// The worst answer error across the session (`0` for an empty
    /// transcript).
    pub fn max_abs_error(&self) -> f64 {
        self.rounds
            .iter()
            .map(Round::abs_error)
            .fold(0.0, f64::max)
    }

    /// Lays the transcript out as a CSV document
    /// (`round,true_answer,received_normalized,abs_error`; the round index
    /// is 0-based). Callers prepend their configuration comments.
    pub fn to_csv_doc(&self) -> CsvDoc {
        let mut doc = CsvDoc::new(&["round", "true_answer", "received_normalized", "abs_error"]);
        for (i, r) in self.rounds.iter().enumerate() {
            doc.push_row(vec![
                i.to_string(),
                fmt_f64(r.true_answer),
                fmt_f64(r.normalized),
                fmt_f64(r.abs_error()),
            ]);
        }
        doc
    }
}

/// A query strategy. Implementations see the whole history — that is what
/// makes the analysis adaptive — and may refuse (`None`) to end the session
/// early.
pub trait Analyst {
    /// Chooses the next query given everything observed so far.
    fn next_query(&mut self, history: &Transcript) -> Option<Arc<QueryTable>>;
}

/// Drives a full session: up to `k` rounds of query → over-the-air
/// aggregation → normalized answer, against the given devices and channel.
///
/// Validates that all datasets are non-empty, equally sized, and contained
/// in the population domain, and that every query matches the domain. The
/// channel's noise stream is the caller's: pass the
/// [`StreamKind::Channel`] stream for the trial being run.
pub fn run_session(
    pop: &Population,
    datasets: &[Dataset],
    analyst: &mut dyn Analyst,
    channel: &mut ChannelModel,
    k: u64,
    channel_rng: &mut impl Rng,
) -> Result<Transcript, SimError> {
    if datasets.is_empty() {
        return Err(SimError::NoDatasets);
    }
    let first = datasets[0].len();
    for d in datasets {
        if d.len() != first {
            return Err(SimError::UnequalDatasets { first, other: d.len() });
        }
        if d.is_empty() {
            return Err(SimError::UnequalDatasets { first: 0, other: 0 });
        }
        for &x in d.samples() {
            if x >= pop.domain() {
                return Err(SimError::SampleOutOfDomain { value: x, domain: pop.domain() });
            }
        }
    }

    let l = datasets.len() as f64;
    let mut transcript = Transcript::default();
    for _ in 0..k {
        let Some(query) = analyst.next_query(&transcript) else {
            transcript.ended_early = true;
            break;
        };
        if query.len() != pop.domain() as usize {
            return Err(SimError::DomainMismatch {
                query_len: query.len(),
                domain: pop.domain(),
            });
        }
        let means: Vec<f64> = datasets.iter().map(|d| d.mean_query(&query)).collect();
        let received = channel.transmit_sum(&means, channel_rng);
        let normalized = received / (l * channel.a_t());
        let true_answer = pop.mean_query(&query);
        transcript.rounds.push(Round {
            query,
            true_answer,
            received,
            normalized,
        });
    }
    Ok(transcript)
}
