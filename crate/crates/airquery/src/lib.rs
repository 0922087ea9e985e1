//! Query budgets for adaptive data analysis over Gaussian channels.
//!
//! When an analyst asks a sequence of statistical queries and each next
//! query may depend on the answers so far, reusing one dataset silently
//! overfits: enough adaptive rounds let even a benign analyst chase noise,
//! and an adversarial one can reconstruct the sample. Answering through
//! additive Gaussian noise buys protection, and this crate computes exactly
//! how much: closed-form bounds on the answer accuracy `(α, β)` achievable
//! after `k` adaptive queries on `n` samples at noise level `σ`, the inverse
//! question of the largest safe query budget `k(σ, n, α, β)`, and the noise
//! ratio `s_opt` that maximizes it.
//!
//! The same algebra covers a federated deployment: `L` edge devices holding
//! `n₀` samples each transmit answer shares simultaneously over a Gaussian
//! multiple-access channel, the superposition computes their sum for free,
//! and the receiver sees the pooled answer at an `L`-times-reduced relative
//! noise — equivalent to a single mechanism with `n_eq = L·n₀` and
//! `σ_eq = σ_ch/(L·A_t)` (see [`bounds::to_equivalent`]). Channel noise is
//! recycled as the privacy/stability mechanism instead of being fought.
//!
//! # Modules
//!
//! - [`bounds`] — the closed forms: `f`, `g`, `λ*`, `α(σ,n,k,β)`, `k₁`,
//!   `k₂`, `k = min{k₁,k₂}`, the linearized `k̂₁` fit, `s_opt`, federated
//!   equivalence, amplitude optimization, SNR conventions.
//! - [`special`] — real-branch Lambert W and bracketed root finding, the
//!   only numerics the bounds need.
//! - [`sim`] — executable protocol: population, per-device datasets, query
//!   tables, the Gaussian MAC channel, session transcripts.
//! - [`analyst`] — query policies (benign random, overfitting attack), the
//!   session driver, Monte-Carlo accuracy evaluation with Wilson intervals.
//! - [`config`] — flat `key = value` run configuration with strict unknown
//!   key rejection and documented precedence.
//! - [`cli`] — the `airquery` binary: `bounds`, `figure`, `simulate`, and
//!   `attack-demo` subcommands over the library.
//! - [`figures`] — deterministic CSV datasets behind each figure of the
//!   accompanying analysis.
//! - [`csvio`] — the shared CSV writing conventions (comment headers, full
//!   round-trip float formatting).
//!
//! # Determinism
//!
//! Every random quantity descends from one `u64` master seed through named
//! per-trial streams ([`sim::StreamKind`]); identical seeds give identical
//! transcripts, reports, and CSV bytes on every platform.
//!
//! # Example
//!
//! ```
//! use airquery::bounds::{self, AccuracySpec};
//!
//! let acc = AccuracySpec::new(0.1, 0.05)?;
//! // How many adaptive queries can 10⁶ samples sustain at σ = 0.01?
//! let budget = bounds::k_budget(0.01, 1_000_000, &acc)?;
//! assert!(budget.k > 3000.0);
//! // And what noise ratio would maximize that budget?
//! let s = bounds::s_opt(1_000_000, &acc)?;
//! assert!(s > 0.008 && s < 0.01);
//! # Ok::<(), airquery::bounds::BoundsError>(())
//! ```

pub mod analyst;
pub mod bounds;
pub mod cli;
pub mod config;
pub mod csvio;
pub mod figures;
pub mod sim;
pub mod special;
