//! Accuracy and query-budget bounds for Gaussian-mechanism adaptive data
//! analysis, in closed form.
//!
//! The central objects are the guarantee pair `(α, β)` — answers stay within
//! `α` of the truth except with probability `β` — and the achievable query
//! budget of a mechanism that answers statistical queries with Gaussian noise
//! of normalized standard deviation `σ`. Concretely, for a dataset of `n`
//! samples and `k` answered queries,
//!
//! ```text
//! α(σ, n, k, β) = max{ √((2/(nβ))·g(k/(nσ²))),  √(8σ²·ln(4k/β)) }
//! ```
//!
//! where `g(c) = min_{λ∈(0,1)} f(λ)` with `f(λ) = (1/λ)(c − ln(1−λ))`. The
//! first term grows when the noise is too small for the number of queries
//! (over-leakage), the second when the noise itself drowns the answers
//! (under-leakage). Inverting each term in `k` at a target `(α, β)` gives
//!
//! ```text
//! k₁ = nσ²·g⁻¹(nα²β/2)      k₂ = (β/4)·e^{α²/(8σ²)}      k = min{k₁, k₂}
//! ```
//!
//! and the crossing point `k₁ = k₂`, reached at `σ = s_opt(n)`, maximizes the
//! budget. A federated deployment of `L` edge points with `n₀` samples each,
//! transmitting simultaneously over a Gaussian multiple-access channel with
//! amplitude `A_t`, collapses to the same formulas through the equivalent
//! point-to-point parameters `n_eq = L·n₀`, `σ_eq = σ_ch/(L·A_t)` (see
//! [`to_equivalent`]).
//!
//! # The minimizer in closed form
//!
//! The stationarity condition of `f` puts the optimal `λ*` on the lower
//! Lambert branch: `λ* = 1 + 1/W₋₁(−e^{−(c+1)})`. Writing `u = −W₋₁` turns
//! the branch equation into `u − ln u = c + 1`, and substituting back shows
//! the minimum value itself is exactly that `u`:
//!
//! ```text
//! g(c) = u,   where u ≥ 1 solves u − ln u = c + 1,   λ* = 1 − 1/u.
//! ```
//!
//! So `g` needs one scalar solve (done in log space, no underflow at large
//! `c`), and `g⁻¹(y) = y − ln y − 1` is explicit. Both identities are
//! cross-checked against brute-force grid minimization and the textbook
//! `W`-form in the tests.

use crate::special::{self, BracketedRoot, SpecialError};
use thiserror::Error;

/// Central record of the numerical tolerances used across the crate.
pub mod tol {
    /// Closed-form values vs brute-force oracles (relative).
    pub const ORACLE_REL: f64 = 1e-5;
    /// Absolute bracket width for root finding.
    pub const ROOT_ABS: f64 = 1e-9;
    /// Internal identity cross-checks, e.g. `g(g⁻¹(y)) = y` (relative).
    pub const IDENTITY_REL: f64 = 1e-9;
}

/// The attainable infimum of `g` (open: approached as `c → 0⁺`, never
/// reached). From `u − ln u = c + 1`: as `c → 0⁺`, `u → 1⁺`, so `g → 1`.
/// Targets `y ≤ 1` are therefore outside the range of `g`.
pub const INF_G: f64 = 1.0;

/// Errors from bound evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    /// A parameter failed its domain requirement.
    #[error("{name} must satisfy {requirement}, got {value}")]
    Param {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    /// A target value for `g⁻¹` at or below the attainable infimum of `g`.
    /// Reaching this through `k1` means `nα²β/2 ≤ 1`: the dataset is too
    /// small to grant any query budget at this `(α, β)`.
    #[error(
        "target {y} is not attainable by g (inf g = {INF_G}, approached as c → 0+); \
         via k1 this means n·alpha^2·beta/2 <= 1, i.e. n is too small for this (alpha, beta)"
    )]
    BelowRange { y: f64 },
    /// Propagated special-function failure.
    #[error(transparent)]
    Special(#[from] SpecialError),
}

fn require(cond: bool, name: &'static str, value: f64, requirement: &'static str)
    -> Result<(), BoundsError>
{
    if cond {
        Ok(())
    } else {
        Err(BoundsError::Param { name, value, requirement })
    }
}

/// Target accuracy pair `(α, β)`: answers deviate from the truth by at least
/// `α` with probability at most `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    /// Maximum tolerated answer error on the normalized `[0,1]` scale.
    pub alpha: f64,
    /// Maximum probability of exceeding `alpha`.
    pub beta: f64,
}

impl AccuracySpec {
    /// Builds a spec, requiring `0 < α ≤ 1` and `0 < β < 1`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self, BoundsError> {
        require(alpha > 0.0 && alpha <= 1.0, "alpha", alpha, "0 < alpha <= 1")?;
        require(beta > 0.0 && beta < 1.0, "beta", beta, "0 < beta < 1")?;
        Ok(Self { alpha, beta })
    }
}

/// One operating point of the noisy answering mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismPoint {
    /// Dataset size.
    pub n: u64,
    /// Gaussian noise standard deviation on the normalized answer scale.
    pub sigma: f64,
    /// Query budget. Real-valued; floor it only when reporting protocol
    /// round counts.
    pub k: f64,
}

impl MechanismPoint {
    /// Builds a point, requiring `n ≥ 1`, `σ > 0`, `k > 0`.
    pub fn new(n: u64, sigma: f64, k: f64) -> Result<Self, BoundsError> {
        require(n >= 1, "n", n as f64, "n >= 1")?;
        require(sigma > 0.0 && sigma.is_finite(), "sigma", sigma, "sigma > 0")?;
        require(k > 0.0 && k.is_finite(), "k", k, "k > 0")?;
        Ok(Self { n, sigma, k })
    }

    /// The leakage ratio `c = k/(nσ²)` that drives the first bound term.
    pub fn c(&self) -> f64 {
        self.k / (self.n as f64 * self.sigma * self.sigma)
    }
}

/// Physical parameters of the (possibly federated) deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Samples held by each edge point.
    pub n0: u64,
    /// Number of edge points; `1` for point-to-point.
    pub l: u64,
    /// Physical channel noise standard deviation. Zero is accepted so the
    /// simulator can run noiseless control experiments; every bound
    /// computation that divides by it checks positivity itself.
    pub sigma_ch: f64,
    /// Maximum transmit amplitude.
    pub a_t: f64,
}

impl SystemConfig {
    /// Builds a config, requiring `n0 ≥ 1`, `L ≥ 1`, `σ_ch ≥ 0`, `A_t > 0`.
    pub fn new(n0: u64, l: u64, sigma_ch: f64, a_t: f64) -> Result<Self, BoundsError> {
        require(n0 >= 1, "n0", n0 as f64, "n0 >= 1")?;
        require(l >= 1, "L", l as f64, "L >= 1")?;
        require(
            sigma_ch >= 0.0 && sigma_ch.is_finite(),
            "sigma_ch",
            sigma_ch,
            "sigma_ch >= 0",
        )?;
        require(a_t > 0.0 && a_t.is_finite(), "A_t", a_t, "A_t > 0")?;
        Ok(Self { n0, l, sigma_ch, a_t })
    }
}

/// Straight-line approximation `k̂₁ = w·(n²σ²α²β)/2 + b·nσ²` of `k₁` in its
/// near-linear regime, with the fit's provenance attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    /// Coefficient of the quadratic-in-`n` term.
    pub w: f64,
    /// Coefficient of the linear-in-`n` term (negative: the line crosses
    /// `g`'s graph from below).
    pub b: f64,
    /// The `c` interval the fit was computed over; the lower end stays at
    /// `10` or above, where `g` has entered its linear regime.
    pub fit_range_c: (f64, f64),
    /// Largest `|k̂₁ − k₁|/k₁` observed at the fit's own sample points.
    pub max_rel_residual: f64,
}

impl LinearFit {
    /// Evaluates `k̂₁(σ; n, α, β) = w·n²σ²α²β/2 + b·nσ²`.
    pub fn khat1(&self, sigma: f64, n: u64, acc: &AccuracySpec) -> f64 {
        let nf = n as f64;
        let y = nf * acc.alpha * acc.alpha * acc.beta / 2.0;
        nf * sigma * sigma * (self.w * y + self.b)
    }
}

/// Which constraint produced the final budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetLimit {
    /// `k₁` binds: accuracy is limited by information leakage (noise too
    /// small for the query count). At the crossing `k₁ = k₂` this label is
    /// reported, both constraints being active.
    OverLeakage,
    /// `k₂` binds: accuracy is limited by the noise itself.
    UnderLeakage,
    /// `nα²β/2 ≤ 1`: no budget exists at this `(α, β)`; `k` is zero.
    DatasetTooSmall,
}

impl BudgetLimit {
    /// Stable lower-case label used in CLI output and CSV columns.
    pub fn label(&self) -> &'static str {
        match self {
            BudgetLimit::OverLeakage => "over-leakage",
            BudgetLimit::UnderLeakage => "under-leakage",
            BudgetLimit::DatasetTooSmall => "dataset-too-small",
        }
    }
}

/// A computed query budget with both constituents and degeneracy flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryBudget {
    /// `min{k₁, k₂}`, or `0` when no budget exists.
    pub k: f64,
    /// The leakage bound `k₁`, absent when `nα²β/2 ≤ 1` puts it out of range.
    pub k1: Option<f64>,
    /// The noise bound `k₂`; `+∞` when its exponent overflows (see
    /// [`QueryBudget::k2_saturated`]).
    pub k2: f64,
    /// True when `k₂` overflowed the floating range — the budget is then
    /// unbounded by `k₂` and `k₁` alone decides. Report writers must emit
    /// this flag rather than a raw infinity.
    pub k2_saturated: bool,
    /// Which constraint decided `k`.
    pub limit: BudgetLimit,
}

/// Solves `u − ln u = t` on `u ≥ 1`; equals `−W₋₁(−e^{−t})`.
fn breakeven_u(t: f64) -> Result<f64, BoundsError> {
    Ok(-special::lambert_w_minus1_neg_exp(t)?)
}

/// `h − ln(1+h)`, series-corrected so the cancellation at small `h` does not
/// cost relative accuracy. This is `g⁻¹(1+h)`.
fn x_minus_ln1p(h: f64) -> f64 {
    if h.abs() < 1e-4 {
        // h − ln(1+h) = h²/2 − h³/3 + h⁴/4 − …
        h * h * (0.5 - h * (1.0 / 3.0 - h * 0.25))
    } else {
        h - h.ln_1p()
    }
}

/// The per-λ objective `f(λ) = (1/λ)(c − ln(1−λ))` whose minimum over
/// `λ ∈ (0,1)` is `g(c)`.
///
/// `c = 0` is accepted (the minimand is perfectly well defined there and the
/// degenerate case is useful in tests); negative `c` is rejected along with
/// `λ` outside the open unit interval. `λ = 0` is a pole of the `1/λ`
/// factor, `λ = 1` a pole of the logarithm.
pub fn f_lambda(lambda: f64, c: f64) -> Result<f64, BoundsError> {
    require(
        lambda > 0.0 && lambda < 1.0,
        "lambda",
        lambda,
        "0 < lambda < 1",
    )?;
    require(c >= 0.0 && c.is_finite(), "c", c, "c >= 0")?;
    Ok((c - (-lambda).ln_1p()) / lambda)
}

/// The minimizing `λ* = 1 + 1/W₋₁(−e^{−(c+1)}) = 1 − 1/u ∈ (0, 1)`.
///
/// Only the lower branch of W yields a `λ` inside the unit interval, and the
/// log-space evaluation keeps large `c` exact where `e^{−(c+1)}` underflows.
pub fn lambda_star(c: f64) -> Result<f64, BoundsError> {
    Ok(1.0 - 1.0 / g(c)?)
}

/// `g(c) = min_{λ∈(0,1)} f(λ)`, evaluated in closed form.
///
/// Equal to the `u ≥ 1` solving `u − ln u = c + 1`; see the module docs for
/// why the textbook `W`-form collapses to this. Strictly increasing, with
/// range `(1, ∞)`.
pub fn g(c: f64) -> Result<f64, BoundsError> {
    require(c > 0.0 && c.is_finite(), "c", c, "c > 0")?;
    if c < 1e-8 {
        // Forming t = c + 1 would absorb the low bits of a tiny c; expand
        // u(1 + c) directly instead: u = 1 + s + s²/3 + s³/36 + O(s⁴) with
        // s = √(2c). The truncation error is below 4c² relative.
        let s = (2.0 * c).sqrt();
        return Ok(1.0 + s + s * s * (1.0 / 3.0 + s / 36.0));
    }
    breakeven_u(c + 1.0)
}

/// Inverse of `g`: the `c > 0` with `g(c) = y`, for `y > 1`.
///
/// From `u − ln u = c + 1` at `u = y`: `g⁻¹(y) = y − ln y − 1`, evaluated
/// with series protection against cancellation just above `y = 1`.
///
/// # Errors
///
/// [`BoundsError::BelowRange`] for `y ≤ 1 = inf g` (nothing maps there).
pub fn g_inverse(y: f64) -> Result<f64, BoundsError> {
    require(y.is_finite(), "y", y, "finite")?;
    if y <= INF_G {
        return Err(BoundsError::BelowRange { y });
    }
    Ok(x_minus_ln1p(y - 1.0))
}

/// Forward accuracy `α(σ, n, k, β)`: the max of the over-leakage and
/// under-leakage terms.
///
/// The second term is `√(8σ²·ln(4k/β))`, read as zero when `4k/β ≤ 1` (a
/// budget that small is never the binding constraint, and the monotone
/// continuation keeps the max well defined).
pub fn alpha_of(point: &MechanismPoint, beta: f64) -> Result<f64, BoundsError> {
    require(beta > 0.0 && beta < 1.0, "beta", beta, "0 < beta < 1")?;
    let n = point.n as f64;
    let term1 = (2.0 * g(point.c())? / (n * beta)).sqrt();
    let log_ratio = (4.0 * point.k / beta).ln();
    let term2 = if log_ratio > 0.0 {
        (8.0 * point.sigma * point.sigma * log_ratio).sqrt()
    } else {
        0.0
    };
    Ok(term1.max(term2))
}

/// Leakage-side budget `k₁(σ; n, α, β) = nσ²·g⁻¹(nα²β/2)`.
///
/// # Errors
///
/// [`BoundsError::BelowRange`] when `nα²β/2 ≤ 1` (dataset too small for the
/// target accuracy).
pub fn k1(sigma: f64, n: u64, acc: &AccuracySpec) -> Result<f64, BoundsError> {
    require(sigma > 0.0 && sigma.is_finite(), "sigma", sigma, "sigma > 0")?;
    require(n >= 1, "n", n as f64, "n >= 1")?;
    let nf = n as f64;
    let y = nf * acc.alpha * acc.alpha * acc.beta / 2.0;
    Ok(nf * sigma * sigma * g_inverse(y)?)
}

/// Noise-side budget `k₂(σ; α, β) = (β/4)·e^{α²/(8σ²)}`.
///
/// Saturates to `+∞` when the exponent exceeds the floating-point range —
/// the budget is then unbounded by this constraint. Callers that report
/// values must translate the infinity into an explicit flag (see
/// [`QueryBudget::k2_saturated`]).
pub fn k2(sigma: f64, acc: &AccuracySpec) -> Result<f64, BoundsError> {
    require(sigma > 0.0 && sigma.is_finite(), "sigma", sigma, "sigma > 0")?;
    let expo = acc.alpha * acc.alpha / (8.0 * sigma * sigma);
    Ok(acc.beta / 4.0 * expo.exp())
}

/// Achievable query budget `k(σ; n, α, β) = min{k₁, k₂}` with degeneracy
/// flags.
///
/// When `k₁` is out of range (dataset too small) the budget is zero with
/// [`BudgetLimit::DatasetTooSmall`] — that is a result, not an error.
pub fn k_budget(sigma: f64, n: u64, acc: &AccuracySpec) -> Result<QueryBudget, BoundsError> {
    let v2 = k2(sigma, acc)?;
    let k2_saturated = v2.is_infinite();
    match k1(sigma, n, acc) {
        Ok(v1) => {
            let (k, limit) = if v1 <= v2 {
                (v1, BudgetLimit::OverLeakage)
            } else {
                (v2, BudgetLimit::UnderLeakage)
            };
            Ok(QueryBudget { k, k1: Some(v1), k2: v2, k2_saturated, limit })
        }
        Err(BoundsError::BelowRange { .. }) => Ok(QueryBudget {
            k: 0.0,
            k1: None,
            k2: v2,
            k2_saturated,
            limit: BudgetLimit::DatasetTooSmall,
        }),
        Err(e) => Err(e),
    }
}

/// Number of reweighting passes in [`khat1_fit`]. The Lawson iteration
/// settles to three significant figures of the minimax residual well within
/// this count; being fixed keeps the fit deterministic.
const KHAT1_FIT_PASSES: usize = 25;

/// Fits the linear regime of `g` and packages the line as the `k̂₁`
/// coefficients `(w, b)`.
///
/// Least-squares fits `g(c) ≈ m·c + q` over `samples` log-spaced points of
/// `c_range`, then returns `w = 1/m`, `b = −q/m`, so that
/// `k̂₁ = nσ²·(y − q)/m` with `y = nα²β/2`. The residual that matters for
/// budget prediction is relative to `k₁`, i.e. `|(g−q)/m − c|/c` at each
/// sample: a single plain least-squares pass (any fixed weighting) leaves
/// that metric above 2.7% at the small-`c` end of `[10, 10⁴]`, so the fit
/// iteratively reweights each pass by its residual (Lawson's method), which
/// drives the worst case to ≈ 1.5% — each pass is still an ordinary
/// weighted least-squares solve.
///
/// # Errors
///
/// [`BoundsError::Param`] for a degenerate range (`lo < 10`, `hi ≤ lo`) or
/// `samples < 2`.
pub fn khat1_fit(c_range: (f64, f64), samples: usize) -> Result<LinearFit, BoundsError> {
    let (lo, hi) = c_range;
    require(lo >= 10.0 && lo.is_finite(), "c_range.lo", lo, "lo >= 10 (linear regime)")?;
    require(hi > lo && hi.is_finite(), "c_range.hi", hi, "hi > lo")?;
    require(samples >= 2, "samples", samples as f64, "samples >= 2")?;

    let s = samples;
    let ratio = hi / lo;
    let mut cs = Vec::with_capacity(s);
    let mut gs = Vec::with_capacity(s);
    for i in 0..s {
        let c = lo * ratio.powf(i as f64 / (s - 1) as f64);
        cs.push(c);
        gs.push(g(c)?);
    }

    // Start from 1/c² weights (the residual metric's natural scale) and
    // reweight by the achieved residuals each pass.
    let mut ws: Vec<f64> = cs.iter().map(|c| 1.0 / (c * c)).collect();
    let mut m = 1.0;
    let mut q = 0.0;
    for _ in 0..KHAT1_FIT_PASSES {
        let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((&c, &gv), &w) in cs.iter().zip(&gs).zip(&ws) {
            sw += w;
            sx += w * c;
            sy += w * gv;
            sxx += w * c * c;
            sxy += w * c * gv;
        }
        let den = sw * sxx - sx * sx;
        m = (sw * sxy - sx * sy) / den;
        q = (sxx * sy - sx * sxy) / den;

        let resid: Vec<f64> = cs
            .iter()
            .zip(&gs)
            .map(|(&c, &gv)| ((gv - q) / m - c).abs() / c)
            .collect();
        let rmax = resid.iter().cloned().fold(0.0f64, f64::max);
        let mut total = 0.0;
        for (w, r) in ws.iter_mut().zip(&resid) {
            // The small floor keeps zero-residual points from freezing out
            // of the fit entirely.
            *w *= r + 1e-6 * rmax;
            total += *w;
        }
        for w in &mut ws {
            *w /= total;
        }
    }

    let max_rel_residual = cs
        .iter()
        .zip(&gs)
        .map(|(&c, &gv)| ((gv - q) / m - c).abs() / c)
        .fold(0.0f64, f64::max);

    Ok(LinearFit {
        w: 1.0 / m,
        b: -q / m,
        fit_range_c: (lo, hi),
        max_rel_residual,
    })
}

/// The normalized noise ratio at which `k₁ = k₂`, i.e. the maximizer of
/// `k(σ)` — an increasing and a decreasing curve cross exactly once.
///
/// Solved as a bracketing root find on `ln k₁ − ln k₂` (strictly increasing
/// in `σ`); working with logarithms sidesteps `k₂`'s overflow at small `σ`.
///
/// # Errors
///
/// [`BoundsError::BelowRange`] when `nα²β/2 ≤ 1` (no budget exists at any
/// `σ`); bracket failures propagate from the root finder.
pub fn s_opt(n: u64, acc: &AccuracySpec) -> Result<f64, BoundsError> {
    require(n >= 1, "n", n as f64, "n >= 1")?;
    let nf = n as f64;
    let y = nf * acc.alpha * acc.alpha * acc.beta / 2.0;
    let ginv_y = g_inverse(y)?;
    let log_k2_const = (acc.beta / 4.0).ln();
    let a2_8 = acc.alpha * acc.alpha / 8.0;
    // ln k1 − ln k2, strictly increasing in s.
    let h = |s: f64| nf.ln() + 2.0 * s.ln() + ginv_y.ln() - log_k2_const - a2_8 / (s * s);

    let mut lo = 1e-6;
    while h(lo) > 0.0 && lo > 1e-300 {
        lo *= 0.1;
    }
    let mut hi = 1.0;
    while h(hi) < 0.0 && hi < 1e12 {
        hi *= 2.0;
    }
    let bracket = BracketedRoot::new(lo, hi, tol::ROOT_ABS)?;
    Ok(special::find_root(h, &bracket)?)
}

/// Collapses a federated deployment to its equivalent point-to-point
/// mechanism: `n_eq = L·n₀` pooled samples answered with normalized noise
/// `σ_eq/A_t = σ_ch/(L·A_t)`.
///
/// The normalized noise is computed in the single expression
/// `sigma_ch / (L·A_t)` so that callers comparing against a directly
/// substituted point-to-point configuration get bit-identical values.
/// Before amplitude normalization the product `n_eq·σ_eq = n₀·σ_ch` is
/// independent of `L`: federation adds data exactly as fast as it splits
/// the noise.
///
/// # Panics
///
/// If `L·n₀` overflows `u64` (unreachable for physical configurations).
pub fn to_equivalent(cfg: &SystemConfig) -> (u64, f64) {
    let n_eq = cfg.l.checked_mul(cfg.n0).expect("L*n0 overflows u64");
    let sigma_eq_normalized = cfg.sigma_ch / (cfg.l as f64 * cfg.a_t);
    (n_eq, sigma_eq_normalized)
}

/// The amplitude `A_t = σ_ch/(L·s_opt(L·n₀))` that puts the equivalent
/// mechanism exactly at its budget-maximizing noise ratio.
///
/// # Errors
///
/// Requires `σ_ch > 0`; propagates [`s_opt`] failures.
pub fn optimal_amplitude(cfg: &SystemConfig, acc: &AccuracySpec) -> Result<f64, BoundsError> {
    require(
        cfg.sigma_ch > 0.0,
        "sigma_ch",
        cfg.sigma_ch,
        "sigma_ch > 0 for amplitude optimization",
    )?;
    let n_eq = cfg.l.checked_mul(cfg.n0).expect("L*n0 overflows u64");
    Ok(cfg.sigma_ch / (cfg.l as f64 * s_opt(n_eq, acc)?))
}

/// Transmit SNR in decibels: `10·log₁₀(A_t²/(2σ_ch²))`.
///
/// The `A_t²/2` numerator is the mean power of an amplitude-`A_t` signal
/// carrying answers uniform on `[0, 1]`-ish scales; this convention is the
/// one under which the reference operating ratios land at their familiar dB
/// marks (ratio `1/0.017 ≈ 58.8 → 32.4 dB`, `100 → 37.0 dB`,
/// `125 → 38.9 dB`). To stay unambiguous, report it alongside the raw
/// [`amplitude_ratio`].
pub fn snr_db(cfg: &SystemConfig) -> Result<f64, BoundsError> {
    require(cfg.sigma_ch > 0.0, "sigma_ch", cfg.sigma_ch, "sigma_ch > 0 for SNR")?;
    let r = cfg.a_t / cfg.sigma_ch;
    Ok(10.0 * (r * r / 2.0).log10())
}

/// The raw amplitude-to-noise ratio `A_t/σ_ch` (the quantity the SNR
/// convention is built from).
pub fn amplitude_ratio(cfg: &SystemConfig) -> Result<f64, BoundsError> {
    require(cfg.sigma_ch > 0.0, "sigma_ch", cfg.sigma_ch, "sigma_ch > 0 for ratio")?;
    Ok(cfg.a_t / cfg.sigma_ch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn acc_default() -> AccuracySpec {
        AccuracySpec::new(0.1, 0.05).unwrap()
    }

    /// Brute-force oracle: minimum of f(λ, c) over a uniform λ grid.
    fn grid_min_f(c: f64, points: usize) -> (f64, f64) {
        let mut best = f64::INFINITY;
        let mut best_lambda = 0.0;
        for i in 1..points {
            let lambda = i as f64 / points as f64;
            let v = f_lambda(lambda, c).unwrap();
            if v < best {
                best = v;
                best_lambda = lambda;
            }
        }
        (best, best_lambda)
    }

    #[test]
    fn f_lambda_direct_values() {
        let v = f_lambda(0.5, 1.0).unwrap();
        assert!(rel(v, 2.0 * (1.0 + std::f64::consts::LN_2)) < 1e-14);
        assert!((v - 3.3862944).abs() < 1e-6);
        let v0 = f_lambda(0.5, 0.0).unwrap();
        assert!(rel(v0, 2.0 * std::f64::consts::LN_2) < 1e-14);
        assert!((v0 - 1.3862944).abs() < 1e-6);
    }

    #[test]
    fn f_lambda_diverges_toward_one() {
        // −ln(1−λ) → ∞ as λ → 1⁻, but only logarithmically: at λ = 1 − 1e−6
        // the value is (1 + 13.8155…)/0.999999 ≈ 14.8155, and even at the
        // last representable λ < 1 it stays below ~746 for c = 1. The
        // divergence is real, the approach glacial.
        let v6 = f_lambda(0.999999, 1.0).unwrap();
        assert!((v6 - 14.815525373).abs() < 1e-6);
        let v2 = f_lambda(0.99, 1.0).unwrap();
        let v12 = f_lambda(1.0 - 1e-12, 1.0).unwrap();
        assert!(v2 < v6 && v6 < v12, "monotone growth toward the pole");
        let v_last = f_lambda(1.0 - f64::EPSILON / 2.0, 1.0).unwrap();
        assert!(v_last > 30.0 && v_last.is_finite());
    }

    #[test]
    fn f_lambda_domain() {
        assert!(f_lambda(0.0, 1.0).is_err());
        assert!(f_lambda(1.0, 1.0).is_err());
        assert!(f_lambda(-0.1, 1.0).is_err());
        assert!(f_lambda(0.5, -1.0).is_err());
        assert!(f_lambda(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn lambda_star_stationarity_at_one() {
        let l = lambda_star(1.0).unwrap();
        let resid = (l / (1.0 - l) + (-l).ln_1p() - 1.0).abs();
        assert!(resid < 1e-9, "stationarity residual {resid}");
    }

    #[test]
    fn lambda_star_matches_grid_argmin() {
        let (_, grid_lambda) = grid_min_f(5.0, 1_000_000);
        let l = lambda_star(5.0).unwrap();
        assert!(l > 0.0 && l < 1.0);
        assert!(
            (l - grid_lambda).abs() <= 1.0 / 1_000_000.0 + 1e-9,
            "lambda*={l} grid={grid_lambda}"
        );
    }

    #[test]
    fn lambda_star_vanishes_with_c() {
        let l = lambda_star(1e-6).unwrap();
        assert!(l < 0.01 && l > 0.0, "lambda*(1e-6) = {l}");
        assert!(lambda_star(0.0).is_err());
        assert!(lambda_star(-1.0).is_err());
    }

    #[test]
    fn g_matches_grid_minimum() {
        let (grid, _) = grid_min_f(1.0, 1_000_000);
        let closed = g(1.0).unwrap();
        assert!(rel(closed, grid) < 1e-6, "g(1)={closed} grid={grid}");
        // Frozen reference values (30-digit solver):
        assert!(rel(g(1.0).unwrap(), 3.146_193_220_620_582_6) < 1e-12);
        assert!(rel(g(5.0).unwrap(), 8.090_717_405_155_484_6) < 1e-12);
        assert!(rel(g(10.0).unwrap(), 13.610_868_638_149_876) < 1e-12);
    }

    #[test]
    fn g_near_linear_at_twenty() {
        let second_diff =
            (g(21.0).unwrap() - 2.0 * g(20.0).unwrap() + g(19.0).unwrap()).abs();
        assert!(second_diff <= 1e-2 * g(20.0).unwrap());
    }

    #[test]
    fn g_large_c_finite() {
        let v = g(100.0).unwrap();
        assert!(v.is_finite() && v > 100.0);
        assert!(rel(v, 105.660_228_554_849_96) < 1e-12);
        // Far past the e^{−(c+1)} underflow point:
        let v = g(2000.0).unwrap();
        assert!(v.is_finite() && v > 2000.0);
    }

    #[test]
    fn g_equals_textbook_w_form() {
        // W·(c + ln(−W))/(1 + W) with W = W₋₁(−e^{−(c+1)}) — the unreduced
        // closed form — must agree with the simplified evaluator.
        for &c in &[0.05, 0.5, 1.0, 5.0, 20.0, 100.0, 500.0] {
            let w = special::lambert_w_minus1_neg_exp(c + 1.0).unwrap();
            let textbook = w * (c + (-w).ln()) / (1.0 + w);
            assert!(
                rel(g(c).unwrap(), textbook) < 1e-11,
                "c={c}: g={} textbook={textbook}",
                g(c).unwrap()
            );
        }
    }

    #[test]
    fn g_inverse_round_trips() {
        for &c in &[5.0, 100.0] {
            let back = g_inverse(g(c).unwrap()).unwrap();
            assert!((back - c).abs() < 1e-8, "c={c} back={back}");
        }
    }

    #[test]
    fn g_inverse_low_targets() {
        // y = g(1)/2 ≈ 1.573 sits above inf g = 1: g dips below it near
        // c ≈ 0.12, so inversion succeeds rather than erroring.
        let y = g(1.0).unwrap() * 0.5;
        assert!(g(1e-12).unwrap() < y, "the target is attainable");
        let c = g_inverse(y).unwrap();
        assert!(rel(g(c).unwrap(), y) < tol::IDENTITY_REL);
        assert!((c - 0.120_050_57).abs() < 1e-7);
        // Below the infimum the error fires.
        assert!(matches!(
            g_inverse(0.999),
            Err(BoundsError::BelowRange { .. })
        ));
        assert!(matches!(g_inverse(1.0), Err(BoundsError::BelowRange { .. })));
    }

    #[test]
    fn g_inverse_just_above_infimum() {
        // Cancellation protection: c = y − ln y − 1 ≈ h²/2 at y = 1 + h.
        let y = 1.0 + 1e-6;
        let c = g_inverse(y).unwrap();
        assert!(rel(c, 0.5e-12) < 1e-5, "c={c}");
        assert!(rel(g(c).unwrap(), y) < 1e-12);
    }

    #[test]
    fn alpha_of_against_transcription_oracle() {
        let p = MechanismPoint::new(1_000_000, 0.01, 1000.0).unwrap();
        let beta = 0.05;
        let v = alpha_of(&p, beta).unwrap();
        // Independent transcription: grid-minimized first term, direct second.
        let (gmin, _) = grid_min_f(p.c(), 1_000_000);
        let t1 = (2.0 / (1e6 * beta) * gmin).sqrt();
        let t2 = (8.0 * 0.01f64.powi(2) * (4.0 * 1000.0 / beta).ln()).sqrt();
        let oracle = t1.max(t2);
        assert!(rel(v, oracle) < tol::ORACLE_REL, "v={v} oracle={oracle}");
        // At these parameters the noise term dominates: t2 ≈ 0.095.
        assert!((v - 0.095_035_917_057_314_79).abs() < 1e-12);
    }

    #[test]
    fn alpha_of_second_term_inversion() {
        // k = (β/4)e^{α₀²/(8σ²)} makes the second term exactly α₀; a huge n
        // parks the first term far below it.
        let sigma = 0.01f64;
        let alpha0 = 0.1f64;
        let beta = 0.05f64;
        let k = beta / 4.0 * (alpha0 * alpha0 / (8.0 * sigma * sigma)).exp();
        let p = MechanismPoint::new(1_000_000_000_000, sigma, k).unwrap();
        let v = alpha_of(&p, beta).unwrap();
        assert!((v - alpha0).abs() < 1e-9, "v={v}");
    }

    #[test]
    fn alpha_of_monotone_in_k() {
        let beta = 0.05;
        for &k in &[10.0, 100.0, 5000.0] {
            let p1 = MechanismPoint::new(100_000, 0.02, k).unwrap();
            let p2 = MechanismPoint::new(100_000, 0.02, 2.0 * k).unwrap();
            assert!(alpha_of(&p2, beta).unwrap() >= alpha_of(&p1, beta).unwrap());
        }
    }

    #[test]
    fn k1_scaling_and_value() {
        let acc = acc_default();
        let a = k1(0.01, 1_000_000, &acc).unwrap();
        let b = k1(0.02, 1_000_000, &acc).unwrap();
        assert!(rel(b, 4.0 * a) < 1e-12, "k1 ∝ sigma²");
        // n σ² g⁻¹(250) with g⁻¹(250) = 250 − ln 250 − 1 = 243.47853908…
        assert!(rel(a, 24_347.853_908_213_775) < 1e-12);
        // Chain consistency against the grid oracle through g:
        let c = g_inverse(250.0).unwrap();
        let (gmin, _) = grid_min_f(c, 1_000_000);
        assert!(rel(gmin, 250.0) < 1e-5);
    }

    #[test]
    fn k1_below_range() {
        let acc = acc_default();
        // n α² β / 2 = 0.025 < inf g = 1 ⇒ out of range.
        assert!(matches!(
            k1(0.01, 10, &acc),
            Err(BoundsError::BelowRange { .. })
        ));
    }

    #[test]
    fn k2_values() {
        let acc = acc_default();
        let near_one = k2(0.0169, &acc).unwrap();
        assert!((near_one - 1.0).abs() < 0.05, "k2(0.0169) = {near_one}");
        // α²/(8σ²) = 0.01/0.0008 = 12.5 exactly at σ = 0.01.
        let v = k2(0.01, &acc).unwrap();
        let direct = 0.0125 * (12.5f64).exp();
        assert!(rel(v, direct) < 1e-12);
        assert!((v / 3354.216 - 1.0).abs() < 1e-4, "got {v}");
        let wide = k2(1e6, &acc).unwrap();
        assert!(rel(wide, 0.0125) < 1e-9);
    }

    #[test]
    fn k2_saturates() {
        let acc = acc_default();
        // Exponent α²/(8σ²) passes 709.8 below σ ≈ 0.00132.
        let v = k2(1e-3, &acc).unwrap();
        assert!(v.is_infinite());
        let b = k_budget(1e-3, 1_000_000, &acc).unwrap();
        assert!(b.k2_saturated);
        assert!(b.k.is_finite(), "min picks the finite k1");
        assert_eq!(b.limit, BudgetLimit::OverLeakage);
    }

    #[test]
    fn k_budget_threshold_examples() {
        let acc = acc_default();
        // Ratio 0.018 exceeds the ≈0.017 threshold: no full query at any n.
        for &n in &[100_000u64, 1_000_000, 100_000_000] {
            let b = k_budget(0.018, n, &acc).unwrap();
            assert!(b.k < 1.0, "n={n}: k={}", b.k);
            assert_eq!(b.limit, BudgetLimit::UnderLeakage);
        }
        let b = k_budget(0.0169, 1_000_000, &acc).unwrap();
        assert_eq!(b.limit, BudgetLimit::UnderLeakage);
        assert!((b.k - 1.0).abs() < 0.05, "k ≈ 1 at the threshold");
        assert!(b.k1.unwrap() > b.k2);
    }

    #[test]
    fn k_budget_dataset_too_small() {
        let acc = acc_default();
        let b = k_budget(0.01, 10, &acc).unwrap();
        assert_eq!(b.k, 0.0);
        assert_eq!(b.limit, BudgetLimit::DatasetTooSmall);
        assert!(b.k1.is_none());
    }

    #[test]
    fn khat1_fit_residual_and_stability() {
        let fit = khat1_fit((10.0, 1e4), 1000).unwrap();
        assert!(
            fit.max_rel_residual <= 0.02,
            "residual {}",
            fit.max_rel_residual
        );
        assert!(fit.w > 0.9 && fit.w < 1.0, "w = {}", fit.w);
        assert!(fit.b < 0.0, "b = {}", fit.b);
        let fit2 = khat1_fit((10.0, 1e4), 2000).unwrap();
        assert!(rel(fit2.w, fit.w) <= 0.01, "w stability");
        assert!(rel(fit2.b, fit.b) <= 0.01, "b stability");
    }

    #[test]
    fn khat1_fit_predicts_k1() {
        // In the regime n > 4×10⁴ the line tracks k₁ closely; check over a
        // σ sweep (the ratio k̂₁/k₁ is σ-independent, the sweep documents it).
        let acc = acc_default();
        let fit = khat1_fit((10.0, 1e4), 1000).unwrap();
        let n = 100_000u64;
        for i in 0..50 {
            let sigma = 0.001 + (0.02 - 0.001) * i as f64 / 49.0;
            let exact = k1(sigma, n, &acc).unwrap();
            let approx = fit.khat1(sigma, n, &acc);
            assert!(
                rel(approx, exact) <= 0.05,
                "sigma={sigma}: khat1={approx} k1={exact}"
            );
        }
    }

    #[test]
    fn khat1_fit_rejects_degenerate_ranges() {
        assert!(khat1_fit((5.0, 1e4), 100).is_err());
        assert!(khat1_fit((10.0, 10.0), 100).is_err());
        assert!(khat1_fit((10.0, 1e4), 1).is_err());
    }

    #[test]
    fn s_opt_reference_values() {
        let acc = acc_default();
        let s6 = s_opt(1_000_000, &acc).unwrap();
        assert!(s6 >= 0.008 && s6 <= 0.01, "s_opt(1e6) = {s6}");
        assert!((s6 - 0.009_334_929_843).abs() < 1e-6);
        let s5 = s_opt(100_000, &acc).unwrap();
        assert!((s5 - 0.011_210_027_48).abs() < 1e-6);
        let s7 = s_opt(10_000_000, &acc).unwrap();
        assert!((s7 - 0.008_174_318_944).abs() < 1e-6);
        // Slow variation across a decade of n.
        assert!(rel(s7, s6) <= 0.2);
    }

    #[test]
    fn s_opt_is_the_maximizer() {
        let acc = acc_default();
        for &n in &[100_000u64, 1_000_000] {
            let s = s_opt(n, &acc).unwrap();
            let k_at = |sig: f64| k_budget(sig, n, &acc).unwrap().k;
            let k_star = k_at(s);
            assert!(k_at(s * 0.8) <= k_star);
            assert!(k_at(s * 1.2) <= k_star);
            // At the crossing the two bounds agree to root tolerance.
            let b = k_budget(s, n, &acc).unwrap();
            assert!(rel(b.k1.unwrap(), b.k2) < 1e-4);
        }
    }

    #[test]
    fn to_equivalent_mapping() {
        let cfg = SystemConfig::new(10_000, 10, 0.5, 1.0).unwrap();
        let (n_eq, s_norm) = to_equivalent(&cfg);
        assert_eq!(n_eq, 100_000);
        assert_eq!(s_norm, 0.05);
        // L = 1 degenerates to plain point-to-point normalization.
        let p2p = SystemConfig::new(10_000, 1, 0.5, 2.0).unwrap();
        let (n1, s1) = to_equivalent(&p2p);
        assert_eq!(n1, 10_000);
        assert_eq!(s1, 0.5 / 2.0);
    }

    #[test]
    fn equivalent_product_invariant_in_l() {
        // n_eq · σ_eq (before amplitude normalization) = n₀·σ_ch for all L.
        let reference = 10_000.0 * 0.5;
        for &l in &[1u64, 2, 7, 30, 127, 480] {
            let cfg = SystemConfig::new(10_000, l, 0.5, 3.0).unwrap();
            let (n_eq, s_norm) = to_equivalent(&cfg);
            let product = n_eq as f64 * s_norm * cfg.a_t;
            assert!(rel(product, reference) < 1e-13, "L={l}");
        }
    }

    #[test]
    fn optimal_amplitude_definition_and_local_optimality() {
        let acc = acc_default();
        let cfg = SystemConfig::new(1_000_000, 1, 0.01, 1.0).unwrap();
        let a = optimal_amplitude(&cfg, &acc).unwrap();
        let s = s_opt(1_000_000, &acc).unwrap();
        assert!(rel(0.01 / a, s) < 1e-12, "ratio σ/A_t lands exactly on s_opt");

        // Perturbing A_t by ±20% can only lose budget.
        let k_of = |a_t: f64| {
            let c = SystemConfig::new(1_000_000, 1, 0.01, a_t).unwrap();
            let (n_eq, s_norm) = to_equivalent(&c);
            k_budget(s_norm, n_eq, &acc).unwrap().k
        };
        let k_star = k_of(a);
        assert!(k_of(a * 0.8) <= k_star);
        assert!(k_of(a * 1.2) <= k_star);
    }

    #[test]
    fn optimal_amplitude_inverse_proportionality() {
        let acc = acc_default();
        for &l in &[30u64, 60, 120, 240] {
            let cfg_l = SystemConfig::new(10_000, l, 0.5, 1.0).unwrap();
            let cfg_2l = SystemConfig::new(10_000, 2 * l, 0.5, 1.0).unwrap();
            let ratio = optimal_amplitude(&cfg_2l, &acc).unwrap()
                / optimal_amplitude(&cfg_l, &acc).unwrap();
            assert!(
                ratio > 0.4 && ratio < 0.6,
                "L={l}: doubling ratio {ratio}"
            );
        }
    }

    #[test]
    fn snr_reference_points() {
        let acc_ratio = |r: f64| SystemConfig::new(1, 1, 1.0, r).unwrap();
        assert!((snr_db(&acc_ratio(125.0)).unwrap() - 38.9279).abs() < 0.01);
        assert!((snr_db(&acc_ratio(100.0)).unwrap() - 36.9897).abs() < 0.01);
        assert!((snr_db(&acc_ratio(58.8)).unwrap() - 32.3772).abs() < 0.01);
        assert!(rel(amplitude_ratio(&acc_ratio(125.0)).unwrap(), 125.0) < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        assert!(AccuracySpec::new(0.0, 0.05).is_err());
        assert!(AccuracySpec::new(1.5, 0.05).is_err());
        assert!(AccuracySpec::new(0.1, 0.0).is_err());
        assert!(AccuracySpec::new(0.1, 1.0).is_err());
        assert!(MechanismPoint::new(0, 0.1, 1.0).is_err());
        assert!(MechanismPoint::new(10, 0.0, 1.0).is_err());
        assert!(MechanismPoint::new(10, 0.1, 0.0).is_err());
        assert!(SystemConfig::new(1, 1, -0.1, 1.0).is_err());
        assert!(SystemConfig::new(1, 1, 0.0, 1.0).is_ok(), "σ_ch = 0 allowed for simulation");
        assert!(SystemConfig::new(1, 0, 0.1, 1.0).is_err());
        assert!(SystemConfig::new(1, 1, 0.1, 0.0).is_err());
    }

    proptest! {
        /// The closed form matches brute force across the working c range
        /// (narrower grid here; the acceptance suite runs the full-density
        /// version).
        #[test]
        fn g_vs_brute_force(c in 0.01f64..50.0) {
            let (grid, _) = grid_min_f(c, 100_000);
            prop_assert!(rel(g(c).unwrap(), grid) < 1e-4);
        }

        /// Stationarity identity λ*/(1−λ*) + ln(1−λ*) = c.
        #[test]
        fn stationarity_identity(c in 0.01f64..100.0) {
            let l = lambda_star(c).unwrap();
            let resid = (l / (1.0 - l) + (-l).ln_1p() - c).abs();
            prop_assert!(resid < 1e-8, "c={c} residual={resid}");
        }

        /// g is strictly increasing (precondition for inversion).
        #[test]
        fn g_strictly_increasing(a in 1e-3f64..500.0, d in 1e-3f64..10.0) {
            prop_assert!(g(a + d).unwrap() > g(a).unwrap());
        }

        /// The budget never promises accuracy the forward formula denies:
        /// α(σ, n, k_budget, β) ≤ α·(1 + 1e−6). In fact equality holds up
        /// to rounding — k_budget inverts whichever term binds.
        #[test]
        fn budget_consistency(
            n in 50_000u64..10_000_000,
            sigma in 0.002f64..0.05,
            alpha in 0.05f64..0.5,
            beta in 0.01f64..0.3,
        ) {
            let acc = AccuracySpec::new(alpha, beta).unwrap();
            let b = k_budget(sigma, n, &acc).unwrap();
            prop_assume!(b.k > 0.0);
            let point = MechanismPoint::new(n, sigma, b.k).unwrap();
            let promised = alpha_of(&point, beta).unwrap();
            prop_assert!(
                promised <= alpha * (1.0 + 1e-6),
                "promised {promised} vs alpha {alpha}"
            );
        }

        /// k2 crosses 1 exactly at σ = α/√(8·ln(4/β)).
        #[test]
        fn k2_unit_crossing(alpha in 0.02f64..0.8, beta in 0.01f64..0.5) {
            let acc = AccuracySpec::new(alpha, beta).unwrap();
            let sigma_star = alpha / (8.0 * (4.0 / beta).ln()).sqrt();
            let v = k2(sigma_star, &acc).unwrap();
            prop_assert!(rel(v, 1.0) < 1e-12, "k2 at the crossing = {v}");
        }

        /// min-consistency of the budget decomposition.
        #[test]
        fn k_budget_is_min(n in 10_000u64..10_000_000, sigma in 0.001f64..0.1) {
            let acc = acc_default();
            let b = k_budget(sigma, n, &acc).unwrap();
            if let Some(v1) = b.k1 {
                prop_assert_eq!(b.k, v1.min(b.k2));
            } else {
                prop_assert_eq!(b.k, 0.0);
            }
        }

        /// Federated collapse is bit-exact against direct substitution and
        /// the pre-normalization product n_eq·σ_eq is L-free.
        #[test]
        fn equivalence_is_exact(
            n0 in 1_000u64..100_000,
            l in 1u64..512,
            sigma_ch in 0.001f64..2.0,
            a_t in 0.01f64..100.0,
        ) {
            let acc = acc_default();
            let cfg = SystemConfig::new(n0, l, sigma_ch, a_t).unwrap();
            let (n_eq, s_norm) = to_equivalent(&cfg);
            prop_assert_eq!(n_eq, l * n0);
            let direct = sigma_ch / (l as f64 * a_t);
            prop_assert_eq!(s_norm.to_bits(), direct.to_bits());
            let via = k_budget(s_norm, n_eq, &acc).unwrap();
            let sub = k_budget(direct, l * n0, &acc).unwrap();
            prop_assert_eq!(via.k.to_bits(), sub.k.to_bits());
        }
    }
}
