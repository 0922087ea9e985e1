//! Deterministic CSV datasets behind every figure of the analysis.
//!
//! Plots are produced externally; each generator here emits the underlying
//! numbers. The five datasets:
//!
//! | name               | axis           | content                                        |
//! |--------------------|----------------|------------------------------------------------|
//! | `g_vs_c`           | `c` (fixed)    | the budget kernel `g(c)`                       |
//! | `k_vs_ratio`       | `sigma_over_At`| `k = min{k₁, k₂}` vs noise ratio, per `n`      |
//! | `kmax_vs_n`        | `n`            | the maximized budget `k(s_opt(n))` and `s_opt` |
//! | `k_vs_L`           | `L`            | federated budget at fixed `σ_ch/A_t = 0.5`     |
//! | `k_vs_L_optimized` | `L`            | same, with the budget-maximizing `A_t` per `L` |
//!
//! Sweep overrides (`sweep_axis`/`sweep_lo`/`sweep_hi`/`sweep_points`/
//! `sweep_scale`) replace a figure's default grid, but only when the axis
//! actually belongs to that figure — asking for an `n` sweep of `k_vs_L` is
//! an error, not a silent ignore. `g_vs_c`'s grid is fixed (its axis is not
//! part of the sweepable universe).
//!
//! Budgets appear both raw and floored; a saturated `k₂` becomes an empty
//! cell plus a `k2_saturated` flag — no `inf` ever lands in a CSV. Every
//! generator is a pure function of its parameters: rows come out in axis
//! order and regeneration is byte-identical.

use thiserror::Error;

use crate::bounds::{self, AccuracySpec, BoundsError, SystemConfig};
use crate::csvio::{fmt_f64, CsvDoc};

/// The figure datasets this crate can generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// `g(c)` over a log grid of `c`.
    GVsC,
    /// `k`, `k₁`, `k₂` vs the normalized noise ratio, one block per `n`.
    KVsRatio,
    /// The maximized budget and its maximizer vs `n`.
    KMaxVsN,
    /// Federated budget vs `L` at fixed `σ_ch/A_t = 0.5`.
    KVsL,
    /// Federated budget vs `L` with per-`L` optimal amplitude.
    KVsLOptimized,
}

/// All figures, in documentation order.
pub const ALL_FIGURES: &[FigureKind] = &[
    FigureKind::GVsC,
    FigureKind::KVsRatio,
    FigureKind::KMaxVsN,
    FigureKind::KVsL,
    FigureKind::KVsLOptimized,
];

impl FigureKind {
    /// The dataset's stable name (CLI argument, default file stem).
    pub fn name(&self) -> &'static str {
        match self {
            FigureKind::GVsC => "g_vs_c",
            FigureKind::KVsRatio => "k_vs_ratio",
            FigureKind::KMaxVsN => "kmax_vs_n",
            FigureKind::KVsL => "k_vs_L",
            FigureKind::KVsLOptimized => "k_vs_L_optimized",
        }
    }

    /// The sweepable axis of this figure, if it has one.
    pub fn axis(&self) -> Option<SweepAxis> {
        match self {
            FigureKind::GVsC => None,
            FigureKind::KVsRatio => Some(SweepAxis::SigmaOverAt),
            FigureKind::KMaxVsN => Some(SweepAxis::N),
            FigureKind::KVsL | FigureKind::KVsLOptimized => Some(SweepAxis::L),
        }
    }
}

impl std::str::FromStr for FigureKind {
    type Err = FigureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_FIGURES
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| FigureError::UnknownFigure(s.to_string()))
    }
}

impl std::fmt::Display for FigureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The sweepable axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Normalized noise ratio `σ/A_t`.
    SigmaOverAt,
    /// Dataset size.
    N,
    /// Device count.
    L,
}

impl SweepAxis {
    /// The axis's config-file spelling.
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::SigmaOverAt => "sigma_over_At",
            SweepAxis::N => "n",
            SweepAxis::L => "L",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = FigureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigma_over_At" => Ok(SweepAxis::SigmaOverAt),
            "n" => Ok(SweepAxis::N),
            "L" => Ok(SweepAxis::L),
            other => Err(FigureError::UnknownAxis(other.to_string())),
        }
    }
}

/// Grid spacing for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    /// Equal steps.
    Linear,
    /// Equal ratios.
    Log,
}

impl std::str::FromStr for SweepScale {
    type Err = FigureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(SweepScale::Linear),
            "log" => Ok(SweepScale::Log),
            other => Err(FigureError::UnknownScale(other.to_string())),
        }
    }
}

/// A user-supplied grid replacing a figure's default axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    /// Which axis the grid applies to (must match the figure's).
    pub axis: SweepAxis,
    /// Lower end (inclusive).
    pub lo: f64,
    /// Upper end (inclusive).
    pub hi: f64,
    /// Grid size (≥ 2).
    pub points: usize,
    /// Spacing.
    pub scale: SweepScale,
}

impl Sweep {
    /// Validates `lo < hi`, `points ≥ 2`, and positivity for log spacing.
    pub fn validate(&self) -> Result<(), FigureError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(FigureError::BadSweep {
                reason: "sweep_lo must be finite and < sweep_hi",
            });
        }
        if self.points < 2 {
            return Err(FigureError::BadSweep {
                reason: "sweep_points must be >= 2",
            });
        }
        if self.scale == SweepScale::Log && self.lo <= 0.0 {
            return Err(FigureError::BadSweep {
                reason: "log sweeps need sweep_lo > 0",
            });
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        match self.scale {
            SweepScale::Linear => linspace(self.lo, self.hi, self.points),
            SweepScale::Log => logspace(self.lo, self.hi, self.points),
        }
    }
}

/// Figure-generation errors.
#[derive(Debug, Error)]
pub enum FigureError {
    /// Name outside the five figures.
    #[error("unknown figure '{0}' (expected one of: g_vs_c, k_vs_ratio, kmax_vs_n, k_vs_L, k_vs_L_optimized)")]
    UnknownFigure(String),
    /// Axis outside the sweepable set.
    #[error("unknown sweep_axis '{0}' (expected one of: sigma_over_At, n, L)")]
    UnknownAxis(String),
    /// Scale outside {linear, log}.
    #[error("unknown sweep_scale '{0}' (expected 'linear' or 'log')")]
    UnknownScale(String),
    /// Sweep grid failed validation.
    #[error("invalid sweep: {reason}")]
    BadSweep { reason: &'static str },
    /// The requested sweep axis does not belong to the figure.
    #[error("sweep_axis '{axis}' does not apply to figure '{figure}'")]
    AxisMismatch {
        figure: &'static str,
        axis: &'static str,
    },
    /// Propagated bound-evaluation failure.
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Parameters shared by the generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureParams {
    /// Target accuracy pair for all budget computations.
    pub acc: AccuracySpec,
    /// Per-device samples for the `k_vs_L` figures.
    pub n0: u64,
    /// Optional replacement grid for the figure's axis.
    pub sweep: Option<Sweep>,
}

impl FigureParams {
    /// The documented defaults: `α = 0.1`, `β = 0.05`, `n₀ = 10⁴`, default
    /// grids.
    pub fn defaults() -> Self {
        Self {
            acc: AccuracySpec::new(0.1, 0.05).expect("default accuracy is valid"),
            n0: 10_000,
            sweep: None,
        }
    }
}

/// The `n` blocks of `k_vs_ratio` (chosen to straddle the `n > 4·10⁴`
/// regime where the linearized budget applies).
pub const K_VS_RATIO_NS: [u64; 3] = [100_000, 1_000_000, 10_000_000];

/// Default σ/A_t ratio for the fixed-amplitude `k_vs_L` figure.
pub const K_VS_L_RATIO: f64 = 0.5;

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn logspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..points)
        .map(|i| lo * ratio.powf(i as f64 / (points - 1) as f64))
        .collect()
}

/// Resolves the effective axis grid: the sweep override when present and
/// matching, the default otherwise.
fn axis_grid(
    kind: FigureKind,
    sweep: &Option<Sweep>,
    default: impl FnOnce() -> Vec<f64>,
) -> Result<(Vec<f64>, String), FigureError> {
    match sweep {
        None => {
            let grid = default();
            Ok((grid, "default".to_string()))
        }
        Some(s) => {
            let Some(axis) = kind.axis() else {
                return Err(FigureError::AxisMismatch {
                    figure: kind.name(),
                    axis: s.axis.name(),
                });
            };
            if s.axis != axis {
                return Err(FigureError::AxisMismatch {
                    figure: kind.name(),
                    axis: s.axis.name(),
                });
            }
            s.validate()?;
            let desc = format!(
                "sweep {} .. {}, {} points, {}",
                fmt_f64(s.lo),
                fmt_f64(s.hi),
                s.points,
                match s.scale {
                    SweepScale::Linear => "linear",
                    SweepScale::Log => "log",
                }
            );
            Ok((s.grid(), desc))
        }
    }
}

/// Rounds a real-valued `L`/`n` grid onto distinct positive integers,
/// preserving order.
fn integer_axis(grid: &[f64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(grid.len());
    for &v in grid {
        let r = v.round().max(1.0) as u64;
        if out.last() != Some(&r) {
            out.push(r);
        }
    }
    out
}

fn k2_cells(k2: f64) -> (String, String) {
    if k2.is_infinite() {
        (String::new(), "1".to_string())
    } else {
        (fmt_f64(k2), "0".to_string())
    }
}

/// Generates the named figure dataset. The returned document carries
/// comments pinning the effective figure parameters; the CLI appends the
/// seed and artifact version before writing.
pub fn generate(kind: FigureKind, params: &FigureParams) -> Result<CsvDoc, FigureError> {
    match kind {
        FigureKind::GVsC => g_vs_c(params),
        FigureKind::KVsRatio => k_vs_ratio(params),
        FigureKind::KMaxVsN => kmax_vs_n(params),
        FigureKind::KVsL => k_vs_l(params, false),
        FigureKind::KVsLOptimized => k_vs_l(params, true),
    }
}

fn base_comments(doc: &mut CsvDoc, kind: FigureKind, params: &FigureParams) {
    doc.comment(format!("figure = {}", kind.name()));
    doc.comment(format!("alpha = {}", fmt_f64(params.acc.alpha)));
    doc.comment(format!("beta = {}", fmt_f64(params.acc.beta)));
}

fn g_vs_c(params: &FigureParams) -> Result<CsvDoc, FigureError> {
    if let Some(s) = &params.sweep {
        return Err(FigureError::AxisMismatch {
            figure: FigureKind::GVsC.name(),
            axis: s.axis.name(),
        });
    }
    let grid = logspace(0.1, 100.0, 500);
    let mut doc = CsvDoc::new(&["c", "g"]);
    base_comments(&mut doc, FigureKind::GVsC, params);
    doc.comment("axis c: 0.1 .. 100, 500 points, log (fixed)");
    for &c in &grid {
        let g = bounds::g(c)?;
        doc.push_row(vec![fmt_f64(c), fmt_f64(g)]);
    }
    Ok(doc)
}

fn k_vs_ratio(params: &FigureParams) -> Result<CsvDoc, FigureError> {
    let (grid, desc) = axis_grid(FigureKind::KVsRatio, &params.sweep, || {
        linspace(0.001, 0.02, 400)
    })?;
    let mut doc = CsvDoc::new(&[
        "ratio",
        "n",
        "k",
        "k1",
        "k2",
        "k_floor",
        "k2_saturated",
    ]);
    base_comments(&mut doc, FigureKind::KVsRatio, params);
    doc.comment(format!("axis ratio (sigma_over_At): {desc}"));
    doc.comment(format!(
        "n blocks = {}",
        K_VS_RATIO_NS.map(|n| n.to_string()).join(", ")
    ));
    for &n in &K_VS_RATIO_NS {
        for &ratio in &grid {
            let b = bounds::k_budget(ratio, n, &params.acc)?;
            let (k2_cell, sat) = k2_cells(b.k2);
            let k1_cell = b.k1.map(fmt_f64).unwrap_or_default();
            doc.push_row(vec![
                fmt_f64(ratio),
                n.to_string(),
                fmt_f64(b.k),
                k1_cell,
                k2_cell,
                fmt_f64(b.k.floor()),
                sat,
            ]);
        }
    }
    Ok(doc)
}

fn kmax_vs_n(params: &FigureParams) -> Result<CsvDoc, FigureError> {
    let (grid, desc) = axis_grid(FigureKind::KMaxVsN, &params.sweep, || {
        logspace(1e5, 1e7, 200)
    })?;
    let ns = integer_axis(&grid);
    let mut doc = CsvDoc::new(&["n", "k_max", "ratio_opt", "k_max_floor"]);
    base_comments(&mut doc, FigureKind::KMaxVsN, params);
    doc.comment(format!("axis n: {desc}"));
    for &n in &ns {
        let s = bounds::s_opt(n, &params.acc)?;
        let b = bounds::k_budget(s, n, &params.acc)?;
        doc.push_row(vec![
            n.to_string(),
            fmt_f64(b.k),
            fmt_f64(s),
            fmt_f64(b.k.floor()),
        ]);
    }
    Ok(doc)
}

fn k_vs_l(params: &FigureParams, optimized: bool) -> Result<CsvDoc, FigureError> {
    let kind = if optimized {
        FigureKind::KVsLOptimized
    } else {
        FigureKind::KVsL
    };
    let (grid, desc) = axis_grid(kind, &params.sweep, || linspace(1.0, 512.0, 512))?;
    let ls = integer_axis(&grid);

    let mut doc = if optimized {
        CsvDoc::new(&["L", "n0", "A_t_opt", "k", "k_floor"])
    } else {
        CsvDoc::new(&["L", "n0", "k", "k_floor"])
    };
    base_comments(&mut doc, kind, params);
    doc.comment(format!("axis L: {desc}"));
    doc.comment(format!("n0 = {}", params.n0));
    if !optimized {
        doc.comment(format!("sigma_over_At = {}", fmt_f64(K_VS_L_RATIO)));
    }

    for &l in &ls {
        let n_eq = l * params.n0;
        if optimized {
            // The budget-maximizing amplitude per L: σ_eq/A_t lands on
            // s_opt(n_eq), so k is the maximized budget. The absolute
            // σ_ch scale cancels; A_t_opt is reported for σ_ch = 0.5.
            let s = bounds::s_opt(n_eq, &params.acc)?;
            let b = bounds::k_budget(s, n_eq, &params.acc)?;
            let cfg = SystemConfig::new(params.n0, l, 0.5, 1.0)
                .map_err(FigureError::Bounds)?;
            let a_opt = bounds::optimal_amplitude(&cfg, &params.acc)?;
            doc.push_row(vec![
                l.to_string(),
                params.n0.to_string(),
                fmt_f64(a_opt),
                fmt_f64(b.k),
                fmt_f64(b.k.floor()),
            ]);
        } else {
            let sigma_eq = K_VS_L_RATIO / l as f64;
            let b = bounds::k_budget(sigma_eq, n_eq, &params.acc)?;
            doc.push_row(vec![
                l.to_string(),
                params.n0.to_string(),
                fmt_f64(b.k),
                fmt_f64(b.k.floor()),
            ]);
        }
    }
    Ok(doc)
}
