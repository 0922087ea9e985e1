//! Command-line front end: `bounds`, `figure`, `simulate`, `attack-demo`.
//!
//! Every subcommand reads an optional flat config file (see
//! [`crate::config`]) and accepts value flags that override it. Resolution
//! order for any parameter: command-line flag, then config file, then the
//! `AIRQUERY_SEED` environment variable (seed only), then the built-in
//! default.
//!
//! Exit codes are part of the interface:
//!
//! | code | meaning                                             |
//! |------|-----------------------------------------------------|
//! | 0    | success                                             |
//! | 2    | usage or configuration error (bad flag, bad key)    |
//! | 3    | bound-domain error (inputs outside a bound's range) |
//! | 4    | runtime error (I/O)                                 |
//!
//! All CSV outputs begin with `#` comments echoing the effective
//! parameters, the master seed, and the artifact version, so re-running the
//! echoed configuration reproduces every file byte-identically.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analyst::{self, evaluate_accuracy, run_trial, Policy};
use crate::bounds::{self, AccuracySpec, BoundsError, MechanismPoint, SystemConfig};
use crate::config::{Config, ConfigError};
use crate::csvio::{fmt_f64, CsvDoc};
use crate::figures::{self, FigureKind, FigureParams, Sweep};
use crate::sim::Population;

/// Environment variable consulted for the master seed when neither `--seed`
/// nor the config provides one.
pub const SEED_ENV_VAR: &str = "AIRQUERY_SEED";

/// Fallback `n` for calibrating the attack-demo noise ladder when the
/// demo's own deployment is too small for `s_opt` to exist.
const LADDER_REFERENCE_N: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "airquery",
    version,
    about = "Query budgets for adaptive data analysis over Gaussian channels",
    after_help = "Seed resolution: --seed flag, then config key 'seed', then the \
                  AIRQUERY_SEED environment variable, then 0."
)]
struct Cli {
    /// Flat key = value config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed (overrides config and AIRQUERY_SEED).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Output CSV path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Monte-Carlo trial count (simulation commands).
    #[arg(long, global = true, value_name = "N")]
    trials: Option<u64>,

    /// Additionally report floored integer budgets.
    #[arg(long, global = true)]
    floor: bool,

    /// Downgrade unknown config keys to warnings.
    #[arg(long, global = true)]
    lenient: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bounds at one operating point.
    Bounds(BoundsArgs),
    /// Generate a figure dataset as CSV.
    Figure(FigureArgs),
    /// Monte-Carlo protocol simulation (requires n0, k, policy).
    Simulate(SimArgs),
    /// Run the overfit attack across a noise ladder.
    AttackDemo(SimArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Samples per device (config key n0).
    #[arg(long, value_name = "COUNT")]
    n: Option<f64>,
    /// Number of devices (default 1).
    #[arg(long = "L", value_name = "COUNT")]
    l: Option<f64>,
    /// Channel noise standard deviation (config key sigma_ch).
    #[arg(long, value_name = "REAL")]
    sigma: Option<f64>,
    /// Transmit amplitude (config key A_t, default 1).
    #[arg(long = "At", value_name = "REAL")]
    at: Option<f64>,
    /// Target accuracy (default 0.1).
    #[arg(long, value_name = "REAL")]
    alpha: Option<f64>,
    /// Target failure probability (default 0.05).
    #[arg(long, value_name = "REAL")]
    beta: Option<f64>,
    /// Also evaluate the forward accuracy alpha(sigma, n, k, beta).
    #[arg(long, value_name = "REAL")]
    k: Option<f64>,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure name: g_vs_c, k_vs_ratio, kmax_vs_n, k_vs_L, k_vs_L_optimized.
    name: Option<String>,
    /// Target accuracy (default 0.1).
    #[arg(long, value_name = "REAL")]
    alpha: Option<f64>,
    /// Target failure probability (default 0.05).
    #[arg(long, value_name = "REAL")]
    beta: Option<f64>,
    /// Samples per device for the k_vs_L figures (default 1e4).
    #[arg(long, value_name = "COUNT")]
    n0: Option<f64>,
}

#[derive(Args)]
struct SimArgs {
    /// Samples per device.
    #[arg(long, value_name = "COUNT")]
    n0: Option<f64>,
    /// Number of devices (default 1).
    #[arg(long = "L", value_name = "COUNT")]
    l: Option<f64>,
    /// Channel noise standard deviation.
    #[arg(long, value_name = "REAL")]
    sigma: Option<f64>,
    /// Transmit amplitude (default 1).
    #[arg(long = "At", value_name = "REAL")]
    at: Option<f64>,
    /// Population domain size (default 1e4).
    #[arg(long = "N", value_name = "COUNT")]
    domain: Option<f64>,
    /// Session budget in rounds.
    #[arg(long, value_name = "COUNT")]
    k: Option<f64>,
    /// Analyst policy: benign | attack.
    #[arg(long, value_name = "NAME")]
    policy: Option<String>,
    /// Failure threshold; computed from the bounds when omitted.
    #[arg(long, value_name = "REAL")]
    alpha: Option<f64>,
    /// Target failure probability (default 0.05).
    #[arg(long, value_name = "REAL")]
    beta: Option<f64>,
}

/// A CLI failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: bad flags or configuration.
    Usage(String),
    /// Exit 3: inputs outside a bound's domain.
    BoundDomain(String),
    /// Exit 4: runtime failure (I/O).
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::BoundDomain(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::BoundDomain(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Bound errors during *evaluation* are domain errors (exit 3); parameter
/// validation happens before evaluation and maps to usage errors at the
/// call sites.
impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::BoundDomain(e.to_string())
    }
}

impl From<crate::sim::SimError> for CliError {
    fn from(e: crate::sim::SimError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Parses arguments from the process environment, runs, and returns the
/// process exit code (errors are printed to stderr here).
pub fn run() -> i32 {
    // clap handles --help/--version (exit 0) and usage errors (exit 2).
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::empty(),
    };
    cfg.check_known(cli.lenient, |w| eprintln!("warning: {w}"))?;
    let seed = resolve_seed(cli.seed, &cfg)?;
    let ctx = Ctx {
        cfg,
        seed,
        out: cli.out.clone(),
        trials: cli.trials,
        floor: cli.floor,
    };
    match cli.command {
        Command::Bounds(args) => cmd_bounds(&ctx, &args),
        Command::Figure(args) => cmd_figure(&ctx, &args),
        Command::Simulate(args) => cmd_simulate(&ctx, &args),
        Command::AttackDemo(args) => cmd_attack_demo(&ctx, &args),
    }
}

/// Resolved shared state: parsed config, effective seed, global flags.
struct Ctx {
    cfg: Config,
    seed: u64,
    out: Option<PathBuf>,
    trials: Option<u64>,
    floor: bool,
}

impl Ctx {
    /// Output path: `--out` flag, then config `out`, then the default.
    fn out_path(&self, default: Option<&str>) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| self.cfg.get_str("out").map(PathBuf::from))
            .or_else(|| default.map(PathBuf::from))
    }

    fn trials(&self, default: u64) -> Result<u64, CliError> {
        let t = match self.trials {
            Some(t) => t,
            None => self.cfg.get_u64("trials")?.unwrap_or(default),
        };
        if t == 0 {
            return Err(CliError::Usage("trials must be >= 1".into()));
        }
        Ok(t)
    }
}

fn resolve_seed(flag: Option<u64>, cfg: &Config) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = cfg.get_u64("seed")? {
        return Ok(s);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text.parse().map_err(|_| {
            CliError::Usage(format!("{SEED_ENV_VAR} must be a u64, got '{text}'"))
        }),
        Err(_) => Ok(0),
    }
}

/// Flag value beats config value beats default.
fn pick_f64(
    flag: Option<f64>,
    cfg: &Config,
    key: &str,
    default: Option<f64>,
) -> Result<Option<f64>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    if let Some(v) = cfg.get_f64(key)? {
        return Ok(Some(v));
    }
    Ok(default)
}

/// Like [`pick_f64`] but for counts; flags arrive as floats so `--n0 1e5`
/// works, and must be exactly integral.
fn pick_count(
    flag: Option<f64>,
    cfg: &Config,
    key: &'static str,
    default: Option<u64>,
) -> Result<Option<u64>, CliError> {
    if let Some(v) = flag {
        return Ok(Some(as_count(v, key)?));
    }
    if let Some(v) = cfg.get_u64(key)? {
        return Ok(Some(v));
    }
    Ok(default)
}

fn as_count(v: f64, name: &str) -> Result<u64, CliError> {
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(CliError::Usage(format!(
            "{name} must be a non-negative integer, got {v}"
        )))
    }
}

fn require<T>(value: Option<T>, key: &'static str) -> Result<T, CliError> {
    value.ok_or(CliError::Usage(format!(
        "missing required config key '{key}'"
    )))
}

/// Accuracy parameters are user input: validation failures are usage
/// errors, with the message naming the violated range.
fn accuracy_from(alpha: f64, beta: f64) -> Result<AccuracySpec, CliError> {
    AccuracySpec::new(alpha, beta).map_err(|e| CliError::Usage(e.to_string()))
}

fn append_provenance(doc: &mut CsvDoc, ctx: &Ctx) {
    doc.comment(format!("seed = {}", ctx.seed));
    doc.comment(format!("version = {}", env!("CARGO_PKG_VERSION")));
}

fn write_doc(doc: &CsvDoc, path: &Path) -> Result<(), CliError> {
    doc.write_to(path)?;
    println!("wrote {} ({} rows)", path.display(), doc.row_count());
    Ok(())
}

// ---------------------------------------------------------------------------
// bounds

fn cmd_bounds(ctx: &Ctx, args: &BoundsArgs) -> Result<(), CliError> {
    let n0 = require(pick_count(args.n, &ctx.cfg, "n0", None)?, "n0")?;
    let l = pick_count(args.l, &ctx.cfg, "L", Some(1))?.unwrap();
    let sigma_ch = require(pick_f64(args.sigma, &ctx.cfg, "sigma_ch", None)?, "sigma_ch")?;
    let a_t = pick_f64(args.at, &ctx.cfg, "A_t", Some(1.0))?.unwrap();
    let alpha = pick_f64(args.alpha, &ctx.cfg, "alpha", Some(0.1))?.unwrap();
    let beta = pick_f64(args.beta, &ctx.cfg, "beta", Some(0.05))?.unwrap();
    let k_fwd = pick_f64(args.k, &ctx.cfg, "k", None)?;

    let acc = accuracy_from(alpha, beta)?;
    let system = SystemConfig::new(n0, l, sigma_ch, a_t)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let (n_eq, sigma_norm) = bounds::to_equivalent(&system);

    let budget = bounds::k_budget(sigma_norm, n_eq, &acc)?;
    let s = bounds::s_opt(n_eq, &acc)?;
    let a_opt = bounds::optimal_amplitude(&system, &acc)?;
    let snr = bounds::snr_db(&system)?;
    let ratio = bounds::amplitude_ratio(&system)?;
    let alpha_at_k = match k_fwd {
        Some(k) => {
            let point = MechanismPoint::new(n_eq, sigma_norm, k)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Some(bounds::alpha_of(&point, beta)?)
        }
        None => None,
    };

    println!("n_eq            = {n_eq}");
    println!("sigma_norm      = {}", fmt_f64(sigma_norm));
    println!("alpha           = {}", fmt_f64(alpha));
    println!("beta            = {}", fmt_f64(beta));
    println!("k               = {}", fmt_f64(budget.k));
    if ctx.floor {
        println!("k_floor         = {}", fmt_f64(budget.k.floor()));
    }
    println!(
        "k1              = {}",
        budget.k1.map(fmt_f64).unwrap_or_else(|| "out of range".into())
    );
    if budget.k2_saturated {
        println!("k2              = unbounded by k2");
    } else {
        println!("k2              = {}", fmt_f64(budget.k2));
    }
    println!("regime          = {}", budget.limit.label());
    println!("s_opt           = {}", fmt_f64(s));
    println!("A_t_opt         = {}", fmt_f64(a_opt));
    println!("snr_db          = {}", fmt_f64(snr));
    println!("amplitude_ratio = {}", fmt_f64(ratio));
    if let Some(a) = alpha_at_k {
        println!("alpha_at_k      = {}", fmt_f64(a));
    }

    if let Some(path) = ctx.out_path(None) {
        let mut doc = CsvDoc::new(&[
            "n0",
            "L",
            "n_eq",
            "sigma_ch",
            "A_t",
            "sigma_norm",
            "alpha",
            "beta",
            "k",
            "k_floor",
            "k1",
            "k2",
            "k2_saturated",
            "limit",
            "s_opt",
            "A_t_opt",
            "snr_db",
            "amplitude_ratio",
            "alpha_at_k",
        ]);
        doc.comment(format!("n0 = {n0}"));
        doc.comment(format!("L = {l}"));
        doc.comment(format!("sigma_ch = {}", fmt_f64(sigma_ch)));
        doc.comment(format!("A_t = {}", fmt_f64(a_t)));
        doc.comment(format!("alpha = {}", fmt_f64(alpha)));
        doc.comment(format!("beta = {}", fmt_f64(beta)));
        append_provenance(&mut doc, ctx);
        let (k2_cell, sat) = if budget.k2_saturated {
            (String::new(), "1".to_string())
        } else {
            (fmt_f64(budget.k2), "0".to_string())
        };
        doc.push_row(vec![
            n0.to_string(),
            l.to_string(),
            n_eq.to_string(),
            fmt_f64(sigma_ch),
            fmt_f64(a_t),
            fmt_f64(sigma_norm),
            fmt_f64(alpha),
            fmt_f64(beta),
            fmt_f64(budget.k),
            fmt_f64(budget.k.floor()),
            budget.k1.map(fmt_f64).unwrap_or_default(),
            k2_cell,
            sat,
            budget.limit.label().to_string(),
            fmt_f64(s),
            fmt_f64(a_opt),
            fmt_f64(snr),
            fmt_f64(ratio),
            alpha_at_k.map(fmt_f64).unwrap_or_default(),
        ]);
        write_doc(&doc, &path)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// figure

fn cmd_figure(ctx: &Ctx, args: &FigureArgs) -> Result<(), CliError> {
    let name = match (&args.name, ctx.cfg.get_str("figure")) {
        (Some(n), _) => n.clone(),
        (None, Some(n)) => n.to_string(),
        (None, None) => {
            return Err(CliError::Usage(
                "missing figure name: pass it as an argument or set config key 'figure'".into(),
            ))
        }
    };
    let kind: FigureKind = name
        .parse()
        .map_err(|e: figures::FigureError| CliError::Usage(e.to_string()))?;

    let alpha = pick_f64(args.alpha, &ctx.cfg, "alpha", Some(0.1))?.unwrap();
    let beta = pick_f64(args.beta, &ctx.cfg, "beta", Some(0.05))?.unwrap();
    let n0 = pick_count(args.n0, &ctx.cfg, "n0", Some(10_000))?.unwrap();
    let params = FigureParams {
        acc: accuracy_from(alpha, beta)?,
        n0,
        sweep: sweep_from_config(&ctx.cfg)?,
    };

    let mut doc = figures::generate(kind, &params).map_err(|e| match e {
        figures::FigureError::Bounds(b) => CliError::BoundDomain(b.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;
    append_provenance(&mut doc, ctx);

    let default_name = format!("{}.csv", kind.name());
    let path = ctx.out_path(Some(&default_name)).unwrap();
    write_doc(&doc, &path)
}

fn sweep_from_config(cfg: &Config) -> Result<Option<Sweep>, CliError> {
    let any = ["sweep_axis", "sweep_lo", "sweep_hi", "sweep_points", "sweep_scale"]
        .iter()
        .any(|k| cfg.contains(k));
    if !any {
        return Ok(None);
    }
    let axis: figures::SweepAxis = cfg
        .require_str("sweep_axis")?
        .parse()
        .map_err(|e: figures::FigureError| CliError::Usage(e.to_string()))?;
    let lo = cfg.require_f64("sweep_lo")?;
    let hi = cfg.require_f64("sweep_hi")?;
    let points = cfg.require_u64("sweep_points")? as usize;
    let scale: figures::SweepScale = cfg
        .get_str("sweep_scale")
        .unwrap_or("linear")
        .parse()
        .map_err(|e: figures::FigureError| CliError::Usage(e.to_string()))?;
    let sweep = Sweep { axis, lo, hi, points, scale };
    sweep
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Some(sweep))
}

// ---------------------------------------------------------------------------
// simulate

/// Resolved simulation parameters shared by `simulate` and `attack-demo`.
struct SimSetup {
    spec: analyst::ExperimentSpec,
    alpha: f64,
    beta: f64,
    alpha_was_computed: bool,
    trials: u64,
}

fn sim_setup(
    ctx: &Ctx,
    args: &SimArgs,
    required: bool,
    demo_defaults: bool,
) -> Result<SimSetup, CliError> {
    // The demo pins its own desk-scale defaults (small n, long session,
    // fixed threshold); `simulate` insists the deployment be stated.
    let (n0_default, k_default, policy_default, alpha_default) = if demo_defaults {
        (Some(100), Some(1001), Some("attack"), Some(0.1))
    } else {
        (None, None, None, None)
    };
    let trials_default = 100;

    let n0 = pick_count(args.n0, &ctx.cfg, "n0", n0_default)?;
    let k = pick_count(args.k, &ctx.cfg, "k", k_default)?;
    let policy_str = args
        .policy
        .clone()
        .or_else(|| ctx.cfg.get_str("policy").map(str::to_string))
        .or_else(|| policy_default.map(str::to_string));
    let (n0, k, policy_str) = if required {
        (require(n0, "n0")?, require(k, "k")?, require(policy_str, "policy")?)
    } else {
        (n0.unwrap(), k.unwrap(), policy_str.unwrap())
    };
    let policy: Policy = policy_str
        .parse()
        .map_err(|e: analyst::ParsePolicyError| CliError::Usage(e.to_string()))?;

    let l = pick_count(args.l, &ctx.cfg, "L", Some(1))?.unwrap();
    let sigma_ch = pick_f64(args.sigma, &ctx.cfg, "sigma_ch", Some(0.5))?.unwrap();
    let a_t = pick_f64(args.at, &ctx.cfg, "A_t", Some(1.0))?.unwrap();
    let domain = pick_count(args.domain, &ctx.cfg, "N", Some(10_000))?.unwrap();
    let beta = pick_f64(args.beta, &ctx.cfg, "beta", Some(0.05))?.unwrap();
    let population_mean = pick_f64(None, &ctx.cfg, "population_mean", Some(0.5))?.unwrap();
    let trials = ctx.trials(trials_default)?;

    if n0 == 0 {
        return Err(CliError::Usage("n0 must be >= 1".into()));
    }
    if l == 0 {
        return Err(CliError::Usage("L must be >= 1".into()));
    }
    if domain == 0 {
        return Err(CliError::Usage("N must be >= 1".into()));
    }
    if !(sigma_ch >= 0.0 && sigma_ch.is_finite()) {
        return Err(CliError::Usage(format!(
            "sigma_ch must satisfy sigma_ch >= 0, got {sigma_ch}"
        )));
    }
    if !(a_t > 0.0 && a_t.is_finite()) {
        return Err(CliError::Usage(format!("A_t must satisfy A_t > 0, got {a_t}")));
    }

    // α: explicit, or derived from the accuracy bound at this operating
    // point. The bound needs positive noise, so the noiseless control case
    // must state its own threshold.
    let explicit_alpha = pick_f64(args.alpha, &ctx.cfg, "alpha", alpha_default)?;
    let (alpha, alpha_was_computed) = match explicit_alpha {
        Some(a) => {
            if !(a > 0.0 && a <= 1.0) {
                return Err(CliError::Usage(format!(
                    "alpha must satisfy 0 < alpha <= 1, got {a}"
                )));
            }
            (a, false)
        }
        None => {
            let sigma_norm = sigma_ch / (l as f64 * a_t);
            if sigma_norm <= 0.0 {
                return Err(CliError::Usage(
                    "alpha is required when sigma_ch = 0 (the finite-noise accuracy \
                     bound does not apply)"
                        .into(),
                ));
            }
            let n_eq = l.checked_mul(n0).ok_or_else(|| {
                CliError::Usage("L * n0 overflows".into())
            })?;
            let point = MechanismPoint::new(n_eq, sigma_norm, k as f64)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            (bounds::alpha_of(&point, beta)?, true)
        }
    };

    Ok(SimSetup {
        spec: analyst::ExperimentSpec {
            domain: domain.try_into().map_err(|_| {
                CliError::Usage(format!("N = {domain} exceeds the supported domain size"))
            })?,
            n0: n0 as usize,
            l: l as usize,
            sigma_ch,
            a_t,
            k,
            policy,
            population_mean,
        },
        alpha,
        beta,
        alpha_was_computed,
        trials,
    })
}

fn echo_sim_comments(doc: &mut CsvDoc, setup: &SimSetup, ctx: &Ctx) {
    let s = &setup.spec;
    doc.comment(format!("policy = {}", s.policy));
    doc.comment(format!("n0 = {}", s.n0));
    doc.comment(format!("L = {}", s.l));
    doc.comment(format!("sigma_ch = {}", fmt_f64(s.sigma_ch)));
    doc.comment(format!("A_t = {}", fmt_f64(s.a_t)));
    doc.comment(format!("N = {}", s.domain));
    doc.comment(format!("k = {}", s.k));
    doc.comment(format!(
        "alpha = {}{}",
        fmt_f64(setup.alpha),
        if setup.alpha_was_computed { " (computed from bounds)" } else { "" }
    ));
    doc.comment(format!("beta = {}", fmt_f64(setup.beta)));
    doc.comment(format!("population_mean = {}", fmt_f64(s.population_mean)));
    doc.comment(format!("trials = {}", setup.trials));
    append_provenance(doc, ctx);
}

fn cmd_simulate(ctx: &Ctx, args: &SimArgs) -> Result<(), CliError> {
    let setup = sim_setup(ctx, args, true, false)?;
    let pop = Population::uniform(setup.spec.domain);
    let report = evaluate_accuracy(&pop, &setup.spec, setup.alpha, ctx.seed, setup.trials)?;

    println!(
        "failure_rate = {} ({} of {} trials at alpha = {}{})",
        fmt_f64(report.failure_rate),
        report.failures,
        report.trials(),
        fmt_f64(setup.alpha),
        if setup.alpha_was_computed { ", computed from bounds" } else { "" }
    );
    println!(
        "wilson95     = [{}, {}]",
        fmt_f64(report.wilson95.0),
        fmt_f64(report.wilson95.1)
    );

    if let Some(path) = ctx.out_path(None) {
        let mut doc = report.to_csv_doc();
        echo_sim_comments(&mut doc, &setup, ctx);
        write_doc(&doc, &path)?;

        // The audited artifact: trial 0's full transcript.
        let transcript = run_trial(&pop, &setup.spec, ctx.seed, 0)?;
        let mut tdoc = transcript.to_csv_doc();
        echo_sim_comments(&mut tdoc, &setup, ctx);
        tdoc.comment("transcript of trial 0");
        let mut tpath = path.into_os_string();
        tpath.push(".transcript.csv");
        write_doc(&tdoc, Path::new(&tpath))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// attack-demo

fn cmd_attack_demo(ctx: &Ctx, args: &SimArgs) -> Result<(), CliError> {
    let mut setup = sim_setup(ctx, args, false, true)?;
    setup.spec.policy = Policy::Attack;

    // Calibrate the ladder from s_opt at the deployment's equivalent n when
    // that exists; desk-scale demos are usually below the bound's range, in
    // which case a reference n stands in (the ladder only needs a sensible
    // scale to sweep through).
    let n_eq = (setup.spec.l as u64) * (setup.spec.n0 as u64);
    let acc = accuracy_from(setup.alpha, setup.beta)?;
    let (s_ref, s_ref_n) = match bounds::s_opt(n_eq, &acc) {
        Ok(s) => (s, n_eq),
        Err(_) => (
            bounds::s_opt(LADDER_REFERENCE_N, &acc)?,
            LADDER_REFERENCE_N,
        ),
    };
    let rungs = [0.0, s_ref / 10.0, s_ref, 10.0 * s_ref];

    println!(
        "attack ladder: sigma_over_At in {{0, s/10, s, 10s}}, s = s_opt({s_ref_n}) = {}",
        fmt_f64(s_ref)
    );
    println!("{:<14} {:>12} {:>12} {:>12}", "sigma_over_At", "failure_rate", "wilson_lo", "wilson_hi");

    let pop = Population::uniform(setup.spec.domain);
    let mut rows = Vec::new();
    for &rung in &rungs {
        let mut spec = setup.spec;
        spec.sigma_ch = rung * spec.a_t * spec.l as f64;
        let report = evaluate_accuracy(&pop, &spec, setup.alpha, ctx.seed, setup.trials)?;
        println!(
            "{:<14.6} {:>12.4} {:>12.4} {:>12.4}",
            rung, report.failure_rate, report.wilson95.0, report.wilson95.1
        );
        rows.push((rung, spec.sigma_ch, report));
    }

    if let Some(path) = ctx.out_path(None) {
        let mut doc = CsvDoc::new(&[
            "sigma_over_At",
            "sigma_ch",
            "failures",
            "trials",
            "failure_rate",
            "wilson_lo",
            "wilson_hi",
        ]);
        echo_sim_comments(&mut doc, &setup, ctx);
        doc.comment(format!(
            "ladder reference: s_opt({s_ref_n}) = {}",
            fmt_f64(s_ref)
        ));
        for (rung, sigma_ch, report) in &rows {
            doc.push_row(vec![
                fmt_f64(*rung),
                fmt_f64(*sigma_ch),
                report.failures.to_string(),
                report.trials().to_string(),
                fmt_f64(report.failure_rate),
                fmt_f64(report.wilson95.0),
                fmt_f64(report.wilson95.1),
            ]);
        }
        write_doc(&doc, &path)?;
    }
    Ok(())
}
