//! Designing the noise level instead of suffering it.
//!
//! For a fixed dataset size there is a sweet spot `s_opt` in the normalized
//! noise ratio `σ/A_t`: below it the mechanism leaks too much information
//! per answer (k₁ binds), above it the answers are too noisy to be useful
//! (k₂ binds). This example finds that point, shows the budget collapsing
//! on both sides of it, and translates it into a transmit amplitude and an
//! SNR for a concrete channel.
//!
//! ```text
//! cargo run --example operating_point
//! ```

use airquery::bounds::{
    k_budget, optimal_amplitude, s_opt, snr_db, AccuracySpec, SystemConfig,
};

fn main() {
    let acc = AccuracySpec::new(0.1, 0.05).unwrap();
    let n = 1_000_000u64;

    let s = s_opt(n, &acc).unwrap();
    let k_max = k_budget(s, n, &acc).unwrap().k;
    println!("n = {n}: s_opt = {s:.6}, k_max = {k_max:.1}");
    println!();

    // The budget is sharply peaked: a factor of two in noise either way
    // costs orders of magnitude in answerable queries.
    println!("{:>12} {:>14} {:>16}", "sigma/A_t", "k", "binding limit");
    for factor in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let b = k_budget(s * factor, n, &acc).unwrap();
        println!("{:>12.6} {:>14.2} {:>16}", s * factor, b.k, b.limit.label());
    }
    println!();

    // Hitting s_opt on a real channel means choosing the transmit
    // amplitude. With σ_ch = 0.5 and one device:
    let sigma_ch = 0.5;
    let cfg = SystemConfig::new(n, 1, sigma_ch, 1.0).unwrap();
    let a = optimal_amplitude(&cfg, &acc).unwrap();
    let tuned = SystemConfig::new(n, 1, sigma_ch, a).unwrap();
    println!("channel sigma_ch = {sigma_ch}: transmit at A_t = {a:.3}");
    println!("  -> per-answer SNR = {:.2} dB", snr_db(&tuned).unwrap());
}
