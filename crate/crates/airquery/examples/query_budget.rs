//! How many adaptive queries can one deployment afford?
//!
//! Evaluates the closed-form budget `k = min{k₁, k₂}` at a single operating
//! point and walks the same formula in the forward direction (given `k`,
//! what accuracy is guaranteed?).
//!
//! ```text
//! cargo run --example query_budget
//! ```

use airquery::bounds::{alpha_of, k_budget, AccuracySpec, MechanismPoint};

fn main() {
    // A modest deployment: one million samples, channel noise worth 1.8% of
    // the answer scale after normalization, and a (10%, 5%) accuracy target.
    let n = 1_000_000u64;
    let sigma = 0.018;
    let acc = AccuracySpec::new(0.1, 0.05).unwrap();

    let budget = k_budget(sigma, n, &acc).unwrap();
    println!("deployment: n = {n}, sigma/A_t = {sigma}, target ({}, {})", acc.alpha, acc.beta);
    println!();
    println!("  k1 (leakage limit) = {:>12.3}", budget.k1.unwrap());
    println!("  k2 (noise limit)   = {:>12.3}", budget.k2);
    println!("  k  = min(k1, k2)   = {:>12.3}  [{}]", budget.k, budget.limit.label());
    println!();

    // The same noise level with ten times the data flips the binding
    // constraint: plenty of statistical headroom, but the noise floor
    // doesn't move, so k2 still caps the session.
    let budget10 = k_budget(sigma, 10 * n, &acc).unwrap();
    println!("with 10x the data: k = {:.3} [{}]", budget10.k, budget10.limit.label());
    println!();

    // Forward direction: commit to k rounds first, read off the accuracy.
    for k in [1.0, 10.0, 100.0, 1000.0] {
        let point = MechanismPoint::new(n, sigma, k).unwrap();
        let alpha = alpha_of(&point, acc.beta).unwrap();
        println!("  k = {k:>6}  ->  alpha = {alpha:.4} at beta = {}", acc.beta);
    }
}
