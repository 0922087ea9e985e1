//! The inner optimization `g(c) = min_λ f(λ)` and its Lambert-W closed form.
//!
//! `g` converts the leakage ratio `c = k/(nσ²)` into the exponent that
//! drives the first accuracy term. This example evaluates the closed form
//! against a brute-force grid minimization to show they agree, then prints
//! a short table including the minimizing `λ*`.
//!
//! ```text
//! cargo run --example g_curve
//! ```

use airquery::bounds::{f_lambda, g, lambda_star};

/// Brute-force reference: scan `f(λ)` over a fine grid of `λ ∈ (0, 1)`.
fn grid_min(c: f64, points: usize) -> f64 {
    (1..=points)
        .map(|i| f_lambda(i as f64 / (points + 1) as f64, c).unwrap())
        .fold(f64::INFINITY, f64::min)
}

fn main() {
    println!("{:>8} {:>14} {:>14} {:>10} {:>12}", "c", "g(c)", "grid min", "rel err", "lambda*");
    for c in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0] {
        let closed = g(c).unwrap();
        let brute = grid_min(c, 200_000);
        let rel = (closed - brute).abs() / brute;
        let l = lambda_star(c).unwrap();
        println!("{c:>8} {closed:>14.6} {brute:>14.6} {rel:>10.1e} {l:>12.6}");
    }
    println!();

    // The curve approaches its infimum of 1 as c -> 0+ (never attained: the
    // minimizer λ* slides to 0) like 1 + √(2c), and grows like c + ln c + 1
    // once c is large.
    for c in [1e-6f64, 1e-3] {
        let asym = 1.0 + (2.0 * c).sqrt();
        println!("c = {c:>8.0e}: g = {:>12.6}  (1 + sqrt(2c)  = {asym:.6})", g(c).unwrap());
    }
    for c in [1e2f64, 1e3] {
        let asym = c + c.ln() + 1.0;
        println!("c = {c:>8.0e}: g = {:>12.6}  (c + ln c + 1 = {asym:.6})", g(c).unwrap());
    }
}
