//! Over-the-air aggregation as a single bigger mechanism.
//!
//! `L` devices transmitting simultaneously over a shared Gaussian channel
//! behave, after normalization, exactly like one point-to-point mechanism
//! with the pooled dataset `n_eq = L·n0` and the reduced noise
//! `σ_eq = σ_ch/L`. The reduction is an algebraic identity, so the query
//! budgets agree bit-for-bit — and growing the federation helps twice
//! (more data *and* less effective noise), which is why the budget takes
//! off so steeply with `L`.
//!
//! ```text
//! cargo run --example federated_equivalence
//! ```

use airquery::bounds::{k_budget, to_equivalent, AccuracySpec, SystemConfig};

fn main() {
    let acc = AccuracySpec::new(0.1, 0.05).unwrap();
    let n0 = 10_000u64;
    let sigma_ch = 0.5;

    println!("n0 = {n0} per device, sigma_ch/A_t = {sigma_ch}");
    println!("{:>6} {:>10} {:>12} {:>14} {:>12}", "L", "n_eq", "sigma_eq/At", "k", "n_eq*sig_eq");
    for l in [1u64, 8, 16, 30, 64, 128, 256, 512] {
        let cfg = SystemConfig::new(n0, l, sigma_ch, 1.0).unwrap();
        let (n_eq, sigma_norm) = to_equivalent(&cfg);
        let via_equiv = k_budget(sigma_norm, n_eq, &acc).unwrap().k;

        // The direct computation on pooled parameters is the same bits.
        let direct = k_budget(sigma_ch / (l as f64 * 1.0), l * n0, &acc).unwrap().k;
        assert_eq!(via_equiv.to_bits(), direct.to_bits());

        // And the information-per-sample product n_eq·σ_eq never moves.
        let invariant = n_eq as f64 * (sigma_ch / l as f64);
        println!("{l:>6} {n_eq:>10} {sigma_norm:>12.6} {via_equiv:>14.3} {invariant:>12.1}");
    }
    println!();
    println!("equivalence exact in every row; budget crosses 1 near L = 30");
}
