//! Why adaptivity is the whole problem.
//!
//! A benign analyst asking random, pre-registered queries stays within the
//! accuracy guarantee. An adaptive one can spend the same budget probing,
//! then assemble one final query that correlates with the sampling noise of
//! this particular dataset — and on a noiseless channel that final answer
//! is far from the population truth. The Monte-Carlo harness makes the gap
//! stark at desk scale.
//!
//! ```text
//! cargo run --example overfit_attack
//! ```

use airquery::analyst::{evaluate_accuracy, ExperimentSpec, Policy};
use airquery::sim::Population;

fn main() {
    let base = ExperimentSpec {
        domain: 10_000,
        n0: 2_500,
        l: 1,
        sigma_ch: 0.0, // noiseless: the mechanism offers no protection
        a_t: 1.0,
        k: 1001,
        policy: Policy::Benign,
        population_mean: 0.5,
    };
    let pop = Population::uniform(base.domain);
    let (alpha, master, trials) = (0.1, 7, 50);

    println!(
        "n = {}, k = {}, sigma_ch = {}, alpha = {alpha}, {trials} trials",
        base.n0, base.k, base.sigma_ch
    );
    println!();
    for policy in [Policy::Benign, Policy::Attack] {
        let spec = ExperimentSpec { policy, ..base };
        let report = evaluate_accuracy(&pop, &spec, alpha, master, trials).unwrap();
        println!(
            "{policy:<8} failure rate {:.2}  ({} of {} trials, wilson95 [{:.3}, {:.3}])",
            report.failure_rate,
            report.failures,
            report.trials(),
            report.wilson95.0,
            report.wilson95.1
        );
    }
    println!();
    println!("same data, same budget, same channel — only the adaptivity differs");
}
