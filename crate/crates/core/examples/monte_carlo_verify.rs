//! Checks robustness verdicts against sampled perturbed games. Every failed
//! sample carries an exact Farkas certificate.
//!
//! Run with `cargo run --release --example monte_carlo_verify`.

use cheaptalk::equilibrium::{construct_equilibrium, SupportChoice};
use cheaptalk::fixtures::example1;
use cheaptalk::rational::{rat, zero};
use cheaptalk::verifier::{monte_carlo_full_robustness, monte_carlo_robustness, VerifierOptions};

fn main() -> cheaptalk::error::Result<()> {
    let g = example1();
    let opts = VerifierOptions::default();
    let eps = rat(1, 100);
    let equilibria = [
        ("babbling", construct_equilibrium(&g, &zero(), &SupportChoice::Extreme)?),
        ("s = 1 extreme support", construct_equilibrium(&g, &rat(1, 1), &SupportChoice::Extreme)?),
        (
            "s = 1/2 on {1/4, 3/4}",
            construct_equilibrium(&g, &rat(1, 2), &SupportChoice::Explicit(rat(1, 4), rat(3, 4)))?,
        ),
    ];
    for (label, e) in &equilibria {
        let robust = monte_carlo_robustness(&g, e, &eps, 100, 7, &opts)?;
        let full = monte_carlo_full_robustness(&g, e, &eps, 100, 7, &opts)?;
        println!(
            "{label}: robust check {} ({} solves, {} centers), full check {} ({} samples)",
            robust.verdict.as_str(),
            robust.lp_solves,
            robust.centers_tried,
            full.verdict.as_str(),
            full.samples_tested
        );
        if let Some(f) = full.failures.first() {
            println!("  certificate valid: {}", f.certificate_valid);
        }
    }
    Ok(())
}
