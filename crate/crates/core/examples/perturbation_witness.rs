//! Constructs balls of perturbed sender utilities on which a robust
//! equilibrium survives, and reconfirms each with fresh samples.
//!
//! Run with `cargo run --release --example perturbation_witness`.

use cheaptalk::equilibrium::{construct_equilibrium, SupportChoice};
use cheaptalk::fixtures::{example1, example2};
use cheaptalk::geometry::perturbation_witness;
use cheaptalk::rational::{format_fixed, rat};
use cheaptalk::verifier::{confirm_witness, VerifierOptions};

fn main() -> cheaptalk::error::Result<()> {
    let cases = [(example1(), rat(1, 1)), (example2(), rat(3, 2)), (example2(), rat(2, 1))];
    for (g, s) in cases {
        let e = construct_equilibrium(&g, &s, &SupportChoice::Extreme)?;
        let w = perturbation_witness(&g, &e, &rat(1, 100), &rat(1, 4))?;
        let report = confirm_witness(&g, &e, &w, 200, 42, &VerifierOptions::default())?;
        println!(
            "s = {}: case {}, radius {}, fresh samples {}",
            format_fixed(&s, 2),
            w.case.as_str(),
            format_fixed(&w.radius, 8),
            report.verdict.as_str()
        );
        println!("  {}", w.to_json());
    }
    Ok(())
}
