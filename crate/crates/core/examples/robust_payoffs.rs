//! Payoffs attainable in robust equilibria: the full scan on the concrete
//! games and the simplified rule on the generic abstract profiles.
//!
//! Run with `cargo run --example robust_payoffs`.

use cheaptalk::equilibrium::envelope;
use cheaptalk::fixtures::{builtin_fixture, Fixture, NAMES};
use cheaptalk::game::Belief;
use cheaptalk::rational::format_rational;
use cheaptalk::robustness::{generic_robust_set, robust_attainable, robust_payoff_set, robust_set_in};

fn main() -> cheaptalk::error::Result<()> {
    for name in NAMES {
        match builtin_fixture(name)? {
            Fixture::Game(g) => {
                let set = robust_payoff_set(&g)?;
                println!("{name}: robust payoffs {set}");
                for s in ["1/2", "1", "3/2", "2"] {
                    let s = cheaptalk::rational::parse_rational(s).expect("literal");
                    match robust_attainable(&g, &s) {
                        Ok(v) => println!("  s = {:<4} {:<10} by {}", format_rational(&s), v.status.as_str(), v.rule.as_str()),
                        Err(e) => println!("  s = {:<4} {e}", format_rational(&s)),
                    }
                }
            }
            Fixture::Profile { profile, prior } => {
                let full = robust_set_in(&profile, &prior)?;
                let generic = generic_robust_set(&profile, &Belief::new(prior.clone())?)?;
                println!(
                    "{name}: envelope {}, robust payoffs {full} (simplified rule: {generic})",
                    format_rational(&envelope(&profile, &prior))
                );
            }
        }
    }
    Ok(())
}
