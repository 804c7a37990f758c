//! Best replies, sender values, equilibrium payoffs and the envelope for the
//! two concrete built-in games.
//!
//! Run with `cargo run --example analyze_game`.

use cheaptalk::best_reply::{best_reply_partition, value_profile};
use cheaptalk::equilibrium::{envelope, payoff_set};
use cheaptalk::fixtures::{example1, example2};
use cheaptalk::rational::format_rational;

fn main() -> cheaptalk::error::Result<()> {
    for (name, g) in [("ex1", example1()), ("ex2", example2())] {
        println!("== {name} (prior {})", format_rational(g.prior()));
        let partition = best_reply_partition(&g);
        let profile = value_profile(&g)?;
        for (cell, v) in partition.cells().iter().zip(profile.values()) {
            let names: Vec<&str> = cell.actions.iter().map(|&a| g.actions()[a].as_str()).collect();
            println!("  {:<14} best replies {:<10} V = {}", cell.span.to_string(), names.join(","), v);
        }
        println!("  payoff set  {}", payoff_set(&profile, g.prior()));
        println!("  envelope    {}", format_rational(&envelope(&profile, g.prior())));
    }
    Ok(())
}
