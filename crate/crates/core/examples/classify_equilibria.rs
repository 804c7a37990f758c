//! Builds two-posterior equilibria for chosen payoffs, classifies them, and
//! shows the perturbation that breaks full robustness.
//!
//! Run with `cargo run --example classify_equilibria`.

use cheaptalk::equilibrium::{construct_equilibrium, expand_to_messages, SupportChoice};
use cheaptalk::fixtures::{example1, example2};
use cheaptalk::rational::{format_rational, rat, Rational};
use cheaptalk::robustness::{classify_two_posterior, fully_robust_refuter};

fn show(label: &str, g: &cheaptalk::game::Game, s: Rational, choice: SupportChoice) -> cheaptalk::error::Result<()> {
    let e = construct_equilibrium(g, &s, &choice)?;
    let beliefs: Vec<String> = e.beliefs().iter().map(format_rational).collect();
    let verdict = classify_two_posterior(g, &e)?;
    println!(
        "{label}: s = {}, support {{{}}} -> {} ({})",
        format_rational(&s),
        beliefs.join(", "),
        verdict.status.as_str(),
        verdict.rule.as_str()
    );
    if let Ok(r) = fully_robust_refuter(g, &e) {
        let d: Vec<String> = r.direction.iter().map(format_rational).collect();
        println!("  not fully robust: perturb theta2 utilities along [{}]", d.join(", "));
    }
    let m = expand_to_messages(g, &e)?;
    println!("  {} messages, Bayes consistent: {}", m.messages.len(), m.satisfies_bayes_rule(&g.prior_belief()));
    Ok(())
}

fn main() -> cheaptalk::error::Result<()> {
    let g1 = example1();
    show("ex1", &g1, rat(1, 1), SupportChoice::Extreme)?;
    show("ex1", &g1, rat(1, 2), SupportChoice::Explicit(rat(1, 4), rat(3, 4)))?;
    let g2 = example2();
    show("ex2", &g2, rat(3, 2), SupportChoice::Extreme)?;
    show("ex2", &g2, rat(2, 1), SupportChoice::Extreme)?;
    Ok(())
}
