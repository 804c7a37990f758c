//! The set of receiver mixture differences at a pair of posteriors: its span
//! dimension, explicit generators, and the continuous decomposition of a
//! nearby difference back into mixtures.
//!
//! Run with `cargo run --example difference_geometry`.

use cheaptalk::best_reply::best_reply_partition;
use cheaptalk::fixtures::example2;
use cheaptalk::geometry::{decompose_difference, DifferenceSet};
use cheaptalk::linalg::rank;
use cheaptalk::rational::{dyadic, format_rational, max_norm, rat, sub_vec, zero};

fn fmt(v: &[cheaptalk::rational::Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", parts.join(", "))
}

fn main() -> cheaptalk::error::Result<()> {
    let g = example2();
    let p = best_reply_partition(&g);
    for (mu, mu_prime) in [(rat(1, 8), rat(3, 4)), (rat(1, 4), rat(3, 4)), (rat(1, 2), rat(1, 2))] {
        let d = DifferenceSet::new(4, p.actions_at(&mu), p.actions_at(&mu_prime));
        println!(
            "posteriors {} and {}: span dimension {}, generator rank {}",
            format_rational(&mu),
            format_rational(&mu_prime),
            d.span_dim,
            rank(&d.generators())
        );
    }
    // A = {a0, a2} at 1/4 and A' = {a0, a3} at 3/4 share a0.
    let r0 = vec![rat(1, 10), zero(), rat(9, 10), zero()];
    let r0p = vec![rat(1, 10), zero(), zero(), rat(9, 10)];
    let x0 = sub_vec(&r0, &r0p);
    for k in [1, 4, 8] {
        let step = dyadic(k);
        let x = vec![zero(), zero(), &x0[2] - &step, &x0[3] + &step];
        let dec = decompose_difference(&x, &[0, 2], &[0, 3], (&r0, &r0p))?;
        println!(
            "|x - x0| = 2^-{k}: r = {}, r' = {}, moved {}",
            fmt(&dec.r),
            fmt(&dec.r_prime),
            format_rational(&(max_norm(&sub_vec(&dec.r, &r0)) + max_norm(&sub_vec(&dec.r_prime, &r0p))))
        );
    }
    Ok(())
}
