//! The exact phase-one simplex: a feasible point, or a Farkas certificate
//! that can be checked without the solver.
//!
//! Run with `cargo run --example exact_feasibility`.

use cheaptalk::lp::{Feasibility, LinearSystem, Relation};
use cheaptalk::rational::{format_rational, int, rat};

fn report(label: &str, sys: &LinearSystem) {
    match sys.solve() {
        Feasibility::Feasible(z) => {
            let z: Vec<String> = z.iter().map(format_rational).collect();
            println!("{label}: feasible at ({})", z.join(", "));
        }
        Feasibility::Infeasible(cert) => {
            let y: Vec<String> = cert.multipliers.iter().map(format_rational).collect();
            println!("{label}: infeasible, multipliers ({}), valid: {}", y.join(", "), cert.verify(sys));
        }
    }
}

fn main() {
    // z1 + z2 = 1, z1 - z2 >= 1/3.
    let mut sys = LinearSystem::new(2);
    sys.push(vec![int(1), int(1)], Relation::Eq, int(1));
    sys.push(vec![int(1), int(-1)], Relation::Ge, rat(1, 3));
    report("mixture with a tilt", &sys);
    // Adding z1 <= 1/2 makes it impossible.
    sys.push_sparse(&[(0, int(1))], Relation::Le, rat(1, 2));
    report("tilt with a cap", &sys);
}
