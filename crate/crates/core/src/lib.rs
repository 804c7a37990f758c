//! Exact analysis of binary-state cheap-talk games: best replies, equilibrium
//! payoffs, robustness to perturbed sender utilities, and a Monte Carlo
//! verifier whose every refutation carries a checkable certificate.

pub mod best_reply;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod game;
pub mod intervals;
pub mod linalg;
pub mod lp;
pub mod plot;
pub mod rational;
pub mod robustness;
pub mod verifier;
