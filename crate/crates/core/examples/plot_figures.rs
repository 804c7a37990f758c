//! Writes SVG step plots and CSV cell tables for every built-in fixture.
//!
//! Run with `cargo run --example plot_figures -- [output-dir]`; the default
//! directory is `figures`.

use std::path::PathBuf;

use cheaptalk::best_reply::value_profile;
use cheaptalk::fixtures::{builtin_fixture, Fixture, NAMES};
use cheaptalk::plot::{emit_csv, emit_svg, FigureSpec};

fn main() -> cheaptalk::error::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    for name in NAMES {
        let spec = match builtin_fixture(name)? {
            Fixture::Game(g) => FigureSpec::new(value_profile(&g)?, Some(g.prior().clone()))?,
            Fixture::Profile { profile, prior } => FigureSpec::new(profile, Some(prior))?,
        };
        std::fs::write(dir.join(format!("{name}.svg")), emit_svg(&spec))?;
        std::fs::write(dir.join(format!("{name}.csv")), emit_csv(&spec))?;
        println!("{name}: {} robust rectangles", spec.rectangles().count());
    }
    println!("wrote figures to {}", dir.display());
    Ok(())
}
