//! Command-line front end. Every subcommand prints one JSON document (or a
//! figure) and maps errors to stable exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::best_reply::{parse_profile, value_profile, ValueProfile};
use crate::equilibrium::{construct_equilibrium, envelope, payoff_set, Equilibrium, SupportChoice};
use crate::error::{Error, Result};
use crate::fixtures::{builtin_fixture, Fixture};
use crate::game::{game_from_json, Game};
use crate::geometry::perturbation_witness_with;
use crate::plot::{emit_csv, emit_svg, FigureSpec};
use crate::rational::{self, parse_rational, Rational};
use crate::robustness::{classify_two_posterior, robust_set_in};
use crate::verifier::{monte_carlo_full_robustness, monte_carlo_robustness, Verdict, VerifierOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "cheaptalk", version, about = "Exact analysis of binary-state cheap-talk games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Best-reply partition, value profile, envelope and payoff set.
    Analyze { input: String },
    /// Sender payoffs attainable in robust equilibria.
    RobustSet { input: String },
    /// Robustness verdict for an equilibrium with at most two posteriors.
    Classify {
        game: String,
        #[arg(long)]
        eq: PathBuf,
    },
    /// Ball of perturbed utilities that keep a robust equilibrium.
    Witness {
        game: String,
        #[arg(long)]
        eq: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        radius: Rational,
        #[arg(long, value_parser = rational_arg, default_value = "1/4")]
        x_radius: Rational,
    },
    /// Monte Carlo check of a verdict over sampled perturbed games.
    Verify {
        game: String,
        #[arg(long)]
        eq: PathBuf,
        #[arg(long, value_enum, default_value = "robust")]
        mode: Mode,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_parser = rational_arg, default_value = "1/100")]
        radius: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = rational_arg, default_value = "1/10")]
        eps_payoff: Rational,
        #[arg(long, value_parser = rational_arg, default_value = "1/4")]
        eps_x: Rational,
        #[arg(long)]
        max_solves: Option<usize>,
    },
    /// SVG step plot, optionally with the cell table as CSV.
    Plot {
        input: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print a built-in fixture, or write it to `<dir>/<name>.json`.
    Examples {
        name: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Robust,
    Full,
}

fn rational_arg(text: &str) -> std::result::Result<Rational, String> {
    parse_rational(text)
}

/// A game file, a profile file, or a fixture name.
enum Input {
    Game(Game),
    Profile { profile: ValueProfile, prior: Option<Rational> },
}

impl Input {
    fn profile_and_prior(&self) -> Result<(ValueProfile, Rational)> {
        match self {
            Input::Game(g) => Ok((value_profile(g)?, g.prior().clone())),
            Input::Profile { profile, prior } => {
                let prior = prior
                    .clone()
                    .ok_or_else(|| Error::validation("prior", "profile input needs a prior"))?;
                Ok((profile.clone(), prior))
            }
        }
    }
}

fn load_input(source: &str) -> Result<Input> {
    if !Path::new(source).exists() {
        if let Ok(fixture) = builtin_fixture(source) {
            return Ok(match fixture {
                Fixture::Game(g) => Input::Game(g),
                Fixture::Profile { profile, prior } => Input::Profile {
                    profile,
                    prior: Some(prior),
                },
            });
        }
    }
    let text = std::fs::read_to_string(source)?;
    let doc = rational::parse_document(&text)?;
    if doc.get("cells").is_some() {
        let (profile, prior) = parse_profile(&doc)?;
        Ok(Input::Profile { profile, prior })
    } else {
        Ok(Input::Game(game_from_json(&doc)?))
    }
}

fn load_game(source: &str) -> Result<Game> {
    match load_input(source)? {
        Input::Game(g) => Ok(g),
        Input::Profile { .. } => Err(Error::validation("", "this subcommand needs a concrete game")),
    }
}

fn load_equilibrium(path: &Path) -> Result<Equilibrium> {
    Equilibrium::parse(&std::fs::read_to_string(path)?)
}

fn fixture_json(name: &str) -> Result<Value> {
    Ok(match builtin_fixture(name)? {
        Fixture::Game(g) => g.to_json(),
        Fixture::Profile { profile, prior } => profile.to_json(Some(&prior)),
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::WitnessSearchFailed(_) | Error::BudgetExceeded { .. } => EXIT_INTERNAL,
        _ => EXIT_VALIDATION,
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    let mut print = |v: Value| -> Result<()> {
        writeln!(out, "{}", pretty(&v))?;
        Ok(())
    };
    match command {
        Command::Analyze { input } => {
            let (profile, prior) = load_input(&input)?.profile_and_prior()?;
            let pay = payoff_set(&profile, &prior);
            print(json!({
                "prior": rational::to_json(&prior),
                "breakpoints": rational::vec_to_json(&profile.partition().breakpoints()),
                "profile": profile.to_json(None),
                "envelope": rational::to_json(&envelope(&profile, &prior)),
                "payoff_set": pay.to_json(),
                "payoff_set_text": pay.to_string(),
            }))?;
        }
        Command::RobustSet { input } => {
            let (profile, prior) = load_input(&input)?.profile_and_prior()?;
            let set = robust_set_in(&profile, &prior)?;
            let mut doc = set.to_json();
            doc["text"] = Value::String(set.to_string());
            print(doc)?;
        }
        Command::Classify { game, eq } => {
            let g = load_game(&game)?;
            print(classify_two_posterior(&g, &load_equilibrium(&eq)?)?.to_json())?;
        }
        Command::Witness { game, eq, radius, x_radius } => {
            let g = load_game(&game)?;
            let e = load_equilibrium(&eq)?;
            let w = perturbation_witness_with(&g, &e, &radius, &x_radius, &VerifierOptions::default())?;
            print(w.to_json())?;
        }
        Command::Verify {
            game,
            eq,
            mode,
            samples,
            radius,
            seed,
            eps_payoff,
            eps_x,
            max_solves,
        } => {
            let g = load_game(&game)?;
            let e = load_equilibrium(&eq)?;
            let defaults = VerifierOptions::default();
            let options = VerifierOptions {
                eps_payoff,
                eps_x,
                max_solves: max_solves.unwrap_or(defaults.max_solves),
                ..defaults
            };
            let report = match mode {
                Mode::Robust => monte_carlo_robustness(&g, &e, &radius, samples, seed, &options)?,
                Mode::Full => monte_carlo_full_robustness(&g, &e, &radius, samples, seed, &options)?,
            };
            print(report.to_json())?;
            if report.verdict == Verdict::Refuted {
                return Ok(EXIT_REFUTED);
            }
        }
        Command::Plot { input, out: svg_path, csv } => {
            let spec = match load_input(&input)? {
                Input::Game(g) => FigureSpec::new(value_profile(&g)?, Some(g.prior().clone()))?,
                Input::Profile { profile, prior } => FigureSpec::new(profile, prior)?,
            };
            std::fs::write(&svg_path, emit_svg(&spec))?;
            if let Some(path) = csv {
                std::fs::write(path, emit_csv(&spec))?;
            }
        }
        Command::Examples { name, emit } => {
            let doc = fixture_json(&name)?;
            match emit {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    let path = dir.join(format!("{name}.json"));
                    std::fs::write(&path, pretty(&doc) + "\n")?;
                    writeln!(out, "{}", path.display())?;
                    // Game fixtures also get the equilibrium attaining the envelope.
                    if let Fixture::Game(g) = builtin_fixture(&name)? {
                        let c = envelope(&value_profile(&g)?, g.prior());
                        let e = construct_equilibrium(&g, &c, &SupportChoice::Extreme)?;
                        let eq_path = dir.join(format!("{name}_envelope_eq.json"));
                        std::fs::write(&eq_path, pretty(&e.to_json()) + "\n")?;
                        writeln!(out, "{}", eq_path.display())?;
                    }
                }
                None => print(doc)?,
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `argv` (program name first) and runs the subcommand. Output goes
/// to `out`, diagnostics to `err`; the return value is the exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
