//! `germ`: classify, reduce and verify harmonic-leading plane germs.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use germ_core::determinacy::determinacy_bound;
use germ_core::harmonic::{f, g};
use germ_core::reduction::{classify, full_reduce};
use germ_core::report::{emit_report, LaplacianReport, Report, StabilizerReport};
use germ_core::verify::{verify, Theorem, VerifyPlan};
use germ_core::Poly;

#[derive(Parser, Debug)]
#[command(name = "germ", version, about = "Exact normal forms for plane germs with harmonic leading term")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing on success; rely on the exit code.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a germ by its harmonic leading term and reduce it to normal form.
    Classify {
        #[arg(long)]
        poly: String,
    },
    /// Reduce generator + tail through the supported target degrees up to --depth.
    Reduce {
        #[arg(long, value_enum)]
        leading: Leading,
        #[arg(long, default_value = "0")]
        tail: String,
        #[arg(long)]
        depth: u32,
    },
    /// Apply a power of the Laplacian.
    Laplacian {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// Determinacy bound of f_k with its inclusion certificates.
    Determinacy {
        #[arg(long)]
        k: u32,
    },
    /// Run a seeded verification plan.
    Verify {
        #[arg(long)]
        theorem: Theorem,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
    },
    /// Generators of the linear stabilizer of f_k.
    Stabilizer {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Leading {
    F5,
    G6,
    G7,
}

impl Leading {
    fn poly_and_order(self) -> (Poly, u32) {
        match self {
            Leading::F5 => (f(5), 5),
            Leading::G6 => (g(6), 6),
            Leading::G7 => (g(7), 7),
        }
    }
}

enum Failure {
    Usage(String),
    Domain(String),
    Counterexample,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Counterexample => 3,
        }
    }
}

fn parse_poly(flag: &str, text: &str) -> Result<Poly, Failure> {
    text.parse()
        .map_err(|e| Failure::Usage(format!("cannot parse {flag} {text:?}: {e}")))
}

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

fn emit<R: Report>(cli: &Cli, r: &R) {
    if !cli.quiet {
        print!("{}", emit_report(r, cli.json));
        if cli.json {
            println!();
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Classify { poly } => {
            let h = parse_poly("--poly", poly)?;
            emit(cli, &classify(&h).map_err(domain)?);
        }
        Command::Reduce { leading, tail, depth } => {
            let (lead, k) = leading.poly_and_order();
            let tail = parse_poly("--tail", tail)?;
            if tail.order().finite().is_some_and(|o| o <= k) {
                return Err(Failure::Domain(format!("tail must only contain terms of degree above {k}")));
            }
            emit(cli, &full_reduce(&(&lead + &tail), k, *depth).map_err(domain)?);
        }
        Command::Laplacian { poly, power } => {
            let p = parse_poly("--poly", poly)?;
            emit(cli, &LaplacianReport::compute(p, *power));
        }
        Command::Determinacy { k } => {
            emit(cli, &determinacy_bound(*k).map_err(domain)?);
        }
        Command::Verify {
            theorem,
            trials,
            seed,
            bound,
        } => {
            let report = verify(&VerifyPlan::new(*theorem, *trials, *seed).with_bound(*bound));
            emit(cli, &report);
            if !report.ok() {
                for c in &report.counterexamples {
                    eprintln!(
                        "counterexample: theorem {} clause {} trial {} seed {} (plan seed {}): input {}; expected {}; found {}",
                        theorem, c.clause, c.trial, c.seed, seed, c.input, c.expected, c.found
                    );
                }
                return Err(Failure::Counterexample);
            }
        }
        Command::Stabilizer { k } => emit(cli, &StabilizerReport::compute(*k)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(m) | Failure::Domain(m) => eprintln!("error: {m}"),
                Failure::Counterexample => {}
            }
            ExitCode::from(failure.code())
        }
    }
}
