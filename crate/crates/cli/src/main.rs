use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use qfivol_cli::record::{parse_location, read_record};
use qfivol_cli::repro;
use qfivol_cli::sweep::{parse_functions, replay, run_sweep, SweepConfig};
use qfivol_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "qfivol", version, about = "Quantum Fisher information volume inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a worked example and check its values
    Repro {
        #[command(subcommand)]
        example: Example,
    },
    /// Run a seeded random sweep of the inequality checks
    Sweep(SweepArgs),
    /// List the builtin operator monotone functions
    ListFunctions,
    /// Recompute one sample record and compare F bit for bit
    Replay {
        /// Record location as FILE:LINE (1-based)
        #[arg(long)]
        record: String,
    },
}

#[derive(Subcommand)]
enum Example {
    /// Covariance versus metric adjusted correlation on two-qubit states
    Entanglement,
    /// Indefinite Hessian of the classical generalized variance
    Hessian,
    /// Equal volumes on a random pure state
    PureVolume {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, env = "QFIVOL_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Number of observables (1, 2 or 3)
    #[arg(long)]
    n: usize,
    /// Dimension D or range LO-HI
    #[arg(long)]
    dim: String,
    #[arg(long)]
    samples: u64,
    /// Comma-separated function specs
    #[arg(long, default_value = "sld,wy,wyd:0.25")]
    functions: String,
    /// STATE+OBSERVABLES ensemble tags, or complex / real / structured
    #[arg(long, default_value = "complex")]
    ensemble: String,
    #[arg(long, env = "QFIVOL_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the available cores)
    #[arg(long, env = "QFIVOL_PARALLELISM")]
    parallelism: Option<usize>,
    /// Output record file
    #[arg(long)]
    out: PathBuf,
    /// Exit with status 3 on any violation or candidate counterexample
    #[arg(long)]
    strict: bool,
}

fn finish(rendered: String, failures: Vec<String>) -> CliResult<()> {
    print!("{rendered}");
    if failures.is_empty() {
        println!("PASS");
        Ok(())
    } else {
        Err(CliError::Assertion(failures.join("; ")))
    }
}

fn sweep(args: SweepArgs) -> CliResult<()> {
    let parallelism = args
        .parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let config = SweepConfig {
        n: args.n,
        dims: args.dim.parse()?,
        samples: args.samples,
        functions: parse_functions(&args.functions)?,
        ensemble: args.ensemble.parse()?,
        seed: args.seed,
        parallelism,
    };
    config.validate()?;
    let start = Instant::now();
    let out = BufWriter::new(File::create(&args.out)?);
    let summary = run_sweep(&config, out)?;
    print!("{summary}");
    println!("records written to {}", args.out.display());
    println!("elapsed: {:.2}s", start.elapsed().as_secs_f64());
    if args.strict && summary.has_findings() {
        return Err(CliError::Strict(format!(
            "{} violations, {} candidate counterexamples, {} monotonicity failures",
            summary.violations, summary.candidates, summary.monotonicity_failures
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Repro { example } => match example {
            Example::Entanglement => {
                let r = repro::entanglement()?;
                finish(r.render(), r.failures())
            }
            Example::Hessian => {
                let r = repro::hessian()?;
                finish(r.render(), r.failures())
            }
            Example::PureVolume { dim, n, seed } => {
                let r = repro::pure_volume(dim, n, seed)?;
                finish(r.render(), r.failures())
            }
        },
        Command::Sweep(args) => sweep(args),
        Command::ListFunctions => {
            print!("{}", repro::render_functions(&repro::list_functions()));
            Ok(())
        }
        Command::Replay { record } => {
            let (file, line) = parse_location(&record)?;
            let outcome = replay(&read_record(&file, line)?)?;
            println!(
                "sample {} ({}): recorded F {:.16e}, recomputed F {:.16e}",
                outcome.index, outcome.function, outcome.recorded_f, outcome.recomputed_f
            );
            if outcome.matches() {
                println!("MATCH");
                Ok(())
            } else {
                Err(CliError::ReplayMismatch(format!("{file}:{line}")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
