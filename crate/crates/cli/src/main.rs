use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graphfold::oracle::GenMode;
use graphfold_cli::{
    bench, generate, load, parse_mode, read, run, solve_csp, verify::verify_document, write,
    CliError, ResultDocument, RunConfig, EXIT_SAT, EXIT_UNSAT,
};

/// Decide whether an embedded graph with exact edge lengths folds flat.
#[derive(Debug, Parser)]
#[command(name = "graphfold", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide an instance and print the result document.
    Decide {
        /// Instance document (JSON).
        input: PathBuf,
        /// Write the result here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the merged constraint system in text form.
        #[arg(long, value_name = "PATH")]
        dump_csp: Option<PathBuf>,
        /// Write the flow network in text form.
        #[arg(long, value_name = "PATH")]
        dump_flow: Option<PathBuf>,
        /// Draw the constraint graph as SVG.
        #[arg(long, value_name = "PATH")]
        emit_diagram: Option<PathBuf>,
        /// Use exhaustive search (small instances only).
        #[arg(long)]
        oracle: bool,
        /// Re-check the result before exiting.
        #[arg(long)]
        verify: bool,
        /// Report elapsed time in the stats.
        #[arg(long)]
        timing: bool,
        /// Decide components on several threads.
        #[arg(long)]
        parallel: bool,
    },
    /// Print a random instance document.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        size: usize,
        /// random, closed or cycle.
        #[arg(long, default_value = "random", value_parser = parse_mode)]
        mode: GenMode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a result document against its instance.
    Verify { input: PathBuf, result: PathBuf },
    /// Time decisions on grids of about the given angle counts.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 10000, 100000])]
        sizes: Vec<usize>,
    },
    /// Solve a constraint system given in text form.
    Solve { csp: PathBuf },
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Decide {
            input,
            output,
            dump_csp,
            dump_flow,
            emit_diagram,
            oracle,
            verify,
            timing,
            parallel,
        } => {
            let config = RunConfig {
                input,
                output,
                dump_csp,
                dump_flow,
                emit_diagram,
                oracle,
                verify,
                timing,
                parallel,
            };
            let outcome = run(&config)?;
            emit(config.output.as_ref(), &outcome.document.to_json())?;
            Ok(outcome.exit_code)
        }
        Command::Gen {
            seed,
            size,
            mode,
            output,
        } => {
            emit(output.as_ref(), &generate(seed, size, mode))?;
            Ok(EXIT_SAT)
        }
        Command::Verify { input, result } => {
            let instance = load(&input)?;
            let doc: ResultDocument = serde_json::from_str(&read(&result)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", result.display())))?;
            verify_document(&instance, &doc)
                .map_err(|e| CliError::Input(format!("result does not verify: {e}")))?;
            println!("ok: {} result verified", doc.status);
            Ok(EXIT_SAT)
        }
        Command::Bench { sizes } => {
            println!("{:>10} {:>6} {:>12}", "angles", "status", "ms");
            for row in bench(&sizes)? {
                println!("{:>10} {:>6} {:>12.3}", row.angles, row.status, row.millis);
            }
            Ok(EXIT_SAT)
        }
        Command::Solve { csp } => {
            let doc = solve_csp(&read(&csp)?)?;
            let mut text = serde_json::to_string_pretty(&doc).expect("solve documents serialize");
            text.push('\n');
            print!("{text}");
            Ok(if doc.status == "SAT" {
                EXIT_SAT
            } else {
                EXIT_UNSAT
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("graphfold: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
