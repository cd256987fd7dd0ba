use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::Value;

use commsum_cli::{render, run, CliError, Command, RunConfig, EXIT_INVALID};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

/// Commutator decompositions and obstruction certificates, JSON in and out.
#[derive(Parser, Debug)]
#[command(name = "commsum", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Input JSON file; stdin when absent.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra mesh refinements (decompose-field).
    #[arg(long, default_value_t = 0)]
    refine: usize,
    /// Iteration depth (fack-run); defaults to the tower depth.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn read_input(path: Option<&PathBuf>) -> Result<Value, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::new("--in", format!("{}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::new("stdin", e.to_string()))?;
            s
        }
    };
    serde_json::from_str(&text)
        .map_err(|e| CliError::new("", format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column())))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Format::Json = args.format;
    let config = RunConfig {
        command: args.command,
        tol: args.tol,
        seed: args.seed,
        refine: args.refine,
        depth: args.depth,
    };
    let (doc, code) = match read_input(args.input.as_ref()) {
        Ok(input) => run(&config, &input),
        Err(e) => (e.to_json(), EXIT_INVALID),
    };
    let text = render(&doc);
    let written = match &args.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| e.to_string()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("commsum: cannot write output: {e}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    ExitCode::from(code as u8)
}
