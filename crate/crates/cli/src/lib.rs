//! JSON front end for the `commsum` engines.
//!
//! [`run`] takes a [`RunConfig`] and a JSON input document and returns the
//! output document with its exit code: 0 when every certified bound holds,
//! 1 when a bound is violated, 2 for invalid input. Every output carries the
//! command, the configuration and the input, so `verify` can re-derive it.

mod commands;
mod verify;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use commsum::matcore::{BoundCheck, VerificationReport};
use commsum::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Decompose,
    DecomposeTight,
    DecomposeField,
    FackRun,
    BlockSplit,
    Obstruct,
    PpExample,
    Tower,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::DecomposeTight => "decompose-tight",
            Command::DecomposeField => "decompose-field",
            Command::FackRun => "fack-run",
            Command::BlockSplit => "block-split",
            Command::Obstruct => "obstruct",
            Command::PpExample => "pp-example",
            Command::Tower => "tower",
            Command::Verify => "verify",
        }
    }
}

/// Options shared by all commands. Input and output paths are handled by the binary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub tol: f64,
    pub seed: u64,
    pub refine: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            tol: 1e-9,
            seed: 0,
            refine: 0,
            depth: None,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::new("config.tol", "tol must be positive and finite"));
        }
        Ok(())
    }
}

/// `{"error", "path"}` document for exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub path: String,
    pub message: String,
}

impl CliError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.message, "path": self.path })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput { path, message } => CliError::new(path, message),
            other => CliError::new("", other.to_string()),
        }
    }
}

/// Deserializes `value` with the JSON path of the first mismatch in the error.
pub(crate) fn parse<T: serde::de::DeserializeOwned>(value: &Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let mut inner = e.path().to_string();
        let mut message = e.into_inner().to_string();
        // Validation errors raised inside a Deserialize impl carry their own path.
        if let Some((p, m)) = message.strip_prefix("invalid input at ").and_then(|r| r.split_once(": ")) {
            inner = if inner == "." { p.to_string() } else { format!("{inner}.{p}") };
            message = m.to_string();
        }
        let path = match (prefix, inner.as_str()) {
            (p, ".") => p.to_string(),
            ("", i) => i.to_string(),
            (p, i) => format!("{p}.{i}"),
        };
        CliError::new(path, message)
    })
}

/// Result section and verification report of a command.
pub(crate) struct Outcome {
    pub result: Value,
    pub report: VerificationReport,
}

impl Outcome {
    pub fn new(result: Value, report: VerificationReport) -> Self {
        Outcome { result, report }
    }

    pub fn from_checks(result: Value, checks: Vec<BoundCheck>) -> Self {
        Outcome {
            result,
            report: VerificationReport {
                residual_norm: 0.0,
                bound_checks: checks,
                commutator_count: 0,
            },
        }
    }
}

pub(crate) fn dispatch(config: &RunConfig, input: &Value) -> Result<Outcome, CliError> {
    config.validate()?;
    match config.command {
        Command::Decompose => commands::decompose(config, input, false),
        Command::DecomposeTight => commands::decompose(config, input, true),
        Command::DecomposeField => commands::decompose_field(config, input),
        Command::FackRun => commands::fack_run(config, input),
        Command::BlockSplit => commands::block_split(config, input),
        Command::Obstruct => commands::obstruct(input),
        Command::PpExample => commands::pp_example(input),
        Command::Tower => commands::tower(input),
        Command::Verify => verify::verify(config, input),
    }
}

/// Runs one command. The output is the full document on success or
/// verification failure, and an error object on invalid input.
pub fn run(config: &RunConfig, input: &Value) -> (Value, i32) {
    match dispatch(config, input) {
        Ok(outcome) => {
            let pass = outcome.report.passed();
            let doc = json!({
                "command": config.command.name(),
                "config": config,
                "input": input,
                "result": outcome.result,
                "report": outcome.report,
                "pass": pass,
            });
            (doc, if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Err(e) => (e.to_json(), EXIT_INVALID),
    }
}

/// Output text as written by the binary: pretty JSON with a trailing newline.
pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values serialize");
    s.push('\n');
    s
}
