mod commands;
mod refs;
mod witness;

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lawvere::fincat::CategoryError;
use lawvere::files::FileError;
use lawvere::models::ModelError;
use lawvere::monadic::MonadError;
use lawvere::presheaf::PresheafError;
use lawvere::rewrite::RewriteError;
use lawvere::theory::TheoryError;
use serde_json::Value;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FALSE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "lawvere", version, about = "Finite Lawvere theories, presheaves and their models")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for every sampled check.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Term depth for enumerations (command-specific default).
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Bound on brute-force search spaces.
    #[arg(long, global = true)]
    pub bound: Option<u128>,
    /// Load theories whose rules are not locally confluent.
    #[arg(long = "unsafe", global = true)]
    pub allow_unsafe: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
pub enum Command {
    /// Load theories, enumerate hom-sets, check theory morphisms.
    #[command(subcommand)]
    Theory(TheoryCmd),
    /// Finite models: check, free, homomorphisms, quotients.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Left adjoints to restriction along theory morphisms.
    #[command(subcommand)]
    Adjoint(AdjointCmd),
    /// Term monads: laws, theory roundtrip, Eilenberg-Moore algebras.
    #[command(subcommand)]
    Monad(MonadCmd),
    /// Presheaves: representable decomposition and colimit preservation.
    #[command(subcommand)]
    Presheaf(PresheafCmd),
    /// Finite categories: validation and siftedness.
    #[command(subcommand)]
    Category(CategoryCmd),
    /// Run a named battery: paper-examples or properties.
    Suite {
        name: String,
        #[arg(long, default_value_t = lawvere::suite::DEFAULT_INSTANCES)]
        instances: usize,
    },
    /// Re-check a witness printed by another command.
    VerifyWitness { file: String },
}

#[derive(Subcommand)]
pub enum TheoryCmd {
    /// Load a theory and report its signature and rule confluence.
    Check { theory: String },
    /// Enumerate hom(m, n) of the single-sorted theory.
    Hom {
        theory: String,
        #[arg(short)]
        m: usize,
        #[arg(short)]
        n: usize,
    },
    /// Check that a morphism file sends equations to equations.
    Morphism { source: String, target: String, map: String },
}

#[derive(Subcommand)]
pub enum ModelCmd {
    /// Check a structure against its theory's equations.
    Check { model: String },
    /// Free model on N generators (single-sorted).
    Free {
        theory: String,
        #[arg(long)]
        generators: usize,
    },
    /// All homomorphisms between two models.
    Hom { source: String, target: String },
    /// Quotient by the congruence generated by `a=b` pairs.
    Quotient {
        model: String,
        #[arg(long = "relate", value_name = "A=B")]
        relate: Vec<String>,
    },
}

#[derive(Subcommand)]
pub enum AdjointCmd {
    /// Left adjoint to restriction along a theory morphism, on a model.
    Apply {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        map: String,
        #[arg(long)]
        model: String,
        /// Certify against target models up to this carrier size.
        #[arg(long, default_value_t = 3)]
        certify_size: usize,
    },
}

#[derive(Subcommand)]
pub enum MonadCmd {
    /// Build T(n) and check the monad laws on it.
    Build {
        theory: String,
        #[arg(long)]
        set: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Compare the theory with the theory of its monad.
    Roundtrip {
        theory: String,
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Eilenberg-Moore algebras against models on one carrier size.
    Em {
        theory: String,
        #[arg(long)]
        carrier: usize,
    },
}

#[derive(Subcommand)]
pub enum PresheafCmd {
    /// Write a presheaf as a coproduct of representables.
    Decompose { presheaf: String },
    /// Whether Nat(P, -) preserves a colimit.
    Preserves {
        presheaf: String,
        #[arg(long)]
        colimit: String,
    },
}

#[derive(Subcommand)]
pub enum CategoryCmd {
    /// Validate a category.
    Check { category: String },
    /// Decide siftedness: non-empty with connected cospan categories.
    Sifted { category: String },
}

/// An error with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: msg.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn rewrite_code(e: &RewriteError) -> u8 {
    match e {
        RewriteError::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

fn theory_code(e: &TheoryError) -> u8 {
    match e {
        TheoryError::TooLarge(_) => EXIT_BUDGET,
        TheoryError::Rewrite(r) => rewrite_code(r),
        _ => EXIT_INPUT,
    }
}

fn model_code(e: &ModelError) -> u8 {
    match e {
        ModelError::SearchSpaceTooLarge { .. } | ModelError::Truncated(_) => EXIT_BUDGET,
        ModelError::Theory(t) => theory_code(t),
        _ => EXIT_INPUT,
    }
}

impl From<TheoryError> for CliError {
    fn from(e: TheoryError) -> Self {
        CliError { code: theory_code(&e), message: e.to_string() }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError { code: model_code(&e), message: e.to_string() }
    }
}

impl From<RewriteError> for CliError {
    fn from(e: RewriteError) -> Self {
        CliError { code: rewrite_code(&e), message: e.to_string() }
    }
}

impl From<MonadError> for CliError {
    fn from(e: MonadError) -> Self {
        let code = match &e {
            MonadError::SearchSpaceTooLarge(_) => EXIT_BUDGET,
            MonadError::Theory(t) => theory_code(t),
            MonadError::Model(m) => model_code(m),
            MonadError::NotSingleSorted(_) => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        let code = match &e {
            FileError::Model(m) => model_code(m),
            FileError::Theory(t) => theory_code(t),
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<PresheafError> for CliError {
    fn from(e: PresheafError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<CategoryError> for CliError {
    fn from(e: CategoryError) -> Self {
        CliError::input(e.to_string())
    }
}

/// What a command reports: a JSON document, its text rendering, and the
/// exit code.
pub struct Outcome {
    pub code: u8,
    pub report: Value,
    pub text: String,
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => emit(&(serde_json::to_string_pretty(&out.report).expect("json") + "\n")),
                Format::Text => emit(&out.text),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            match cli.format {
                Format::Json => {
                    let v = serde_json::json!({ "error": e.message, "exit": e.code });
                    emit(&(serde_json::to_string_pretty(&v).expect("json") + "\n"));
                }
                Format::Text => eprintln!("error: {}", e.message),
            }
            ExitCode::from(e.code)
        }
    }
}
