mod commands;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use ckalg::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Spectra, epimorphism counts and free-algebra cardinalities for finite
/// k-cyclic modal pseudocomplemented De Morgan algebras.
///
/// Worker threads default to the available parallelism; set CKALG_WORKERS
/// to override.
#[derive(Debug, Parser)]
#[command(name = "ckalg", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Largest universe for subalgebra and automorphism enumeration.
    #[arg(long, global = true)]
    pub cap: Option<usize>,

    /// Largest number of tuples scanned by a generating-count oracle.
    #[arg(long, global = true)]
    pub tuple_cap: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every axiom exhaustively.
    Check { algebra: PathBuf },
    /// Primes, ψ, components and signature.
    Spectrum(SpectrumArgs),
    /// Epimorphisms from one algebra onto another.
    Epi(EpiArgs),
    /// Automorphisms of an algebra.
    Aut(AutArgs),
    /// Cardinality of the free algebra on n generators.
    Free(FreeArgs),
    /// The coefficient α of T_{i,d}.
    Alpha(AlphaArgs),
    /// Simple algebras with tᵏ = id up to isomorphism.
    Simples(SimplesArgs),
    /// Reconcile closed forms with enumeration.
    Audit(AuditArgs),
    /// Build the free algebra inside a product of simple algebras.
    FreeBuild(FreeBuildArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub algebra: PathBuf,
    /// Also run the prime-filter property checks.
    #[arg(long)]
    pub filters: bool,
}

#[derive(Debug, Args)]
pub struct EpiArgs {
    /// The algebra mapped from.
    #[arg(long)]
    pub from: PathBuf,
    /// The algebra mapped onto.
    #[arg(long)]
    pub onto: PathBuf,
    /// List epimorphisms and the S-functions inducing them (default).
    #[arg(long, group = "mode")]
    pub enumerate: bool,
    /// Evaluate the closed-form counts from the signatures.
    #[arg(long, group = "mode")]
    pub formula: bool,
    /// Compare closed forms with enumeration.
    #[arg(long, group = "mode")]
    pub audit: bool,
}

#[derive(Debug, Args)]
pub struct AutArgs {
    pub algebra: PathBuf,
    /// Compare with the closed-form automorphism counts.
    #[arg(long)]
    pub audit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Paper,
    LatticeIe,
    Oracle,
    Both,
}

#[derive(Debug, Args)]
pub struct FreeArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Method::Paper)]
    pub method: Method,
    /// Raise the enumeration caps for heavy oracles.
    #[arg(long)]
    pub extended: bool,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    #[arg(long)]
    pub i: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Method::Paper)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct SimplesArgs {
    #[arg(long)]
    pub k: u32,
    /// Also report α of every class for this many generators.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Audit epimorphism and automorphism counts from this algebra ...
    #[arg(long, requires = "onto")]
    pub from: Option<PathBuf>,
    /// ... onto this one.
    #[arg(long, requires = "from")]
    pub onto: Option<PathBuf>,
    /// Free-algebra audit for this k (when no algebras are given).
    #[arg(long, default_value_t = 2, conflicts_with = "from")]
    pub k: u32,
    #[arg(long, default_value_t = 1, conflicts_with = "from")]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct FreeBuildArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub n: u32,
    /// Allow the pairwise count for closures too large to build.
    #[arg(long)]
    pub extended: bool,
    /// Include the operation tables when the closure was built explicitly.
    #[arg(long)]
    pub tables: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput { .. } => 1,
        Error::CapExceeded { .. } => 2,
        Error::Invariant { .. } => 3,
    }
}

fn diagnostic(e: &Error) -> Value {
    let body = match e {
        Error::InvalidInput { locus, message } => json!({"kind": "invalid_input", "locus": locus, "message": message}),
        Error::CapExceeded { what, required, cap, flag } => json!({
            "kind": "cap_exceeded", "what": what, "required": required, "cap": cap, "flag": flag
        }),
        Error::Invariant { check, detail } => json!({"kind": "invariant", "check": check, "detail": detail}),
    };
    json!({"error": body, "message": e.to_string()})
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
    if let Some(n) = std::env::var("CKALG_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()) {
        ckalg::par::init_workers(n);
    }
    match commands::run(&cli) {
        Ok(value) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&value).expect("JSON values serialize") + "\n",
                Format::Table => table::render(&value),
            };
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&diagnostic(&e)).expect("JSON values serialize"));
            ExitCode::from(exit_code(&e))
        }
    }
}
