mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::{Flags, RunConfig};
use output::render;

#[derive(Parser)]
#[command(name = "sl2e", version, about = "Exact local endoscopy for SL(2)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Kind, presentation, ε(-1) and λ of an extension.
    ClassifyExt,
    /// ε_{E/F}(x), cross-checked against norm enumeration.
    Epsilon,
    /// λ(E/F, ψ) and its constraints.
    Lambda,
    /// Orbital integrals over the two rational classes of t.
    Orbital,
    /// κ-orbital integral with its cell decomposition.
    KappaOrbital,
    /// Transfer factor at t, or the table of f^E up to a level.
    Transfer,
    /// Fundamental lemma for 1_K.
    FlCheck,
    /// Germ profile of orbital integrals near the centre.
    GermExpand,
    /// Unipotent orbital integrals from κ-orbital integrals.
    ShalikaCompare,
    /// Δ Ξ_θ against ε(-1)(θ + θ̄) on sampled t.
    CharIdentity,
    /// ∫ |θ + θ^{-1}|^2 and character tables.
    Orthogonality,
    /// Weyl integration identity for all θ at a level.
    WeylCheck,
    /// Finite-ring oracles.
    Oracle,
    /// The acceptance suite.
    VerifyAll,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::ClassifyExt => "classify-ext",
            Cmd::Epsilon => "epsilon",
            Cmd::Lambda => "lambda",
            Cmd::Orbital => "orbital",
            Cmd::KappaOrbital => "kappa-orbital",
            Cmd::Transfer => "transfer",
            Cmd::FlCheck => "fl-check",
            Cmd::GermExpand => "germ-expand",
            Cmd::ShalikaCompare => "shalika-compare",
            Cmd::CharIdentity => "char-identity",
            Cmd::Orthogonality => "orthogonality",
            Cmd::WeylCheck => "weyl-check",
            Cmd::Oracle => "oracle",
            Cmd::VerifyAll => "verify-all",
        }
    }
}

fn run(cmd: Cmd, cfg: &RunConfig) -> commands::CmdResult {
    match cmd {
        Cmd::ClassifyExt => commands::classify_ext(cfg),
        Cmd::Epsilon => commands::epsilon(cfg),
        Cmd::Lambda => commands::lambda(cfg),
        Cmd::Orbital => commands::orbital(cfg),
        Cmd::KappaOrbital => commands::kappa_orbital_cmd(cfg),
        Cmd::Transfer => commands::transfer(cfg),
        Cmd::FlCheck => commands::fl(cfg),
        Cmd::GermExpand => commands::germ_expand(cfg),
        Cmd::ShalikaCompare => commands::shalika(cfg),
        Cmd::CharIdentity => commands::char_identity(cfg),
        Cmd::Orthogonality => commands::orthogonality(cfg),
        Cmd::WeylCheck => commands::weyl(cfg),
        Cmd::Oracle => commands::oracle(cfg),
        Cmd::VerifyAll => commands::verify_all(cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.flags.config {
        None => Default::default(),
        Some(path) => match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|s| RunConfig::parse_kv(&s)) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error: --config {path}: {e}");
                return ExitCode::from(2);
            }
        },
    };
    let cfg = match RunConfig::resolve(cli.cmd.name(), &cli.flags, &file) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.flags.dump_config {
        print!("{}", cfg.to_kv());
        return ExitCode::SUCCESS;
    }
    match run(cli.cmd, &cfg) {
        Ok((outcome, result)) => {
            print!("{}", render(&cfg, outcome, &result));
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Core(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_inconclusive() { 3 } else { 2 })
        }
    }
}
