use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use krange_cli::commands::{self, CheckArgs, GenerateKind, SolveArgs, SweepArgs, VerifyArgs};
use krange_cli::tol::{resolve, ENV_VAR};
use krange_cli::CliError;

/// Range inclusion and Krein-space solvers for signed operator tuples.
#[derive(Parser)]
#[command(name = "krange", version, about)]
struct Cli {
    /// Override a tolerance, e.g. `--tol residual=1e-6`. Repeatable; wins over KRANGE_TOL.
    #[arg(long = "tol", value_name = "KEY=VALUE", global = true)]
    tol: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a tuple and check the isometry and range identities.
    Check {
        tuple: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve 𝐓z = u for the given target vector.
    Solve {
        tuple: PathBuf,
        u: PathBuf,
        #[arg(long, conflicts_with = "exact", required_unless_present = "exact")]
        eps: Option<f64>,
        /// Use eps = λ_min⁺/2 and report the norm equality check.
        #[arg(long)]
        exact: bool,
        /// Seed for the witness probes on failure.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the solver along a decreasing eps grid and print CSV.
    Sweep {
        tuple: PathBuf,
        u: PathBuf,
        /// `geometric:start,ratio,count` or `list:e1,e2,...`.
        #[arg(long = "eps-grid")]
        eps_grid: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write a tuple file from one of the built-in families.
    Generate {
        #[command(subcommand)]
        kind: Family,
    },
    /// Check the uniform positivity bound and the norm equality on 𝔐_ε.
    Verify {
        tuple: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// (S⊗I, I⊗S, S⊗S) on ℂⁿ⊗ℂⁿ.
    Bidisk {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// (T_φ₁, T_φ₂, T_φ₁ψ₁+φ₂ψ₂) truncated to n. Coefficients are `re` or `re:im`.
    Corona {
        #[arg(long, default_value = "")]
        phi1: String,
        #[arg(long, default_value = "")]
        phi2: String,
        #[arg(long, default_value = "")]
        psi1: String,
        #[arg(long, default_value = "")]
        psi2: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Seeded random tuple with full validity.
    Random {
        #[arg(long, default_value_t = 2)]
        positives: usize,
        #[arg(long, default_value_t = 1)]
        negatives: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        margin: f64,
        #[command(flatten)]
        output: Output,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let env = std::env::var(ENV_VAR).ok();
    let tol = resolve(env.as_deref(), &cli.tol)?;
    let status = match cli.command {
        Command::Check {
            tuple,
            samples,
            seed,
            out,
        } => commands::check(
            &CheckArgs {
                tuple,
                samples,
                seed,
                out,
            },
            &tol,
        )?,
        Command::Solve {
            tuple,
            u,
            eps,
            exact,
            seed,
            out,
        } => commands::solve(
            &SolveArgs {
                tuple,
                u,
                eps,
                exact,
                seed,
                out,
            },
            &tol,
        )?,
        Command::Sweep {
            tuple,
            u,
            eps_grid,
            seed,
            csv,
        } => commands::sweep(
            &SweepArgs {
                tuple,
                u,
                eps_grid,
                seed,
                csv,
            },
            &tol,
        )?,
        Command::Generate { kind } => {
            let (kind, out) = match kind {
                Family::Bidisk { n, output } => (GenerateKind::Bidisk { n }, output.out),
                Family::Corona {
                    phi1,
                    phi2,
                    psi1,
                    psi2,
                    n,
                    output,
                } => (
                    GenerateKind::Corona {
                        phi1: commands::parse_coeffs(&phi1)?,
                        phi2: commands::parse_coeffs(&phi2)?,
                        psi1: commands::parse_coeffs(&psi1)?,
                        psi2: commands::parse_coeffs(&psi2)?,
                        n,
                    },
                    output.out,
                ),
                Family::Random {
                    positives,
                    negatives,
                    dim,
                    seed,
                    margin,
                    output,
                } => (
                    GenerateKind::Random {
                        positives,
                        negatives,
                        dim,
                        seed,
                        margin,
                    },
                    output.out,
                ),
            };
            commands::generate(&kind, out.as_deref(), &tol)?
        }
        Command::Verify {
            tuple,
            eps,
            samples,
            seed,
            out,
        } => commands::verify(
            &VerifyArgs {
                tuple,
                eps,
                samples,
                seed,
                out,
            },
            &tol,
        )?,
    };
    Ok(status.code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("krange: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
