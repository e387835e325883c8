use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use qprod_core::asymptotics::BoundKind;

mod commands;

use commands::Failure;

/// Infinite-product exponents of modular forms and their growth.
#[derive(Debug, Parser)]
#[command(name = "qprod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand a form to a coefficient table `n,a_n`.
    Expand {
        #[command(flatten)]
        source: Source,
        /// Last exponent n written.
        #[arg(long)]
        terms: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Compute the product exponents `m,c_m` for m = 1..terms-1.
    Exponents {
        #[command(flatten)]
        source: BatchSource,
        /// Relative truncation order of the expansion.
        #[arg(long)]
        terms: usize,
        #[command(flatten)]
        output: Output,
        /// Worker threads when several forms are given.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Fit the exponential growth rate y_r of the exponents.
    Fit {
        #[command(flatten)]
        exponents: ExponentInput,
        #[arg(long, value_parser = parse_window)]
        window: (usize, usize),
        #[command(flatten)]
        output: Output,
    },
    /// Check a growth bound; exits 1 when the bound fails.
    Check {
        #[command(flatten)]
        exponents: ExponentInput,
        #[arg(long, value_parser = parse_kind)]
        kind: BoundKind,
        #[arg(long, value_parser = parse_window)]
        window: (usize, usize),
        #[arg(long = "y-r")]
        y_r: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        slope_tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Index, elliptic points, cusps and genus of Gamma_0(N).
    Level {
        #[arg(long)]
        level: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Kloosterman sums K(a, b; c) for c = N, 2N, ... <= c_max.
    Kloosterman {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long)]
        c_max: u64,
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[command(flatten)]
        output: Output,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Odd indices m <= bound divisible by a prime p with a(p) = 0.
    Vanishing {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        bound: u64,
        /// Weight-2 newform to use instead of the built-in eta-quotient.
        #[command(flatten)]
        source: OptionalSource,
        #[command(flatten)]
        output: Output,
    },
    /// Write the built-in form specs as JSON files into a directory.
    Builtins {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Form spec (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Coefficient table `n,a_n`.
    #[arg(long)]
    coeffs: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
struct OptionalSource {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    coeffs: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct BatchSource {
    /// Form spec (JSON); repeat for a batch, then `--out` names a directory.
    #[arg(long)]
    spec: Vec<PathBuf>,
    #[arg(long)]
    coeffs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true)))]
struct ExponentInput {
    /// Exponent table `m,c_m`.
    #[arg(long, group = "input")]
    exponents: Option<PathBuf>,
    /// Compute exponents from a form spec.
    #[arg(long, group = "input")]
    spec: Option<PathBuf>,
    /// Compute exponents from a coefficient table.
    #[arg(long, group = "input")]
    coeffs: Option<PathBuf>,
    /// Truncation when computing from a form; defaults to window end + 1.
    #[arg(long)]
    terms: Option<usize>,
    /// Level of the form behind an exponent or coefficient table.
    #[arg(long)]
    level: Option<u64>,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected M0:M1")?;
    let m0: usize = a.trim().parse().map_err(|e| format!("M0: {e}"))?;
    let m1: usize = b.trim().parse().map_err(|e| format!("M1: {e}"))?;
    if m0 == 0 || m0 > m1 {
        return Err(format!("need 1 <= M0 <= M1, got {m0}:{m1}"));
    }
    Ok((m0, m1))
}

fn parse_kind(s: &str) -> Result<BoundKind, String> {
    s.parse().map_err(|_| "expected upper, omega or kohnen".to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::BoundFailed) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn windows() {
        assert_eq!(parse_window("20:60"), Ok((20, 60)));
        assert_eq!(parse_window(" 5 : 5 "), Ok((5, 5)));
        assert!(parse_window("0:10").is_err());
        assert!(parse_window("10:5").is_err());
        assert!(parse_window("10").is_err());
        assert!(parse_window("a:5").is_err());
    }

    #[test]
    fn kinds() {
        assert_eq!(parse_kind("omega"), Ok(BoundKind::Omega));
        assert!(parse_kind("Upper").is_err());
    }
}
