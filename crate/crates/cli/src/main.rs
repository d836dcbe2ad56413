use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod render;

#[derive(Debug, Parser)]
#[command(name = "juhl-kit", version, about = "Exact GJMS operator and Q-curvature expansions")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "Q", alias = "q")]
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Explicit,
    Recursive,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of n_I, m_I and nbar_I over the compositions of N.
    Constants {
        #[arg(long = "N")]
        n: u32,
    },
    /// Expansion of P_{2N} or (-1)^N Q_{2N} in the M basis.
    Expand {
        #[arg(value_enum)]
        target: Target,
        #[arg(long = "N")]
        n: u32,
        #[arg(long, value_enum, default_value_t = Form::Explicit)]
        form: Form,
    },
    /// Run identity suites: combinatorial, inversion, krattenthaler, frobenius, backends, all.
    Verify {
        #[arg(default_values_t = vec!["all".to_string()])]
        suites: Vec<String>,
        #[arg(long, env = "JUHL_MAX_ORDER")]
        max_order: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// W_{2N} and Q_{2N} for the Einstein family g_rho = (1 + c rho)^2 g.
    Einstein {
        /// Dimension n, any rational.
        #[arg(long)]
        dim: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, env = "JUHL_MAX_ORDER", default_value_t = 6)]
        max_order: u32,
    },
}

pub enum Failure {
    Usage(String),
    Identity(String),
}

impl From<juhl_kit::Error> for Failure {
    fn from(e: juhl_kit::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Constants { n } => commands::constants(n, cli.format),
        Command::Expand { target, n, form } => commands::expand(target, n, form, cli.format),
        Command::Verify { suites, max_order, seed, jobs, inject_fault } => {
            commands::verify(&suites, max_order, seed, jobs, inject_fault, cli.format)
        }
        Command::Einstein { dim, c, max_order } => commands::einstein(&dim, &c, max_order, cli.format),
    };
    match result {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Identity(msg)) => {
            eprintln!("identity failure: {msg}");
            ExitCode::from(1)
        }
    }
}
