mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use render::Format;

/// Exact intersection numbers on moduli of rank-2 bundles, by closed form and
/// by torus localization on Quot schemes.
#[derive(Parser, Debug)]
#[command(name = "quotloc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads; defaults to $QUOTLOC_THREADS, then to the core count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ∫ α^m β^n Π(ψ_k ψ_{k+g}) on the moduli space, in closed form.
    Intersect(IntersectArgs),
    /// Localization totals on the Quot scheme for a grid of (N, d).
    Localize(LocalizeArgs),
    /// Run a verification suite; exits 0 iff every check passes.
    Verify(VerifyArgs),
    /// Table of all top intersections ∫ α^m β^n up to a given genus.
    Table(TableArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct IntersectArgs {
    #[arg(long)]
    pub genus: u32,
    /// Exponent of α.
    #[arg(long)]
    pub alpha: u32,
    /// Exponent of β.
    #[arg(long, default_value_t = 0)]
    pub beta: u32,
    /// ψ pair multiplicities p_1,...,p_k, each 0 or 1.
    #[arg(long, value_delimiter = ',')]
    pub psi: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteArg {
    A,
    B,
    Closed,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    #[arg(long)]
    pub genus: u32,
    /// Exponent m of the lifted class (m + 2n = 4g - 3); defaults to 4g - 3.
    #[arg(long = "alpha-exp")]
    pub alpha_exp: Option<u32>,
    /// Roots-of-unity order(s), comma separated.
    #[arg(short = 'N', value_delimiter = ',')]
    #[serde(rename = "N")]
    pub big_n: Vec<u64>,
    /// Degree(s), comma separated.
    #[arg(short = 'd', value_delimiter = ',')]
    pub d: Vec<u32>,
    /// Accept N < 2g + 1, where the finite-N sum is not N-independent.
    #[arg(long)]
    pub allow_small_n: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LocalizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = RouteArg::A)]
    pub route: RouteArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemmas,
    Consistency,
    Routes,
    Golden,
    Invariance,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Genus for the routes and invariance suites; the largest genus for consistency.
    #[arg(long)]
    pub genus: Option<u32>,
    #[arg(long = "alpha-exp")]
    pub alpha_exp: Option<u32>,
    #[arg(short = 'N', value_delimiter = ',')]
    #[serde(rename = "N")]
    pub big_n: Vec<u64>,
    #[arg(short = 'd', value_delimiter = ',')]
    pub d: Vec<u32>,
    #[arg(long)]
    pub allow_small_n: bool,
    /// Golden file to re-derive; defaults to the built-in vectors.
    #[arg(long)]
    pub golden: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TableArgs {
    #[arg(long = "max-genus", default_value_t = 6)]
    pub max_genus: u32,
    /// Also list the ψ-pair variants.
    #[arg(long)]
    pub psi: bool,
}

fn threads(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("QUOTLOC_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("QUOTLOC_THREADS={v:?} is not a number"))?;
            if n == 0 {
                bail!("QUOTLOC_THREADS must be positive");
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = threads(cli.threads)? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let out = match &cli.command {
        Command::Intersect(a) => render::emit(&commands::intersect(a)?, cli.format)?,
        Command::Localize(a) => render::emit(&commands::localize(a)?, cli.format)?,
        Command::Verify(a) => render::emit(&commands::verify(a)?, cli.format)?,
        Command::Table(a) => render::emit(&commands::table(a)?, cli.format)?,
    };
    match &cli.report {
        Some(path) => std::fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", out.text),
    }
    Ok(out.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
