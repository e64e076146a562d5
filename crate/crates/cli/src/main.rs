//! `hvmc` — ground states of spin chains and small molecules with a hybrid
//! quantum-neural wavefunction.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hvmc::config::{self, Overrides};
use hvmc::driver;
use hvmc::presets;
use hvmc_core::oracle;
use hvmc_core::pauli::build_afh_chain;
use hvmc_core::phase_net::PhaseNetConfig;
use hvmc_core::transformer::TransformerConfig;
use hvmc_core::Hamiltonian64;

#[derive(Parser)]
#[command(
    name = "hvmc",
    version,
    about = "Variational ground-state solver with a hybrid quantum-neural wavefunction"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train a wavefunction from a run file or a named preset.
    Run(RunArgs),
    /// Print the exact ground energy of an operator.
    Exact {
        /// `afh:<n>:<open|pbc>` or a path to an operator file.
        #[arg(long)]
        hamiltonian: String,
    },
    /// Print the transformer parameter count for a given shape.
    ParamCount(ParamCountArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a TOML run file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in run (see `hvmc presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Replace the run file's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the run file's `run.out_dir`, else
    /// ./hvmc-run).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the operator with this file (format detected from content).
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Suppress progress output on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ParamCountArgs {
    /// Number of qubits.
    #[arg(long)]
    nq: usize,
    /// Embedding dimension.
    #[arg(long)]
    d: usize,
    /// Attention heads.
    #[arg(long)]
    h: usize,
    /// Decoder blocks.
    #[arg(long = "T", alias = "t")]
    t: usize,
    /// Also print the phase network count for these hidden widths
    /// (comma-separated).
    #[arg(long, value_delimiter = ',')]
    phase_hidden: Option<Vec<usize>>,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Exact { hamiltonian } => {
            let e = oracle::ground_energy(&parse_operator_spec(&hamiltonian)?)?;
            println!("{e}");
            Ok(())
        }
        Cmd::ParamCount(args) => cmd_param_count(args),
        Cmd::Presets => {
            for name in presets::PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let text = match (&args.config, &args.preset) {
        (Some(path), None) => fs::read_to_string(path)
            .with_context(|| format!("reading run file {}", path.display()))?,
        (None, Some(name)) => presets::preset_toml(name)
            .with_context(|| {
                format!(
                    "unknown preset {name:?}; available: {}",
                    presets::PRESET_NAMES.join(", ")
                )
            })?
            .to_string(),
        _ => bail!("pass exactly one of --config <path> or --preset <name>"),
    };
    let overrides = Overrides {
        seed: args.seed,
        out_dir: args.out,
        hamiltonian: args.hamiltonian,
    };
    let assembled = config::assemble(&text, &overrides)?;
    let outcome = driver::execute(assembled, args.quiet)?;
    println!("{:#}", outcome.summary);
    Ok(())
}

/// `afh:<n>:<open|pbc>` builds a Heisenberg chain in-process; anything else
/// is a path to an operator file.
fn parse_operator_spec(spec: &str) -> Result<Hamiltonian64> {
    if let Some(rest) = spec.strip_prefix("afh:") {
        let (n, bc) = rest
            .split_once(':')
            .context("expected afh:<n>:<open|pbc>")?;
        let n: usize = n.parse().with_context(|| format!("bad chain length {n:?}"))?;
        let periodic = match bc {
            "open" => false,
            "pbc" => true,
            other => bail!("boundary must be \"open\" or \"pbc\", got {other:?}"),
        };
        Ok(build_afh_chain(n, 1.0, periodic)?)
    } else {
        Ok(hvmc_core::io::load_hamiltonian_file(spec)
            .with_context(|| format!("loading operator from {spec}"))?)
    }
}

fn cmd_param_count(args: ParamCountArgs) -> Result<()> {
    let t = TransformerConfig::new(args.nq, args.d, args.h, args.t)?;
    println!("{}", t.param_count());
    if let Some(hidden) = args.phase_hidden {
        let p = PhaseNetConfig::new(args.nq, hidden)?;
        println!("{}", p.param_count());
    }
    Ok(())
}
