//! Run configuration: the TOML schema, its validation, and assembly into an
//! engine configuration plus an output plan.
//!
//! A run file has five mandatory sections — `[hamiltonian]`, `[model]`,
//! `[sampling]`, `[optimizer]`, `[run]` — plus at least one `[[schedule]]`
//! phase. Unknown keys anywhere are hard errors: a typo must fail loudly
//! instead of silently training with defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use hvmc_core::circuit::{Entanglement, MeasureMode};
use hvmc_core::engine::{EngineConfig, SamplerKind, SchedulePhase, ENUMERATION_CUTOFF_QUBITS};
use hvmc_core::io::{self, HamiltonianFormat};
use hvmc_core::mask::SymmetryMask;
use hvmc_core::optim::Method;
use hvmc_core::oracle;
use hvmc_core::pauli::build_afh_chain;
use hvmc_core::phase_net::PhaseNetConfig;
use hvmc_core::transformer::TransformerConfig;
use hvmc_core::wavefunction::{Block, BlockSet, CircuitSettings, HybridConfig};
use hvmc_core::Hamiltonian64;

/// Top-level schema of a run file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hamiltonian: HamiltonianCfg,
    pub model: ModelCfg,
    pub sampling: SamplingCfg,
    pub optimizer: OptimizerCfg,
    pub schedule: Vec<PhaseCfg>,
    pub run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianCfg {
    pub kind: HamiltonianKind,
    /// Chain length (`afh` only).
    pub n: Option<usize>,
    /// Close the chain into a ring (`afh` only, default open).
    pub periodic: Option<bool>,
    /// Exchange coupling (`afh` only, default 1).
    pub coupling: Option<f64>,
    /// Operator file (`pauli-file` / `fermion-file` only).
    pub path: Option<PathBuf>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianKind {
    /// Antiferromagnetic Heisenberg chain built in-process.
    Afh,
    /// Text file of Pauli strings with coefficients.
    PauliFile,
    /// Text file of one- and two-body fermionic integrals, mapped to qubits.
    FermionFile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelCfg {
    pub transformer: TransformerCfg,
    pub phase_net: PhaseNetCfg,
    pub circuit: Option<CircuitCfg>,
    pub mask: Option<MaskCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformerCfg {
    pub embed_dim: usize,
    pub n_heads: usize,
    pub n_blocks: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseNetCfg {
    pub hidden: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitCfg {
    pub n_layers: usize,
    pub entanglement: EntanglementCfg,
    /// Reuse the amplitude circuit's angles for the phase circuit.
    #[serde(default)]
    pub share_theta: bool,
    /// Bound the amplitude contribution through `a·tanh(·)`.
    pub tanh_rescale: Option<f64>,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
pub enum EntanglementCfg {
    Linear,
    Full,
}

/// Particle-number constraint on pairs of (up, down) spin-orbital qubits.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskCfg {
    pub n_up: usize,
    pub n_down: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingCfg {
    /// Wavefunction samples per iteration.
    pub batch: u64,
    /// Measurement shots per circuit expectation value, or `"exact"` for
    /// noise-free expectations straight from the statevector.
    pub shots: ShotsCfg,
    #[serde(default)]
    pub sampler: SamplerCfg,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(untagged)]
pub enum ShotsCfg {
    Count(u64),
    Keyword(String),
}

#[derive(Debug, Deserialize, Clone, Copy, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SamplerCfg {
    /// Enumerate the distribution when the register is small enough,
    /// otherwise sample ancestrally.
    #[default]
    Auto,
    Enumerated,
    Ancestral,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerCfg {
    pub method: MethodCfg,
    pub eta_init: f64,
    pub eta_min: f64,
    /// Diagonal shift of the stochastic-reconfiguration metric (`sr` only).
    pub sr_epsilon: Option<f64>,
    pub adam_beta1: Option<f64>,
    pub adam_beta2: Option<f64>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MethodCfg {
    Sr,
    Adam,
}

/// One phase of the training schedule: which parameter blocks move, and for
/// how many iterations. The learning rate follows a fresh cosine decay
/// within each phase.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseCfg {
    pub blocks: Vec<String>,
    pub iters: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Total iterations to run (at most the schedule's combined length).
    pub iters: u64,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Write a checkpoint every this many iterations (plus one at the end).
    pub checkpoint_every: Option<u64>,
    /// Stop once the relative error stays at or below this threshold.
    pub stop_below_rel_error: Option<f64>,
    /// Stop once the absolute error stays at or below this threshold.
    pub stop_below_abs_error: Option<f64>,
    /// Consecutive iterations a stop threshold must hold (default 1).
    pub stop_patience: Option<u64>,
    /// Resume from this checkpoint instead of fresh initialization.
    pub init_checkpoint: Option<PathBuf>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    /// Replaces the configured operator wholesale (format sniffed from the
    /// file).
    pub hamiltonian: Option<PathBuf>,
}

/// Everything the driver needs: the engine configuration, the output plan,
/// and the raw TOML text for the run record.
pub struct Assembled {
    pub engine: EngineConfig<f64>,
    pub plan: RunPlan,
    pub echo: String,
}

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub iters: u64,
    pub out_dir: PathBuf,
    pub checkpoint_every: Option<u64>,
    pub stop_below_rel_error: Option<f64>,
    pub stop_below_abs_error: Option<f64>,
    pub stop_patience: u64,
    pub init_checkpoint: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid run configuration")
    }
}

/// Parse `text`, apply `overrides`, and validate everything down to a ready
/// engine configuration.
pub fn assemble(text: &str, overrides: &Overrides) -> Result<Assembled> {
    let cfg = RunConfig::parse(text)?;
    let hamiltonian = resolve_hamiltonian(&cfg.hamiltonian, overrides.hamiltonian.as_deref())?;
    let n_qubits = hamiltonian.n_qubits();

    let model = build_model(&cfg.model, n_qubits)?;
    let measure = match &cfg.sampling.shots {
        ShotsCfg::Count(0) => bail!("sampling.shots must be positive"),
        ShotsCfg::Count(m) => MeasureMode::Shots(*m),
        ShotsCfg::Keyword(k) if k == "exact" => MeasureMode::Exact,
        ShotsCfg::Keyword(k) => {
            bail!("sampling.shots must be a positive integer or \"exact\", got {k:?}")
        }
    };
    let sampler = match cfg.sampling.sampler {
        SamplerCfg::Auto => SamplerKind::Auto,
        SamplerCfg::Enumerated => SamplerKind::Enumerated,
        SamplerCfg::Ancestral => SamplerKind::Ancestral,
    };
    let method = build_method(&cfg.optimizer)?;
    let schedule = build_schedule(&cfg.schedule)?;

    let total: u64 = schedule.iter().map(|p| p.iters).sum();
    if cfg.run.iters == 0 {
        bail!("run.iters must be positive");
    }
    if cfg.run.iters > total {
        bail!(
            "run.iters is {} but the schedule only covers {total} iterations",
            cfg.run.iters
        );
    }

    // A dense (or certified iterative) ground energy is cheap below the
    // enumeration cutoff and gives every log row an error column.
    let reference_energy = if n_qubits <= ENUMERATION_CUTOFF_QUBITS {
        Some(oracle::ground_energy(&hamiltonian)?)
    } else {
        None
    };

    let engine = EngineConfig {
        model,
        hamiltonian,
        batch: cfg.sampling.batch,
        measure,
        sampler,
        method,
        eta_init: cfg.optimizer.eta_init,
        eta_min: cfg.optimizer.eta_min,
        schedule,
        seed: overrides.seed.unwrap_or(cfg.run.seed),
        reference_energy,
    };
    engine.validate().context("invalid run configuration")?;

    let plan = RunPlan {
        iters: cfg.run.iters,
        out_dir: overrides
            .out_dir
            .clone()
            .or(cfg.run.out_dir)
            .unwrap_or_else(|| PathBuf::from("hvmc-run")),
        checkpoint_every: cfg.run.checkpoint_every,
        stop_below_rel_error: cfg.run.stop_below_rel_error,
        stop_below_abs_error: cfg.run.stop_below_abs_error,
        stop_patience: cfg.run.stop_patience.unwrap_or(1),
        init_checkpoint: cfg.run.init_checkpoint,
    };
    if plan.stop_patience == 0 {
        bail!("run.stop_patience must be positive");
    }
    if let Some(every) = plan.checkpoint_every {
        if every == 0 {
            bail!("run.checkpoint_every must be positive");
        }
    }

    Ok(Assembled {
        engine,
        plan,
        echo: text.to_string(),
    })
}

fn resolve_hamiltonian(cfg: &HamiltonianCfg, replace: Option<&Path>) -> Result<Hamiltonian64> {
    if let Some(path) = replace {
        return io::load_hamiltonian_file(path)
            .with_context(|| format!("loading operator from {}", path.display()));
    }
    match cfg.kind {
        HamiltonianKind::Afh => {
            let n = cfg
                .n
                .context("hamiltonian.kind = \"afh\" requires `n` (chain length)")?;
            if cfg.path.is_some() {
                bail!("hamiltonian.path only applies to file-backed kinds");
            }
            let coupling = cfg.coupling.unwrap_or(1.0);
            let periodic = cfg.periodic.unwrap_or(false);
            Ok(build_afh_chain(n, coupling, periodic)?)
        }
        HamiltonianKind::PauliFile | HamiltonianKind::FermionFile => {
            if cfg.n.is_some() || cfg.periodic.is_some() || cfg.coupling.is_some() {
                bail!("hamiltonian.n/periodic/coupling only apply to kind = \"afh\"");
            }
            let path = cfg.path.as_ref().context(
                "file-backed hamiltonian requires `path` (or pass --hamiltonian on the command line)",
            )?;
            let src = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let expected = match cfg.kind {
                HamiltonianKind::PauliFile => HamiltonianFormat::PauliSum,
                _ => HamiltonianFormat::Fermionic,
            };
            let found = io::sniff_format(&src)?;
            if found != expected {
                bail!(
                    "{} is a {found:?} file but hamiltonian.kind says {expected:?}",
                    path.display()
                );
            }
            Ok(io::load_hamiltonian_str(&src)
                .with_context(|| format!("loading operator from {}", path.display()))?)
        }
    }
}

fn build_model(cfg: &ModelCfg, n_qubits: usize) -> Result<HybridConfig> {
    let transformer = TransformerConfig::new(
        n_qubits,
        cfg.transformer.embed_dim,
        cfg.transformer.n_heads,
        cfg.transformer.n_blocks,
    )?;
    let phase_net = PhaseNetConfig::new(n_qubits, cfg.phase_net.hidden.clone())?;
    let circuit = cfg.circuit.as_ref().map(|c| CircuitSettings {
        n_layers: c.n_layers,
        entanglement: match c.entanglement {
            EntanglementCfg::Linear => Entanglement::Linear,
            EntanglementCfg::Full => Entanglement::Full,
        },
        share_theta: c.share_theta,
        tanh_rescale: c.tanh_rescale,
    });
    let mask = match &cfg.mask {
        None => SymmetryMask::disabled(),
        Some(m) => {
            if n_qubits % 2 != 0 {
                bail!(
                    "model.mask needs an even number of qubits (pairs of up/down \
                     spin-orbitals), got {n_qubits}"
                );
            }
            SymmetryMask::particle_number(n_qubits / 2, m.n_up, m.n_down)?
        }
    };
    Ok(HybridConfig::new(transformer, phase_net, circuit, mask)?)
}

fn build_method(cfg: &OptimizerCfg) -> Result<Method<f64>> {
    let method = match cfg.method {
        MethodCfg::Sr => {
            if cfg.adam_beta1.is_some() || cfg.adam_beta2.is_some() {
                bail!("optimizer.adam_beta1/adam_beta2 only apply to method = \"adam\"");
            }
            let epsilon = cfg
                .sr_epsilon
                .context("optimizer.method = \"sr\" requires sr_epsilon")?;
            Method::Sr { epsilon }
        }
        MethodCfg::Adam => {
            if cfg.sr_epsilon.is_some() {
                bail!("optimizer.sr_epsilon only applies to method = \"sr\"");
            }
            Method::Adam {
                beta1: cfg
                    .adam_beta1
                    .context("optimizer.method = \"adam\" requires adam_beta1")?,
                beta2: cfg
                    .adam_beta2
                    .context("optimizer.method = \"adam\" requires adam_beta2")?,
            }
        }
    };
    method.validate()?;
    Ok(method)
}

fn build_schedule(phases: &[PhaseCfg]) -> Result<Vec<SchedulePhase>> {
    if phases.is_empty() {
        bail!("at least one [[schedule]] phase is required");
    }
    let mut out = Vec::with_capacity(phases.len());
    for (i, phase) in phases.iter().enumerate() {
        let mut blocks = Vec::with_capacity(phase.blocks.len());
        for name in &phase.blocks {
            let block = Block::from_name(name).with_context(|| {
                format!(
                    "schedule[{i}]: unknown block {name:?} (expected one of \
                     transformer, phase_net, amp_circuit, phase_circuit)"
                )
            })?;
            if blocks.contains(&block) {
                bail!("schedule[{i}]: block {name:?} listed twice");
            }
            blocks.push(block);
        }
        out.push(SchedulePhase {
            blocks: BlockSet::from_blocks(&blocks),
            iters: phase.iters,
        });
    }
    Ok(out)
}
