//! Training loop: sample, estimate, update, repeat.
//!
//! Each iteration draws a batch from the network distribution, builds the
//! importance-weighted estimators, solves for a parameter update with the
//! configured method, and applies it to the blocks the current schedule
//! phase marks active. Every random draw comes from a stream keyed by
//! `(seed, purpose, iteration, index)`, so a run is a pure function of its
//! configuration and two runs of the same configuration agree bit for bit
//! — as does a run resumed from a checkpoint.

use std::time::Instant;

use crate::checkpoint::Checkpoint;
use crate::circuit::MeasureMode;
use crate::error::{CoreError, Result};
use crate::estimators::{group_samples, SampleBatch};
use crate::optim::{cosine_lr, sr_solve, AdamState, Method};
use crate::pauli::Hamiltonian;
use crate::scalar::Scalar;
use crate::seeds::{stream, StreamPurpose};
use crate::transformer;
use crate::wavefunction::{Block, BlockSet, Evaluator, HybridConfig, HybridParams};

/// Largest register enumerated exhaustively when the sampler is on
/// automatic: `2^12` patterns.
pub const ENUMERATION_CUTOFF_QUBITS: usize = 12;

/// How configurations are drawn from the network distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerKind {
    /// Enumerate when the register is small, sample ancestrally otherwise.
    Auto,
    /// Exhaustive distribution plus one multinomial draw.
    Enumerated,
    /// Sequential bit-by-bit sampling; scales past enumerable registers.
    Ancestral,
}

/// One phase of the block schedule: which parameter blocks train, for how
/// many iterations. The learning rate restarts its cosine decay at each
/// phase boundary.
#[derive(Clone, Copy, Debug)]
pub struct SchedulePhase {
    pub blocks: BlockSet,
    pub iters: u64,
}

/// Everything a run needs.
pub struct EngineConfig<T: Scalar> {
    pub model: HybridConfig,
    pub hamiltonian: Hamiltonian<T>,
    /// Samples per iteration.
    pub batch: u64,
    /// Circuit measurement budget per expectation value.
    pub measure: MeasureMode,
    pub sampler: SamplerKind,
    pub method: Method<T>,
    pub eta_init: T,
    pub eta_min: T,
    pub schedule: Vec<SchedulePhase>,
    pub seed: u64,
    /// Known ground energy, when available, for error reporting.
    pub reference_energy: Option<T>,
}

impl<T: Scalar> EngineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.hamiltonian.n_qubits() != self.model.n_qubits() {
            return Err(CoreError::InvalidInput(format!(
                "operator acts on {} qubits but the model has {}",
                self.hamiltonian.n_qubits(),
                self.model.n_qubits()
            )));
        }
        if self.batch < 2 {
            return Err(CoreError::InvalidInput(format!(
                "batch size must be at least 2, got {}",
                self.batch
            )));
        }
        self.measure.validate()?;
        self.method.validate()?;
        let eta_min_ok = self.eta_min.is_finite_scalar() && self.eta_min >= T::zero();
        if !self.eta_init.is_positive_finite() || !eta_min_ok {
            return Err(CoreError::InvalidInput(
                "learning rates must be positive".into(),
            ));
        }
        if self.eta_min > self.eta_init {
            return Err(CoreError::InvalidInput(format!(
                "eta_min {:?} exceeds eta_init {:?}",
                self.eta_min, self.eta_init
            )));
        }
        if self.schedule.is_empty() {
            return Err(CoreError::InvalidInput("empty schedule".into()));
        }
        for (i, phase) in self.schedule.iter().enumerate() {
            if phase.iters == 0 {
                return Err(CoreError::InvalidInput(format!(
                    "schedule phase {i} has zero iterations"
                )));
            }
            if phase.blocks.is_empty() {
                return Err(CoreError::InvalidInput(format!(
                    "schedule phase {i} trains no blocks"
                )));
            }
            for block in phase.blocks.iter() {
                if block.needs_circuit() && self.model.circuit.is_none() {
                    return Err(CoreError::InvalidInput(format!(
                        "schedule phase {i} trains {} but the model has no circuit",
                        block.name()
                    )));
                }
            }
        }
        if self.sampler == SamplerKind::Enumerated
            && self.model.n_qubits() > ENUMERATION_CUTOFF_QUBITS
        {
            return Err(CoreError::TooManyQubits {
                what: "exhaustive sampling",
                got: self.model.n_qubits(),
                max: ENUMERATION_CUTOFF_QUBITS,
            });
        }
        Ok(())
    }

    pub fn total_iters(&self) -> u64 {
        self.schedule.iter().map(|p| p.iters).sum()
    }

    fn use_enumeration(&self) -> bool {
        match self.sampler {
            SamplerKind::Enumerated => true,
            SamplerKind::Ancestral => false,
            SamplerKind::Auto => self.model.n_qubits() <= ENUMERATION_CUTOFF_QUBITS,
        }
    }
}

/// Per-iteration diagnostics.
#[derive(Clone, Debug)]
pub struct IterationRecord<T> {
    pub iter: u64,
    pub energy: T,
    pub variance: T,
    pub std_error: T,
    /// `|E − E_ref|` when a reference energy is configured.
    pub abs_error: Option<T>,
    /// `|E − E_ref| / |E_ref|` when the reference is nonzero.
    pub rel_error: Option<T>,
    pub max_omega: T,
    pub grad_inf_norm: T,
    pub lr: T,
    /// Whether the SR solve took the reduced route; absent under Adam.
    pub sr_reduced: Option<bool>,
    pub wall_ms: f64,
}

pub struct Engine<T: Scalar> {
    config: EngineConfig<T>,
    params: HybridParams<T>,
    /// Adam moments per parameter block, in [`Block::ALL`] order.
    adam: Vec<AdamState<T>>,
    iter: u64,
}

impl<T: Scalar> Engine<T> {
    pub fn new(config: EngineConfig<T>) -> Result<Self> {
        config.validate()?;
        let mut rng = stream(config.seed, StreamPurpose::Init, 0, 0);
        let params = HybridParams::init(&config.model, &mut rng);
        let adam = Self::fresh_adam(&config.model);
        Ok(Self {
            config,
            params,
            adam,
            iter: 0,
        })
    }

    fn fresh_adam(model: &HybridConfig) -> Vec<AdamState<T>> {
        let layout = model.layout();
        Block::ALL
            .iter()
            .map(|&b| AdamState::new(layout.block_range(b).len()))
            .collect()
    }

    pub fn config(&self) -> &EngineConfig<T> {
        &self.config
    }

    pub fn params(&self) -> &HybridParams<T> {
        &self.params
    }

    pub fn iter(&self) -> u64 {
        self.iter
    }

    pub fn adam_state(&self, block: Block) -> &AdamState<T> {
        let idx = Block::ALL.iter().position(|&b| b == block).unwrap();
        &self.adam[idx]
    }

    /// Schedule lookup: active blocks, step within the phase, phase length.
    fn phase_at(&self, iter: u64) -> Result<(BlockSet, u64, u64)> {
        let mut start = 0u64;
        for phase in &self.config.schedule {
            if iter < start + phase.iters {
                return Ok((phase.blocks, iter - start, phase.iters));
            }
            start += phase.iters;
        }
        Err(CoreError::InvalidInput(format!(
            "iteration {iter} lies beyond the schedule's {start} total iterations"
        )))
    }

    fn draw_groups(&self) -> Result<Vec<(crate::pauli::Configuration, u64)>> {
        let model = &self.config.model;
        if self.config.use_enumeration() {
            let mut rng = stream(self.config.seed, StreamPurpose::Sample, self.iter, 0);
            transformer::sample_enumerated(
                &self.params.transformer,
                &model.mask,
                self.config.batch,
                &mut rng,
            )
        } else {
            let seed = self.config.seed;
            let iter = self.iter;
            let samples = transformer::sample_ancestral(
                &self.params.transformer,
                &model.mask,
                self.config.batch,
                |b| stream(seed, StreamPurpose::Sample, iter, b),
            )?;
            Ok(group_samples(samples))
        }
    }

    /// One training iteration: sample, estimate, update active blocks.
    pub fn step(&mut self) -> Result<IterationRecord<T>> {
        let start = Instant::now();
        let (blocks, t_within, phase_len) = self.phase_at(self.iter)?;
        let lr = cosine_lr(
            self.config.eta_init,
            self.config.eta_min,
            t_within,
            phase_len,
        );
        let layout = self.config.model.layout();
        let total = layout.total();

        let groups = self.draw_groups()?;
        let mut delta = vec![T::zero(); total];
        let mut sr_reduced = None;
        let est = {
            let evaluator = Evaluator::new(
                &self.config.model,
                &self.params,
                blocks,
                self.config.measure,
                self.config.seed,
                self.iter,
            )?;
            let batch = SampleBatch::from_counts(&self.config.hamiltonian, &evaluator, &groups)?;
            let est = batch.estimate();
            match self.config.method {
                Method::Sr { epsilon } => {
                    let solved = sr_solve(&batch, &est.grad, epsilon)?;
                    sr_reduced = Some(solved.reduced);
                    for block in blocks.iter() {
                        for i in layout.block_range(block) {
                            delta[i] = lr * solved.delta[i];
                        }
                    }
                }
                Method::Adam { beta1, beta2 } => {
                    for block in blocks.iter() {
                        let range = layout.block_range(block);
                        let idx = Block::ALL.iter().position(|&b| b == block).unwrap();
                        let update =
                            self.adam[idx].step(&est.grad[range.clone()], lr, beta1, beta2);
                        delta[range].copy_from_slice(&update);
                    }
                }
            }
            est
        };
        for &d in &delta {
            if !d.is_finite_scalar() {
                return Err(CoreError::NonFinite("parameter update"));
            }
        }
        self.params.axpy(-T::one(), &delta);

        let (abs_error, rel_error) = match self.config.reference_energy {
            Some(e_ref) => {
                let abs = (est.energy - e_ref).abs();
                let rel = if e_ref.abs() > T::of_f64(1e-12) {
                    Some(abs / e_ref.abs())
                } else {
                    None
                };
                (Some(abs), rel)
            }
            None => (None, None),
        };

        let record = IterationRecord {
            iter: self.iter,
            energy: est.energy,
            variance: est.variance,
            std_error: est.std_error,
            abs_error,
            rel_error,
            max_omega: est.max_omega,
            grad_inf_norm: est.grad_inf_norm(),
            lr,
            sr_reduced,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        self.iter += 1;
        Ok(record)
    }

    /// Run `n` iterations, reporting each record to the observer.
    pub fn run_for(
        &mut self,
        n: u64,
        mut observer: impl FnMut(&IterationRecord<T>),
    ) -> Result<Vec<IterationRecord<T>>> {
        let mut records = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let record = self.step()?;
            observer(&record);
            records.push(record);
        }
        Ok(records)
    }

    /// Snapshot the full training state.
    pub fn to_checkpoint(&self) -> Checkpoint<T> {
        let layout = self.config.model.layout();
        let mut ckp = Checkpoint::new(self.iter, self.config.seed, layout.checksum());
        ckp.insert_scalars("params", self.params.flatten());
        for (i, &block) in Block::ALL.iter().enumerate() {
            let state = &self.adam[i];
            let (m, v) = state.moments();
            ckp.insert_scalars(&format!("adam.m.{}", block.name()), m.to_vec());
            ckp.insert_scalars(&format!("adam.v.{}", block.name()), v.to_vec());
            ckp.insert_counters(&format!("adam.t.{}", block.name()), vec![state.steps_taken()]);
        }
        ckp
    }

    /// Rebuild an engine from a checkpoint, continuing at its iteration.
    /// The configuration must describe the same model (checked through the
    /// layout checksum) and carry the same seed, or the resumed run could
    /// silently diverge from the original.
    pub fn from_checkpoint(config: EngineConfig<T>, ckp: &Checkpoint<T>) -> Result<Self> {
        config.validate()?;
        let layout = config.model.layout();
        if ckp.layout_checksum != layout.checksum() {
            return Err(CoreError::Checkpoint(
                "parameter layout differs from the checkpointed model".into(),
            ));
        }
        if ckp.seed != config.seed {
            return Err(CoreError::Checkpoint(format!(
                "checkpoint was recorded with seed {}, configuration says {}",
                ckp.seed, config.seed
            )));
        }
        let flat = ckp.scalars("params")?;
        if flat.len() != layout.total() {
            return Err(CoreError::Checkpoint(format!(
                "checkpoint holds {} parameters, model needs {}",
                flat.len(),
                layout.total()
            )));
        }
        let mut rng = stream(config.seed, StreamPurpose::Init, 0, 0);
        let mut params = HybridParams::init(&config.model, &mut rng);
        params.set_from_flat(flat);

        let mut adam = Vec::with_capacity(Block::ALL.len());
        for &block in &Block::ALL {
            let m = ckp.scalars(&format!("adam.m.{}", block.name()))?.to_vec();
            let v = ckp.scalars(&format!("adam.v.{}", block.name()))?.to_vec();
            let t = ckp.counter(&format!("adam.t.{}", block.name()))?;
            let expect = layout.block_range(block).len();
            if m.len() != expect {
                return Err(CoreError::Checkpoint(format!(
                    "optimizer state for {} holds {} entries, expected {expect}",
                    block.name(),
                    m.len()
                )));
            }
            adam.push(AdamState::from_parts(m, v, t)?);
        }
        Ok(Self {
            config,
            params,
            adam,
            iter: ckp.iter,
        })
    }
}
