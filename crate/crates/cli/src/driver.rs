//! Executes an assembled run: the training loop plus everything it writes.
//!
//! A run directory contains
//!
//! - `log.csv` — one row per iteration, deterministic columns only, so two
//!   runs with the same configuration and seed produce byte-identical files;
//! - `timing.csv` — per-iteration wall time, kept out of `log.csv` because
//!   it is the one quantity that legitimately differs between runs;
//! - `summary.json` — versioned end-of-run record (final energy and errors,
//!   iteration count, seed, the full configuration text);
//! - `checkpoint-<iter>` — restorable engine state, written on the
//!   configured cadence and always at the end of the run. An aborted run
//!   leaves `checkpoint-abort-<iter>` behind instead.

use std::fs::{self, File};
use std::io::{BufWriter, Write as _};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::json;

use hvmc_core::checkpoint::Checkpoint;
use hvmc_core::engine::{Engine, IterationRecord};

use crate::config::Assembled;

/// Fixed `log.csv` column order. Bump the summary schema version if this
/// ever changes.
const LOG_HEADER: &str =
    "iter,energy,variance,std_error,abs_error,rel_error,max_omega,grad_inf_norm,lr,sr_reduced";

/// Schema version stamped into `summary.json`.
const SUMMARY_VERSION: u64 = 1;

/// What `execute` hands back after the run directory is fully written.
pub struct RunOutcome {
    pub out_dir: PathBuf,
    /// Iterations executed in this process (a resumed run excludes the
    /// iterations already inside the checkpoint).
    pub iters_run: u64,
    pub stopped_early: bool,
    pub final_record: Option<IterationRecord<f64>>,
    pub summary: serde_json::Value,
}

/// Run the plan to completion (or early stop), writing the run directory.
///
/// With `quiet` set, nothing is printed; otherwise progress goes to stderr
/// so stdout stays reserved for machine-readable output.
pub fn execute(assembled: Assembled, quiet: bool) -> Result<RunOutcome> {
    let Assembled { engine, plan, echo } = assembled;
    fs::create_dir_all(&plan.out_dir)
        .with_context(|| format!("creating output directory {}", plan.out_dir.display()))?;

    let mut engine = match &plan.init_checkpoint {
        None => Engine::new(engine)?,
        Some(path) => {
            let ckp = Checkpoint::<f64>::load(path)
                .with_context(|| format!("loading checkpoint {}", path.display()))?;
            Engine::from_checkpoint(engine, &ckp)
                .with_context(|| format!("resuming from {}", path.display()))?
        }
    };
    let start_iter = engine.iter();
    if start_iter > plan.iters {
        anyhow::bail!(
            "checkpoint is already at iteration {start_iter}, beyond run.iters = {}",
            plan.iters
        );
    }

    let mut log = BufWriter::new(
        File::create(plan.out_dir.join("log.csv")).context("creating log.csv")?,
    );
    writeln!(log, "{LOG_HEADER}")?;
    let mut timing = BufWriter::new(
        File::create(plan.out_dir.join("timing.csv")).context("creating timing.csv")?,
    );
    writeln!(timing, "iter,wall_ms")?;

    let reference = engine.config().reference_energy;
    let seed = engine.config().seed;
    let started = Instant::now();
    let mut stopped_early = false;
    let mut final_record: Option<IterationRecord<f64>> = None;
    let mut rel_streak = 0u64;
    let mut abs_streak = 0u64;
    let mut last_checkpoint_iter = None;

    while engine.iter() < plan.iters {
        let record = match engine.step() {
            Ok(r) => r,
            Err(e) => {
                // Leave a restorable snapshot of the pre-failure state so
                // the iterations already paid for are not lost.
                let at = engine.iter();
                let path = plan.out_dir.join(format!("checkpoint-abort-{at}"));
                let mut ckp = engine.to_checkpoint();
                ckp.insert_bytes("config", echo.clone().into_bytes());
                ckp.save(&path)?;
                return Err(anyhow::Error::new(e).context(format!(
                    "run aborted at iteration {at}; state saved to {}",
                    path.display()
                )));
            }
        };

        write_log_row(&mut log, &record)?;
        log.flush()?;
        writeln!(timing, "{},{}", record.iter, record.wall_ms)?;
        timing.flush()?;

        if let Some(every) = plan.checkpoint_every {
            if engine.iter() % every == 0 {
                save_checkpoint(&engine, &plan.out_dir, &echo)?;
                last_checkpoint_iter = Some(engine.iter());
            }
        }

        if !quiet && (record.iter % 50 == 0 || engine.iter() == plan.iters) {
            report_progress(&record, plan.iters);
        }

        streak(&mut rel_streak, plan.stop_below_rel_error, record.rel_error);
        streak(&mut abs_streak, plan.stop_below_abs_error, record.abs_error);
        final_record = Some(record);
        if rel_streak >= plan.stop_patience || abs_streak >= plan.stop_patience {
            stopped_early = true;
            break;
        }
    }

    if last_checkpoint_iter != Some(engine.iter()) {
        save_checkpoint(&engine, &plan.out_dir, &echo)?;
    }

    let total_wall_s = started.elapsed().as_secs_f64();
    let summary = json!({
        "version": SUMMARY_VERSION,
        "seed": seed,
        "iters_requested": plan.iters,
        "iters_run": engine.iter() - start_iter,
        "resumed_from_iter": if start_iter > 0 { Some(start_iter) } else { None },
        "stopped_early": stopped_early,
        "reference_energy": reference,
        "final": final_record.as_ref().map(|r| json!({
            "iter": r.iter,
            "energy": r.energy,
            "variance": r.variance,
            "std_error": r.std_error,
            "abs_error": r.abs_error,
            "rel_error": r.rel_error,
            "max_omega": r.max_omega,
            "grad_inf_norm": r.grad_inf_norm,
        })),
        "total_wall_s": total_wall_s,
        "config": echo,
    });
    fs::write(
        plan.out_dir.join("summary.json"),
        format!("{:#}\n", summary),
    )
    .context("writing summary.json")?;

    if !quiet {
        if let Some(r) = &final_record {
            eprintln!(
                "done: {} iterations in {:.1}s, E = {:.10}{}",
                engine.iter() - start_iter,
                total_wall_s,
                r.energy,
                match r.rel_error {
                    Some(rel) => format!(", relative error {rel:.3e}"),
                    None => String::new(),
                }
            );
        }
    }

    Ok(RunOutcome {
        out_dir: plan.out_dir,
        iters_run: engine.iter() - start_iter,
        stopped_early,
        final_record,
        summary,
    })
}

fn save_checkpoint(engine: &Engine<f64>, out_dir: &std::path::Path, echo: &str) -> Result<()> {
    let mut ckp = engine.to_checkpoint();
    ckp.insert_bytes("config", echo.as_bytes().to_vec());
    let path = out_dir.join(format!("checkpoint-{}", engine.iter()));
    ckp.save(&path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Advance or reset a stop-rule streak counter.
fn streak(count: &mut u64, threshold: Option<f64>, value: Option<f64>) {
    match (threshold, value) {
        (Some(t), Some(v)) if v <= t => *count += 1,
        (Some(_), _) => *count = 0,
        (None, _) => {}
    }
}

fn write_log_row(out: &mut impl std::io::Write, r: &IterationRecord<f64>) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let reduced = match r.sr_reduced {
        Some(true) => "1",
        Some(false) => "0",
        None => "",
    };
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        r.iter,
        r.energy,
        r.variance,
        r.std_error,
        opt(r.abs_error),
        opt(r.rel_error),
        r.max_omega,
        r.grad_inf_norm,
        r.lr,
        reduced,
    )?;
    Ok(())
}

fn report_progress(r: &IterationRecord<f64>, total: u64) {
    let err = match r.rel_error {
        Some(rel) => format!("  rel_err {rel:.3e}"),
        None => String::new(),
    };
    eprintln!(
        "[{:>6}/{total}] E = {:+.10}  σ = {:.3e}{err}",
        r.iter + 1,
        r.energy,
        r.std_error,
    );
}
