//! Disorder averaging with a checkpoint file: an interrupted run is
//! resumed from it, and the merged result matches an uninterrupted
//! run with a different worker count bit for bit.
//!
//! ```text
//! cargo run --release --example ensemble_checkpoint
//! ```

use tfim_fidelity::ensemble::{run_ensemble, EnsembleConfig, FnTask};
use tfim_fidelity::model::{assemble_quadratic_form, clean_form, DisorderRealization};
use tfim_fidelity::statics::{global_fidelity, StaticsReference};
use tfim_fidelity::{diagonalize, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ModelSpec::ising(64, 1.0).with_disorder(0.1).with_seed(7);
    let reference = StaticsReference::new(diagonalize(&clean_form(&spec))?)?;
    let task = FnTask::new(["F"], |real: &DisorderRealization| {
        Ok(vec![global_fidelity(&reference.ideal, &diagonalize(&assemble_quadratic_form(real, &spec))?)?])
    });

    let dir = std::env::temp_dir().join(format!("tfim-checkpoint-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("checkpoint.jsonl");

    run_ensemble(&spec, &task, &EnsembleConfig::new(96).chunk_size(8).checkpoint(&path))?;
    // Keep only the first five chunks, as if the run had been killed.
    let kept: Vec<String> = std::fs::read_to_string(&path)?.lines().take(5).map(|l| format!("{l}\n")).collect();
    std::fs::write(&path, kept.concat())?;
    println!("checkpoint truncated to {} of 12 chunks", kept.len());

    let resumed = run_ensemble(
        &spec,
        &task,
        &EnsembleConfig::new(96).chunk_size(8).checkpoint(&path).progress("resumed"),
    )?;
    let fresh = run_ensemble(&spec, &task, &EnsembleConfig::new(96).chunk_size(8).workers(3))?;
    println!(
        "resumed F = {:.17}\nfresh   F = {:.17}\nidentical: {}",
        resumed.mean("F"),
        fresh.mean("F"),
        resumed.stats == fresh.stats
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
