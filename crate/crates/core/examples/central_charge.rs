//! Entanglement entropy of the left block and the effective central charge
//! from the open-chain conformal form.
//!
//! ```text
//! cargo run --release --example central_charge -- 256 50
//! ```

use tfim_fidelity::ensemble::{run_ensemble, EnsembleConfig, FnTask};
use tfim_fidelity::model::{assemble_quadratic_form, DisorderRealization};
use tfim_fidelity::scaling::{central_charge, central_charge_cuts, EntropyProfile};
use tfim_fidelity::statics::entanglement_profile;
use tfim_fidelity::{diagonalize, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let length: usize = args.next().map_or(Ok(256), |s| s.parse())?;
    let n: u64 = args.next().map_or(Ok(50), |s| s.parse())?;

    let cuts = central_charge_cuts(length, 48);
    for r in [0.0, 0.1, 0.2] {
        let spec = ModelSpec::ising(length, 1.0).with_disorder(r);
        let names: Vec<String> = cuts.iter().map(|l| format!("S{l}")).collect();
        let task = FnTask::new(names, |real: &DisorderRealization| {
            entanglement_profile(&diagonalize(&assemble_quadratic_form(real, &spec))?, &cuts)
        });
        let samples = if r == 0.0 { 1 } else { n };
        let stats = run_ensemble(&spec, &task, &EnsembleConfig::new(samples))?;
        let profile = EntropyProfile {
            length,
            cuts: cuts.clone(),
            entropies: stats.stats.iter().map(|s| s.mean).collect(),
        };
        let fit = central_charge(&profile)?;
        println!(
            "r = {r:<4}  c = {:.4}  A = {:.4}  rms residual {:.2e} over {} cuts  S(L/2) = {:.4}",
            fit.c,
            fit.a,
            fit.residual,
            fit.points,
            profile.entropies[cuts.iter().position(|&l| l >= length / 2).unwrap()]
        );
    }
    Ok(())
}
