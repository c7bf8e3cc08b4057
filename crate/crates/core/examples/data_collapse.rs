//! Collapse of `C(d) L^{2 nu}` against `d / L` across chain lengths at
//! `lambda = 1`, giving the exponent `nu`.
//!
//! ```text
//! cargo run --release --example data_collapse -- 0.2 100
//! ```

use tfim_fidelity::ensemble::{run_ensemble, EnsembleConfig, FnTask};
use tfim_fidelity::model::{assemble_quadratic_form, DisorderRealization};
use tfim_fidelity::scaling::{data_collapse, CollapseOptions, SizedProfile};
use tfim_fidelity::statics::correlation_profile;
use tfim_fidelity::{diagonalize, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let r: f64 = args.next().map_or(Ok(0.2), |s| s.parse())?;
    let n: u64 = args.next().map_or(Ok(100), |s| s.parse())?;

    for disorder in [0.0, r] {
        let mut profiles = Vec::new();
        for length in [64, 96, 128, 192] {
            let spec = ModelSpec::ising(length, 1.0).with_disorder(disorder);
            let reference = length / 2;
            let separations: Vec<usize> = (1..length - reference).collect();
            let names: Vec<String> = separations.iter().map(|d| format!("C{d}")).collect();
            let task = FnTask::new(names, |real: &DisorderRealization| {
                Ok(correlation_profile(&diagonalize(&assemble_quadratic_form(real, &spec))?, reference).values)
            });
            let samples = if disorder == 0.0 { 1 } else { n };
            let stats = run_ensemble(&spec, &task, &EnsembleConfig::new(samples))?;
            profiles.push(SizedProfile {
                length,
                separations,
                values: stats.stats.iter().map(|s| s.mean).collect(),
            });
        }
        let result = data_collapse(&profiles, &CollapseOptions::default())?;
        println!(
            "r = {disorder:<4}  nu = {:.4}  cost = {:.3e}  (unscaled {:.3e})",
            result.nu, result.cost, result.baseline_cost
        );
        for w in &result.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
