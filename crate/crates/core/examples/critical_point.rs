//! Locates the critical field from crossings of `1 / (L Delta)` between
//! chain lengths, for a clean and a disordered chain.
//!
//! ```text
//! cargo run --release --example critical_point -- 0.1 100
//! ```

use tfim_fidelity::ensemble::{run_ensemble, EnsembleConfig, FnTask};
use tfim_fidelity::freefermion::energy_gap;
use tfim_fidelity::model::{assemble_quadratic_form, DisorderRealization};
use tfim_fidelity::scaling::{gap_crossing, SizeSweep};
use tfim_fidelity::{diagonalize, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let r: f64 = args.next().map_or(Ok(0.1), |s| s.parse())?;
    let n: u64 = args.next().map_or(Ok(100), |s| s.parse())?;

    let sizes = vec![20, 30, 40, 60];
    let lambdas: Vec<f64> = (0..41).map(|k| 0.8 + 0.01 * k as f64).collect();
    for disorder in [0.0, r] {
        let mut gaps = Vec::new();
        for &length in &sizes {
            let mut row = Vec::new();
            for &lambda in &lambdas {
                let spec = ModelSpec::ising(length, lambda).with_disorder(disorder);
                let task = FnTask::new(["gap"], |real: &DisorderRealization| {
                    Ok(vec![energy_gap(&diagonalize(&assemble_quadratic_form(real, &spec))?)])
                });
                let samples = if disorder == 0.0 { 1 } else { n };
                row.push(run_ensemble(&spec, &task, &EnsembleConfig::new(samples))?.mean("gap"));
            }
            gaps.push(row);
        }
        let result = gap_crossing(&SizeSweep::new(sizes.clone(), lambdas.clone(), gaps)?, 1.0)?;
        println!("r = {disorder}: lambda_c = {:.4}", result.lambda_c);
        for pair in &result.pairs {
            println!("  L = {:>2} / {:>2}: crossings {:?}", pair.sizes.0, pair.sizes.1, pair.roots);
        }
        for w in &result.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
