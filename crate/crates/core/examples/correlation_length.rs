//! Spin-spin correlations `<s^z_i s^z_j>` and the correlation length fitted
//! from their exponential decay, with and without disorder.
//!
//! ```text
//! cargo run --release --example correlation_length -- 200 100
//! ```

use tfim_fidelity::ensemble::{run_ensemble, EnsembleConfig, FnTask};
use tfim_fidelity::model::{assemble_quadratic_form, DisorderRealization};
use tfim_fidelity::statics::{correlation_length, correlation_profile, default_xi_window};
use tfim_fidelity::{diagonalize, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let length: usize = args.next().map_or(Ok(200), |s| s.parse())?;
    let n: u64 = args.next().map_or(Ok(100), |s| s.parse())?;

    let (reference, window) = default_xi_window(length);
    println!("reference site {reference}, fit window {window:?}");
    println!("{:>6} {:>12} {:>12} {:>12}", "lambda", "r = 0", "r = 0.05", "r = 0.2");
    for k in 0..9 {
        let lambda = 0.9 + 0.025 * k as f64;
        let mut line = format!("{lambda:>6.3}");
        for r in [0.0, 0.05, 0.2] {
            let spec = ModelSpec::ising(length, lambda).with_disorder(r);
            let task = FnTask::new(["xi"], |real: &DisorderRealization| {
                let d = diagonalize(&assemble_quadratic_form(real, &spec))?;
                Ok(vec![correlation_length(&correlation_profile(&d, reference), window.clone())
                    .unwrap_or(f64::NAN)])
            });
            let samples = if r == 0.0 { 1 } else { n };
            let xi = run_ensemble(&spec, &task, &EnsembleConfig::new(samples))?.mean("xi");
            line.push_str(&format!(" {xi:>12.3}"));
        }
        println!("{line}");
    }
    Ok(())
}
