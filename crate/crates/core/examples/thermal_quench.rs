//! Single-spin fidelity after quenching a thermal state from `lambda = 1`
//! to `lambda = 2`, scaled by `r^2`, for several temperatures.
//!
//! ```text
//! cargo run --release --example thermal_quench -- 50 0.05 50
//! ```

use tfim_fidelity::dynamics::{time_average, ThermalQuenchSetup};
use tfim_fidelity::ensemble::{run_ensemble, EnsembleConfig, FnTask};
use tfim_fidelity::model::DisorderRealization;
use tfim_fidelity::ModelSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let length: usize = args.next().map_or(Ok(50), |s| s.parse())?;
    let r: f64 = args.next().map_or(Ok(0.05), |s| s.parse())?;
    let n: u64 = args.next().map_or(Ok(50), |s| s.parse())?;

    let times: Vec<f64> = (0..=40).map(|k| 0.5 * k as f64).collect();
    let spec = ModelSpec::ising(length, 1.0).with_disorder(r);
    println!("{:>6} {:>14} {:>14} {:>14}", "T", "(1-f1)/r^2 t=2", "t=10", "late average");
    for temperature in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let setup = ThermalQuenchSetup::new(&spec, 1.0, 2.0, temperature, &times)?;
        let names: Vec<String> = times.iter().map(|t| format!("f1_{t}")).collect();
        let task = FnTask::new(names, |real: &DisorderRealization| setup.run(real));
        let stats = run_ensemble(&spec, &task, &EnsembleConfig::new(n))?;
        let scaled: Vec<f64> = stats.stats.iter().map(|s| (1.0 - s.mean) / (r * r)).collect();
        let late = time_average(&times, &scaled, 10.0, 20.0).unwrap_or(f64::NAN);
        println!("{temperature:>6.1} {:>14.5} {:>14.5} {late:>14.5}", scaled[4], scaled[20]);
    }
    Ok(())
}
