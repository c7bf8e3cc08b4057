//! Global and reduced simulator fidelities of a disordered chain around the
//! critical point.
//!
//! ```text
//! cargo run --release --example simulator_fidelity -- 200 0.1 50
//! ```

use tfim_fidelity::ensemble::{run_ensemble, EnsembleConfig, FnTask};
use tfim_fidelity::model::{assemble_quadratic_form, clean_form, DisorderRealization};
use tfim_fidelity::statics::{
    global_fidelity, mean_single_site_fidelity, mean_two_site_fidelity, StaticsReference,
};
use tfim_fidelity::{diagonalize, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let length: usize = args.next().map_or(Ok(200), |s| s.parse())?;
    let r: f64 = args.next().map_or(Ok(0.1), |s| s.parse())?;
    let n: u64 = args.next().map_or(Ok(50), |s| s.parse())?;

    println!("{:>6} {:>18} {:>10} {:>10}", "lambda", "F", "f1", "f2");
    for k in 0..9 {
        let lambda = 0.8 + 0.05 * k as f64;
        let spec = ModelSpec::ising(length, lambda).with_disorder(r);
        let reference = StaticsReference::new(diagonalize(&clean_form(&spec))?)?;
        let task = FnTask::new(["F", "f1", "f2"], |real: &DisorderRealization| {
            let d = diagonalize(&assemble_quadratic_form(real, &spec))?;
            Ok(vec![
                global_fidelity(&reference.ideal, &d)?,
                mean_single_site_fidelity(&reference, &d)?,
                mean_two_site_fidelity(&reference, &d)?,
            ])
        });
        let stats = run_ensemble(&spec, &task, &EnsembleConfig::new(n))?;
        println!(
            "{lambda:>6.2} {:>9.4} +- {:.4} {:>10.6} {:>10.6}",
            stats.mean("F"),
            stats.sem("F"),
            stats.mean("f1"),
            stats.mean("f2")
        );
    }
    Ok(())
}
