//! Loschmidt-type simulator fidelity after a sudden field quench from the
//! ideal ground state, global versus single-site.
//!
//! ```text
//! cargo run --release --example quench_fidelity -- 50 0.1 50
//! ```

use tfim_fidelity::dynamics::{QuenchKind, QuenchProtocol, QuenchSetup};
use tfim_fidelity::ensemble::{run_ensemble, EnsembleConfig, FnTask};
use tfim_fidelity::model::DisorderRealization;
use tfim_fidelity::ModelSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let length: usize = args.next().map_or(Ok(50), |s| s.parse())?;
    let r: f64 = args.next().map_or(Ok(0.1), |s| s.parse())?;
    let n: u64 = args.next().map_or(Ok(50), |s| s.parse())?;

    let times: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
    let spec = ModelSpec::ising(length, 0.75).with_disorder(r);
    let mut columns = Vec::new();
    for kind in [QuenchKind::Global, QuenchKind::Local(length / 2)] {
        let protocol = QuenchProtocol {
            kind,
            lambda_initial: 0.75,
            delta_lambda: 0.5,
            times: times.clone(),
        };
        let setup = QuenchSetup::new(&spec, &protocol)?;
        let names: Vec<String> = times.iter().map(|t| format!("F{t}")).collect();
        let task = FnTask::new(names, |real: &DisorderRealization| setup.run(real));
        let stats = run_ensemble(&spec, &task, &EnsembleConfig::new(n))?;
        columns.push(stats.stats.iter().map(|s| s.mean).collect::<Vec<_>>());
    }
    println!("lambda 0.75 -> 1.25, L = {length}, r = {r}");
    println!("{:>5} {:>10} {:>10}", "t", "global", "local");
    for (k, t) in times.iter().enumerate() {
        println!("{t:>5.1} {:>10.5} {:>10.5}", columns[0][k], columns[1][k]);
    }
    Ok(())
}
