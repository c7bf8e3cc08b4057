//! Compares every free-fermion observable with brute-force diagonalization
//! of the spin chain.
//!
//! ```text
//! cargo run --release --example oracle_check -- 8 50
//! ```

use tfim_fidelity::oracle::{validate_against_oracle, ValidationOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let length: usize = args.next().map_or(Ok(8), |s| s.parse())?;
    let realizations: usize = args.next().map_or(Ok(50), |s| s.parse())?;

    let start = std::time::Instant::now();
    let report = validate_against_oracle(&ValidationOptions::new(length, realizations))?;
    println!("L = {length}, {realizations} realizations, {:.2?}", start.elapsed());
    for check in &report.checks {
        println!(
            "{:<24} max deviation {:.3e}  (tolerance {:.0e})  {}",
            check.name,
            check.max_deviation,
            check.tolerance,
            if check.passed() { "ok" } else { "FAILED" }
        );
    }
    if !report.passed() {
        std::process::exit(1);
    }
    Ok(())
}
