//! A reduced verification run. `jager-lab verify` runs the full-size one.
//!
//!     cargo run --release --example verify_suite -- [samples] [seed]

use jager_lab::experiments::{run_suite, ExperimentConfig, Suite};

fn main() -> jager_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let samples = args.first().and_then(|s| s.parse().ok()).unwrap_or(1_000);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let cfg = ExperimentConfig {
        samples,
        seed,
        ..Default::default()
    };
    let report = run_suite(Suite::All, &cfg)?;
    for c in &report.checks {
        let k = c.k.map_or(String::from("-"), |k| k.to_string());
        println!(
            "{:<22} k = {:<4} samples {:>7}  failures {:>3}  skips {:>5}  worst {:.1e}",
            c.name, k, c.samples, c.failures, c.boundary_skips, c.worst_residual
        );
    }
    println!("overall: {}", if report.pass { "pass" } else { "FAIL" });
    Ok(())
}
