//! Writes `region_boundary.csv` and `jager_pairs.csv` for the two
//! regimes, ready for an external plotting tool.
//!
//!     cargo run --release --example plot_data -- [output-dir]

use std::path::PathBuf;

use jager_lab::experiments::{emit_plot_data, ExperimentConfig};
use jager_lab::KParameter;

fn main() -> jager_lab::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("jager-lab-plots"));
    let cfg = ExperimentConfig {
        samples: 2_000,
        n_max: 20,
        ..Default::default()
    };
    for kv in [0.5, 1.0] {
        let dir = root.join(format!("k{kv}"));
        let files = emit_plot_data(&KParameter::f64(kv)?, &cfg, &dir)?;
        println!(
            "k = {kv}: {} boundary rows in {}, {} pairs in {}",
            files.boundary_rows,
            files.boundary.display(),
            files.pair_rows,
            files.pairs.display()
        );
    }
    Ok(())
}
