//! Membership in the space of Jager pairs, decided through the preimage
//! and through the closed-form quadrangle, with the disagreements counted.

use jager_lab::experiments::{containment_record, sample_set, ExperimentConfig};
use jager_lab::geometry::gamma_contains;
use jager_lab::{GammaMode, KParameter, Point2};

fn main() -> jager_lab::Result<()> {
    let probes = [
        (1.0, 0.5, 0.4),
        (1.0, 0.5, 0.6),
        (0.5, 2.0 / 3.0, 0.72),
        (2.0, 0.05, 0.45),
    ];
    for (kv, u, v) in probes {
        let k = KParameter::f64(kv)?;
        let q = Point2::new(u, v);
        println!(
            "k = {kv}, (u, v) = ({u:.4}, {v:.4}): constructive {}, closed form {}",
            gamma_contains(&k, &q, GammaMode::ConstructiveUnion, 1e-9),
            gamma_contains(&k, &q, GammaMode::CorollaryLiteral, 1e-9)
        );
    }

    let cfg = ExperimentConfig {
        samples: 2_000,
        n_max: 20,
        ..Default::default()
    };
    for kv in [0.5, 1.0, 2.0] {
        let set = sample_set(&cfg, kv)?;
        let rec = containment_record(&set, 1e-9)?;
        println!(
            "k = {kv}: {} pairs, {} outside, {} on the boundary; {:?}",
            rec.samples, rec.failures, rec.boundary_skips, rec.info
        );
    }
    Ok(())
}
