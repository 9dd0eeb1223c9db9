//! Images of the strips `P_(k,a)` and the two-sided check against the
//! predicted regions: quadrangles when psi is injective on the strip, and
//! the folded region bounded by five curves for `k < 1, a = 0`.

use jager_lab::experiments::region_check;
use jager_lab::geometry::{pa_sharp_quad, pa_sharp_quad_as_stated, P0Region};
use jager_lab::{KParameter, Point2};

fn main() -> jager_lab::Result<()> {
    for (kv, a) in [(0.5, 1), (1.0, 0), (2.0, 3)] {
        let k = KParameter::f64(kv)?;
        let q = pa_sharp_quad(&k, a)?;
        let stated = pa_sharp_quad_as_stated(&k, a)?;
        println!("k = {kv}, a = {a}");
        println!(
            "  image quadrangle   {:?}",
            q.vertices.map(|p| (p.first, p.second))
        );
        println!("  fourth vertex as printed: {:?}", stated.vertices[3]);
        let rec = region_check(&k, a, 5_000, 1, 1e-9)?;
        println!(
            "  two-sided check: {} failures in {} samples; info {:?}",
            rec.failures, rec.samples, rec.info
        );
    }

    let k = KParameter::f64(0.5)?;
    let r = P0Region::new(k.clone())?;
    for q in [
        Point2::new(0.8, 0.3),
        Point2::new(1.0, 0.25),
        Point2::new(0.7, 0.9),
        Point2::new(2.0, 0.0),
    ] {
        println!(
            "P0 k = 0.5 at ({}, {}): {} (literal intersection: {})",
            q.first,
            q.second,
            r.classify(&q, 1e-9),
            r.classify_as_stated(&q, 1e-9)
        );
    }
    let rec = region_check(&k, 0, 5_000, 1, 1e-9)?;
    println!(
        "P0 two-sided check: {} failures; info {:?}",
        rec.failures, rec.info
    );
    Ok(())
}
