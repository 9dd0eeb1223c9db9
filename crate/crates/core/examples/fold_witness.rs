//! psi is invariant under the fold `(x, y) -> (-y, -x)`. For `k < 1` the
//! strip `P_(k,0)` crosses the fold line, so two distinct dynamic pairs
//! share one image.

use jager_lab::experiments::{injectivity_witness, witness_from_point, WITNESS_K_GRID};
use jager_lab::geometry::{psi, psi_preimage, reflect};
use jager_lab::{KParameter, Point2};

fn main() -> jager_lab::Result<()> {
    let k = KParameter::f64(0.5)?;
    let p = Point2::new(0.9, -0.6);
    println!("psi(0.9, -0.6) = {:?}", psi(&k, &p)?);
    println!("psi(reflect)   = {:?}", psi(&k, &reflect(&p))?);
    let w = witness_from_point(&k, p)?;
    println!(
        "witness: separation {:.4}, image gap {:e}",
        w.separation, w.image_gap
    );

    let img = psi(&k, &Point2::new(0.3, -2.0))?;
    println!("preimage of {img:?}: {:?}", psi_preimage(&k, &img, 1e-15)?);

    for kv in WITNESS_K_GRID {
        let w = injectivity_witness(&KParameter::f64(kv)?, 7)?;
        println!(
            "k = {kv:.1}: p1 = ({:.4}, {:.4})  p2 = ({:.4}, {:.4})  separation {:.3}",
            w.p1.first, w.p1.second, w.p2.first, w.p2.second, w.separation
        );
    }
    match injectivity_witness(&KParameter::f64(1.5)?, 7) {
        Err(e) => println!("k = 1.5: {e}"),
        Ok(w) => println!("unexpected witness {w:?}"),
    }
    Ok(())
}
