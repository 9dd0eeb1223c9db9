//! Future and past of an orbit, and the identity
//! `psi_k(x_n, y_n) = (theta_{n-1}, theta_n)`.
//!
//!     cargo run --example orbit_correspondence -- [k] [x0] [steps]

use jager_lab::geometry::{psi, Strip};
use jager_lab::scalar::Number;
use jager_lab::{Evaluator, KParameter, Point2, PrecisionMode};

fn main() -> jager_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k: Number = args.first().map_or("0.7", String::as_str).parse()?;
    let x0: Number = args.get(1).map_or("0.41421356", String::as_str).parse()?;
    let steps: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(25);

    let trace = Evaluator::for_mode(PrecisionMode::extended()).trace(&k, &x0, steps)?;
    let kp = KParameter::f64(k.to_f64())?;
    println!("k = {k}, x0 = {x0}, backend {}", trace.backend);
    println!(
        "{:>3} {:>4} {:>12} {:>12} {:>12} {:>12} {:>10} {:>6}",
        "n", "a_n", "x_n", "y_n", "u", "v", "residual", "strip"
    );
    for r in &trace.rows {
        let in_strip =
            Strip::new(kp.clone(), r.digit).closure_contains(&Point2::new(r.x, r.y), 1e-12);
        println!(
            "{:>3} {:>4} {:>12.8} {:>12.6} {:>12.8} {:>12.8} {:>10.1e} {:>6}",
            r.n, r.digit, r.x, r.y, r.theta_prev, r.theta, r.residual, in_strip
        );
    }
    // the same map evaluated in plain f64 from the reported pair
    if let Some(last) = trace.rows.last() {
        let img = psi(&kp, &Point2::new(last.x, last.y))?;
        println!(
            "psi at the last step (f64): ({:.12}, {:.12})",
            img.first, img.second
        );
    }
    Ok(())
}
