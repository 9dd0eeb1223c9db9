//! The three arithmetic backends side by side.
//!
//! The hardware backend certifies its own results and moves to extended
//! precision once a digit decision or a coefficient can no longer be
//! vouched for. The exact backend is the oracle.

use jager_lab::scalar::Number;
use jager_lab::{Evaluator, PrecisionMode};

fn main() -> jager_lab::Result<()> {
    let cases = [
        ("1", "0.6180339887", 30),
        ("7/10", "3/11", 12),
        ("5/2", "19/23", 12),
        ("1/3", "5/8", 12),
    ];
    for (k, x0, steps) in cases {
        let (k, x0): (Number, Number) = (k.parse()?, x0.parse()?);
        println!("k = {k}, x0 = {x0}");
        for mode in [
            PrecisionMode::Hardware,
            PrecisionMode::extended(),
            PrecisionMode::Exact,
        ] {
            let t = Evaluator::for_mode(mode).trace(&k, &x0, steps)?;
            let last = t.rows.last().expect("at least one step");
            let worst = t.rows.iter().map(|r| r.residual).fold(0.0, f64::max);
            println!(
                "  {:<6} ran in {:<9} steps {:>2}  theta_last = {:.15}  worst residual {:.1e}",
                mode.to_string(),
                t.backend.to_string(),
                t.rows.len(),
                last.theta,
                worst
            );
        }
    }
    Ok(())
}
