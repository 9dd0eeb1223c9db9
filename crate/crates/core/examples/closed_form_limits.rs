//! Orbits with closed-form coefficients for `k = 1`.
//!
//! The golden conjugate `(sqrt5 - 1)/2` has `theta_n -> 1/sqrt5`, and
//! `sqrt2 - 1` has `theta_n -> 1/(2 sqrt2)`. Both are evaluated at 256 bits.
//! In `f64` the input's own rounding error, multiplied by `q_n^2`, would
//! swamp the coefficient long before `n = 30`.

use jager_lab::jager::{dynamic_pair, golden_conjugate, silver_conjugate, theta};
use jager_lab::scalar::{BigFloat, TolerancePolicy};
use jager_lab::KParameter;

fn main() -> jager_lab::Result<()> {
    let bits = 256;
    let k = KParameter::new(BigFloat::from_u64(1, bits))?;
    let policy = TolerancePolicy::extended();
    let cases = [
        ("(sqrt5-1)/2", golden_conjugate(bits), 1.0 / 5f64.sqrt()),
        ("sqrt2-1", silver_conjugate(bits), 1.0 / (2.0 * 2f64.sqrt())),
    ];
    for (name, x0, limit) in cases {
        println!("x0 = {name}");
        for n in [1, 2, 5, 10, 20, 30] {
            let t = theta(&k, &x0, n, &policy)?.theta.to_f64();
            println!(
                "  theta_{n:<2} = {t:.12}   |theta - limit| = {:.1e}",
                (t - limit).abs()
            );
        }
        let pair = dynamic_pair(&k, &x0, 30, &policy)?;
        println!(
            "  (x_30, y_30) = ({:.12}, {:.12})",
            pair.x.to_f64(),
            pair.y.to_f64()
        );
    }
    Ok(())
}
