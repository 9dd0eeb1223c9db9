//! Digits, convergents and approximation coefficients of one point.
//!
//!     cargo run --example expand -- [k] [x0] [steps]
//!
//! `k` and `x0` accept decimals or `num/den`. Rational input is also
//! expanded exactly.

use jager_lab::cf::{expand, KParameter};
use jager_lab::jager::theta_sequence;
use jager_lab::scalar::{Number, TolerancePolicy};
use jager_lab::{Evaluator, PrecisionMode};

fn main() -> jager_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k: Number = args.first().map_or("1/2", String::as_str).parse()?;
    let x0: Number = args.get(1).map_or("3/10", String::as_str).parse()?;
    let steps: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(8);

    println!("k = {k}, x0 = {x0}");
    let trace = Evaluator::for_mode(PrecisionMode::Hardware).trace(&k, &x0, steps)?;
    println!("theta_0 = x0/k = {}", trace.theta0);
    println!(
        "{:>3} {:>4} {:>14} {:>14} {:>20} {:>20}",
        "n", "a_n", "p_n", "q_n", "p_n/q_n", "theta_n"
    );
    for r in &trace.rows {
        println!(
            "{:>3} {:>4} {:>14.6} {:>14.6} {:>20.16} {:>20.16}",
            r.n, r.digit, r.p, r.q, r.convergent, r.theta
        );
    }
    if trace.terminated {
        println!("the expansion terminates");
    }
    println!("evaluated with {}", trace.backend);

    if let (Number::Ratio(kq), Number::Ratio(xq)) = (&k, &x0) {
        let kp = KParameter::new(kq.clone())?;
        let policy = TolerancePolicy::default();
        let e = expand(&kp, xq, steps, &policy)?;
        let thetas = theta_sequence(&kp, xq, steps, &policy)?;
        println!(
            "\nexact digits {:?}, terminated = {}",
            e.digits, e.terminated
        );
        for c in thetas.coefficients.iter().take(5) {
            println!("  theta_{} = {}", c.n, c.theta);
        }
    }
    Ok(())
}
