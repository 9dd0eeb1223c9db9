//! k-continued fractions `k/(k + a_1 + k/(k + a_2 + ...))`.
//!
//! The shift behind the expansion is `x -> k/x - k - a` with
//! `a = floor(k/x - k)`, which keeps every remainder in `[0, 1)`.
//! Convergents follow
//!
//! ```text
//! p_n = (k + a_n) p_{n-1} + k p_{n-2},   (p_{-1}, p_0) = (1, 0)
//! q_n = (k + a_n) q_{n-1} + k q_{n-2},   (q_{-1}, q_0) = (0, 1)
//! ```
//!
//! and the past of the orbit is `y_1 = -k - a_1`,
//! `y_{n+1} = -k - a_{n+1} + k / y_n`.

use crate::error::{Error, Result};
use crate::scalar::{snap_floor, Real, TolerancePolicy};

pub type Digit = u64;

/// The parameter `k > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct KParameter<R>(R);

impl<R: Real> KParameter<R> {
    pub fn new(k: R) -> Result<Self> {
        if k.is_negative() || k.is_zero() {
            return Err(Error::NonPositiveK(k.to_f64()));
        }
        Ok(KParameter(k))
    }

    pub fn value(&self) -> &R {
        &self.0
    }

    /// `k < 1`, where the fold of psi reaches into the dynamic domain.
    pub fn is_small(&self) -> bool {
        self.0 < self.0.one_like()
    }

    pub fn lift(&self, n: u64) -> R {
        self.0.lift_u64(n)
    }

    /// `k + a`
    pub fn shifted(&self, a: Digit) -> R {
        self.0.clone() + self.lift(a)
    }
}

impl KParameter<f64> {
    pub fn f64(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::NonPositiveK(k));
        }
        Self::new(k)
    }
}

#[derive(Clone, Debug)]
pub struct Expansion<R> {
    pub k: KParameter<R>,
    pub digits: Vec<Digit>,
    pub terminated: bool,
    pub x0: R,
}

/// One step of the shift: returns `(a, x')`; `x' = 0` marks termination.
pub fn gauss_step<R: Real>(
    k: &KParameter<R>,
    x: &R,
    policy: &TolerancePolicy,
) -> Result<(Digit, R)> {
    if x.is_negative() || x.is_zero() || *x > x.one_like() {
        return Err(Error::Domain(x.to_f64(), "(0, 1]"));
    }
    let t = k.value().clone() / x.clone() - k.value().clone();
    let a = snap_floor(&t, policy)?;
    let rem = t - x.lift_u64(a);
    let terminal =
        rem.is_negative() || rem.is_zero() || (!R::EXACT && rem.to_f64() < policy.eps_snap);
    Ok((a, if terminal { x.zero_like() } else { rem }))
}

fn check_open_unit<R: Real>(x0: &R) -> Result<()> {
    if x0.is_negative() || x0.is_zero() || *x0 >= x0.one_like() {
        return Err(Error::Domain(x0.to_f64(), "(0, 1)"));
    }
    Ok(())
}

/// Up to `n_max` digits of `x0`, stopping early if a remainder hits zero.
pub fn expand<R: Real>(
    k: &KParameter<R>,
    x0: &R,
    n_max: usize,
    policy: &TolerancePolicy,
) -> Result<Expansion<R>> {
    check_open_unit(x0)?;
    if n_max == 0 {
        return Err(Error::InvalidConfig("n_max must be at least 1".into()));
    }
    let mut digits = Vec::with_capacity(n_max);
    let mut x = x0.clone();
    let mut terminated = false;
    while digits.len() < n_max {
        let (a, next) = gauss_step(k, &x, policy)?;
        digits.push(a);
        if next.is_zero() {
            terminated = true;
            break;
        }
        x = next;
    }
    Ok(Expansion {
        k: k.clone(),
        digits,
        terminated,
        x0: x0.clone(),
    })
}

/// `[a_1, ..., a_n]_k`, evaluated innermost first.
pub fn eval_finite<R: Real>(k: &KParameter<R>, digits: &[Digit]) -> Result<R> {
    if digits.is_empty() {
        return Err(Error::EmptyDigits);
    }
    let kv = k.value();
    let mut acc = kv.zero_like();
    for &a in digits.iter().rev() {
        acc = kv.clone() / (k.shifted(a) + acc);
    }
    Ok(acc)
}

/// Two consecutive convergent numerators and denominators at index `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergentState<R> {
    pub n: usize,
    pub p_prev: R,
    pub p_cur: R,
    pub q_prev: R,
    pub q_cur: R,
}

impl<R: Real> ConvergentState<R> {
    /// `(p_{-1}, q_{-1}) = (1, 0)` and `(p_0, q_0) = (0, 1)`.
    pub fn initial(k: &KParameter<R>) -> Self {
        ConvergentState {
            n: 0,
            p_prev: k.lift(1),
            p_cur: k.lift(0),
            q_prev: k.lift(0),
            q_cur: k.lift(1),
        }
    }

    pub fn step(&self, a: Digit, k: &KParameter<R>) -> Self {
        let lead = k.shifted(a);
        let kv = k.value().clone();
        ConvergentState {
            n: self.n + 1,
            p_prev: self.p_cur.clone(),
            p_cur: lead.clone() * self.p_cur.clone() + kv.clone() * self.p_prev.clone(),
            q_prev: self.q_cur.clone(),
            q_cur: lead * self.q_cur.clone() + kv * self.q_prev.clone(),
        }
    }

    pub fn convergent(&self) -> R {
        self.p_cur.clone() / self.q_cur.clone()
    }

    /// `p_{n-1} q_n - p_n q_{n-1}`, which equals `(-k)^n`.
    pub fn determinant(&self) -> R {
        self.p_prev.clone() * self.q_cur.clone() - self.p_cur.clone() * self.q_prev.clone()
    }
}

/// `convergent_step` as a free function.
pub fn convergent_step<R: Real>(
    state: &ConvergentState<R>,
    a: Digit,
    k: &KParameter<R>,
) -> ConvergentState<R> {
    state.step(a, k)
}

/// `x_n`, the n-th remainder. Fails if the orbit ends at or before step `n`.
pub fn future<R: Real>(k: &KParameter<R>, x0: &R, n: usize, policy: &TolerancePolicy) -> Result<R> {
    check_open_unit(x0)?;
    let mut x = x0.clone();
    for step in 1..=n {
        let (_, next) = gauss_step(k, &x, policy)?;
        if next.is_zero() {
            return Err(Error::OrbitEnded {
                ended_at: step,
                requested: n,
            });
        }
        x = next;
    }
    Ok(x)
}

/// `y_n = -k - a_n - [a_{n-1}, ..., a_1]_k`, with `y_1 = -k - a_1`.
pub fn past_direct<R: Real>(k: &KParameter<R>, digits: &[Digit], n: usize) -> Result<R> {
    if n == 0 {
        return Err(Error::InvalidConfig("past is defined for n >= 1".into()));
    }
    if digits.len() < n {
        return Err(Error::TooFewDigits {
            needed: n,
            got: digits.len(),
        });
    }
    let head = -k.shifted(digits[n - 1]);
    if n == 1 {
        return Ok(head);
    }
    let reversed: Vec<Digit> = digits[..n - 1].iter().rev().copied().collect();
    Ok(head - eval_finite(k, &reversed)?)
}

/// `y_{n+1} = -k - a_{n+1} + k / y_n`.
pub fn past_step<R: Real>(k: &KParameter<R>, y: &R, a_next: Digit) -> R {
    k.value().clone() / y.clone() - k.shifted(a_next)
}

/// State of an orbit after step `n`.
#[derive(Clone, Debug)]
pub struct OrbitStep<R> {
    pub n: usize,
    /// `a_n`
    pub digit: Digit,
    /// `x_n`; zero on the terminal step.
    pub x: R,
    /// `y_n`
    pub y: R,
    pub convergents: ConvergentState<R>,
    pub terminal: bool,
}

/// Walks the forward shift, the convergent recurrences and the past together.
///
/// Yields steps `n = 1, 2, ...` and stops after a terminal step.
pub struct Orbit<R: Real> {
    k: KParameter<R>,
    x: R,
    y: Option<R>,
    conv: ConvergentState<R>,
    policy: TolerancePolicy,
    done: bool,
}

impl<R: Real> Orbit<R> {
    pub fn new(k: &KParameter<R>, x0: &R, policy: &TolerancePolicy) -> Result<Self> {
        check_open_unit(x0)?;
        Ok(Orbit {
            k: k.clone(),
            x: x0.clone(),
            y: None,
            conv: ConvergentState::initial(k),
            policy: *policy,
            done: false,
        })
    }
}

impl<R: Real> Iterator for Orbit<R> {
    type Item = Result<OrbitStep<R>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let (a, next) = match gauss_step(&self.k, &self.x, &self.policy) {
            Ok(v) => v,
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        let y = match &self.y {
            None => -self.k.shifted(a),
            Some(prev) => past_step(&self.k, prev, a),
        };
        self.conv = self.conv.step(a, &self.k);
        let terminal = next.is_zero();
        self.done = terminal;
        self.x = next.clone();
        self.y = Some(y.clone());
        Some(Ok(OrbitStep {
            n: self.conv.n,
            digit: a,
            x: next,
            y,
            convergents: self.conv.clone(),
            terminal,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn k(v: f64) -> KParameter<f64> {
        KParameter::f64(v).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    const P: TolerancePolicy = TolerancePolicy {
        eps_compare: 1e-9,
        eps_snap: 1e-12,
        eps_boundary: 1e-9,
    };

    #[test]
    fn k_must_be_positive() {
        assert!(matches!(KParameter::f64(0.0), Err(Error::NonPositiveK(_))));
        assert!(matches!(KParameter::f64(-1.0), Err(Error::NonPositiveK(_))));
        assert!(KParameter::f64(f64::NAN).is_err());
        assert!(k(0.5).is_small());
        assert!(!k(1.0).is_small());
    }

    #[test]
    fn gauss_step_examples() {
        assert_eq!(gauss_step(&k(1.0), &0.5, &P).unwrap(), (1, 0.0));

        let g = golden();
        let (a, x) = gauss_step(&k(1.0), &g, &P).unwrap();
        assert_eq!(a, 0);
        assert!((x - g).abs() < 1e-15);

        let (a, x) = gauss_step(&k(0.5), &0.3, &P).unwrap();
        assert_eq!(a, 1);
        assert!((x - (0.5 / 0.3 - 1.5)).abs() < 1e-15);
        assert!((x - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_step_rejects_out_of_domain() {
        for bad in [0.0, -0.1, 1.5] {
            assert!(matches!(
                gauss_step(&k(1.0), &bad, &P),
                Err(Error::Domain(..))
            ));
        }
        // x = 1 is allowed and terminates with digit 0
        assert_eq!(gauss_step(&k(0.7), &1.0, &P).unwrap(), (0, 0.0));
    }

    #[test]
    fn expand_examples() {
        let e = expand(&k(0.5), &0.3, 5, &P).unwrap();
        assert_eq!(e.digits, vec![1, 2, 0, 0, 0]);
        assert!(!e.terminated);

        let e = expand(&k(2.0), &(2.0 / 3.0), 5, &P).unwrap();
        assert_eq!(e.digits, vec![1]);
        assert!(e.terminated);

        let e = expand(&k(1.0), &(2f64.sqrt() - 1.0), 4, &P).unwrap();
        assert_eq!(e.digits, vec![1, 1, 1, 1]);

        assert!(expand(&k(1.0), &1.0, 4, &P).is_err());
        assert!(expand(&k(1.0), &0.5, 0, &P).is_err());
    }

    #[test]
    fn expand_exact_terminates_exactly() {
        let kk = KParameter::new(q(2, 1)).unwrap();
        let e = expand(&kk, &q(2, 3), 5, &P).unwrap();
        assert_eq!(e.digits, vec![1]);
        assert!(e.terminated);
        assert_eq!(eval_finite(&kk, &e.digits).unwrap(), q(2, 3));
    }

    #[test]
    fn eval_finite_examples() {
        assert!((eval_finite(&k(2.0), &[1]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let kq = |n, d| KParameter::new(q(n, d)).unwrap();
        assert_eq!(eval_finite(&kq(1, 1), &[1, 1]).unwrap(), q(2, 5));
        assert_eq!(eval_finite(&kq(1, 2), &[1, 2]).unwrap(), q(5, 17));
        assert!(matches!(eval_finite(&k(1.0), &[]), Err(Error::EmptyDigits)));
    }

    #[test]
    fn convergent_examples() {
        let one = KParameter::new(q(1, 1)).unwrap();
        let s0 = ConvergentState::initial(&one);
        let s1 = convergent_step(&s0, 1, &one);
        let s2 = convergent_step(&s1, 1, &one);
        assert_eq!((s1.p_cur.clone(), s1.q_cur.clone()), (q(1, 1), q(2, 1)));
        assert_eq!((s2.p_cur.clone(), s2.q_cur.clone()), (q(2, 1), q(5, 1)));
        assert_eq!(s2.convergent(), eval_finite(&one, &[1, 1]).unwrap());

        let half = KParameter::new(q(1, 2)).unwrap();
        let s1 = ConvergentState::initial(&half).step(1, &half);
        assert_eq!(s1.determinant(), q(-1, 2));
        let s2 = s1.step(2, &half);
        assert_eq!((s2.p_cur.clone(), s2.q_cur.clone()), (q(5, 4), q(17, 4)));
        assert_eq!(s2.convergent(), q(5, 17));
    }

    #[test]
    fn future_examples() {
        let g = golden();
        assert!((future(&k(1.0), &g, 7, &P).unwrap() - g).abs() < 1e-9);
        assert!((future(&k(0.5), &0.3, 2, &P).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(
            future(&k(2.0), &(2.0 / 3.0), 1, &P),
            Err(Error::OrbitEnded {
                ended_at: 1,
                requested: 1
            })
        ));
    }

    #[test]
    fn past_examples() {
        let one = KParameter::new(q(1, 1)).unwrap();
        assert_eq!(past_direct(&one, &[0, 5], 1).unwrap(), q(-1, 1));
        assert_eq!(past_direct(&one, &[0, 0], 2).unwrap(), q(-2, 1));
        assert_eq!(past_direct(&one, &[0, 0, 0], 3).unwrap(), q(-3, 2));
        assert_eq!(past_step(&one, &q(-1, 1), 0), q(-2, 1));
        assert_eq!(past_step(&one, &q(-2, 1), 0), q(-3, 2));
        assert!(matches!(
            past_direct(&one, &[0], 2),
            Err(Error::TooFewDigits { .. })
        ));

        let mut y = -1.0;
        for _ in 0..60 {
            y = past_step(&k(1.0), &y, 0);
        }
        assert!((y + 1.0 + golden()).abs() < 1e-10);
    }

    #[test]
    fn orbit_tracks_all_recurrences() {
        let kk = k(0.5);
        let steps: Vec<_> = Orbit::new(&kk, &0.3, &P)
            .unwrap()
            .take(3)
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(
            steps.iter().map(|s| s.digit).collect::<Vec<_>>(),
            vec![1, 2, 0]
        );
        assert_eq!(steps[0].y, -1.5);
        assert!((steps[1].x - 0.5).abs() < 1e-12);
        assert!((steps[1].convergents.convergent() - 5.0 / 17.0).abs() < 1e-15);

        let ended: Vec<_> = Orbit::new(&k(2.0), &(2.0 / 3.0), &P).unwrap().collect();
        assert_eq!(ended.len(), 1);
        assert!(ended[0].as_ref().unwrap().terminal);
    }
}
