//! Approximation coefficients, dynamic pairs and Jager pairs.
//!
//! The approximation coefficient at index `n` is
//!
//! ```text
//! theta_n = |x0 - p_n/q_n| * Q_n^2,    Q_n = q_n / k^((n+1)/2)
//! ```
//!
//! `p_n/q_n` is the convergent from [`crate::cf`]. The rescaled
//! denominator `Q_n` is the normalisation under which
//! `psi_k(x_n, y_n) = (theta_{n-1}, theta_n)` holds for every `k`, which
//! gives `theta_0 = x0 / k`. For `k = 1` the two scalings coincide.
//!
//! `theta` is always computed from its definition and never through psi.
//! The psi identity is what [`correspondence_residual`] measures.

use serde::Serialize;

use crate::cf::{ConvergentState, Digit, KParameter, Orbit};
use crate::error::{Error, Result};
use crate::geometry::{psi, Point2};
use crate::scalar::{
    BigFloat, Number, PrecisionMode, Real, TolerancePolicy, DEFAULT_EXTENDED_BITS,
};

/// Extra mantissa bits kept above the estimated loss from cancellation
/// and orbit stretching.
pub const GUARD_BITS: u32 = 64;

/// Error bound a hardware-float trace must certify before it is accepted.
pub const CERTIFIED_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationCoefficient<R> {
    pub n: usize,
    pub theta: R,
}

/// `(x_n, y_n)`: future and past of the orbit at time `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicPair<R> {
    pub n: usize,
    pub x: R,
    pub y: R,
}

/// `(u, v) = (theta_{n-1}, theta_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JagerPoint<R> {
    pub n: usize,
    pub u: R,
    pub v: R,
}

impl<R: Real> DynamicPair<R> {
    pub fn point(&self) -> Point2<R> {
        Point2::new(self.x.clone(), self.y.clone())
    }
}

impl<R: Real> JagerPoint<R> {
    pub fn point(&self) -> Point2<R> {
        Point2::new(self.u.clone(), self.v.clone())
    }
}

/// `|x0 q - p| q / k^(n+1)`; `kpow` carries `k^(n+1)`.
fn scaled_theta<R: Real>(x0: &R, p: &R, q: &R, kpow: &R) -> R {
    (x0.clone() * q.clone() - p.clone()).abs() * q.clone() / kpow.clone()
}

fn theta_zero<R: Real>(k: &KParameter<R>, x0: &R) -> R {
    x0.clone() / k.value().clone()
}

/// Runs the orbit to step `n`, failing if it ended before `n`.
fn orbit_to<R: Real>(
    k: &KParameter<R>,
    x0: &R,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<crate::cf::OrbitStep<R>> {
    let mut last = None;
    for step in Orbit::new(k, x0, policy)? {
        let step = step?;
        let (idx, terminal) = (step.n, step.terminal);
        last = Some(step);
        if idx == n {
            break;
        }
        if terminal {
            return Err(Error::OrbitEnded {
                ended_at: idx,
                requested: n,
            });
        }
    }
    last.ok_or(Error::InvalidConfig("orbit produced no steps".into()))
}

fn thetas_at<R: Real>(k: &KParameter<R>, x0: &R, step: &crate::cf::OrbitStep<R>) -> (R, R) {
    let c: &ConvergentState<R> = &step.convergents;
    let kv = k.value();
    let mut kpow = kv.clone();
    for _ in 0..step.n.saturating_sub(1) {
        kpow = kpow * kv.clone();
    }
    let prev = scaled_theta(x0, &c.p_prev, &c.q_prev, &kpow);
    let cur = if step.terminal {
        x0.zero_like()
    } else {
        scaled_theta(x0, &c.p_cur, &c.q_cur, &(kpow * kv.clone()))
    };
    (prev, cur)
}

/// `theta_n(x0)`. Exactly zero at the terminal index of a finite expansion.
pub fn theta<R: Real>(
    k: &KParameter<R>,
    x0: &R,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<ApproximationCoefficient<R>> {
    if n == 0 {
        crate::cf::Orbit::new(k, x0, policy)?;
        return Ok(ApproximationCoefficient {
            n,
            theta: theta_zero(k, x0),
        });
    }
    let step = orbit_to(k, x0, n, policy)?;
    let (_, cur) = thetas_at(k, x0, &step);
    Ok(ApproximationCoefficient { n, theta: cur })
}

#[derive(Clone, Debug)]
pub struct ThetaSequence<R> {
    /// `theta_0 ..= theta_m`
    pub coefficients: Vec<ApproximationCoefficient<R>>,
    pub terminated: bool,
}

/// `theta_0, ..., theta_{n_max}`, or fewer if the expansion terminates.
pub fn theta_sequence<R: Real>(
    k: &KParameter<R>,
    x0: &R,
    n_max: usize,
    policy: &TolerancePolicy,
) -> Result<ThetaSequence<R>> {
    let mut coefficients = vec![ApproximationCoefficient {
        n: 0,
        theta: theta_zero(k, x0),
    }];
    let kv = k.value().clone();
    let mut kpow = kv.clone();
    let mut terminated = false;
    for step in Orbit::new(k, x0, policy)?.take(n_max) {
        let step = step?;
        kpow = kpow * kv.clone();
        let c = &step.convergents;
        let theta = if step.terminal {
            x0.zero_like()
        } else {
            scaled_theta(x0, &c.p_cur, &c.q_cur, &kpow)
        };
        coefficients.push(ApproximationCoefficient { n: step.n, theta });
        terminated = step.terminal;
    }
    Ok(ThetaSequence {
        coefficients,
        terminated,
    })
}

/// `(x_n, y_n)` for `n >= 1`. The terminal step is allowed and has `x_n = 0`.
pub fn dynamic_pair<R: Real>(
    k: &KParameter<R>,
    x0: &R,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<DynamicPair<R>> {
    if n == 0 {
        return Err(Error::InvalidConfig("dynamic pairs start at n = 1".into()));
    }
    let step = orbit_to(k, x0, n, policy)?;
    Ok(DynamicPair {
        n,
        x: step.x,
        y: step.y,
    })
}

/// `(theta_{n-1}, theta_n)` for `n >= 1`.
pub fn jager_point<R: Real>(
    k: &KParameter<R>,
    x0: &R,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<JagerPoint<R>> {
    if n == 0 {
        return Err(Error::InvalidConfig("Jager pairs start at n = 1".into()));
    }
    let step = orbit_to(k, x0, n, policy)?;
    let (u, v) = thetas_at(k, x0, &step);
    Ok(JagerPoint { n, u, v })
}

/// Max-norm distance between `psi_k(x_n, y_n)` and `(theta_{n-1}, theta_n)`.
pub fn correspondence_residual<R: Real>(
    k: &KParameter<R>,
    x0: &R,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<R> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "the correspondence starts at n = 1".into(),
        ));
    }
    let step = orbit_to(k, x0, n, policy)?;
    let (u, v) = thetas_at(k, x0, &step);
    let image = psi(k, &Point2::new(step.x.clone(), step.y.clone()))?;
    Ok(max_norm(&image, &Point2::new(u, v)))
}

fn max_norm<R: Real>(a: &Point2<R>, b: &Point2<R>) -> R {
    let du = (a.first.clone() - b.first.clone()).abs();
    let dv = (a.second.clone() - b.second.clone()).abs();
    if du > dv {
        du
    } else {
        dv
    }
}

/// One row of an orbit trace, rounded to `f64` for reporting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub digit: Digit,
    pub x: f64,
    pub y: f64,
    pub p: f64,
    pub q: f64,
    pub convergent: f64,
    pub theta_prev: f64,
    pub theta: f64,
    pub psi_u: f64,
    pub psi_v: f64,
    pub residual: f64,
    pub terminal: bool,
}

impl TraceRow {
    pub fn jager_point(&self) -> JagerPoint<f64> {
        JagerPoint {
            n: self.n,
            u: self.theta_prev,
            v: self.theta,
        }
    }

    pub fn dynamic_pair(&self) -> DynamicPair<f64> {
        DynamicPair {
            n: self.n,
            x: self.x,
            y: self.y,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitTrace {
    pub theta0: f64,
    pub rows: Vec<TraceRow>,
    pub terminated: bool,
    /// Backend that produced the rows; may be wider than requested.
    pub backend: PrecisionMode,
}

struct GenericTrace {
    theta0: f64,
    rows: Vec<TraceRow>,
    terminated: bool,
    /// Estimated bits lost to cancellation and orbit stretching.
    demand_bits: f64,
}

fn trace_generic<R: Real>(
    k: &KParameter<R>,
    x0: &R,
    n_max: usize,
    policy: &TolerancePolicy,
) -> Result<GenericTrace> {
    let kv = k.value().clone();
    let log2_k = kv.log2_abs().abs();
    let mut kpow = kv.clone();
    let mut theta_prev = theta_zero(k, x0);
    let theta0 = theta_prev.to_f64();
    let mut rows = Vec::with_capacity(n_max);
    let mut terminated = false;
    let mut demand: f64 = 0.0;
    for step in Orbit::new(k, x0, policy)?.take(n_max) {
        let step = step?;
        kpow = kpow * kv.clone();
        let c = &step.convergents;
        let gap = x0.clone() * c.q_cur.clone() - c.p_cur.clone();
        let theta = if step.terminal {
            x0.zero_like()
        } else {
            gap.abs() * c.q_cur.clone() / kpow.clone()
        };
        let stretch = 2.0 * c.q_cur.log2_abs() + (step.n + 1) as f64 * log2_k;
        let cancel = if gap.is_zero() {
            0.0
        } else {
            (x0.clone() * c.q_cur.clone()).log2_abs() - gap.log2_abs()
        };
        demand = demand.max(stretch).max(cancel);
        let image = psi(k, &Point2::new(step.x.clone(), step.y.clone()))?;
        let residual = max_norm(&image, &Point2::new(theta_prev.clone(), theta.clone()));
        rows.push(TraceRow {
            n: step.n,
            digit: step.digit,
            x: step.x.to_f64(),
            y: step.y.to_f64(),
            p: c.p_cur.to_f64(),
            q: c.q_cur.to_f64(),
            convergent: c.convergent().to_f64(),
            theta_prev: theta_prev.to_f64(),
            theta: theta.to_f64(),
            psi_u: image.first.to_f64(),
            psi_v: image.second.to_f64(),
            residual: residual.to_f64(),
            terminal: step.terminal,
        });
        theta_prev = theta;
        terminated = step.terminal;
    }
    Ok(GenericTrace {
        theta0,
        rows,
        terminated,
        demand_bits: demand,
    })
}

/// Evaluates orbits in a chosen precision mode.
///
/// * hardware: runs in `f64` while tracking a forward error bound and
///   falls back to the extended mode once any digit decision or
///   coefficient can no longer be certified to [`CERTIFIED_TOLERANCE`].
/// * extended: starts at the configured width and widens until the
///   estimated loss plus [`GUARD_BITS`] fits.
/// * exact: rational arithmetic throughout. Float inputs are taken at
///   the rational value they encode.
#[derive(Clone, Debug)]
pub struct Evaluator {
    pub mode: PrecisionMode,
    pub policy: TolerancePolicy,
}

impl Evaluator {
    pub fn new(mode: PrecisionMode, policy: TolerancePolicy) -> Self {
        Evaluator { mode, policy }
    }

    pub fn for_mode(mode: PrecisionMode) -> Self {
        Self::new(mode, TolerancePolicy::for_mode(mode))
    }

    pub fn trace(&self, k: &Number, x0: &Number, n_max: usize) -> Result<OrbitTrace> {
        if !k.is_positive() {
            return Err(Error::NonPositiveK(k.to_f64()));
        }
        if !x0.in_unit_interval() {
            return Err(Error::Domain(x0.to_f64(), "(0, 1)"));
        }
        match self.mode {
            PrecisionMode::Hardware => match self.hardware_trace(k, x0, n_max)? {
                Some(t) => Ok(t),
                None => self.extended_trace(k, x0, n_max, DEFAULT_EXTENDED_BITS),
            },
            PrecisionMode::Extended { bits } => self.extended_trace(k, x0, n_max, bits),
            PrecisionMode::Exact => {
                let kr = KParameter::new(k.to_ratio())?;
                let t = trace_generic(&kr, &x0.to_ratio(), n_max, &self.policy)?;
                Ok(OrbitTrace {
                    theta0: t.theta0,
                    rows: t.rows,
                    terminated: t.terminated,
                    backend: PrecisionMode::Exact,
                })
            }
        }
    }

    fn extended_trace(
        &self,
        k: &Number,
        x0: &Number,
        n_max: usize,
        min_bits: u32,
    ) -> Result<OrbitTrace> {
        // a cheap f64 pass predicts how much the orbit will stretch
        let estimate = KParameter::f64(k.to_f64())
            .and_then(|kf| trace_generic(&kf, &x0.to_f64(), n_max, &self.policy))
            .map(|t| t.demand_bits)
            .unwrap_or(0.0);
        let mut bits = min_bits.max(round_bits(estimate + 16.0));
        for _ in 0..8 {
            let kb = KParameter::new(k.to_real::<BigFloat>(&bits))?;
            let xb: BigFloat = x0.to_real(&bits);
            let t = trace_generic(&kb, &xb, n_max, &self.policy)?;
            let needed = round_bits(t.demand_bits);
            if needed <= bits {
                return Ok(OrbitTrace {
                    theta0: t.theta0,
                    rows: t.rows,
                    terminated: t.terminated,
                    backend: PrecisionMode::Extended { bits },
                });
            }
            bits = needed;
        }
        Err(Error::InvalidConfig(format!(
            "extended precision did not settle below {bits} bits"
        )))
    }

    /// `None` when the f64 result cannot be certified.
    fn hardware_trace(&self, k: &Number, x0: &Number, n_max: usize) -> Result<Option<OrbitTrace>> {
        let eps = f64::EPSILON;
        let kf = k.to_f64();
        let x0f = x0.to_f64();
        let kp = KParameter::f64(kf)?;
        let dk = if k.is_f64_exact() { 0.0 } else { eps * kf };
        let err_x0 = if x0.is_f64_exact() { 0.0 } else { eps * x0f };
        let snap = self.policy.eps_snap;

        let mut x = x0f;
        let mut err_x = err_x0;
        let mut y = 0.0;
        let mut err_y = 0.0;
        let mut conv = ConvergentState::initial(&kp);
        let mut rel_pq = 0.0;
        let mut kpow = kf;
        let mut theta_prev = x0f / kf;
        let mut err_theta_prev = theta_prev * 2.0 * eps + err_x0 / kf + dk * x0f / (kf * kf);
        let mut rows = Vec::with_capacity(n_max);
        let mut terminated = false;

        for n in 1..=n_max {
            let t = kf / x - kf;
            let err_t = kf / (x * x) * err_x + dk * (1.0 / x + 1.0) + 3.0 * eps * (kf / x);
            if err_t >= decision_margin(t, snap) {
                return Ok(None);
            }
            let (a, next) = crate::cf::gauss_step(&kp, &x, &self.policy)?;
            let terminal = next == 0.0;

            if n == 1 {
                y = -(kf + a as f64);
                err_y = dk + eps * y.abs();
            } else {
                let ny = crate::cf::past_step(&kp, &y, a);
                err_y = kf / (y * y) * err_y + dk * (1.0 / y.abs() + 1.0) + 3.0 * eps * ny.abs();
                y = ny;
            }

            conv = conv.step(a, &kp);
            rel_pq += 3.0 * eps + dk / kf;
            kpow *= kf;
            let (p, q) = (conv.p_cur, conv.q_cur);
            let gap = x0f * q - p;
            let (theta, err_theta) = if terminal {
                (0.0, 0.0)
            } else {
                let err_gap = q * (err_x0 + 2.0 * x0f * rel_pq + eps) + eps * gap.abs();
                let theta = gap.abs() * q / kpow;
                let err = err_gap * q / kpow
                    + theta * (rel_pq + (n + 1) as f64 * (dk / kf + eps) + 3.0 * eps);
                // cancellation of more than half the mantissa forces escalation
                if gap != 0.0 && (x0f * q / gap).abs().log2() > 26.0 {
                    return Ok(None);
                }
                (theta, err)
            };
            if err_theta > CERTIFIED_TOLERANCE
                || err_x > CERTIFIED_TOLERANCE
                || err_y > CERTIFIED_TOLERANCE
            {
                return Ok(None);
            }

            let image = psi(&kp, &Point2::new(next, y))?;
            let residual = (image.first - theta_prev)
                .abs()
                .max((image.second - theta).abs());
            rows.push(TraceRow {
                n,
                digit: a,
                x: next,
                y,
                p,
                q,
                convergent: p / q,
                theta_prev,
                theta,
                psi_u: image.first,
                psi_v: image.second,
                residual,
                terminal,
            });
            theta_prev = theta;
            err_theta_prev = err_theta;
            if terminal {
                terminated = true;
                break;
            }
            err_x = err_t + eps * next;
            x = next;
        }
        let _ = err_theta_prev;
        Ok(Some(OrbitTrace {
            theta0: x0f / kf,
            rows,
            terminated,
            backend: PrecisionMode::Hardware,
        }))
    }
}

/// Distance from `t` to the nearest point where snapped digit extraction
/// changes its decision (digit or termination).
fn decision_margin(t: f64, eps_snap: f64) -> f64 {
    let m = t.round();
    let w = eps_snap * t.abs().max(1.0);
    [m - 1.0, m, m + 1.0]
        .iter()
        .flat_map(|&c| [c - w, c + eps_snap])
        .map(|edge| (t - edge).abs())
        .fold(f64::INFINITY, f64::min)
}

fn round_bits(demand: f64) -> u32 {
    let raw = demand.max(0.0).ceil() as u32 + GUARD_BITS;
    raw.div_ceil(64) * 64
}

/// `(sqrt(5) - 1) / 2` at `bits` of precision.
pub fn golden_conjugate(bits: u32) -> BigFloat {
    let five = BigFloat::from_u64(5, bits);
    let one = BigFloat::from_u64(1, bits);
    let two = BigFloat::from_u64(2, bits);
    (five.sqrt() - one) / two
}

/// `sqrt(2) - 1` at `bits` of precision.
pub fn silver_conjugate(bits: u32) -> BigFloat {
    BigFloat::from_u64(2, bits).sqrt() - BigFloat::from_u64(1, bits)
}
