//! Seeded Monte Carlo checks of the correspondence and region statements.
//!
//! Every random draw comes from a ChaCha8 stream keyed by
//! `(seed, purpose, sample index)`. A result therefore depends only on the
//! configuration, never on how the work is split across threads. Work runs
//! on a rayon pool whose size can be capped with `JAGER_LAB_THREADS`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{ConvergentState, Digit, KParameter};
use crate::error::{Error, Result};
use crate::geometry::{
    corollary_quad, gamma_contains, hyperbola_arc, pa_sharp_quad, pa_sharp_quad_as_stated,
    piecewise_membership, psi, psi_preimage, reflect, GammaMode, LabeledCurve, Membership,
    P0Region, Point2, QuadRegion, Strip, DEFAULT_CURVE_POINTS,
};
use crate::jager::{correspondence_residual, golden_conjugate, DynamicPair, Evaluator, JagerPoint};
use crate::scalar::{BigFloat, Number, PrecisionMode, TolerancePolicy};

/// A correspondence residual at or above this is a failure.
pub const CORRESPONDENCE_TOLERANCE: f64 = 1e-8;
/// Residual bound for the pinned golden-ratio orbit.
pub const GOLDEN_TOLERANCE: f64 = 1e-9;
/// Index of the pinned golden-ratio orbit.
pub const GOLDEN_INDEX: usize = 15;
pub const DEFAULT_K_LIST: [f64; 6] = [0.3, 0.5, 0.9, 1.0, 1.5, 2.7];
pub const WITNESS_K_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const WITNESS_MIN_SEPARATION: f64 = 0.1;
pub const WITNESS_MAX_GAP: f64 = 1e-12;
/// Environment variable that caps the worker count.
pub const THREADS_ENV: &str = "JAGER_LAB_THREADS";
/// Highest digit whose image quadrangle is drawn in plot data.
pub const PLOT_MAX_DIGIT: Digit = 12;
/// Draws per reverse sample before rejection sampling gives up.
const MAX_REJECTION_DRAWS: usize = 100_000;

const SALT_X0: u64 = 0;
const SALT_FORWARD: u64 = 1;
const SALT_REVERSE: u64 = 2;
const SALT_WITNESS: u64 = 3;
const SALT_ORACLE: u64 = 4;
const SALT_IDENTITIES: u64 = 5;
const SALT_STATED: u64 = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub k_list: Vec<f64>,
    /// Orbits per `k`.
    pub samples: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    pub mode: PrecisionMode,
    pub policy: TolerancePolicy,
    /// Spread `x0` over this many first-digit strata instead of uniformly.
    pub strata: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mode = PrecisionMode::extended();
        ExperimentConfig {
            k_list: DEFAULT_K_LIST.to_vec(),
            samples: 10_000,
            n_min: 1,
            n_max: 30,
            seed: 42,
            mode,
            policy: TolerancePolicy::for_mode(mode),
            strata: None,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= n_min <= n_max, got {}..{}",
                self.n_min, self.n_max
            )));
        }
        if self.k_list.is_empty() {
            return Err(Error::InvalidConfig("k list is empty".into()));
        }
        for &k in &self.k_list {
            KParameter::f64(k)?;
        }
        if self.strata == Some(0) {
            return Err(Error::InvalidConfig("strata must be at least 1".into()));
        }
        self.policy.validate()
    }

    pub fn evaluator(&self) -> Evaluator {
        Evaluator::new(self.mode, self.policy)
    }
}

/// The random stream for one sample of one purpose.
fn stream(seed: u64, salt: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(index);
    rng
}

/// Uniform draw from the open interval `(0, 1)`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Starting point of orbit `index`.
///
/// Uniform in `(0, 1)`. With `strata = Some(m)` it is instead uniform in the
/// first-digit cylinder `(k/(k+a+1), k/(k+a))` for `a = index mod m`.
pub fn sample_x0(seed: u64, k: f64, index: u64, strata: Option<u64>) -> f64 {
    let u = open_unit(&mut stream(seed, SALT_X0, index));
    match strata {
        None => u,
        Some(m) => {
            let a = (index % m.max(1)) as f64;
            let hi = (k / (k + a)).min(1.0);
            let lo = k / (k + a + 1.0);
            hi - u * (hi - lo)
        }
    }
}

/// Runs `f` on a pool sized by `JAGER_LAB_THREADS` (default: all cores).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// One Jager pair with the dynamic pair it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JagerSample {
    pub seed_index: u64,
    pub x0: f64,
    pub n: usize,
    pub digit: Digit,
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub residual: f64,
}

impl JagerSample {
    pub fn jager_point(&self) -> JagerPoint<f64> {
        JagerPoint {
            n: self.n,
            u: self.u,
            v: self.v,
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

/// All sampled pairs for one `k`, in sample-index order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSet {
    pub k: f64,
    pub samples: Vec<JagerSample>,
    pub orbits: usize,
    /// Orbits whose expansion terminated within `n_max`.
    pub terminated: usize,
    /// Orbits that ran in a wider backend than requested.
    pub escalated: usize,
    pub max_bits: u32,
}

struct OrbitSamples {
    rows: Vec<JagerSample>,
    terminated: bool,
    escalated: bool,
    bits: u32,
}

fn backend_bits(mode: PrecisionMode) -> u32 {
    match mode {
        PrecisionMode::Hardware => 53,
        PrecisionMode::Extended { bits } => bits,
        PrecisionMode::Exact => 0,
    }
}

/// Samples Jager pairs for one `k`.
pub fn sample_set(cfg: &ExperimentConfig, k: f64) -> Result<SampleSet> {
    cfg.validate()?;
    KParameter::f64(k)?;
    let ev = cfg.evaluator();
    let per_orbit: Vec<Result<OrbitSamples>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let x0 = sample_x0(cfg.seed, k, i, cfg.strata);
            let trace = ev.trace(&Number::Float(k), &Number::Float(x0), cfg.n_max)?;
            let escalated =
                std::mem::discriminant(&trace.backend) != std::mem::discriminant(&cfg.mode);
            let rows = trace
                .rows
                .iter()
                .filter(|r| r.n >= cfg.n_min)
                .map(|r| JagerSample {
                    seed_index: i,
                    x0,
                    n: r.n,
                    digit: r.digit,
                    x: r.x,
                    y: r.y,
                    u: r.theta_prev,
                    v: r.theta,
                    residual: r.residual,
                })
                .collect();
            Ok(OrbitSamples {
                rows,
                terminated: trace.terminated,
                escalated,
                bits: backend_bits(trace.backend),
            })
        })
        .collect();
    let mut set = SampleSet {
        k,
        samples: Vec::new(),
        orbits: cfg.samples,
        terminated: 0,
        escalated: 0,
        max_bits: 0,
    };
    for orbit in per_orbit {
        let orbit = orbit?;
        set.terminated += orbit.terminated as usize;
        set.escalated += orbit.escalated as usize;
        set.max_bits = set.max_bits.max(orbit.bits);
        set.samples.extend(orbit.rows);
    }
    Ok(set)
}

/// Samples Jager pairs for every `k` of the configuration.
pub fn sample_jager_pairs(cfg: &ExperimentConfig) -> Result<Vec<SampleSet>> {
    with_pool(|| cfg.k_list.iter().map(|&k| sample_set(cfg, k)).collect())?
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub k: Option<f64>,
    pub samples: u64,
    pub failures: u64,
    pub worst_residual: f64,
    pub boundary_skips: u64,
    /// Counts and extremes that are reported but never gate the check.
    pub info: BTreeMap<String, f64>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, k: Option<f64>) -> Self {
        CheckRecord {
            name: name.into(),
            k,
            samples: 0,
            failures: 0,
            worst_residual: 0.0,
            boundary_skips: 0,
            info: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn note(&mut self, key: &str, value: f64) {
        self.info.insert(key.to_string(), value);
    }

    fn worst(&mut self, r: f64) {
        if r > self.worst_residual {
            self.worst_residual = r;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(seed: u64) -> Self {
        VerificationReport {
            seed,
            pass: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.pass &= record.passed();
        self.checks.push(record);
    }

    pub fn merge(mut self, other: VerificationReport) -> Self {
        for record in other.checks {
            self.push(record);
        }
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Residuals of the psi correspondence over a sample set.
pub fn correspondence_record(set: &SampleSet) -> CheckRecord {
    let mut rec = CheckRecord::new("correspondence", Some(set.k));
    for s in &set.samples {
        rec.samples += 1;
        rec.worst(s.residual);
        if !(s.residual < CORRESPONDENCE_TOLERANCE) {
            rec.failures += 1;
        }
    }
    rec.note("orbits", set.orbits as f64);
    rec.note("terminated", set.terminated as f64);
    rec.note("escalated", set.escalated as f64);
    rec.note("max_bits", set.max_bits as f64);
    rec
}

/// The golden-ratio orbit for `k = 1` at index 15.
pub fn golden_record() -> Result<CheckRecord> {
    let bits = 256;
    let k = KParameter::new(BigFloat::from_u64(1, bits))?;
    let r = correspondence_residual(
        &k,
        &golden_conjugate(bits),
        GOLDEN_INDEX,
        &TolerancePolicy::extended(),
    )?
    .to_f64();
    let mut rec = CheckRecord::new("correspondence_golden", Some(1.0));
    rec.samples = 1;
    rec.worst_residual = r;
    rec.failures = (!(r < GOLDEN_TOLERANCE)) as u64;
    rec.note("n", GOLDEN_INDEX as f64);
    Ok(rec)
}

/// `4 k u v <= 1 + eps` for every sampled pair.
pub fn hyperbola_record(set: &SampleSet, eps: f64) -> CheckRecord {
    let mut rec = CheckRecord::new("hyperbola", Some(set.k));
    let mut max_product: f64 = 0.0;
    for s in &set.samples {
        rec.samples += 1;
        let prod = 4.0 * set.k * s.u * s.v;
        max_product = max_product.max(prod);
        if !(prod <= 1.0 + eps) {
            rec.failures += 1;
            rec.worst(prod - 1.0);
        }
    }
    rec.note("max_4kuv", max_product);
    rec
}

/// Each dynamic pair lies in the closed strip of its digit.
///
/// Pairs on the lower edge `y = -k - a - 1` are legitimate (they follow a
/// zero digit) and are counted separately.
pub fn strip_record(set: &SampleSet, eps: f64) -> Result<CheckRecord> {
    let k = KParameter::f64(set.k)?;
    let mut rec = CheckRecord::new("strip_membership", Some(set.k));
    let mut lower_edge = 0u64;
    for s in &set.samples {
        rec.samples += 1;
        let strip = Strip::new(k.clone(), s.digit);
        let p = Point2::new(s.x, s.y);
        let tol = eps.max(1e-15) * s.y.abs().max(1.0);
        if !strip.closure_contains(&p, tol) {
            rec.failures += 1;
        } else if !strip.contains(&p) && s.x > 0.0 {
            lower_edge += 1;
        }
    }
    rec.note("on_lower_edge", lower_edge as f64);
    Ok(rec)
}

/// Classifies every sampled pair against the constructive space of Jager
/// pairs. A pair outside it by more than `eps` is a failure. The
/// closed-form description and the piecewise description are tallied
/// alongside for information.
pub fn containment_record(set: &SampleSet, eps: f64) -> Result<CheckRecord> {
    let k = KParameter::f64(set.k)?;
    let mut rec = CheckRecord::new("containment", Some(set.k));
    let mut literal = [0u64; 3];
    let mut only_constructive = 0u64;
    let mut only_literal = 0u64;
    let mut piecewise_disagree = 0u64;
    let mut probe: f64 = 0.0;
    let tally = set
        .samples
        .par_iter()
        .map(|s| {
            let q = Point2::new(s.u, s.v);
            let c = gamma_contains(&k, &q, GammaMode::ConstructiveUnion, eps);
            let l = gamma_contains(&k, &q, GammaMode::CorollaryLiteral, eps);
            let p = piecewise_membership(&k, &q, eps);
            (c, l, p, q)
        })
        .collect::<Vec<_>>();
    for (c, l, p, q) in tally {
        rec.samples += 1;
        match c {
            Membership::Outside => rec.failures += 1,
            Membership::Boundary => rec.boundary_skips += 1,
            Membership::Inside => {}
        }
        literal[l as usize] += 1;
        let decided = |m: Membership| m != Membership::Boundary;
        if c == Membership::Inside && l == Membership::Outside {
            only_constructive += 1;
        }
        if c == Membership::Outside && l == Membership::Inside {
            only_literal += 1;
        }
        if decided(c) && decided(p) && c != p {
            piecewise_disagree += 1;
        }
        if q.first < 0.05 {
            probe = probe.max(q.second);
        }
    }
    rec.note(
        "literal_inside",
        literal[Membership::Inside as usize] as f64,
    );
    rec.note(
        "literal_outside",
        literal[Membership::Outside as usize] as f64,
    );
    rec.note(
        "literal_boundary",
        literal[Membership::Boundary as usize] as f64,
    );
    rec.note(
        "inside_constructive_outside_literal",
        only_constructive as f64,
    );
    rec.note("outside_constructive_inside_literal", only_literal as f64);
    rec.note("piecewise_disagreements", piecewise_disagree as f64);
    rec.note("max_v_for_u_below_0.05", probe);
    Ok(rec)
}

/// The region predicted for `psi_k(P_(k,a))`.
#[derive(Clone, Debug)]
pub enum PredictedRegion {
    Quad {
        quad: QuadRegion,
        as_stated: QuadRegion,
    },
    P0(P0Region),
}

impl PredictedRegion {
    pub fn for_strip(k: &KParameter<f64>, a: Digit) -> Result<Self> {
        if a == 0 && k.is_small() {
            Ok(PredictedRegion::P0(P0Region::new(k.clone())?))
        } else {
            Ok(PredictedRegion::Quad {
                quad: pa_sharp_quad(k, a)?,
                as_stated: pa_sharp_quad_as_stated(k, a)?,
            })
        }
    }

    pub fn classify(&self, q: &Point2, eps: f64) -> Membership {
        match self {
            PredictedRegion::Quad { quad, .. } => quad.classify(q, eps),
            PredictedRegion::P0(r) => r.classify(q, eps),
        }
    }

    pub fn classify_as_stated(&self, q: &Point2, eps: f64) -> Membership {
        match self {
            PredictedRegion::Quad { as_stated, .. } => as_stated.classify(q, eps),
            PredictedRegion::P0(r) => r.classify_as_stated(q, eps),
        }
    }

    /// `(u_min, u_max, v_max)` of a box holding the region.
    fn bounding_box(&self, k: f64, stated: bool) -> (f64, f64, f64) {
        match self {
            PredictedRegion::Quad { quad, as_stated } => {
                if stated { as_stated } else { quad }.bounding_box()
            }
            PredictedRegion::P0(_) => (0.0, 1.0 / k, 1.0 / k),
        }
    }
}

/// Rejection-samples a point with `accept`, from the stream of `index`.
fn rejection_sample(
    rng: &mut ChaCha8Rng,
    bbox: (f64, f64, f64),
    accept: impl Fn(&Point2) -> bool,
) -> Option<Point2> {
    let (u0, u1, v1) = bbox;
    for _ in 0..MAX_REJECTION_DRAWS {
        let q = Point2::new(u0 + (u1 - u0) * open_unit(rng), v1 * open_unit(rng));
        if accept(&q) {
            return Some(q);
        }
    }
    None
}

fn has_root_in_strip(k: &KParameter<f64>, strip: &Strip, q: &Point2, eps: f64) -> bool {
    match psi_preimage(k, q, f64::EPSILON * 16.0) {
        Ok(pre) => pre.roots().iter().any(|p| strip.closure_contains(p, eps)),
        Err(_) => false,
    }
}

/// Two-sided check of `psi_k(P_(k,a))` against its predicted region.
///
/// Forward: `samples` uniform points of the strip map into the region.
/// Reverse: `samples` points rejection-sampled from the region have a
/// preimage in the strip. Both directions are also run against the
/// region as literally stated, and those counts go into `info`.
pub fn region_check(
    k: &KParameter<f64>,
    a: Digit,
    samples: usize,
    seed: u64,
    eps: f64,
) -> Result<CheckRecord> {
    let kf = *k.value();
    let region = PredictedRegion::for_strip(k, a)?;
    let strip = Strip::new(k.clone(), a);
    let salt = |base: u64| base ^ (a << 8);
    let name = match region {
        PredictedRegion::P0(_) => "region_p0".to_string(),
        PredictedRegion::Quad { .. } => format!("region_pa_{a}"),
    };
    let mut rec = CheckRecord::new(name, Some(kf));

    // (failure, boundary, stated_outside)
    let forward: Vec<(bool, bool, bool)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, salt(SALT_FORWARD), i);
            let p = strip.sample(open_unit(&mut rng), rng.random::<f64>());
            match psi(k, &p) {
                Ok(q) => {
                    let m = region.classify(&q, eps);
                    let stated = region.classify_as_stated(&q, eps) == Membership::Outside;
                    (m == Membership::Outside, m == Membership::Boundary, stated)
                }
                Err(_) => (true, false, false),
            }
        })
        .collect();
    // (failure, exhausted)
    let reverse: Vec<(bool, bool)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, salt(SALT_REVERSE), i);
            let pick = rejection_sample(&mut rng, region.bounding_box(kf, false), |q| {
                region.classify(q, eps) == Membership::Inside
            });
            match pick {
                Some(q) => (!has_root_in_strip(k, &strip, &q, eps), false),
                None => (true, true),
            }
        })
        .collect();
    let stated_overhang: usize = (0..samples as u64)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = stream(seed, salt(SALT_STATED), i);
            let pick = rejection_sample(&mut rng, region.bounding_box(kf, true), |q| {
                region.classify_as_stated(q, eps) == Membership::Inside
            });
            pick.is_some_and(|q| !has_root_in_strip(k, &strip, &q, eps))
        })
        .count();

    let mut forward_fail = 0u64;
    let mut stated_outside = 0u64;
    for (fail, skip, stated) in forward {
        rec.samples += 1;
        forward_fail += fail as u64;
        rec.boundary_skips += skip as u64;
        stated_outside += stated as u64;
    }
    let mut reverse_fail = 0u64;
    let mut exhausted = 0u64;
    for (fail, ex) in reverse {
        rec.samples += 1;
        reverse_fail += fail as u64;
        exhausted += ex as u64;
    }
    rec.failures = forward_fail + reverse_fail;
    rec.note("a", a as f64);
    rec.note("forward_failures", forward_fail as f64);
    rec.note("reverse_failures", reverse_fail as f64);
    rec.note("reverse_rejection_exhausted", exhausted as f64);
    rec.note("as_stated_forward_outside", stated_outside as f64);
    rec.note("as_stated_reverse_without_preimage", stated_overhang as f64);
    Ok(rec)
}

/// [`region_check`] for the strips `a = 0, 1, 2`.
pub fn region_two_sided_check(
    k: &KParameter<f64>,
    samples: usize,
    seed: u64,
    eps: f64,
) -> Result<Vec<CheckRecord>> {
    (0..3)
        .map(|a| region_check(k, a, samples, seed, eps))
        .collect()
}

/// Every sampled point of the five boundary curves classifies as boundary.
pub fn p0_curves_record(k: &KParameter<f64>, points: usize, eps: f64) -> Result<CheckRecord> {
    let region = P0Region::new(k.clone())?;
    let mut rec = CheckRecord::new("p0_boundary_curves", Some(*k.value()));
    for curve in region.boundary_curves(points) {
        for p in &curve.points {
            rec.samples += 1;
            if region.classify(p, eps) != Membership::Boundary {
                rec.failures += 1;
            }
            rec.worst(region.boundary_distance(p));
        }
    }
    Ok(rec)
}

/// Two points of `P_(k,0)` related by the fold, with a common image.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub k: f64,
    pub p1: Point2,
    pub p2: Point2,
    pub image: Point2,
    /// Max-norm distance between the two images.
    pub image_gap: f64,
    /// Euclidean distance between `p1` and `p2`.
    pub separation: f64,
}

fn refuse_large_k(k: &KParameter<f64>) -> Result<()> {
    if !k.is_small() {
        return Err(Error::NoWitness(format!(
            "for k = {} >= 1 every point of the dynamic domain has x + y < 0, \
             so psi is injective there",
            k.value()
        )));
    }
    Ok(())
}

/// Validates `p1` and its reflection as a witness.
pub fn witness_from_point(k: &KParameter<f64>, p1: Point2) -> Result<Witness> {
    refuse_large_k(k)?;
    let p2 = reflect(&p1);
    let strip = Strip::new(k.clone(), 0);
    if !strip.contains(&p1) || !strip.contains(&p2) {
        return Err(Error::NoWitness(format!(
            "{p1:?} and its reflection are not both in P_(k,0)"
        )));
    }
    let (i1, i2) = (psi(k, &p1)?, psi(k, &p2)?);
    let image_gap = (i1.first - i2.first)
        .abs()
        .max((i1.second - i2.second).abs());
    let separation = p1.distance(&p2);
    if !(image_gap < WITNESS_MAX_GAP) || !(separation > WITNESS_MIN_SEPARATION) {
        return Err(Error::NoWitness(format!(
            "gap {image_gap:e}, separation {separation}"
        )));
    }
    Ok(Witness {
        k: *k.value(),
        p1,
        p2,
        image: i1,
        image_gap,
        separation,
    })
}

/// Draws a witness for `k < 1`.
///
/// Picks `k < x' < x < 1` with `x - x' > 0.1/sqrt(2)`. Then `p1 = (x, -x')` and
/// `p2 = (x', -x)` both lie in `P_(k,0)` and are `0.1` apart. No such pair
/// fits once `1 - k <= 0.1/sqrt(2)`.
pub fn injectivity_witness(k: &KParameter<f64>, seed: u64) -> Result<Witness> {
    refuse_large_k(k)?;
    let kf = *k.value();
    let gap = WITNESS_MIN_SEPARATION / std::f64::consts::SQRT_2;
    let room = 1.0 - kf - gap;
    if room <= 4.0 * f64::EPSILON {
        return Err(Error::NoWitness(format!(
            "P_(k,0) is too thin for k = {kf} to hold points {WITNESS_MIN_SEPARATION} apart"
        )));
    }
    let mut rng = stream(seed, SALT_WITNESS, kf.to_bits());
    let x_inner = kf + room * (0.25 + 0.5 * open_unit(&mut rng));
    let x_outer = x_inner + gap + (1.0 - x_inner - gap) * (0.5 + 0.5 * open_unit(&mut rng));
    witness_from_point(k, Point2::new(x_outer, -x_inner))
}

/// Witnesses for `k = 0.1, ..., 0.9`, plus refusals for `k = 1` and `k = 2`.
pub fn witness_grid_record(seed: u64) -> CheckRecord {
    let mut rec = CheckRecord::new("witness_grid", None);
    let mut min_sep = f64::INFINITY;
    for kv in WITNESS_K_GRID {
        rec.samples += 1;
        match KParameter::f64(kv).and_then(|k| injectivity_witness(&k, seed)) {
            Ok(w) => {
                rec.worst(w.image_gap);
                min_sep = min_sep.min(w.separation);
            }
            Err(_) => rec.failures += 1,
        }
    }
    let mut refused = 0u64;
    for kv in [1.0, 2.0] {
        rec.samples += 1;
        match injectivity_witness(&KParameter::f64(kv).expect("positive"), seed) {
            Err(Error::NoWitness(_)) => refused += 1,
            _ => rec.failures += 1,
        }
    }
    rec.note("min_separation", min_sep);
    rec.note("refusals", refused as f64);
    rec
}

fn small_ratio(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> BigRational {
    let den = rng.random_range(1..=max_den);
    let num = rng.random_range(1..=max_num * den);
    BigRational::new(num.into(), den.into())
}

fn unit_ratio(rng: &mut ChaCha8Rng, max_den: i64) -> BigRational {
    let den = rng.random_range(2..=max_den);
    let num = rng.random_range(1..den);
    BigRational::new(num.into(), den.into())
}

/// Hardware against exact evaluation on random small-denominator rationals.
///
/// Digits must match, and convergents, `p_n`, `q_n` and `theta_n` must
/// agree to `1e-9` for `n <= n_max`. The determinant identity
/// `p_{n-1} q_n - p_n q_{n-1} = (-k)^n` must hold exactly.
pub fn exact_oracle_record(seed: u64, cases: usize, n_max: usize) -> Result<CheckRecord> {
    let mut rec = CheckRecord::new("exact_oracle", None);
    let hw = Evaluator::for_mode(PrecisionMode::Hardware);
    let exact = Evaluator::for_mode(PrecisionMode::Exact);
    let mut escalated = 0u64;
    let mut determinant_checks = 0u64;
    for i in 0..cases as u64 {
        let mut rng = stream(seed, SALT_ORACLE, i);
        let k = small_ratio(&mut rng, 3, 12);
        let x0 = unit_ratio(&mut rng, 40);
        let (kn, xn) = (Number::Ratio(k.clone()), Number::Ratio(x0.clone()));
        let a = hw.trace(&kn, &xn, n_max)?;
        let b = exact.trace(&kn, &xn, n_max)?;
        rec.samples += 1;
        escalated += (a.backend != PrecisionMode::Hardware) as u64;
        let mut bad = a.rows.len() != b.rows.len() || a.terminated != b.terminated;
        for (r, s) in a.rows.iter().zip(&b.rows) {
            let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
            let diff = [
                (r.theta - s.theta).abs(),
                (r.convergent - s.convergent).abs(),
                rel(r.p, s.p),
                rel(r.q, s.q),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            rec.worst(diff);
            bad |= r.digit != s.digit || !(diff <= 1e-9);
        }
        // determinant identity along the exact digits
        let kp = KParameter::new(k.clone())?;
        let mut state = ConvergentState::initial(&kp);
        let mut power = BigRational::one();
        for s in &b.rows {
            state = state.step(s.digit, &kp);
            power = -power * k.clone();
            determinant_checks += 1;
            bad |= state.determinant() != power;
        }
        rec.failures += bad as u64;
    }
    rec.note("escalated_to_extended", escalated as f64);
    rec.note("determinant_checks", determinant_checks as f64);
    Ok(rec)
}

/// Algebraic identities on random inputs: fold invariance, preimage round
/// trip, exact top-edge identity and the exact determinant identity.
pub fn identities_record(seed: u64, cases: usize) -> Result<CheckRecord> {
    let mut rec = CheckRecord::new("identities", None);
    let policy = TolerancePolicy::hardware();
    for i in 0..cases as u64 {
        let mut rng = stream(seed, SALT_IDENTITIES, i);
        rec.samples += 1;
        let mut bad = false;

        let kf = 0.05 + 3.0 * open_unit(&mut rng);
        let k = KParameter::f64(kf)?;
        let p = Point2::new(open_unit(&mut rng), -kf - 5.0 * open_unit(&mut rng));
        let img = psi(&k, &p)?;
        bad |= img != psi(&k, &reflect(&p))?;
        if p.first + p.second <= 0.0 {
            match psi_preimage(&k, &img, f64::EPSILON * 16.0)?.canonical() {
                Some(c) => {
                    let err = c.distance(&p) / p.second.abs();
                    rec.worst(err);
                    bad |= !(err <= policy.eps_compare);
                }
                None => bad = true,
            }
        }

        let kq = small_ratio(&mut rng, 4, 9);
        let kp = KParameter::new(kq.clone())?;
        let a = rng.random_range(1..20u64);
        let quad = pa_sharp_quad(&kp, a)?;
        for v in &quad.vertices[1..3] {
            bad |= v.first.clone() + kq.clone() * v.second.clone() != BigRational::one();
        }
        let mut state = ConvergentState::initial(&kp);
        let mut power = BigRational::one();
        for _ in 0..8 {
            state = state.step(rng.random_range(0..6u64), &kp);
            power = -power * kq.clone();
            bad |= state.determinant() != power || !state.q_cur.is_positive();
        }
        rec.failures += bad as u64;
    }
    Ok(rec)
}

/// Which checks a verification run performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Correspondence,
    Containment,
    Regions,
    Witness,
    Identities,
    Oracle,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "correspondence" => Suite::Correspondence,
            "containment" => Suite::Containment,
            "regions" => Suite::Regions,
            "witness" => Suite::Witness,
            "identities" => Suite::Identities,
            "oracle" => Suite::Oracle,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown suite {other:?}; expected all, correspondence, containment, \
                     regions, witness, identities or oracle"
                )))
            }
        })
    }
}

impl Suite {
    fn has(self, part: Suite) -> bool {
        self == Suite::All || self == part
    }
}

/// Runs a suite and, when the configuration names an output directory,
/// writes `report.json` there.
pub fn run_suite(suite: Suite, cfg: &ExperimentConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let eps = cfg.policy.eps_boundary;
    let report = with_pool(|| -> Result<VerificationReport> {
        let mut report = VerificationReport::new(cfg.seed);
        let sampled = suite.has(Suite::Correspondence) || suite.has(Suite::Containment);
        for &kv in &cfg.k_list {
            if !sampled {
                break;
            }
            let set = sample_set(cfg, kv)?;
            if suite.has(Suite::Correspondence) {
                report.push(correspondence_record(&set));
            }
            if suite.has(Suite::Containment) {
                report.push(containment_record(&set, eps)?);
                report.push(hyperbola_record(&set, eps));
                report.push(strip_record(&set, eps)?);
            }
        }
        if suite.has(Suite::Correspondence) {
            report.push(golden_record()?);
        }
        if suite.has(Suite::Regions) {
            for &kv in &cfg.k_list {
                let k = KParameter::f64(kv)?;
                for rec in region_two_sided_check(&k, cfg.samples, cfg.seed, eps)? {
                    report.push(rec);
                }
                if k.is_small() {
                    report.push(p0_curves_record(&k, DEFAULT_CURVE_POINTS, eps.max(1e-12))?);
                }
            }
        }
        if suite.has(Suite::Witness) {
            report.push(witness_grid_record(cfg.seed));
        }
        if suite.has(Suite::Identities) {
            report.push(identities_record(cfg.seed, 1000)?);
        }
        if suite.has(Suite::Oracle) {
            report.push(exact_oracle_record(cfg.seed, 100, 15)?);
        }
        Ok(report)
    })??;
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        report.write_json(&dir.join("report.json"))?;
    }
    Ok(report)
}

/// A region whose boundary can be drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionSelection {
    /// The five boundary curves of `psi_k(P_(k,0))`, `k < 1`.
    P0,
    /// The quadrangle `psi_k(P_(k,a))`.
    Pa(Digit),
    /// Pieces of the union of all strip images, up to [`PLOT_MAX_DIGIT`].
    GammaConstructive,
    /// The closed-form quadrangle, plus the hyperbola arc for `k < 1`.
    GammaLiteral,
}

impl FromStr for RegionSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p0" => Ok(RegionSelection::P0),
            "gamma-constructive" => Ok(RegionSelection::GammaConstructive),
            "gamma-literal" => Ok(RegionSelection::GammaLiteral),
            _ => s
                .strip_prefix("pa:")
                .and_then(|a| a.parse().ok())
                .map(RegionSelection::Pa)
                .ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "unknown region {s:?}; expected p0, pa:<a>, gamma-constructive or gamma-literal"
                    ))
                }),
        }
    }
}

fn quad_curve(k: &KParameter<f64>, a: Digit) -> Result<LabeledCurve> {
    Ok(LabeledCurve {
        label: format!("pa_quad_{a}"),
        points: pa_sharp_quad(k, a)?.polyline(),
    })
}

/// Labelled boundary polylines of a region.
pub fn region_curves(
    k: &KParameter<f64>,
    which: RegionSelection,
    points: usize,
) -> Result<Vec<LabeledCurve>> {
    let kf = *k.value();
    match which {
        RegionSelection::P0 => Ok(P0Region::new(k.clone())?.boundary_curves(points)),
        RegionSelection::Pa(a) => Ok(vec![quad_curve(k, a)?]),
        RegionSelection::GammaConstructive => {
            let mut out = Vec::new();
            let first = if k.is_small() {
                out.extend(P0Region::new(k.clone())?.boundary_curves(points));
                1
            } else {
                0
            };
            for a in first..=PLOT_MAX_DIGIT {
                out.push(quad_curve(k, a)?);
            }
            Ok(out)
        }
        RegionSelection::GammaLiteral => {
            let v = corollary_quad(k).vertices;
            let mut out: Vec<LabeledCurve> = (0..4)
                .map(|i| LabeledCurve {
                    label: format!("corollary_edge_{}", i + 1),
                    points: vec![v[i], v[(i + 1) % 4]],
                })
                .collect();
            if k.is_small() {
                out.push(LabeledCurve {
                    label: "hyperbola_arc".into(),
                    points: hyperbola_arc(kf, points),
                });
            }
            Ok(out)
        }
    }
}

fn float_field(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes curves as `label,u,v` rows; returns the row count.
pub fn write_boundary_csv(path: &Path, curves: &[LabeledCurve]) -> Result<usize> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_boundary(file, curves)
}

pub fn write_boundary<W: std::io::Write>(out: W, curves: &[LabeledCurve]) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "u", "v"])?;
    let mut rows = 0;
    for c in curves {
        for p in &c.points {
            w.write_record([c.label.clone(), float_field(p.first), float_field(p.second)])?;
            rows += 1;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(rows)
}

/// Writes sampled pairs as `k,x0_seed_index,n,u,v,x_n,y_n,a_n` rows.
pub fn write_pairs<W: std::io::Write>(out: W, sets: &[SampleSet]) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "x0_seed_index", "n", "u", "v", "x_n", "y_n", "a_n"])?;
    let mut rows = 0;
    for set in sets {
        for s in &set.samples {
            w.write_record([
                float_field(set.k),
                s.seed_index.to_string(),
                s.n.to_string(),
                float_field(s.u),
                float_field(s.v),
                float_field(s.x),
                float_field(s.y),
                s.digit.to_string(),
            ])?;
            rows += 1;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(rows)
}

/// Paths and row counts written by [`emit_plot_data`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotFiles {
    pub boundary: PathBuf,
    pub boundary_rows: usize,
    pub pairs: PathBuf,
    pub pair_rows: usize,
}

/// Writes `region_boundary.csv` and `jager_pairs.csv` for one `k`.
///
/// The boundary file holds the closed-form description and the pieces of
/// the constructive union. The pair file holds the sampled cloud.
pub fn emit_plot_data(
    k: &KParameter<f64>,
    cfg: &ExperimentConfig,
    dir: &Path,
) -> Result<PlotFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut curves = region_curves(k, RegionSelection::GammaLiteral, DEFAULT_CURVE_POINTS)?;
    curves.extend(region_curves(
        k,
        RegionSelection::GammaConstructive,
        DEFAULT_CURVE_POINTS,
    )?);
    let boundary = dir.join("region_boundary.csv");
    let boundary_rows = write_boundary_csv(&boundary, &curves)?;

    let set = with_pool(|| sample_set(cfg, *k.value()))??;
    let pairs = dir.join("jager_pairs.csv");
    let file = fs::File::create(&pairs).map_err(|e| Error::io(&pairs, e))?;
    let pair_rows = write_pairs(file, std::slice::from_ref(&set))?;
    Ok(PlotFiles {
        boundary,
        boundary_rows,
        pairs,
        pair_rows,
    })
}
