//! The map psi, the strips `P_(k,a)`, their images and the space of Jager
//! pairs.
//!
//! ```text
//! psi_k(x, y) = (1 / (x - y),  -x y / (k (x - y)))
//! ```
//!
//! psi is invariant under the fold `(x, y) -> (-y, -x)`. For `k >= 1` the
//! whole dynamic domain lies below the fold line `x + y = 0`. For `k < 1`
//! the strip `P_(k,0)` straddles it, and its image folds over along the
//! hyperbola `4 k u v = 1`.
//!
//! Region predicates return a three-valued [`Membership`]. A point within
//! `eps` (Euclidean distance in the `(u, v)` plane) of a region's boundary
//! is reported as [`Membership::Boundary`] and is never guessed.

use std::fmt;

use serde::Serialize;

use crate::cf::{Digit, KParameter};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Inside,
    Outside,
    Boundary,
}

impl Membership {
    /// Union of two classifications: inside wins, then boundary.
    pub fn or(self, other: Membership) -> Membership {
        use Membership::*;
        match (self, other) {
            (Inside, _) | (_, Inside) => Inside,
            (Boundary, _) | (_, Boundary) => Boundary,
            _ => Outside,
        }
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Inside => "inside",
            Membership::Outside => "outside",
            Membership::Boundary => "boundary",
        })
    }
}

/// A point of the `(x, y)` plane or of the `(u, v)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point2<R = f64> {
    pub first: R,
    pub second: R,
}

impl<R> Point2<R> {
    pub const fn new(first: R, second: R) -> Self {
        Point2 { first, second }
    }
}

impl<R: Real> Point2<R> {
    pub fn to_f64(&self) -> Point2<f64> {
        Point2::new(self.first.to_f64(), self.second.to_f64())
    }
}

impl Point2<f64> {
    pub fn distance(&self, other: &Point2<f64>) -> f64 {
        (self.first - other.first).hypot(self.second - other.second)
    }

    pub fn is_finite(&self) -> bool {
        self.first.is_finite() && self.second.is_finite()
    }
}

/// `psi_k(x, y)`. Fails on the diagonal `x = y`.
pub fn psi<R: Real>(k: &KParameter<R>, p: &Point2<R>) -> Result<Point2<R>> {
    let diff = p.first.clone() - p.second.clone();
    if diff.is_zero() {
        return Err(Error::Singular);
    }
    let u = diff.one_like() / diff.clone();
    let v = -(p.first.clone() * p.second.clone()) / (k.value().clone() * diff);
    Ok(Point2::new(u, v))
}

/// The fold `(x, y) -> (-y, -x)`.
pub fn reflect<R: Real>(p: &Point2<R>) -> Point2<R> {
    Point2::new(-p.second.clone(), -p.first.clone())
}

/// Real solutions of `psi_k(x, y) = (u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preimage {
    None,
    /// Double root on the fold line, exactly when `4 k u v = 1`.
    Double(Point2),
    /// The root with `x + y <= 0` first, then its reflection.
    Pair(Point2, Point2),
}

impl Preimage {
    pub fn roots(&self) -> Vec<Point2> {
        match *self {
            Preimage::None => vec![],
            Preimage::Double(p) => vec![p],
            Preimage::Pair(p, q) => vec![p, q],
        }
    }

    pub fn canonical(&self) -> Option<Point2> {
        self.roots().first().copied()
    }
}

/// Inverts psi: `x - y = 1/u`, `x y = -k v / u`, `(x + y)^2 = (x - y)^2 + 4 x y`.
///
/// A discriminant within `eps * max(1, (x - y)^2)` of zero counts as a
/// double root.
pub fn psi_preimage(k: &KParameter<f64>, q: &Point2, eps: f64) -> Result<Preimage> {
    let (u, v) = (q.first, q.second);
    if u.is_nan() || u <= 0.0 {
        return Err(Error::NonPositiveU(u));
    }
    let d = 1.0 / u;
    let m = -k.value() * v / u;
    let disc = d * d + 4.0 * m;
    if disc.abs() <= eps * d * d.max(1.0) {
        let h = d / 2.0;
        return Ok(Preimage::Double(Point2::new(h, -h)));
    }
    if disc < 0.0 {
        return Ok(Preimage::None);
    }
    let s = disc.sqrt();
    // -2m/(d+s) avoids cancelling d - s when the root sits near x = 0
    let small = -2.0 * m / (d + s);
    let big = (d + s) / 2.0;
    Ok(Preimage::Pair(
        Point2::new(small, -big),
        Point2::new(big, -small),
    ))
}

/// `P_(k,a) = (0, 1) x (-k-a-1, -k-a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Strip {
    pub k: KParameter<f64>,
    pub a: Digit,
}

impl Strip {
    pub fn new(k: KParameter<f64>, a: Digit) -> Self {
        Strip { k, a }
    }

    /// `(upper, lower)` bounds of the `y` interval.
    pub fn y_bounds(&self) -> (f64, f64) {
        let top = -(self.k.value() + self.a as f64);
        (top, top - 1.0)
    }

    /// Half-open membership: upper bound included, lower bound excluded.
    pub fn contains(&self, p: &Point2) -> bool {
        let (top, bottom) = self.y_bounds();
        p.first > 0.0 && p.first < 1.0 && p.second <= top && p.second > bottom
    }

    /// Membership in `[0, 1] x [-k-a-1, -k-a]`.
    ///
    /// Orbit pasts can sit on the lower edge: `a_1 = 0` gives
    /// `y_2 = -k - a_2 - 1` exactly, so orbit invariants use the closure.
    pub fn closure_contains(&self, p: &Point2, eps: f64) -> bool {
        let (top, bottom) = self.y_bounds();
        p.first >= -eps && p.first <= 1.0 + eps && p.second <= top + eps && p.second >= bottom - eps
    }

    /// Uniform point of the strip from two unit draws.
    pub fn sample(&self, s: f64, t: f64) -> Point2 {
        let (top, _) = self.y_bounds();
        Point2::new(s, top - t)
    }
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: &Point2, a: &Point2, b: &Point2) -> f64 {
    let (dx, dy) = (b.first - a.first, b.second - a.second);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.first - a.first) * dx + (p.second - a.second) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&Point2::new(a.first + t * dx, a.second + t * dy))
}

/// Even-odd rule; points on an edge are caller-handled.
fn polygon_contains(vertices: &[Point2], p: &Point2) -> bool {
    let mut inside = false;
    let n = vertices.len();
    for i in 0..n {
        let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
        if (a.second > p.second) != (b.second > p.second) {
            let cross =
                a.first + (p.second - a.second) * (b.first - a.first) / (b.second - a.second);
            if p.first < cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// A quadrangle given by its four vertices in counterclockwise order.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRegion<R = f64> {
    pub vertices: [Point2<R>; 4],
}

impl<R: Real> QuadRegion<R> {
    pub fn vertices_f64(&self) -> [Point2; 4] {
        self.vertices.clone().map(|p| p.to_f64())
    }

    /// Closed polyline through the vertices.
    pub fn polyline(&self) -> Vec<Point2> {
        let v = self.vertices_f64();
        let mut out = v.to_vec();
        out.push(v[0]);
        out
    }

    pub fn boundary_distance(&self, p: &Point2) -> f64 {
        let v = self.vertices_f64();
        (0..4)
            .map(|i| segment_distance(p, &v[i], &v[(i + 1) % 4]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn classify(&self, p: &Point2, eps: f64) -> Membership {
        if self.boundary_distance(p) <= eps {
            Membership::Boundary
        } else if polygon_contains(&self.vertices_f64(), p) {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    /// `(u_min, u_max, v_max)`
    pub fn bounding_box(&self) -> (f64, f64, f64) {
        let v = self.vertices_f64();
        let umin = v.iter().map(|p| p.first).fold(f64::INFINITY, f64::min);
        let umax = v.iter().map(|p| p.first).fold(f64::NEG_INFINITY, f64::max);
        let vmax = v.iter().map(|p| p.second).fold(f64::NEG_INFINITY, f64::max);
        (umin, umax, vmax)
    }
}

fn check_injective<R: Real>(k: &KParameter<R>, a: Digit) -> Result<()> {
    if a == 0 && k.is_small() {
        return Err(Error::WrongRegion(format!(
            "psi folds on P_(k,0) for k = {} < 1; use P0Region",
            k.value().to_f64()
        )));
    }
    Ok(())
}

/// `psi_k(P_(k,a))` for strips on which psi is injective (`a >= 1` or `k >= 1`).
///
/// Vertices are the images of the strip corners `(0, -k-a)`, `(1, -k-a)`,
/// `(1, -k-a-1)` and `(0, -k-a-1)`:
///
/// ```text
/// (1/(k+a), 0), (1/(k+a+1), (k+a)/(k(k+a+1))),
/// (1/(k+a+2), (k+a+1)/(k(k+a+2))), (1/(k+a+1), 0)
/// ```
///
/// The two upper vertices lie on `u + k v = 1`, the image of the edge `x = 1`.
pub fn pa_sharp_quad<R: Real>(k: &KParameter<R>, a: Digit) -> Result<QuadRegion<R>> {
    check_injective(k, a)?;
    let kv = k.value().clone();
    let one = kv.one_like();
    let c0 = k.shifted(a);
    let c1 = k.shifted(a + 1);
    let c2 = k.shifted(a + 2);
    Ok(QuadRegion {
        vertices: [
            Point2::new(one.clone() / c0.clone(), kv.zero_like()),
            Point2::new(one.clone() / c1.clone(), c0 / (kv.clone() * c1.clone())),
            Point2::new(one.clone() / c2.clone(), c1.clone() / (kv * c2)),
            Point2::new(one / c1, k.value().zero_like()),
        ],
    })
}

/// The quadrangle with the fourth vertex at `(1/(k+a+2), 0)`.
///
/// That vertex is not the image of a strip corner, and the quadrangle
/// overhangs the true image. It is kept for reconciliation reports only.
pub fn pa_sharp_quad_as_stated<R: Real>(k: &KParameter<R>, a: Digit) -> Result<QuadRegion<R>> {
    let mut q = pa_sharp_quad(k, a)?;
    q.vertices[3] = Point2::new(q.vertices[2].first.clone(), k.value().zero_like());
    Ok(q)
}

/// A labelled polyline for plotting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabeledCurve {
    pub label: String,
    pub points: Vec<Point2>,
}

pub const DEFAULT_CURVE_POINTS: usize = 256;

/// `psi_k(P_(k,0))` for `k < 1`.
///
/// The image is bounded by five curves: the images of the strip edges
/// `y = -k` (on `u k + v = 1`), `x = 0` (on `v = 0`), `y = -k-1` (on
/// `(k+1)^2 u + k v = k+1`) and `x = 1` (on `u + k v = 1`), and the
/// hyperbola `4 k u v = 1`, which is the image of the fold line.
/// Membership is
///
/// ```text
/// v > 0,  (k+1)^2 u + k v > k+1,  4 k u v <= 1,
/// and (u + k v < 1  or  u k + v < 1  or  1/2 <= u <= 1/(2k))
/// ```
///
/// The two lines `u + k v = 1` and `u k + v = 1` are tangent to the
/// hyperbola at `(1/2, 1/(2k))` and `(1/(2k), 1/2)`. Each constrains only
/// the part of the region on its own side of the fold, so the region is
/// their union there, not their intersection.
#[derive(Clone, Debug, PartialEq)]
pub struct P0Region {
    k: KParameter<f64>,
}

impl P0Region {
    pub fn new(k: KParameter<f64>) -> Result<Self> {
        if !k.is_small() {
            return Err(Error::WrongRegion(format!(
                "P0Region needs k < 1, got {}",
                k.value()
            )));
        }
        Ok(P0Region { k })
    }

    pub fn k(&self) -> f64 {
        *self.k.value()
    }

    /// Corner points of the boundary loop, in traversal order.
    pub fn corners(&self) -> [Point2; 5] {
        let k = self.k();
        [
            Point2::new(1.0 / (2.0 * k), 0.5),
            Point2::new(1.0 / k, 0.0),
            Point2::new(1.0 / (k + 1.0), 0.0),
            Point2::new(1.0 / (k + 2.0), (k + 1.0) / (k * (k + 2.0))),
            Point2::new(0.5, 1.0 / (2.0 * k)),
        ]
    }

    fn strict_predicate(&self, p: &Point2) -> bool {
        let k = self.k();
        let (u, v) = (p.first, p.second);
        v > 0.0
            && (k + 1.0).powi(2) * u + k * v > k + 1.0
            && 4.0 * k * u * v <= 1.0
            && (u + k * v < 1.0 || u * k + v < 1.0 || (0.5..=1.0 / (2.0 * k)).contains(&u))
    }

    fn hyperbola_distance(&self, p: &Point2) -> f64 {
        let k = self.k();
        let (lo, hi) = (0.5, 1.0 / (2.0 * k));
        let [c0, _, _, _, c4] = self.corners();
        let ends = p.distance(&c0).min(p.distance(&c4));
        if p.first < lo || p.first > hi {
            return ends;
        }
        let g = 4.0 * k * p.first * p.second - 1.0;
        let grad = 4.0 * k * p.first.hypot(p.second);
        (g.abs() / grad).min(ends)
    }

    pub fn boundary_distance(&self, p: &Point2) -> f64 {
        let c = self.corners();
        let lines = (0..4)
            .map(|i| segment_distance(p, &c[i], &c[i + 1]))
            .fold(f64::INFINITY, f64::min);
        lines.min(self.hyperbola_distance(p))
    }

    pub fn classify(&self, p: &Point2, eps: f64) -> Membership {
        if self.boundary_distance(p) <= eps {
            Membership::Boundary
        } else if self.strict_predicate(p) {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    /// The intersection `u k + v < 1, v > 0, (k+1)^2 u + k v > k+1,
    /// u + k v < 1, 4 k u v <= 1` read literally, with a point within
    /// `eps` of equality in any constraint reported as boundary.
    ///
    /// This set misses the part of the image beyond either tangent line.
    /// For example `(0.01, -0.5)` in `P_(0.5,0)` maps to a point with
    /// `u + k v = 1.97`. It is kept for reconciliation reports.
    pub fn classify_as_stated(&self, p: &Point2, eps: f64) -> Membership {
        let k = self.k();
        let (u, v) = (p.first, p.second);
        // each slack is positive when the constraint holds
        let slacks = [
            1.0 - (u * k + v),
            v,
            (k + 1.0).powi(2) * u + k * v - (k + 1.0),
            1.0 - (u + k * v),
            1.0 - 4.0 * k * u * v,
        ];
        if slacks.iter().any(|&s| s < -eps) {
            Membership::Outside
        } else if slacks.iter().any(|&s| s <= eps) {
            Membership::Boundary
        } else {
            Membership::Inside
        }
    }

    /// The five boundary curves, each sampled at `points >= 2` points.
    pub fn boundary_curves(&self, points: usize) -> Vec<LabeledCurve> {
        let points = points.max(2);
        let k = self.k();
        let c = self.corners();
        let seg = |label: &str, a: Point2, b: Point2| LabeledCurve {
            label: label.into(),
            points: (0..points)
                .map(|i| {
                    let t = i as f64 / (points - 1) as f64;
                    Point2::new(
                        a.first + t * (b.first - a.first),
                        a.second + t * (b.second - a.second),
                    )
                })
                .collect(),
        };
        let arc = LabeledCurve {
            label: "p0_item_5".into(),
            points: hyperbola_arc(k, points),
        };
        vec![
            seg("p0_item_1", c[0], c[1]),
            seg("p0_item_2", c[2], c[1]),
            seg("p0_item_3", c[2], c[3]),
            seg("p0_item_4", c[3], c[4]),
            arc,
        ]
    }

    /// `(u_max, v_max)` of the region.
    pub fn bounding_box(&self) -> (f64, f64) {
        let k = self.k();
        (1.0 / k, (k + 1.0) / (k * (k + 2.0)).max(1.0 / (2.0 * k)))
    }
}

/// `4 k u v = 1` from `(1/2, 1/(2k))` to `(1/(2k), 1/2)`, endpoints exact.
pub fn hyperbola_arc(k: f64, points: usize) -> Vec<Point2> {
    let points = points.max(2);
    let (lo, hi) = (0.5, 1.0 / (2.0 * k));
    (0..points)
        .map(|i| {
            if i == 0 {
                return Point2::new(lo, 1.0 / (2.0 * k));
            }
            if i == points - 1 {
                return Point2::new(hi, 0.5);
            }
            let u = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            Point2::new(u, 1.0 / (4.0 * k * u))
        })
        .collect()
}

/// The inequality region of `psi_k(P_(k,0))`.
pub fn p0_sharp_contains(k: &KParameter<f64>, q: &Point2, eps: f64) -> Result<Membership> {
    Ok(P0Region::new(k.clone())?.classify(q, eps))
}

/// Boundary curves of `psi_k(P_(k,0))`, `k < 1`.
pub fn p0_boundary_curves(k: &KParameter<f64>, points: usize) -> Result<Vec<LabeledCurve>> {
    Ok(P0Region::new(k.clone())?.boundary_curves(points))
}

/// How the space of Jager pairs is described.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// `psi_k` of the dynamic domain `(0,1) x (-inf, -k]`, decided through
    /// the preimage. This is the ground truth.
    ConstructiveUnion,
    /// The closed-form quadrangle `(0,0), (1/k,0), (1/(k+1),1/(k+1)),
    /// (0,1/(k+1))`. For `k < 1` the region under the hyperbola arc over
    /// `1/2 <= u <= 1/(2k)` is added.
    CorollaryLiteral,
}

/// The space of Jager pairs `Gamma_k` under a chosen description.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaRegion {
    pub k: KParameter<f64>,
    pub mode: GammaMode,
}

impl GammaRegion {
    pub fn new(k: KParameter<f64>, mode: GammaMode) -> Self {
        GammaRegion { k, mode }
    }

    pub fn classify(&self, q: &Point2, eps: f64) -> Membership {
        match self.mode {
            GammaMode::ConstructiveUnion => constructive_membership(&self.k, q, eps),
            GammaMode::CorollaryLiteral => corollary_membership(&self.k, q, eps),
        }
    }
}

/// Membership in `Gamma_k`.
pub fn gamma_contains(k: &KParameter<f64>, q: &Point2, mode: GammaMode, eps: f64) -> Membership {
    GammaRegion::new(k.clone(), mode).classify(q, eps)
}

/// Margin by which `p` lies in `(0,1) x (-inf, -k]`; negative outside.
fn domain_slack(k: f64, p: &Point2) -> f64 {
    p.first.min(1.0 - p.first).min(-k - p.second)
}

fn constructive_membership(k: &KParameter<f64>, q: &Point2, eps: f64) -> Membership {
    if !q.is_finite() {
        return Membership::Outside;
    }
    if q.first <= 0.0 {
        return if q.first >= -eps {
            Membership::Boundary
        } else {
            Membership::Outside
        };
    }
    let kf = *k.value();
    let pre = match psi_preimage(k, q, f64::EPSILON * 16.0) {
        Ok(p) => p,
        Err(_) => return Membership::Outside,
    };
    let slack = pre
        .roots()
        .iter()
        .map(|p| domain_slack(kf, p))
        .fold(f64::NEG_INFINITY, f64::max);
    if slack > eps {
        return Membership::Inside;
    }
    if slack >= -eps {
        return Membership::Boundary;
    }
    // no real root: only points near the hyperbola can be close to the image
    if pre == Preimage::None {
        let g = 4.0 * kf * q.first * q.second - 1.0;
        let dist = g / (4.0 * kf * q.first.hypot(q.second));
        if dist <= eps {
            let h = 1.0 / (2.0 * q.first);
            if domain_slack(kf, &Point2::new(h, -h)) >= -eps {
                return Membership::Boundary;
            }
        }
    }
    Membership::Outside
}

/// The quadrangle of the closed-form description.
pub fn corollary_quad(k: &KParameter<f64>) -> QuadRegion {
    let kf = *k.value();
    let c = 1.0 / (kf + 1.0);
    QuadRegion {
        vertices: [
            Point2::new(0.0, 0.0),
            Point2::new(1.0 / kf, 0.0),
            Point2::new(c, c),
            Point2::new(0.0, c),
        ],
    }
}

/// For `k < 1`: the part of the plane under the hyperbola arc,
/// `1/2 <= u <= 1/(2k)`, `0 <= v`, `4 k u v <= 1`. The arc rises above
/// the quadrangle there, and this is one reading of "the part of the
/// hyperbola between u = 1/2 and u = 1/(2k)".
fn corollary_cap(kf: f64, q: &Point2, eps: f64) -> Membership {
    let (u, v) = (q.first, q.second);
    let (lo, hi) = (0.5, 1.0 / (2.0 * kf));
    let arc = if u >= lo && u <= hi {
        (4.0 * kf * u * v - 1.0).abs() / (4.0 * kf * u.hypot(v))
    } else {
        f64::INFINITY
    };
    let sides = [
        segment_distance(q, &Point2::new(lo, 0.0), &Point2::new(lo, hi)),
        segment_distance(q, &Point2::new(hi, 0.0), &Point2::new(hi, lo)),
        segment_distance(q, &Point2::new(lo, 0.0), &Point2::new(hi, 0.0)),
    ];
    if sides.iter().fold(arc, |m, &d| m.min(d)) <= eps {
        return Membership::Boundary;
    }
    if u > lo && u < hi && v > 0.0 && 4.0 * kf * u * v < 1.0 {
        Membership::Inside
    } else {
        Membership::Outside
    }
}

fn corollary_membership(k: &KParameter<f64>, q: &Point2, eps: f64) -> Membership {
    let quad = corollary_quad(k).classify(q, eps);
    if k.is_small() {
        quad.or(corollary_cap(*k.value(), q, eps))
    } else {
        quad
    }
}

/// Piece-by-piece membership in `Gamma_k`: the quadrangles `P_a^#` plus,
/// for `k < 1`, the folded region `P_0^#`. Used to cross-check the
/// constructive test.
pub fn piecewise_membership(k: &KParameter<f64>, q: &Point2, eps: f64) -> Membership {
    let kf = *k.value();
    if !q.is_finite() || q.first <= 0.0 {
        return if q.first.abs() <= eps {
            Membership::Boundary
        } else {
            Membership::Outside
        };
    }
    // P_a^# spans 1/(k+a+2) <= u <= 1/(k+a)
    let hi = (1.0 / (q.first - eps).max(f64::MIN_POSITIVE) - kf).floor();
    let lo = (1.0 / (q.first + eps) - kf - 2.0).ceil();
    let (lo, hi) = (lo.max(0.0), hi.max(-1.0));
    if hi < lo || hi > u64::MAX as f64 / 2.0 {
        return Membership::Outside;
    }
    let mut out = Membership::Outside;
    for a in lo as Digit..=hi as Digit {
        let m = if a == 0 && k.is_small() {
            P0Region { k: k.clone() }.classify(q, eps)
        } else {
            match pa_sharp_quad(k, a) {
                Ok(quad) => quad.classify(q, eps),
                Err(_) => Membership::Outside,
            }
        };
        out = out.or(m);
        if out == Membership::Inside {
            break;
        }
    }
    out
}

/// Exact vertex or coefficient data of a region.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionDescriptor {
    Strip(Strip),
    Quad(QuadRegion),
    P0(P0Region),
    Gamma(GammaRegion),
}

impl RegionDescriptor {
    /// Classification in the plane the region lives in.
    pub fn classify(&self, p: &Point2, eps: f64) -> Membership {
        match self {
            RegionDescriptor::Strip(s) => {
                if s.contains(p) {
                    Membership::Inside
                } else if s.closure_contains(p, eps) {
                    Membership::Boundary
                } else {
                    Membership::Outside
                }
            }
            RegionDescriptor::Quad(q) => q.classify(p, eps),
            RegionDescriptor::P0(r) => r.classify(p, eps),
            RegionDescriptor::Gamma(g) => g.classify(p, eps),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    const EPS: f64 = 1e-9;

    fn k(v: f64) -> KParameter<f64> {
        KParameter::f64(v).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn psi_examples() {
        for kv in [0.3, 1.0, 2.5] {
            let img = psi(&k(kv), &Point2::new(1.0, -1.0)).unwrap();
            assert!(close(img.first, 0.5, 1e-15) && close(img.second, 1.0 / (2.0 * kv), 1e-15));
        }
        let img = psi(&k(1.0), &Point2::new(0.5, -1.5)).unwrap();
        assert_eq!(img, Point2::new(0.5, 0.375));
        let near = psi(&k(0.7), &Point2::new(1e-12, -2.7)).unwrap();
        assert!(close(near.first, 1.0 / 2.7, 1e-11) && near.second.abs() < 1e-11);
        assert!(matches!(
            psi(&k(1.0), &Point2::new(0.3, 0.3)),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn fold_symmetry() {
        let p = Point2::new(0.9, -0.6);
        assert_eq!(reflect(&p), Point2::new(0.6, -0.9));
        assert_eq!(reflect(&reflect(&p)), p);
        let a = psi(&k(0.5), &p).unwrap();
        let b = psi(&k(0.5), &reflect(&p)).unwrap();
        assert_eq!(a, b);
        assert!(close(a.first, 2.0 / 3.0, 1e-15) && close(a.second, 0.72, 1e-15));
    }

    #[test]
    fn preimage_examples() {
        let pre = psi_preimage(&k(1.0), &Point2::new(0.5, 0.4), 1e-15).unwrap();
        let Preimage::Pair(c, r) = pre else {
            panic!("{pre:?}")
        };
        assert!(close(c.first, 0.5528, 1e-4) && close(c.second, -1.4472, 1e-4));
        assert!(close(r.first, 1.4472, 1e-4) && close(r.second, -0.5528, 1e-4));
        for kv in [0.25, 0.5, 2.0] {
            let pre = psi_preimage(&k(kv), &Point2::new(0.5, 1.0 / (2.0 * kv)), 1e-12).unwrap();
            assert_eq!(pre, Preimage::Double(Point2::new(1.0, -1.0)));
        }
        let none = psi_preimage(&k(1.0), &Point2::new(0.5, 0.6), 1e-15).unwrap();
        assert_eq!(none, Preimage::None);
        assert!(psi_preimage(&k(1.0), &Point2::new(0.0, 0.6), 1e-15).is_err());
    }

    #[test]
    fn strip_membership() {
        let s = Strip::new(k(0.5), 0);
        assert!(s.contains(&Point2::new(0.9, -0.5)));
        assert!(!s.contains(&Point2::new(0.9, -1.5)));
        assert!(s.closure_contains(&Point2::new(0.9, -1.5), 0.0));
        assert!(Strip::new(k(1.0), 2).contains(&Point2::new(0.1, -3.2)));
    }

    #[test]
    fn quad_vertices_substitute() {
        let q = pa_sharp_quad(&k(0.5), 1).unwrap().vertices;
        let want = [
            (2.0 / 3.0, 0.0),
            (0.4, 1.2),
            (2.0 / 7.0, 10.0 / 7.0),
            (0.4, 0.0),
        ];
        for (p, (u, v)) in q.iter().zip(want) {
            assert!(
                close(p.first, u, 1e-15) && close(p.second, v, 1e-15),
                "{p:?}"
            );
        }
        let stated = pa_sharp_quad_as_stated(&k(1.0), 0).unwrap().vertices;
        assert_eq!(stated[3], Point2::new(1.0 / 3.0, 0.0));
        assert!(matches!(
            pa_sharp_quad(&k(0.5), 0),
            Err(Error::WrongRegion(_))
        ));
    }

    #[test]
    fn top_edge_identity_is_exact() {
        for (n, d) in [(1, 2), (3, 7), (5, 2), (1, 1), (11, 3)] {
            let kq = KParameter::new(BigRational::new(n.into(), d.into())).unwrap();
            for a in 1..6 {
                let quad = pa_sharp_quad(&kq, a).unwrap();
                for p in &quad.vertices[1..3] {
                    let lhs = p.first.clone() + kq.value().clone() * p.second.clone();
                    assert_eq!(lhs, BigRational::from_integer(1.into()));
                }
            }
        }
    }

    #[test]
    fn p0_examples() {
        let kk = k(0.5);
        assert_eq!(
            p0_sharp_contains(&kk, &Point2::new(0.8, 0.3), EPS).unwrap(),
            Membership::Inside
        );
        assert_ne!(
            p0_sharp_contains(&kk, &Point2::new(2.0, 0.0), EPS).unwrap(),
            Membership::Inside
        );
        let r = P0Region::new(kk.clone()).unwrap();
        assert_eq!(
            r.classify_as_stated(&Point2::new(1.0, 0.25), EPS),
            Membership::Outside
        );
        // yet it is psi((2 - sqrt2)/4, -(2 + sqrt2)/4), a point of the strip
        let h = 0.5_f64.sqrt() / 2.0;
        let pre = Point2::new(0.5 - h, -(0.5 + h));
        let img = psi(&kk, &pre).unwrap();
        assert!(img.distance(&Point2::new(1.0, 0.25)) < 1e-12);
        assert_eq!(r.classify(&Point2::new(1.0, 0.25), EPS), Membership::Inside);
        // psi(0.3, -0.9) = (5/6, 0.45), past the tangent line u + k v = 1
        let img = psi(&kk, &Point2::new(0.3, -0.9)).unwrap();
        assert_eq!(r.classify(&img, EPS), Membership::Inside);
        assert_eq!(r.classify_as_stated(&img, EPS), Membership::Outside);
        assert!(P0Region::new(k(1.0)).is_err());
    }

    #[test]
    fn p0_curves_are_boundary() {
        for kv in [0.2, 0.5, 0.8] {
            let kk = k(kv);
            let curves = p0_boundary_curves(&kk, 64).unwrap();
            assert_eq!(curves.len(), 5);
            for c in &curves {
                for p in &c.points {
                    assert_eq!(
                        p0_sharp_contains(&kk, p, EPS).unwrap(),
                        Membership::Boundary,
                        "{} {p:?}",
                        c.label
                    );
                }
            }
        }
        let curves = p0_boundary_curves(&k(0.5), 8).unwrap();
        assert_eq!(curves[0].points[0], Point2::new(1.0, 0.5));
        assert_eq!(*curves[0].points.last().unwrap(), Point2::new(2.0, 0.0));
        assert_eq!(curves[4].points[0], Point2::new(0.5, 1.0));
        assert_eq!(*curves[4].points.last().unwrap(), Point2::new(1.0, 0.5));
    }

    #[test]
    fn gamma_examples() {
        let c = GammaMode::ConstructiveUnion;
        assert_eq!(
            gamma_contains(&k(1.0), &Point2::new(0.5, 0.4), c, EPS),
            Membership::Inside
        );
        assert_eq!(
            gamma_contains(&k(1.0), &Point2::new(0.5, 0.6), c, EPS),
            Membership::Outside
        );
        assert_eq!(
            gamma_contains(&k(0.5), &Point2::new(2.0 / 3.0, 0.72), c, EPS),
            Membership::Inside
        );
        let lit = GammaMode::CorollaryLiteral;
        assert_eq!(
            gamma_contains(&k(1.0), &Point2::new(0.2, 0.2), lit, EPS),
            Membership::Inside
        );
        assert_eq!(
            gamma_contains(&k(0.5), &Point2::new(0.75, 0.65), lit, EPS),
            Membership::Inside
        );
        assert_eq!(
            gamma_contains(&k(0.5), &Point2::new(0.75, 0.7), lit, EPS),
            Membership::Outside
        );
    }

    #[test]
    fn piecewise_agrees_with_constructive_on_images() {
        for kv in [0.3, 0.5, 1.0, 2.0] {
            let kk = k(kv);
            for i in 1..40 {
                for j in 1..40 {
                    let x = i as f64 / 40.0;
                    let y = -kv - j as f64 / 8.0;
                    let q = psi(&kk, &Point2::new(x, y)).unwrap();
                    assert_ne!(
                        piecewise_membership(&kk, &q, EPS),
                        Membership::Outside,
                        "k={kv} {x} {y}"
                    );
                    assert_ne!(
                        gamma_contains(&kk, &q, GammaMode::ConstructiveUnion, EPS),
                        Membership::Outside
                    );
                }
            }
        }
    }
}
