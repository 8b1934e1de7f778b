//! Self-intersections of a curve, genericity certification, and arcs.
//!
//! Each component is approximated by chords between sample points (the exact
//! edges for polylines). Chords are grouped into chunks with inflated bounding
//! boxes; overlapping chunk pairs are tested chord by chord, and every chord
//! intersection seeds a Newton solve of `Γ_a(t1) = Γ_b(t2)` on the exact curve.
//! Chord pairs that come close without intersecting seed a closest-approach
//! solve, which exposes tangencies the chords cannot see.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::curve::{validate_immersion, ClosedPath, Curve, Polyline};
use crate::error::{Error, Result};
use crate::geom::{segment_intersection, segment_segment_distance, Aabb, Vec2};

const CHUNK: usize = 16;
const NEWTON_ITERATIONS: usize = 80;

/// One of the two passes of the curve through a double point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Branch {
    pub component: usize,
    pub t: f64,
    /// Unit tangent.
    pub tangent: Vec2,
}

/// A transversal self-intersection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoublePoint {
    pub position: Vec2,
    /// Ordered by `(component, t)`.
    pub branches: [Branch; 2],
    /// Angle between the first tangent and the negated second tangent, in (0, π).
    pub theta: f64,
}

impl DoublePoint {
    pub fn branch(&self, i: usize) -> &Branch {
        &self.branches[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    TangentialCrossing,
    TriplePoint,
    NearCoincidentCrossings,
    NonImmersion,
    /// A polyline crossing that passes through a vertex.
    VertexCrossing,
    /// Newton refinement from a detected chord crossing did not converge.
    RefinementFailure,
}

impl fmt::Display for DefectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DefectKind::TangentialCrossing => "tangential_crossing",
            DefectKind::TriplePoint => "triple_point",
            DefectKind::NearCoincidentCrossings => "near_coincident_crossings",
            DefectKind::NonImmersion => "non_immersion",
            DefectKind::VertexCrossing => "vertex_crossing",
            DefectKind::RefinementFailure => "refinement_failure",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub kind: DefectKind,
    pub location: Vec2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericityStatus {
    Generic,
    Rejected,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub defects: Vec<Defect>,
}

impl GenericityReport {
    pub fn status(&self) -> GenericityStatus {
        if self.defects.is_empty() {
            GenericityStatus::Generic
        } else {
            GenericityStatus::Rejected
        }
    }

    pub fn is_generic(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn has(&self, kind: DefectKind) -> bool {
        self.defects.iter().any(|d| d.kind == kind)
    }

    fn push(&mut self, kind: DefectKind, location: Vec2) {
        // one entry per place and kind
        if !self
            .defects
            .iter()
            .any(|d| d.kind == kind && d.location.distance(location) < 1e-6)
        {
            self.defects.push(Defect { kind, location });
        }
    }
}

impl fmt::Display for GenericityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.defects.is_empty() {
            return write!(f, "generic");
        }
        let parts: Vec<String> = self
            .defects
            .iter()
            .map(|d| format!("{} at ({:.6}, {:.6})", d.kind, d.location.x, d.location.y))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Endpoint of an arc: which double point and which of its branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ArcEnd {
    pub double_point: usize,
    pub branch: usize,
}

/// Maximal piece of a component between consecutive crossings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcSegment {
    pub component: usize,
    /// Parameter interval `[start, end]`; `end` may exceed the period when the
    /// arc wraps around.
    pub start: f64,
    pub end: f64,
    pub from: Option<ArcEnd>,
    pub to: Option<ArcEnd>,
    /// Integral of the turning rate over the arc.
    pub total_turning: f64,
}

impl ArcSegment {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Crossings together with everything that makes the curve non-generic.
#[derive(Clone, Debug)]
pub struct CrossingScan {
    pub points: Vec<DoublePoint>,
    pub report: GenericityReport,
}

struct Sampled<'a> {
    component: usize,
    path: &'a ClosedPath,
    params: Vec<f64>,
    points: Vec<Vec2>,
    step: f64,
    slack: f64,
    chunks: Vec<Aabb>,
}

impl<'a> Sampled<'a> {
    fn new(component: usize, path: &'a ClosedPath) -> Self {
        let params = path.sample_params();
        let points: Vec<Vec2> = params.iter().map(|&t| path.point(t)).collect();
        let step = path.period() / params.len() as f64;
        let slack = path.chord_deviation(step) * 1.01;
        let n = points.len();
        let chunks = (0..n.div_ceil(CHUNK))
            .map(|c| {
                let mut b = Aabb::empty();
                for j in c * CHUNK..=((c + 1) * CHUNK).min(n) {
                    b.include(points[j % n]);
                }
                b.inflate(slack)
            })
            .collect();
        Sampled {
            component,
            path,
            params,
            points,
            step,
            slack,
            chunks,
        }
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn chord(&self, j: usize) -> (Vec2, Vec2) {
        (self.points[j], self.points[(j + 1) % self.len()])
    }

    fn chunk_range(&self, c: usize) -> std::ops::Range<usize> {
        c * CHUNK..((c + 1) * CHUNK).min(self.len())
    }
}

fn cyclic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

fn solve2(c1: Vec2, c2: Vec2, rhs: Vec2) -> Option<(f64, f64)> {
    let det = c1.cross(c2);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some((rhs.cross(c2) / det, c1.cross(rhs) / det))
}

/// Newton iteration for `Γ_a(t1) = Γ_b(t2)`.
fn refine_crossing(
    a: &ClosedPath,
    b: &ClosedPath,
    mut t1: f64,
    mut t2: f64,
    max_step: f64,
    target: f64,
) -> Option<(f64, f64)> {
    for _ in 0..NEWTON_ITERATIONS {
        let r = a.point(t1) - b.point(t2);
        if r.norm() <= target {
            return Some((t1, t2));
        }
        let (d1, d2) = solve2(a.derivative(t1), -b.derivative(t2), -r)?;
        let len = d1.hypot(d2);
        let scale = if len > max_step { max_step / len } else { 1.0 };
        t1 += d1 * scale;
        t2 += d2 * scale;
    }
    let r = a.point(t1) - b.point(t2);
    (r.norm() <= target).then_some((t1, t2))
}

/// Newton iteration on the gradient of `|Γ_a(t1) - Γ_b(t2)|² / 2`.
/// Returns the parameters and the distance at a stationary point.
fn closest_approach(
    a: &ClosedPath,
    b: &ClosedPath,
    mut t1: f64,
    mut t2: f64,
    max_step: f64,
) -> Option<(f64, f64, f64)> {
    for _ in 0..NEWTON_ITERATIONS {
        let r = a.point(t1) - b.point(t2);
        let (da, db) = (a.derivative(t1), b.derivative(t2));
        let (dda, ddb) = (a.second_derivative(t1), b.second_derivative(t2));
        let g = Vec2::new(r.dot(da), -r.dot(db));
        let h11 = da.norm_squared() + r.dot(dda);
        let h22 = db.norm_squared() - r.dot(ddb);
        let h12 = -da.dot(db);
        // At an exact tangency the Hessian degenerates; the current iterate is
        // then already at the contact.
        let Some((s1, s2)) = solve2(Vec2::new(h11, h12), Vec2::new(h12, h22), -g) else {
            break;
        };
        let len = s1.hypot(s2);
        let scale = if len > max_step { max_step / len } else { 1.0 };
        t1 += s1 * scale;
        t2 += s2 * scale;
        if len < 1e-15 {
            break;
        }
    }
    let d = a.point(t1).distance(b.point(t2));
    d.is_finite().then_some((t1, t2, d))
}

/// Non-oriented angle between `t1` and `-t2`.
fn angle_between(t1: Vec2, t2: Vec2) -> f64 {
    t1.cross(t2).abs().atan2(-t1.dot(t2))
}

fn orient_exact(a: Vec2, b: Vec2, c: Vec2) -> i32 {
    let det = (b - a).cross(c - a);
    let magnitude = ((b.x - a.x) * (c.y - a.y)).abs() + ((b.y - a.y) * (c.x - a.x)).abs();
    if det.abs() > 1e-14 * magnitude {
        return if det > 0.0 { 1 } else { -1 };
    }
    let r = |v: f64| BigRational::from_float(v).expect("finite coordinates");
    let (ax, ay, bx, by, cx, cy) = (r(a.x), r(a.y), r(b.x), r(b.y), r(c.x), r(c.y));
    let det = (bx - ax.clone()) * (cy - ay.clone()) - (by - ay) * (cx - ax);
    if det.is_zero() {
        0
    } else if det.is_positive() {
        1
    } else {
        -1
    }
}

enum Contact {
    None,
    Crossing(f64, f64),
    Degenerate(DefectKind, Vec2),
}

/// Exact classification of two polyline edges.
fn edge_contact(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> Contact {
    let o1 = orient_exact(a0, a1, b0);
    let o2 = orient_exact(a0, a1, b1);
    let o3 = orient_exact(b0, b1, a0);
    let o4 = orient_exact(b0, b1, a1);
    if o1 * o2 > 0 || o3 * o4 > 0 {
        return Contact::None;
    }
    if o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        let (u, v) = segment_intersection(a0, a1, b0, b1).expect("proper crossing");
        return Contact::Crossing(u.clamp(0.0, 1.0), v.clamp(0.0, 1.0));
    }
    if o1 == 0 && o2 == 0 {
        // collinear: overlap means a shared stretch
        let dir = a1 - a0;
        let proj = |p: Vec2| (p - a0).dot(dir) / dir.norm_squared();
        let (lo, hi) = {
            let (x, y) = (proj(b0), proj(b1));
            (x.min(y), x.max(y))
        };
        if hi < 0.0 || lo > 1.0 {
            return Contact::None;
        }
        let mid = a0 + dir * (0.5 * (lo.max(0.0) + hi.min(1.0)));
        return Contact::Degenerate(DefectKind::TangentialCrossing, mid);
    }
    let touch = if o1 == 0 {
        b0
    } else if o2 == 0 {
        b1
    } else if o3 == 0 {
        a0
    } else {
        a1
    };
    Contact::Degenerate(DefectKind::VertexCrossing, touch)
}

struct Collector<'a> {
    curve: &'a Curve,
    tol: &'a Tolerances,
    target: f64,
    points: Vec<DoublePoint>,
    report: GenericityReport,
}

impl<'a> Collector<'a> {
    fn add_refined(&mut self, ca: usize, t1: f64, cb: usize, t2: f64) {
        let pa = &self.curve.components()[ca];
        let pb = &self.curve.components()[cb];
        let (t1, t2) = (pa.wrap(t1), pb.wrap(t2));
        if ca == cb && cyclic_distance(t1, t2, pa.period()) < 1e-6 * pa.period() {
            return;
        }
        let mut branches = [(ca, t1), (cb, t2)];
        branches.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let duplicate = self.points.iter().any(|d| {
            d.branches
                .iter()
                .zip(branches.iter())
                .all(|(old, &(c, t))| {
                    let p = &self.curve.components()[c];
                    old.component == c && cyclic_distance(old.t, t, p.period()) < 1e-7
                })
        });
        if duplicate {
            return;
        }
        let make = |(c, t): (usize, f64)| {
            let p = &self.curve.components()[c];
            Branch {
                component: c,
                t,
                tangent: p.derivative(t).normalized(),
            }
        };
        let (b0, b1) = (make(branches[0]), make(branches[1]));
        let position = pa.point(t1);
        let mut theta = angle_between(b0.tangent, b1.tangent);
        if theta < 1e-3 || theta > PI - 1e-3 {
            // A shallow solution may sit on a tangency; the distance minimum
            // pins the contact point far more sharply than the root does.
            if let Some((s1, s2, dist)) = closest_approach(pa, pb, t1, t2, 1e-2) {
                if dist < self.tol.touch_radius {
                    let (u1, u2) = (pa.derivative(s1).normalized(), pb.derivative(s2).normalized());
                    theta = angle_between(u1, u2);
                }
            }
        }
        if theta < self.tol.angle_guard || theta > PI - self.tol.angle_guard {
            self.report.push(DefectKind::TangentialCrossing, position);
            return;
        }
        self.points.push(DoublePoint {
            position,
            branches: [b0, b1],
            theta,
        });
    }

    fn chord_crossing(&mut self, a: &Sampled, i: usize, b: &Sampled, j: usize, u: f64, v: f64) {
        let t1 = a.params[i] + u * a.step;
        let t2 = b.params[j] + v * b.step;
        let max_step = a.step.max(b.step) * 4.0;
        match refine_crossing(a.path, b.path, t1, t2, max_step, self.target) {
            Some((s1, s2)) => self.add_refined(a.component, s1, b.component, s2),
            None => {
                // No root nearby: either a tangency or a numerical failure.
                match closest_approach(a.path, b.path, t1, t2, max_step) {
                    Some((_, _, d)) if d < self.tol.touch_radius => {
                        self.report
                            .push(DefectKind::TangentialCrossing, a.path.point(t1))
                    }
                    _ => self
                        .report
                        .push(DefectKind::RefinementFailure, a.path.point(t1)),
                }
            }
        }
    }

    fn near_miss(&mut self, a: &Sampled, i: usize, b: &Sampled, j: usize) {
        let t1 = a.params[i] + 0.5 * a.step;
        let t2 = b.params[j] + 0.5 * b.step;
        let max_step = a.step.max(b.step) * 4.0;
        let Some((s1, s2, d)) = closest_approach(a.path, b.path, t1, t2, max_step) else {
            return;
        };
        if d >= self.tol.touch_radius {
            return;
        }
        let theta = angle_between(
            a.path.derivative(s1).normalized(),
            b.path.derivative(s2).normalized(),
        );
        if theta < self.tol.angle_guard || theta > PI - self.tol.angle_guard {
            self.report
                .push(DefectKind::TangentialCrossing, a.path.point(s1));
        } else if let Some((r1, r2)) = refine_crossing(a.path, b.path, s1, s2, max_step, self.target)
        {
            self.add_refined(a.component, r1, b.component, r2);
        }
    }

    fn scan_pair(&mut self, a: &Sampled, b: &Sampled) {
        let same = a.component == b.component;
        let (pa, pb) = (a.path, b.path);
        if let (ClosedPath::Polyline(la), ClosedPath::Polyline(lb)) = (pa, pb) {
            self.scan_polylines(a.component, la, b.component, lb);
            return;
        }
        let margin = self.tol.touch_radius;
        for ka in 0..a.chunks.len() {
            let kb_start = if same { ka } else { 0 };
            for kb in kb_start..b.chunks.len() {
                if !a.chunks[ka].inflate(margin).overlaps(&b.chunks[kb]) {
                    continue;
                }
                for i in a.chunk_range(ka) {
                    for j in b.chunk_range(kb) {
                        if same {
                            let n = a.len();
                            if j <= i || j == i + 1 || (i == 0 && j == n - 1) {
                                continue;
                            }
                        }
                        let (a0, a1) = a.chord(i);
                        let (b0, b1) = b.chord(j);
                        let hit = segment_intersection(a0, a1, b0, b1).filter(|&(u, v)| {
                            (-1e-9..=1.0 + 1e-9).contains(&u) && (-1e-9..=1.0 + 1e-9).contains(&v)
                        });
                        if let Some((u, v)) = hit {
                            self.chord_crossing(a, i, b, j, u, v);
                        } else if a.slack + b.slack > 0.0
                            && segment_segment_distance(a0, a1, b0, b1)
                                < a.slack + b.slack + margin
                        {
                            self.near_miss(a, i, b, j);
                        }
                    }
                }
            }
        }
    }

    fn scan_polylines(&mut self, ca: usize, la: &Polyline, cb: usize, lb: &Polyline) {
        let same = ca == cb;
        let (na, nb) = (la.len(), lb.len());
        for i in 0..na {
            for j in 0..nb {
                if same && (j <= i || j == i + 1 || (i == 0 && j == na - 1)) {
                    continue;
                }
                let (a0, a1) = (la.vertex(i), la.vertex(i + 1));
                let (b0, b1) = (lb.vertex(j), lb.vertex(j + 1));
                match edge_contact(a0, a1, b0, b1) {
                    Contact::None => {}
                    Contact::Crossing(u, v) => {
                        self.add_refined(ca, i as f64 + u, cb, j as f64 + v)
                    }
                    Contact::Degenerate(kind, at) => self.report.push(kind, at),
                }
            }
        }
    }

    fn check_coincidences(&mut self) {
        let scale = self.curve.bounds().diagonal().max(1e-300);
        let near = 1e-6 * scale;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.points[i].position.distance(self.points[j].position);
                if d < self.tol.triple_radius {
                    self.report
                        .push(DefectKind::TriplePoint, self.points[i].position);
                } else if d < near {
                    self.report
                        .push(DefectKind::NearCoincidentCrossings, self.points[i].position);
                }
            }
        }
    }
}

/// Finds every crossing and every genericity defect.
pub fn scan(curve: &Curve, tol: &Tolerances) -> CrossingScan {
    let mut report = GenericityReport::default();
    if let Err(Error::NonImmersion { component, t }) = validate_immersion(curve, tol) {
        let location = curve.components()[component].point(t);
        report.push(DefectKind::NonImmersion, location);
        return CrossingScan {
            points: Vec::new(),
            report,
        };
    }
    let scale = curve.bounds().diagonal().max(1.0);
    let sampled: Vec<Sampled> = curve
        .components()
        .iter()
        .enumerate()
        .map(|(c, p)| Sampled::new(c, p))
        .collect();
    let mut collector = Collector {
        curve,
        tol,
        target: tol.position * scale,
        points: Vec::new(),
        report,
    };
    for a in 0..sampled.len() {
        for b in a..sampled.len() {
            collector.scan_pair(&sampled[a], &sampled[b]);
        }
    }
    collector.check_coincidences();
    let mut points = collector.points;
    points.sort_by(|x, y| {
        let (p, q) = (&x.branches[0], &y.branches[0]);
        p.component
            .cmp(&q.component)
            .then(p.t.partial_cmp(&q.t).unwrap_or(Ordering::Equal))
    });
    CrossingScan {
        points,
        report: collector.report,
    }
}

/// All transversal double points of a generic curve.
pub fn find_double_points(curve: &Curve, tol: &Tolerances) -> Result<Vec<DoublePoint>> {
    let scan = scan(curve, tol);
    if scan.report.is_generic() {
        Ok(scan.points)
    } else {
        Err(Error::NotGeneric(scan.report))
    }
}

/// Crossing angle of a double point, recomputed from its branch tangents.
pub fn crossing_angle(d: &DoublePoint, tol: &Tolerances) -> Result<f64> {
    let theta = angle_between(d.branches[0].tangent, d.branches[1].tangent);
    if theta < tol.angle_guard || theta > PI - tol.angle_guard {
        return Err(Error::NotGeneric(GenericityReport {
            defects: vec![Defect {
                kind: DefectKind::TangentialCrossing,
                location: d.position,
            }],
        }));
    }
    Ok(theta)
}

pub fn certify_generic(curve: &Curve, tol: &Tolerances) -> GenericityReport {
    scan(curve, tol).report
}

/// Cuts every component at its crossing parameters.
pub fn split_arcs(
    curve: &Curve,
    points: &[DoublePoint],
    tol: &Tolerances,
) -> Result<Vec<ArcSegment>> {
    let mut arcs = Vec::new();
    for (component, path) in curve.components().iter().enumerate() {
        let period = path.period();
        let mut cuts: Vec<(f64, ArcEnd)> = points
            .iter()
            .enumerate()
            .flat_map(|(i, d)| {
                d.branches
                    .iter()
                    .enumerate()
                    .filter(move |(_, b)| b.component == component)
                    .map(move |(k, b)| {
                        (
                            b.t,
                            ArcEnd {
                                double_point: i,
                                branch: k,
                            },
                        )
                    })
            })
            .collect();
        cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let first = arcs.len();
        if cuts.is_empty() {
            arcs.push(ArcSegment {
                component,
                start: 0.0,
                end: period,
                from: None,
                to: None,
                total_turning: path.turning_between(0.0, period, tol.quadrature)?,
            });
        } else {
            for k in 0..cuts.len() {
                let (start, from) = cuts[k];
                let (end, to) = if k + 1 < cuts.len() {
                    cuts[k + 1]
                } else {
                    (cuts[0].0 + period, cuts[0].1)
                };
                arcs.push(ArcSegment {
                    component,
                    start,
                    end,
                    from: Some(from),
                    to: Some(to),
                    total_turning: path.turning_between(start, end, tol.quadrature)?,
                });
            }
        }
        let turns: f64 = arcs[first..].iter().map(|a| a.total_turning).sum::<f64>()
            / std::f64::consts::TAU;
        if (turns - turns.round()).abs() >= tol.integrality {
            return Err(Error::RotationNotIntegral { raw: turns });
        }
    }
    Ok(arcs)
}
