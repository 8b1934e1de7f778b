//! Indices of points relative to a curve, and the smoothing of its crossings.
//!
//! Off the curve the index is the winding number. On the curve it is the
//! average over the adjacent regions, which makes it a half-integer: an odd
//! multiple of ½ along arcs and an integer at double points.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::config::Tolerances;
use crate::crossings::{self, ArcEnd, ArcSegment, DoublePoint};
use crate::curve::{nearest_integer, ClosedPath, Curve};
use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, Vec2};
use crate::halfint::HalfInt;

/// Points closer than this to the curve have no winding number.
const PROXIMITY: f64 = 1e-9;
const INITIAL_PIECES: usize = 64;
/// Largest curvature times probe offset near a probed point.
const STRAIGHTNESS: f64 = 0.05;
/// Arc fractions probed by the constancy audit; the first is the midpoint.
const AUDIT_FRACTIONS: [f64; 4] = [0.5, 0.25, 0.75, 0.125];

fn angle_sum_fourier(path: &ClosedPath, p: Vec2) -> Result<f64> {
    let speed = path.speed_bound();
    let step = TAU / INITIAL_PIECES as f64;
    let mut stack: Vec<(f64, Vec2, f64, Vec2)> = (0..INITIAL_PIECES)
        .map(|j| {
            let (t0, t1) = (step * j as f64, step * (j + 1) as f64);
            (t0, path.point(t0), t1, path.point(t1))
        })
        .collect();
    let mut total = 0.0;
    while let Some((t0, a, t1, b)) = stack.pop() {
        let (ra, rb) = (a - p, b - p);
        if ra.norm() < PROXIMITY {
            return Err(Error::TooCloseToCurve(p));
        }
        // The arc stays inside the ellipse with foci a, b and major axis
        // speed * (t1 - t0); outside it the chord angle is the arc angle.
        if ra.norm() + rb.norm() > speed * (t1 - t0) * (1.0 + 1e-12) {
            total += ra.signed_angle_to(rb);
            continue;
        }
        if t1 - t0 < 1e-13 {
            return Err(Error::TooCloseToCurve(p));
        }
        let tm = 0.5 * (t0 + t1);
        let m = path.point(tm);
        stack.push((t0, a, tm, m));
        stack.push((tm, m, t1, b));
    }
    Ok(total)
}

fn angle_sum(path: &ClosedPath, p: Vec2) -> Result<f64> {
    match path {
        ClosedPath::Fourier(_) => angle_sum_fourier(path, p),
        ClosedPath::Polyline(poly) => {
            let mut total = 0.0;
            for j in 0..poly.len() {
                let (a, b) = (poly.vertex(j), poly.vertex(j + 1));
                if point_segment_distance(p, a, b) < PROXIMITY {
                    return Err(Error::TooCloseToCurve(p));
                }
                total += (a - p).signed_angle_to(b - p);
            }
            Ok(total)
        }
    }
}

/// Winding number of the curve around `p`, summed over components.
pub fn winding_number(curve: &Curve, p: Vec2) -> Result<i64> {
    let raw: f64 = curve
        .components()
        .iter()
        .map(|c| angle_sum(c, p))
        .sum::<Result<f64>>()?
        / TAU;
    nearest_integer(raw, Tolerances::default().integrality)
        .ok_or(Error::WindingNotIntegral { raw })
}

/// Chords of every component, for distance queries.
struct ChordCache<'a> {
    curve: &'a Curve,
    // per component: sample params, points, parameter step, chord deviation bound
    samples: Vec<(Vec<f64>, Vec<Vec2>, f64, f64)>,
    diameters: Vec<f64>,
}

impl<'a> ChordCache<'a> {
    fn new(curve: &'a Curve) -> Result<Self> {
        let mut samples = Vec::with_capacity(curve.len());
        let mut diameters = Vec::with_capacity(curve.len());
        for (c, path) in curve.components().iter().enumerate() {
            let params = path.sample_params();
            let points: Vec<Vec2> = params.iter().map(|&t| path.point(t)).collect();
            let step = path.period() / params.len() as f64;
            samples.push((params, points, step, path.chord_deviation(step)));
            diameters.push(curve.component_diameter(c)?);
        }
        Ok(ChordCache {
            curve,
            samples,
            diameters,
        })
    }

    /// Whether every point of the curve outside the windows
    /// `(component, center, inner)` is at least `needed` away from `q`.
    /// Chords are bisected until their error bound settles the question.
    fn clears(&self, q: Vec2, windows: &[(usize, f64, f64)], needed: f64) -> bool {
        self.samples.iter().enumerate().all(|(c, (params, points, step, _))| {
            let n = points.len();
            (0..n).all(|j| {
                let piece = (params[j], params[j] + step, points[j], points[(j + 1) % n]);
                self.piece_clears(c, q, piece, windows, needed, 0)
            })
        })
    }

    fn piece_clears(
        &self,
        c: usize,
        q: Vec2,
        (a, b, pa, pb): (f64, f64, Vec2, Vec2),
        windows: &[(usize, f64, f64)],
        needed: f64,
        depth: usize,
    ) -> bool {
        let path = &self.curve.components()[c];
        let period = path.period();
        let mut partial = false;
        for &(wc, center, inner) in windows {
            if wc != c {
                continue;
            }
            let mut da = (a - center).rem_euclid(period);
            if da > 0.5 * period {
                da -= period;
            }
            let db = da + (b - a);
            if da >= -inner && db <= inner {
                return true;
            }
            if db >= -inner && da <= inner {
                partial = true;
            }
        }
        let deviation = path.chord_deviation(b - a);
        if point_segment_distance(q, pa, pb) - deviation >= needed {
            return true;
        }
        if !partial && deviation < 0.25 * needed {
            return false;
        }
        if b - a < 1e-12 || depth > 64 {
            // a sliver at the edge of a window lies about a window radius away
            return partial;
        }
        let m = 0.5 * (a + b);
        let pm = path.point(m);
        self.piece_clears(c, q, (a, m, pa, pm), windows, needed, depth + 1)
            && self.piece_clears(c, q, (m, b, pm, pb), windows, needed, depth + 1)
    }

    /// Whether the curve is close to straight on the parameters within
    /// `inner` of `t`: bounded curvature relative to `eps` and no vertex or
    /// large change of speed.
    fn locally_straight(&self, c: usize, t: f64, inner: f64, eps: f64, bend: f64) -> bool {
        let path = &self.curve.components()[c];
        match path {
            ClosedPath::Polyline(_) => (t - inner).floor() == (t + inner).floor(),
            ClosedPath::Fourier(f) => {
                let speed = f.derivative(t).norm();
                (0..=16).all(|k| {
                    let s = t - inner + 2.0 * inner * k as f64 / 16.0;
                    let v = f.derivative(s).norm();
                    let curvature = f.turning_rate(s).abs() / v;
                    v > 0.5 * speed && v < 2.0 * speed && curvature * eps <= bend
                })
            }
        }
    }

    /// Offset that keeps probes around `position` inside the regions adjacent
    /// to it. `bend` caps curvature times offset along the branches through
    /// `position`; crossings at shallow angles need it smaller.
    fn probe_offset(&self, position: Vec2, at: &[(usize, f64)], bend: f64) -> Result<f64> {
        let mut eps = at
            .iter()
            .map(|&(c, _)| 1e-3 * self.diameters[c])
            .fold(f64::INFINITY, f64::min);
        while eps > 10.0 * PROXIMITY {
            let windows: Vec<(usize, f64, f64)> = at
                .iter()
                .map(|&(c, t)| {
                    let speed = self.curve.components()[c].derivative(t).norm();
                    (c, t, 4.0 * eps / speed)
                })
                .collect();
            let straight = windows
                .iter()
                .all(|&(c, t, inner)| self.locally_straight(c, t, inner, eps, bend));
            if straight && self.clears(position, &windows, 1.5 * eps) {
                return Ok(eps);
            }
            eps *= 0.5;
        }
        Err(Error::TooCloseToCurve(position))
    }
}

/// Probe parameters inside an arc, avoiding polyline vertices.
fn audit_params(path: &ClosedPath, arc: &ArcSegment) -> Vec<f64> {
    match path {
        ClosedPath::Fourier(_) => AUDIT_FRACTIONS
            .iter()
            .map(|f| arc.start + f * arc.length())
            .collect(),
        ClosedPath::Polyline(_) => {
            let mut cuts = vec![arc.start];
            let mut v = arc.start.floor() + 1.0;
            while v < arc.end {
                cuts.push(v);
                v += 1.0;
            }
            cuts.push(arc.end);
            let mut pieces: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
            let mut params: Vec<f64> = pieces.iter().map(|(a, b)| 0.5 * (a + b)).collect();
            pieces.sort_by(|x, y| (y.1 - y.0).total_cmp(&(x.1 - x.0)));
            let (a, b) = pieces[0];
            for f in &AUDIT_FRACTIONS[1..] {
                if params.len() >= AUDIT_FRACTIONS.len() {
                    break;
                }
                params.push(a + f * (b - a));
            }
            params.truncate(AUDIT_FRACTIONS.len());
            params
        }
    }
}

/// Sum of the windings on the left and on the right of the curve at `t`,
/// i.e. twice the on-curve index.
fn straddle(cache: &ChordCache, component: usize, t: f64) -> Result<i64> {
    let point = cache.curve.curve_point(component, t)?;
    let eps = cache.probe_offset(point.position, &[(component, t)], STRAIGHTNESS)?;
    let normal = point.tangent.perp();
    let left = winding_number(cache.curve, point.position + normal * eps)?;
    let right = winding_number(cache.curve, point.position - normal * eps)?;
    if left - right != 1 {
        return Err(Error::ProbeStraddle {
            component,
            t,
            difference: left - right,
        });
    }
    Ok(left + right)
}

/// Index of the points of an arc, audited at several interior parameters.
pub fn arc_index(curve: &Curve, arc: &ArcSegment, id: usize) -> Result<HalfInt> {
    let cache = ChordCache::new(curve)?;
    arc_index_cached(&cache, arc, id)
}

fn arc_index_cached(cache: &ChordCache, arc: &ArcSegment, id: usize) -> Result<HalfInt> {
    let path = cache.curve.component(arc.component)?;
    let mut value = None;
    for t in audit_params(path, arc) {
        let doubled = straddle(cache, arc.component, path.wrap(t))?;
        match value {
            None => value = Some(doubled),
            Some(v) if v != doubled => return Err(Error::ConstancyAudit { arc: id }),
            Some(_) => {}
        }
    }
    Ok(HalfInt::from_doubled(value.expect("at least one probe")))
}

/// Index at a double point as the mean of the four adjacent region values.
fn double_point_index_by_probes(cache: &ChordCache, d: &DoublePoint) -> Result<HalfInt> {
    let at: Vec<(usize, f64)> = d.branches.iter().map(|b| (b.component, b.t)).collect();
    let (u, v) = (d.branches[0].tangent, d.branches[1].tangent);
    // probes on the diagonals sit eps * sin(half angle) away from the branches
    let half = 0.5 * d.theta;
    let eps = cache.probe_offset(d.position, &at, STRAIGHTNESS * half.sin().min(half.cos()))?;
    let diagonals = [u + v, u - v, -(u + v), v - u];
    let mut sum = 0;
    for dir in diagonals {
        sum += winding_number(cache.curve, d.position + dir.normalized() * eps)?;
    }
    if sum % 2 != 0 {
        return Err(Error::Internal(format!(
            "quadrant windings around {:?} sum to {sum}",
            d.position
        )));
    }
    Ok(HalfInt::from_doubled(sum / 2))
}

/// Incoming and outgoing arc of every branch of every double point.
fn incidence(arcs: &[ArcSegment], n_points: usize) -> Vec<[(usize, usize); 2]> {
    let mut table = vec![[(usize::MAX, usize::MAX); 2]; n_points];
    for (i, arc) in arcs.iter().enumerate() {
        if let Some(ArcEnd {
            double_point,
            branch,
        }) = arc.to
        {
            table[double_point][branch].0 = i;
        }
        if let Some(ArcEnd {
            double_point,
            branch,
        }) = arc.from
        {
            table[double_point][branch].1 = i;
        }
    }
    table
}

/// Index of a double point: the mean of the indices of the arcs entering and
/// leaving it along each branch, cross-checked by probing the four quadrants.
pub fn double_point_index(
    curve: &Curve,
    arcs: &[IndexedArc],
    points: &[DoublePoint],
    id: usize,
) -> Result<HalfInt> {
    let cache = ChordCache::new(curve)?;
    let plain: Vec<ArcSegment> = arcs.iter().map(|a| a.arc).collect();
    let indices: Vec<HalfInt> = arcs.iter().map(|a| a.index).collect();
    let table = incidence(&plain, points.len());
    double_point_index_cached(&cache, &indices, &table[id], &points[id], id)
}

fn double_point_index_cached(
    cache: &ChordCache,
    arc_indices: &[HalfInt],
    incident: &[(usize, usize); 2],
    d: &DoublePoint,
    id: usize,
) -> Result<HalfInt> {
    let mut from_arcs = None;
    for &(incoming, outgoing) in incident {
        let (a, b) = (arc_indices[incoming].doubled(), arc_indices[outgoing].doubled());
        if (a - b).abs() != 2 {
            return Err(Error::Internal(format!(
                "arcs through double point {id} have indices {} and {}",
                arc_indices[incoming], arc_indices[outgoing]
            )));
        }
        let mean = HalfInt::from_doubled((a + b) / 2);
        match from_arcs {
            Some(m) if m != mean => {
                return Err(Error::DoublePointIndexMismatch {
                    point: id,
                    from_arcs: format!("{m} vs {mean}"),
                    from_probes: "-".into(),
                })
            }
            _ => from_arcs = Some(mean),
        }
    }
    let from_arcs = from_arcs.expect("two branches");
    let from_probes = double_point_index_by_probes(cache, d)?;
    if from_arcs != from_probes {
        return Err(Error::DoublePointIndexMismatch {
            point: id,
            from_arcs: from_arcs.to_string(),
            from_probes: from_probes.to_string(),
        });
    }
    Ok(from_arcs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexedArc {
    #[serde(flatten)]
    pub arc: ArcSegment,
    pub index: HalfInt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexedDoublePoint {
    #[serde(flatten)]
    pub point: DoublePoint,
    pub index: HalfInt,
}

/// One component of the smoothed curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothedComponent {
    /// Arc ids in traversal order.
    pub arcs: Vec<usize>,
    pub rotation: i64,
    pub index: HalfInt,
    /// Arc turnings plus the corner turns at the smoothed crossings.
    pub turning: f64,
}

/// A generic curve with all on-curve indices and its smoothing.
#[derive(Clone, Debug)]
pub struct IndexedCurve {
    pub curve: Curve,
    pub double_points: Vec<IndexedDoublePoint>,
    pub arcs: Vec<IndexedArc>,
    pub smoothed: Vec<SmoothedComponent>,
}

/// Smooths every double point respecting orientation: the arc entering along
/// one branch continues along the arc leaving on the other branch.
pub fn smooth(
    arcs: &[IndexedArc],
    points: &[DoublePoint],
    tol: &Tolerances,
) -> Result<Vec<SmoothedComponent>> {
    let plain: Vec<ArcSegment> = arcs.iter().map(|a| a.arc).collect();
    let table = incidence(&plain, points.len());
    let mut visited = vec![false; arcs.len()];
    let mut components = Vec::new();
    for start in 0..arcs.len() {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut turning = 0.0;
        let mut current = start;
        loop {
            visited[current] = true;
            cycle.push(current);
            turning += arcs[current].arc.total_turning;
            let next = match arcs[current].arc.to {
                None => current,
                Some(ArcEnd {
                    double_point,
                    branch,
                }) => {
                    let d = &points[double_point];
                    let other = 1 - branch;
                    // the smoothed corner turns the short way between the tangents
                    turning += d.branches[branch]
                        .tangent
                        .signed_angle_to(d.branches[other].tangent);
                    table[double_point][other].1
                }
            };
            if next == start {
                break;
            }
            if visited[next] {
                return Err(Error::Internal(format!(
                    "smoothing walk from arc {start} re-entered arc {next}"
                )));
            }
            current = next;
        }
        let id = components.len();
        let index = arcs[cycle[0]].index;
        if cycle.iter().any(|&a| arcs[a].index != index) {
            return Err(Error::SmoothingIndexMismatch { component: id });
        }
        let turns = turning / TAU;
        let rotation = match nearest_integer(turns, tol.integrality) {
            Some(r @ (1 | -1)) => r,
            _ => return Err(Error::SmoothingRotation { component: id, turns }),
        };
        components.push(SmoothedComponent {
            arcs: cycle,
            rotation,
            index,
            turning,
        });
    }
    Ok(components)
}

/// Runs crossing detection, arc splitting, indexing, and smoothing.
pub fn index_curve(curve: &Curve, tol: &Tolerances) -> Result<IndexedCurve> {
    let points = crossings::find_double_points(curve, tol)?;
    let arcs = crossings::split_arcs(curve, &points, tol)?;
    let cache = ChordCache::new(curve)?;
    let arcs: Vec<IndexedArc> = arcs
        .iter()
        .enumerate()
        .map(|(i, arc)| {
            Ok(IndexedArc {
                arc: *arc,
                index: arc_index_cached(&cache, arc, i)?,
            })
        })
        .collect::<Result<_>>()?;
    let plain: Vec<ArcSegment> = arcs.iter().map(|a| a.arc).collect();
    let arc_indices: Vec<HalfInt> = arcs.iter().map(|a| a.index).collect();
    let table = incidence(&plain, points.len());
    let double_points = points
        .iter()
        .enumerate()
        .map(|(i, d)| {
            Ok(IndexedDoublePoint {
                point: *d,
                index: double_point_index_cached(&cache, &arc_indices, &table[i], d, i)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let smoothed = smooth(&arcs, &points, tol)?;
    Ok(IndexedCurve {
        curve: curve.clone(),
        double_points,
        arcs,
        smoothed,
    })
}

impl IndexedCurve {
    pub fn points(&self) -> Vec<DoublePoint> {
        self.double_points.iter().map(|d| d.point).collect()
    }

    pub fn crossing_count(&self) -> usize {
        self.double_points.len()
    }

    pub fn dump(&self) -> IndexedDump {
        IndexedDump {
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcDump {
                    component: a.arc.component,
                    interval: [a.arc.start, a.arc.end],
                    index: a.index,
                    turning: a.arc.total_turning,
                })
                .collect(),
            double_points: self
                .double_points
                .iter()
                .map(|d| PointDump {
                    position: d.point.position,
                    t1: d.point.branches[0].t,
                    t2: d.point.branches[1].t,
                    theta: d.point.theta,
                    index: d.index,
                })
                .collect(),
            smoothed: self
                .smoothed
                .iter()
                .map(|s| SmoothedDump {
                    rotation: s.rotation,
                    index: s.index,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcDump {
    pub component: usize,
    pub interval: [f64; 2],
    pub index: HalfInt,
    pub turning: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointDump {
    pub position: Vec2,
    pub t1: f64,
    pub t2: f64,
    pub theta: f64,
    pub index: HalfInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothedDump {
    pub rotation: i64,
    pub index: HalfInt,
}

/// JSON form of an [`IndexedCurve`].
#[derive(Clone, Debug, Serialize)]
pub struct IndexedDump {
    pub arcs: Vec<ArcDump>,
    pub double_points: Vec<PointDump>,
    pub smoothed: Vec<SmoothedDump>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{reverse, standard_curve, FourierPath, Polyline};
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn h(d: i64) -> HalfInt {
        HalfInt::from_doubled(d)
    }

    fn limacon() -> Curve {
        Curve::single(ClosedPath::Fourier(FourierPath::new(
            vec![0.0, 1.0, 0.75],
            vec![],
            vec![],
            vec![0.0, 1.0, 0.75],
        )))
        .unwrap()
    }

    /// Signed ray-crossing count along +x, an independent winding oracle.
    fn ray_winding(curve: &Curve, p: Vec2) -> i64 {
        let mut w = 0;
        for path in curve.components() {
            let n = 100_000;
            let pts: Vec<Vec2> = (0..n)
                .map(|j| path.point(path.period() * j as f64 / n as f64))
                .collect();
            for j in 0..n {
                let (a, b) = (pts[j], pts[(j + 1) % n]);
                if (a.y <= p.y) != (b.y <= p.y) {
                    let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                    if x > p.x {
                        w += if b.y > a.y { 1 } else { -1 };
                    }
                }
            }
        }
        w
    }

    #[test]
    fn circle_windings() {
        let c = standard_curve(1);
        assert_eq!(winding_number(&c, Vec2::ZERO).unwrap(), 1);
        assert_eq!(winding_number(&c, Vec2::new(2.0, 0.0)).unwrap(), 0);
        assert_eq!(winding_number(&reverse(&c), Vec2::ZERO).unwrap(), -1);
        assert!(matches!(
            winding_number(&c, Vec2::new(1.0, 0.0)),
            Err(Error::TooCloseToCurve(_))
        ));
    }

    #[test]
    fn figure_eight_lobes() {
        // lobes are above and below the origin
        let c = standard_curve(0);
        let up = Vec2::new(0.0, 0.7);
        let down = Vec2::new(0.0, -0.7);
        assert_eq!(winding_number(&c, up).unwrap(), ray_winding(&c, up));
        assert_eq!(winding_number(&c, down).unwrap(), ray_winding(&c, down));
        let (wu, wd) = (winding_number(&c, up).unwrap(), winding_number(&c, down).unwrap());
        assert_eq!(wu + wd, 0);
        assert_eq!(wu.abs(), 1);
    }

    #[test]
    fn winding_matches_ray_oracle_on_a_grid() {
        for c in [limacon(), standard_curve(3), standard_curve(-2)] {
            for i in -4..=4 {
                for j in -4..=4 {
                    let p = Vec2::new(0.37 * i as f64 + 0.011, 0.41 * j as f64 + 0.007);
                    if let Ok(w) = winding_number(&c, p) {
                        assert_eq!(w, ray_winding(&c, p), "{p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn polyline_winding_is_exact() {
        let square = Curve::single(ClosedPath::Polyline(Polyline::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])))
        .unwrap();
        assert_eq!(winding_number(&square, Vec2::new(0.5, 0.5)).unwrap(), 1);
        assert_eq!(winding_number(&square, Vec2::new(1.5, 0.5)).unwrap(), 0);
        assert!(winding_number(&square, Vec2::new(1.0, 0.5)).is_err());
    }

    #[test]
    fn circle_index() {
        let ic = index_curve(&standard_curve(1), &tol()).unwrap();
        assert_eq!(ic.arcs.len(), 1);
        assert_eq!(ic.arcs[0].index, h(1));
        assert_eq!(ic.smoothed.len(), 1);
        assert_eq!(ic.smoothed[0].rotation, 1);
        assert_eq!(ic.smoothed[0].index, h(1));
    }

    #[test]
    fn figure_eight_indices_and_smoothing() {
        let ic = index_curve(&standard_curve(0), &tol()).unwrap();
        let mut arc_idx: Vec<HalfInt> = ic.arcs.iter().map(|a| a.index).collect();
        arc_idx.sort();
        assert_eq!(arc_idx, vec![h(-1), h(1)]);
        assert_eq!(ic.double_points[0].index, h(0));
        let mut smoothed: Vec<(HalfInt, i64)> =
            ic.smoothed.iter().map(|s| (s.index, s.rotation)).collect();
        smoothed.sort();
        assert_eq!(smoothed, vec![(h(-1), -1), (h(1), 1)]);
    }

    #[test]
    fn limacon_indices_and_smoothing() {
        let ic = index_curve(&limacon(), &tol()).unwrap();
        let mut arc_idx: Vec<HalfInt> = ic.arcs.iter().map(|a| a.index).collect();
        arc_idx.sort();
        assert_eq!(arc_idx, vec![h(1), h(3)]);
        assert_eq!(ic.double_points.len(), 1);
        assert_eq!(ic.double_points[0].index, h(2));
        let mut smoothed: Vec<(HalfInt, i64)> =
            ic.smoothed.iter().map(|s| (s.index, s.rotation)).collect();
        smoothed.sort();
        assert_eq!(smoothed, vec![(h(1), 1), (h(3), 1)]);
    }

    #[test]
    fn reversal_negates_indices() {
        for c in [limacon(), standard_curve(0), standard_curve(4)] {
            let a = index_curve(&c, &tol()).unwrap();
            let b = index_curve(&reverse(&c), &tol()).unwrap();
            let mut ia: Vec<i64> = a.double_points.iter().map(|d| -d.index.doubled()).collect();
            let mut ib: Vec<i64> = b.double_points.iter().map(|d| d.index.doubled()).collect();
            ia.sort();
            ib.sort();
            assert_eq!(ia, ib);
            let mut sa: Vec<i64> = a.smoothed.iter().map(|s| -s.index.doubled()).collect();
            let mut sb: Vec<i64> = b.smoothed.iter().map(|s| s.index.doubled()).collect();
            sa.sort();
            sb.sort();
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn mirror_negates_indices() {
        let c = standard_curve(3);
        let m = c.transformed([[1.0, 0.0], [0.0, -1.0]], Vec2::ZERO);
        let a = index_curve(&c, &tol()).unwrap();
        let b = index_curve(&m, &tol()).unwrap();
        let mut ia: Vec<i64> = a.double_points.iter().map(|d| -d.index.doubled()).collect();
        let mut ib: Vec<i64> = b.double_points.iter().map(|d| d.index.doubled()).collect();
        ia.sort();
        ib.sort();
        assert_eq!(ia, ib);
    }

    #[test]
    fn standalone_operations_agree_with_pipeline() {
        let c = standard_curve(3);
        let ic = index_curve(&c, &tol()).unwrap();
        for (i, a) in ic.arcs.iter().enumerate() {
            assert_eq!(arc_index(&c, &a.arc, i).unwrap(), a.index);
        }
        let pts = ic.points();
        for (i, d) in ic.double_points.iter().enumerate() {
            assert_eq!(double_point_index(&c, &ic.arcs, &pts, i).unwrap(), d.index);
        }
    }

    #[test]
    fn mislabeled_arc_breaks_smoothing() {
        let mut ic = index_curve(&standard_curve(4), &tol()).unwrap();
        let long = ic.smoothed.iter().find(|s| s.arcs.len() > 1).unwrap().arcs[0];
        ic.arcs[long].index = ic.arcs[long].index + HalfInt::from_int(1);
        assert!(smooth(&ic.arcs, &ic.points(), &tol()).is_err());
    }

    #[test]
    fn dump_shape() {
        let ic = index_curve(&standard_curve(0), &tol()).unwrap();
        let v = serde_json::to_value(ic.dump()).unwrap();
        assert_eq!(v["arcs"].as_array().unwrap().len(), 2);
        assert_eq!(v["double_points"][0]["index"], 0.0);
        assert!(v["smoothed"][0]["rotation"].is_i64());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Left of the orientation the winding number is one more than on the right.
        #[test]
        fn adjacent_region_rule(t in 0.0f64..TAU, which in 0usize..3) {
            let c = [standard_curve(0), limacon(), standard_curve(-3)][which].clone();
            let path = c.component(0).unwrap();
            let p = path.point(t);
            let n = path.derivative(t).normalized().perp();
            let pts = crossings::find_double_points(&c, &tol()).unwrap();
            prop_assume!(pts.iter().all(|d| d.position.distance(p) > 0.05));
            let eps = 1e-4;
            let left = winding_number(&c, p + n * eps).unwrap();
            let right = winding_number(&c, p - n * eps).unwrap();
            prop_assert_eq!(left - right, 1);
        }
    }
}
