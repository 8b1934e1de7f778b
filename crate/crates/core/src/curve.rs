//! Closed oriented plane curves.
//!
//! A [`Curve`] is a list of closed components. Each component is either a
//! trigonometric polynomial with period 2π or an implicitly closed polyline
//! whose parameter runs over `[0, n)`, `n` being the number of vertices
//! (edge `j` is parameter range `[j, j + 1)`).

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::{Aabb, Vec2};
use crate::quadrature;

/// `x(t) = Σ ax[k] cos kt + bx[k] sin kt`, and likewise for `y`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourierPath {
    #[serde(default)]
    pub ax: Vec<f64>,
    #[serde(default)]
    pub bx: Vec<f64>,
    #[serde(default)]
    pub ay: Vec<f64>,
    #[serde(default)]
    pub by: Vec<f64>,
}

fn coeff(v: &[f64], k: usize) -> f64 {
    v.get(k).copied().unwrap_or(0.0)
}

impl FourierPath {
    pub fn new(ax: Vec<f64>, bx: Vec<f64>, ay: Vec<f64>, by: Vec<f64>) -> Self {
        FourierPath { ax, bx, ay, by }
    }

    /// Circle of radius `r` around `center`, counterclockwise when `ccw`.
    pub fn circle(center: Vec2, r: f64, ccw: bool) -> Self {
        let s = if ccw { r } else { -r };
        FourierPath::new(vec![center.x, r], vec![], vec![center.y], vec![0.0, s])
    }

    /// Number of stored frequencies (highest frequency plus one).
    pub fn len(&self) -> usize {
        self.ax
            .len()
            .max(self.bx.len())
            .max(self.ay.len())
            .max(self.by.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Highest frequency with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        (1..self.len())
            .rev()
            .find(|&k| self.amplitude(k) != 0.0)
            .unwrap_or(0)
    }

    fn amplitude(&self, k: usize) -> f64 {
        let (a, b, c, d) = (
            coeff(&self.ax, k),
            coeff(&self.bx, k),
            coeff(&self.ay, k),
            coeff(&self.by, k),
        );
        (a * a + b * b + c * c + d * d).sqrt()
    }

    // order 0: position, 1: first derivative, 2: second derivative
    fn eval(&self, t: f64, order: u32) -> Vec2 {
        let mut out = Vec2::ZERO;
        let start = if order == 0 { 0 } else { 1 };
        for k in start..self.len() {
            let kf = k as f64;
            let (s, c) = (kf * t).sin_cos();
            let (ax, bx, ay, by) = (
                coeff(&self.ax, k),
                coeff(&self.bx, k),
                coeff(&self.ay, k),
                coeff(&self.by, k),
            );
            let (cx, cy) = match order {
                0 => (ax * c + bx * s, ay * c + by * s),
                1 => (kf * (-ax * s + bx * c), kf * (-ay * s + by * c)),
                _ => (-kf * kf * (ax * c + bx * s), -kf * kf * (ay * c + by * s)),
            };
            out += Vec2::new(cx, cy);
        }
        out
    }

    pub fn point(&self, t: f64) -> Vec2 {
        self.eval(t, 0)
    }

    pub fn derivative(&self, t: f64) -> Vec2 {
        self.eval(t, 1)
    }

    pub fn second_derivative(&self, t: f64) -> Vec2 {
        self.eval(t, 2)
    }

    /// Upper bound on `|Γ'(t)|` over the period.
    pub fn speed_bound(&self) -> f64 {
        (1..self.len()).map(|k| k as f64 * self.amplitude(k)).sum()
    }

    /// Upper bound on `|Γ''(t)|` over the period.
    pub fn acceleration_bound(&self) -> f64 {
        (1..self.len())
            .map(|k| (k * k) as f64 * self.amplitude(k))
            .sum()
    }

    /// Turning-angle density `(x'y'' - y'x'') / (x'^2 + y'^2)`.
    pub fn turning_rate(&self, t: f64) -> f64 {
        let d1 = self.derivative(t);
        let d2 = self.second_derivative(t);
        d1.cross(d2) / d1.norm_squared()
    }

    /// Same curve traversed backwards: `t -> -t`.
    pub fn reversed(&self) -> Self {
        FourierPath {
            ax: self.ax.clone(),
            bx: self.bx.iter().map(|v| -v).collect(),
            ay: self.ay.clone(),
            by: self.by.iter().map(|v| -v).collect(),
        }
    }

    /// Reflection in the x-axis.
    pub fn mirrored(&self) -> Self {
        FourierPath {
            ax: self.ax.clone(),
            bx: self.bx.clone(),
            ay: self.ay.iter().map(|v| -v).collect(),
            by: self.by.iter().map(|v| -v).collect(),
        }
    }
}

/// Implicitly closed polygon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub vertices: Vec<Vec2>,
}

impl Polyline {
    pub fn new(vertices: Vec<Vec2>) -> Self {
        Polyline { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, j: usize) -> Vec2 {
        self.vertices[j % self.vertices.len()]
    }

    /// Edge `j` as a vector from vertex `j` to vertex `j + 1`.
    pub fn edge(&self, j: usize) -> Vec2 {
        self.vertex(j + 1) - self.vertex(j)
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.len() as f64;
        let t = t.rem_euclid(n);
        let j = (t.floor() as usize).min(self.len() - 1);
        (j, t - j as f64)
    }

    pub fn point(&self, t: f64) -> Vec2 {
        let (j, frac) = self.locate(t);
        self.vertex(j) + self.edge(j) * frac
    }

    pub fn derivative(&self, t: f64) -> Vec2 {
        self.edge(self.locate(t).0)
    }

    /// Exterior angle at vertex `j`, in (-π, π].
    pub fn vertex_turn(&self, j: usize) -> f64 {
        let n = self.len();
        self.edge((j + n - 1) % n).signed_angle_to(self.edge(j % n))
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = Vec::with_capacity(self.len());
        vertices.push(self.vertices[0]);
        vertices.extend(self.vertices[1..].iter().rev().copied());
        Polyline { vertices }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClosedPath {
    Fourier(FourierPath),
    Polyline(Polyline),
}

impl ClosedPath {
    pub fn period(&self) -> f64 {
        match self {
            ClosedPath::Fourier(_) => TAU,
            ClosedPath::Polyline(p) => p.len() as f64,
        }
    }

    pub fn wrap(&self, t: f64) -> f64 {
        let w = t.rem_euclid(self.period());
        if w >= self.period() {
            0.0
        } else {
            w
        }
    }

    pub fn point(&self, t: f64) -> Vec2 {
        match self {
            ClosedPath::Fourier(f) => f.point(t),
            ClosedPath::Polyline(p) => p.point(t),
        }
    }

    pub fn derivative(&self, t: f64) -> Vec2 {
        match self {
            ClosedPath::Fourier(f) => f.derivative(t),
            ClosedPath::Polyline(p) => p.derivative(t),
        }
    }

    /// Second derivative; zero along polyline edges.
    pub fn second_derivative(&self, t: f64) -> Vec2 {
        match self {
            ClosedPath::Fourier(f) => f.second_derivative(t),
            ClosedPath::Polyline(_) => Vec2::ZERO,
        }
    }

    pub fn is_polyline(&self) -> bool {
        matches!(self, ClosedPath::Polyline(_))
    }

    /// Sample parameters used for polygonal approximations. Polylines use
    /// their vertices, so the approximation is exact.
    pub fn sample_params(&self) -> Vec<f64> {
        match self {
            ClosedPath::Fourier(f) => {
                let n = (256 * f.degree().max(1)).clamp(2048, 16384).next_power_of_two();
                (0..n).map(|j| TAU * j as f64 / n as f64).collect()
            }
            ClosedPath::Polyline(p) => (0..p.len()).map(|j| j as f64).collect(),
        }
    }

    /// Upper bound on the distance between the path and its chord over a
    /// parameter step `h`.
    pub fn chord_deviation(&self, h: f64) -> f64 {
        match self {
            ClosedPath::Fourier(f) => f.acceleration_bound() * h * h / 8.0,
            ClosedPath::Polyline(_) => 0.0,
        }
    }

    pub fn speed_bound(&self) -> f64 {
        match self {
            ClosedPath::Fourier(f) => f.speed_bound(),
            ClosedPath::Polyline(p) => (0..p.len()).map(|j| p.edge(j).norm()).fold(0.0, f64::max),
        }
    }

    /// Total turning of the tangent over the parameter range `(a, b]`, `a <= b`,
    /// `b - a` at most one period. Polyline turning is concentrated at the
    /// vertices, which are counted when they fall in `(a, b]`.
    pub fn turning_between(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        match self {
            ClosedPath::Fourier(f) => {
                let pieces = ((b - a) / (PI / 16.0)).ceil().max(1.0) as usize;
                quadrature::integrate_from_pieces(|t| f.turning_rate(t), a, b, tol, pieces)
            }
            ClosedPath::Polyline(p) => {
                let first = a.floor() as i64 + 1;
                let last = b.floor() as i64;
                let n = p.len() as i64;
                Ok((first..=last)
                    .map(|v| p.vertex_turn(v.rem_euclid(n) as usize))
                    .sum())
            }
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            ClosedPath::Fourier(f) => ClosedPath::Fourier(f.reversed()),
            ClosedPath::Polyline(p) => ClosedPath::Polyline(p.reversed()),
        }
    }

    fn validate(&self, component: usize) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidPath {
            component,
            reason: reason.to_string(),
        };
        match self {
            ClosedPath::Fourier(f) => {
                let all = f.ax.iter().chain(&f.bx).chain(&f.ay).chain(&f.by);
                if all.clone().any(|v| !v.is_finite()) {
                    return Err(invalid("non-finite coefficient"));
                }
                if f.degree() == 0 {
                    return Err(invalid("no nonzero coefficient of positive frequency"));
                }
            }
            ClosedPath::Polyline(p) => {
                if p.len() < 3 {
                    return Err(invalid("polyline needs at least 3 vertices"));
                }
                if p.vertices.iter().any(|v| !v.is_finite()) {
                    return Err(invalid("non-finite vertex"));
                }
                if (0..p.len()).any(|j| p.vertex(j) == p.vertex(j + 1)) {
                    return Err(invalid("consecutive vertices coincide"));
                }
            }
        }
        Ok(())
    }
}

/// A point on a curve together with its unit tangent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub component: usize,
    pub t: f64,
    pub position: Vec2,
    pub tangent: Vec2,
}

/// A closed oriented plane curve with one or more components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveDocument", into = "CurveDocument")]
pub struct Curve {
    components: Vec<ClosedPath>,
}

/// On-disk form of a curve, with optional metadata used by the corpus.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Marks a realization of the standard curve `K_i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_index: Option<i64>,
    pub components: Vec<ClosedPath>,
}

impl TryFrom<CurveDocument> for Curve {
    type Error = Error;
    fn try_from(doc: CurveDocument) -> Result<Self> {
        Curve::new(doc.components)
    }
}

impl From<Curve> for CurveDocument {
    fn from(c: Curve) -> Self {
        CurveDocument {
            name: None,
            standard_index: None,
            components: c.components,
        }
    }
}

impl Curve {
    pub fn new(components: Vec<ClosedPath>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidPath {
                component: 0,
                reason: "curve has no components".into(),
            });
        }
        for (i, c) in components.iter().enumerate() {
            c.validate(i)?;
        }
        Ok(Curve { components })
    }

    pub fn single(path: ClosedPath) -> Result<Self> {
        Curve::new(vec![path])
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curves always serialize")
    }

    pub fn components(&self) -> &[ClosedPath] {
        &self.components
    }

    pub fn component(&self, id: usize) -> Result<&ClosedPath> {
        self.components.get(id).ok_or(Error::UnknownComponent(id))
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn curve_point(&self, component: usize, t: f64) -> Result<CurvePoint> {
        let path = self.component(component)?;
        let d = path.derivative(t);
        let speed = d.norm();
        if !(speed > 0.0) {
            return Err(Error::NonImmersion { component, t });
        }
        Ok(CurvePoint {
            component,
            t,
            position: path.point(t),
            tangent: d * (1.0 / speed),
        })
    }

    /// Bounding box of the sampled curve.
    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::empty();
        for path in &self.components {
            for t in path.sample_params() {
                b.include(path.point(t));
            }
        }
        b
    }

    /// Diagonal of the bounding box of one component.
    pub fn component_diameter(&self, component: usize) -> Result<f64> {
        let path = self.component(component)?;
        let mut b = Aabb::empty();
        for t in path.sample_params() {
            b.include(path.point(t));
        }
        Ok(b.diagonal())
    }

    /// Applies `f` to every coefficient (Fourier) or vertex coordinate
    /// (polyline), in a fixed order. Used to build perturbed copies.
    pub fn map_parameters(&self, mut f: impl FnMut(f64) -> f64) -> Result<Curve> {
        let components = self
            .components
            .iter()
            .map(|c| match c {
                ClosedPath::Fourier(p) => {
                    let mut m = |v: &Vec<f64>| v.iter().map(|x| f(*x)).collect::<Vec<_>>();
                    ClosedPath::Fourier(FourierPath::new(m(&p.ax), m(&p.bx), m(&p.ay), m(&p.by)))
                }
                ClosedPath::Polyline(p) => ClosedPath::Polyline(Polyline::new(
                    p.vertices.iter().map(|v| Vec2::new(f(v.x), f(v.y))).collect(),
                )),
            })
            .collect();
        Curve::new(components)
    }

    /// Applies a map to every point of the curve. Only affine maps keep the
    /// representation exact; the map is applied to coefficients accordingly.
    pub fn transformed(&self, linear: [[f64; 2]; 2], offset: Vec2) -> Curve {
        let apply = |v: Vec2| {
            Vec2::new(
                linear[0][0] * v.x + linear[0][1] * v.y,
                linear[1][0] * v.x + linear[1][1] * v.y,
            )
        };
        let components = self
            .components
            .iter()
            .map(|c| match c {
                ClosedPath::Fourier(p) => {
                    let n = p.len();
                    let (mut ax, mut bx, mut ay, mut by) =
                        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
                    for k in 0..n {
                        let a = apply(Vec2::new(coeff(&p.ax, k), coeff(&p.ay, k)));
                        let b = apply(Vec2::new(coeff(&p.bx, k), coeff(&p.by, k)));
                        (ax[k], ay[k], bx[k], by[k]) = (a.x, a.y, b.x, b.y);
                    }
                    ax[0] += offset.x;
                    ay[0] += offset.y;
                    ClosedPath::Fourier(FourierPath::new(ax, bx, ay, by))
                }
                ClosedPath::Polyline(p) => ClosedPath::Polyline(Polyline::new(
                    p.vertices.iter().map(|&v| apply(v) + offset).collect(),
                )),
            })
            .collect();
        Curve { components }
    }
}

/// Position of `component` at parameter `t`.
pub fn evaluate(curve: &Curve, component: usize, t: f64) -> Result<Vec2> {
    Ok(curve.component(component)?.point(t))
}

/// Signed turning rate of a Fourier component, positive for counterclockwise turning.
pub fn turning_rate(curve: &Curve, component: usize, t: f64) -> Result<f64> {
    match curve.component(component)? {
        ClosedPath::Fourier(f) => {
            if f.derivative(t).norm() <= Tolerances::default().immersion {
                return Err(Error::NonImmersion { component, t });
            }
            Ok(f.turning_rate(t))
        }
        ClosedPath::Polyline(_) => Err(Error::NotSmooth(component)),
    }
}

/// Checks `|Γ'| > threshold` on a uniform sample of every component, and
/// rejects polyline vertices that reverse direction.
pub fn validate_immersion(curve: &Curve, tol: &Tolerances) -> Result<()> {
    for (component, path) in curve.components().iter().enumerate() {
        match path {
            ClosedPath::Fourier(f) => {
                let n = tol.immersion_samples.max(16);
                for j in 0..n {
                    let t = TAU * j as f64 / n as f64;
                    if f.derivative(t).norm() <= tol.immersion {
                        return Err(Error::NonImmersion { component, t });
                    }
                }
            }
            ClosedPath::Polyline(p) => {
                for j in 0..p.len() {
                    if p.vertex_turn(j).abs() >= PI {
                        return Err(Error::NonImmersion {
                            component,
                            t: j as f64,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Turning of the whole component divided by 2π, before rounding.
pub fn raw_rotation(curve: &Curve, component: usize, tol: &Tolerances) -> Result<f64> {
    let path = curve.component(component)?;
    Ok(path.turning_between(0.0, path.period(), tol.quadrature)? / TAU)
}

/// Whitney rotation number of one component.
pub fn rotation_number(curve: &Curve, component: usize) -> Result<i64> {
    let tol = Tolerances::default();
    let raw = raw_rotation(curve, component, &tol)?;
    nearest_integer(raw, tol.integrality).ok_or(Error::RotationNotIntegral { raw })
}

/// Sum of the rotation numbers of all components.
pub fn total_rotation(curve: &Curve) -> Result<i64> {
    (0..curve.len()).map(|c| rotation_number(curve, c)).sum()
}

pub(crate) fn nearest_integer(raw: f64, tol: f64) -> Option<i64> {
    let r = raw.round();
    ((raw - r).abs() < tol).then_some(r as i64)
}

/// Every component traversed in the opposite direction.
pub fn reverse(curve: &Curve) -> Curve {
    Curve {
        components: curve.components.iter().map(ClosedPath::reversed).collect(),
    }
}

/// Amplitude of the secondary harmonic in the `K_i` realizations, `i >= 2`.
fn loop_amplitude(i: i64) -> f64 {
    1.5 / i as f64
}

/// A trigonometric realization of the standard curve `K_i`.
///
/// `K_0` is the figure-eight `(sin 2t, sin t)`, `K_1` the unit circle, and
/// `K_i` for `i >= 2` the epicycloid-like `e^{it} + b e^{iit}`, a circle with
/// `i - 1` small interior loops. Negative indices are mirror images.
pub fn standard_curve(i: i64) -> Curve {
    let path = match i.unsigned_abs() {
        0 => FourierPath::new(vec![], vec![0.0, 0.0, 1.0], vec![], vec![0.0, 1.0]),
        1 => FourierPath::circle(Vec2::ZERO, 1.0, true),
        m => {
            let m = m as usize;
            let b = loop_amplitude(m as i64);
            let mut ax = vec![0.0; m + 1];
            let mut by = vec![0.0; m + 1];
            ax[1] = 1.0;
            by[1] = 1.0;
            ax[m] = b;
            by[m] = b;
            FourierPath::new(ax, vec![], vec![], by)
        }
    };
    let path = if i < 0 { path.mirrored() } else { path };
    Curve::single(ClosedPath::Fourier(path)).expect("standard curves are valid")
}
