//! One-parameter families of curves passing through a single self-tangency
//! or triple point, and the jumps of the invariants across the event.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::crossings::DoublePoint;
use crate::curve::{ClosedPath, Curve, FourierPath};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::indexing::{index_curve, IndexedCurve};
use crate::invariants::{iq_combinatorial, iq_numeric, j_plus_combinatorial, MATCH_TOLERANCE};
use crate::laurent::{ExactLaurent, FloatLaurent};

/// Allowed gap between the numeric jump and the predicted one.
pub const NUMERIC_JUMP_TOLERANCE: f64 = 2e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    DirectTangency,
    OppositeTangency,
    TripleWeak,
    TripleStrong,
}

impl EventKind {
    pub fn is_tangency(self) -> bool {
        matches!(self, EventKind::DirectTangency | EventKind::OppositeTangency)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::DirectTangency => "direct tangency",
            EventKind::OppositeTangency => "opposite tangency",
            EventKind::TripleWeak => "weak triple point",
            EventKind::TripleStrong => "strong triple point",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub index: HalfInt,
    #[serde(default)]
    pub s_event: f64,
}

/// Fourier coefficients that are polynomials in the family parameter:
/// `ax[k][p]` is the coefficient of `s^p` in `ax[k]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyPath {
    #[serde(default)]
    pub ax: Vec<Vec<f64>>,
    #[serde(default)]
    pub bx: Vec<Vec<f64>>,
    #[serde(default)]
    pub ay: Vec<Vec<f64>>,
    #[serde(default)]
    pub by: Vec<Vec<f64>>,
}

fn eval_poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * s + x)
}

fn eval_all(cs: &[Vec<f64>], s: f64) -> Vec<f64> {
    cs.iter().map(|c| eval_poly(c, s)).collect()
}

impl FamilyPath {
    /// A family that does not depend on `s`.
    pub fn fixed(path: &FourierPath) -> Self {
        let lift = |v: &[f64]| v.iter().map(|&x| vec![x]).collect();
        FamilyPath {
            ax: lift(&path.ax),
            bx: lift(&path.bx),
            ay: lift(&path.ay),
            by: lift(&path.by),
        }
    }

    /// Adds `s^power * coefficient` to one coefficient slot.
    pub fn with_term(mut self, slot: Slot, harmonic: usize, power: usize, coefficient: f64) -> Self {
        let v = match slot {
            Slot::Ax => &mut self.ax,
            Slot::Bx => &mut self.bx,
            Slot::Ay => &mut self.ay,
            Slot::By => &mut self.by,
        };
        if v.len() <= harmonic {
            v.resize(harmonic + 1, Vec::new());
        }
        let c = &mut v[harmonic];
        if c.len() <= power {
            c.resize(power + 1, 0.0);
        }
        c[power] += coefficient;
        self
    }

    pub fn at(&self, s: f64) -> FourierPath {
        FourierPath::new(
            eval_all(&self.ax, s),
            eval_all(&self.bx, s),
            eval_all(&self.ay, s),
            eval_all(&self.by, s),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Ax,
    Bx,
    Ay,
    By,
}

fn default_probes() -> [f64; 2] {
    [-0.2, 0.2]
}

/// A family crossing one event between its two probe parameters. Increasing
/// `s` adds double points at tangencies and raises the indices of the
/// vanishing triangle at triple points (see [`event_index`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub family: Vec<FamilyPath>,
    pub event: Event,
    #[serde(default = "default_probes")]
    pub probes: [f64; 2],
}

impl Scenario {
    pub fn at(&self, s: f64) -> Result<Curve> {
        Curve::new(
            self.family
                .iter()
                .map(|f| ClosedPath::Fourier(f.at(s)))
                .collect(),
        )
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios always serialize")
    }

    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Scenario {
            name: self.name.clone(),
            reason: reason.into(),
        }
    }

    fn indexed(&self, s: f64, tol: &Tolerances) -> Result<IndexedCurve> {
        index_curve(&self.at(s)?, tol).map_err(|e| self.fail(format!("probe s = {s}: {e}")))
    }
}

/// `I_q` jump predicted for an event of the given kind and index.
pub fn predicted_jump(kind: EventKind, index: HalfInt) -> ExactLaurent {
    let diff = ExactLaurent::q_half_difference();
    match kind {
        EventKind::OppositeTangency => ExactLaurent::zero(),
        EventKind::DirectTangency => -diff.shift(index),
        EventKind::TripleWeak | EventKind::TripleStrong => {
            (&diff * &diff).shift(index + HalfInt::HALF).scale(-num_rational::Rational64::new(1, 2))
        }
    }
}

/// `J⁺` jump expected across an event in the direction of increasing `s`:
/// a direct tangency adding double points raises it by 2, nothing else moves it.
pub fn predicted_j_plus_jump(kind: EventKind) -> i64 {
    match kind {
        EventKind::DirectTangency => 2,
        _ => 0,
    }
}

fn sorted_indices(ic: &IndexedCurve) -> Vec<HalfInt> {
    let mut v: Vec<HalfInt> = ic.double_points.iter().map(|d| d.index).collect();
    v.sort();
    v
}

/// The three double points closest together, taken to be the vanishing triangle.
fn vanishing_triangle(ic: &IndexedCurve) -> Option<[usize; 3]> {
    let p: Vec<_> = ic.double_points.iter().map(|d| d.point.position).collect();
    let mut best: Option<(f64, [usize; 3])> = None;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            for c in b + 1..p.len() {
                let size = p[a].distance(p[b]).max(p[a].distance(p[c])).max(p[b].distance(p[c]));
                if best.map_or(true, |(s, _)| size < s) {
                    best = Some((size, [a, b, c]));
                }
            }
        }
    }
    best.map(|(_, t)| t)
}

/// Direction of the side joining two double points of the triangle: `true`
/// when the shared strand runs from `a` to `b`.
fn side_direction(curve: &Curve, a: &DoublePoint, b: &DoublePoint) -> Option<bool> {
    let mut best: Option<(f64, bool)> = None;
    for ba in &a.branches {
        for bb in &b.branches {
            if ba.component != bb.component {
                continue;
            }
            let period = curve.components()[ba.component].period();
            let forward = (bb.t - ba.t).rem_euclid(period);
            let backward = period - forward;
            let (gap, a_to_b) = if forward <= backward {
                (forward, true)
            } else {
                (backward, false)
            };
            if best.map_or(true, |(g, _)| gap < g) {
                best = Some((gap, a_to_b));
            }
        }
    }
    best.map(|(_, d)| d)
}

/// Whether the sides of the triangle are oriented coherently around it.
fn triangle_is_cyclic(ic: &IndexedCurve, tri: [usize; 3]) -> Option<bool> {
    let d = |i: usize| &ic.double_points[tri[i]].point;
    let mut out_degree = [0; 3];
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        if side_direction(&ic.curve, d(i), d(j))? {
            out_degree[i] += 1;
        } else {
            out_degree[j] += 1;
        }
    }
    Some(out_degree == [1, 1, 1])
}

fn format_indices(v: [HalfInt; 3]) -> String {
    format!("{{{}, {}, {}}}", v[0], v[1], v[2])
}

/// Measured data about an event: the curves on both sides and its index.
#[derive(Clone, Debug)]
pub struct EventMeasurement {
    pub before: IndexedCurve,
    pub after: IndexedCurve,
    pub index: HalfInt,
}

/// Index of the event between the probes, checked against the declared one.
///
/// For tangencies it is the common index of the two double points born on the
/// `s₊` side. For triple points it is the smallest index among the triangle's
/// double points on either side. The direction is fixed by requiring the
/// triangle's indices to grow with `s`: from `{i, i, i}` to
/// `{i+1, i+1, i+1}` for a cyclic triangle, and from a sum of `3i + 1` to
/// `3i + 2` for an acyclic one.
pub fn event_index(scenario: &Scenario, tol: &Tolerances) -> Result<HalfInt> {
    measure_event(scenario, tol).map(|m| m.index)
}

pub fn measure_event(scenario: &Scenario, tol: &Tolerances) -> Result<EventMeasurement> {
    let [s_minus, s_plus] = scenario.probes;
    let before = scenario.indexed(s_minus, tol)?;
    let after = scenario.indexed(s_plus, tol)?;
    let kind = scenario.event.kind;
    let index = if kind.is_tangency() {
        if after.crossing_count() != before.crossing_count() + 2 {
            return Err(scenario.fail(format!(
                "expected two new double points, found {} -> {}",
                before.crossing_count(),
                after.crossing_count()
            )));
        }
        let mut born = sorted_indices(&after);
        for i in sorted_indices(&before) {
            match born.iter().position(|&x| x == i) {
                Some(p) => {
                    born.remove(p);
                }
                None => return Err(scenario.fail(format!("double point of index {i} vanished"))),
            }
        }
        if born[0] != born[1] {
            return Err(scenario.fail(format!(
                "new double points have indices {} and {}",
                born[0], born[1]
            )));
        }
        born[0]
    } else {
        if after.crossing_count() != before.crossing_count() {
            return Err(scenario.fail("double point count changed at a triple point"));
        }
        let tri_before = vanishing_triangle(&before).ok_or_else(|| scenario.fail("fewer than three double points"))?;
        let tri_after = vanishing_triangle(&after).ok_or_else(|| scenario.fail("fewer than three double points"))?;
        let values = |ic: &IndexedCurve, tri: [usize; 3]| tri.map(|i| ic.double_points[i].index);
        let (vb, va) = (values(&before, tri_before), values(&after, tri_after));
        let index = vb.iter().chain(va.iter()).copied().min().expect("six values");
        let cyclic = triangle_is_cyclic(&after, tri_after)
            .ok_or_else(|| scenario.fail("triangle sides are not on shared strands"))?;
        let declared_cyclic = kind == EventKind::TripleStrong;
        if cyclic != declared_cyclic {
            return Err(scenario.fail(format!(
                "declared {kind} but the vanishing triangle is {}",
                if cyclic { "cyclic" } else { "acyclic" }
            )));
        }
        let sum = |v: [HalfInt; 3]| v.iter().map(|x| x.doubled()).sum::<i64>();
        let base = 3 * index.doubled();
        let expected = if cyclic { (base, base + 6) } else { (base + 2, base + 4) };
        if (sum(vb), sum(va)) != expected {
            return Err(scenario.fail(format!(
                "triangle indices {} -> {} do not increase across the event",
                format_indices(vb),
                format_indices(va)
            )));
        }
        index
    };
    if index != scenario.event.index {
        return Err(scenario.fail(format!(
            "declared index {} but measured {index}",
            scenario.event.index
        )));
    }
    Ok(EventMeasurement {
        before,
        after,
        index,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct JumpReport {
    pub scenario: String,
    pub kind: EventKind,
    pub index: HalfInt,
    pub probes: [f64; 2],
    pub measured: ExactLaurent,
    pub predicted: ExactLaurent,
    pub measured_numeric: FloatLaurent,
    /// Largest coefficient gap between the measured and predicted jump.
    pub max_error: f64,
    pub numeric_error: f64,
    #[serde(rename = "match")]
    pub matches: bool,
    pub numeric_match: bool,
    pub j_plus: [i64; 2],
    pub delta_j_plus: i64,
    pub expected_delta_j_plus: i64,
}

impl JumpReport {
    pub fn j_plus_ok(&self) -> bool {
        self.delta_j_plus == self.expected_delta_j_plus
    }

    pub fn passed(&self) -> bool {
        self.matches && self.numeric_match && self.j_plus_ok()
    }
}

impl fmt::Display for JumpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {} ({} of index {})", self.scenario, self.kind, self.index)?;
        writeln!(f, "measured jump = {}", self.measured)?;
        writeln!(f, "predicted jump = {}", self.predicted)?;
        writeln!(
            f,
            "exact: {} | numeric: {} (error {:.2e})",
            if self.matches { "match" } else { "MISMATCH" },
            if self.numeric_match { "match" } else { "MISMATCH" },
            self.numeric_error
        )?;
        write!(
            f,
            "J+: {} -> {} (jump {}, expected {})",
            self.j_plus[0], self.j_plus[1], self.delta_j_plus, self.expected_delta_j_plus
        )
    }
}

/// Measures the jump of `I_q` and `J⁺` across the event.
pub fn measure_jump(scenario: &Scenario, tol: &Tolerances) -> Result<JumpReport> {
    let m = measure_event(scenario, tol)?;
    let measured = &iq_combinatorial(&m.after) - &iq_combinatorial(&m.before);
    let measured_numeric = &iq_numeric(&m.after) - &iq_numeric(&m.before);
    let predicted = predicted_jump(scenario.event.kind, m.index);
    let max_error = measured.max_coefficient_distance(&predicted);
    let numeric_error = measured_numeric.max_coefficient_distance(&predicted);
    let j_plus = [j_plus_combinatorial(&m.before), j_plus_combinatorial(&m.after)];
    Ok(JumpReport {
        scenario: scenario.name.clone(),
        kind: scenario.event.kind,
        index: m.index,
        probes: scenario.probes,
        matches: max_error < MATCH_TOLERANCE,
        numeric_match: numeric_error < NUMERIC_JUMP_TOLERANCE,
        measured,
        predicted,
        measured_numeric,
        max_error,
        numeric_error,
        j_plus,
        delta_j_plus: j_plus[1] - j_plus[0],
        expected_delta_j_plus: predicted_j_plus_jump(scenario.event.kind),
    })
}

/// Whether `J⁺` jumps as expected across the event.
pub fn j_plus_jump_check(scenario: &Scenario, tol: &Tolerances) -> Result<bool> {
    Ok(measure_jump(scenario, tol)?.j_plus_ok())
}

/// `I_q(s_b) - I_q(s_a)`, exactly; zero whenever no event lies between.
pub fn jump_between(scenario: &Scenario, s_a: f64, s_b: f64, tol: &Tolerances) -> Result<ExactLaurent> {
    let a = scenario.indexed(s_a, tol)?;
    let b = scenario.indexed(s_b, tol)?;
    Ok(&iq_combinatorial(&b) - &iq_combinatorial(&a))
}
