//! The quantized total curvature and the invariants derived from it.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde::Serialize;

use crate::config::Tolerances;
use crate::curve::{nearest_integer, reverse, total_rotation, Curve};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::indexing::{index_curve, IndexedCurve};
use crate::laurent::{ExactLaurent, FloatLaurent};

/// Coefficientwise agreement required between the two routes.
pub const MATCH_TOLERANCE: f64 = 1e-6;

fn half() -> Rational64 {
    Rational64::new(1, 2)
}

/// `I_q` from turning integrals and crossing angles.
pub fn iq_numeric(indexed: &IndexedCurve) -> FloatLaurent {
    let mut out = FloatLaurent::zero();
    for a in &indexed.arcs {
        out.add_term(a.index, a.arc.total_turning / TAU);
    }
    let diff = FloatLaurent::q_half_difference();
    for d in &indexed.double_points {
        out = &out - &diff.shift(d.index).scale(d.point.theta / TAU);
    }
    out
}

/// `I_q` from the smoothing: each smoothed component contributes
/// `rot q^ind`, each crossing `-½ q^ind (q^½ - q^-½)`.
pub fn iq_combinatorial(indexed: &IndexedCurve) -> ExactLaurent {
    let mut out = ExactLaurent::zero();
    for s in &indexed.smoothed {
        out.add_term(s.index, Rational64::from_integer(s.rotation));
    }
    let diff = ExactLaurent::q_half_difference().scale(half());
    for d in &indexed.double_points {
        out = &out - &diff.shift(d.index);
    }
    out
}

/// Unrounded `J⁺` from the integral formula.
pub fn j_plus_integral_raw(indexed: &IndexedCurve) -> f64 {
    let weighted: f64 = indexed
        .arcs
        .iter()
        .map(|a| a.arc.total_turning * a.index.to_f64())
        .sum();
    let angles: f64 = indexed.double_points.iter().map(|d| d.point.theta).sum();
    1.0 - (weighted - angles) / PI
}

pub fn j_plus_integral(indexed: &IndexedCurve) -> Result<i64> {
    let raw = j_plus_integral_raw(indexed);
    nearest_integer(raw, MATCH_TOLERANCE)
        .ok_or_else(|| Error::Internal(format!("J+ integral evaluates to {raw}")))
}

/// `J⁺ = 1 + #crossings - 2 Σ rot ind` over the smoothed components.
pub fn j_plus_combinatorial(indexed: &IndexedCurve) -> i64 {
    let doubled: i64 = indexed
        .smoothed
        .iter()
        .map(|s| s.rotation * s.index.doubled())
        .sum();
    1 + indexed.crossing_count() as i64 - doubled
}

/// Viro's polynomial, recovered from `I_q`. Always has integer exponents and
/// coefficients; anything else is reported as an internal error.
pub fn viro_polynomial(indexed: &IndexedCurve) -> Result<ExactLaurent> {
    let diff = ExactLaurent::q_half_difference();
    let square = &diff * &diff;
    let mut out = &(&diff * &iq_combinatorial(indexed)) + &ExactLaurent::constant(1.into());
    for d in &indexed.double_points {
        out = &out + &square.shift(d.index).scale(half());
    }
    if !out.is_integral() {
        return Err(Error::Internal(format!("non-integral Viro polynomial {out}")));
    }
    Ok(out)
}

/// Closed form of `I_q` on the standard curve `K_i`.
pub fn standard_iq(i: i64) -> ExactLaurent {
    match i {
        0 => ExactLaurent::q_half_difference().scale(half()),
        i if i > 0 => ExactLaurent::from_terms([
            (HalfInt::from_doubled(3), Rational64::new(i - 1, 2)),
            (HalfInt::from_doubled(1), Rational64::new(i + 1, 2)),
        ]),
        i => -standard_iq(-i).invert_q(),
    }
}

/// `J⁺` of the standard curve `K_i`.
pub fn standard_j_plus(i: i64) -> i64 {
    if i == 0 {
        0
    } else {
        -2 * (i.abs() - 1)
    }
}

type Rule = Arc<dyn Fn(HalfInt) -> f64 + Send + Sync>;

/// A real function on half-integers: explicit table entries, then an optional rule.
#[derive(Clone, Default)]
pub struct IndexWeight {
    table: BTreeMap<HalfInt, f64>,
    rule: Option<Rule>,
}

impl fmt::Debug for IndexWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IndexWeight")
            .field("table", &self.table)
            .field("rule", &self.rule.is_some())
            .finish()
    }
}

impl IndexWeight {
    pub fn from_fn(f: impl Fn(HalfInt) -> f64 + Send + Sync + 'static) -> Self {
        IndexWeight {
            table: BTreeMap::new(),
            rule: Some(Arc::new(f)),
        }
    }

    pub fn from_table(entries: impl IntoIterator<Item = (HalfInt, f64)>) -> Self {
        IndexWeight {
            table: entries.into_iter().collect(),
            rule: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(move |_| c)
    }

    pub fn identity() -> Self {
        Self::from_fn(HalfInt::to_f64)
    }

    /// `x -> base^x`.
    pub fn power(base: f64) -> Self {
        Self::from_fn(move |x| base.powf(x.to_f64()))
    }

    pub fn with_entry(mut self, x: HalfInt, value: f64) -> Self {
        self.table.insert(x, value);
        self
    }

    pub fn get(&self, x: HalfInt) -> Result<f64> {
        if let Some(v) = self.table.get(&x) {
            return Ok(*v);
        }
        match &self.rule {
            Some(rule) => Ok(rule(x)),
            None => Err(Error::WeightUndefined(x.to_string())),
        }
    }
}

/// `Z(f)`: `I_q` with `q^x` replaced by `f(x)`.
pub fn z_invariant(indexed: &IndexedCurve, f: &IndexWeight) -> Result<f64> {
    let mut total = 0.0;
    for a in &indexed.arcs {
        total += a.arc.total_turning / TAU * f.get(a.index)?;
    }
    for d in &indexed.double_points {
        let jump = f.get(d.index + HalfInt::HALF)? - f.get(d.index - HalfInt::HALF)?;
        total -= d.point.theta / TAU * jump;
    }
    Ok(total)
}

/// Distance between `I_1` and the rotation number.
pub fn umlaufsatz_error(indexed: &IndexedCurve) -> Result<f64> {
    let rot = total_rotation(&indexed.curve)?;
    Ok((iq_numeric(indexed).evaluate(1.0)? - rot as f64).abs())
}

pub fn umlaufsatz_check(indexed: &IndexedCurve) -> bool {
    matches!(umlaufsatz_error(indexed), Ok(e) if e < MATCH_TOLERANCE)
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Checks {
    pub umlaufsatz: bool,
    pub oracle_match: bool,
    pub orientation: bool,
    pub j_plus_routes: bool,
    pub viro_integral: bool,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.umlaufsatz && self.oracle_match && self.orientation && self.j_plus_routes && self.viro_integral
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Discrepancies {
    pub umlaufsatz: f64,
    /// Largest coefficient gap between the numeric and combinatorial `I_q`.
    pub oracle: f64,
    /// Largest coefficient gap in `I_q(-Γ) = -I_{1/q}(Γ)`, numeric route.
    pub orientation: f64,
    pub j_plus_integral_raw: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rot: i64,
    pub j_plus: i64,
    pub crossings: usize,
    pub iq_numeric: FloatLaurent,
    pub iq_combinatorial: ExactLaurent,
    pub p_gamma: ExactLaurent,
    /// `[q, I_q]` for each requested evaluation point.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub evaluations: Vec<[f64; 2]>,
    pub checks: Checks,
    pub discrepancies: Discrepancies,
}

/// Indexes the curve and its reverse and assembles the full report.
pub fn analyze(curve: &Curve, tol: &Tolerances, q_points: &[f64]) -> Result<InvariantReport> {
    let indexed = index_curve(curve, tol)?;
    let reversed = index_curve(&reverse(curve), tol)?;
    report(&indexed, &reversed, q_points)
}

pub fn report(
    indexed: &IndexedCurve,
    reversed: &IndexedCurve,
    q_points: &[f64],
) -> Result<InvariantReport> {
    let numeric = iq_numeric(indexed);
    let exact = iq_combinatorial(indexed);
    let rot = total_rotation(&indexed.curve)?;
    let umlaufsatz = umlaufsatz_error(indexed)?;
    let oracle = numeric.max_coefficient_distance(&exact);

    let expected_reverse = -exact.invert_q();
    let orientation_exact = iq_combinatorial(reversed) == expected_reverse;
    let orientation = iq_numeric(reversed).max_coefficient_distance(&(-numeric.invert_q()));

    let j_raw = j_plus_integral_raw(indexed);
    let j_comb = j_plus_combinatorial(indexed);
    let from_derivative = Rational64::from_integer(1) - exact.derivative_at_one() * 2;
    let j_plus_routes = (j_raw - j_comb as f64).abs() < MATCH_TOLERANCE
        && from_derivative == Rational64::from_integer(j_comb);

    let p_gamma = viro_polynomial(indexed);
    let viro_integral = matches!(&p_gamma, Ok(p) if p.evaluate(1.0).map_or(false, |v| (v - 1.0).abs() < 1e-12));

    let evaluations = q_points
        .iter()
        .map(|&q| Ok([q, exact.evaluate(q)?]))
        .collect::<Result<_>>()?;

    Ok(InvariantReport {
        name: None,
        rot,
        j_plus: j_comb,
        crossings: indexed.crossing_count(),
        iq_numeric: numeric,
        iq_combinatorial: exact,
        p_gamma: p_gamma?,
        evaluations,
        checks: Checks {
            umlaufsatz: umlaufsatz < MATCH_TOLERANCE,
            oracle_match: oracle < MATCH_TOLERANCE,
            orientation: orientation_exact && orientation < MATCH_TOLERANCE,
            j_plus_routes,
            viro_integral,
        },
        discrepancies: Discrepancies {
            umlaufsatz,
            oracle,
            orientation,
            j_plus_integral_raw: j_raw,
        },
    })
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, "curve: {name}")?;
        }
        writeln!(f, "rot = {}", self.rot)?;
        writeln!(f, "double points = {}", self.crossings)?;
        writeln!(f, "J+ = {}", self.j_plus)?;
        writeln!(f, "I_q (combinatorial) = {}", self.iq_combinatorial)?;
        writeln!(f, "I_q (numeric) = {}", self.iq_numeric)?;
        writeln!(f, "P(q) = {}", self.p_gamma)?;
        for [q, v] in &self.evaluations {
            writeln!(f, "I_{q} = {v}")?;
        }
        let c = &self.checks;
        let d = &self.discrepancies;
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(f, "umlaufsatz: {} (error {:.2e})", mark(c.umlaufsatz), d.umlaufsatz)?;
        writeln!(f, "oracle match: {} (error {:.2e})", mark(c.oracle_match), d.oracle)?;
        writeln!(f, "orientation: {} (error {:.2e})", mark(c.orientation), d.orientation)?;
        writeln!(f, "J+ routes: {} (integral {:.9})", mark(c.j_plus_routes), d.j_plus_integral_raw)?;
        write!(f, "Viro integrality: {}", mark(c.viro_integral))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{standard_curve, ClosedPath, FourierPath};
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
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

    fn indexed(c: &Curve) -> IndexedCurve {
        index_curve(c, &tol()).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(standard_iq(1), ExactLaurent::monomial(h(1), r(1, 1)));
        assert_eq!(standard_iq(-1), ExactLaurent::monomial(h(-1), r(-1, 1)));
        assert_eq!(
            standard_iq(-2),
            ExactLaurent::from_terms([(h(-3), r(-1, 2)), (h(-1), r(-3, 2))])
        );
        assert_eq!(standard_j_plus(-3), -4);
        for i in -5..=5 {
            assert_eq!(
                Rational64::from_integer(1) - standard_iq(i).derivative_at_one() * 2,
                Rational64::from_integer(standard_j_plus(i))
            );
        }
    }

    #[test]
    fn circle_values() {
        let ic = indexed(&standard_curve(1));
        let expected = ExactLaurent::monomial(h(1), r(1, 1));
        assert_eq!(iq_combinatorial(&ic), expected);
        assert!(iq_numeric(&ic).max_coefficient_distance(&expected) < 1e-9);
        assert_eq!(j_plus_combinatorial(&ic), 0);
        assert_eq!(j_plus_integral(&ic).unwrap(), 0);
        assert_eq!(viro_polynomial(&ic).unwrap(), ExactLaurent::monomial(h(2), r(1, 1)));
    }

    #[test]
    fn figure_eight_values() {
        let ic = indexed(&standard_curve(0));
        let expected = ExactLaurent::from_terms([(h(1), r(1, 2)), (h(-1), r(-1, 2))]);
        assert_eq!(iq_combinatorial(&ic), expected);
        assert!(iq_numeric(&ic).max_coefficient_distance(&expected) < 1e-6);
        assert_eq!(j_plus_combinatorial(&ic), 0);
        assert_eq!(j_plus_integral(&ic).unwrap(), 0);
        let viro = ExactLaurent::from_terms([(h(2), r(1, 1)), (h(0), r(-1, 1)), (h(-2), r(1, 1))]);
        assert_eq!(viro_polynomial(&ic).unwrap(), viro);
    }

    #[test]
    fn limacon_values() {
        let ic = indexed(&limacon());
        let expected = ExactLaurent::from_terms([(h(1), r(3, 2)), (h(3), r(1, 2))]);
        assert_eq!(iq_combinatorial(&ic), expected);
        assert!(iq_numeric(&ic).max_coefficient_distance(&expected) < 1e-6);
        assert_eq!(j_plus_combinatorial(&ic), -2);
        assert_eq!(j_plus_integral(&ic).unwrap(), -2);
    }

    #[test]
    fn standard_curves_j_plus() {
        for i in -4i64..=4 {
            let ic = indexed(&standard_curve(i));
            let expected = if i == 0 { 0 } else { -2 * (i.abs() - 1) };
            assert_eq!(j_plus_combinatorial(&ic), expected, "K_{i}");
            assert_eq!(j_plus_integral(&ic).unwrap(), expected, "K_{i}");
        }
    }

    #[test]
    fn umlaufsatz_on_standard_curves() {
        for i in [-3, 0, 1, 2] {
            let ic = indexed(&standard_curve(i));
            assert!(umlaufsatz_check(&ic));
            assert!((iq_numeric(&ic).evaluate(1.0).unwrap() - i as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn z_special_weights() {
        let ic = indexed(&limacon());
        let rot = total_rotation(&ic.curve).unwrap() as f64;
        assert!((z_invariant(&ic, &IndexWeight::constant(1.0)).unwrap() - rot).abs() < 1e-9);
        let i2 = iq_numeric(&ic).evaluate(2.0).unwrap();
        assert!((z_invariant(&ic, &IndexWeight::power(2.0)).unwrap() - i2).abs() < 1e-9);
        let j = j_plus_combinatorial(&ic) as f64;
        assert!((z_invariant(&ic, &IndexWeight::identity()).unwrap() - (1.0 - j) / 2.0).abs() < 1e-6);
    }

    #[test]
    fn z_table_must_cover_needed_indices() {
        let ic = indexed(&limacon());
        // crossings need f at index ± ½, which here are exactly the arc indices
        let partial = IndexWeight::from_table([(h(1), 1.0)]);
        assert!(matches!(z_invariant(&ic, &partial), Err(Error::WeightUndefined(_))));
        let full = partial.with_entry(h(3), 1.0);
        let rot = total_rotation(&ic.curve).unwrap() as f64;
        assert!((z_invariant(&ic, &full).unwrap() - rot).abs() < 1e-9);
    }

    #[test]
    fn report_json_shape() {
        let rep = analyze(&standard_curve(0), &tol(), &[1.0]).unwrap();
        assert!(rep.checks.all());
        let v = serde_json::to_value(&rep).unwrap();
        for key in ["rot", "j_plus", "iq_numeric", "iq_combinatorial", "p_gamma", "checks"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        for key in ["umlaufsatz", "oracle_match", "orientation"] {
            assert_eq!(v["checks"][key], true);
        }
        assert_eq!(v["iq_combinatorial"][0][0], -0.5);
        assert_eq!(v["iq_combinatorial"][0][1], -0.5);
        assert!(rep.to_string().contains("J+ = 0"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Z is linear in the weight.
        #[test]
        fn z_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, base in 0.5f64..3.0) {
            let ic = indexed(&standard_curve(3));
            let f = IndexWeight::power(base);
            let g = IndexWeight::identity();
            let combo = IndexWeight::from_fn(move |x| a * base.powf(x.to_f64()) + b * x.to_f64());
            let lhs = z_invariant(&ic, &combo).unwrap();
            let rhs = a * z_invariant(&ic, &f).unwrap() + b * z_invariant(&ic, &g).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        /// Rigid motions and scalings leave every invariant unchanged.
        #[test]
        fn similarity_invariance(angle in 0.0f64..TAU, scale in 0.3f64..3.0, dx in -2.0f64..2.0) {
            let c = limacon();
            let (s, co) = angle.sin_cos();
            let moved = c.transformed([[scale * co, -scale * s], [scale * s, scale * co]],
                crate::geom::Vec2::new(dx, 0.5));
            let a = indexed(&c);
            let b = indexed(&moved);
            prop_assert_eq!(iq_combinatorial(&a), iq_combinatorial(&b));
            prop_assert!(iq_numeric(&a).max_coefficient_distance(&iq_numeric(&b)) < 1e-6);
        }
    }
}
