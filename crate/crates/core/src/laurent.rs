//! Laurent polynomials in `q^{1/2}`.
//!
//! Exponents live in ½ℤ and are keyed by their doubled integer value. Terms
//! are kept sparse: a stored coefficient is never zero.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::halfint::HalfInt;

/// Coefficient ring for [`HalfLaurent`].
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_half(h: HalfInt) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coefficient for f64 {
    fn from_half(h: HalfInt) -> Self {
        h.to_f64()
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coefficient for Rational64 {
    fn from_half(h: HalfInt) -> Self {
        Rational64::new(h.doubled(), 2)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HalfLaurent<C> {
    terms: BTreeMap<i64, C>,
}

/// Exact coefficients, as produced by the combinatorial route.
pub type ExactLaurent = HalfLaurent<Rational64>;
/// Floating coefficients, as produced by numerical integration.
pub type FloatLaurent = HalfLaurent<f64>;

impl<C: Coefficient> Default for HalfLaurent<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> HalfLaurent<C> {
    pub fn zero() -> Self {
        HalfLaurent {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(HalfInt::ZERO, c)
    }

    pub fn monomial(exponent: HalfInt, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(exponent, c);
        p
    }

    /// `q^{1/2} - q^{-1/2}`.
    pub fn q_half_difference() -> Self {
        let mut p = Self::monomial(HalfInt::HALF, C::one());
        p.add_term(-HalfInt::HALF, -C::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (HalfInt, C)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Adds `c q^e` in place.
    pub fn add_term(&mut self, exponent: HalfInt, c: C) {
        if c.is_zero() {
            return;
        }
        let key = exponent.doubled();
        let sum = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: HalfInt) -> C {
        self.terms
            .get(&exponent.doubled())
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (HalfInt, &C)> + '_ {
        self.terms
            .iter()
            .map(|(&k, c)| (HalfInt::from_doubled(k), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: C) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e, c.clone() * s.clone())))
    }

    /// Shifts every exponent by `by` (multiplication by `q^by`).
    pub fn shift(&self, by: HalfInt) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e + by, c.clone())))
    }

    /// The substitution `q -> q^{-1}`.
    pub fn invert_q(&self) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (-e, c.clone())))
    }

    /// Value at `q > 0`.
    pub fn evaluate(&self, q: f64) -> Result<f64, Error> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidQ(q));
        }
        Ok(self
            .terms()
            .map(|(e, c)| c.to_f64() * q.powf(e.to_f64()))
            .sum())
    }

    /// First derivative in `q` at `q = 1`, i.e. the sum of `e * c_e`.
    pub fn derivative_at_one(&self) -> C {
        self.terms()
            .fold(C::zero(), |acc, (e, c)| acc + C::from_half(e) * c.clone())
    }

    pub fn to_float(&self) -> FloatLaurent {
        FloatLaurent::from_terms(self.terms().map(|(e, c)| (e, c.to_f64())))
    }

    /// Largest coefficientwise absolute difference, comparing in floating point.
    pub fn max_coefficient_distance<D: Coefficient>(&self, other: &HalfLaurent<D>) -> f64 {
        let mut keys: Vec<i64> = self.terms.keys().copied().collect();
        keys.extend(other.terms.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|k| {
                let e = HalfInt::from_doubled(k);
                (self.coefficient(e).to_f64() - other.coefficient(e).to_f64()).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

impl ExactLaurent {
    /// True when every exponent and every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms()
            .all(|(e, c)| e.is_integer() && c.is_integer())
    }
}

impl<C: Coefficient> Add for &HalfLaurent<C> {
    type Output = HalfLaurent<C>;
    fn add(self, rhs: &HalfLaurent<C>) -> HalfLaurent<C> {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl<C: Coefficient> Add for HalfLaurent<C> {
    type Output = HalfLaurent<C>;
    fn add(self, rhs: HalfLaurent<C>) -> HalfLaurent<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Neg for &HalfLaurent<C> {
    type Output = HalfLaurent<C>;
    fn neg(self) -> HalfLaurent<C> {
        HalfLaurent::from_terms(self.terms().map(|(e, c)| (e, -c.clone())))
    }
}

impl<C: Coefficient> Neg for HalfLaurent<C> {
    type Output = HalfLaurent<C>;
    fn neg(self) -> HalfLaurent<C> {
        -&self
    }
}

impl<C: Coefficient> Sub for &HalfLaurent<C> {
    type Output = HalfLaurent<C>;
    fn sub(self, rhs: &HalfLaurent<C>) -> HalfLaurent<C> {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl<C: Coefficient> Sub for HalfLaurent<C> {
    type Output = HalfLaurent<C>;
    fn sub(self, rhs: HalfLaurent<C>) -> HalfLaurent<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> Mul for &HalfLaurent<C> {
    type Output = HalfLaurent<C>;
    fn mul(self, rhs: &HalfLaurent<C>) -> HalfLaurent<C> {
        let mut out = HalfLaurent::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> Mul for HalfLaurent<C> {
    type Output = HalfLaurent<C>;
    fn mul(self, rhs: HalfLaurent<C>) -> HalfLaurent<C> {
        &self * &rhs
    }
}

fn format_exponent(e: HalfInt) -> String {
    if e.is_integer() {
        format!("q^{{{}}}", e.doubled() / 2)
    } else {
        format!("q^{{{}/2}}", e.doubled())
    }
}

/// Terms by descending exponent, e.g. `0.5*q^{3/2} + 1.5*q^{1/2}`.
impl<C: Coefficient> fmt::Display for HalfLaurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let v = c.to_f64();
            let magnitude = v.abs();
            if i == 0 {
                if v < 0.0 {
                    write!(f, "-")?;
                }
            } else if v < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if e == HalfInt::ZERO {
                write!(f, "{magnitude}")?;
            } else {
                write!(f, "{magnitude}*{}", format_exponent(e))?;
            }
        }
        Ok(())
    }
}

/// Serialized as `[[exponent, coefficient], ...]` in ascending exponent order.
impl<C: Coefficient> Serialize for HalfLaurent<C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in self.terms() {
            seq.serialize_element(&(e.to_f64(), c.to_f64()))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(d: i64) -> HalfInt {
        HalfInt::from_doubled(d)
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn k0() -> ExactLaurent {
        ExactLaurent::q_half_difference().scale(r(1, 2))
    }

    #[test]
    fn square_of_half_difference() {
        let d = ExactLaurent::q_half_difference();
        let sq = &d * &d;
        let expected =
            ExactLaurent::from_terms([(h(2), r(1, 1)), (h(0), r(-2, 1)), (h(-2), r(1, 1))]);
        assert_eq!(sq, expected);
    }

    #[test]
    fn additive_identity_and_exponent_addition() {
        let p = k0();
        assert_eq!(&p + &ExactLaurent::zero(), p);
        let m = &ExactLaurent::monomial(h(2), r(1, 1)) * &ExactLaurent::monomial(h(-1), r(1, 1));
        assert_eq!(m, ExactLaurent::monomial(h(1), r(1, 1)));
    }

    #[test]
    fn no_zero_terms_after_cancellation() {
        let p = k0();
        let z = &p - &p;
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
    }

    #[test]
    fn evaluation() {
        assert_eq!(k0().evaluate(1.0).unwrap(), 0.0);
        assert!((k0().evaluate(4.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(
            FloatLaurent::monomial(h(1), 1.0).evaluate(9.0).unwrap(),
            3.0
        );
        assert!(k0().evaluate(0.0).is_err());
        assert!(k0().evaluate(-2.0).is_err());
    }

    #[test]
    fn derivative_at_one_values() {
        assert_eq!(k0().derivative_at_one(), r(1, 2));
        // 1/2 (i-1) q^{3/2} + 1/2 (i+1) q^{1/2} at i = 2
        let k2 = ExactLaurent::from_terms([(h(3), r(1, 2)), (h(1), r(3, 2))]);
        assert_eq!(k2.derivative_at_one(), r(3, 2));
        assert_eq!(ExactLaurent::constant(r(7, 1)).derivative_at_one(), r(0, 1));
    }

    #[test]
    fn invert_q_examples() {
        let p = ExactLaurent::monomial(h(1), r(1, 1));
        assert_eq!(p.invert_q(), ExactLaurent::monomial(h(-1), r(1, 1)));
        let d = ExactLaurent::q_half_difference();
        let pal = &d * &d;
        assert_eq!(pal.invert_q(), pal);
        assert_eq!(k0().invert_q().invert_q(), k0());
    }

    #[test]
    fn display_format() {
        let p = FloatLaurent::from_terms([(h(3), 0.5), (h(1), 1.5)]);
        assert_eq!(p.to_string(), "0.5*q^{3/2} + 1.5*q^{1/2}");
        assert_eq!(k0().to_string(), "0.5*q^{1/2} - 0.5*q^{-1/2}");
        let d = ExactLaurent::q_half_difference();
        assert_eq!((&d * &d).to_string(), "1*q^{1} - 2 + 1*q^{-1}");
        assert_eq!(ExactLaurent::zero().to_string(), "0");
    }

    #[test]
    fn json_form() {
        let s = serde_json::to_string(&k0()).unwrap();
        assert_eq!(s, "[[-0.5,-0.5],[0.5,0.5]]");
    }

    fn exact_poly() -> impl Strategy<Value = ExactLaurent> {
        prop::collection::vec((-6i64..=6, -8i64..=8, 1i64..=4), 0..5).prop_map(|ts| {
            ExactLaurent::from_terms(ts.into_iter().map(|(e, n, d)| (h(e), r(n, d))))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in exact_poly(), b in exact_poly(), c in exact_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn evaluation_is_multiplicative(a in exact_poly(), b in exact_poly(), q in 0.2f64..5.0) {
            let lhs = (&a * &b).evaluate(q).unwrap();
            let rhs = a.evaluate(q).unwrap() * b.evaluate(q).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
        }

        #[test]
        fn derivative_matches_central_difference(a in exact_poly()) {
            let step = 1e-6;
            let fd = (a.evaluate(1.0 + step).unwrap() - a.evaluate(1.0 - step).unwrap()) / (2.0 * step);
            prop_assert!((fd - Coefficient::to_f64(&a.derivative_at_one())).abs() < 1e-6);
        }

        #[test]
        fn invert_q_is_ring_involution(a in exact_poly(), b in exact_poly()) {
            prop_assert_eq!(a.invert_q().invert_q(), a.clone());
            prop_assert_eq!((&a * &b).invert_q(), &a.invert_q() * &b.invert_q());
        }
    }
}
