//! Exact signed-power expressions in the Fourier variable `k`.
//!
//! A [`KExpr`] is a finite sum of terms `c(α)·sgn(k)^p·|k|^{j·α/2 + m}` where
//! `c(α)` is an [`AlphaPoly`], a polynomial in the Lévy index with rational
//! coefficients. Exponent keys `(j, m)` are compared structurally, so two
//! exponents that only coincide at a particular α (for example `α − 2` and `0`
//! at α = 2) stay separate until [`KExpr::specialize`] fixes α.
//!
//! Every operation works on `k ≠ 0`; the derivative of `sgn(k)` is zero.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat, to_f64, Rational};

/// Polynomial in α with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AlphaPoly {
    coeffs: Vec<Rational>,
}

impl AlphaPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        AlphaPoly { coeffs }
    }

    pub fn constant(value: Rational) -> Self {
        AlphaPoly::new(vec![value])
    }

    pub fn from_int(value: i64) -> Self {
        AlphaPoly::constant(Rational::from_integer(value.into()))
    }

    /// The polynomial `α`.
    pub fn alpha() -> Self {
        AlphaPoly::new(vec![Rational::zero(), Rational::one()])
    }

    /// `c0 + c1·α`.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        AlphaPoly::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn constant_term(&self) -> Rational {
        self.coeffs.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        AlphaPoly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Horner evaluation, exact.
    pub fn eval(&self, alpha: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * alpha + c)
    }
}

impl Zero for AlphaPoly {
    fn zero() -> Self {
        AlphaPoly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for AlphaPoly {
    fn one() -> Self {
        AlphaPoly::from_int(1)
    }
}

impl Add<&AlphaPoly> for &AlphaPoly {
    type Output = AlphaPoly;

    fn add(self, rhs: &AlphaPoly) -> AlphaPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        let coeffs = (0..len)
            .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
            .collect();
        AlphaPoly::new(coeffs)
    }
}

impl Add for AlphaPoly {
    type Output = AlphaPoly;

    fn add(self, rhs: AlphaPoly) -> AlphaPoly {
        &self + &rhs
    }
}

impl Neg for &AlphaPoly {
    type Output = AlphaPoly;

    fn neg(self) -> AlphaPoly {
        AlphaPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for AlphaPoly {
    type Output = AlphaPoly;

    fn neg(self) -> AlphaPoly {
        -&self
    }
}

impl Sub<&AlphaPoly> for &AlphaPoly {
    type Output = AlphaPoly;

    fn sub(self, rhs: &AlphaPoly) -> AlphaPoly {
        self + &(-rhs)
    }
}

impl Sub for AlphaPoly {
    type Output = AlphaPoly;

    fn sub(self, rhs: AlphaPoly) -> AlphaPoly {
        &self - &rhs
    }
}

impl Mul<&AlphaPoly> for &AlphaPoly {
    type Output = AlphaPoly;

    fn mul(self, rhs: &AlphaPoly) -> AlphaPoly {
        if self.is_zero() || rhs.is_zero() {
            return AlphaPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        AlphaPoly::new(coeffs)
    }
}

impl Mul for AlphaPoly {
    type Output = AlphaPoly;

    fn mul(self, rhs: AlphaPoly) -> AlphaPoly {
        &self * &rhs
    }
}

impl fmt::Display for AlphaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match deg {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}·")?;
                    }
                    if deg == 1 {
                        write!(f, "α")?;
                    } else {
                        write!(f, "α^{deg}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// The exponent `j·(α/2) + m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FracExponent {
    pub j: u32,
    pub m: i64,
}

impl FracExponent {
    pub const ZERO: FracExponent = FracExponent { j: 0, m: 0 };

    pub fn new(j: u32, m: i64) -> Self {
        FracExponent { j, m }
    }

    pub fn eval(&self, alpha: &Rational) -> Rational {
        alpha * rat(self.j as i64, 2) + Rational::from_integer(self.m.into())
    }

    /// The exponent as a polynomial in α.
    pub fn as_poly(&self) -> AlphaPoly {
        AlphaPoly::linear(Rational::from_integer(self.m.into()), rat(self.j as i64, 2))
    }

    pub fn shifted(&self, dm: i64) -> Self {
        FracExponent { j: self.j, m: self.m + dm }
    }
}

impl Add for FracExponent {
    type Output = FracExponent;

    fn add(self, rhs: FracExponent) -> FracExponent {
        FracExponent { j: self.j + rhs.j, m: self.m + rhs.m }
    }
}

impl fmt::Display for FracExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alpha_part = match self.j {
            0 => String::new(),
            1 => "α/2".to_string(),
            2 => "α".to_string(),
            j if j % 2 == 0 => format!("{}α", j / 2),
            j => format!("{j}α/2"),
        };
        match (alpha_part.is_empty(), self.m) {
            (true, m) => write!(f, "{m}"),
            (false, 0) => write!(f, "{alpha_part}"),
            (false, m) if m > 0 => write!(f, "{alpha_part}+{m}"),
            (false, m) => write!(f, "{alpha_part}{m}"),
        }
    }
}

/// One monomial `coeff(α)·sgn(k)^sgn·|k|^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KTerm {
    pub coeff: AlphaPoly,
    /// Power of `sgn(k)` modulo 2.
    pub sgn: u8,
    pub exponent: FracExponent,
}

impl KTerm {
    pub fn new(coeff: AlphaPoly, sgn: u8, exponent: FracExponent) -> Self {
        KTerm { coeff, sgn: sgn % 2, exponent }
    }

    fn key(&self) -> TermKey {
        (self.exponent, self.sgn)
    }
}

type TermKey = (FracExponent, u8);

/// Canonical sum of [`KTerm`]s, sorted by `(j, m, sgn)` descending with
/// unique keys and no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KExpr {
    terms: Vec<KTerm>,
}

impl KExpr {
    pub fn zero() -> Self {
        KExpr { terms: Vec::new() }
    }

    pub fn one() -> Self {
        KExpr::constant(AlphaPoly::one())
    }

    pub fn constant(coeff: AlphaPoly) -> Self {
        KExpr::monomial(coeff, 0, FracExponent::ZERO)
    }

    pub fn monomial(coeff: AlphaPoly, sgn: u8, exponent: FracExponent) -> Self {
        KExpr::from_terms(vec![KTerm::new(coeff, sgn, exponent)])
    }

    /// Builds the canonical form of an arbitrary list of terms.
    pub fn from_terms(terms: impl IntoIterator<Item = KTerm>) -> Self {
        let mut acc: BTreeMap<TermKey, AlphaPoly> = BTreeMap::new();
        for term in terms {
            let key = (term.exponent, term.sgn % 2);
            let slot = acc.entry(key).or_insert_with(AlphaPoly::zero);
            *slot = &*slot + &term.coeff;
        }
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|((exponent, sgn), coeff)| KTerm { coeff, sgn, exponent })
            .collect();
        KExpr { terms }
    }

    pub fn canonical(&self) -> Self {
        KExpr::from_terms(self.terms.iter().cloned())
    }

    pub fn terms(&self) -> &[KTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient attached to the given `(exponent, sgn)` key, zero if absent.
    pub fn coefficient(&self, exponent: FracExponent, sgn: u8) -> AlphaPoly {
        self.terms
            .iter()
            .find(|t| t.key() == (exponent, sgn % 2))
            .map(|t| t.coeff.clone())
            .unwrap_or_else(AlphaPoly::zero)
    }

    pub fn scale(&self, factor: &AlphaPoly) -> Self {
        KExpr::from_terms(self.terms.iter().map(|t| KTerm { coeff: &t.coeff * factor, ..t.clone() }))
    }

    pub fn scale_rational(&self, factor: &Rational) -> Self {
        self.scale(&AlphaPoly::constant(factor.clone()))
    }

    /// Termwise `d/dk` on `k ≠ 0`.
    pub fn differentiate(&self) -> Self {
        KExpr::from_terms(self.terms.iter().map(|t| KTerm {
            coeff: &t.coeff * &t.exponent.as_poly(),
            sgn: (t.sgn + 1) % 2,
            exponent: t.exponent.shifted(-1),
        }))
    }

    /// Substitutes a fixed α, merging exponents that coincide there.
    pub fn specialize(&self, alpha: &Rational) -> SpecializedExpr {
        SpecializedExpr::from_terms(
            self.terms
                .iter()
                .map(|t| (t.coeff.eval(alpha), t.sgn, t.exponent.eval(alpha))),
        )
    }

    /// Numeric value at `(α, k)`. Fails at `k = 0` when a term with negative
    /// exponent survives specialization.
    pub fn eval(&self, alpha: &Rational, k: f64) -> Result<f64> {
        self.specialize(alpha).eval(k)
    }
}

impl Add<&KExpr> for &KExpr {
    type Output = KExpr;

    fn add(self, rhs: &KExpr) -> KExpr {
        KExpr::from_terms(self.terms.iter().chain(rhs.terms.iter()).cloned())
    }
}

impl Add for KExpr {
    type Output = KExpr;

    fn add(self, rhs: KExpr) -> KExpr {
        &self + &rhs
    }
}

impl Neg for &KExpr {
    type Output = KExpr;

    fn neg(self) -> KExpr {
        KExpr {
            terms: self
                .terms
                .iter()
                .map(|t| KTerm { coeff: -&t.coeff, ..t.clone() })
                .collect(),
        }
    }
}

impl Neg for KExpr {
    type Output = KExpr;

    fn neg(self) -> KExpr {
        -&self
    }
}

impl Sub<&KExpr> for &KExpr {
    type Output = KExpr;

    fn sub(self, rhs: &KExpr) -> KExpr {
        self + &(-rhs)
    }
}

impl Sub for KExpr {
    type Output = KExpr;

    fn sub(self, rhs: KExpr) -> KExpr {
        &self - &rhs
    }
}

impl Mul<&KExpr> for &KExpr {
    type Output = KExpr;

    fn mul(self, rhs: &KExpr) -> KExpr {
        let products = self.terms.iter().flat_map(|a| {
            rhs.terms.iter().map(move |b| KTerm {
                coeff: &a.coeff * &b.coeff,
                sgn: (a.sgn + b.sgn) % 2,
                exponent: a.exponent + b.exponent,
            })
        });
        KExpr::from_terms(products)
    }
}

impl Mul for KExpr {
    type Output = KExpr;

    fn mul(self, rhs: KExpr) -> KExpr {
        &self * &rhs
    }
}

impl fmt::Display for KExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let nonzero: Vec<&Rational> = t.coeff.coeffs().iter().filter(|c| !c.is_zero()).collect();
            let single = nonzero.len() == 1;
            let negative = single && nonzero[0].is_negative();
            let coeff = if negative { (-&t.coeff).to_string() } else { t.coeff.to_string() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts = Vec::new();
            if !single {
                parts.push(format!("({coeff})"));
            } else if coeff != "1" {
                parts.push(coeff);
            }
            if t.sgn == 1 {
                parts.push("sgn(k)".to_string());
            }
            if t.exponent != FracExponent::ZERO {
                parts.push(format!("|k|^({})", t.exponent));
            }
            if parts.is_empty() {
                parts.push("1".to_string());
            }
            write!(f, "{}", parts.join("·"))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct KTermRepr {
    coeff: Vec<String>,
    sgn: u8,
    j: u32,
    m: i64,
}

impl Serialize for KExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let reprs: Vec<KTermRepr> = self
            .terms
            .iter()
            .map(|t| KTermRepr {
                coeff: t.coeff.coeffs().iter().map(ToString::to_string).collect(),
                sgn: t.sgn,
                j: t.exponent.j,
                m: t.exponent.m,
            })
            .collect();
        reprs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let reprs = Vec::<KTermRepr>::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(reprs.len());
        for r in reprs {
            if r.sgn > 1 {
                return Err(D::Error::custom(format!("sgn must be 0 or 1, got {}", r.sgn)));
            }
            let coeffs = r
                .coeff
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()
                .map_err(D::Error::custom)?;
            terms.push(KTerm::new(AlphaPoly::new(coeffs), r.sgn, FracExponent::new(r.j, r.m)));
        }
        Ok(KExpr::from_terms(terms))
    }
}

/// A [`KExpr`] at a fixed α: rational coefficients on rational exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SpecializedExpr {
    /// `(exponent, sgn) -> coefficient`; no zero coefficients.
    terms: BTreeMap<(Rational, u8), Rational>,
}

/// One specialized monomial, as exported to JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecializedTerm {
    pub coeff: String,
    pub sgn: u8,
    pub exponent: String,
}

impl SpecializedExpr {
    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, u8, Rational)>) -> Self {
        let mut acc: BTreeMap<(Rational, u8), Rational> = BTreeMap::new();
        for (coeff, sgn, exponent) in terms {
            *acc.entry((exponent, sgn % 2)).or_insert_with(Rational::zero) += coeff;
        }
        acc.retain(|_, c| !c.is_zero());
        SpecializedExpr { terms: acc }
    }

    /// Iterates `(coeff, sgn, exponent)` in descending exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (&Rational, u8, &Rational)> {
        self.terms.iter().rev().map(|((e, s), c)| (c, *s, e))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        SpecializedExpr::from_terms(self.iter().map(|(c, s, e)| (c * factor, s, e.clone())))
    }

    pub fn add(&self, other: &SpecializedExpr) -> Self {
        SpecializedExpr::from_terms(
            self.iter()
                .chain(other.iter())
                .map(|(c, s, e)| (c.clone(), s, e.clone())),
        )
    }

    pub fn to_terms(&self) -> Vec<SpecializedTerm> {
        self.iter()
            .map(|(c, s, e)| SpecializedTerm { coeff: c.to_string(), sgn: s, exponent: e.to_string() })
            .collect()
    }

    /// One `|k|^q` evaluation per distinct exponent.
    pub fn eval(&self, k: f64) -> Result<f64> {
        let sign = if k > 0.0 {
            1.0
        } else if k < 0.0 {
            -1.0
        } else {
            0.0
        };
        let abs_k = k.abs();
        let mut total = 0.0;
        for ((exponent, sgn), coeff) in self.terms.iter().rev() {
            if abs_k == 0.0 && exponent.is_negative() {
                return Err(Error::Domain { exponent: exponent.to_string() });
            }
            let power = if exponent.is_zero() {
                1.0
            } else {
                abs_k.powf(to_f64(exponent))
            };
            let parity = if *sgn == 1 { sign } else { 1.0 };
            total += to_f64(coeff) * parity * power;
        }
        Ok(total)
    }
}

impl fmt::Display for SpecializedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, s, e)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if s == 1 {
                write!(f, "·sgn(k)")?;
            }
            if !e.is_zero() {
                write!(f, "·|k|^({e})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    fn c(v: i64) -> AlphaPoly {
        AlphaPoly::from_int(v)
    }

    fn exp(j: u32, m: i64) -> FracExponent {
        FracExponent::new(j, m)
    }

    fn h1() -> KExpr {
        KExpr::monomial(c(2), 1, exp(1, 0))
    }

    fn h2() -> KExpr {
        KExpr::from_terms([
            KTerm::new(c(4), 0, exp(2, 0)),
            KTerm::new(-AlphaPoly::alpha(), 0, exp(1, -1)),
        ])
    }

    #[test]
    fn alpha_poly_strips_trailing_zeros() {
        let p = AlphaPoly::new(vec![int(1), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(AlphaPoly::new(vec![int(0)]).is_zero());
    }

    #[test]
    fn alpha_poly_evaluates_exactly() {
        // α(α/2 - 1) at α = 3/2 is -3/8
        let p = AlphaPoly::alpha() * AlphaPoly::linear(int(-1), rat(1, 2));
        assert_eq!(p.eval(&rat(3, 2)), rat(-3, 8));
    }

    #[test]
    fn additive_inverse_cancels() {
        let a = KExpr::monomial(c(2), 1, exp(1, 0));
        let b = KExpr::monomial(c(-2), 1, exp(1, 0));
        assert!((&a + &b).is_empty());
    }

    #[test]
    fn zero_is_additive_identity() {
        assert_eq!(&h2() + &KExpr::zero(), h2());
    }

    #[test]
    fn sum_builds_two_term_h2() {
        let a = KExpr::monomial(c(4), 0, exp(2, 0));
        let b = KExpr::monomial(-AlphaPoly::alpha(), 0, exp(1, -1));
        let sum = &a + &b;
        assert_eq!(sum, h2());
        assert_eq!(sum.terms()[0].exponent, exp(2, 0));
    }

    #[test]
    fn sgn_squared_is_one() {
        let s = KExpr::monomial(c(1), 1, exp(1, 0));
        let prod = &s * &s;
        assert_eq!(prod, KExpr::monomial(c(1), 0, exp(2, 0)));
    }

    #[test]
    fn product_with_h1() {
        assert_eq!(&h1() * &h1(), KExpr::monomial(c(4), 0, exp(2, 0)));
        assert_eq!(&KExpr::one() * &h2(), h2());
    }

    #[test]
    fn power_rule_derivatives() {
        assert_eq!(h1().differentiate(), KExpr::monomial(AlphaPoly::alpha(), 0, exp(1, -1)));
        assert!(KExpr::one().differentiate().is_empty());
        assert_eq!(
            KExpr::monomial(c(1), 0, exp(2, 0)).differentiate(),
            KExpr::monomial(AlphaPoly::alpha(), 1, exp(2, -1))
        );
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(h1().eval(&int(2), 3.0).unwrap(), 6.0);
        assert_eq!(h2().eval(&int(2), 1.0).unwrap(), 2.0);
        assert_eq!(h2().eval(&int(1), 4.0).unwrap(), 15.5);
        assert_eq!(h1().eval(&int(1), -4.0).unwrap(), -4.0);
    }

    #[test]
    fn singular_term_at_origin_is_a_domain_error() {
        assert!(matches!(h2().eval(&int(1), 0.0), Err(Error::Domain { .. })));
        // at α = 2 the exponent α/2 - 1 is zero, so the origin is fine
        assert_eq!(h2().eval(&int(2), 0.0).unwrap(), -2.0);
        assert_eq!(h1().eval(&int(1), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn coincident_exponents_merge_only_on_specialization() {
        let e = KExpr::from_terms([
            KTerm::new(c(1), 0, exp(2, -2)),
            KTerm::new(c(3), 0, exp(0, 0)),
        ]);
        assert_eq!(e.len(), 2);
        assert_eq!(e.specialize(&int(2)).len(), 1);
        assert_eq!(e.specialize(&rat(3, 2)).len(), 2);
    }

    #[test]
    fn terms_are_sorted_descending() {
        let e = KExpr::from_terms([
            KTerm::new(c(1), 0, exp(0, 3)),
            KTerm::new(c(1), 1, exp(2, -1)),
            KTerm::new(c(1), 0, exp(2, -1)),
            KTerm::new(c(1), 0, exp(3, -5)),
        ]);
        let keys: Vec<_> = e.terms().iter().map(|t| (t.exponent.j, t.exponent.m, t.sgn)).collect();
        assert_eq!(keys, vec![(3, -5, 0), (2, -1, 1), (2, -1, 0), (0, 3, 0)]);
    }

    #[test]
    fn json_layout() {
        let json = serde_json::to_value(h2()).unwrap();
        assert_eq!(
            json,
            serde_json::json!([
                {"coeff": ["4"], "sgn": 0, "j": 2, "m": 0},
                {"coeff": ["0", "-1"], "sgn": 0, "j": 1, "m": -1}
            ])
        );
        let back: KExpr = serde_json::from_value(json).unwrap();
        assert_eq!(back, h2());
    }

    #[test]
    fn json_rejects_bad_parity() {
        let bad = serde_json::json!([{"coeff": ["1"], "sgn": 2, "j": 0, "m": 0}]);
        assert!(serde_json::from_value::<KExpr>(bad).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(h1().to_string(), "2·sgn(k)·|k|^(α/2)");
        assert_eq!(h2().to_string(), "4·|k|^(α) - α·|k|^(α/2-1)");
        assert_eq!(KExpr::one().to_string(), "1");
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=3).prop_map(|(n, d)| rat(n, d))
    }

    fn small_poly() -> impl Strategy<Value = AlphaPoly> {
        prop::collection::vec(small_rational(), 0..3).prop_map(AlphaPoly::new)
    }

    fn small_term() -> impl Strategy<Value = KTerm> {
        (small_poly(), 0u8..2, 0u32..4, -3i64..3)
            .prop_map(|(c, s, j, m)| KTerm::new(c, s, FracExponent::new(j, m)))
    }

    fn small_expr() -> impl Strategy<Value = KExpr> {
        prop::collection::vec(small_term(), 0..4).prop_map(KExpr::from_terms)
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(terms in prop::collection::vec(small_term(), 0..6)) {
            let once = KExpr::from_terms(terms);
            prop_assert_eq!(once.canonical(), once.clone());
            prop_assert_eq!(once.canonical().canonical(), once);
        }

        #[test]
        fn product_rule_holds_exactly(a in small_expr(), b in small_expr()) {
            let lhs = (&a * &b).differentiate();
            let rhs = &(&a.differentiate() * &b) + &(&a * &b.differentiate());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn addition_commutes(a in small_expr(), b in small_expr()) {
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn eval_is_multiplicative(
            a in small_expr(),
            b in small_expr(),
            alpha in (1i64..=8, 1i64..=4).prop_map(|(n, d)| rat(n, d)),
            k in prop::sample::select(vec![0.5, -0.5, 1.0, -1.0, 2.0, -2.0]),
        ) {
            let prod = (&a * &b).eval(&alpha, k).unwrap();
            let split = a.eval(&alpha, k).unwrap() * b.eval(&alpha, k).unwrap();
            // 4 ulps on the magnitude scale of the summed terms, so that
            // cancellation between terms is not counted against rounding.
            let magnitude = |e: &KExpr| -> f64 {
                e.specialize(&alpha).iter().map(|(c, _, q)| {
                    to_f64(c).abs() * k.abs().powf(to_f64(q))
                }).sum()
            };
            let scale = (magnitude(&a) * magnitude(&b)).max(f64::MIN_POSITIVE);
            prop_assert!((prod - split).abs() <= 4.0 * f64::EPSILON * scale,
                "prod={prod} split={split} scale={scale}");
        }
    }
}
