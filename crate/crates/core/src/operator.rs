//! Formal non-commutative algebra of x-space words `c·x^a·D^β`.
//!
//! Words are kept in normal order (all `x` to the left of all `D`). The only
//! rewriting rule is the formal commutator
//!
//! ```text
//! D^β · x = x · D^β + β · D^{β−1}
//! ```
//!
//! together with `D^β D^γ = D^{β+γ}`. Orders are fixed rationals and may be
//! negative. The k-space images use `Ψ^θ_β` symbols; see [`fourier_remainder`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{int, rat, to_f64, Rational};
use crate::spectral::{symbol_eval, KState};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpWord {
    pub coeff: Rational,
    pub xpow: u32,
    pub dorder: Rational,
}

impl OpWord {
    pub fn new(coeff: Rational, xpow: u32, dorder: Rational) -> Self {
        OpWord { coeff, xpow, dorder }
    }

    pub fn x() -> Self {
        OpWord::new(int(1), 1, int(0))
    }

    pub fn d(order: Rational) -> Self {
        OpWord::new(int(1), 0, order)
    }

    pub fn scalar(value: Rational) -> Self {
        OpWord::new(value, 0, int(0))
    }
}

/// Normal-ordered sum of words, sorted by `(xpow, dorder)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpExpr {
    words: BTreeMap<(u32, Rational), Rational>,
}

#[derive(Serialize)]
struct OpWordRepr {
    coeff: String,
    xpow: u32,
    dorder: String,
}

impl OpExpr {
    pub fn zero() -> Self {
        OpExpr::default()
    }

    pub fn from_words(words: impl IntoIterator<Item = OpWord>) -> Self {
        let mut acc: BTreeMap<(u32, Rational), Rational> = BTreeMap::new();
        for w in words {
            *acc.entry((w.xpow, w.dorder)).or_insert_with(Rational::zero) += w.coeff;
        }
        acc.retain(|_, c| !c.is_zero());
        OpExpr { words: acc }
    }

    pub fn word(w: OpWord) -> Self {
        OpExpr::from_words([w])
    }

    pub fn words(&self) -> Vec<OpWord> {
        self.words
            .iter()
            .map(|((x, d), c)| OpWord::new(c.clone(), *x, d.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        OpExpr::from_words(self.words().into_iter().map(|w| OpWord { coeff: w.coeff * factor, ..w }))
    }

    /// Words as JSON dumps `{coeff, xpow, dorder}`.
    pub fn to_json(&self) -> serde_json::Value {
        let reprs: Vec<OpWordRepr> = self
            .words
            .iter()
            .map(|((x, d), c)| OpWordRepr { coeff: c.to_string(), xpow: *x, dorder: d.to_string() })
            .collect();
        serde_json::to_value(reprs).expect("operator words serialize")
    }
}

impl Add<&OpExpr> for &OpExpr {
    type Output = OpExpr;

    fn add(self, rhs: &OpExpr) -> OpExpr {
        OpExpr::from_words(self.words().into_iter().chain(rhs.words()))
    }
}

impl Neg for &OpExpr {
    type Output = OpExpr;

    fn neg(self) -> OpExpr {
        self.scale(&int(-1))
    }
}

impl Sub<&OpExpr> for &OpExpr {
    type Output = OpExpr;

    fn sub(self, rhs: &OpExpr) -> OpExpr {
        self + &(-rhs)
    }
}

/// Product via the closed-form Leibniz expansion
/// `D^β x^b = Σ_j C(b, j)·β(β−1)…(β−j+1)·x^{b−j} D^{β−j}`.
impl Mul<&OpExpr> for &OpExpr {
    type Output = OpExpr;

    fn mul(self, rhs: &OpExpr) -> OpExpr {
        let mut out = Vec::new();
        for ((xa, da), ca) in &self.words {
            for ((xb, db), cb) in &rhs.words {
                let mut binom = Rational::one();
                let mut falling = Rational::one();
                for j in 0..=*xb {
                    if falling.is_zero() {
                        break;
                    }
                    out.push(OpWord::new(
                        ca * cb * &binom * &falling,
                        xa + xb - j,
                        da + db - int(j as i64),
                    ));
                    binom = binom * int((*xb - j) as i64) / int(j as i64 + 1);
                    falling *= da - int(j as i64);
                }
            }
        }
        OpExpr::from_words(out)
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return write!(f, "0");
        }
        for (i, ((x, d), c)) in self.words.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let mut parts = Vec::new();
            if !mag.is_one() || (*x == 0 && d.is_zero()) {
                parts.push(mag.to_string());
            }
            match x {
                0 => {}
                1 => parts.push("x".to_string()),
                n => parts.push(format!("x^{n}")),
            }
            if !d.is_zero() {
                parts.push(format!("D^({d})"));
            }
            write!(f, "{}", parts.join("·"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Atom {
    X,
    D(Rational),
}

/// Normal-orders a product of words by repeatedly rewriting the leftmost
/// `D^β·x` pair. Each rewrite removes one `(D, x)` inversion, so the
/// process terminates.
pub fn normal_order(product: &[OpWord]) -> OpExpr {
    let mut atoms = Vec::new();
    let mut coeff = Rational::one();
    for w in product {
        coeff *= &w.coeff;
        atoms.extend(std::iter::repeat_n(Atom::X, w.xpow as usize));
        if !w.dorder.is_zero() {
            atoms.push(Atom::D(w.dorder.clone()));
        }
    }
    let mut pending = vec![(coeff, merge_derivatives(atoms))];
    let mut done = Vec::new();
    while let Some((c, atoms)) = pending.pop() {
        if c.is_zero() {
            continue;
        }
        let inversion = atoms
            .windows(2)
            .position(|pair| matches!(pair, [Atom::D(_), Atom::X]));
        match inversion {
            None => {
                let xpow = atoms.iter().filter(|a| **a == Atom::X).count() as u32;
                let dorder = atoms
                    .iter()
                    .filter_map(|a| match a {
                        Atom::D(b) => Some(b.clone()),
                        Atom::X => None,
                    })
                    .fold(Rational::zero(), |acc, b| acc + b);
                done.push(OpWord::new(c, xpow, dorder));
            }
            Some(i) => {
                let Atom::D(beta) = atoms[i].clone() else { unreachable!() };
                let mut swapped = atoms.clone();
                swapped.swap(i, i + 1);
                pending.push((c.clone(), merge_derivatives(swapped)));
                let mut lowered = atoms[..i].to_vec();
                let reduced = &beta - int(1);
                if !reduced.is_zero() {
                    lowered.push(Atom::D(reduced));
                }
                lowered.extend_from_slice(&atoms[i + 2..]);
                pending.push((c * beta, merge_derivatives(lowered)));
            }
        }
    }
    OpExpr::from_words(done)
}

fn merge_derivatives(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        match (out.last_mut(), atom) {
            (Some(Atom::D(prev)), Atom::D(next)) => {
                *prev += next;
                if prev.is_zero() {
                    out.pop();
                }
            }
            (_, Atom::D(b)) if b.is_zero() => {}
            (_, a) => out.push(a),
        }
    }
    out
}

/// `A_δ = D^{δ/2} + x`.
pub fn annihilation(delta: &Rational) -> Vec<OpWord> {
    vec![OpWord::d(delta * rat(1, 2)), OpWord::x()]
}

/// `B_γ = −D^{γ/2} + x`.
pub fn creation(gamma: &Rational) -> Vec<OpWord> {
    vec![OpWord::new(int(-1), 0, gamma * rat(1, 2)), OpWord::x()]
}

/// `H_α = −D^α + x²` (unscaled).
pub fn hamiltonian(alpha: &Rational) -> OpExpr {
    OpExpr::from_words([OpWord::new(int(-1), 0, alpha.clone()), OpWord::new(int(1), 2, int(0))])
}

/// Normal-ordered product of two sums by distributing and ordering each
/// word pair through the rewriting engine.
pub fn product_of_sums(left: &[OpWord], right: &[OpWord]) -> OpExpr {
    left.iter()
        .flat_map(|l| right.iter().map(move |r| normal_order(&[l.clone(), r.clone()])))
        .fold(OpExpr::zero(), |acc, e| &acc + &e)
}

fn check_orders(delta: &Rational, gamma: &Rational) -> Result<()> {
    if !delta.is_positive() || !gamma.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "fractional orders must be positive, got delta = {delta}, gamma = {gamma}"
        )));
    }
    Ok(())
}

/// Result of `H_α = B_γ A_δ + ε_{γδ}` with `α = (δ + γ)/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub alpha: Rational,
    pub product: OpExpr,
    pub hamiltonian: OpExpr,
    pub remainder: OpExpr,
}

pub fn compose_factorization(delta: &Rational, gamma: &Rational) -> Result<Factorization> {
    check_orders(delta, gamma)?;
    let alpha = (delta + gamma) * rat(1, 2);
    let product = product_of_sums(&creation(gamma), &annihilation(delta));
    let hamiltonian = hamiltonian(&alpha);
    let remainder = &hamiltonian - &product;
    Ok(Factorization { alpha, product, hamiltonian, remainder })
}

/// `ε_{δγ}` from `H_α = A_δ B_γ − ε_{δγ}`.
pub fn reverted_factorization(delta: &Rational, gamma: &Rational) -> Result<OpExpr> {
    check_orders(delta, gamma)?;
    let alpha = (delta + gamma) * rat(1, 2);
    let product = product_of_sums(&annihilation(delta), &creation(gamma));
    Ok(&product - &hamiltonian(&alpha))
}

/// The one-index factorization with the `1/√α` scaling of both factors:
/// returns `(B_α A_α, H_α, ε_α)` where `H_α = (1/α)(−D^α + x²)`.
pub fn scaled_factorization(alpha: &Rational) -> Result<(OpExpr, OpExpr, OpExpr)> {
    let f = compose_factorization(alpha, alpha)?;
    let inv = Rational::one() / alpha;
    Ok((f.product.scale(&inv), f.hamiltonian.scale(&inv), f.remainder.scale(&inv)))
}

/// `(γ/2)D^{γ/2−1} + x(D^{γ/2} − D^{δ/2})`, the closed form of `ε_{γδ}`.
/// Swapping the arguments gives the closed form of `ε_{δγ}`.
pub fn remainder_closed_form(delta: &Rational, gamma: &Rational) -> OpExpr {
    let half_g = gamma * rat(1, 2);
    let half_d = delta * rat(1, 2);
    OpExpr::from_words([
        OpWord::new(half_g.clone(), 0, &half_g - int(1)),
        OpWord::new(int(1), 1, half_g),
        OpWord::new(int(-1), 1, half_d),
    ])
}

/// `c·sgn(k)^sgn·Ψ^θ_order` with a complex rational coefficient `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolTerm {
    pub order: Rational,
    pub sgn: u8,
    pub re: Rational,
    pub im: Rational,
}

/// First-order k-space operator `M(k) + C(k)·d/dk` whose coefficients are
/// sums of [`SymbolTerm`]s sharing one skewness θ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KOperator {
    pub theta: Rational,
    pub multiplier: Vec<SymbolTerm>,
    pub derivative: Vec<SymbolTerm>,
}

fn collect_symbol_terms(terms: Vec<SymbolTerm>) -> Vec<SymbolTerm> {
    let mut acc: BTreeMap<(Rational, u8), (Rational, Rational)> = BTreeMap::new();
    for t in terms {
        let slot = acc.entry((t.order, t.sgn % 2)).or_insert_with(|| (Rational::zero(), Rational::zero()));
        slot.0 += t.re;
        slot.1 += t.im;
    }
    acc.into_iter()
        .filter(|(_, (re, im))| !(re.is_zero() && im.is_zero()))
        .map(|((order, sgn), (re, im))| SymbolTerm { order, sgn, re, im })
        .collect()
}

fn eval_symbol_terms(terms: &[SymbolTerm], theta: &Rational, k: f64) -> Complex64 {
    let sign = if k > 0.0 { 1.0 } else if k < 0.0 { -1.0 } else { 0.0 };
    terms
        .iter()
        .map(|t| {
            let parity = if t.sgn == 1 { sign } else { 1.0 };
            Complex64::new(to_f64(&t.re), to_f64(&t.im)) * symbol_eval(&t.order, theta, k) * parity
        })
        .sum()
}

impl KOperator {
    pub fn new(theta: Rational, multiplier: Vec<SymbolTerm>, derivative: Vec<SymbolTerm>) -> Self {
        KOperator {
            theta,
            multiplier: collect_symbol_terms(multiplier),
            derivative: collect_symbol_terms(derivative),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let s = |ts: &[SymbolTerm]| {
            ts.iter()
                .map(|t| SymbolTerm { re: &t.re * factor, im: &t.im * factor, ..t.clone() })
                .collect()
        };
        KOperator::new(self.theta.clone(), s(&self.multiplier), s(&self.derivative))
    }

    /// `(M φ + C φ')(k)`.
    pub fn apply(&self, state: &KState, k: f64) -> Result<Complex64> {
        let m = eval_symbol_terms(&self.multiplier, &self.theta, k);
        let c = eval_symbol_terms(&self.derivative, &self.theta, k);
        let mut out = m * state.eval(k)?;
        if !self.derivative.is_empty() {
            out += c * state.eval_derivative(k)?;
        }
        Ok(out)
    }
}

impl fmt::Display for KOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |t: &SymbolTerm| {
            let coeff = match (t.re.is_zero(), t.im.is_zero()) {
                (false, true) => format!("{}", t.re),
                (true, false) => format!("{}i", t.im),
                _ => format!("({} + {}i)", t.re, t.im),
            };
            let sgn = if t.sgn == 1 { "·sgn(k)" } else { "" };
            format!("{coeff}{sgn}·Ψ^{}_{{{}}}", self.theta, t.order)
        };
        let mut parts: Vec<String> = self.multiplier.iter().map(render).collect();
        parts.extend(self.derivative.iter().map(|t| format!("{}·d/dk", render(t))));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `ε̃_{γδ} = −(γ/2)Ψ_{γ/2−1} + i[(γ sgn/2)Ψ_{γ/2−1} + Ψ_{γ/2} d/dk
/// − (δ sgn/2)Ψ_{δ/2−1} − Ψ_{δ/2} d/dk]`, unscaled, as a [`KOperator`].
pub fn fourier_remainder(gamma: &Rational, delta: &Rational, theta: &Rational) -> Result<KOperator> {
    check_orders(delta, gamma)?;
    let hg = gamma * rat(1, 2);
    let hd = delta * rat(1, 2);
    let zero = Rational::zero;
    let multiplier = vec![
        SymbolTerm { order: &hg - int(1), sgn: 0, re: -hg.clone(), im: zero() },
        SymbolTerm { order: &hg - int(1), sgn: 1, re: zero(), im: hg.clone() },
        SymbolTerm { order: &hd - int(1), sgn: 1, re: zero(), im: -hd.clone() },
    ];
    let derivative = vec![
        SymbolTerm { order: hg, sgn: 0, re: zero(), im: int(1) },
        SymbolTerm { order: hd, sgn: 0, re: zero(), im: int(-1) },
    ];
    Ok(KOperator::new(theta.clone(), multiplier, derivative))
}

/// Maps an x-space operator to k-space word by word with
/// `D^β → −Ψ_β` and `x D^β → i d/dk ∘ Ψ_β = iβ sgn Ψ_{β−1} + iΨ_β d/dk`.
/// The rule is applied as written at `β = 0` too, so a scalar maps to
/// `−Ψ_0`. Only words with `xpow ≤ 1` are supported.
pub fn fourier_image(op: &OpExpr, theta: &Rational) -> Result<KOperator> {
    let mut multiplier = Vec::new();
    let mut derivative = Vec::new();
    for w in op.words() {
        if w.xpow > 1 {
            return Err(Error::InvalidParameter(format!(
                "no k-space image for word x^{}·D^({})",
                w.xpow, w.dorder
            )));
        }
        if w.xpow == 0 {
            multiplier.push(SymbolTerm { order: w.dorder, sgn: 0, re: -w.coeff, im: Rational::zero() });
        } else {
            multiplier.push(SymbolTerm {
                order: &w.dorder - int(1),
                sgn: 1,
                re: Rational::zero(),
                im: &w.coeff * &w.dorder,
            });
            derivative.push(SymbolTerm { order: w.dorder, sgn: 0, re: Rational::zero(), im: w.coeff });
        }
    }
    Ok(KOperator::new(theta.clone(), multiplier, derivative))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ground_state;
    use proptest::prelude::*;

    fn d(n: i64, m: i64) -> OpWord {
        OpWord::d(rat(n, m))
    }

    #[test]
    fn single_commutation() {
        let e = normal_order(&[d(3, 4), OpWord::x()]);
        let expected = OpExpr::from_words([
            OpWord::new(int(1), 1, rat(3, 4)),
            OpWord::new(rat(3, 4), 0, rat(-1, 4)),
        ]);
        assert_eq!(e, expected);
        let classical = normal_order(&[d(1, 1), OpWord::x()]);
        assert_eq!(classical, OpExpr::from_words([OpWord::new(int(1), 1, int(1)), OpWord::scalar(int(1))]));
    }

    #[test]
    fn ordered_input_is_untouched() {
        let w = OpWord::new(int(1), 1, rat(1, 2));
        assert_eq!(normal_order(std::slice::from_ref(&w)), OpExpr::word(w));
    }

    #[test]
    fn unscaled_two_index_remainders() {
        let f = compose_factorization(&int(1), &int(2)).unwrap();
        assert_eq!(f.alpha, rat(3, 2));
        // 1·D⁰ + x(D¹ − D^{1/2})
        let expected = OpExpr::from_words([
            OpWord::scalar(int(1)),
            OpWord::new(int(1), 1, int(1)),
            OpWord::new(int(-1), 1, rat(1, 2)),
        ]);
        assert_eq!(f.remainder, expected);
        let rev = reverted_factorization(&int(1), &int(2)).unwrap();
        let expected_rev = OpExpr::from_words([
            OpWord::new(rat(1, 2), 0, rat(-1, 2)),
            OpWord::new(int(1), 1, rat(1, 2)),
            OpWord::new(int(-1), 1, int(1)),
        ]);
        assert_eq!(rev, expected_rev);
    }

    #[test]
    fn scaled_remainders() {
        let (_, _, eps2) = scaled_factorization(&int(2)).unwrap();
        assert_eq!(eps2, OpExpr::word(OpWord::scalar(rat(1, 2))));
        let (_, _, eps) = scaled_factorization(&rat(3, 2)).unwrap();
        assert_eq!(eps, OpExpr::word(OpWord::new(rat(1, 2), 0, rat(-1, 4))));
    }

    #[test]
    fn x_terms_have_opposite_sign() {
        let (delta, gamma) = (int(1), int(2));
        let forward = compose_factorization(&delta, &gamma).unwrap().remainder;
        let reverted = reverted_factorization(&delta, &gamma).unwrap();
        let x_part = |e: &OpExpr| OpExpr::from_words(e.words().into_iter().filter(|w| w.xpow == 1));
        assert_eq!(x_part(&forward), -&x_part(&reverted));
    }

    #[test]
    fn rejects_non_positive_orders() {
        assert!(compose_factorization(&int(0), &int(1)).is_err());
        assert!(reverted_factorization(&int(1), &int(-1)).is_err());
    }

    #[test]
    fn equal_indices_cancel_bracket() {
        let op = fourier_remainder(&rat(3, 2), &rat(3, 2), &int(1)).unwrap();
        assert!(op.derivative.is_empty());
        assert_eq!(
            op.multiplier,
            vec![SymbolTerm { order: rat(-1, 4), sgn: 0, re: rat(-3, 4), im: int(0) }]
        );
    }

    #[test]
    fn gaussian_remainder_value() {
        let op = fourier_remainder(&int(2), &int(2), &int(0)).unwrap();
        let phi0 = ground_state(&int(2)).unwrap();
        let v = op.apply(&phi0, 1.0).unwrap();
        // −(γ/2)Ψ⁰₀φ₀ at γ = 2
        assert!((v - Complex64::new(-(-0.5f64).exp(), 0.0)).norm() < 1e-15);
        let scaled = op.scale(&rat(1, 2)).apply(&phi0, 1.0).unwrap();
        assert!((scaled.re + 0.5 * (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn fourier_image_of_remainder_matches_closed_form() {
        for (delta, gamma) in [(int(1), int(2)), (rat(3, 2), int(1)), (rat(1, 2), rat(5, 3))] {
            let eps = compose_factorization(&delta, &gamma).unwrap().remainder;
            let image = fourier_image(&eps, &int(1)).unwrap();
            assert_eq!(image, fourier_remainder(&gamma, &delta, &int(1)).unwrap());
        }
    }

    #[test]
    fn json_dump() {
        let e = OpExpr::word(OpWord::new(rat(1, 2), 1, rat(-1, 4)));
        assert_eq!(e.to_json(), serde_json::json!([{"coeff": "1/2", "xpow": 1, "dorder": "-1/4"}]));
    }

    #[test]
    fn display() {
        let f = compose_factorization(&int(1), &int(2)).unwrap();
        assert_eq!(f.remainder.to_string(), "1 - x·D^(1/2) + x·D^(1)");
    }

    fn order() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, m)| rat(n, m))
    }

    fn word() -> impl Strategy<Value = OpWord> {
        ((-3i64..=3).prop_filter("nonzero", |c| *c != 0), 0u32..3, order())
            .prop_map(|(c, x, b)| OpWord::new(int(c), x, b))
    }

    proptest! {
        #[test]
        fn normal_ordering_is_confluent(a in word(), b in word(), c in word()) {
            let flat = normal_order(&[a.clone(), b.clone(), c.clone()]);
            let left = &(&normal_order(&[a.clone(), b.clone()]) * &OpExpr::word(c.clone()));
            let right = &OpExpr::word(a.clone()) * &normal_order(&[b.clone(), c.clone()]);
            prop_assert_eq!(&flat, left);
            prop_assert_eq!(&flat, &right);
        }

        #[test]
        fn rewriting_agrees_with_leibniz(a in word(), b in word()) {
            prop_assert_eq!(normal_order(&[a.clone(), b.clone()]), &OpExpr::word(a) * &OpExpr::word(b));
        }
    }
}
