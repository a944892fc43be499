//! Riesz–Feller Hermite "polynomials" `H̃_n(k)`.
//!
//! The family is generated by the k-space creation operator. With
//! `φ_n = iⁿ H̃_n φ₀` and `φ₀' = −sgn(k)|k|^{α/2} φ₀`, applying
//! `B = Ψ^1_{α/2} − i d/dk` and stripping `i^{n+1} φ₀` leaves
//!
//! ```text
//! H̃_{n+1} = 2 sgn(k)|k|^{α/2} H̃_n − dH̃_n/dk
//! ```
//!
//! which is the source of truth here. [`rodrigues`] rebuilds the same family
//! from `(−1)ⁿ e^{W} dⁿ/dkⁿ e^{−W}`, `W = 2|k|^{α/2+1}/(α/2+1)`, through
//! complete Bell polynomials in the derivatives of `W` and serves as an
//! independent check.
//!
//! Every `H̃_n` (n ≥ 1) has the shape
//!
//! ```text
//! sgn(k)ⁿ [ 2ⁿ|k|^{nα/2} − p₁(α)|k|^{(n−1)α/2−1} + p₂(α)|k|^{(n−2)α/2−2} − … ]
//! ```
//!
//! with `deg pᵢ ≤ i`; [`extract_p_coefficients`] reads the `pᵢ` back out.
//!
//! The commonly tabulated `H̃_4` lists `6α(α−1) + 2(α/2)(α/2−1)` on the
//! `|k|^{α−2}` term. The recurrence (and the Rodrigues route) give
//! `6α(α−1) + 4(α/2)(α/2−1)`. The two agree at α = 2, where the extra piece
//! vanishes. [`tabulated_form`] keeps the tabulated version for comparison.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};
use crate::term_algebra::{AlphaPoly, FracExponent, KExpr, KTerm, SpecializedTerm};

/// `H̃_n` together with its degree index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RFHermite {
    n: u32,
    expr: KExpr,
}

impl RFHermite {
    /// `H̃_0 = 1`.
    pub fn ground() -> Self {
        RFHermite { n: 0, expr: KExpr::one() }
    }

    pub fn from_parts(n: u32, expr: KExpr) -> Self {
        RFHermite { n, expr }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn expr(&self) -> &KExpr {
        &self.expr
    }

    pub fn into_expr(self) -> KExpr {
        self.expr
    }
}

/// `W' = 2 sgn(k)|k|^{α/2}`, the multiplicative part of the creation step.
pub fn creation_multiplier() -> KExpr {
    KExpr::monomial(AlphaPoly::from_int(2), 1, FracExponent::new(1, 0))
}

pub fn ladder_next(h: &RFHermite) -> RFHermite {
    let raised = &creation_multiplier() * &h.expr;
    RFHermite { n: h.n + 1, expr: &raised - &h.expr.differentiate() }
}

/// `H̃_n` by `n` creation steps from `H̃_0`.
pub fn ladder(n: u32) -> RFHermite {
    (0..n).fold(RFHermite::ground(), |h, _| ladder_next(&h))
}

/// `[H̃_0, …, H̃_n]`.
pub fn ladder_table(n: u32) -> Vec<RFHermite> {
    let mut table = Vec::with_capacity(n as usize + 1);
    table.push(RFHermite::ground());
    for _ in 0..n {
        let next = ladder_next(table.last().expect("table starts non-empty"));
        table.push(next);
    }
    table
}

/// Rodrigues-type construction `(−1)ⁿ e^{W} dⁿ/dkⁿ e^{−W}`.
///
/// `dⁿ/dkⁿ e^{−W} = Bₙ(−W', −W'', …, −W⁽ⁿ⁾) e^{−W}` with `Bₙ` the complete
/// Bell polynomial, built by `B_{m+1} = Σᵢ C(m,i) B_{m−i} x_{i+1}`.
/// The `sgn(k)ⁿ` prefactor that sometimes accompanies this formula is not
/// applied, so that the result coincides with the ladder.
pub fn rodrigues(n: u32) -> RFHermite {
    let n_us = n as usize;
    // x_j = -W^{(j)}, j = 1..=n
    let mut xs: Vec<KExpr> = Vec::with_capacity(n_us);
    let mut w_deriv = creation_multiplier();
    for _ in 0..n_us {
        xs.push(-&w_deriv);
        w_deriv = w_deriv.differentiate();
    }
    let mut bell: Vec<KExpr> = vec![KExpr::one()];
    for m in 0..n_us {
        let mut next = KExpr::zero();
        let mut binom = Rational::one();
        for i in 0..=m {
            let term = &bell[m - i] * &xs[i];
            next = &next + &term.scale_rational(&binom);
            binom = binom * int((m - i) as i64) / int(i as i64 + 1);
        }
        bell.push(next);
    }
    let sign = if n.is_multiple_of(2) { int(1) } else { int(-1) };
    RFHermite { n, expr: bell[n_us].scale_rational(&sign) }
}

/// Reads `[2ⁿ, p₁(α), …, p_{n−1}(α)]` off a ladder-generated `H̃_n`.
///
/// The term on `|k|^{(n−i)α/2 − i}` carries `(−1)ⁱ pᵢ(α)`. `H̃_0` yields `[1]`.
pub fn extract_p_coefficients(h: &RFHermite) -> Result<Vec<AlphaPoly>> {
    let n = h.n as i64;
    let parity = (h.n % 2) as u8;
    let slots = n.max(1) as usize;
    let mut out = vec![AlphaPoly::zero(); slots];
    for term in h.expr.terms() {
        let i = -term.exponent.m;
        let fits = term.sgn == parity
            && (0..slots as i64).contains(&i)
            && term.exponent.j as i64 == n - i;
        if !fits {
            return Err(Error::Structure(format!(
                "term sgn^{}·|k|^({}) does not belong to the ladder of H̃_{}",
                term.sgn, term.exponent, h.n
            )));
        }
        out[i as usize] = if i % 2 == 0 { term.coeff.clone() } else { -&term.coeff };
    }
    Ok(out)
}

/// `H̃_n` at α = 2 as a polynomial in `k = sgn(k)|k|`.
///
/// The result is a [`KExpr`] whose terms all have `j = 0`; the term
/// `c·sgn(k)^p·|k|^e` stands for `c·kᵉ` (with `p ≡ e mod 2`).
pub fn standard_reduction(h: &RFHermite) -> KExpr {
    let reduced = h.expr.specialize(&int(2));
    KExpr::from_terms(reduced.iter().map(|(c, s, e)| {
        let m = crate::rational::as_integer(e).expect("exponents are integers at α = 2");
        KTerm::new(AlphaPoly::constant(c.clone()), s, FracExponent::new(0, m))
    }))
}

/// Coefficients (lowest degree first) of an α-free expression that is a
/// genuine polynomial in `k`. Returns `None` otherwise.
pub fn as_k_polynomial(expr: &KExpr) -> Option<Vec<Rational>> {
    let mut out: Vec<Rational> = Vec::new();
    for term in expr.terms() {
        let e = term.exponent;
        if e.j != 0 || e.m < 0 || (e.m % 2) as u8 != term.sgn || !term.coeff.is_constant() {
            return None;
        }
        let deg = e.m as usize;
        if out.len() <= deg {
            out.resize(deg + 1, Rational::zero());
        }
        out[deg] += term.coeff.constant_term();
    }
    Some(out)
}

/// Tabulated closed forms of `H̃_0 … H̃_4`, transcribed as commonly printed.
/// See the module docs for the `H̃_4` difference.
pub fn tabulated_form(n: u32) -> Option<KExpr> {
    let a = AlphaPoly::alpha;
    let c = AlphaPoly::from_int;
    let half_alpha = || AlphaPoly::linear(int(0), rat(1, 2));
    let half_alpha_minus = |shift: i64| AlphaPoly::linear(int(-shift), rat(1, 2));
    let e = FracExponent::new;
    let terms: Vec<KTerm> = match n {
        0 => vec![KTerm::new(c(1), 0, e(0, 0))],
        1 => vec![KTerm::new(c(2), 1, e(1, 0))],
        2 => vec![KTerm::new(c(4), 0, e(2, 0)), KTerm::new(-a(), 0, e(1, -1))],
        3 => vec![
            KTerm::new(c(8), 1, e(3, 0)),
            KTerm::new(a().scale(&int(-6)), 1, e(2, -1)),
            KTerm::new(half_alpha() * half_alpha_minus(1) * c(2), 1, e(1, -2)),
        ],
        4 => vec![
            KTerm::new(c(16), 0, e(4, 0)),
            KTerm::new(a().scale(&int(-24)), 0, e(3, -1)),
            KTerm::new(a() * AlphaPoly::linear(int(-1), int(1)) * c(6), 0, e(2, -2)),
            KTerm::new(half_alpha() * half_alpha_minus(1) * c(2), 0, e(2, -2)),
            KTerm::new(
                half_alpha() * half_alpha_minus(1) * half_alpha_minus(2) * c(-2),
                0,
                e(1, -3),
            ),
        ],
        _ => return None,
    };
    Some(KExpr::from_terms(terms))
}

/// One row of the exported table.
#[derive(Clone, Debug, Serialize)]
pub struct HermiteRow {
    pub n: u32,
    pub terms: KExpr,
}

/// One row of the exported table at a fixed α.
#[derive(Clone, Debug, Serialize)]
pub struct SpecializedHermiteRow {
    pub n: u32,
    pub alpha: String,
    pub terms: Vec<SpecializedTerm>,
}

pub fn symbolic_rows(n: u32) -> Vec<HermiteRow> {
    ladder_table(n)
        .into_iter()
        .map(|h| HermiteRow { n: h.n, terms: h.expr })
        .collect()
}

pub fn specialized_rows(n: u32, alpha: &Rational) -> Vec<SpecializedHermiteRow> {
    ladder_table(n)
        .into_iter()
        .map(|h| SpecializedHermiteRow {
            n: h.n,
            alpha: alpha.to_string(),
            terms: h.expr.specialize(alpha).to_terms(),
        })
        .collect()
}
