//! k-space eigenfunctions, the Riesz–Feller symbol and local eigenvalues.
//!
//! Conventions: `Ψ^θ_β(k) = |k|^β e^{i sgn(k) θπ/2}`, the k-space
//! factoring operators are `A = Ψ^θ_{α/2} + i d/dk` and
//! `B = Ψ^θ_{α/2} − i d/dk`, and the Hamiltonian image is
//! `H_k = (1/α)(Ψ^θ_α − d²/dk²)`. States are generated at θ = 1, where the
//! kernel of `A` is the sub-Gaussian `φ₀ = exp(−|k|^{α/2+1}/(α/2+1))`.
//!
//! Complex quantities are carried as a pair of real [`KExpr`]s.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hermite::{ladder, RFHermite};
use crate::rational::{as_integer, int, rat, to_f64, Rational};
use crate::term_algebra::{AlphaPoly, FracExponent, KExpr};
use crate::transform::{AxisLabel, Grid};

/// The Riesz–Feller symbol `Ψ^θ_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolSpec {
    order: Rational,
    theta: Rational,
    in_diamond: bool,
}

impl SymbolSpec {
    pub fn new(order: Rational, theta: Rational) -> Result<Self> {
        if !order.is_positive() {
            return Err(Error::InvalidParameter(format!("symbol order must be > 0, got {order}")));
        }
        let bound = std::cmp::min(order.clone(), int(2) - &order);
        let in_diamond = theta.abs() <= bound;
        Ok(SymbolSpec { order, theta, in_diamond })
    }

    pub fn order(&self) -> &Rational {
        &self.order
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    /// Whether `|θ| ≤ min(order, 2 − order)` (the Takayasu–Feller diamond).
    /// Values outside are accepted.
    pub fn in_diamond(&self) -> bool {
        self.in_diamond
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        symbol_eval(&self.order, &self.theta, k)
    }
}

/// `e^{iθπ/2}` for `k > 0`; exact for integer θ.
pub fn phase(theta: &Rational) -> Complex64 {
    match exact_phase(theta) {
        Some((c, s)) => Complex64::new(c as f64, s as f64),
        None => {
            let angle = to_f64(theta) * FRAC_PI_2;
            Complex64::new(angle.cos(), angle.sin())
        }
    }
}

/// `(cos θπ/2, sin θπ/2)` when both are rational, i.e. θ an integer.
pub fn exact_phase(theta: &Rational) -> Option<(i64, i64)> {
    let t = as_integer(theta)?;
    Some(match t.rem_euclid(4) {
        0 => (1, 0),
        1 => (0, 1),
        2 => (-1, 0),
        _ => (0, -1),
    })
}

/// `Ψ^θ_order(k)` for any rational order. `sgn(0) = 0`, so the value at the
/// origin is zero for positive order.
pub fn symbol_eval(order: &Rational, theta: &Rational, k: f64) -> Complex64 {
    if k == 0.0 {
        return if order.is_positive() {
            Complex64::zero()
        } else if order.is_zero() {
            // |0|^0 = 1 with phase e^0
            Complex64::one()
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        };
    }
    let magnitude = if order.is_zero() { 1.0 } else { k.abs().powf(to_f64(order)) };
    let p = phase(theta);
    let p = if k < 0.0 { p.conj() } else { p };
    p * magnitude
}

/// `dΨ^θ_β/dk = β·sgn(k)·Ψ^θ_{β−1}`, returned as `(β, β − 1)`.
pub fn symbol_derivative(order: &Rational) -> (Rational, Rational) {
    (order.clone(), order - int(1))
}

/// `s(k) = sgn(k)|k|^{α/2}`, so that `φ₀' = −s·φ₀`.
pub fn ground_log_derivative() -> KExpr {
    KExpr::monomial(AlphaPoly::one(), 1, FracExponent::new(1, 0))
}

/// A k-space state `φ_n = iⁿ H̃_n φ₀` at a fixed α.
#[derive(Clone, Debug)]
pub struct KState {
    n: u32,
    alpha: Rational,
    hermite: RFHermite,
    derivative_factor: KExpr,
    /// `1/(α/2 + 1)`, the coefficient of `|k|^{α/2+1}` in `−ln φ₀`.
    ground_coeff: Rational,
    ground_exponent: FracExponent,
}

impl KState {
    fn build(n: u32, alpha: Rational) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        let hermite = ladder(n);
        let derivative_factor = &hermite.expr().differentiate() - &(&ground_log_derivative() * hermite.expr());
        let ground_exponent = FracExponent::new(1, 1);
        let ground_coeff = Rational::one() / ground_exponent.eval(&alpha);
        Ok(KState { n, alpha, hermite, derivative_factor, ground_coeff, ground_exponent })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn hermite(&self) -> &RFHermite {
        &self.hermite
    }

    /// The power of `i` in front of `H̃_n φ₀`.
    pub fn phase_power(&self) -> u32 {
        self.n
    }

    /// Exponent `α/2 + 1` of the ground-state weight.
    pub fn ground_exponent(&self) -> FracExponent {
        self.ground_exponent
    }

    pub fn ground_coefficient(&self) -> &Rational {
        &self.ground_coeff
    }

    /// `iⁿ` as a complex number.
    pub fn phase(&self) -> Complex64 {
        match self.n % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Even states are real, odd ones purely imaginary.
    pub fn is_real(&self) -> bool {
        self.n.is_multiple_of(2)
    }

    /// `φ₀(k)`.
    pub fn ground_value(&self, k: f64) -> f64 {
        let b = to_f64(&self.ground_exponent.eval(&self.alpha));
        (-to_f64(&self.ground_coeff) * k.abs().powf(b)).exp()
    }

    /// `H̃_n(k)φ₀(k)`, i.e. the state without its phase.
    pub fn real_profile(&self, k: f64) -> Result<f64> {
        Ok(self.hermite.expr().eval(&self.alpha, k)? * self.ground_value(k))
    }

    pub fn eval(&self, k: f64) -> Result<Complex64> {
        Ok(self.phase() * self.real_profile(k)?)
    }

    /// `(H̃_n' − sH̃_n)`, with `φ_n' = iⁿ(H̃_n' − sH̃_n)φ₀`.
    pub fn derivative_factor(&self) -> &KExpr {
        &self.derivative_factor
    }

    pub fn eval_derivative(&self, k: f64) -> Result<Complex64> {
        let value = self.derivative_factor.eval(&self.alpha, k)? * self.ground_value(k);
        Ok(self.phase() * value)
    }
}

/// `φ₀` for the given α (C = 1).
pub fn ground_state(alpha: &Rational) -> Result<KState> {
    KState::build(0, alpha.clone())
}

pub fn excited_state(n: u32, alpha: &Rational) -> Result<KState> {
    KState::build(n, alpha.clone())
}

/// `(A_{k,α}φ₀)/φ₀` at θ = 1 as `(real, imaginary)` parts. Both vanish.
pub fn kernel_symbolic() -> (KExpr, KExpr) {
    // Ψ¹_{α/2} = i·s and φ₀'/φ₀ = −s, so A φ₀/φ₀ = i·s + i·(−s).
    let s = ground_log_derivative();
    let imaginary = &s + &(-&s);
    (KExpr::zero(), imaginary)
}

/// Numeric residual `Ψ¹_{α/2}(k)φ₀(k) + iφ₀'(k)`.
pub fn kernel_residual(alpha: &Rational, k: f64) -> Result<Complex64> {
    let state = ground_state(alpha)?;
    let psi = symbol_eval(&(alpha * rat(1, 2)), &int(1), k);
    Ok(psi * state.ground_value(k) + Complex64::i() * state.eval_derivative(k)?)
}

/// `λ_n(k) = (H_k φ_n)/φ_n` as a rational function of `k`.
///
/// With `H = H̃_n` and `s = sgn(k)|k|^{α/2}`:
///
/// ```text
/// λ_n = [ e^{i sgn(k)θπ/2}·S + K ] / (α H)
/// S   = |k|^α H
/// K   = −H'' + 2sH' − (s² − s')H
/// ```
#[derive(Clone, Debug)]
pub struct LocalEigenvalue {
    n: u32,
    alpha: Rational,
    theta: Rational,
    kinetic: KExpr,
    symbol: KExpr,
    denominator: KExpr,
}

impl LocalEigenvalue {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    /// θ-independent part `K` of the numerator.
    pub fn kinetic(&self) -> &KExpr {
        &self.kinetic
    }

    /// `|k|^α H̃_n`, multiplied by the symbol phase in the numerator.
    pub fn symbol_part(&self) -> &KExpr {
        &self.symbol
    }

    pub fn denominator(&self) -> &KExpr {
        &self.denominator
    }

    /// Exact `(real, imaginary)` numerators. Requires an integer θ, the only
    /// case where the symbol phase is rational.
    pub fn numerator_parts(&self) -> Result<(KExpr, KExpr)> {
        let (c, s) = exact_phase(&self.theta)
            .ok_or_else(|| Error::IrrationalPhase(self.theta.to_string()))?;
        let sgn = KExpr::monomial(AlphaPoly::one(), 1, FracExponent::ZERO);
        let real = &self.kinetic + &self.symbol.scale_rational(&int(c));
        let imag = (&sgn * &self.symbol).scale_rational(&int(s));
        Ok((real, imag))
    }

    pub fn eval(&self, k: f64) -> Result<Complex64> {
        let den = self.denominator.eval(&self.alpha, k)?;
        let kin = self.kinetic.eval(&self.alpha, k)?;
        let sym = self.symbol.eval(&self.alpha, k)?;
        let p = phase(&self.theta);
        let p = if k < 0.0 { p.conj() } else { p };
        Ok((p * sym + kin) / den)
    }
}

pub fn local_eigenvalue(n: u32, alpha: &Rational, theta: &Rational) -> Result<LocalEigenvalue> {
    if !alpha.is_positive() {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let h = ladder(n).into_expr();
    let s = ground_log_derivative();
    let ds = s.differentiate();
    let dh = h.differentiate();
    let ddh = dh.differentiate();
    let two = AlphaPoly::from_int(2);
    let kinetic = &(&(-&ddh) + &(&s * &dh).scale(&two)) - &(&(&(&s * &s) - &ds) * &h);
    let k_alpha = KExpr::monomial(AlphaPoly::one(), 0, FracExponent::new(2, 0));
    let symbol = &k_alpha * &h;
    let denominator = h.scale(&AlphaPoly::alpha());
    Ok(LocalEigenvalue {
        n,
        alpha: alpha.clone(),
        theta: theta.clone(),
        kinetic,
        symbol,
        denominator,
    })
}

/// Samples `φ_n` on the given points. Points where the state is singular
/// (negative powers at `k = 0`) are skipped.
pub fn sample_state(state: &KState, ks: &[f64]) -> Grid {
    let (points, values): (Vec<f64>, Vec<Complex64>) = ks
        .iter()
        .filter_map(|&k| state.eval(k).ok().map(|v| (k, v)))
        .unzip();
    Grid::new(AxisLabel::K, points, values).expect("sampled points inherit the input ordering")
}

/// Samples `λ_n(k)`, skipping singular points.
pub fn sample_eigenvalue(lambda: &LocalEigenvalue, ks: &[f64]) -> Grid {
    let (points, values): (Vec<f64>, Vec<Complex64>) = ks
        .iter()
        .filter_map(|&k| match lambda.eval(k) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => Some((k, v)),
            _ => None,
        })
        .unzip();
    Grid::new(AxisLabel::K, points, values).expect("sampled points inherit the input ordering")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::ladder;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(symbol_eval(&int(2), &int(0), 3.0), Complex64::new(9.0, 0.0));
        assert_eq!(symbol_eval(&int(1), &int(1), 2.0), Complex64::new(0.0, 2.0));
        assert_eq!(symbol_eval(&rat(3, 2), &int(1), -1.0), Complex64::new(0.0, -1.0));
        assert_eq!(symbol_eval(&int(1), &int(1), 0.0), Complex64::zero());
    }

    #[test]
    fn diamond_flag() {
        assert!(SymbolSpec::new(int(1), int(1)).unwrap().in_diamond());
        assert!(!SymbolSpec::new(rat(3, 2), int(1)).unwrap().in_diamond());
        assert!(SymbolSpec::new(rat(3, 2), rat(1, 2)).unwrap().in_diamond());
        assert!(SymbolSpec::new(int(0), int(0)).is_err());
    }

    #[test]
    fn symbol_derivative_matches_finite_difference() {
        let order = rat(3, 2);
        let (factor, lowered) = symbol_derivative(&order);
        for &k in &[0.7, -1.3] {
            let h = 1e-6;
            let fd = (symbol_eval(&order, &int(1), k + h) - symbol_eval(&order, &int(1), k - h)) / (2.0 * h);
            let analytic = symbol_eval(&lowered, &int(1), k) * (to_f64(&factor) * k.signum());
            assert!(close(fd, analytic, 1e-8), "{fd} vs {analytic}");
        }
    }

    #[test]
    fn ground_states() {
        assert!((ground_state(&int(2)).unwrap().ground_value(1.5) - (-1.125f64).exp()).abs() < 1e-15);
        assert!((ground_state(&int(1)).unwrap().ground_value(1.0) - (-2.0f64 / 3.0).exp()).abs() < 1e-15);
        let s = ground_state(&rat(3, 2)).unwrap();
        assert_eq!(s.ground_coefficient(), &rat(4, 7));
        assert_eq!(s.ground_exponent().eval(&rat(3, 2)), rat(7, 4));
        assert!(ground_state(&int(0)).is_err());
    }

    #[test]
    fn kernel_vanishes_symbolically() {
        let (re, im) = kernel_symbolic();
        assert!(re.is_empty() && im.is_empty());
        let r = kernel_residual(&rat(3, 2), -2.5).unwrap();
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn excited_state_values() {
        let phi1 = excited_state(1, &int(2)).unwrap();
        let v = phi1.eval(1.0).unwrap();
        assert!(close(v, Complex64::new(0.0, 2.0 * (-0.5f64).exp()), 1e-15));
        let phi2 = excited_state(2, &int(1)).unwrap();
        // [α|k|^{α/2−1} − 4|k|^α]φ₀ at α = 1, k = 4
        let expected = (4f64.powf(-0.5) - 16.0) * phi2.ground_value(4.0);
        assert!((phi2.eval(4.0).unwrap().re - expected).abs() < 1e-14);
        assert_eq!(excited_state(0, &int(1)).unwrap().hermite(), &ladder(0));
    }

    #[test]
    fn derivative_factor_matches_finite_difference() {
        let state = excited_state(3, &rat(3, 2)).unwrap();
        let k = 1.1;
        let h = 1e-6;
        let fd = (state.eval(k + h).unwrap() - state.eval(k - h).unwrap()) / (2.0 * h);
        assert!(close(fd, state.eval_derivative(k).unwrap(), 1e-7));
    }

    #[test]
    fn theta_zero_ground_eigenvalue() {
        let lam = local_eigenvalue(0, &int(1), &int(0)).unwrap();
        assert!((lam.eval(4.0).unwrap().re - 0.25).abs() < 1e-15);
        let lam2 = local_eigenvalue(0, &int(2), &int(0)).unwrap();
        assert!((lam2.eval(0.37).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn theta_one_shift_is_symbol_minus_one_over_alpha() {
        for n in 0..4 {
            let l0 = local_eigenvalue(n, &rat(3, 2), &int(0)).unwrap();
            let l1 = local_eigenvalue(n, &rat(3, 2), &int(1)).unwrap();
            let (r0, i0) = l0.numerator_parts().unwrap();
            let (r1, i1) = l1.numerator_parts().unwrap();
            assert!(i0.is_empty());
            // (Δre + iΔim)·α = (i sgn − 1)|k|^α · (αH)
            let k_alpha = KExpr::monomial(AlphaPoly::one(), 0, FracExponent::new(2, 0));
            let sgn = KExpr::monomial(AlphaPoly::one(), 1, FracExponent::ZERO);
            let den = l0.denominator();
            let alpha = AlphaPoly::alpha();
            assert_eq!((&r1 - &r0).scale(&alpha), (-&(&k_alpha * den)));
            assert_eq!((&i1 - &i0).scale(&alpha), &(&sgn * &k_alpha) * den);
        }
    }

    #[test]
    fn irrational_phase_has_no_exact_parts() {
        let lam = local_eigenvalue(1, &int(1), &rat(1, 3)).unwrap();
        assert!(matches!(lam.numerator_parts(), Err(Error::IrrationalPhase(_))));
        assert!(lam.eval(1.0).unwrap().im != 0.0);
    }

    #[test]
    fn sampling_skips_singular_origin() {
        let state = excited_state(2, &int(1)).unwrap();
        let grid = sample_state(&state, &[-1.0, 0.0, 1.0]);
        assert_eq!(grid.points(), &[-1.0, 1.0]);
        let smooth = excited_state(1, &int(1)).unwrap();
        assert_eq!(sample_state(&smooth, &[-1.0, 0.0, 1.0]).len(), 3);
    }
}
