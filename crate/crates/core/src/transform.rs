//! Inverse Fourier transform of k-space states and the non-Gaussianity
//! measures.
//!
//! The transform convention is `ψ(x) = ∫ φ(k) e^{ikx} dk` with no `2π`
//! prefactor; under it the α = 1 ground state at the origin equals the
//! leading coefficient of its hypergeometric closed form, and the α = 2
//! Gaussian maps to `√(2π)·e^{−x²/2}`.
//!
//! The integral is truncated at `k_cutoff` and computed with fixed
//! Gauss–Legendre panels on `[0, K]`, folding `±k` together. Terms like
//! `|k|^{α/2−j}` are singular at the origin, so the first panel `[0, h]` is
//! mapped by `k = h·u^p` with `p` the denominator of `α/2`, which turns every
//! power of `|k|` into an integer power of `u`.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{int, rat, to_f64, Rational};
use crate::spectral::{ground_state, KState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisLabel {
    K,
    X,
}

impl AxisLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisLabel::K => "k",
            AxisLabel::X => "x",
        }
    }
}

/// Sampled complex amplitudes on a strictly increasing axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    axis: AxisLabel,
    points: Vec<f64>,
    values: Vec<Complex64>,
}

impl Grid {
    pub fn new(axis: AxisLabel, points: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} points but {} values",
                points.len(),
                values.len()
            )));
        }
        if points.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidParameter("grid points must be strictly increasing".into()));
        }
        Ok(Grid { axis, points, values })
    }

    pub fn axis(&self) -> AxisLabel {
        self.axis
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.points.iter().copied().zip(self.values.iter().copied())
    }

    /// `axis,re,im` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},re,im\n", self.axis.as_str());
        for (p, v) in self.iter() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", p, v.re, v.im).expect("writing to a String");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::InvalidParameter("empty CSV".into()))?;
        let axis = match header.trim() {
            "k,re,im" => AxisLabel::K,
            "x,re,im" => AxisLabel::X,
            other => return Err(Error::InvalidParameter(format!("unexpected CSV header {other:?}"))),
        };
        let mut points = Vec::new();
        let mut values = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad CSV number {s:?}")))
            };
            if fields.len() != 3 {
                return Err(Error::InvalidParameter(format!("bad CSV row {line:?}")));
            }
            points.push(parse(fields[0])?);
            values.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        Grid::new(axis, points, values)
    }
}

/// Smallest α for which [`QuadratureConfig::default`] meets its tail bound.
pub fn min_supported_alpha() -> Rational {
    rat(1, 2)
}

/// Fixed panel rule used on every panel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PanelRule {
    GaussLegendre(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub k_cutoff: f64,
    pub panel_count: usize,
    pub rule: PanelRule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { k_cutoff: 40.0, panel_count: 400, rule: PanelRule::GaussLegendre(20) }
    }
}

impl QuadratureConfig {
    pub fn with_panels(panel_count: usize) -> Self {
        QuadratureConfig { panel_count, ..QuadratureConfig::default() }
    }

    /// `exp(−K^{α/2+1}/(α/2+1))` at the configured cutoff.
    pub fn tail_bound(&self, alpha: &Rational) -> f64 {
        let b = to_f64(alpha) / 2.0 + 1.0;
        (-self.k_cutoff.powf(b) / b).exp()
    }

    pub fn validate(&self, alpha: &Rational) -> Result<()> {
        let PanelRule::GaussLegendre(order) = self.rule;
        if self.k_cutoff.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || self.panel_count == 0 || order == 0 {
            return Err(Error::InvalidParameter("quadrature needs K > 0, panels > 0, order > 0".into()));
        }
        let tail = self.tail_bound(alpha);
        if tail >= 1e-16 {
            return Err(Error::Quadrature(format!(
                "tail bound {tail:e} at K = {} is not below 1e-16 for alpha = {alpha}",
                self.k_cutoff
            )));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Weighted nodes on `(0, K]` for the half-line integral.
#[derive(Clone, Debug)]
struct HalfLineRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl HalfLineRule {
    fn new(cfg: &QuadratureConfig, alpha: &Rational) -> Self {
        let PanelRule::GaussLegendre(order) = cfg.rule;
        let h = cfg.k_cutoff / cfg.panel_count as f64;
        let half = alpha * rat(1, 2);
        let p = half.denom().to_u32().unwrap_or(1).max(1) as i32;
        let first_order = (4 * p as usize).clamp(order, 128);
        let (u_nodes, u_weights) = gauss_legendre(first_order);
        let (g_nodes, g_weights) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(first_order + cfg.panel_count * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        // [0, h] with k = h·u^p, u ∈ (0, 1]
        for (t, w) in u_nodes.iter().zip(&u_weights) {
            let u = 0.5 * (t + 1.0);
            nodes.push(h * u.powi(p));
            weights.push(0.5 * w * p as f64 * h * u.powi(p - 1));
        }
        for panel in 1..cfg.panel_count {
            let a = panel as f64 * h;
            for (t, w) in g_nodes.iter().zip(&g_weights) {
                nodes.push(a + 0.5 * h * (t + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        HalfLineRule { nodes, weights }
    }
}

/// Rejects states whose transform diverges at `k = 0`: even states need
/// every exponent `q > −1`, odd ones `q > −2` (the `sin(kx)` factor adds one).
fn check_integrable(state: &KState) -> Result<()> {
    let limit = if state.is_real() { int(-1) } else { int(-2) };
    for (_, _, q) in state.hermite().expr().specialize(state.alpha()).iter() {
        if *q <= limit {
            return Err(Error::NonIntegrable { exponent: q.to_string() });
        }
    }
    Ok(())
}

/// Largest `|Im ψ|` accepted before the parity folding is declared broken.
pub const PARITY_RESIDUE_LIMIT: f64 = 1e-12;

/// `ψ(x) = ∫ φ(k) e^{ikx} dk` on the given points.
///
/// The imaginary residue of the folded `±k` sum is returned in the grid's
/// imaginary column and must stay below [`PARITY_RESIDUE_LIMIT`].
pub fn inverse_fourier(state: &KState, xs: &[f64], cfg: &QuadratureConfig) -> Result<Grid> {
    cfg.validate(state.alpha())?;
    check_integrable(state)?;
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("x values must be finite".into()));
    }
    let rule = HalfLineRule::new(cfg, state.alpha());
    let samples: Vec<(f64, Complex64, Complex64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&k, &w)| Ok((k, state.eval(k)? * w, state.eval(-k)? * w)))
        .collect::<Result<_>>()?;
    let values: Vec<Complex64> = xs
        .par_iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(k, plus, minus) in &samples {
                let (s, c) = (k * x).sin_cos();
                acc += plus * Complex64::new(c, s) + minus * Complex64::new(c, -s);
            }
            acc
        })
        .collect();
    if let Some(bad) = values.iter().find(|v| v.im.abs() >= PARITY_RESIDUE_LIMIT) {
        return Err(Error::Quadrature(format!("imaginary residue {:e} exceeds limit", bad.im)));
    }
    Grid::new(AxisLabel::X, xs.to_vec(), values)
}

/// `ψ₀^{(α)}` on the given points.
pub fn ground_state_x(alpha: &Rational, xs: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    let grid = inverse_fourier(&ground_state(alpha)?, xs, cfg)?;
    Ok(grid.values().iter().map(|v| v.re).collect())
}

/// `η̃_α(k) = 1 − exp(|k|²/2 − |k|^{α/2+1}/(α/2+1))`.
pub fn nongaussianity_k(alpha: &Rational, ks: &[f64]) -> Result<Grid> {
    if !alpha.is_positive() {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let b = to_f64(alpha) / 2.0 + 1.0;
    let values = ks
        .iter()
        .map(|&k| {
            let gauss = k.abs().powf(2.0) / 2.0;
            let fractional = k.abs().powf(b) / b;
            Complex64::new(1.0 - (gauss - fractional).exp(), 0.0)
        })
        .collect();
    Grid::new(AxisLabel::K, ks.to_vec(), values)
}

/// `ψ₀^{(2)}` magnitudes below this are treated as numerically unusable for
/// the x-space ratio.
pub const GAUSSIAN_FLOOR: f64 = 1e-8;

/// `η_α(x) = 1 − ψ₀^{(α)}(x)/ψ₀^{(2)}(x)` restricted to stable points.
#[derive(Clone, Debug)]
pub struct NonGaussianityX {
    pub grid: Grid,
    /// Points dropped because `|ψ₀^{(2)}|` fell below [`GAUSSIAN_FLOOR`].
    pub unstable: Vec<f64>,
}

pub fn nongaussianity_x(alpha: &Rational, xs: &[f64], cfg: &QuadratureConfig) -> Result<NonGaussianityX> {
    let fractional = ground_state_x(alpha, xs, cfg)?;
    let gaussian = ground_state_x(&int(2), xs, cfg)?;
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut unstable = Vec::new();
    for ((&x, f), g) in xs.iter().zip(fractional).zip(gaussian) {
        if g.abs() > GAUSSIAN_FLOOR {
            points.push(x);
            values.push(Complex64::new(1.0 - f / g, 0.0));
        } else {
            unstable.push(x);
        }
    }
    Ok(NonGaussianityX { grid: Grid::new(AxisLabel::X, points, values)?, unstable })
}

/// `count` evenly spaced points on `[min, max]`, endpoints included.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| (min * (last - i as f64) + max * i as f64) / last)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::excited_state;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((integral - 2.0 / 19.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn default_config_meets_tail_bound() {
        let cfg = QuadratureConfig::default();
        assert!(cfg.validate(&min_supported_alpha()).is_ok());
        let short = QuadratureConfig { k_cutoff: 10.0, ..cfg };
        assert!(short.validate(&min_supported_alpha()).is_err());
    }

    #[test]
    fn gaussian_self_transform() {
        let cfg = QuadratureConfig::default();
        let xs = linspace(-5.0, 5.0, 21);
        let psi = ground_state_x(&int(2), &xs, &cfg).unwrap();
        for (x, v) in xs.iter().zip(psi) {
            let exact = (2.0 * std::f64::consts::PI).sqrt() * (-x * x / 2.0).exp();
            assert!((v - exact).abs() < 1e-12, "x={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn alpha_one_origin_value() {
        // 2∫₀^∞ e^{−(2/3)k^{3/2}} dk = 2^{4/3}·3^{−1/3}·Γ(2/3)
        let gamma_two_thirds = 1.354_117_939_426_400_4_f64;
        let exact = 2f64.powf(4.0 / 3.0) * 3f64.powf(-1.0 / 3.0) * gamma_two_thirds;
        let v = ground_state_x(&int(1), &[0.0], &QuadratureConfig::default()).unwrap()[0];
        assert!((v - exact).abs() / exact < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn odd_states_transform_to_real_values() {
        let cfg = QuadratureConfig::default();
        for alpha in [int(1), rat(3, 2), int(2)] {
            let state = excited_state(3, &alpha).unwrap();
            let grid = inverse_fourier(&state, &[0.5, 1.5], &cfg).unwrap();
            for v in grid.values() {
                assert!(v.im.abs() < PARITY_RESIDUE_LIMIT);
                assert!(v.re.abs() > 1e-6);
            }
        }
    }

    #[test]
    fn divergent_states_are_rejected() {
        let state = excited_state(4, &int(1)).unwrap();
        let err = inverse_fourier(&state, &[0.0], &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonIntegrable { .. }));
    }

    #[test]
    fn alpha_two_excited_state_matches_hermite_function() {
        // ∫ iⁿ Hₙ(k) e^{−k²/2} e^{ikx} dk = √(2π) Hₙ(x) e^{−x²/2}·(−1)ⁿ... check n = 1:
        // ∫ 2ik e^{−k²/2} e^{ikx} dk = −2x√(2π) e^{−x²/2}
        let state = excited_state(1, &int(2)).unwrap();
        let xs = [0.0, 0.7, 2.0];
        let grid = inverse_fourier(&state, &xs, &QuadratureConfig::default()).unwrap();
        for (x, v) in grid.iter() {
            let exact = -2.0 * x * (2.0 * std::f64::consts::PI).sqrt() * (-x * x / 2.0).exp();
            assert!((v.re - exact).abs() < 1e-12, "x={x}: {} vs {exact}", v.re);
        }
    }

    #[test]
    fn nongaussianity_examples() {
        let zero = nongaussianity_k(&int(2), &[-3.0, 0.0, 0.4, 2.2]).unwrap();
        assert!(zero.values().iter().all(|v| v.re == 0.0));
        let one = nongaussianity_k(&int(1), &[0.0, 1.0]).unwrap();
        assert_eq!(one.values()[0].re, 0.0);
        assert!((one.values()[1].re - (1.0 - (-1.0f64 / 6.0).exp())).abs() < 1e-15);
    }

    #[test]
    fn x_nongaussianity_flags_tails() {
        let cfg = QuadratureConfig::default();
        let out = nongaussianity_x(&int(1), &[0.0, 1.0, 8.0], &cfg).unwrap();
        assert_eq!(out.unstable, vec![8.0]);
        assert_eq!(out.grid.points(), &[0.0, 1.0]);
        let exact = nongaussianity_x(&int(2), &[0.0, 1.0, 3.0], &cfg).unwrap();
        assert!(exact.grid.values().iter().all(|v| v.re == 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let grid = Grid::new(
            AxisLabel::X,
            vec![-1.0, 0.1, 2.5],
            vec![Complex64::new(1.0 / 3.0, 0.0), Complex64::new(-2.0e-17, 7.0), Complex64::new(1e300, -0.0)],
        )
        .unwrap();
        let text = grid.to_csv();
        assert!(text.starts_with("x,re,im\n"));
        assert_eq!(Grid::from_csv(&text).unwrap(), grid);
    }

    #[test]
    fn grid_invariants() {
        assert!(Grid::new(AxisLabel::K, vec![0.0, 0.0], vec![Complex64::default(); 2]).is_err());
        assert!(Grid::new(AxisLabel::K, vec![0.0], vec![]).is_err());
    }

    #[test]
    fn linspace_hits_zero_exactly() {
        let pts = linspace(-5.0, 5.0, 501);
        assert_eq!(pts[250], 0.0);
        assert_eq!(pts[0], -5.0);
        assert_eq!(pts[500], 5.0);
    }
}
