//! End-to-end verification report.
//!
//! Every check returns a [`CheckResult`]; [`Validator::run`] collects them
//! into a [`Report`] that serializes to JSON. Known discrepancies between the
//! computed objects and their commonly printed forms are reported with
//! [`Status::Informational`] and never count as failures.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::hermite::{
    as_k_polynomial, rodrigues, standard_reduction, tabulated_form, RFHermite,
};
use crate::operator::{
    annihilation, compose_factorization, creation, hamiltonian, remainder_closed_form,
    reverted_factorization, scaled_factorization, OpExpr, OpWord,
};
use crate::rational::{int, rat, to_f64, Rational};
use crate::special::{
    closed_form_psi0, compare_closed_forms, derived_closed_form_psi0, eval_closed_form,
    gaussian_hypergeometric,
};
use crate::spectral::{excited_state, ground_state, kernel_residual, local_eigenvalue};
use crate::term_algebra::{AlphaPoly, FracExponent, KExpr, KTerm};
use crate::transform::{
    ground_state_x, inverse_fourier, linspace, nongaussianity_k, nongaussianity_x,
    QuadratureConfig, PARITY_RESIDUE_LIMIT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub status: Status,
    pub detail: String,
    /// Itemized sub-results, e.g. individual coefficient mismatches.
    pub items: Vec<String>,
}

impl CheckResult {
    fn new(id: &str, pass: bool, detail: String) -> Self {
        CheckResult {
            id: id.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail,
            items: Vec::new(),
        }
    }

    fn info(id: &str, detail: String) -> Self {
        CheckResult { id: id.to_string(), status: Status::Informational, detail, items: Vec::new() }
    }

    fn error(id: &str, err: crate::Error) -> Self {
        CheckResult::new(id, false, format!("error: {err}"))
    }

    fn with_items(mut self, items: Vec<String>) -> Self {
        self.items = items;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Ids of the criteria that must pass, in report order.
pub const CRITERIA: [&str; 12] = [
    "ladder_rodrigues",
    "classical_reduction",
    "printed_family",
    "eigenvalues",
    "kernel",
    "factorization",
    "gaussian_identity",
    "transform_calibration",
    "closed_form_alpha_1",
    "closed_form_alpha_3_2",
    "parity_reality",
    "nongaussianity",
];

/// Highest `n` in the symbolic family checks.
pub const MAX_FAMILY_N: u32 = 12;

pub type LadderStep = fn(&RFHermite) -> RFHermite;

/// Runs the checks. The ladder step is injectable so that a broken
/// recurrence can be shown to be caught.
#[derive(Clone, Debug)]
pub struct Validator {
    pub ladder_next: LadderStep,
    pub quadrature: QuadratureConfig,
}

impl Default for Validator {
    fn default() -> Self {
        Validator { ladder_next: crate::hermite::ladder_next, quadrature: QuadratureConfig::default() }
    }
}

/// Physicists' Hermite coefficients (lowest degree first) from
/// `H_{n+1} = 2k H_n − 2n H_{n−1}`.
pub fn classical_hermite(n: u32) -> Vec<Rational> {
    let mut prev: Vec<Rational> = vec![];
    let mut cur = vec![int(1)];
    for i in 0..n {
        let mut next = vec![Rational::zero(); cur.len() + 1];
        for (d, c) in cur.iter().enumerate() {
            next[d + 1] += c * int(2);
        }
        for (d, c) in prev.iter().enumerate() {
            next[d] -= c * int(2 * i as i64);
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn alphas() -> [Rational; 3] {
    [int(1), rat(3, 2), int(2)]
}

/// `c·|k|^{jα/2+m}`.
fn mono(c: AlphaPoly, j: u32, m: i64) -> KExpr {
    KExpr::monomial(c, 0, FracExponent::new(j, m))
}

/// Printed `λ0`, `λ1`, `λ2` as `(numerator, denominator)`.
pub fn printed_eigenvalues() -> [(KExpr, KExpr); 3] {
    let c = |n: i64, d: i64| AlphaPoly::constant(rat(n, d));
    let half_alpha_minus = |shift: i64| AlphaPoly::linear(int(-shift), rat(1, 2));
    let one = KExpr::one();
    let l0 = mono(c(1, 2), 1, -1);
    let l1 = &mono(c(3, 2), 1, -1) - &mono(half_alpha_minus(1).scale(&rat(1, 2)), 0, -2);
    let l2_num = &(&mono(AlphaPoly::linear(int(-6), rat(11, 2)), 1, -1) - &mono(c(10, 1), 2, 0))
        - &mono(half_alpha_minus(1) * half_alpha_minus(2), 0, -2);
    let l2_den = &KExpr::constant(AlphaPoly::alpha()) - &mono(c(4, 1), 1, 1);
    [(l0, one.clone()), (l1, one), (l2_num, l2_den)]
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

impl Validator {
    pub fn with_ladder(ladder_next: LadderStep) -> Self {
        Validator { ladder_next, ..Validator::default() }
    }

    fn chain(&self, n: u32) -> Vec<RFHermite> {
        let mut out = vec![RFHermite::ground()];
        for _ in 0..n {
            let next = (self.ladder_next)(out.last().expect("non-empty"));
            out.push(next);
        }
        out
    }

    pub fn ladder_rodrigues(&self) -> CheckResult {
        let bad: Vec<String> = self
            .chain(MAX_FAMILY_N)
            .iter()
            .enumerate()
            .filter(|(n, h)| h.expr() != rodrigues(*n as u32).expr())
            .map(|(n, _)| format!("n = {n}: ladder and Rodrigues differ"))
            .collect();
        CheckResult::new(
            "ladder_rodrigues",
            bad.is_empty(),
            format!("exact equality for n = 0..{MAX_FAMILY_N}, {} mismatches", bad.len()),
        )
        .with_items(bad)
    }

    pub fn classical_reduction(&self) -> CheckResult {
        let bad: Vec<String> = self
            .chain(MAX_FAMILY_N)
            .iter()
            .enumerate()
            .filter(|(n, h)| {
                as_k_polynomial(&standard_reduction(h)).map(trim) != Some(classical_hermite(*n as u32))
            })
            .map(|(n, _)| format!("n = {n}: α = 2 reduction is not H_{n}"))
            .collect();
        CheckResult::new(
            "classical_reduction",
            bad.is_empty(),
            format!("α = 2 reduction vs three-term recurrence, n = 0..{MAX_FAMILY_N}"),
        )
        .with_items(bad)
    }

    /// The criterion itself and the informational `H̃_4` item.
    pub fn printed_family(&self) -> (CheckResult, CheckResult) {
        let chain = self.chain(4);
        let mut items = Vec::new();
        for n in 1..=3u32 {
            if chain[n as usize].expr() != &tabulated_form(n).expect("tabulated") {
                items.push(format!("H̃_{n} differs from the tabulated form"));
            }
        }
        let key = FracExponent::new(2, -2);
        let computed = chain[4].expr().coefficient(key, 0);
        let printed = tabulated_form(4).expect("tabulated").coefficient(key, 0);
        let strip = |e: &KExpr| {
            KExpr::from_terms(e.terms().iter().filter(|t| t.exponent != key).cloned().collect::<Vec<KTerm>>())
        };
        if strip(chain[4].expr()) != strip(&tabulated_form(4).expect("tabulated")) {
            items.push("H̃_4 differs outside the |k|^(α-2) coefficient".into());
        }
        let agree_at_2 = computed.eval(&int(2)) == printed.eval(&int(2));
        if !agree_at_2 {
            items.push("H̃_4 |k|^(α-2) coefficients disagree at α = 2".into());
        }
        let main = CheckResult::new(
            "printed_family",
            items.is_empty(),
            "H̃_1..H̃_3 exact; H̃_4 equal except the |k|^(α-2) coefficient, which agrees at α = 2".into(),
        )
        .with_items(items);
        let info = CheckResult::info(
            "h4_coefficient",
            format!(
                "|k|^(α-2) coefficient of H̃_4: tabulated {printed}, recurrence {computed}, difference {}",
                &computed - &printed
            ),
        );
        (main, info)
    }

    pub fn eigenvalues(&self) -> CheckResult {
        let mut items = Vec::new();
        let theta0 = int(0);
        for (n, (num, den)) in printed_eigenvalues().iter().enumerate() {
            let lambda = match local_eigenvalue(n as u32, &int(2), &theta0) {
                Ok(l) => l,
                Err(e) => return CheckResult::error("eigenvalues", e),
            };
            let (re, im) = lambda.numerator_parts().expect("integer theta");
            if &re * den != num * lambda.denominator() {
                items.push(format!("λ_{n}: cross-multiplied identity fails"));
            }
            if !im.is_empty() {
                items.push(format!("λ_{n}: nonzero imaginary part at θ = 0"));
            }
        }
        for n in 0..=5u32 {
            let lambda = local_eigenvalue(n, &int(2), &theta0).expect("alpha > 0");
            let (re, im) = lambda.numerator_parts().expect("integer theta");
            let level = Rational::from_integer(n.into()) + rat(1, 2);
            let lhs = re.specialize(&int(2));
            let rhs = lambda.denominator().specialize(&int(2)).scale(&level);
            if lhs != rhs || !im.specialize(&int(2)).is_empty() {
                items.push(format!("α = 2: λ_{n} is not {level}"));
            }
        }
        CheckResult::new(
            "eigenvalues",
            items.is_empty(),
            "λ0, λ1, λ2 exact at θ = 0; λ_n = n + 1/2 at α = 2 for n ≤ 5".into(),
        )
        .with_items(items)
    }

    /// Compares the exact θ = 1 shift of `λ_n` with the commonly printed
    /// extra term. Always informational.
    pub fn theta_one_term(&self) -> CheckResult {
        let alpha = rat(3, 2);
        let af = to_f64(&alpha);
        let k = 1.3f64;
        let mut items = Vec::new();
        for n in 0..=3u32 {
            let shift = (|| -> Result<Complex64> {
                let one = local_eigenvalue(n, &alpha, &int(1))?.eval(k)?;
                let zero = local_eigenvalue(n, &alpha, &int(0))?.eval(k)?;
                Ok(one - zero)
            })();
            let Ok(shift) = shift else { continue };
            let power = if n % 2 == 0 { (n + 2) as f64 } else { (n + 1) as f64 };
            let printed = (Complex64::i() * k.powf(af) - 1.0) * k.powf(power * af / 2.0);
            items.push(format!(
                "n = {n}, α = 3/2, k = {k}: computed {:.6}{:+.6}i, printed form {:.6}{:+.6}i",
                shift.re, shift.im, printed.re, printed.im
            ));
        }
        CheckResult::info(
            "theta_one_term",
            "θ = 1 adds (i·sgn(k) - 1)|k|^α/α to every λ_n; the printed extra term scales differently".into(),
        )
        .with_items(items)
    }

    pub fn kernel(&self) -> CheckResult {
        let ks = [-2.5, -1.0, -0.3, 0.3, 1.0, 2.5];
        let mut worst = 0.0f64;
        for alpha in alphas() {
            for k in ks {
                match kernel_residual(&alpha, k) {
                    Ok(r) => worst = worst.max(r.norm()),
                    Err(e) => return CheckResult::error("kernel", e),
                }
            }
        }
        CheckResult::new("kernel", worst < 1e-12, format!("max residual {worst:.3e} (limit 1e-12)"))
    }

    pub fn factorization(&self) -> CheckResult {
        let mut items = Vec::new();
        for alpha in alphas() {
            let (product, ham, eps) = scaled_factorization(&alpha).expect("positive");
            let expected = OpExpr::word(OpWord::new(rat(1, 2), 0, &alpha * rat(1, 2) - int(1)));
            if &product + &expected != ham {
                items.push(format!("α = {alpha}: B_αA_α + ε_α ≠ H_α"));
            }
            if eps != expected {
                items.push(format!("α = {alpha}: ε_α = {eps}"));
            }
            let inv = Rational::one() / &alpha;
            if remainder_closed_form(&alpha, &alpha).scale(&inv) != expected {
                items.push(format!("α = {alpha}: δ = γ reduction fails"));
            }
        }
        for (delta, gamma) in [(int(1), int(2)), (rat(3, 2), int(1)), (int(2), int(2))] {
            let f = compose_factorization(&delta, &gamma).expect("positive");
            let leibniz = &OpExpr::from_words(creation(&gamma)) * &OpExpr::from_words(annihilation(&delta));
            if leibniz != f.product {
                items.push(format!("(δ, γ) = ({delta}, {gamma}): rewriting and Leibniz products differ"));
            }
            if &f.product + &remainder_closed_form(&delta, &gamma) != f.hamiltonian {
                items.push(format!("(δ, γ) = ({delta}, {gamma}): ε_γδ closed form fails"));
            }
            let rev = reverted_factorization(&delta, &gamma).expect("positive");
            let rev_product = &OpExpr::from_words(annihilation(&delta)) * &OpExpr::from_words(creation(&gamma));
            let ham = hamiltonian(&((&delta + &gamma) * rat(1, 2)));
            if &rev_product - &remainder_closed_form(&gamma, &delta) != ham || rev != remainder_closed_form(&gamma, &delta) {
                items.push(format!("(δ, γ) = ({delta}, {gamma}): ε_δγ closed form fails"));
            }
        }
        CheckResult::new(
            "factorization",
            items.is_empty(),
            "one-index factorization for α ∈ {1, 3/2, 2}; two-index remainders at (1,2), (3/2,1), (2,2)".into(),
        )
        .with_items(items)
    }

    pub fn gaussian_identity(&self) -> CheckResult {
        let mut worst = 0.0f64;
        for x in linspace(0.0, 4.0, 100) {
            match gaussian_hypergeometric(x) {
                Ok(v) => worst = worst.max((v - (-x * x / 2.0).exp()).abs()),
                Err(e) => return CheckResult::error("gaussian_identity", e),
            }
        }
        CheckResult::new(
            "gaussian_identity",
            worst < 1e-12,
            format!("max error {worst:.3e} on 100 points of [0, 4] (limit 1e-12)"),
        )
    }

    pub fn transform_calibration(&self) -> CheckResult {
        let run = || -> Result<(f64, f64)> {
            let quad = ground_state_x(&int(1), &[0.0], &self.quadrature)?[0];
            Ok((quad, closed_form_psi0(&int(1))?.value_at_origin()))
        };
        match run() {
            Ok((quad, a0)) => {
                let rel = ((quad - a0) / a0).abs();
                CheckResult::new(
                    "transform_calibration",
                    rel < 1e-10,
                    format!("ψ0(0) = {quad:.15}, a_0 = {a0:.15}, relative error {rel:.3e} (limit 1e-10)"),
                )
            }
            Err(e) => CheckResult::error("transform_calibration", e),
        }
    }

    pub fn closed_form_alpha_1(&self) -> CheckResult {
        let run = || -> Result<f64> {
            let xs = linspace(0.0, 3.0, 61);
            let quad = ground_state_x(&int(1), &xs, &self.quadrature)?;
            let c = closed_form_psi0(&int(1))?;
            let peak = quad[0].abs();
            let errs = xs
                .iter()
                .zip(&quad)
                .map(|(&x, q)| Ok((eval_closed_form(&c, x)? - q).abs() / peak))
                .collect::<Result<Vec<f64>>>()?;
            Ok(max_abs(errs))
        };
        match run() {
            Ok(err) => CheckResult::new(
                "closed_form_alpha_1",
                err < 1e-6,
                format!("max relative-to-peak error {err:.3e} on 61 points of [0, 3] (limit 1e-6)"),
            ),
            Err(e) => CheckResult::error("closed_form_alpha_1", e),
        }
    }

    pub fn closed_form_alpha_3_2(&self) -> CheckResult {
        let alpha = rat(3, 2);
        let run = || -> Result<CheckResult> {
            let xs = linspace(0.0, 3.0, 61);
            let quad = ground_state_x(&alpha, &xs, &self.quadrature)?;
            let doubled = QuadratureConfig { panel_count: 2 * self.quadrature.panel_count, ..self.quadrature.clone() };
            let refined = ground_state_x(&alpha, &xs, &doubled)?;
            let drift = max_abs(quad.iter().zip(&refined).map(|(a, b)| (a - b).abs()));
            let peak = quad[0].abs();
            let error_against = |c: &crate::special::ClosedFormPsi0| -> Result<f64> {
                let errs = xs
                    .iter()
                    .zip(&quad)
                    .map(|(&x, q)| Ok((eval_closed_form(c, x)? - q).abs() / peak))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(max_abs(errs))
            };
            let printed_err = error_against(&closed_form_psi0(&alpha)?)?;
            let derived_err = error_against(&derived_closed_form_psi0(&alpha)?)?;
            let mut items: Vec<String> = compare_closed_forms(&alpha)?
                .iter()
                .filter(|r| !r.matches())
                .map(|r| {
                    format!(
                        "a_{}: printed {:.9e}, derived {:.9e}, ratio {:.6}, parameters {}",
                        r.power,
                        r.printed_a,
                        r.derived_a,
                        r.ratio(),
                        if r.params_match { "match" } else { "differ" }
                    )
                })
                .collect();
            items.push(format!(
                "printed table vs quadrature: {printed_err:.3e} ({} the 1e-5 limit)",
                if printed_err < 1e-5 { "within" } else { "outside" }
            ));
            items.push(format!("derived table vs quadrature: {derived_err:.3e}"));
            let pass = drift < 1e-10 && derived_err < 1e-5;
            Ok(CheckResult::new(
                "closed_form_alpha_3_2",
                pass,
                format!(
                    "quadrature self-convergence {drift:.3e} (limit 1e-10); derived closed form within {derived_err:.3e} (limit 1e-5)"
                ),
            )
            .with_items(items))
        };
        run().unwrap_or_else(|e| CheckResult::error("closed_form_alpha_3_2", e))
    }

    pub fn parity_reality(&self) -> CheckResult {
        let ks = [-2.0, -0.7, 0.4, 1.5];
        let xs = linspace(-5.0, 5.0, 101);
        let mut items = Vec::new();
        let mut worst = 0.0f64;
        for alpha in alphas() {
            for n in 0..=3u32 {
                let state = match excited_state(n, &alpha) {
                    Ok(s) => s,
                    Err(e) => return CheckResult::error("parity_reality", e),
                };
                if state.is_real() != (n % 2 == 0) {
                    items.push(format!("α = {alpha}, n = {n}: wrong phase"));
                }
                for k in ks {
                    let v = state.eval(k).expect("k ≠ 0");
                    let stray = if n % 2 == 0 { v.im } else { v.re };
                    if stray != 0.0 {
                        items.push(format!("α = {alpha}, n = {n}, k = {k}: stray component {stray:e}"));
                    }
                }
                match inverse_fourier(&state, &xs, &self.quadrature) {
                    Ok(grid) => worst = worst.max(max_abs(grid.values().iter().map(|v| v.im.abs()))),
                    Err(e) => items.push(format!("α = {alpha}, n = {n}: {e}")),
                }
            }
        }
        if worst >= PARITY_RESIDUE_LIMIT {
            items.push(format!("imaginary residue {worst:.3e}"));
        }
        CheckResult::new(
            "parity_reality",
            items.is_empty(),
            format!("exact k-space parity; max x-space imaginary residue {worst:.3e} (limit 1e-12)"),
        )
        .with_items(items)
    }

    pub fn nongaussianity(&self) -> CheckResult {
        let run = || -> Result<Vec<String>> {
            let mut items = Vec::new();
            let ks = linspace(-4.0, 4.0, 161);
            if nongaussianity_k(&int(2), &ks)?.values().iter().any(|v| !v.is_zero()) {
                items.push("η̃_2 is not identically zero".into());
            }
            let xs = linspace(-3.0, 3.0, 61);
            if nongaussianity_x(&int(2), &xs, &self.quadrature)?.grid.values().iter().any(|v| !v.is_zero()) {
                items.push("η_2 is not identically zero".into());
            }
            // |k|^b/b = k²/2 at k = (2/b)^{1/(2−b)}
            let b = 1.5f64;
            let crossing = (2.0 / b).powf(1.0 / (2.0 - b));
            let inside: Vec<f64> = linspace(-crossing, crossing, 401)
                .into_iter()
                .filter(|k| *k != 0.0 && k.abs() < crossing)
                .collect();
            let eta1 = nongaussianity_k(&int(1), &inside)?;
            if let Some((k, _)) = eta1.iter().find(|(_, v)| v.re <= 0.0) {
                items.push(format!("η̃_1({k}) ≤ 0 inside the crossing at {crossing}"));
            }
            let unit: Vec<f64> = linspace(0.0, 1.0, 101).into_iter().skip(1).collect();
            let e1 = nongaussianity_k(&int(1), &unit)?;
            let e32 = nongaussianity_k(&rat(3, 2), &unit)?;
            let e2 = nongaussianity_k(&int(2), &unit)?;
            for (i, &k) in unit.iter().enumerate() {
                let (a, b, c) = (e1.values()[i].re, e32.values()[i].re, e2.values()[i].re);
                if !(a > b && b > c) {
                    items.push(format!("ordering fails at k = {k}: {a:e}, {b:e}, {c:e}"));
                }
            }
            Ok(items)
        };
        match run() {
            Ok(items) => CheckResult::new(
                "nongaussianity",
                items.is_empty(),
                "η̃_2 = η_2 = 0 exactly; η̃_1 > 0 below its crossing at k = 16/9; α = 1 > 3/2 > 2 on (0, 1]".into(),
            )
            .with_items(items),
            Err(e) => CheckResult::error("nongaussianity", e),
        }
    }

    /// Scaling convention of the k-space remainder at the Gaussian point.
    pub fn remainder_scaling(&self) -> CheckResult {
        let detail = (|| -> Result<String> {
            let op = crate::operator::fourier_remainder(&int(2), &int(2), &int(0))?;
            let phi0 = ground_state(&int(2))?;
            let raw = op.apply(&phi0, 1.0)?.re;
            let scaled = op.scale(&rat(1, 2)).apply(&phi0, 1.0)?.re;
            Ok(format!(
                "γ = δ = 2, θ = 0, k = 1: unscaled {raw:.12}, with the 1/α factor {scaled:.12} (e^(-1/2)/2 = {:.12})",
                0.5 * (-0.5f64).exp()
            ))
        })()
        .unwrap_or_else(|e| format!("error: {e}"));
        CheckResult::info("remainder_scaling", detail)
    }

    pub fn run(&self) -> Report {
        let (family, h4) = self.printed_family();
        let results = vec![
            self.ladder_rodrigues(),
            self.classical_reduction(),
            family,
            self.eigenvalues(),
            self.kernel(),
            self.factorization(),
            self.gaussian_identity(),
            self.transform_calibration(),
            self.closed_form_alpha_1(),
            self.closed_form_alpha_3_2(),
            self.parity_reality(),
            self.nongaussianity(),
            h4,
            self.theta_one_term(),
            self.remainder_scaling(),
        ];
        Report { results }
    }
}

/// Runs every check with the default configuration.
pub fn run_all() -> Report {
    Validator::default().run()
}
