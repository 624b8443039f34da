//! Decision procedures for detailed balance II and Θ-sqdb, plus the
//! classical Markov-chain baseline.
//!
//! Every checker returns a [`CheckResult`] carrying named sub-residuals; the
//! check passes when every sub-residual is within its threshold. Inputs that
//! are not dynamics (completely positive and unital) are rejected with
//! [`Error::InputNotDynamics`] before any balance test runs.

use serde::{Deserialize, Serialize};

use crate::duals::{hat_map, kms_dual, modular_commutator, rho_dual, theta_conjugate, ReversingOperation};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance};
use crate::states::{expectation, omega, DensityMatrix};
use crate::superop::{is_completely_positive, is_positive, is_unital, SuperOperator};
use crate::thermofield::{check_db2_tfd_unchecked, check_sqdb_tfd_unchecked};

/// One named residual compared against its own threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubResidual {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl SubResidual {
    pub fn new(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        SubResidual {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

/// A reported quantity that does not take part in the pass/fail decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: f64,
}

impl Diagnostic {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Diagnostic {
            name: name.into(),
            value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest sub-residual value.
    pub residual: f64,
    pub detail: Vec<SubResidual>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
    pub tol: Tolerance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn from_parts(name: impl Into<String>, tol: &Tolerance, detail: Vec<SubResidual>) -> Self {
        let passed = detail.iter().all(|s| s.passed);
        let residual = detail.iter().map(|s| s.value).fold(0.0, f64_max);
        CheckResult {
            name: name.into(),
            passed,
            residual,
            detail,
            diagnostics: Vec::new(),
            tol: *tol,
            note: None,
        }
    }

    pub fn with_diagnostics(mut self, diagnostics: Vec<Diagnostic>) -> Self {
        self.diagnostics.extend(diagnostics);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn sub(&self, name: &str) -> Option<&SubResidual> {
        self.detail.iter().find(|s| s.name == name)
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|d| d.name == name).map(|d| d.value)
    }
}

/// NaN-propagating maximum, so a NaN residual can never pass.
fn f64_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Which positivity notion "dynamics" and the dual test use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityMode {
    #[default]
    Complete,
    /// Sampled positivity on rank-one projectors instead of Choi's criterion.
    Plain,
}

impl PositivityMode {
    fn check(self, s: &SuperOperator, tol: &Tolerance) -> CheckResult {
        match self {
            PositivityMode::Complete => is_completely_positive(s, tol),
            PositivityMode::Plain => is_positive(s, tol),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub positivity: PositivityMode,
    pub tfd: bool,
}

/// Rejects maps that are not (completely) positive and unital.
pub fn verify_dynamics(tau: &SuperOperator, tol: &Tolerance, mode: PositivityMode) -> Result<()> {
    let pos = mode.check(tau, tol);
    if !pos.passed {
        return Err(Error::InputNotDynamics(format!(
            "{} check failed (residual {:e})",
            pos.name, pos.residual
        )));
    }
    let unital = is_unital(tau, tol);
    if !unital.passed {
        return Err(Error::InputNotDynamics(format!(
            "map is not unital (residual {:e})",
            unital.residual
        )));
    }
    Ok(())
}

fn check_inputs(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance, mode: PositivityMode) -> Result<()> {
    if tau.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: tau.dim(),
        });
    }
    verify_dynamics(tau, tol, mode)
}

fn check_theta(th: &ReversingOperation, rho: &DensityMatrix) -> Result<()> {
    if th.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: th.dim(),
        });
    }
    Ok(())
}

/// `τ′` is dynamics: positive in the selected sense and unital.
pub fn check_db2_definition(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<CheckResult> {
    check_db2_definition_with(tau, rho, tol, PositivityMode::Complete)
}

pub fn check_db2_definition_with(
    tau: &SuperOperator,
    rho: &DensityMatrix,
    tol: &Tolerance,
    mode: PositivityMode,
) -> Result<CheckResult> {
    check_inputs(tau, rho, tol, mode)?;
    db2_definition(tau, rho, tol, mode)
}

fn db2_definition(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance, mode: PositivityMode) -> Result<CheckResult> {
    let dual = rho_dual(tau, rho)?;
    let pos = mode.check(&dual, tol);
    let unital = is_unital(&dual, tol);
    let mut detail: Vec<SubResidual> = pos
        .detail
        .into_iter()
        .map(|s| SubResidual::new(format!("dual_{}", s.name), s.value, s.threshold))
        .collect();
    detail.push(SubResidual::new("dual_unital", unital.residual, tol.eq_tol));
    Ok(CheckResult::from_parts("db2_definition", tol, detail).with_diagnostics(pos.diagnostics))
}

/// `τΔ = Δτ` and `⟨τ(A)⟩ = ⟨A⟩`.
pub fn check_db2_modular(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<CheckResult> {
    check_inputs(tau, rho, tol, PositivityMode::Complete)?;
    db2_modular(tau, rho, tol)
}

fn db2_modular(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<CheckResult> {
    let n = rho.dim();
    let commutator = modular_commutator(tau, rho)?;
    let mut invariance: f64 = 0.0;
    for (_, _, e) in ComplexMatrix::units(n) {
        let lhs = expectation(rho, &tau.act(&e))?;
        let rhs = expectation(rho, &e)?;
        invariance = f64_max(invariance, (lhs - rhs).norm());
    }
    let mut result = CheckResult::from_parts(
        "db2_modular",
        tol,
        vec![
            SubResidual::new("commutator", commutator, tol.eq_tol),
            SubResidual::new("invariance", invariance, tol.eq_tol),
        ],
    );
    if n >= 2 {
        let delta = crate::duals::modular(rho).delta;
        let e01 = ComplexMatrix::unit(n, 0, 1);
        let lhs = tau.act(&delta.act(&e01));
        let rhs = delta.act(&tau.act(&e01));
        result = result.with_diagnostics(vec![Diagnostic::new("commutator_on_E01", lhs.hs_distance(&rhs))]);
    }
    Ok(result)
}

/// Largest `|ω[A⊗β(B)] − ω[α(A)⊗B]|` over all pairs of matrix units.
pub(crate) fn omega_pairing_residual(rho: &DensityMatrix, alpha: &SuperOperator, beta: &SuperOperator) -> Result<f64> {
    let n = rho.dim();
    let units = ComplexMatrix::units(n);
    let alpha_images: Vec<ComplexMatrix> = units.iter().map(|(i, j, _)| alpha.act_on_unit(*i, *j)).collect();
    let beta_images: Vec<ComplexMatrix> = units.iter().map(|(i, j, _)| beta.act_on_unit(*i, *j)).collect();
    let mut worst: f64 = 0.0;
    for (ia, (_, _, a)) in units.iter().enumerate() {
        for (ib, (_, _, b)) in units.iter().enumerate() {
            let lhs = omega(rho, a, &beta_images[ib])?;
            let rhs = omega(rho, &alpha_images[ia], b)?;
            worst = f64_max(worst, (lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// `ω[A⊗τ̂(B)] = ω[τ(A)⊗B]` for all `A, B`, and `τ̂(I) = I`.
pub fn check_db2_entangled(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<CheckResult> {
    check_inputs(tau, rho, tol, PositivityMode::Complete)?;
    db2_entangled(tau, rho, tol)
}

fn db2_entangled(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<CheckResult> {
    let hat = hat_map(tau, rho)?;
    let pairing = omega_pairing_residual(rho, tau, &hat)?;
    let id = ComplexMatrix::identity(rho.dim());
    let unital = hat.act(&id).hs_distance(&id);
    Ok(CheckResult::from_parts(
        "db2_entangled",
        tol,
        vec![
            SubResidual::new("pairing", pairing, tol.eq_tol),
            SubResidual::new("hat_unital", unital, tol.eq_tol),
        ],
    ))
}

/// `τ^(1/2) = Θ∘τ∘Θ`.
pub fn check_sqdb_definition(
    tau: &SuperOperator,
    rho: &DensityMatrix,
    th: &ReversingOperation,
    tol: &Tolerance,
) -> Result<CheckResult> {
    check_inputs(tau, rho, tol, PositivityMode::Complete)?;
    check_theta(th, rho)?;
    sqdb_definition(tau, rho, th, tol)
}

fn sqdb_definition(tau: &SuperOperator, rho: &DensityMatrix, th: &ReversingOperation, tol: &Tolerance) -> Result<CheckResult> {
    let kms = kms_dual(tau, rho)?;
    let reversed = th.conjugate(tau)?;
    Ok(CheckResult::from_parts(
        "sqdb_definition",
        tol,
        vec![SubResidual::new("kms_vs_reversed", kms.distance(&reversed), tol.eq_tol)],
    ))
}

/// `ω[A⊗τ^Θ(B)] = ω[τ(A)⊗B]` for all `A, B`.
pub fn check_sqdb_entangled(
    tau: &SuperOperator,
    rho: &DensityMatrix,
    th: &ReversingOperation,
    tol: &Tolerance,
) -> Result<CheckResult> {
    check_inputs(tau, rho, tol, PositivityMode::Complete)?;
    check_theta(th, rho)?;
    sqdb_entangled(tau, rho, th, tol)
}

fn sqdb_entangled(tau: &SuperOperator, rho: &DensityMatrix, th: &ReversingOperation, tol: &Tolerance) -> Result<CheckResult> {
    let conj = theta_conjugate(tau, th)?;
    let pairing = omega_pairing_residual(rho, tau, &conj)?;
    Ok(CheckResult::from_parts(
        "sqdb_entangled",
        tol,
        vec![SubResidual::new("pairing", pairing, tol.eq_tol)],
    ))
}

/// `‖τΔ − Δτ‖` as a standalone check.
fn delta_commutes(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<CheckResult> {
    let c = modular_commutator(tau, rho)?;
    Ok(CheckResult::from_parts(
        "delta_commutes",
        tol,
        vec![SubResidual::new("commutator", c, tol.eq_tol)],
    ))
}

/// Whether "Θ-sqdb and `τΔ = Δτ` imply detailed balance II" holds for this
/// instance. Fails only when the antecedent holds and the conclusion does not.
pub fn check_implication_sqdb_db2(
    tau: &SuperOperator,
    rho: &DensityMatrix,
    th: &ReversingOperation,
    tol: &Tolerance,
) -> Result<CheckResult> {
    check_inputs(tau, rho, tol, PositivityMode::Complete)?;
    check_theta(th, rho)?;
    let sqdb = sqdb_definition(tau, rho, th, tol)?;
    let comm = delta_commutes(tau, rho, tol)?;
    let db2 = db2_definition(tau, rho, tol, PositivityMode::Complete)?;
    Ok(implication(&sqdb, &comm, &db2, tol))
}

fn implication(sqdb: &CheckResult, comm: &CheckResult, db2: &CheckResult, tol: &Tolerance) -> CheckResult {
    let diagnostics = vec![
        Diagnostic::new("sqdb_residual", sqdb.residual),
        Diagnostic::new("commutator", comm.residual),
        Diagnostic::new("db2_residual", db2.residual),
    ];
    if sqdb.passed && comm.passed {
        let note = if db2.passed { "antecedent holds; conclusion holds" } else { "antecedent holds; conclusion fails" };
        CheckResult::from_parts(
            "implication_sqdb_db2",
            tol,
            vec![SubResidual::new("db2_definition", db2.residual, db2_threshold(db2))],
        )
        .with_diagnostics(diagnostics)
        .with_note(note)
    } else {
        CheckResult::from_parts("implication_sqdb_db2", tol, Vec::new())
            .with_diagnostics(diagnostics)
            .with_note("not applicable: antecedent fails")
    }
}

/// A threshold under which `residual ≤ threshold` reproduces `db2.passed`.
fn db2_threshold(db2: &CheckResult) -> f64 {
    if db2.passed {
        db2.residual
    } else {
        db2.detail
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.threshold)
            .fold(f64::INFINITY, f64::min)
            .min(db2.residual * 0.5)
    }
}

/// Thermofield reformulations of both conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TfdReport {
    pub db2: CheckResult,
    pub sqdb: CheckResult,
    /// `db2` agrees with `db2_entangled` and `sqdb` with `sqdb_definition`.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceReport {
    pub dim: usize,
    pub degenerate: bool,
    pub positivity: PositivityMode,
    pub db2_definition: CheckResult,
    pub db2_modular: CheckResult,
    pub db2_entangled: CheckResult,
    pub sqdb_definition: CheckResult,
    pub sqdb_entangled: CheckResult,
    pub delta_commutes: CheckResult,
    pub implication: CheckResult,
    /// `‖τ̂ − τ‖` on the representing matrices.
    pub hat_minus_tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tfd: Option<TfdReport>,
    /// The three db2 booleans agree and the two sqdb booleans agree.
    pub consistency: bool,
}

impl BalanceReport {
    pub fn db2(&self) -> bool {
        self.db2_definition.passed
    }

    pub fn sqdb(&self) -> bool {
        self.sqdb_definition.passed
    }

    pub fn checks(&self) -> Vec<&CheckResult> {
        let mut out = vec![
            &self.db2_definition,
            &self.db2_modular,
            &self.db2_entangled,
            &self.sqdb_definition,
            &self.sqdb_entangled,
            &self.delta_commutes,
            &self.implication,
        ];
        if let Some(t) = &self.tfd {
            out.push(&t.db2);
            out.push(&t.sqdb);
        }
        out
    }
}

pub fn run_report(
    tau: &SuperOperator,
    rho: &DensityMatrix,
    th: &ReversingOperation,
    tol: &Tolerance,
) -> Result<BalanceReport> {
    run_report_with(tau, rho, th, tol, CheckOptions::default())
}

pub fn run_report_with(
    tau: &SuperOperator,
    rho: &DensityMatrix,
    th: &ReversingOperation,
    tol: &Tolerance,
    opts: CheckOptions,
) -> Result<BalanceReport> {
    tol.validate()?;
    check_inputs(tau, rho, tol, opts.positivity)?;
    check_theta(th, rho)?;

    let db2_definition = db2_definition(tau, rho, tol, opts.positivity)?;
    let db2_modular = db2_modular(tau, rho, tol)?;
    let db2_entangled = db2_entangled(tau, rho, tol)?;
    let sqdb_definition = sqdb_definition(tau, rho, th, tol)?;
    let sqdb_entangled = sqdb_entangled(tau, rho, th, tol)?;
    let delta_commutes = delta_commutes(tau, rho, tol)?;
    let implication = implication(&sqdb_definition, &delta_commutes, &db2_definition, tol);
    let hat_minus_tau = hat_map(tau, rho)?.distance(tau);

    let tfd = if opts.tfd {
        let db2 = check_db2_tfd_unchecked(tau, rho, tol)?;
        let sqdb = check_sqdb_tfd_unchecked(tau, rho, th, tol)?;
        let consistent = db2.passed == db2_entangled.passed && sqdb.passed == sqdb_definition.passed;
        Some(TfdReport { db2, sqdb, consistent })
    } else {
        None
    };

    let consistency = db2_definition.passed == db2_modular.passed
        && db2_modular.passed == db2_entangled.passed
        && sqdb_definition.passed == sqdb_entangled.passed;

    Ok(BalanceReport {
        dim: rho.dim(),
        degenerate: rho.is_degenerate(),
        positivity: opts.positivity,
        db2_definition,
        db2_modular,
        db2_entangled,
        sqdb_definition,
        sqdb_entangled,
        delta_commutes,
        implication,
        hat_minus_tau,
        tfd,
        consistency,
    })
}

const CHAIN_TOL: f64 = 1e-12;

/// A finite Markov chain: stationary row vector `p` and row-stochastic `Γ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalChain {
    p: Vec<f64>,
    gamma: Vec<Vec<f64>>,
}

impl ClassicalChain {
    pub fn new(p: Vec<f64>, gamma: Vec<Vec<f64>>) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty chain".into()));
        }
        if gamma.len() != n || gamma.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: gamma.len(),
            });
        }
        if p.iter().chain(gamma.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if p.iter().any(|&x| x <= 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > CHAIN_TOL {
            return Err(Error::InvalidParameter(
                "p must be strictly positive and sum to 1".into(),
            ));
        }
        for (j, row) in gamma.iter().enumerate() {
            if row.iter().any(|&x| x < -CHAIN_TOL) || (row.iter().sum::<f64>() - 1.0).abs() > CHAIN_TOL {
                return Err(Error::InvalidParameter(format!(
                    "row {j} of the transition matrix is not stochastic"
                )));
            }
        }
        Ok(ClassicalChain { p, gamma })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn gamma(&self) -> &[Vec<f64>] {
        &self.gamma
    }

    /// `(Γf)_j = Σ_k γ_jk f_k`.
    pub fn act(&self, f: &[f64]) -> Vec<f64> {
        self.gamma
            .iter()
            .map(|row| row.iter().zip(f).map(|(g, x)| g * x).sum())
            .collect()
    }

    /// `φ(f⊗g) = Σ_j p_j f_j g_j`.
    pub fn phi(&self, f: &[f64], g: &[f64]) -> f64 {
        self.p.iter().zip(f).zip(g).map(|((p, a), b)| p * a * b).sum()
    }
}

/// `max_{j,k} |p_j γ_jk − p_k γ_kj|`.
pub fn classical_detailed_balance(c: &ClassicalChain, tol: &Tolerance) -> CheckResult {
    let n = c.dim();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let d = c.p[j] * c.gamma[j][k] - c.p[k] * c.gamma[k][j];
            worst = f64_max(worst, d.abs());
        }
    }
    CheckResult::from_parts(
        "classical_detailed_balance",
        tol,
        vec![SubResidual::new("pairwise", worst, tol.eq_tol)],
    )
}

/// `max |φ[(Γf)⊗g] − φ[f⊗(Γg)]|` over indicator vectors `f, g`.
pub fn classical_phi_balance(c: &ClassicalChain, tol: &Tolerance) -> CheckResult {
    let n = c.dim();
    let indicator = |k: usize| {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    };
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let f = indicator(k);
        let gf = c.act(&f);
        for j in 0..n {
            let g = indicator(j);
            let gg = c.act(&g);
            let d = c.phi(&gf, &g) - c.phi(&f, &gg);
            worst = f64_max(worst, d.abs());
        }
    }
    CheckResult::from_parts(
        "classical_phi_balance",
        tol,
        vec![SubResidual::new("phi_pairing", worst, tol.eq_tol)],
    )
}
