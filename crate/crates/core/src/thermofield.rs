//! The tilde operation `Ã = π(I⊗Ā)`, acting as `X ↦ XA†` on the
//! Hilbert–Schmidt space, and the thermofield forms of both balance notions.

use crate::balance::{verify_dynamics, CheckResult, PositivityMode, SubResidual};
use crate::duals::{modular, modular_power, rho_dual, ReversingOperation};
use crate::error::{Error, Result};
use crate::linalg::{hs_inner, trace_product, ComplexMatrix, Tolerance, C64, I};
use crate::states::{expectation, DensityMatrix};
use crate::superop::{pi_rep, SuperOperator};

#[derive(Clone, Debug, PartialEq)]
pub struct TildeOperator {
    pub source: ComplexMatrix,
    pub rep: SuperOperator,
}

pub fn tilde(a: &ComplexMatrix) -> TildeOperator {
    let id = ComplexMatrix::identity(a.dim());
    TildeOperator {
        source: a.clone(),
        rep: pi_rep(&id, &a.conj()).expect("same size"),
    }
}

/// `⟨AB̃⟩ = (ρ^{1/2}|AB̃ρ^{1/2}) = tr(ρ^{1/2}Aρ^{1/2}B†)`.
pub fn expect_tilde(rho: &DensityMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let n = rho.dim();
    a.check_dim(n)?;
    b.check_dim(n)?;
    let half = rho.power_real(0.5);
    let right = tilde(b).rep.act(&half);
    hs_inner(&half, &(a * &right))
}

/// Largest `‖Δ^{-1/2}(Ãρ^{1/2}) − A†ρ^{1/2}‖_HS` over matrix units `A`.
pub fn check_tilde_substitution(rho: &DensityMatrix, tol: &Tolerance) -> CheckResult {
    let n = rho.dim();
    let half = rho.power_real(0.5);
    let inv_delta_half = modular_power(rho, -I * 0.5);
    let mut worst: f64 = 0.0;
    for (_, _, a) in ComplexMatrix::units(n) {
        let lhs = inv_delta_half.act(&tilde(&a).rep.act(&half));
        let rhs = &a.adjoint() * &half;
        worst = worst.max(lhs.hs_distance(&rhs));
    }
    CheckResult::from_parts(
        "tilde_substitution",
        tol,
        vec![SubResidual::new("substitution", worst, tol.eq_tol)],
    )
}

/// Largest `|⟨AΔ(B)⟩ − ⟨BA⟩|` over pairs of matrix units.
pub fn check_kms(rho: &DensityMatrix, tol: &Tolerance) -> CheckResult {
    let n = rho.dim();
    let delta = modular(rho).delta;
    let r = rho.matrix();
    let units = ComplexMatrix::units(n);
    let mut worst: f64 = 0.0;
    for (_, _, a) in &units {
        for (_, _, b) in &units {
            let lhs = trace_product(&r, &(a * &delta.act(b)));
            let rhs = trace_product(&r, &(b * a));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    CheckResult::from_parts("kms", tol, vec![SubResidual::new("kms", worst, tol.eq_tol)])
}

/// Largest `|⟨α(A)B̃⟩ − ⟨A·β(B)~⟩|` over pairs of matrix units.
fn tilde_pairing_residual(rho: &DensityMatrix, alpha: &SuperOperator, beta: &SuperOperator) -> Result<f64> {
    let units = ComplexMatrix::units(rho.dim());
    let mut worst: f64 = 0.0;
    for (i, j, a) in &units {
        let alpha_a = alpha.act_on_unit(*i, *j);
        for (k, l, b) in &units {
            let lhs = expect_tilde(rho, &alpha_a, b)?;
            let rhs = expect_tilde(rho, a, &beta.act_on_unit(*k, *l))?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

fn check_inputs(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<()> {
    if tau.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: tau.dim(),
        });
    }
    verify_dynamics(tau, tol, PositivityMode::Complete)
}

/// `⟨τ(A)B̃⟩ = ⟨A·τ′(B)~⟩` for all `A, B`, and `τ′(I) = I`.
pub fn check_db2_tfd(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<CheckResult> {
    check_inputs(tau, rho, tol)?;
    check_db2_tfd_unchecked(tau, rho, tol)
}

pub(crate) fn check_db2_tfd_unchecked(tau: &SuperOperator, rho: &DensityMatrix, tol: &Tolerance) -> Result<CheckResult> {
    let dual = rho_dual(tau, rho)?;
    let pairing = tilde_pairing_residual(rho, tau, &dual)?;
    let id = ComplexMatrix::identity(rho.dim());
    let unital = dual.act(&id).hs_distance(&id);
    Ok(CheckResult::from_parts(
        "db2_tfd",
        tol,
        vec![
            SubResidual::new("pairing", pairing, tol.eq_tol),
            SubResidual::new("dual_unital", unital, tol.eq_tol),
        ],
    ))
}

/// `⟨τ(A)B̃⟩ = ⟨A·[Θ∘τ∘Θ(B)]~⟩` for all `A, B`.
pub fn check_sqdb_tfd(
    tau: &SuperOperator,
    rho: &DensityMatrix,
    th: &ReversingOperation,
    tol: &Tolerance,
) -> Result<CheckResult> {
    check_inputs(tau, rho, tol)?;
    if th.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: th.dim(),
        });
    }
    check_sqdb_tfd_unchecked(tau, rho, th, tol)
}

pub(crate) fn check_sqdb_tfd_unchecked(
    tau: &SuperOperator,
    rho: &DensityMatrix,
    th: &ReversingOperation,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let reversed = th.conjugate(tau)?;
    let pairing = tilde_pairing_residual(rho, tau, &reversed)?;
    Ok(CheckResult::from_parts(
        "sqdb_tfd",
        tol,
        vec![SubResidual::new("pairing", pairing, tol.eq_tol)],
    ))
}

/// `(ρ^{1/2}|π(A⊗I)ρ^{1/2}) = ⟨A⟩` over matrix units.
pub fn cyclicity_residual(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let half = rho.power_real(0.5);
    let id = ComplexMatrix::identity(n);
    let mut worst: f64 = 0.0;
    for (_, _, a) in ComplexMatrix::units(n) {
        let left = pi_rep(&a, &id).expect("same size").act(&half);
        let lhs = hs_inner(&half, &left).expect("same size");
        let rhs = expectation(rho, &a).expect("same size");
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::{check_db2_entangled, check_sqdb_definition};
    use crate::generators::{gad_sqdb_channel, random_density, random_matrix, schur_db2_channel, Seed};
    use crate::linalg::ONE;
    use crate::states::omega;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(tilde(&ComplexMatrix::identity(3)).rep, SuperOperator::identity(3));
        let e01 = ComplexMatrix::unit(2, 0, 1);
        let out = tilde(&e01).rep.act(&ComplexMatrix::identity(2));
        assert_eq!(out, ComplexMatrix::unit(2, 1, 0));

        for seed in 0..5 {
            let a = random_matrix(3, Seed(seed));
            let b = random_matrix(3, Seed(seed + 50));
            let x = random_matrix(3, Seed(seed + 100));
            let left = pi_rep(&a, &ComplexMatrix::identity(3)).unwrap();
            let tb = tilde(&b).rep;
            let ab = left.compose(&tb).unwrap();
            let ba = tb.compose(&left).unwrap();
            assert!(ab.distance(&ba) < 1e-12);
            assert!(tb.act(&x).max_abs_diff(&(&x * &b.adjoint())) < 1e-13);
        }
    }

    #[test]
    fn tilde_substitution_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25], &tol()).unwrap();
        let r = check_tilde_substitution(&rho, &tol());
        assert!(r.passed && r.residual <= 1e-12);

        // A = E01: both sides are E10·ρ^{1/2} = (√3/2)·E10.
        let e01 = ComplexMatrix::unit(2, 0, 1);
        let half = rho.power_real(0.5);
        let lhs = modular_power(&rho, -I * 0.5).act(&tilde(&e01).rep.act(&half));
        let expected = ComplexMatrix::unit(2, 1, 0).scale_real(3f64.sqrt() / 2.0);
        assert!(lhs.max_abs_diff(&expected) < 1e-12);

        let flat = DensityMatrix::from_diagonal(&[0.25; 4], &tol()).unwrap();
        assert!(check_tilde_substitution(&flat, &tol()).residual < 1e-14);

        for seed in 0..10 {
            let rho = random_density(2 + seed as usize % 3, 0.02, Seed(seed)).unwrap();
            assert!(check_tilde_substitution(&rho, &tol()).residual <= 1e-11);
        }
    }

    #[test]
    fn kms_examples() {
        let flat = DensityMatrix::from_diagonal(&[1.0 / 3.0; 3], &tol()).unwrap();
        assert!(check_kms(&flat, &tol()).residual < 1e-15);

        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25], &tol()).unwrap();
        let e01 = ComplexMatrix::unit(2, 0, 1);
        let e10 = ComplexMatrix::unit(2, 1, 0);
        let lhs = expectation(&rho, &(&e01 * &modular(&rho).delta.act(&e10))).unwrap();
        let rhs = expectation(&rho, &(&e10 * &e01)).unwrap();
        assert_abs_diff_eq!(lhs.re, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(rhs.re, 0.25, epsilon = 1e-12);

        let rho = random_density(4, 0.02, Seed(20)).unwrap();
        let delta = modular(&rho).delta;
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let a = random_matrix(4, Seed(1000 + k));
            let b = random_matrix(4, Seed(2000 + k));
            let lhs = expectation(&rho, &(&a * &delta.act(&b))).unwrap();
            let rhs = expectation(&rho, &(&b * &a)).unwrap();
            worst = worst.max((lhs - rhs).norm());
        }
        assert!(worst <= 1e-11);
        assert!(check_kms(&rho, &tol()).residual <= 1e-11);
    }

    #[test]
    fn expect_tilde_examples() {
        let rho = random_density(3, 0.05, Seed(21)).unwrap();
        let id = ComplexMatrix::identity(3);
        assert!((expect_tilde(&rho, &id, &id).unwrap() - ONE).norm() < 1e-13);
        for (_, _, a) in ComplexMatrix::units(3) {
            for (_, _, b) in ComplexMatrix::units(3) {
                let lhs = expect_tilde(&rho, &a, &b).unwrap();
                let rhs = omega(&rho, &a, &b.conj()).unwrap();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25], &tol()).unwrap();
        let e01 = ComplexMatrix::unit(2, 0, 1);
        let v = expect_tilde(&rho, &e01, &e01).unwrap();
        assert_abs_diff_eq!(v.re, 3f64.sqrt() / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cyclic_vector() {
        for seed in 0..5 {
            let rho = random_density(3, 0.05, Seed(30 + seed)).unwrap();
            assert!(cyclicity_residual(&rho) < 1e-13);
        }
    }

    #[test]
    fn thermofield_checkers() {
        let rho = random_density(3, 0.05, Seed(40)).unwrap();
        let id = SuperOperator::identity(3);
        let th = ReversingOperation::transpose(3);
        assert!(check_db2_tfd(&id, &rho, &tol()).unwrap().passed);
        assert!(check_sqdb_tfd(&id, &rho, &th, &tol()).unwrap().passed);

        let s = schur_db2_channel(&rho, Seed(41)).unwrap();
        let a = check_db2_tfd(&s, &rho, &tol()).unwrap();
        assert!(a.passed);
        assert_eq!(a.passed, check_db2_entangled(&s, &rho, &tol()).unwrap().passed);
        let b = check_sqdb_tfd(&s, &rho, &th, &tol()).unwrap();
        assert_eq!(b.passed, check_sqdb_definition(&s, &rho, &th, &tol()).unwrap().passed);

        let (g, rho) = gad_sqdb_channel(0.75, 0.2).unwrap();
        let th = ReversingOperation::transpose(2);
        assert!(!check_db2_tfd(&g, &rho, &tol()).unwrap().passed);
        assert!(check_sqdb_tfd(&g, &rho, &th, &tol()).unwrap().passed);
    }
}
