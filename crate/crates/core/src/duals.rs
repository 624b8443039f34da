//! The modular operator and the dual constructions built on it.
//!
//! | map            | defining relation                                   |
//! |----------------|-----------------------------------------------------|
//! | `α†`           | `(A|α(B)) = (α†(A)|B)`                              |
//! | `α‡`           | `tr[α‡(A)B] = tr[Aα(B)]`                            |
//! | `α′`           | `⟨α′(A)B⟩ = ⟨Aα(B)⟩`                                |
//! | `α^(1/2)`      | `tr(ρ^½α^(1/2)(A)ρ^½B) = tr(ρ^½Aρ^½α(B))`           |
//! | `α̂`            | `α̂(A) = α′(Aᵀ)ᵀ`                                    |
//! | `α^Θ`          | `α^Θ(A) = (Θ∘α∘Θ(Aᵀ))ᵀ`                              |
//!
//! All of them are computed in closed form from the representing matrix; the
//! defining relations are exercised by the tests.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance, C64, I};
use crate::states::DensityMatrix;
use crate::superop::SuperOperator;

/// `α†`: conjugate transpose of the representing matrix.
pub fn hs_adjoint(s: &SuperOperator) -> SuperOperator {
    SuperOperator::from_matrix(s.dim(), s.matrix().adjoint()).expect("same size")
}

/// `α‡(A) = α†(A†)†`. With `T` the transposition map this is `T·Mᵀ·T`.
pub fn trace_dual(s: &SuperOperator) -> SuperOperator {
    let n = s.dim();
    let t = SuperOperator::transpose_map(n);
    let mt = SuperOperator::from_matrix(n, s.matrix().transpose()).expect("same size");
    t.compose(&mt).unwrap().compose(&t).unwrap()
}

/// `α′(A) = ρ⁻¹ α‡(ρA)`.
pub fn rho_dual(s: &SuperOperator, rho: &DensityMatrix) -> Result<SuperOperator> {
    let n = rho.dim();
    check_dims(s, n)?;
    let id = ComplexMatrix::identity(n);
    let left_rho = SuperOperator::sandwich(&rho.matrix(), &id)?;
    let left_rho_inv = SuperOperator::sandwich(&rho.power_real(-1.0), &id)?;
    Ok(left_rho_inv.compose(&trace_dual(s))?.compose(&left_rho)?)
}

/// `α^(1/2)(A) = ρ^{-1/2} α†(ρ^{1/2}A†ρ^{1/2})† ρ^{-1/2}`, which equals
/// `ρ^{-1/2} α‡(ρ^{1/2}Aρ^{1/2}) ρ^{-1/2}`.
pub fn kms_dual(s: &SuperOperator, rho: &DensityMatrix) -> Result<SuperOperator> {
    let n = rho.dim();
    check_dims(s, n)?;
    let half = rho.power_real(0.5);
    let inv_half = rho.power_real(-0.5);
    let inner = SuperOperator::sandwich(&half, &half)?;
    let outer = SuperOperator::sandwich(&inv_half, &inv_half)?;
    Ok(outer.compose(&trace_dual(s))?.compose(&inner)?)
}

/// `α̂(A) = α′(Aᵀ)ᵀ` with the transpose taken in the working basis.
pub fn hat_map(s: &SuperOperator, rho: &DensityMatrix) -> Result<SuperOperator> {
    Ok(rho_dual(s, rho)?.transpose_conjugated())
}

/// `α^Θ(A) = (Θ∘α∘Θ(Aᵀ))ᵀ`.
pub fn theta_conjugate(s: &SuperOperator, th: &ReversingOperation) -> Result<SuperOperator> {
    Ok(th.conjugate(s)?.transpose_conjugated())
}

fn check_dims(s: &SuperOperator, n: usize) -> Result<()> {
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.dim(),
        });
    }
    Ok(())
}

/// `Δ(A) = ρAρ⁻¹` together with `Δ^{1/2}`.
#[derive(Clone, Debug)]
pub struct ModularFamily {
    pub rho: DensityMatrix,
    pub delta: SuperOperator,
    pub delta_half: SuperOperator,
}

impl ModularFamily {
    pub fn power(&self, z: C64) -> SuperOperator {
        modular_power(&self.rho, z)
    }
}

pub fn modular(rho: &DensityMatrix) -> ModularFamily {
    ModularFamily {
        rho: rho.clone(),
        delta: modular_power(rho, I),
        delta_half: modular_power(rho, I * 0.5),
    }
}

/// `Δ^{-iz}: A ↦ ρ^{-iz} A ρ^{iz}`. `z = i` gives `Δ`, `z = i/2` gives
/// `Δ^{1/2}`, and real `z` gives the unitary modular group.
pub fn modular_power(rho: &DensityMatrix, z: C64) -> SuperOperator {
    let left = rho.power(-I * z);
    let right = rho.power(I * z);
    SuperOperator::sandwich(&left, &right).expect("same size")
}

/// `‖αΔ − Δα‖_HS` on the representing matrices.
pub fn modular_commutator(s: &SuperOperator, rho: &DensityMatrix) -> Result<f64> {
    check_dims(s, rho.dim())?;
    let delta = modular_power(rho, I);
    Ok(s.compose(&delta)?.distance(&delta.compose(s)?))
}

const UNITARY_TOL: f64 = 1e-10;

/// A ∗-anti-automorphism with `Θ² = id`, realized as `Θ(A) = U Aᵀ U†`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReversingOperation {
    u: ComplexMatrix,
    map: SuperOperator,
}

impl ReversingOperation {
    /// Plain transposition in the working basis.
    pub fn transpose(n: usize) -> Self {
        ReversingOperation {
            u: ComplexMatrix::identity(n),
            map: SuperOperator::transpose_map(n),
        }
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn as_superop(&self) -> &SuperOperator {
        &self.map
    }

    pub fn is_transpose(&self) -> bool {
        self.u == ComplexMatrix::identity(self.u.dim())
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        a.check_dim(self.dim())?;
        Ok(&(&self.u * &a.transpose()) * &self.u.adjoint())
    }

    /// `Θ∘α∘Θ`.
    pub fn conjugate(&self, s: &SuperOperator) -> Result<SuperOperator> {
        self.map.compose(s)?.compose(&self.map)
    }

    /// The same operation after the basis change `A ↦ V†AV`:
    /// `U ↦ V† U V̄`.
    pub fn in_basis(&self, v: &ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        v.check_dim(self.dim())?;
        make_reversing(&(&(&v.adjoint() * &self.u) * &v.conj()), tol)
    }
}

/// Validates `U` and builds `Θ(A) = U Aᵀ U†`, checking the ∗-anti-automorphism
/// properties and `Θ² = id` on matrix units.
pub fn make_reversing(u: &ComplexMatrix, tol: &Tolerance) -> Result<ReversingOperation> {
    let residual = u.unitary_residual();
    if residual > UNITARY_TOL {
        return Err(Error::NonUnitary { residual });
    }
    let n = u.dim();
    let map = SuperOperator::sandwich(u, &u.adjoint())?.compose(&SuperOperator::transpose_map(n))?;
    let th = ReversingOperation { u: u.clone(), map };

    let units = ComplexMatrix::units(n);
    let mut involution: f64 = 0.0;
    let mut star: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for (_, _, a) in &units {
        let ta = th.apply(a)?;
        involution = involution.max(th.apply(&ta)?.hs_distance(a));
        star = star.max(th.apply(&a.adjoint())?.hs_distance(&ta.adjoint()));
        for (_, _, b) in &units {
            let lhs = th.apply(&(a * b))?;
            let rhs = &th.apply(b)? * &ta;
            anti = anti.max(lhs.hs_distance(&rhs));
        }
    }
    if anti > tol.eq_tol {
        return Err(Error::NotAntiAutomorphism {
            property: "anti-multiplicativity",
            residual: anti,
        });
    }
    if star > tol.eq_tol {
        return Err(Error::NotAntiAutomorphism {
            property: "*-compatibility",
            residual: star,
        });
    }
    if involution > tol.eq_tol {
        return Err(Error::NotInvolutive {
            residual: involution,
        });
    }
    Ok(th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        gad_sqdb_channel, random_density, random_kraus, random_matrix, random_unital_channel,
        random_unitary, schur_db2_channel, Seed,
    };
    use crate::linalg::{hs_inner, trace_product, ONE, ZERO};
    use crate::states::expectation;
    use crate::superop::{from_kraus, is_completely_positive, is_hermitian_map, KrausChannel};
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn rho34() -> DensityMatrix {
        DensityMatrix::from_diagonal(&[0.75, 0.25], &tol()).unwrap()
    }

    /// Brute-force pairing residual over all matrix-unit pairs.
    fn pairing_residual(
        n: usize,
        f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> (C64, C64),
    ) -> f64 {
        let units = ComplexMatrix::units(n);
        let mut worst: f64 = 0.0;
        for (_, _, a) in &units {
            for (_, _, b) in &units {
                let (l, r) = f(a, b);
                worst = worst.max((l - r).norm());
            }
        }
        worst
    }

    #[test]
    fn hs_adjoint_examples() {
        let u = random_unitary(3, Seed(1));
        let conj = from_kraus(&KrausChannel::new(vec![u.clone()]).unwrap());
        let back = from_kraus(&KrausChannel::new(vec![u.adjoint()]).unwrap());
        assert!(hs_adjoint(&conj).distance(&back) < 1e-13);

        let rho = random_density(3, 0.05, Seed(2)).unwrap();
        let delta = modular(&rho).delta;
        assert!(hs_adjoint(&delta).distance(&delta) < 1e-15);

        let s = from_kraus(&random_kraus(3, 2, Seed(3)));
        let adj = hs_adjoint(&s);
        let res = pairing_residual(3, |a, b| {
            (
                hs_inner(a, &s.apply(b).unwrap()).unwrap(),
                hs_inner(&adj.apply(a).unwrap(), b).unwrap(),
            )
        });
        assert!(res <= 1e-12);
    }

    #[test]
    fn trace_dual_examples() {
        let k = random_kraus(3, 3, Seed(4));
        let heis = from_kraus(&k);
        let schr = from_kraus(
            &KrausChannel::new(k.ops().iter().map(|v| v.adjoint()).collect()).unwrap(),
        );
        let dual = trace_dual(&heis);
        assert!(dual.distance(&schr) < 1e-12);
        let res = pairing_residual(3, |a, b| {
            (
                trace_product(&dual.apply(a).unwrap(), b),
                trace_product(a, &heis.apply(b).unwrap()),
            )
        });
        assert!(res <= 1e-12);
        // Hermitian map: α‡ = α†.
        assert!(dual.distance(&hs_adjoint(&heis)) < 1e-12);
        // α‡(A) = α†(A†)† for a non-Hermitian map too.
        let p = crate::superop::pi_rep(&random_matrix(3, Seed(5)), &random_matrix(3, Seed(6)))
            .unwrap();
        let x = random_matrix(3, Seed(7));
        let lhs = trace_dual(&p).apply(&x).unwrap();
        let rhs = hs_adjoint(&p).apply(&x.adjoint()).unwrap().adjoint();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);

        assert_eq!(trace_dual(&SuperOperator::identity(3)), SuperOperator::identity(3));

        // Unital ⇒ trace-preserving dual.
        let u = random_unital_channel(3, 4, Seed(8)).unwrap();
        let d = trace_dual(&u);
        for s in 0..5 {
            let x = random_matrix(3, Seed(20 + s));
            assert!((d.apply(&x).unwrap().trace() - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn rho_dual_examples() {
        let rho = random_density(3, 0.05, Seed(9)).unwrap();
        assert!(rho_dual(&SuperOperator::identity(3), &rho)
            .unwrap()
            .distance(&SuperOperator::identity(3))
            < 1e-13);

        let exp_map = SuperOperator::expectation_map(&rho.matrix());
        assert!(rho_dual(&exp_map, &rho).unwrap().distance(&exp_map) < 1e-12);

        for seed in 0..5 {
            let s = random_unital_channel(3, 3, Seed(30 + seed)).unwrap();
            let d = rho_dual(&s, &rho).unwrap();
            let res = pairing_residual(3, |a, b| {
                (
                    expectation(&rho, &(&d.apply(a).unwrap() * b)).unwrap(),
                    expectation(&rho, &(a * &s.apply(b).unwrap())).unwrap(),
                )
            });
            assert!(res <= 1e-10, "pairing residual {res:e}");
        }
        assert!(rho_dual(&SuperOperator::identity(2), &rho).is_err());
    }

    #[test]
    fn rho_dual_is_the_rho_adjoint_with_daggers() {
        // α^ρ is the adjoint for (A,B)_ρ = tr(ρA†B) = vec(A)† G vec(B) with
        // G = matrix of X ↦ Xρ, so α^ρ = G⁻¹ M† G.
        let rho = random_density(3, 0.05, Seed(10)).unwrap();
        let id = ComplexMatrix::identity(3);
        let g = SuperOperator::sandwich(&id, &rho.matrix()).unwrap();
        let g_inv = SuperOperator::sandwich(&id, &rho.power_real(-1.0)).unwrap();
        for seed in 0..4 {
            let s = from_kraus(&random_kraus(3, 2, Seed(40 + seed)));
            let adj_rho = g_inv.compose(&hs_adjoint(&s)).unwrap().compose(&g).unwrap();
            let d = rho_dual(&s, &rho).unwrap();
            for k in 0..5 {
                let a = random_matrix(3, Seed(100 * seed + k));
                let lhs = d.apply(&a).unwrap();
                let rhs = adj_rho.apply(&a.adjoint()).unwrap().adjoint();
                assert!(lhs.max_abs_diff(&rhs) < 1e-10);
            }
        }
    }

    #[test]
    fn kms_dual_examples() {
        let rho = random_density(3, 0.05, Seed(11)).unwrap();
        assert!(kms_dual(&SuperOperator::identity(3), &rho)
            .unwrap()
            .distance(&SuperOperator::identity(3))
            < 1e-13);
        let half = rho.power_real(0.5);
        for seed in 0..5 {
            let s = from_kraus(&random_kraus(3, 3, Seed(50 + seed)));
            let k = kms_dual(&s, &rho).unwrap();
            let kk = kms_dual(&k, &rho).unwrap();
            assert!(kk.distance(&s) <= 1e-10 * s.matrix().hs_norm().max(1.0));
            assert!(is_completely_positive(&k, &tol()).passed);
            let res = pairing_residual(3, |a, b| {
                (
                    trace_product(&(&(&half * &k.apply(a).unwrap()) * &half), b),
                    trace_product(&(&(&half * a) * &half), &s.apply(b).unwrap()),
                )
            });
            assert!(res <= 1e-10);
            // Literal formula with HS adjoint and daggers.
            let adj = hs_adjoint(&s);
            let inv_half = rho.power_real(-0.5);
            let a = random_matrix(3, Seed(60 + seed));
            let literal = &(&inv_half
                * &adj
                    .apply(&(&(&half * &a.adjoint()) * &half))
                    .unwrap()
                    .adjoint())
                * &inv_half;
            assert!(k.apply(&a).unwrap().max_abs_diff(&literal) < 1e-10);
        }
    }

    #[test]
    fn hat_map_examples() {
        let rho = random_density(3, 0.05, Seed(12)).unwrap();
        assert!(hat_map(&SuperOperator::identity(3), &rho)
            .unwrap()
            .distance(&SuperOperator::identity(3))
            < 1e-13);

        let s = schur_db2_channel(&rho, Seed(13)).unwrap();
        let h = hat_map(&s, &rho).unwrap();
        assert!(is_completely_positive(&h, &tol()).passed);
        let id = ComplexMatrix::identity(3);
        assert!(h.apply(&id).unwrap().max_abs_diff(&id) < 1e-12);

        let u = random_unital_channel(3, 2, Seed(14)).unwrap();
        let hu = hat_map(&u, &rho).unwrap();
        let dual_i = rho_dual(&u, &rho).unwrap().apply(&id).unwrap();
        assert!(hu.apply(&id).unwrap().max_abs_diff(&dual_i.transpose()) < 1e-13);
    }

    #[test]
    fn theta_conjugate_examples() {
        let s = random_unital_channel(3, 3, Seed(15)).unwrap();
        let t = ReversingOperation::transpose(3);
        assert!(theta_conjugate(&s, &t).unwrap().distance(&s) < 1e-14);

        let th = make_reversing(&ComplexMatrix::pauli_x(), &tol()).unwrap();
        let id = SuperOperator::identity(2);
        assert!(theta_conjugate(&id, &th).unwrap().distance(&id) < 1e-14);

        let s2 = random_unital_channel(2, 3, Seed(16)).unwrap();
        let twice = theta_conjugate(&theta_conjugate(&s2, &th).unwrap(), &th).unwrap();
        assert!(twice.distance(&s2) < 1e-13);
    }

    #[test]
    fn modular_examples() {
        let rho = rho34();
        let fam = modular(&rho);
        let expected = ComplexMatrix::diag_real(&[1.0, 1.0 / 3.0, 3.0, 1.0]);
        assert!(fam.delta.matrix().max_abs_diff(&expected) <= 1e-12);

        assert!(modular_power(&rho, ZERO).distance(&SuperOperator::identity(2)) < 1e-15);

        let e01 = ComplexMatrix::unit(2, 0, 1);
        let out = fam.delta_half.apply(&e01).unwrap();
        assert!(out.max_abs_diff(&e01.scale_real(3f64.sqrt())) < 1e-14);

        // Δ(A) = ρAρ⁻¹ on every matrix unit of a generic ρ.
        let rho = random_density(3, 0.05, Seed(17)).unwrap();
        let fam = modular(&rho);
        let r = rho.matrix();
        let r_inv = rho.power_real(-1.0);
        for (_, _, e) in ComplexMatrix::units(3) {
            let direct = &(&r * &e) * &r_inv;
            assert!(fam.delta.apply(&e).unwrap().max_abs_diff(&direct) < 1e-12);
        }
        // Δ^{1/2}Δ^{1/2} = Δ.
        let sq = fam.delta_half.compose(&fam.delta_half).unwrap();
        assert!(sq.distance(&fam.delta) < 1e-12);
    }

    #[test]
    fn modular_power_sign_convention() {
        // Δ^{-iz} at z = i is Δ; at z = −i it is Δ⁻¹.
        let rho = random_density(3, 0.05, Seed(18)).unwrap();
        let delta = modular(&rho).delta;
        assert!(modular_power(&rho, I).distance(&delta) < 1e-13);
        let inv = modular_power(&rho, -I);
        assert!(inv.compose(&delta).unwrap().distance(&SuperOperator::identity(3)) < 1e-12);
        // Real z: A ↦ ρ^{-iz}Aρ^{iz} is unitary on the HS space.
        let u = modular_power(&rho, C64::new(0.7, 0.0));
        assert!(u.matrix().unitary_residual() < 1e-12);
    }

    #[test]
    fn reversing_examples() {
        let t = make_reversing(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(t.is_transpose());
        let x = random_matrix(2, Seed(19));
        assert_eq!(t.apply(&x).unwrap(), x.transpose());
        assert_eq!(t.as_superop(), ReversingOperation::transpose(2).as_superop());

        assert!(make_reversing(&ComplexMatrix::pauli_x(), &tol()).is_ok());

        // Every diagonal unitary satisfies U Ū = I, so it is accepted.
        let d = ComplexMatrix::diag(&[ONE, I]);
        assert!(make_reversing(&d, &tol()).is_ok());

        // U Ū = diag(−i, i) is not a multiple of I: Θ² ≠ id.
        let bad = ComplexMatrix::new(2, vec![ZERO, ONE, I, ZERO]).unwrap();
        assert!(matches!(
            make_reversing(&bad, &tol()),
            Err(Error::NotInvolutive { .. })
        ));

        let not_unitary = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(
            make_reversing(&not_unitary, &tol()),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn reversing_basis_change() {
        let th = make_reversing(&ComplexMatrix::pauli_x(), &tol()).unwrap();
        let v = random_unitary(2, Seed(20));
        let moved = th.in_basis(&v, &tol()).unwrap();
        let a = random_matrix(2, Seed(21));
        let direct = &(&v.adjoint() * &th.apply(&(&(&v * &a) * &v.adjoint())).unwrap()) * &v;
        assert!(moved.apply(&a).unwrap().max_abs_diff(&direct) < 1e-12);
    }

    /// Hermitian maps with Hermitian ρ-dual in the generated pool.
    fn formula_pool() -> Vec<(SuperOperator, DensityMatrix)> {
        let mut pool = Vec::new();
        for seed in 0..6 {
            let n = 2 + seed as usize % 3;
            let rho = random_density(n, 0.05, Seed(70 + seed)).unwrap();
            pool.push((schur_db2_channel(&rho, Seed(80 + seed)).unwrap(), rho.clone()));
            pool.push((SuperOperator::expectation_map(&rho.matrix()), rho));
        }
        let (g, rho) = gad_sqdb_channel(0.75, 0.2).unwrap();
        let _ = g; // sqdb but ρ-dual not Hermitian
        pool.push((SuperOperator::identity(2), rho));
        pool
    }

    #[test]
    fn rho_dual_formula_and_modular_commutation() {
        for (s, rho) in formula_pool() {
            let dual = rho_dual(&s, &rho).unwrap();
            assert!(is_hermitian_map(&s, &tol()).passed);
            assert!(is_hermitian_map(&dual, &tol()).passed);
            let adj = hs_adjoint(&s);
            let half = rho.power_real(0.5);
            let inv_half = rho.power_real(-0.5);
            for (_, _, a) in ComplexMatrix::units(rho.dim()) {
                let formula = &(&inv_half * &adj.apply(&(&(&half * &a) * &half)).unwrap()) * &inv_half;
                assert!(dual.apply(&a).unwrap().max_abs_diff(&formula) <= 1e-10);
            }
            assert!(modular_commutator(&s, &rho).unwrap() <= 1e-10);
            for z in [1.0, -1.0, 0.5, -0.5] {
                let g = modular_power(&rho, C64::new(z, 0.0));
                let lhs = s.compose(&g).unwrap();
                let rhs = g.compose(&s).unwrap();
                assert!(lhs.distance(&rhs) <= 1e-10);
            }
        }
    }

    #[test]
    fn kms_equals_rho_dual_iff_modular_commutation() {
        let mut checked = (0, 0);
        for seed in 0..10 {
            let n = 2 + seed as usize % 2;
            let rho = random_density(n, 0.05, Seed(90 + seed)).unwrap();
            let pool = [
                schur_db2_channel(&rho, Seed(seed)).unwrap(),
                random_unital_channel(n, 2, Seed(seed)).unwrap(),
            ];
            for s in pool {
                let commutes = modular_commutator(&s, &rho).unwrap() <= 1e-9;
                let same = kms_dual(&s, &rho).unwrap().distance(&rho_dual(&s, &rho).unwrap()) <= 1e-9;
                assert_eq!(commutes, same);
                if commutes {
                    checked.0 += 1;
                } else {
                    checked.1 += 1;
                }
            }
        }
        assert!(checked.0 > 0 && checked.1 > 0);
    }

    #[test]
    fn duals_are_linear() {
        let rho = random_density(3, 0.05, Seed(100)).unwrap();
        let s1 = from_kraus(&random_kraus(3, 2, Seed(101)));
        let s2 = from_kraus(&random_kraus(3, 3, Seed(102)));
        let (c1, c2) = (C64::new(0.3, 0.0), C64::new(-1.7, 0.0));
        let combo = s1.scale(c1).add(&s2.scale(c2)).unwrap();
        type Dual = fn(&SuperOperator, &DensityMatrix) -> SuperOperator;
        let duals: [Dual; 5] = [
            |s, _| hs_adjoint(s),
            |s, _| trace_dual(s),
            |s, r| rho_dual(s, r).unwrap(),
            |s, r| kms_dual(s, r).unwrap(),
            |s, r| hat_map(s, r).unwrap(),
        ];
        for d in duals {
            let lhs = d(&combo, &rho);
            let rhs = d(&s1, &rho).scale(c1).add(&d(&s2, &rho).scale(c2)).unwrap();
            assert!(lhs.distance(&rhs) <= 1e-10 * rhs.matrix().hs_norm().max(1.0));
        }
    }

    #[test]
    fn modular_eigenvalues_are_ratios() {
        let rho = random_density(4, 0.05, Seed(103)).unwrap();
        let delta = modular(&rho).delta;
        let p = rho.eigenvalues();
        for i in 0..4 {
            for j in 0..4 {
                let k = crate::superop::stacked_index(4, i, j);
                assert_abs_diff_eq!(delta.matrix()[(k, k)].re, p[i] / p[j], epsilon = 1e-12);
            }
        }
    }
}
