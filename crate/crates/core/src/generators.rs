//! Seeded constructions of states, channels and chains with known balance
//! status. All randomness comes from a ChaCha8 stream keyed by [`Seed`], so a
//! seed reproduces its output bit for bit.
//!
//! Channels are returned in the working basis of the accompanying density
//! matrix, where `ρ` is diagonal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::balance::ClassicalChain;
use crate::duals::{kms_dual, modular_commutator, trace_dual, ReversingOperation};
use crate::error::{Error, Result};
use crate::linalg::{mat_power, ComplexMatrix, Tolerance, C64, ONE, ZERO};
use crate::states::DensityMatrix;
use crate::superop::{from_kraus, stacked_index, KrausChannel, SuperOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let data = (0..n * n).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(n, data).expect("square")
}

/// Orthonormalizes the columns with two passes of modified Gram–Schmidt.
/// The phase convention is that of QR with a positive diagonal in `R`.
fn orthonormalize(mut m: ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let mut proj = ZERO;
                for i in 0..n {
                    proj += m[(i, k)].conj() * m[(i, j)];
                }
                for i in 0..n {
                    let v = m[(i, k)];
                    m[(i, j)] -= proj * v;
                }
            }
        }
        let norm = (0..n).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            m[(i, j)] /= norm;
        }
    }
    m
}

fn unitary_from(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    orthonormalize(gaussian_matrix(n, rng))
}

/// Point on the probability simplex, uniform (flat Dirichlet).
fn simplex_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = x.iter().sum();
    x.into_iter().map(|v| v / total).collect()
}

/// Complex Gaussian matrix with independent standard normal parts.
pub fn random_matrix(n: usize, seed: Seed) -> ComplexMatrix {
    gaussian_matrix(n, &mut seed.rng())
}

pub fn random_hermitian(n: usize, seed: Seed) -> ComplexMatrix {
    random_matrix(n, seed).hermitian_part()
}

pub fn random_unitary(n: usize, seed: Seed) -> ComplexMatrix {
    unitary_from(n, &mut seed.rng())
}

fn density_spectrum(n: usize, min_eig: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if n == 0 || !(min_eig > 0.0 && min_eig * (n as f64) < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "min_eig must lie in (0, 1/n) for n = {n}, got {min_eig}"
        )));
    }
    let slack = 1.0 - min_eig * n as f64;
    Ok(simplex_point(n, rng).into_iter().map(|x| min_eig + slack * x).collect())
}

/// Density matrix with spectrum `min_eig + (1 − n·min_eig)·x`, `x` flat on the
/// simplex, in a random unitary basis.
pub fn random_density(n: usize, min_eig: f64, seed: Seed) -> Result<DensityMatrix> {
    let mut rng = seed.rng();
    let spectrum = density_spectrum(n, min_eig, &mut rng)?;
    let basis = unitary_from(n, &mut rng);
    DensityMatrix::from_spectrum(&spectrum, basis, &Tolerance::default())
}

/// `k` complex Gaussian Kraus operators, scaled by `1/√(nk)`. Not unital.
pub fn random_kraus(n: usize, k: usize, seed: Seed) -> KrausChannel {
    let mut rng = seed.rng();
    let scale = 1.0 / ((n * k) as f64).sqrt();
    let ops = (0..k).map(|_| gaussian_matrix(n, &mut rng).scale_real(scale)).collect();
    KrausChannel::new(ops).expect("valid Kraus count")
}

/// `W_j = M^{-1/2} V_j` with `M = Σ V_j V_j†`, so that `Σ W_j W_j† = I`.
pub fn unital_normalize(k: &KrausChannel) -> Result<KrausChannel> {
    let n = k.dim();
    let mut m = ComplexMatrix::zeros(n);
    for v in k.ops() {
        m += &(v * &v.adjoint());
    }
    let inv_sqrt = mat_power(&m.hermitian_part(), C64::new(-0.5, 0.0), &Tolerance::default())
        .map_err(|_| Error::InvalidParameter("Kraus set has singular Σ V V†".into()))?;
    KrausChannel::new(k.ops().iter().map(|v| &inv_sqrt * v).collect())
}

pub fn random_unital_kraus(n: usize, k: usize, seed: Seed) -> Result<KrausChannel> {
    if k == 0 || k > n * n {
        return Err(Error::InvalidParameter(format!(
            "Kraus count must lie in 1..={}, got {k}",
            n * n
        )));
    }
    unital_normalize(&random_kraus(n, k, seed))
}

/// A generic unital channel: fails every balance check with probability one.
pub fn random_unital_channel(n: usize, k: usize, seed: Seed) -> Result<SuperOperator> {
    Ok(from_kraus(&random_unital_kraus(n, k, seed)?))
}

/// `A ↦ H∘A`. Completely positive exactly when `H` is positive semidefinite,
/// unital when `H_jj = 1`.
pub fn schur_from_matrix(h: &ComplexMatrix) -> Result<SuperOperator> {
    let n = h.dim();
    let mut mat = ComplexMatrix::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            let k = stacked_index(n, i, j);
            mat[(k, k)] = h[(i, j)];
        }
    }
    SuperOperator::from_matrix(n, mat)
}

/// Schur multiplier `A ↦ H∘A` with `H = D^{-1/2} G†G D^{-1/2}`, `D` the
/// diagonal of `G†G`. It commutes with `Δ` and leaves the diagonal alone, so
/// it satisfies detailed balance II for `ρ`.
pub fn schur_db2_channel(rho: &DensityMatrix, seed: Seed) -> Result<SuperOperator> {
    let n = rho.dim();
    let g = random_matrix(n, seed);
    let gram = &g.adjoint() * &g;
    let d: Vec<f64> = (0..n).map(|i| gram[(i, i)].re.sqrt()).collect();
    let mut h = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = gram[(i, j)] / (d[i] * d[j]);
        }
        h[(i, i)] = ONE;
    }
    schur_from_matrix(&h)
}

/// Kraus operators of the two-level family: `V₁ = diag(a, b)`,
/// `V₂ = c·E01 + d·E10` with `a = √(1−s)`, `c = √s`, `d = √(ps/(1−p))`,
/// `b = √(1 − ps/(1−p))`.
pub fn gad_kraus(p: f64, s: f64) -> Result<KrausChannel> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (1/2, 1), got {p}")));
    }
    let q = 1.0 - p;
    if !(s >= 0.0 && s <= q / p) {
        return Err(Error::InvalidParameter(format!(
            "s must lie in [0, (1-p)/p] = [0, {}], got {s}",
            q / p
        )));
    }
    let d2 = (p * s / q).min(1.0);
    let (a, b, c, d) = ((1.0 - s).sqrt(), (1.0 - d2).sqrt(), s.sqrt(), d2.sqrt());
    let v1 = ComplexMatrix::diag_real(&[a, b]);
    let v2 = ComplexMatrix::from_real(2, &[0.0, c, d, 0.0])?;
    KrausChannel::new(vec![v1, v2])
}

const CONSTRUCTION_TOL: f64 = 1e-12;

/// The two-level Θ-sqdb family for `ρ = diag(p, 1−p)` and transpose `Θ`.
/// Unitality, invariance of `ρ` under the dual and the sqdb relation are
/// verified before returning.
pub fn gad_sqdb_channel(p: f64, s: f64) -> Result<(SuperOperator, DensityMatrix)> {
    let kraus = gad_kraus(p, s)?;
    let rho = DensityMatrix::from_diagonal(&[p, 1.0 - p], &Tolerance::default())?;
    let tau = from_kraus(&kraus);

    let unital = kraus.unital_residual();
    let invariance = trace_dual(&tau).act(&rho.matrix()).max_abs_diff(&rho.matrix());
    let sqdb = kms_dual(&tau, &rho)?.distance(&ReversingOperation::transpose(2).conjugate(&tau)?);
    if unital > CONSTRUCTION_TOL || invariance > CONSTRUCTION_TOL || sqdb > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "construction check failed: unital {unital:e}, invariance {invariance:e}, sqdb {sqdb:e}"
        )));
    }
    if s > 0.0 && modular_commutator(&tau, &rho)? <= CONSTRUCTION_TOL {
        return Err(Error::InvalidParameter("family unexpectedly commutes with Δ".into()));
    }
    Ok((tau, rho))
}

/// The two-level family embedded on levels `j ≠ k` of `ρ`, identity elsewhere.
/// Requires `s·ρ_j/ρ_k ≤ 1`. Unital and `ρ`-preserving under the dual.
pub fn pair_damping(rho: &DensityMatrix, j: usize, k: usize, s: f64) -> Result<KrausChannel> {
    let n = rho.dim();
    if j >= n || k >= n || j == k {
        return Err(Error::InvalidParameter(format!("invalid level pair ({j}, {k})")));
    }
    let ratio = rho.eigenvalues()[j] / rho.eigenvalues()[k];
    if !(s >= 0.0 && s <= 1.0 && s * ratio <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "s must lie in [0, min(1, ρ_k/ρ_j)], got {s}"
        )));
    }
    let d2 = s * ratio;
    let mut v1 = ComplexMatrix::identity(n);
    v1[(j, j)] = C64::new((1.0 - s).sqrt(), 0.0);
    v1[(k, k)] = C64::new((1.0 - d2).sqrt(), 0.0);
    let mut v2 = ComplexMatrix::zeros(n);
    v2[(j, k)] = C64::new(s.sqrt(), 0.0);
    v2[(k, j)] = C64::new(d2.sqrt(), 0.0);
    KrausChannel::new(vec![v1, v2])
}

/// Unital, `ρ`-preserving channel that generically does not commute with `Δ`:
/// a random Schur multiplier after a convex mixture of pair dampings.
pub fn rho_preserving_channel(rho: &DensityMatrix, seed: Seed) -> Result<SuperOperator> {
    let n = rho.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("need n ≥ 2".into()));
    }
    let mut rng = seed.rng();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
    let weights = simplex_point(pairs.len(), &mut rng);
    let mut mix = SuperOperator::zero(n);
    for (&(j, k), w) in pairs.iter().zip(weights) {
        let bound = (rho.eigenvalues()[k] / rho.eigenvalues()[j]).min(1.0);
        let s = bound * rng.random_range(0.2..1.0);
        let damp = from_kraus(&pair_damping(rho, j, k, s)?);
        mix = mix.add(&damp.scale(C64::new(w, 0.0)))?;
    }
    let schur = schur_db2_channel(rho, Seed(rng.random()))?;
    schur.compose(&mix)
}

/// `τ = ½(β + Θβ^(1/2)Θ)` for transpose `Θ` and a `ρ`-preserving unital `β`.
/// Satisfies Θ-sqdb; the identity it relies on is checked here numerically.
pub fn symmetrized_sqdb_channel(rho: &DensityMatrix, seed: Seed) -> Result<SuperOperator> {
    let n = rho.dim();
    let th = ReversingOperation::transpose(n);
    let beta = rho_preserving_channel(rho, seed)?;
    let beta_kms = kms_dual(&beta, rho)?;
    let conj = th.conjugate(&beta)?;
    let lhs = kms_dual(&conj, rho)?;
    let rhs = th.conjugate(&beta_kms)?;
    let residual = lhs.distance(&rhs);
    if residual > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "KMS dual does not commute with transpose conjugation (residual {residual:e})"
        )));
    }
    let half = C64::new(0.5, 0.0);
    beta.scale(half).add(&th.conjugate(&beta_kms)?.scale(half))
}

/// A density matrix whose two largest eigenvalues coincide, with a mixture of
/// conjugations by unitaries that are block-diagonal in its eigenspaces.
/// Commutes with `Δ` and preserves `ρ`, so it satisfies detailed balance II.
pub fn degenerate_db2_channel(n: usize, seed: Seed) -> Result<(SuperOperator, DensityMatrix)> {
    if n < 2 {
        return Err(Error::InvalidParameter("need n ≥ 2".into()));
    }
    let mut rng = seed.rng();
    let mut spectrum = density_spectrum(n, 0.05, &mut rng)?;
    spectrum.sort_by(|a, b| b.total_cmp(a));
    let top = 0.5 * (spectrum[0] + spectrum[1]);
    spectrum[0] = top;
    spectrum[1] = top;
    let basis = unitary_from(n, &mut rng);
    let rho = DensityMatrix::from_spectrum(&spectrum, basis, &Tolerance::default())?;

    let terms = 3;
    let weights = simplex_point(terms, &mut rng);
    let mut ops = Vec::with_capacity(terms);
    for w in weights {
        let block = unitary_from(2, &mut rng);
        let mut u = ComplexMatrix::zeros(n);
        for i in 0..2 {
            for j in 0..2 {
                u[(i, j)] = block[(i, j)];
            }
        }
        for i in 2..n {
            u[(i, i)] = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        }
        ops.push(u.scale_real(w.sqrt()));
    }
    Ok((from_kraus(&KrausChannel::new(ops)?), rho))
}

/// Reversible chain: random stationary `p`, uniform proposals, Metropolis
/// acceptance `min(1, p_k/p_j)`.
pub fn metropolis_chain(n: usize, seed: Seed) -> Result<ClassicalChain> {
    if n < 2 {
        return Err(Error::InvalidParameter("need n ≥ 2".into()));
    }
    let mut rng = seed.rng();
    let p: Vec<f64> = simplex_point(n, &mut rng).into_iter().map(|x| 0.01 + 0.99 * x).collect();
    let total: f64 = p.iter().sum();
    let p: Vec<f64> = p.into_iter().map(|x| x / total).collect();
    let proposal = 1.0 / (n - 1) as f64;
    let mut gamma = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..n {
            if j != k {
                gamma[j][k] = proposal * (p[k] / p[j]).min(1.0);
            }
        }
        gamma[j][j] = 1.0 - gamma[j].iter().sum::<f64>();
    }
    ClassicalChain::new(p, gamma)
}

/// Deterministic rotation `j → j+1 mod n` with uniform `p`.
pub fn cycle_chain(n: usize) -> Result<ClassicalChain> {
    lazy_cycle_chain(n, 1.0)
}

/// Rotation taken with probability `rate`, otherwise stay. Violates detailed
/// balance by `rate/n`.
pub fn lazy_cycle_chain(n: usize, rate: f64) -> Result<ClassicalChain> {
    if n < 3 {
        return Err(Error::InvalidParameter("cycle needs n ≥ 3".into()));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameter(format!("rate must lie in (0, 1], got {rate}")));
    }
    let mut gamma = vec![vec![0.0; n]; n];
    for (j, row) in gamma.iter_mut().enumerate() {
        row[(j + 1) % n] = rate;
        row[j] = 1.0 - rate;
    }
    ClassicalChain::new(vec![1.0 / n as f64; n], gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::{
        check_db2_definition, check_db2_entangled, check_db2_modular, check_sqdb_definition,
        check_sqdb_entangled, classical_detailed_balance, run_report,
    };
    use crate::linalg::hermitian_eig;
    use crate::states::omega;
    use crate::superop::{is_completely_positive, is_unital};
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn det(m: &ComplexMatrix) -> C64 {
        // Gaussian elimination with partial pivoting.
        let n = m.dim();
        let mut a = m.clone();
        let mut d = ONE;
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm())).unwrap();
            if piv != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(piv, j)];
                    a[(piv, j)] = t;
                }
                d = -d;
            }
            d *= a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] / a[(col, col)];
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= f * v;
                }
            }
        }
        d
    }

    #[test]
    fn random_density_examples() {
        let rho = random_density(2, 0.1, Seed(1)).unwrap();
        let ev = rho.eigenvalues();
        assert!(ev.iter().all(|&x| (0.1..=0.9).contains(&x)));
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_eq!(random_density(3, 0.05, Seed(7)).unwrap(), random_density(3, 0.05, Seed(7)).unwrap());
        assert!(random_density(2, 0.6, Seed(1)).is_err());
        assert!(random_density(2, 0.0, Seed(1)).is_err());
        // Spectrum is a genuine eigen-decomposition of the user matrix.
        let rho = random_density(4, 0.02, Seed(2)).unwrap();
        let eig = hermitian_eig(&rho.user_matrix()).unwrap();
        for (a, b) in eig.eigenvalues.iter().zip(rho.eigenvalues()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn random_unitary_examples() {
        for n in [1, 2, 3, 4, 6] {
            let u = random_unitary(n, Seed(n as u64));
            assert!(u.unitary_residual() < 1e-12);
            assert_abs_diff_eq!(det(&u).norm(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(random_unitary(3, Seed(9)), random_unitary(3, Seed(9)));
        assert_ne!(random_unitary(3, Seed(9)), random_unitary(3, Seed(10)));
    }

    #[test]
    fn schur_examples() {
        let rho = random_density(3, 0.05, Seed(3)).unwrap();
        let ones = ComplexMatrix::from_real(3, &[1.0; 9]).unwrap();
        assert_eq!(schur_from_matrix(&ones).unwrap(), SuperOperator::identity(3));

        let dephase = schur_from_matrix(&ComplexMatrix::identity(3)).unwrap();
        let x = random_matrix(3, Seed(4));
        let out = dephase.apply(&x).unwrap();
        assert_eq!(out, ComplexMatrix::diag(&x.diagonal()));
        assert!(check_db2_definition(&dephase, &rho, &tol()).unwrap().passed);
        assert!(check_db2_modular(&dephase, &rho, &tol()).unwrap().passed);
        assert!(check_db2_entangled(&dephase, &rho, &tol()).unwrap().passed);

        for seed in 0..10 {
            let s = schur_db2_channel(&rho, Seed(seed)).unwrap();
            let r = check_db2_definition(&s, &rho, &tol()).unwrap();
            assert!(r.passed && r.residual <= 1e-10);
        }
    }

    #[test]
    fn gad_examples() {
        let k = gad_kraus(0.75, 0.2).unwrap();
        let v1 = &k.ops()[0];
        let v2 = &k.ops()[1];
        assert_abs_diff_eq!(v1[(0, 0)].re, 0.8f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v1[(1, 1)].re, 0.4f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v2[(0, 1)].re, 0.2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v2[(1, 0)].re, 0.6f64.sqrt(), epsilon = 1e-15);

        let (g, rho) = gad_sqdb_channel(0.75, 0.2).unwrap();
        let out = g.apply(&ComplexMatrix::unit(2, 0, 1)).unwrap();
        let expected = ComplexMatrix::from_real(2, &[0.0, 0.32f64.sqrt(), 0.12f64.sqrt(), 0.0]).unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-15);
        let th = ReversingOperation::transpose(2);
        assert!(check_sqdb_definition(&g, &rho, &th, &tol()).unwrap().residual <= 1e-10);

        let (id, rho) = gad_sqdb_channel(0.75, 0.0).unwrap();
        assert!(id.distance(&SuperOperator::identity(2)) < 1e-15);
        let r = run_report(&id, &rho, &th, &tol()).unwrap();
        assert!(r.db2() && r.sqdb());

        assert!(gad_sqdb_channel(0.4, 0.2).is_err());
        assert!(gad_sqdb_channel(0.75, 0.5).is_err());
        assert!(gad_sqdb_channel(1.0, 0.1).is_err());
        assert!(gad_sqdb_channel(0.75, 1.0 / 3.0).is_ok());
    }

    #[test]
    fn gad_defining_identities() {
        // ω[A⊗τ(B)] = ω[τ(A)⊗B] on the four pairs used to derive the family.
        let (g, rho) = gad_sqdb_channel(0.75, 0.2).unwrap();
        let e = |i, j| ComplexMatrix::unit(2, i, j);
        for (a, b) in [(e(0, 1), e(0, 1)), (e(0, 1), e(1, 0)), (e(0, 0), e(0, 0)), (e(0, 0), e(1, 1))] {
            let lhs = omega(&rho, &a, &g.apply(&b).unwrap()).unwrap();
            let rhs = omega(&rho, &g.apply(&a).unwrap(), &b).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn gad_status_over_parameters() {
        let th = ReversingOperation::transpose(2);
        for (p, s) in [(0.6, 0.3), (0.75, 0.2), (0.9, 0.05), (0.55, 0.8)] {
            let (g, rho) = gad_sqdb_channel(p, s).unwrap();
            assert!(check_sqdb_definition(&g, &rho, &th, &tol()).unwrap().passed);
            assert!(check_sqdb_entangled(&g, &rho, &th, &tol()).unwrap().passed);
            assert!(!check_db2_modular(&g, &rho, &tol()).unwrap().passed);
            let comm = modular_commutator(&g, &rho).unwrap();
            let (q, c, d) = (1.0 - p, s.sqrt(), (p * s / (1.0 - p)).sqrt());
            // Only E01 and E10 contribute, each with norm c·d·(p/q − q/p).
            assert_abs_diff_eq!(comm, c * d * (p / q - q / p) * 2f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn unital_channel_examples() {
        let k = random_unital_kraus(3, 1, Seed(5)).unwrap();
        assert!(k.ops()[0].unitary_residual() < 1e-12);

        let k = random_unital_kraus(2, 4, Seed(6)).unwrap();
        assert!(k.unital_residual() <= 1e-12);

        assert!(random_unital_kraus(2, 5, Seed(6)).is_err());
        assert!(random_unital_kraus(2, 0, Seed(6)).is_err());

        let rho = random_density(3, 0.05, Seed(7)).unwrap();
        let s = random_unital_channel(3, 3, Seed(8)).unwrap();
        let r = run_report(&s, &rho, &ReversingOperation::transpose(3), &tol()).unwrap();
        assert!(!r.db2() && !r.sqdb());
        assert!(r.db2_modular.residual > 1e-3 && r.sqdb_definition.residual > 1e-3);
    }

    #[test]
    fn pair_damping_preserves_state() {
        let rho = random_density(4, 0.05, Seed(9)).unwrap();
        let ev = rho.eigenvalues();
        let k = pair_damping(&rho, 0, 3, 0.5 * ev[3] / ev[0]).unwrap();
        let tau = from_kraus(&k);
        assert!(k.unital_residual() < 1e-14);
        assert!(trace_dual(&tau).act(&rho.matrix()).max_abs_diff(&rho.matrix()) < 1e-14);
        assert!(pair_damping(&rho, 1, 1, 0.1).is_err());
        assert!(pair_damping(&rho, 0, 3, 1.5 * ev[3] / ev[0]).is_err());
    }

    #[test]
    fn symmetrized_family_is_sqdb() {
        for seed in 0..6 {
            let n = 2 + seed as usize % 3;
            let rho = random_density(n, 0.05, Seed(10 + seed)).unwrap();
            let tau = symmetrized_sqdb_channel(&rho, Seed(20 + seed)).unwrap();
            assert!(is_completely_positive(&tau, &tol()).passed);
            assert!(is_unital(&tau, &tol()).passed);
            let th = ReversingOperation::transpose(n);
            let r = run_report(&tau, &rho, &th, &tol()).unwrap();
            assert!(r.sqdb() && r.sqdb_entangled.passed);
            assert!(!r.db2());
            assert!(r.consistency);
        }
    }

    #[test]
    fn degenerate_family() {
        for seed in 0..5 {
            let (s, rho) = degenerate_db2_channel(2 + seed as usize % 3, Seed(seed)).unwrap();
            assert!(rho.is_degenerate());
            let r = run_report(&s, &rho, &ReversingOperation::transpose(rho.dim()), &tol()).unwrap();
            assert!(r.db2() && r.consistency);
        }
    }

    #[test]
    fn chain_examples() {
        for seed in 0..5 {
            assert!(classical_detailed_balance(&metropolis_chain(4, Seed(seed)).unwrap(), &tol()).passed);
            assert!(classical_detailed_balance(&metropolis_chain(2, Seed(seed)).unwrap(), &tol()).passed);
        }
        let c = classical_detailed_balance(&cycle_chain(3).unwrap(), &tol());
        assert_abs_diff_eq!(c.residual, 1.0 / 3.0, epsilon = 1e-12);
        assert!(cycle_chain(2).is_err());
        assert!(metropolis_chain(1, Seed(0)).is_err());
    }

    #[test]
    fn determinism() {
        let rho = random_density(3, 0.05, Seed(11)).unwrap();
        assert_eq!(schur_db2_channel(&rho, Seed(12)).unwrap(), schur_db2_channel(&rho, Seed(12)).unwrap());
        assert_eq!(random_kraus(3, 2, Seed(13)), random_kraus(3, 2, Seed(13)));
        let th = ReversingOperation::transpose(3);
        let s = rho_preserving_channel(&rho, Seed(14)).unwrap();
        let a = run_report(&s, &rho, &th, &tol()).unwrap();
        let b = run_report(&s, &rho, &th, &tol()).unwrap();
        assert_eq!(a, b);
    }
}
