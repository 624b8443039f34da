//! Linear maps on `M_n` as `n²×n²` matrices.
//!
//! Vectorization is column stacking: `vec(X)[j·n + i] = X_ij`. With this
//! convention `vec(A X Bᵀ) = (B ⊗ A) vec(X)`, so the two-copy representation
//! `π(A⊗B)` has matrix `kron(B, A)` and a Kraus map `X ↦ Σ V X V†` has matrix
//! `Σ kron(conj V, V)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::balance::{CheckResult, Diagnostic, SubResidual};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian_part, ComplexMatrix, Tolerance, C64, I, ONE, ZERO};

/// Column-stacks `x`.
pub fn vectorize(x: &ComplexMatrix) -> Vec<C64> {
    let n = x.dim();
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(x[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[C64], n: usize) -> ComplexMatrix {
    assert_eq!(v.len(), n * n, "vector length must be n²");
    let mut x = ComplexMatrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            x[(i, j)] = v[j * n + i];
        }
    }
    x
}

/// Index of `E_ij` in the column-stacked basis.
#[inline]
pub fn stacked_index(n: usize, i: usize, j: usize) -> usize {
    j * n + i
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    n: usize,
    mat: ComplexMatrix,
}

impl SuperOperator {
    pub fn from_matrix(n: usize, mat: ComplexMatrix) -> Result<Self> {
        mat.check_dim(n * n)?;
        Ok(SuperOperator { n, mat })
    }

    pub fn identity(n: usize) -> Self {
        SuperOperator {
            n,
            mat: ComplexMatrix::identity(n * n),
        }
    }

    pub fn zero(n: usize) -> Self {
        SuperOperator {
            n,
            mat: ComplexMatrix::zeros(n * n),
        }
    }

    /// The transposition `X ↦ Xᵀ`.
    pub fn transpose_map(n: usize) -> Self {
        let mut mat = ComplexMatrix::zeros(n * n);
        for i in 0..n {
            for j in 0..n {
                mat[(stacked_index(n, j, i), stacked_index(n, i, j))] = ONE;
            }
        }
        SuperOperator { n, mat }
    }

    /// `X ↦ L X R`.
    pub fn sandwich(left: &ComplexMatrix, right: &ComplexMatrix) -> Result<Self> {
        pi_rep(left, &right.transpose())
    }

    /// `X ↦ tr(ρX) I` for any matrix `rho`.
    pub fn expectation_map(rho: &ComplexMatrix) -> Self {
        let n = rho.dim();
        let mut mat = ComplexMatrix::zeros(n * n);
        for k in 0..n {
            let row = stacked_index(n, k, k);
            for i in 0..n {
                for j in 0..n {
                    // tr(ρ E_ij) = ρ_ji
                    mat[(row, stacked_index(n, i, j))] = rho[(j, i)];
                }
            }
        }
        SuperOperator { n, mat }
    }

    /// Dimension `n` of the underlying matrix algebra `M_n`.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// The `n²×n²` representing matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.check_dim(self.n)?;
        Ok(self.act(x))
    }

    /// [`apply`](Self::apply) for inputs already known to have the right size.
    pub(crate) fn act(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = vectorize(x);
        let m = self.n * self.n;
        let mut out = vec![ZERO; m];
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.mat.as_slice()[r * m..(r + 1) * m];
            *o = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        unvectorize(&out, self.n)
    }

    /// Image of the matrix unit `E_ij`, read off a column.
    pub(crate) fn act_on_unit(&self, i: usize, j: usize) -> ComplexMatrix {
        let n = self.n;
        let col = stacked_index(n, i, j);
        let mut out = ComplexMatrix::zeros(n);
        for b in 0..n {
            for a in 0..n {
                out[(a, b)] = self.mat[(stacked_index(n, a, b), col)];
            }
        }
        out
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        other.mat.check_dim(self.n * self.n)?;
        Ok(SuperOperator {
            n: self.n,
            mat: &self.mat * &other.mat,
        })
    }

    /// k-fold composition; `power(0)` is the identity map.
    pub fn power(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = SuperOperator {
                n: self.n,
                mat: &acc.mat * &self.mat,
            };
        }
        acc
    }

    pub fn scale(&self, c: C64) -> Self {
        SuperOperator {
            n: self.n,
            mat: self.mat.scale(c),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        other.mat.check_dim(self.n * self.n)?;
        Ok(SuperOperator {
            n: self.n,
            mat: &self.mat + &other.mat,
        })
    }

    /// HS norm of the difference of the representing matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        self.mat.hs_distance(&other.mat)
    }

    /// `ᾱ(A) = α(Aᵀ)ᵀ`.
    pub fn transpose_conjugated(&self) -> Self {
        let t = Self::transpose_map(self.n);
        t.compose(self).unwrap().compose(&t).unwrap()
    }

    /// Expresses the map in the basis reached by `A ↦ V†AV`:
    /// `X ↦ V† α(V X V†) V`.
    pub fn change_basis(&self, v: &ComplexMatrix) -> Result<Self> {
        v.check_dim(self.n)?;
        let into = Self::sandwich(v, &v.adjoint())?;
        let back = Self::sandwich(&v.adjoint(), v)?;
        Ok(back.compose(self)?.compose(&into)?)
    }
}

/// `π(A⊗B): X ↦ A X Bᵀ`, with matrix `kron(B, A)`.
pub fn pi_rep(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<SuperOperator> {
    b.check_dim(a.dim())?;
    Ok(SuperOperator {
        n: a.dim(),
        mat: ComplexMatrix::kron(b, a),
    })
}

/// Kraus presentation `A ↦ Σ V_j A V_j†` of a completely positive map.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyKraus)?;
        let n = first.dim();
        for op in &ops {
            op.check_dim(n)?;
        }
        if ops.len() > n * n {
            return Err(Error::InvalidParameter(format!(
                "{} Kraus operators exceed n² = {}",
                ops.len(),
                n * n
            )));
        }
        Ok(KrausChannel { ops })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    /// Direct evaluation of the Kraus sum.
    pub fn apply_direct(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.check_dim(self.dim())?;
        let mut acc = ComplexMatrix::zeros(self.dim());
        for v in &self.ops {
            acc += &(&(v * x) * &v.adjoint());
        }
        Ok(acc)
    }

    /// `‖Σ V_j V_j† − I‖_HS`.
    pub fn unital_residual(&self) -> f64 {
        self.apply_direct(&ComplexMatrix::identity(self.dim()))
            .unwrap()
            .hs_distance(&ComplexMatrix::identity(self.dim()))
    }
}

/// Matrix `Σ_j kron(conj V_j, V_j)` of a Kraus map.
pub fn from_kraus(k: &KrausChannel) -> SuperOperator {
    let n = k.dim();
    let mut mat = ComplexMatrix::zeros(n * n);
    for v in k.ops() {
        mat += &ComplexMatrix::kron(&v.conj(), v);
    }
    SuperOperator { n, mat }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub n: usize,
    pub mat: ComplexMatrix,
}

/// `C = Σ_jk E_jk ⊗ α(E_jk)`.
pub fn choi(s: &SuperOperator) -> ChoiMatrix {
    let n = s.dim();
    let mut mat = ComplexMatrix::zeros(n * n);
    for j in 0..n {
        for k in 0..n {
            let img = s.act_on_unit(j, k);
            for a in 0..n {
                for b in 0..n {
                    mat[(j * n + a, k * n + b)] = img[(a, b)];
                }
            }
        }
    }
    ChoiMatrix { n, mat }
}

/// Choi's criterion: Hermitian Choi matrix with no eigenvalue below
/// `−psd_tol·max(1, λ_max)`.
pub fn is_completely_positive(s: &SuperOperator, tol: &Tolerance) -> CheckResult {
    let c = choi(s);
    let herm = c.mat.hermitian_residual();
    let eig = eig_hermitian_part(&c.mat);
    let (min, max) = (eig.min(), eig.max());
    let negativity = (-min).max(0.0) / max.max(1.0);
    CheckResult::from_parts(
        "completely_positive",
        tol,
        vec![
            SubResidual::new("choi_hermiticity", herm, tol.eq_tol),
            SubResidual::new("choi_negativity", negativity, tol.psd_tol),
        ],
    )
    .with_diagnostics(vec![
        Diagnostic::new("min_choi_eigenvalue", min),
        Diagnostic::new("max_choi_eigenvalue", max),
    ])
}

const POSITIVITY_RANDOM_PROBES: usize = 64;
const POSITIVITY_PROBE_SEED: u64 = 0x5eed_0f_9057;

/// Pure states fed to [`is_positive`]: the basis vectors, the four equal
/// superpositions of every pair of basis vectors, and a fixed pseudo-random
/// sample.
fn positivity_probes(n: usize) -> Vec<Vec<C64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut probes = Vec::new();
    for j in 0..n {
        let mut v = vec![ZERO; n];
        v[j] = ONE;
        probes.push(v);
    }
    for j in 0..n {
        for k in j + 1..n {
            for phase in [ONE, -ONE, I, -I] {
                let mut v = vec![ZERO; n];
                v[j] = C64::new(h, 0.0);
                v[k] = phase * h;
                probes.push(v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POSITIVITY_PROBE_SEED ^ n as u64);
    for _ in 0..POSITIVITY_RANDOM_PROBES {
        let mut v: Vec<C64> = (0..n)
            .map(|_| {
                C64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        probes.push(v);
    }
    probes
}

/// Sampled positivity test: applies the map to a fixed family of rank-one
/// projectors and checks every image is positive semidefinite. Passing is a
/// necessary condition for positivity, not a proof of it.
pub fn is_positive(s: &SuperOperator, tol: &Tolerance) -> CheckResult {
    let n = s.dim();
    let mut herm: f64 = 0.0;
    let mut negativity: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for v in positivity_probes(n) {
        let mut proj = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                proj[(i, j)] = v[i] * v[j].conj();
            }
        }
        let out = s.act(&proj);
        herm = herm.max(out.hermitian_residual());
        let eig = eig_hermitian_part(&out);
        min_eig = min_eig.min(eig.min());
        negativity = negativity.max((-eig.min()).max(0.0) / eig.max().max(1.0));
    }
    CheckResult::from_parts(
        "positive",
        tol,
        vec![
            SubResidual::new("image_hermiticity", herm, tol.eq_tol),
            SubResidual::new("image_negativity", negativity, tol.psd_tol),
        ],
    )
    .with_diagnostics(vec![Diagnostic::new("min_image_eigenvalue", min_eig)])
}

/// `‖α(I) − I‖_HS`.
pub fn is_unital(s: &SuperOperator, tol: &Tolerance) -> CheckResult {
    let id = ComplexMatrix::identity(s.dim());
    let res = s.act(&id).hs_distance(&id);
    CheckResult::from_parts("unital", tol, vec![SubResidual::new("unital", res, tol.eq_tol)])
}

/// Largest `‖α(E†) − α(E)†‖_HS` over matrix units `E`.
pub fn is_hermitian_map(s: &SuperOperator, tol: &Tolerance) -> CheckResult {
    let n = s.dim();
    let mut res: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = s.act_on_unit(j, i);
            let rhs = s.act_on_unit(i, j).adjoint();
            res = res.max(lhs.hs_distance(&rhs));
        }
    }
    CheckResult::from_parts(
        "hermitian_map",
        tol,
        vec![SubResidual::new("hermiticity", res, tol.eq_tol)],
    )
}
