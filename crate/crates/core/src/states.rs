//! Density matrices held in their eigenbasis, purifications `r = ρ^{1/2}W`,
//! the entangled two-copy functional `ω_r(A⊗B) = tr(r†ArBᵀ)` and the
//! classically correlated comparison state `θ`.
//!
//! Every matrix handed to the functions in this module (and in the modules
//! built on it) is expressed in the *working basis*, the basis in which `ρ` is
//! diagonal. Transposes and complex conjugates are taken in that basis.

use crate::balance::{CheckResult, SubResidual};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, pow_positive, ComplexMatrix, Tolerance, C64, ZERO};

/// Adjacent eigenvalues closer than this mark a density matrix as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

const UNITARY_TOL: f64 = 1e-12;

/// Invertible density matrix stored as its spectrum plus the unitary that
/// carries the user basis to the working basis: `ρ_user = V diag(ρ) V†`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    diag: Vec<f64>,
    basis: ComplexMatrix,
    degenerate: bool,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Eigenvalues `ρ_1 ≥ … ≥ ρ_n > 0`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.diag
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Builds a density matrix from a spectrum and an eigenbasis. The
    /// spectrum is sorted descending and the basis columns permuted to match.
    pub fn from_spectrum(values: &[f64], basis: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::NotDensity("empty spectrum".into()));
        }
        basis.check_dim(n)?;
        let residual = basis.unitary_residual();
        if residual > UNITARY_TOL * (n as f64) {
            return Err(Error::NonUnitary { residual });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let trace: f64 = values.iter().sum();
        if (trace - 1.0).abs() > tol.eq_tol {
            return Err(Error::NotDensity(format!("trace is {trace}, expected 1")));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -tol.psd_tol {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
        }
        if min <= tol.inv_tol {
            return Err(Error::NotInvertible { min_eigenvalue: min });
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let diag: Vec<f64> = order.iter().map(|&k| values[k]).collect();
        let basis = if order.iter().enumerate().all(|(i, &k)| i == k) {
            basis
        } else {
            let mut permuted = ComplexMatrix::zeros(n);
            for (col, &k) in order.iter().enumerate() {
                for i in 0..n {
                    permuted[(i, col)] = basis[(i, k)];
                }
            }
            permuted
        };
        let degenerate = diag.windows(2).any(|w| w[0] - w[1] < DEGENERACY_GAP);
        Ok(DensityMatrix {
            diag,
            basis,
            degenerate,
        })
    }

    /// Density matrix that is diagonal in the user basis.
    pub fn from_diagonal(values: &[f64], tol: &Tolerance) -> Result<Self> {
        Self::from_spectrum(values, ComplexMatrix::identity(values.len()), tol)
    }

    /// `diag(ρ_1, …, ρ_n)` in the working basis.
    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::diag_real(&self.diag)
    }

    /// `ρ^z` in the working basis (principal branch).
    pub fn power(&self, z: C64) -> ComplexMatrix {
        let vals: Vec<C64> = self.diag.iter().map(|&l| pow_positive(l, z)).collect();
        ComplexMatrix::diag(&vals)
    }

    pub fn power_real(&self, z: f64) -> ComplexMatrix {
        self.power(C64::new(z, 0.0))
    }

    /// `ρ` expressed in the user basis.
    pub fn user_matrix(&self) -> ComplexMatrix {
        self.from_working(&self.matrix())
    }

    /// `V† a V`: user basis to working basis.
    pub fn to_working(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.basis.adjoint() * a) * &self.basis
    }

    /// `V a V†`: working basis to user basis.
    pub fn from_working(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.basis * a) * &self.basis.adjoint()
    }
}

/// Validates and diagonalizes a user-supplied density matrix.
pub fn make_density(input: &ComplexMatrix, tol: &Tolerance) -> Result<DensityMatrix> {
    let herm = input.hermitian_residual();
    if herm > tol.eq_tol {
        return Err(Error::NotDensity(format!(
            "not Hermitian (relative residual {herm:e})"
        )));
    }
    let trace = input.trace();
    if (trace - C64::new(1.0, 0.0)).norm() > tol.eq_tol {
        return Err(Error::NotDensity(format!(
            "trace is {}{:+}i, expected 1",
            trace.re, trace.im
        )));
    }
    let eig = hermitian_eig(&input.hermitian_part())?;
    DensityMatrix::from_spectrum(&eig.eigenvalues, eig.eigenvectors, tol)
}

/// `⟨A⟩ = tr(ρA)` with `a` in the working basis.
pub fn expectation(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<C64> {
    a.check_dim(rho.dim())?;
    Ok(rho
        .diag
        .iter()
        .enumerate()
        .map(|(j, &p)| a[(j, j)] * p)
        .sum())
}

/// A purification `r` with `rr† = ρ`, written `r = ρ^{1/2}W`.
#[derive(Clone, Debug)]
pub struct Purification {
    rho: DensityMatrix,
    r: ComplexMatrix,
    w: ComplexMatrix,
}

impl Purification {
    pub fn r(&self) -> &ComplexMatrix {
        &self.r
    }

    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    /// True when `W = I`, i.e. `r = ρ^{1/2}` and both marginals equal `ρ`.
    pub fn is_symmetric(&self) -> bool {
        self.w == ComplexMatrix::identity(self.w.dim())
    }
}

/// `r = ρ^{1/2}W` for a unitary `W`.
pub fn purify(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<Purification> {
    w.check_dim(rho.dim())?;
    let residual = w.unitary_residual();
    if residual > UNITARY_TOL {
        return Err(Error::NonUnitary { residual });
    }
    Ok(Purification {
        rho: rho.clone(),
        r: &rho.power_real(0.5) * w,
        w: w.clone(),
    })
}

/// `tr(X Bᵀ) = Σ_ij X_ij B_ij`.
fn trace_with_transpose(x: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    x.as_slice().iter().zip(b.as_slice()).map(|(p, q)| p * q).sum()
}

/// `ω_r(A⊗B) = tr(r†ArBᵀ)` on an elementary tensor.
pub fn omega_eval(p: &Purification, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    omega_r(&p.r, a, b)
}

/// `tr(r†ArBᵀ)` for an arbitrary vector `r` of the two-copy space.
pub fn omega_r(r: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let n = r.dim();
    a.check_dim(n)?;
    b.check_dim(n)?;
    let x = &(&r.adjoint() * a) * r;
    Ok(trace_with_transpose(&x, b))
}

/// `ω(A⊗B) = tr(ρ^{1/2}Aρ^{1/2}Bᵀ)` for the symmetric purification, using
/// that `ρ` is diagonal: `Σ_ij √ρ_i √ρ_j A_ij B_ij`.
pub fn omega(rho: &DensityMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let n = rho.dim();
    a.check_dim(n)?;
    b.check_dim(n)?;
    let s: Vec<f64> = rho.diag.iter().map(|p| p.sqrt()).collect();
    Ok(omega_with_roots(&s, a, b))
}

pub(crate) fn omega_with_roots(sqrt_rho: &[f64], a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = sqrt_rho.len();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(i, j)] * (sqrt_rho[i] * sqrt_rho[j]);
        }
    }
    acc
}

/// The separable state `θ(C) = tr(ρ^{(2)}C)` with
/// `ρ^{(2)} = Σ_j ρ_j |e_j⊗e_j⟩⟨e_j⊗e_j|`.
#[derive(Clone, Debug)]
pub struct DiagonalCorrelatedState {
    pub rho: DensityMatrix,
}

impl DiagonalCorrelatedState {
    pub fn new(rho: DensityMatrix) -> Self {
        DiagonalCorrelatedState { rho }
    }
}

/// `θ(A⊗B) = Σ_j ρ_j A_jj B_jj`.
pub fn theta_eval(s: &DiagonalCorrelatedState, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let n = s.rho.dim();
    a.check_dim(n)?;
    b.check_dim(n)?;
    Ok(s.rho
        .diag
        .iter()
        .enumerate()
        .map(|(j, &p)| a[(j, j)] * b[(j, j)] * p)
        .sum())
}

/// Compares both reduced states of `ω_r` with `⟨·⟩` over all matrix units.
pub fn marginals_check(p: &Purification, tol: &Tolerance) -> CheckResult {
    let n = p.rho.dim();
    let id = ComplexMatrix::identity(n);
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    for (_, _, e) in ComplexMatrix::units(n) {
        let expected = expectation(&p.rho, &e).expect("dimensions agree");
        let left = omega_eval(p, &e, &id).expect("dimensions agree");
        let right = omega_eval(p, &id, &e).expect("dimensions agree");
        first = first.max((left - expected).norm());
        second = second.max((right - expected).norm());
    }
    CheckResult::from_parts(
        "marginals",
        tol,
        vec![
            SubResidual::new("first_marginal", first, tol.eq_tol),
            SubResidual::new("second_marginal", second, tol.eq_tol),
        ],
    )
}
