//! Dense complex Hermitian linear algebra primitives.
//!
//! Everything downstream (lifted SDPs, the rank-one penalty, the spectral
//! subgradient) works on small dense Hermitian matrices, so this module
//! fixes one representation ([`HermitianMatrix`], symmetrized on
//! construction) and a handful of spectral operations on it. The
//! eigendecomposition itself is delegated to nalgebra's Hermitian
//! eigensolver; results are re-sorted into descending eigenvalue order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

/// Double-precision complex scalar used throughout the crate.
pub type C64 = Complex<f64>;
/// Dense complex column vector.
pub type CVector = DVector<C64>;
/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;

/// Hermitian tolerance absorbed by symmetrization on construction.
const HERMITIAN_TOL: f64 = 1e-12;
/// A matrix is rejected as "not PSD" when its largest eigenvalue is below
/// this (i.e. it is decisively negative definite).
const PSD_REJECT_TOL: f64 = -1e-10;

/// Dense complex Hermitian matrix.
///
/// Construction symmetrizes the input as `(A + A^H) / 2` so downstream
/// spectral routines always see exact Hermitian structure, and rejects
/// non-finite entries or inputs farther than `1e-12` (relative) from
/// Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: CMatrix,
}

impl HermitianMatrix {
    /// Build from a square complex matrix, symmetrizing to absorb round-off.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidInput("matrix dimension must be >= 1".into()));
        }
        if !mat.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let herm = (&mat + mat.adjoint()).scale(0.5);
        let asym = (&mat - &herm).norm();
        let scale = herm.norm().max(1.0);
        if asym > HERMITIAN_TOL * scale * (mat.nrows() as f64) {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (asymmetry {asym:.3e} at scale {scale:.3e})"
            )));
        }
        Ok(Self { mat: herm })
    }

    /// Symmetrize without the Hermitian-closeness check. Used internally on
    /// iterates that are Hermitian by construction up to round-off.
    pub(crate) fn symmetrize(mat: CMatrix) -> Result<Self> {
        if !mat.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let herm = (&mat + mat.adjoint()).scale(0.5);
        Ok(Self { mat: herm })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    /// Rank-one outer product `v v^H`.
    pub fn from_outer(v: &CVector) -> Self {
        Self {
            mat: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    /// Trace; real for Hermitian matrices.
    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mat: self.mat.scale(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
        }
    }
}

/// Hermitian inner product `<A, B> = Tr(A^H B)`, real for Hermitian inputs.
pub fn herm_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.as_matrix()
        .iter()
        .zip(b.as_matrix().iter())
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .re
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues sorted
/// descending, paired with the columns of a unitary eigenvector matrix.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    /// Eigenvalues in descending order.
    pub eigenvalues: DVector<f64>,
    /// `eigenvectors.column(i)` pairs with `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl EigDecomposition {
    /// Reassemble `U diag(f(lambda)) U^H` with the eigenvalues mapped
    /// through `f`.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for i in 0..n {
            let s = C64::new(f(self.eigenvalues[i]), 0.0);
            scaled.column_mut(i).scale_mut(1.0);
            for r in 0..n {
                scaled[(r, i)] *= s;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigendecomposition with descending eigenvalue order.
pub fn eigh(a: &HermitianMatrix) -> Result<EigDecomposition> {
    if !a.as_matrix().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput("eigh: non-finite entries".into()));
    }
    let n = a.dim();
    let se = a.as_matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        se.eigenvalues[j]
            .partial_cmp(&se.eigenvalues[i])
            .expect("finite eigenvalues")
    });
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral norm of a (near-)PSD Hermitian matrix: its largest eigenvalue,
/// clamped to zero from below. Rejects decisively negative definite input.
pub fn spectral_norm(a: &HermitianMatrix) -> Result<f64> {
    let eig = eigh(a)?;
    let lambda_max = eig.eigenvalues[0];
    if lambda_max < PSD_REJECT_TOL {
        return Err(Error::InvalidInput(format!(
            "spectral_norm expects a PSD matrix, largest eigenvalue {lambda_max:.3e}"
        )));
    }
    Ok(lambda_max.max(0.0))
}

/// Frobenius-nearest PSD matrix: clamp negative eigenvalues to zero.
pub fn psd_project(s: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = eigh(s)?;
    if eig.eigenvalues[eig.eigenvalues.len() - 1] >= 0.0 {
        return Ok(s.clone());
    }
    let projected = eig.reassemble(|lambda| lambda.max(0.0));
    HermitianMatrix::symmetrize(projected)
}

/// Subgradient of the spectral norm at a PSD matrix: `v1 v1^H` for a
/// unit-norm leading eigenvector `v1`. Rank one, trace one, PSD.
pub fn spectral_subgradient(x: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = eigh(x)?;
    let v1 = eig.eigenvectors.column(0).into_owned();
    Ok(HermitianMatrix::from_outer(&v1))
}

/// Scaled leading eigenvector `u = sqrt(lambda_1) v1`, the rank-one factor
/// with `u u^H = X` whenever `X` is exactly rank one.
///
/// The factor is rotated so its largest-magnitude entry is real
/// nonnegative, fixing the free global phase.
pub fn leading_rank1_factor(x: &HermitianMatrix) -> Result<CVector> {
    let eig = eigh(x)?;
    let lambda = eig.eigenvalues[0].max(0.0);
    let mut u = eig.eigenvectors.column(0).into_owned();
    u.scale_mut(lambda.sqrt());
    Ok(canonicalize_phase(u))
}

/// Rotate a vector by a global phase so its largest-magnitude entry is real
/// nonnegative.
pub fn canonicalize_phase(mut v: CVector) -> CVector {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best] / C64::new(best_mag.sqrt(), 0.0);
        let rot = phase.conj();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
    v
}
