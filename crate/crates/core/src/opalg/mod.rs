//! Dense operators on a `d`-dimensional Hilbert space and the kernels built on them.
//!
//! Every operator in the crate (Hamiltonians, jump operators, density matrices,
//! symmetry unitaries) is an [`Operator`]: a square complex matrix stored
//! column-major. Column-major storage makes the flattened entries coincide with
//! the column-stacking vectorization `vec(ρ)[i + j d] = ρ[i, j]` used by the
//! Liouvillian.
//!
//! Hilbert–Schmidt geometry is unnormalized: `⟨A, B⟩ = Tr(A† B)`.

mod basis;
mod fermion;
mod pauli;

use std::ops::{Add, Mul, Neg, Sub};

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

pub use basis::{Extension, HSBasis};
pub use faer::c64;
pub use fermion::{hopping_terms, jordan_wigner, jordan_wigner_terms, FermionOp};
pub use pauli::{pauli_to_operator, PauliLetter, PauliTerm};

pub(crate) const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub(crate) const I: c64 = c64 { re: 0.0, im: 1.0 };

/// A square complex matrix acting on a `dim`-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: Mat<c64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { mat: Mat::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { mat: Mat::identity(dim, dim) }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> c64) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { mat: Mat::from_fn(dim, dim, f) }
    }

    pub fn diagonal(entries: &[c64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// Builds an operator from `dim²` entries listed row by row.
    pub fn from_row_major(dim: usize, entries: &[c64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("operator dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let op = Self::from_fn(dim, |i, j| entries[i * dim + j]);
        op.ensure_finite("operator entries")?;
        Ok(op)
    }

    /// Inverse of [`Operator::vectorize`].
    pub fn from_vectorized(dim: usize, v: &[c64]) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: v.len() });
        }
        Ok(Self::from_fn(dim, |i, j| v[i + j * dim]))
    }

    pub fn from_mat(mat: Mat<c64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::Validation(format!(
                "operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.mat[(row, col)]
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn to_row_major(&self) -> Vec<c64> {
        let d = self.dim();
        (0..d * d).map(|k| self.mat[(k / d, k % d)]).collect()
    }

    /// Column-stacking vectorization.
    pub fn vectorize(&self) -> Vec<c64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for j in 0..d {
            out.extend_from_slice(self.mat.col_as_slice(j));
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint().to_owned() }
    }

    pub fn transpose(&self) -> Self {
        Self { mat: self.mat.transpose().to_owned() }
    }

    pub fn conj(&self) -> Self {
        Self { mat: self.mat.conjugate().to_owned() }
    }

    pub fn scaled(&self, z: c64) -> Self {
        Self { mat: Mat::from_fn(self.dim(), self.dim(), |i, j| z * self.mat[(i, j)]) }
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    /// `‖A‖_HS = sqrt(Tr A†A)`.
    pub fn hs_norm(&self) -> f64 {
        self.mat.norm_l2()
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Operator) -> Operator {
        &(self * other) + &(other * self)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Operator {
        let (da, db) = (self.dim(), other.dim());
        Self::from_fn(da * db, |r, c| self.mat[(r / db, c / db)] * other.mat[(r % db, c % db)])
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Operator {
        Self { mat: Mat::from_fn(self.dim(), self.dim(), |i, j| (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5) }
    }

    pub fn is_finite(&self) -> bool {
        let d = self.dim();
        (0..d).all(|j| self.mat.col_as_slice(j).iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub(crate) fn ensure_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }

    /// `‖A − A†‖_HS ≤ tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.mat - self.mat.adjoint()).norm_l2() <= tol
    }

    /// `‖A†A − I‖_HS ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        (self.mat.adjoint() * &self.mat - Mat::<c64>::identity(d, d)).norm_l2()
    }

    /// Hermitian within `tol` and no eigenvalue below `−tol`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match self.hermitian_part().eigenvalues_hermitian() {
            Ok(ev) => ev.first().is_none_or(|&m| m >= -tol),
            Err(_) => false,
        }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        self.ensure_finite("Hermitian eigenproblem input")?;
        self.mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("Hermitian eigensolver: {e:?}")))
    }

    /// Eigen-decomposition of a Hermitian operator: ascending eigenvalues and
    /// the matching orthonormal eigenvectors as columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, Mat<c64>)> {
        self.ensure_finite("Hermitian eigenproblem input")?;
        let herm = self.hermitian_part();
        let evd = herm
            .mat
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("Hermitian eigensolver: {e:?}")))?;
        let values = evd.S().column_vector().iter().map(|z| z.re).collect();
        Ok((values, evd.U().to_owned()))
    }
}

impl From<Operator> for Mat<c64> {
    fn from(op: Operator) -> Self {
        op.mat
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { mat: &self.mat * &rhs.mat }
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { mat: &self.mat - &rhs.mat }
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scaled(-ONE)
    }
}

impl Mul<c64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: c64) -> Operator {
        self.scaled(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: f64) -> Operator {
        self.scaled(c64::new(rhs, 0.0))
    }
}

/// Hilbert–Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<c64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let d = a.dim();
    let mut acc = ZERO;
    for j in 0..d {
        let (ca, cb) = (a.mat.col_as_slice(j), b.mat.col_as_slice(j));
        for (x, y) in ca.iter().zip(cb) {
            acc += x.conj() * y;
        }
    }
    Ok(acc)
}

/// Sum of a non-empty list of equally sized operators.
pub fn sum_operators<'a>(ops: impl IntoIterator<Item = &'a Operator>, dim: usize) -> Operator {
    ops.into_iter().fold(Operator::zeros(dim), |acc, op| &acc + op)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> Operator {
        Operator::from_row_major(2, &[ZERO, ONE, ONE, ZERO]).unwrap()
    }
    fn sigma_y() -> Operator {
        Operator::from_row_major(2, &[ZERO, -I, I, ZERO]).unwrap()
    }
    fn sigma_z() -> Operator {
        Operator::diagonal(&[ONE, -ONE])
    }

    #[test]
    fn hs_inner_examples() {
        let id = Operator::identity(2);
        assert_eq!(hs_inner(&id, &id).unwrap(), c64::new(2.0, 0.0));
        assert_eq!(hs_inner(&sigma_x(), &sigma_y()).unwrap(), ZERO);
        assert_eq!(hs_inner(&sigma_z(), &sigma_z()).unwrap(), c64::new(2.0, 0.0));
    }

    #[test]
    fn hs_inner_rejects_mismatched_dims() {
        let err = hs_inner(&Operator::identity(2), &Operator::identity(4)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric() {
        let a = Operator::from_fn(3, |i, j| c64::new(i as f64 - 0.5 * j as f64, (i * j) as f64));
        let b = Operator::from_fn(3, |i, j| c64::new((i + 2 * j) as f64, 1.0 - i as f64));
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-14);
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let a = Operator::from_fn(2, |i, j| c64::new((10 * i + j) as f64, 0.0));
        let v = a.vectorize();
        assert_eq!(v[1], c64::new(10.0, 0.0)); // (1, 0)
        assert_eq!(v[2], c64::new(1.0, 0.0)); // (0, 1)
        assert_eq!(Operator::from_vectorized(2, &v).unwrap(), a);
    }

    #[test]
    fn row_major_round_trip_and_validation() {
        let a = sigma_y();
        assert_eq!(Operator::from_row_major(2, &a.to_row_major()).unwrap(), a);
        assert!(Operator::from_row_major(2, &[ONE; 3]).is_err());
        let nan = c64::new(f64::NAN, 0.0);
        assert!(matches!(Operator::from_row_major(1, &[nan]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn predicates() {
        assert!(sigma_y().is_hermitian(1e-14));
        assert!(sigma_y().is_unitary(1e-14));
        assert!(!sigma_z().is_positive_semidefinite(1e-12));
        let p = Operator::diagonal(&[ONE, ZERO]);
        assert!(p.is_positive_semidefinite(1e-12));
        assert!(!p.is_unitary(1e-12));
        let raising = Operator::from_row_major(2, &[ZERO, ONE, ZERO, ZERO]).unwrap();
        assert!(!raising.is_hermitian(1e-12));
    }

    #[test]
    fn pauli_products() {
        // σx σy = i σz
        let xy = &sigma_x() * &sigma_y();
        assert!((&xy - &sigma_z().scaled(I)).hs_norm() < 1e-15);
        assert!(sigma_x().anticommutator(&sigma_y()).hs_norm() < 1e-15);
        let c = sigma_x().commutator(&sigma_y());
        assert!((&c - &sigma_z().scaled(I * 2.0)).hs_norm() < 1e-15);
    }

    #[test]
    fn kron_matches_block_structure() {
        let zx = sigma_z().kron(&sigma_x());
        assert_eq!(zx.dim(), 4);
        assert_eq!(zx.get(0, 1), ONE);
        assert_eq!(zx.get(2, 3), -ONE);
        assert_eq!(zx.get(0, 2), ZERO);
    }

    #[test]
    fn eigh_reconstructs() {
        let h = Operator::from_fn(3, |i, j| {
            let z = c64::new((i + j) as f64, i as f64 - j as f64);
            if i == j {
                c64::new(z.re, 0.0)
            } else {
                z
            }
        });
        let (vals, vecs) = h.eigh().unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let diag = Mat::from_fn(3, 3, |i, j| if i == j { c64::new(vals[i], 0.0) } else { ZERO });
        let back = &vecs * &diag * vecs.adjoint();
        assert!((back - h.as_mat()).norm_l2() < 1e-12);
    }
}
