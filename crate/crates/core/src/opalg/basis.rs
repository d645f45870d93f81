use faer::{Col, MatRef};

use super::{c64, Operator, ZERO};
use crate::error::{Error, Result};

/// Hilbert–Schmidt orthonormal family of operators on a `dim_space`
/// dimensional Hilbert space, stored as contiguous vectorized columns.
#[derive(Clone, Debug)]
pub struct HSBasis {
    dim_space: usize,
    len: usize,
    data: Vec<c64>,
}

/// Outcome of one [`HSBasis::orthonormalize_extend`] call.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extension {
    pub accepted: bool,
    /// HS norm of the component orthogonal to the span, after two passes.
    pub residual: f64,
    /// Acceptance threshold that was compared against `residual`.
    pub threshold: f64,
}

impl HSBasis {
    pub fn new(dim_space: usize) -> Self {
        assert!(dim_space >= 1);
        Self { dim_space, len: 0, data: Vec::new() }
    }

    pub fn dim_space(&self) -> usize {
        self.dim_space
    }

    /// Dimension of the full operator space, `d²`.
    pub fn full_dim(&self) -> usize {
        self.dim_space * self.dim_space
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn vector(&self, i: usize) -> Operator {
        let n = self.full_dim();
        Operator::from_vectorized(self.dim_space, &self.data[i * n..(i + 1) * n]).expect("basis column has d² entries")
    }

    pub fn vectors(&self) -> Vec<Operator> {
        (0..self.len).map(|i| self.vector(i)).collect()
    }

    fn columns(&self) -> MatRef<'_, c64> {
        MatRef::from_column_major_slice(&self.data, self.full_dim(), self.len)
    }

    /// Removes the span component from `v` in place (one classical GS pass).
    fn project_out(&self, v: &mut Col<c64>) {
        if self.len == 0 {
            return;
        }
        let q = self.columns();
        let coeffs = q.adjoint() * &*v;
        *v -= q * coeffs;
    }

    /// HS distance from `op` to the span of the basis.
    pub fn residual_norm(&self, op: &Operator) -> Result<f64> {
        self.check_dim(op)?;
        let flat = op.vectorize();
        let mut v = Col::from_fn(self.full_dim(), |k| flat[k]);
        self.project_out(&mut v);
        self.project_out(&mut v);
        Ok(v.norm_l2())
    }

    fn check_dim(&self, op: &Operator) -> Result<()> {
        if op.dim() != self.dim_space {
            return Err(Error::DimensionMismatch { expected: self.dim_space, found: op.dim() });
        }
        Ok(())
    }

    /// Projects `candidate` onto the orthogonal complement of the span (two
    /// Gram–Schmidt passes) and appends the normalized residual when its norm
    /// exceeds `tol · (1 + ‖candidate‖_HS)`.
    pub fn orthonormalize_extend(&mut self, candidate: &Operator, tol: f64) -> Result<Extension> {
        self.check_dim(candidate)?;
        candidate.ensure_finite("basis candidate")?;
        let vec = candidate.vectorize();
        self.extend_vectorized(&vec, tol)
    }

    pub(crate) fn extend_vectorized(&mut self, vec: &[c64], tol: f64) -> Result<Extension> {
        let n = self.full_dim();
        debug_assert_eq!(vec.len(), n);
        let mut v = Col::from_fn(n, |k| vec[k]);
        let norm = v.norm_l2();
        if !norm.is_finite() {
            return Err(Error::NonFinite("basis candidate".into()));
        }
        let threshold = tol * (1.0 + norm);
        if self.len >= n {
            return Ok(Extension { accepted: false, residual: 0.0, threshold });
        }
        self.project_out(&mut v);
        self.project_out(&mut v);
        let residual = v.norm_l2();
        if residual <= threshold {
            return Ok(Extension { accepted: false, residual, threshold });
        }
        let inv = 1.0 / residual;
        self.data.reserve(n);
        self.data.extend(v.iter().map(|z| *z * inv));
        self.len += 1;
        Ok(Extension { accepted: true, residual, threshold })
    }

    /// Largest entry of `|G − I|` where `G` is the Gram matrix.
    pub fn gram_deviation(&self) -> f64 {
        if self.len == 0 {
            return 0.0;
        }
        let q = self.columns();
        let gram = q.adjoint() * q;
        let mut worst = 0.0f64;
        for j in 0..self.len {
            for i in 0..self.len {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - c64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Coordinates of `op` in the basis (`⟨B_i, op⟩`).
    pub fn coordinates(&self, op: &Operator) -> Result<Vec<c64>> {
        self.check_dim(op)?;
        let v = op.vectorize();
        let n = self.full_dim();
        Ok((0..self.len)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(&v).fold(ZERO, |acc, (b, x)| acc + b.conj() * x))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{pauli_to_operator, PauliLetter, PauliTerm, ONE};
    use proptest::prelude::*;

    fn sz() -> Operator {
        pauli_to_operator(&[PauliTerm::single(ONE, 1, PauliLetter::Z).unwrap()], 1).unwrap()
    }

    #[test]
    fn identity_already_in_span() {
        let mut b = HSBasis::new(2);
        let half = Operator::identity(2).scaled(c64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        assert!(b.orthonormalize_extend(&half, 1e-10).unwrap().accepted);
        let ext = b.orthonormalize_extend(&Operator::identity(2), 1e-10).unwrap();
        assert!(!ext.accepted);
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn orthogonal_direction_is_accepted() {
        let mut b = HSBasis::new(2);
        b.orthonormalize_extend(&Operator::identity(2), 1e-10).unwrap();
        assert!(b.orthonormalize_extend(&sz(), 1e-10).unwrap().accepted);
        assert_eq!(b.len(), 2);
        assert!(b.gram_deviation() < 1e-14);
    }

    #[test]
    fn full_basis_rejects_everything() {
        let mut b = HSBasis::new(2);
        for k in 0..4 {
            let e = Operator::from_fn(2, |i, j| if i * 2 + j == k { ONE } else { ZERO });
            assert!(b.orthonormalize_extend(&e, 1e-10).unwrap().accepted);
        }
        let any = Operator::from_fn(2, |i, j| c64::new(i as f64 + 0.3, j as f64 - 1.0));
        assert!(!b.orthonormalize_extend(&any, 1e-10).unwrap().accepted);
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn rejects_non_finite_and_wrong_dim() {
        let mut b = HSBasis::new(2);
        let bad = Operator::from_fn(2, |_, _| c64::new(f64::INFINITY, 0.0));
        assert!(matches!(b.orthonormalize_extend(&bad, 1e-10), Err(Error::NonFinite(_))));
        assert!(b.orthonormalize_extend(&Operator::identity(4), 1e-10).is_err());
    }

    #[test]
    fn coordinates_reconstruct() {
        let mut b = HSBasis::new(2);
        b.orthonormalize_extend(&Operator::identity(2), 1e-10).unwrap();
        b.orthonormalize_extend(&sz(), 1e-10).unwrap();
        let target = Operator::diagonal(&[c64::new(3.0, 0.0), c64::new(-1.0, 2.0)]);
        let coords = b.coordinates(&target).unwrap();
        let rebuilt = b.vectors().iter().zip(&coords).fold(Operator::zeros(2), |acc, (v, c)| &acc + &v.scaled(*c));
        assert!((&rebuilt - &target).hs_norm() < 1e-13);
        assert!(b.residual_norm(&target).unwrap() < 1e-13);
    }

    proptest! {
        #[test]
        fn gram_stays_orthonormal(entries in proptest::collection::vec(-1.0..1.0f64, 2 * 16 * 24)) {
            let tol = 1e-10;
            let mut b = HSBasis::new(4);
            for chunk in entries.chunks(32) {
                // Low-rank-ish candidates: many are near-dependent once the basis fills up.
                let op = Operator::from_fn(4, |i, j| c64::new(chunk[i * 4 + j], chunk[16 + i * 4 + j]));
                b.orthonormalize_extend(&op, tol).unwrap();
            }
            prop_assert!(b.len() <= 16);
            prop_assert!(b.gram_deviation() <= 10.0 * tol);
        }
    }
}
