//! Strong symmetries and their eigenspace sectors.
//!
//! A unitary `S` is a strong symmetry when it commutes with `H` and with
//! every jump operator. The generator then maps each block `P_α ρ P_β`
//! (eigenprojections of `S`) into itself, and each diagonal block carries its
//! own Lindbladian built from the restricted operators.

use std::f64::consts::TAU;

use faer::Mat;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouvillian::Lindbladian;
use crate::opalg::{c64, Operator, ZERO};

/// Eigenvalues of `S` closer than this on the unit circle share a sector.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// `‖[S, X]‖_HS` below this (relative to `max(1, ‖X‖)`) counts as commuting.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

/// Largest leakage between blocks accepted by [`verify_invariant_blocks`].
pub const BLOCK_LEAKAGE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryCheck {
    pub holds: bool,
    pub unitarity_defect: f64,
    pub hamiltonian_commutator: f64,
    pub jump_commutators: Vec<f64>,
    pub tol: f64,
}

fn relative_commutator(s: &Operator, x: &Operator) -> f64 {
    s.commutator(x).hs_norm() / x.hs_norm().max(1.0)
}

/// Measures `‖[S, H]‖` and `‖[S, L_m]‖`. Fails only if `S` is not unitary or
/// has the wrong dimension; a non-commuting `S` is reported, not an error.
pub fn verify_strong_symmetry(s: &Operator, l: &Lindbladian, tol: f64) -> Result<SymmetryCheck> {
    if s.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: s.dim() });
    }
    let unitarity_defect = s.unitarity_defect();
    if unitarity_defect > DEFAULT_CLUSTER_TOL {
        return Err(Error::NotUnitary { deviation: unitarity_defect });
    }
    let hamiltonian_commutator = relative_commutator(s, l.hamiltonian());
    let jump_commutators: Vec<f64> = l.jumps().iter().map(|j| relative_commutator(s, j)).collect();
    let holds = hamiltonian_commutator <= tol && jump_commutators.iter().all(|&c| c <= tol);
    Ok(SymmetryCheck { holds, unitarity_defect, hamiltonian_commutator, jump_commutators, tol })
}

/// Orthonormal eigenspaces of a unitary, ordered by eigenphase in `[0, 2π)`.
#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    symmetry: Operator,
    eigenvalues: Vec<c64>,
    angles: Vec<f64>,
    isometries: Vec<Mat<c64>>,
    dims: Vec<usize>,
}

fn phase(z: c64) -> f64 {
    let t = z.im.atan2(z.re).rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Groups the eigenvalues of the unitary `s` into sectors.
///
/// Eigenvalues within `tol` of each other (chained) form one sector. Two
/// sectors closer than `10·tol` make the grouping ambiguous and are an error.
/// Each sector's basis is the right-singular null space of `S − s_α I`.
pub fn sector_decompose(s: &Operator, tol: f64) -> Result<SectorDecomposition> {
    s.ensure_finite("symmetry operator")?;
    let d = s.dim();
    let defect = s.unitarity_defect();
    if defect > tol.max(DEFAULT_CLUSTER_TOL) {
        return Err(Error::NotUnitary { deviation: defect });
    }
    let eig = s.as_mat().eigenvalues().map_err(|e| Error::Numerical(format!("eigensolver did not converge: {e:?}")))?;
    let mut points: Vec<(f64, c64)> = eig
        .iter()
        .map(|&z| {
            let t = phase(z);
            // Phases just below 2π belong with phase 0.
            (if TAU - t <= tol { t - TAU } else { t }, z)
        })
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut clusters: Vec<Vec<c64>> = Vec::new();
    let mut last_angle = f64::NEG_INFINITY;
    for (t, z) in points {
        match clusters.last_mut() {
            Some(c) if t - last_angle <= tol => c.push(z),
            _ => clusters.push(vec![z]),
        }
        last_angle = t;
    }
    let centers: Vec<c64> = clusters
        .iter()
        .map(|c| {
            let sum: c64 = c.iter().copied().sum();
            sum / sum.norm()
        })
        .collect();
    for a in 0..centers.len() {
        for b in a + 1..centers.len() {
            let gap = (centers[a] - centers[b]).norm();
            if gap < 10.0 * tol {
                return Err(Error::AmbiguousClustering(format!(
                    "eigenvalues {:.6}{:+.6}i and {:.6}{:+.6}i are {gap:.2e} apart",
                    centers[a].re, centers[a].im, centers[b].re, centers[b].im
                )));
            }
        }
    }

    let mut sectors: Vec<(f64, c64, Mat<c64>)> = Vec::with_capacity(clusters.len());
    for (cluster, &center) in clusters.iter().zip(&centers) {
        let m = cluster.len();
        let shifted = Mat::from_fn(d, d, |i, j| s.get(i, j) - if i == j { center } else { ZERO });
        let svd = shifted.svd().map_err(|e| Error::Numerical(format!("sector SVD did not converge: {e:?}")))?;
        let v = svd.V();
        let iso = Mat::from_fn(d, m, |i, k| v[(i, d - m + k)]);
        let resid = (s.as_mat() * &iso - &iso * faer::Scale(center)).norm_l2();
        if resid > 1e-6 * (m as f64).sqrt() {
            return Err(Error::Numerical(format!(
                "eigenspace residual {resid:.2e} for eigenvalue {:.6}{:+.6}i",
                center.re, center.im
            )));
        }
        sectors.push((phase(center), center, iso));
    }
    sectors.sort_by(|a, b| a.0.total_cmp(&b.0));

    Ok(SectorDecomposition {
        symmetry: s.clone(),
        dims: sectors.iter().map(|s| s.2.ncols()).collect(),
        angles: sectors.iter().map(|s| s.0).collect(),
        eigenvalues: sectors.iter().map(|s| s.1).collect(),
        isometries: sectors.into_iter().map(|s| s.2).collect(),
    })
}

impl SectorDecomposition {
    pub fn symmetry(&self) -> &Operator {
        &self.symmetry
    }

    pub fn n_sectors(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn eigenvalues(&self) -> &[c64] {
        &self.eigenvalues
    }

    /// Eigenphases in `[0, 2π)`, increasing.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `d × d_α` isometry onto sector `alpha`.
    pub fn isometry(&self, alpha: usize) -> &Mat<c64> {
        &self.isometries[alpha]
    }

    /// Fails with [`Error::NotCommuting`] if `‖[S, op]‖` exceeds `tol`
    /// relative to `max(1, ‖op‖)`.
    pub fn check_commutes(&self, op: &Operator, label: &str, tol: f64) -> Result<()> {
        if op.dim() != self.symmetry.dim() {
            return Err(Error::DimensionMismatch { expected: self.symmetry.dim(), found: op.dim() });
        }
        let norm = relative_commutator(&self.symmetry, op);
        if norm > tol {
            return Err(Error::NotCommuting { label: label.to_string(), norm });
        }
        Ok(())
    }

    /// `V_α† op V_α` without checking that `op` commutes with `S`.
    pub fn compress(&self, op: &Operator, alpha: usize) -> Operator {
        let v = &self.isometries[alpha];
        Operator::from_mat(v.adjoint() * op.as_mat() * v).expect("square block")
    }

    /// `V_α† op V_β`, a `d_α × d_β` matrix.
    pub fn block(&self, op: &Operator, alpha: usize, beta: usize) -> Mat<c64> {
        self.isometries[alpha].adjoint() * op.as_mat() * &self.isometries[beta]
    }

    /// `V_α X V_β†`, the full-space operator supported on block `(α, β)`.
    pub fn embed_block(&self, x: &Mat<c64>, alpha: usize, beta: usize) -> Operator {
        Operator::from_mat(&self.isometries[alpha] * x * self.isometries[beta].adjoint()).expect("square embedding")
    }

    /// `V_α X V_α†`.
    pub fn embed(&self, x: &Operator, alpha: usize) -> Operator {
        self.embed_block(&x.as_mat().to_owned(), alpha, alpha)
    }

    /// Deviation of `{P_α}` from a resolution of the identity:
    /// `‖Σ V_α V_α† − I‖_HS`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.symmetry.dim();
        let mut sum = Mat::<c64>::zeros(d, d);
        for v in &self.isometries {
            sum += v * v.adjoint();
        }
        (sum - Mat::<c64>::identity(d, d)).norm_l2()
    }
}

/// Checked restriction `V_α† op V_α`.
pub fn restrict(op: &Operator, sectors: &SectorDecomposition, alpha: usize, tol: f64) -> Result<Operator> {
    sectors.check_commutes(op, "operator", tol)?;
    Ok(sectors.compress(op, alpha))
}

/// Lindbladian of sector `alpha`, built from restricted `H` and `L_m`.
pub fn sector_lindbladian(
    l: &Lindbladian,
    sectors: &SectorDecomposition,
    alpha: usize,
    tol: f64,
) -> Result<Lindbladian> {
    sectors.check_commutes(l.hamiltonian(), "hamiltonian", tol)?;
    for (m, j) in l.jumps().iter().enumerate() {
        sectors.check_commutes(j, &format!("lindblad[{m}]"), tol)?;
    }
    Lindbladian::new(
        sectors.compress(l.hamiltonian(), alpha),
        l.jumps().iter().map(|j| sectors.compress(j, alpha)).collect(),
    )
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BlockInvariance {
    Skipped { reason: String },
    Checked { passed: bool, trials_per_block: usize, blocks: usize, max_leakage: f64 },
}

impl BlockInvariance {
    pub fn passed(&self) -> Option<bool> {
        match self {
            BlockInvariance::Skipped { .. } => None,
            BlockInvariance::Checked { passed, .. } => Some(*passed),
        }
    }
}

/// Applies the generator to random operators supported on a single block
/// `(α, β)` and measures the weight that lands in any other block, relative
/// to the output norm.
pub fn verify_invariant_blocks(
    l: &Lindbladian,
    sectors: &SectorDecomposition,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<BlockInvariance> {
    let check = verify_strong_symmetry(sectors.symmetry(), l, DEFAULT_SYMMETRY_TOL)?;
    if !check.holds {
        return Ok(BlockInvariance::Skipped {
            reason: format!(
                "symmetry does not commute with the model (largest commutator {:.2e})",
                check.jump_commutators.iter().copied().fold(check.hamiltonian_commutator, f64::max)
            ),
        });
    }
    let n = sectors.n_sectors();
    let mut max_leakage = 0.0f64;
    for alpha in 0..n {
        for beta in 0..n {
            let (da, db) = (sectors.dims()[alpha], sectors.dims()[beta]);
            for _ in 0..trials {
                let x = Mat::from_fn(da, db, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                let out = l.apply(&sectors.embed_block(&x, alpha, beta))?;
                let scale = out.hs_norm().max(1e-300);
                for a2 in 0..n {
                    for b2 in 0..n {
                        if (a2, b2) != (alpha, beta) {
                            let leak = sectors.block(&out, a2, b2).norm_l2() / scale;
                            max_leakage = max_leakage.max(leak);
                        }
                    }
                }
            }
        }
    }
    Ok(BlockInvariance::Checked {
        passed: max_leakage <= BLOCK_LEAKAGE_TOL,
        trials_per_block: trials,
        blocks: n * n,
        max_leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelspec::{build_builtin, parity_z, u1_number, Params};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parity_sectors() {
        let s = parity_z(3).unwrap();
        let sec = sector_decompose(&s, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sec.dims(), &[4, 4]);
        assert!((sec.eigenvalues()[0] - c64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((sec.eigenvalues()[1] - c64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(sec.completeness_defect() < 1e-10);
    }

    #[test]
    fn number_sectors_follow_binomials() {
        let sec = sector_decompose(&u1_number(4), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sec.dims(), &[1, 4, 6, 4, 1]);
        for (k, &a) in sec.angles().iter().enumerate() {
            assert!((a - k as f64).abs() < 1e-10);
        }
        assert!(sec.completeness_defect() < 1e-10);
    }

    #[test]
    fn identity_is_one_sector() {
        let sec = sector_decompose(&Operator::identity(4), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sec.dims(), &[4]);
    }

    #[test]
    fn close_eigenvalues_are_ambiguous() {
        let s = Operator::diagonal(&[c64::new(1.0, 0.0), c64::from_polar(1.0, 5e-8)]);
        assert!(matches!(sector_decompose(&s, DEFAULT_CLUSTER_TOL), Err(Error::AmbiguousClustering(_))));
    }

    #[test]
    fn phases_near_two_pi_join_zero() {
        let s = Operator::diagonal(&[c64::new(1.0, 0.0), c64::from_polar(1.0, -1e-12)]);
        assert_eq!(sector_decompose(&s, DEFAULT_CLUSTER_TOL).unwrap().dims(), &[2]);
    }

    #[test]
    fn non_unitary_symmetry_is_rejected() {
        let s = Operator::identity(2).scaled(c64::new(2.0, 0.0));
        assert!(matches!(sector_decompose(&s, DEFAULT_CLUSTER_TOL), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn restriction_is_multiplicative_on_commuting_operators() {
        let spec = build_builtin(
            "xyz_bulk_dephasing",
            &Params::from_pairs([("N", "3"), ("Jx", "1.0"), ("Jy", "0.7"), ("Jz", "0.4"), ("gamma", "0.5")]),
        )
        .unwrap();
        let l = Lindbladian::from_spec(&spec).unwrap();
        let sec = sector_decompose(&parity_z(3).unwrap(), DEFAULT_CLUSTER_TOL).unwrap();
        let (a, b) = (l.hamiltonian(), &l.jumps()[1]);
        for alpha in 0..sec.n_sectors() {
            let lhs = restrict(&(a * b), &sec, alpha, 1e-9).unwrap();
            let rhs = &restrict(a, &sec, alpha, 1e-9).unwrap() * &restrict(b, &sec, alpha, 1e-9).unwrap();
            assert!((&lhs - &rhs).hs_norm() < 1e-10);
        }
        let x = crate::opalg::pauli_to_operator(
            &[crate::opalg::PauliTerm::single(c64::new(1.0, 0.0), 1, crate::opalg::PauliLetter::X).unwrap()],
            3,
        )
        .unwrap();
        assert!(matches!(restrict(&x, &sec, 0, 1e-9), Err(Error::NotCommuting { .. })));
    }

    #[test]
    fn blocks_are_invariant_under_strong_symmetry() {
        let spec =
            build_builtin("tight_binding_dephasing", &Params::from_pairs([("N", "3"), ("t", "1.0"), ("gamma", "0.5")]))
                .unwrap();
        let l = Lindbladian::from_spec(&spec).unwrap();
        let sec = sector_decompose(&u1_number(3), DEFAULT_CLUSTER_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = verify_invariant_blocks(&l, &sec, 5, &mut rng).unwrap();
        assert_eq!(r.passed(), Some(true));
    }

    #[test]
    fn block_check_skips_without_symmetry() {
        let spec = build_builtin(
            "tfim_boundary_dephasing",
            &Params::from_pairs([("N", "3"), ("h_x", "0.8"), ("gamma", "0.5")]),
        )
        .unwrap();
        let l = Lindbladian::from_spec(&spec).unwrap();
        let sec = sector_decompose(&u1_number(3), DEFAULT_CLUSTER_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(matches!(verify_invariant_blocks(&l, &sec, 2, &mut rng).unwrap(), BlockInvariance::Skipped { .. }));
    }
}
