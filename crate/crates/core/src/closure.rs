//! Generated operator algebras and commutants.
//!
//! [`algebra_closure`] computes the span of all finite words in a set of
//! generators: the smallest subspace containing the generators and closed
//! under left and right multiplication by them. Every word `g₁g₂…g_k` equals
//! `g₁ · (g₂…g_k)`, so closing the span under multiplication by generators
//! reaches every word, and the span of all words is closed under products.
//! The identity is not added unless the generators produce it.
//!
//! If the algebra generated by `K = H − (i/2)Σ L†L` and the jump operators
//! is the full matrix algebra, the steady state is unique and positive
//! definite. This direction only: a smaller algebra says nothing either way.

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouvillian::Lindbladian;
use crate::modelspec::ModelSpec;
use crate::opalg::{c64, HSBasis, Operator};
use crate::symmetry::SectorDecomposition;

pub const DEFAULT_CLOSURE_TOL: f64 = 1e-9;
pub const DEFAULT_COMMUTANT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedUnique,
    NotCertified,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedUnique => "certified_unique",
            Verdict::NotCertified => "not_certified",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub generated_dim: usize,
    pub full_dim_target: usize,
    pub rounds: usize,
    /// A further round of products would add nothing.
    pub saturated: bool,
    pub basis: HSBasis,
    pub tol_used: f64,
    /// Smallest relative residual among accepted directions; the distance of
    /// the weakest accepted direction from the rejection threshold.
    pub min_accepted_residual: Option<f64>,
    /// Largest relative residual among rejected candidates.
    pub max_rejected_residual: f64,
    pub candidates_tested: usize,
}

impl ClosureResult {
    pub fn is_full(&self) -> bool {
        self.generated_dim == self.full_dim_target
    }

    pub fn verdict(&self) -> Verdict {
        if self.is_full() {
            Verdict::CertifiedUnique
        } else if self.saturated {
            Verdict::NotCertified
        } else {
            Verdict::Inconclusive
        }
    }
}

struct Tracker {
    min_accepted: Option<f64>,
    max_rejected: f64,
    tested: usize,
}

impl Tracker {
    fn offer(&mut self, basis: &mut HSBasis, candidate: &Operator, tol: f64) -> Result<bool> {
        self.tested += 1;
        // Candidates are products of unit-norm operators, so a norm below tol
        // is indistinguishable from an exact zero product.
        let norm = candidate.hs_norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("closure candidate".into()));
        }
        if norm <= tol {
            self.max_rejected = self.max_rejected.max(norm);
            return Ok(false);
        }
        let unit = candidate.scaled(c64::new(1.0 / norm, 0.0));
        let ext = basis.orthonormalize_extend(&unit, tol)?;
        if ext.accepted {
            self.min_accepted = Some(self.min_accepted.map_or(ext.residual, |m: f64| m.min(ext.residual)));
        } else {
            self.max_rejected = self.max_rejected.max(ext.residual);
        }
        Ok(ext.accepted)
    }
}

/// Span closure of `generators` under multiplication.
///
/// Generators are normalized first, which leaves the algebra unchanged and
/// makes every rank decision independent of generator scale. Each round
/// multiplies every generator with every basis element added in the previous
/// round, on both sides, in generator-major then basis-index order. Stops at
/// saturation, at `d²`, or at `max_basis` (default `d²`); hitting `max_basis`
/// below `d²` leaves the result unsaturated, which reads as inconclusive.
pub fn algebra_closure(generators: &[Operator], d: usize, tol: f64, max_basis: Option<usize>) -> Result<ClosureResult> {
    if generators.is_empty() {
        return Err(Error::Validation("closure needs at least one generator".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    for g in generators {
        if g.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
        }
        g.ensure_finite("generator")?;
    }
    let target = d * d;
    let limit = max_basis.unwrap_or(target).min(target);
    let gens: Vec<Operator> = generators
        .iter()
        .filter_map(|g| {
            let n = g.hs_norm();
            (n > 0.0).then(|| g.scaled(c64::new(1.0 / n, 0.0)))
        })
        .collect();

    let mut basis = HSBasis::new(d);
    let mut track = Tracker { min_accepted: None, max_rejected: 0.0, tested: 0 };
    let done = |basis: &HSBasis| basis.len() >= limit;

    for g in &gens {
        if done(&basis) {
            break;
        }
        track.offer(&mut basis, g, tol)?;
    }

    let mut rounds = 0;
    let mut frontier = 0..basis.len();
    let saturated;
    'rounds: loop {
        if done(&basis) {
            saturated = basis.len() == target;
            break;
        }
        if frontier.is_empty() {
            saturated = true;
            break;
        }
        rounds += 1;
        let next_start = basis.len();
        let elements: Vec<Operator> = frontier.clone().map(|i| basis.vector(i)).collect();
        for g in &gens {
            for b in &elements {
                for product in [g * b, b * g] {
                    track.offer(&mut basis, &product, tol)?;
                    if done(&basis) {
                        continue 'rounds;
                    }
                }
            }
        }
        frontier = next_start..basis.len();
    }

    Ok(ClosureResult {
        generated_dim: basis.len(),
        full_dim_target: target,
        rounds,
        saturated,
        basis,
        tol_used: tol,
        min_accepted_residual: track.min_accepted,
        max_rejected_residual: track.max_rejected,
        candidates_tested: track.tested,
    })
}

/// Which operators seed a closure or commutant computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorSet {
    /// `{H − (i/2)Σ L†L, L_1, …, L_M}`, the certifying set.
    Effective,
    /// `{H + (i/2)Σ L†L, L_1†, …, L_M†}`, the set that leaves `Ker ρ`
    /// invariant for any stationary `ρ ≥ 0`.
    AdjointEffective,
    /// `{H, L_1, …, L_M}`; generates the same algebra as `Effective` when the
    /// jump operators are Hermitian.
    Hamiltonian,
    /// `{H, L_1, …, L_M, L_1†, …, L_M†}`, the set whose commutant decides
    /// uniqueness when a full-rank steady state is known.
    Frigerio,
}

pub fn generators(l: &Lindbladian, set: GeneratorSet) -> Vec<Operator> {
    let mut out = Vec::with_capacity(2 * l.jumps().len() + 1);
    match set {
        GeneratorSet::Effective => {
            out.push(l.effective_hamiltonian());
            out.extend(l.jumps().iter().cloned());
        }
        GeneratorSet::AdjointEffective => {
            out.push(l.adjoint_effective_hamiltonian());
            out.extend(l.jumps().iter().map(Operator::adjoint));
        }
        GeneratorSet::Hamiltonian => {
            out.push(l.hamiltonian().clone());
            out.extend(l.jumps().iter().cloned());
        }
        GeneratorSet::Frigerio => {
            out.push(l.hamiltonian().clone());
            out.extend(l.jumps().iter().cloned());
            out.extend(l.jumps().iter().map(Operator::adjoint));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Theorem1Check {
    pub verdict: Verdict,
    pub closure: ClosureResult,
    pub hermitian_jumps: bool,
}

impl Theorem1Check {
    /// Human-readable reading of the verdict, including the one-sided caveat.
    pub fn explanation(&self) -> &'static str {
        match self.verdict {
            Verdict::CertifiedUnique => {
                "the effective Hamiltonian and jump operators generate the full operator algebra: \
                 the steady state is unique and positive definite"
            }
            Verdict::NotCertified => {
                "the generated algebra is a proper subalgebra: the sufficient condition fails, \
                 which does not by itself imply a degenerate steady state"
            }
            Verdict::Inconclusive => "closure stopped at the basis limit before saturating: no verdict",
        }
    }
}

/// Runs the generation test on `{K, L_1, …, L_M}` of an assembled generator.
pub fn check_lindbladian(l: &Lindbladian, tol: f64, max_basis: Option<usize>) -> Result<Theorem1Check> {
    let gens = generators(l, GeneratorSet::Effective);
    let closure = algebra_closure(&gens, l.dim(), tol, max_basis)?;
    Ok(Theorem1Check { verdict: closure.verdict(), closure, hermitian_jumps: l.has_hermitian_jumps(1e-12) })
}

/// Generation test with default basis limit.
pub fn check_theorem1(spec: &ModelSpec, tol: f64) -> Result<Theorem1Check> {
    check_lindbladian(&Lindbladian::from_spec(spec)?, tol, None)
}

#[derive(Clone, Debug)]
pub struct CommutantResult {
    pub commutant_dim: usize,
    pub basis: HSBasis,
    /// `max ‖[X, G]‖_HS` over basis elements `X` and normalized generators `G`.
    pub max_commutator_norm: f64,
    pub tol_used: f64,
    /// Largest singular value counted as zero.
    pub largest_null_sigma: f64,
    /// Smallest singular value above the cutoff, relative to the largest.
    /// The ratio to `largest_null_sigma` is the confidence in the dimension.
    pub smallest_nonnull_sigma: Option<f64>,
}

impl CommutantResult {
    /// Only scalar multiples of the identity commute with every generator.
    pub fn is_trivial(&self) -> bool {
        self.commutant_dim == 1
    }
}

/// Null space of `X ↦ ([X, G_1], …, [X, G_k])` over all `d × d` operators.
pub fn commutant(generators: &[Operator], d: usize, tol: f64) -> Result<CommutantResult> {
    if generators.is_empty() {
        return Err(Error::Validation("commutant needs at least one generator".into()));
    }
    for g in generators {
        if g.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
        }
        g.ensure_finite("generator")?;
    }
    let gens: Vec<Operator> = generators
        .iter()
        .filter_map(|g| {
            let n = g.hs_norm();
            (n > 0.0).then(|| g.scaled(c64::new(1.0 / n, 0.0)))
        })
        .collect();
    let n = d * d;
    let k = gens.len().max(1);
    // vec([X, G]) = (Gᵀ ⊗ I − I ⊗ G) vec(X)
    let mut stacked = Mat::<c64>::zeros(k * n, n);
    for (block, g) in gens.iter().enumerate() {
        let row0 = block * n;
        for jp in 0..d {
            for j in 0..d {
                let gt = g.get(j, jp);
                for ip in 0..d {
                    for i in 0..d {
                        let mut z = c64::new(0.0, 0.0);
                        if i == ip {
                            z += gt;
                        }
                        if j == jp {
                            z -= g.get(ip, i);
                        }
                        stacked[(row0 + ip + jp * d, i + j * d)] = z;
                    }
                }
            }
        }
    }
    let svd = stacked.thin_svd().map_err(|e| Error::Numerical(format!("commutant SVD did not converge: {e:?}")))?;
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol * sigma_max;
    let v = svd.V();
    let mut basis = HSBasis::new(d);
    let mut largest_null_sigma = 0.0f64;
    let mut smallest_nonnull_sigma = None;
    for (col, &s) in sigma.iter().enumerate() {
        if s > cutoff {
            smallest_nonnull_sigma = Some(s / sigma_max);
        } else {
            largest_null_sigma = largest_null_sigma.max(s);
            let flat: Vec<c64> = v.col(col).iter().copied().collect();
            basis.orthonormalize_extend(&Operator::from_vectorized(d, &flat)?, tol)?;
        }
    }
    if basis.is_empty() {
        return Err(Error::Numerical("commutant is empty, but the identity always commutes".into()));
    }
    let mut max_commutator_norm = 0.0f64;
    for x in basis.vectors() {
        for g in &gens {
            max_commutator_norm = max_commutator_norm.max(x.commutator(g).hs_norm());
        }
    }
    Ok(CommutantResult {
        commutant_dim: basis.len(),
        basis,
        max_commutator_norm,
        tol_used: tol,
        largest_null_sigma,
        smallest_nonnull_sigma,
    })
}

#[derive(Clone, Debug)]
pub struct SectorClosure {
    pub sector: usize,
    pub eigenvalue: c64,
    pub dim: usize,
    pub closure: ClosureResult,
}

/// Closure restricted to every eigenspace of a strong symmetry.
#[derive(Clone, Debug)]
pub struct RestrictedClosure {
    pub sectors: Vec<SectorClosure>,
    /// `Σ_α d_α²`, the dimension of the commutant of the symmetry.
    pub commutant_target: usize,
    /// `Σ_α` generated dimension.
    pub generated_total: usize,
}

impl RestrictedClosure {
    pub fn verdict(&self) -> Verdict {
        if self.sectors.iter().all(|s| s.closure.is_full()) {
            Verdict::CertifiedUnique
        } else if self.sectors.iter().any(|s| s.closure.verdict() == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::NotCertified
        }
    }
}

/// Restricts every generator to each symmetry sector and closes there, with
/// target `d_α²` per sector. All sectors full is equivalent to generating
/// every operator that commutes with the symmetry.
pub fn restricted_closure(
    generators: &[Operator],
    sectors: &SectorDecomposition,
    tol: f64,
) -> Result<RestrictedClosure> {
    let commute_tol = 1e-9;
    for (k, g) in generators.iter().enumerate() {
        sectors.check_commutes(g, &format!("generator {k}"), commute_tol)?;
    }
    let mut out = Vec::with_capacity(sectors.n_sectors());
    for alpha in 0..sectors.n_sectors() {
        let restricted: Vec<Operator> = generators.iter().map(|g| sectors.compress(g, alpha)).collect();
        let dim = sectors.dims()[alpha];
        let closure = algebra_closure(&restricted, dim, tol, None)?;
        out.push(SectorClosure { sector: alpha, eigenvalue: sectors.eigenvalues()[alpha], dim, closure });
    }
    Ok(RestrictedClosure {
        commutant_target: out.iter().map(|s| s.dim * s.dim).sum(),
        generated_total: out.iter().map(|s| s.closure.generated_dim).sum(),
        sectors: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{pauli_to_operator, PauliLetter, PauliTerm, ONE, ZERO};
    use proptest::prelude::*;

    fn pauli(letter: PauliLetter) -> Operator {
        pauli_to_operator(&[PauliTerm::single(ONE, 1, letter).unwrap()], 1).unwrap()
    }

    #[test]
    fn pauli_pair_generates_everything() {
        let r = algebra_closure(&[pauli(PauliLetter::X), pauli(PauliLetter::Z)], 2, 1e-9, None).unwrap();
        assert_eq!(r.generated_dim, 4);
        assert_eq!(r.verdict(), Verdict::CertifiedUnique);
    }

    #[test]
    fn single_z_generates_diagonals() {
        let r = algebra_closure(&[pauli(PauliLetter::Z)], 2, 1e-9, None).unwrap();
        assert_eq!(r.generated_dim, 2);
        assert!(r.saturated);
        assert_eq!(r.verdict(), Verdict::NotCertified);
    }

    #[test]
    fn gain_and_loss_form_a_basis() {
        let g = pauli(PauliLetter::Plus);
        let l = pauli(PauliLetter::Minus).scaled(c64::new(2f64.sqrt(), 0.0));
        let r = algebra_closure(&[g, l], 2, 1e-9, None).unwrap();
        assert_eq!(r.generated_dim, 4);
    }

    #[test]
    fn identity_is_not_seeded() {
        // A nilpotent generator spans only itself.
        let r = algebra_closure(&[pauli(PauliLetter::Plus)], 2, 1e-9, None).unwrap();
        assert_eq!(r.generated_dim, 1);
        assert!(r.saturated);
    }

    #[test]
    fn basis_limit_is_inconclusive() {
        let r = algebra_closure(&[pauli(PauliLetter::X), pauli(PauliLetter::Z)], 2, 1e-9, Some(3)).unwrap();
        assert_eq!(r.generated_dim, 3);
        assert_eq!(r.verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn zero_generators_generate_nothing() {
        let r = algebra_closure(&[Operator::zeros(2)], 2, 1e-9, None).unwrap();
        assert_eq!(r.generated_dim, 0);
        assert!(r.saturated);
    }

    #[test]
    fn closure_input_validation() {
        assert!(algebra_closure(&[], 2, 1e-9, None).is_err());
        assert!(algebra_closure(&[Operator::identity(3)], 2, 1e-9, None).is_err());
        assert!(algebra_closure(&[Operator::identity(2)], 2, 0.0, None).is_err());
    }

    #[test]
    fn commutant_examples() {
        let r = commutant(&[pauli(PauliLetter::X), pauli(PauliLetter::Z)], 2, 1e-9).unwrap();
        assert_eq!(r.commutant_dim, 1);
        assert!(r.is_trivial());
        let r = commutant(&[pauli(PauliLetter::Z)], 2, 1e-9).unwrap();
        assert_eq!(r.commutant_dim, 2);
        for x in r.basis.vectors() {
            assert!(x.get(0, 1).norm() < 1e-12 && x.get(1, 0).norm() < 1e-12);
        }
        assert!(r.max_commutator_norm < 1e-12);
    }

    #[test]
    fn commutant_of_scalars_is_everything() {
        let r = commutant(&[Operator::identity(2)], 2, 1e-9).unwrap();
        assert_eq!(r.commutant_dim, 4);
    }

    fn random_op(d: usize, seed: &[f64]) -> Operator {
        Operator::from_fn(d, |i, j| c64::new(seed[(i * d + j) % seed.len()], seed[(i * d + j + 7) % seed.len()]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn saturated_basis_is_product_closed(
            a in proptest::collection::vec(-1.0..1.0f64, 19),
            sparse in 0usize..4,
        ) {
            // Block-diagonal generators so the algebra is a proper subalgebra.
            let d = 4;
            let g1 = Operator::from_fn(d, |i, j| if (i < 2) == (j < 2) { c64::new(a[i * 4 + j], a[(i + j) % 19]) } else { ZERO });
            let g2 = Operator::from_fn(d, |i, j| if i == j && i >= sparse { c64::new(a[i + 3], 0.0) } else { ZERO });
            let r = algebra_closure(&[g1.clone(), g2.clone()], d, 1e-9, None).unwrap();
            prop_assert!(r.saturated);
            let basis = r.basis.vectors();
            for x in &basis {
                for y in &basis {
                    prop_assert!(r.basis.residual_norm(&(x * y)).unwrap() <= 1e-8);
                }
            }
            // Idempotence: closing the basis itself adds nothing.
            let again = algebra_closure(&basis, d, 1e-9, None).unwrap();
            prop_assert_eq!(again.generated_dim, r.generated_dim);
            // Scalar invariance.
            let scaled = algebra_closure(
                &[g1.scaled(c64::new(1e-6, 3e-6)), g2.scaled(c64::new(-250.0, 0.0))], d, 1e-9, None).unwrap();
            prop_assert_eq!(scaled.generated_dim, r.generated_dim);
            // Monotonicity.
            let more = algebra_closure(&[g1, g2, random_op(d, &a)], d, 1e-9, None).unwrap();
            prop_assert!(more.generated_dim >= r.generated_dim);
        }

        #[test]
        fn adjoint_closed_sets_agree_with_commutant(a in proptest::collection::vec(-1.0..1.0f64, 23), diag in any::<bool>()) {
            let d = 3;
            let g = if diag {
                Operator::from_fn(d, |i, j| if i == j { c64::new(a[i], a[i + 5]) } else { ZERO })
            } else {
                random_op(d, &a)
            };
            let h = Operator::from_fn(d, |i, j| if i == j || (i, j) == (0, 1) || (i, j) == (1, 0) { c64::new(a[i + j + 9], 0.0) } else { ZERO });
            let gens = vec![h.hermitian_part(), g.clone(), g.adjoint()];
            let closure = algebra_closure(&gens, d, 1e-9, None).unwrap();
            let comm = commutant(&gens, d, 1e-9).unwrap();
            prop_assert_eq!(closure.is_full(), comm.is_trivial());
        }
    }
}
