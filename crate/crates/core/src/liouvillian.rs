//! The GKSL generator
//!
//! ```text
//! L̂(ρ) = −i[H, ρ] + Σ_m ( L_m ρ L_m† − ½ {L_m† L_m, ρ} )
//! ```
//!
//! as a map on operators and as a `d² × d²` matrix under column stacking,
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use faer::Mat;

use crate::error::{Error, Result};
use crate::modelspec::ModelSpec;
use crate::opalg::{c64, sum_operators, Operator, I, ZERO};

/// Largest Hilbert space dimension [`assemble`] accepts by default.
pub const DEFAULT_MAX_DIM: usize = 256;

/// Relative singular-value cutoff for kernel extraction.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-9;

/// Hamiltonian plus jump operators, with `Σ L†L` cached.
#[derive(Clone, Debug)]
pub struct Lindbladian {
    hamiltonian: Operator,
    jumps: Vec<Operator>,
    decay: Operator,
}

impl Lindbladian {
    pub fn new(hamiltonian: Operator, jumps: Vec<Operator>) -> Result<Self> {
        let d = hamiltonian.dim();
        hamiltonian.ensure_finite("Hamiltonian")?;
        for (m, l) in jumps.iter().enumerate() {
            if l.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: l.dim() });
            }
            l.ensure_finite(&format!("jump operator {m}"))?;
        }
        let products: Vec<Operator> = jumps.iter().map(|l| &l.adjoint() * l).collect();
        let decay = sum_operators(&products, d);
        Ok(Self { hamiltonian, jumps, decay })
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        Self::new(spec.hamiltonian_operator()?, spec.lindblad_operators()?)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    /// `Σ_m L_m† L_m`.
    pub fn decay(&self) -> &Operator {
        &self.decay
    }

    /// `K = H − (i/2) Σ L†L`.
    pub fn effective_hamiltonian(&self) -> Operator {
        &self.hamiltonian + &self.decay.scaled(c64::new(0.0, -0.5))
    }

    /// `H + (i/2) Σ L†L`, the operator whose action on `Ker ρ` appears in the
    /// positivity argument for stationary states.
    pub fn adjoint_effective_hamiltonian(&self) -> Operator {
        &self.hamiltonian + &self.decay.scaled(c64::new(0.0, 0.5))
    }

    pub fn has_hermitian_jumps(&self, tol: f64) -> bool {
        self.jumps.iter().all(|l| l.is_hermitian(tol))
    }

    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        let mut out = self.hamiltonian.commutator(rho).scaled(-I);
        for l in &self.jumps {
            out = &out + &(&(l * rho) * &l.adjoint());
        }
        let anti = self.decay.anticommutator(rho).scaled(c64::new(-0.5, 0.0));
        Ok(&out + &anti)
    }
}

/// Applies the generator of `spec` to `rho`.
pub fn apply(spec: &ModelSpec, rho: &Operator) -> Result<Operator> {
    Lindbladian::from_spec(spec)?.apply(rho)
}

/// Vectorized generator, column-stacking convention.
#[derive(Clone, Debug)]
pub struct LiouvillianMatrix {
    d: usize,
    matrix: Mat<c64>,
    scale: f64,
}

impl LiouvillianMatrix {
    /// Hilbert space dimension `d` (the matrix is `d² × d²`).
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    /// `‖H‖ + Σ‖L_m‖²` in HS norm, the magnitude of the inputs.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `unvec(M · vec(ρ))`.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        if rho.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: rho.dim() });
        }
        let v = rho.vectorize();
        let col = faer::Col::from_fn(v.len(), |k| v[k]);
        let out = &self.matrix * &col;
        let flat: Vec<c64> = out.iter().copied().collect();
        Operator::from_vectorized(self.d, &flat)
    }
}

pub fn assemble(lindbladian: &Lindbladian) -> Result<LiouvillianMatrix> {
    assemble_with_limit(lindbladian, DEFAULT_MAX_DIM)
}

/// `−i(I⊗H − Hᵀ⊗I) + Σ_m [L̄_m⊗L_m − ½ I⊗L_m†L_m − ½ (L_m†L_m)ᵀ⊗I]`.
pub fn assemble_with_limit(lindbladian: &Lindbladian, max_dim: usize) -> Result<LiouvillianMatrix> {
    let d = lindbladian.dim();
    if d > max_dim {
        return Err(Error::SizeBudget { required: d, limit: max_dim });
    }
    let h = lindbladian.hamiltonian();
    let a = lindbladian.decay();
    let half = c64::new(0.5, 0.0);
    let mut m = Mat::<c64>::zeros(d * d, d * d);
    // Block (j', j) of the matrix acts between columns j and j' of ρ.
    for jp in 0..d {
        for j in 0..d {
            let ident_coeff = I * h.get(j, jp) - half * a.get(j, jp);
            for ip in 0..d {
                for i in 0..d {
                    let mut z = ZERO;
                    if j == jp {
                        z += -I * h.get(ip, i) - half * a.get(ip, i);
                    }
                    if i == ip {
                        z += ident_coeff;
                    }
                    for l in lindbladian.jumps() {
                        z += l.get(jp, j).conj() * l.get(ip, i);
                    }
                    m[(ip + jp * d, i + j * d)] = z;
                }
            }
        }
    }
    let scale = h.hs_norm() + lindbladian.jumps().iter().map(|l| l.hs_norm().powi(2)).sum::<f64>();
    Ok(LiouvillianMatrix { d, matrix: m, scale })
}

/// All `d²` eigenvalues of the generator.
pub fn spectrum(lm: &LiouvillianMatrix) -> Result<Vec<c64>> {
    lm.matrix.eigenvalues().map_err(|e| Error::Numerical(format!("eigensolver did not converge: {e:?}")))
}

/// Numerical null space of the generator.
#[derive(Clone, Debug)]
pub struct Kernel {
    /// HS-orthonormal operators spanning the kernel.
    pub vectors: Vec<Operator>,
    pub sigma_max: f64,
    /// Absolute cutoff `tol · σ_max`, or `σ_max` itself when the whole
    /// matrix is roundoff.
    pub cutoff: f64,
    /// Largest singular value counted as zero.
    pub largest_null_sigma: f64,
    /// Smallest singular value above the cutoff, if any.
    pub smallest_nonnull_sigma: Option<f64>,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Generators with `σ_max` below this multiple of `ε · scale` are zero.
const ROUNDOFF_FACTOR: f64 = 1e3;

/// Right singular vectors with `σ ≤ tol · σ_max`.
///
/// A generator whose largest singular value is at roundoff level relative to
/// its inputs is treated as identically zero. This happens for sectors of
/// dimension one, where every commutator cancels exactly.
pub fn kernel(lm: &LiouvillianMatrix, tol: f64) -> Result<Kernel> {
    let svd = lm.matrix.svd().map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("Liouvillian singular values".into()));
    }
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let cutoff = if sigma_max <= ROUNDOFF_FACTOR * f64::EPSILON * lm.scale { sigma_max } else { tol * sigma_max };
    let v = svd.V();
    let mut vectors = Vec::new();
    let mut largest_null_sigma = 0.0f64;
    let mut smallest_nonnull_sigma = None;
    for (k, &s) in sigma.iter().enumerate() {
        if s <= cutoff {
            let col: Vec<c64> = v.col(k).iter().copied().collect();
            vectors.push(Operator::from_vectorized(lm.d, &col)?);
            largest_null_sigma = largest_null_sigma.max(s);
        } else {
            smallest_nonnull_sigma = Some(s);
        }
    }
    if vectors.is_empty() {
        return Err(Error::Numerical(format!(
            "no kernel vector below cutoff {cutoff:.3e}; smallest singular value {:.3e}",
            sigma.last().copied().unwrap_or(f64::NAN)
        )));
    }
    Ok(Kernel { vectors, sigma_max, cutoff, largest_null_sigma, smallest_nonnull_sigma })
}
