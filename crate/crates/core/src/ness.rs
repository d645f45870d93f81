//! Steady states and the verdict pipeline.
//!
//! [`full_verdict`] runs the generation test, the Frigerio commutant, the
//! kernel SVD and every declared symmetry, then cross-checks them. The
//! algebraic verdicts are never trusted on their own: each one that makes a
//! prediction about the kernel gets a named consistency check.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closure::{self, CommutantResult, GeneratorSet, RestrictedClosure, Theorem1Check, Verdict};
use crate::error::{Error, Result, StageExt};
use crate::liouvillian::{self, Kernel, Lindbladian};
use crate::modelspec::ModelSpec;
use crate::opalg::{c64, HSBasis, Operator};
use crate::symmetry::{self, BlockInvariance, SectorDecomposition, SymmetryCheck};

/// Stationarity, hermiticity and trace bounds every reported state meets.
pub const STATIONARITY_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue tolerated before a state is called non-positive.
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Distance bound for predicted maximally mixed states.
pub const STATE_MATCH_TOL: f64 = 1e-8;
/// Bound for `‖L̂(I/d)‖` when every jump operator is Hermitian.
pub const IDENTITY_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct NessOptions {
    pub closure_tol: f64,
    pub kernel_tol: f64,
    pub max_basis: Option<usize>,
    pub cluster_tol: f64,
    pub symmetry_tol: f64,
    pub block_trials: usize,
    pub seed: u64,
    pub max_dim: usize,
    /// The commutant SVD is skipped above this Hilbert space dimension.
    pub commutant_max_dim: usize,
    /// The generation test is repeated at `closure_tol` times each factor;
    /// a verdict whose dimension moves with the tolerance is flagged.
    pub stability_factors: Vec<f64>,
}

impl Default for NessOptions {
    fn default() -> Self {
        Self {
            closure_tol: closure::DEFAULT_CLOSURE_TOL,
            kernel_tol: liouvillian::DEFAULT_KERNEL_TOL,
            max_basis: None,
            cluster_tol: symmetry::DEFAULT_CLUSTER_TOL,
            symmetry_tol: symmetry::DEFAULT_SYMMETRY_TOL,
            block_trials: 20,
            seed: 0,
            max_dim: liouvillian::DEFAULT_MAX_DIM,
            commutant_max_dim: 32,
            stability_factors: vec![100.0, 0.01],
        }
    }
}

/// A trace-one Hermitian kernel element with its spectrum summary.
#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: Operator,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub stationarity_residual: f64,
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
}

impl SteadyState {
    fn new(l: &Lindbladian, rho: Operator) -> Result<Self> {
        let eig = rho.eigenvalues_hermitian()?;
        Ok(Self {
            stationarity_residual: l.apply(&rho)?.hs_norm(),
            hermiticity_defect: (&rho - &rho.adjoint()).hs_norm(),
            trace_defect: (rho.trace() - c64::new(1.0, 0.0)).norm(),
            min_eigenvalue: eig.first().copied().unwrap_or(f64::NAN),
            max_eigenvalue: eig.last().copied().unwrap_or(f64::NAN),
            rho,
        })
    }

    /// `λ_min / λ_max`, the positive-definiteness margin.
    pub fn positivity_ratio(&self) -> f64 {
        self.min_eigenvalue / self.max_eigenvalue
    }

    /// Strictly positive spectrum, with a margin above roundoff.
    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue > 1e-12 * self.max_eigenvalue.abs().max(1.0)
    }

    /// Meets the stationarity, hermiticity, trace and positivity bounds.
    pub fn is_valid(&self) -> bool {
        self.stationarity_residual <= STATIONARITY_TOL
            && self.hermiticity_defect <= HERMITICITY_TOL
            && self.trace_defect <= TRACE_TOL
            && self.min_eigenvalue >= -POSITIVITY_TOL
    }

    pub fn distance_to_maximally_mixed(&self) -> f64 {
        let d = self.rho.dim();
        (&self.rho - &Operator::identity(d).scaled(c64::new(1.0 / d as f64, 0.0))).hs_norm()
    }
}

/// Kernel of the generator, turned into density operators.
#[derive(Clone, Debug)]
pub struct SteadyStates {
    pub kernel: Kernel,
    /// HS-orthonormal Hermitian operators spanning the kernel.
    pub hermitian_basis: Vec<Operator>,
    /// The unique state when the kernel is one-dimensional; otherwise the
    /// normalized projection of `I/d` onto the kernel. Absent if that
    /// projection is not positive semidefinite.
    pub state: Option<SteadyState>,
}

impl SteadyStates {
    pub fn kernel_dim(&self) -> usize {
        self.kernel.dim()
    }

    /// True when the state is one canonical choice among many.
    pub fn is_canonical_choice(&self) -> bool {
        self.kernel_dim() > 1
    }
}

/// Steady states of an already assembled model.
pub fn steady_states_of(l: &Lindbladian, kernel_tol: f64, max_dim: usize) -> Result<SteadyStates> {
    let lm = liouvillian::assemble_with_limit(l, max_dim)?;
    let kernel = liouvillian::kernel(&lm, kernel_tol)?;
    let d = l.dim();

    // The generator commutes with taking adjoints, so the Hermitian and
    // anti-Hermitian parts of a kernel element are kernel elements too.
    let mut basis = HSBasis::new(d);
    let i_half = c64::new(0.0, -1.0);
    for k in &kernel.vectors {
        let re = k.hermitian_part();
        let im = (k - &k.adjoint()).scaled(i_half * 0.5);
        for part in [re, im] {
            let n = part.hs_norm();
            if n > 1e-6 && basis.len() < kernel.dim() {
                basis.orthonormalize_extend(&part.scaled(c64::new(1.0 / n, 0.0)), 1e-6)?;
            }
        }
    }
    if basis.len() != kernel.dim() {
        return Err(Error::Numerical(format!(
            "kernel of dimension {} has only {} independent Hermitian elements",
            kernel.dim(),
            basis.len()
        )));
    }
    let hermitian_basis: Vec<Operator> = basis.vectors().iter().map(Operator::hermitian_part).collect();

    // Project I/d onto the kernel. Every state in the kernel has unit overlap
    // with I, so the projection cannot vanish.
    let mut proj = Operator::zeros(d);
    for b in &hermitian_basis {
        proj = &proj + &b.scaled(b.trace().conj());
    }
    let tr = proj.trace();
    if tr.norm() < 1e-10 {
        return Err(Error::Numerical("kernel is orthogonal to the identity".into()));
    }
    let rho = proj.scaled(c64::new(1.0, 0.0) / tr).hermitian_part();
    let state = SteadyState::new(l, rho)?;
    let state = (state.min_eigenvalue >= -POSITIVITY_TOL).then_some(state);
    if state.is_none() && kernel.dim() == 1 {
        return Err(Error::Numerical("unique kernel element is not positive semidefinite".into()));
    }
    Ok(SteadyStates { kernel, hermitian_basis, state })
}

/// Steady states of `spec` with relative kernel cutoff `tol`.
pub fn steady_states(spec: &ModelSpec, tol: f64) -> Result<SteadyStates> {
    steady_states_of(&Lindbladian::from_spec(spec)?, tol, liouvillian::DEFAULT_MAX_DIM)
}

/// Kernel and NESS of one diagonal block.
#[derive(Clone, Debug)]
pub struct SectorNess {
    pub sector: usize,
    pub eigenvalue: c64,
    pub angle: f64,
    pub dim: usize,
    pub kernel_dim: usize,
    pub state: Option<SteadyState>,
    pub closure_verdict: Verdict,
    pub generated_dim: usize,
}

impl SectorNess {
    pub fn distance_to_maximally_mixed(&self) -> Option<f64> {
        self.state.as_ref().map(SteadyState::distance_to_maximally_mixed)
    }
}

#[derive(Clone, Debug)]
pub struct SectorAnalysis {
    pub label: String,
    pub check: SymmetryCheck,
    pub decomposition: SectorDecomposition,
    pub restricted: RestrictedClosure,
    pub sectors: Vec<SectorNess>,
    pub block_invariance: BlockInvariance,
    /// `‖L̂(Σ_α (d_α/d) V_α ρ_α V_α†)‖`, when every sector has a state.
    pub reassembly_residual: Option<f64>,
}

/// Restricted closure and restricted NESS in every sector of `s`.
pub fn per_sector_ness_of(
    l: &Lindbladian,
    label: &str,
    s: &Operator,
    options: &NessOptions,
    rng: &mut ChaCha8Rng,
) -> Result<SectorAnalysis> {
    let check = symmetry::verify_strong_symmetry(s, l, options.symmetry_tol)?;
    if !check.holds {
        let (which, norm) = std::iter::once(("hamiltonian".to_string(), check.hamiltonian_commutator))
            .chain(check.jump_commutators.iter().enumerate().map(|(m, &c)| (format!("lindblad[{m}]"), c)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least the Hamiltonian");
        return Err(Error::NotCommuting { label: format!("{which} (symmetry {label})"), norm });
    }
    let decomposition = symmetry::sector_decompose(s, options.cluster_tol)?;
    let gens = closure::generators(l, GeneratorSet::Effective);
    let restricted = closure::restricted_closure(&gens, &decomposition, options.closure_tol)?;

    let d = l.dim();
    let mut sectors = Vec::with_capacity(decomposition.n_sectors());
    let mut reassembled = Some(Operator::zeros(d));
    for alpha in 0..decomposition.n_sectors() {
        let sub = symmetry::sector_lindbladian(l, &decomposition, alpha, options.symmetry_tol)?;
        let ss = steady_states_of(&sub, options.kernel_tol, options.max_dim)?;
        let dim = decomposition.dims()[alpha];
        reassembled = match (reassembled, &ss.state) {
            (Some(acc), Some(st)) => {
                let w = c64::new(dim as f64 / d as f64, 0.0);
                Some(&acc + &decomposition.embed(&st.rho, alpha).scaled(w))
            }
            _ => None,
        };
        let rc = &restricted.sectors[alpha].closure;
        sectors.push(SectorNess {
            sector: alpha,
            eigenvalue: decomposition.eigenvalues()[alpha],
            angle: decomposition.angles()[alpha],
            dim,
            kernel_dim: ss.kernel_dim(),
            state: ss.state,
            closure_verdict: rc.verdict(),
            generated_dim: rc.generated_dim,
        });
    }
    let reassembly_residual = match reassembled {
        Some(rho) => Some(l.apply(&rho)?.hs_norm()),
        None => None,
    };
    let block_invariance = symmetry::verify_invariant_blocks(l, &decomposition, options.block_trials, rng)?;
    Ok(SectorAnalysis {
        label: label.to_string(),
        check,
        decomposition,
        restricted,
        sectors,
        block_invariance,
        reassembly_residual,
    })
}

/// Per-sector analysis of `spec` under the strong symmetry `s`.
pub fn per_sector_ness(spec: &ModelSpec, s: &Operator, tol: f64) -> Result<SectorAnalysis> {
    let options = NessOptions { kernel_tol: tol, ..NessOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    per_sector_ness_of(&Lindbladian::from_spec(spec)?, "custom", s, &options, &mut rng)
}

/// Whether `L_m†` and `H + (i/2)Σ L†L` leave `Ker ρ` invariant.
#[derive(Clone, Debug, Serialize)]
pub struct KernelInvariance {
    /// Dimension of `Ker ρ`.
    pub null_dim: usize,
    /// `‖(I − P) L_m† P‖_HS / max(1, ‖L_m‖_HS)` with `P` the kernel projector.
    pub jump_adjoint_residuals: Vec<f64>,
    pub effective_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Checks the invariance of `Ker ρ` that any positive semidefinite
/// stationary `ρ` must satisfy. Eigenvectors of `ρ` with eigenvalue below
/// `tol` span the kernel.
pub fn kernel_invariance_diagnostic_of(l: &Lindbladian, rho: &Operator, tol: f64) -> Result<KernelInvariance> {
    if rho.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: rho.dim() });
    }
    let residual = l.apply(rho)?.hs_norm();
    if residual > STATIONARITY_TOL.max(tol) * rho.hs_norm().max(1.0) {
        return Err(Error::NotStationary { residual });
    }
    let (vals, vecs) = rho.hermitian_part().eigh()?;
    let null: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] < tol).collect();
    let d = l.dim();
    let p = faer::Mat::<c64>::from_fn(d, null.len(), |i, k| vecs[(i, null[k])]);
    let leak = |a: &Operator| -> f64 {
        if null.is_empty() {
            return 0.0;
        }
        let ap = a.as_mat() * &p;
        let back = &p * (p.adjoint() * &ap);
        (ap - back).norm_l2() / a.hs_norm().max(1.0)
    };
    let jump_adjoint_residuals: Vec<f64> = l.jumps().iter().map(|j| leak(&j.adjoint())).collect();
    let effective_residual = leak(&l.adjoint_effective_hamiltonian());
    let passed =
        effective_residual <= STATIONARITY_TOL && jump_adjoint_residuals.iter().all(|&r| r <= STATIONARITY_TOL);
    Ok(KernelInvariance { null_dim: null.len(), jump_adjoint_residuals, effective_residual, tol, passed })
}

pub fn kernel_invariance_diagnostic(spec: &ModelSpec, rho: &Operator, tol: f64) -> Result<KernelInvariance> {
    kernel_invariance_diagnostic_of(&Lindbladian::from_spec(spec)?, rho, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrigerioVerdict {
    TrivialCommutant,
    NontrivialCommutant,
}

/// Commutant of `{H, L_m, L_m†}`.
#[derive(Clone, Debug)]
pub struct FrigerioCheck {
    pub verdict: FrigerioVerdict,
    pub commutant: CommutantResult,
    /// Decisive only when a positive definite steady state is known;
    /// otherwise advisory.
    pub full_rank_ness_known: bool,
}

pub fn frigerio_check(l: &Lindbladian, tol: f64) -> Result<FrigerioCheck> {
    let commutant = closure::commutant(&closure::generators(l, GeneratorSet::Frigerio), l.dim(), tol)?;
    Ok(FrigerioCheck {
        verdict: if commutant.is_trivial() {
            FrigerioVerdict::TrivialCommutant
        } else {
            FrigerioVerdict::NontrivialCommutant
        },
        commutant,
        full_rank_ness_known: false,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyCheck {
    pub name: String,
    /// False when the premise of the implication does not hold.
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

impl ConsistencyCheck {
    fn implication(name: impl Into<String>, premise: bool, conclusion: bool, detail: String) -> Self {
        Self { name: name.into(), applicable: premise, passed: !premise || conclusion, detail }
    }
}

/// Generated dimension at a perturbed closure tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityPoint {
    pub tol: f64,
    pub generated_dim: usize,
    pub verdict: Verdict,
}

/// Everything [`full_verdict`] learned about one model.
#[derive(Clone, Debug)]
pub struct NessReport {
    pub dim: usize,
    pub theorem1: Theorem1Check,
    pub closure_stability: Vec<StabilityPoint>,
    pub hermitian_jumps: bool,
    /// `‖L̂(I/d)‖_HS`, computed when every jump operator is Hermitian.
    pub identity_residual: Option<f64>,
    pub frigerio: Option<FrigerioCheck>,
    pub steady: SteadyStates,
    pub sectors: Vec<SectorAnalysis>,
    pub kernel_invariance: Option<KernelInvariance>,
    pub consistency: Vec<ConsistencyCheck>,
    pub warnings: Vec<String>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<&'static str, f64>,
}

impl NessReport {
    pub fn kernel_dim(&self) -> usize {
        self.steady.kernel_dim()
    }

    pub fn theorem1_verdict(&self) -> Verdict {
        self.theorem1.verdict
    }

    pub fn all_consistent(&self) -> bool {
        self.consistency.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&ConsistencyCheck> {
        self.consistency.iter().filter(|c| !c.passed).collect()
    }
}

fn timed<T>(
    timings: &mut BTreeMap<&'static str, f64>,
    stage: &'static str,
    f: impl FnOnce() -> Result<T>,
) -> Result<T> {
    let start = Instant::now();
    let out = f().stage(stage);
    timings.insert(stage, start.elapsed().as_secs_f64());
    out
}

/// Runs every stage on `spec` and cross-checks the results.
pub fn full_verdict(spec: &ModelSpec, options: &NessOptions) -> Result<NessReport> {
    let mut timings = BTreeMap::new();
    let l = timed(&mut timings, "model", || {
        spec.validate()?;
        Lindbladian::from_spec(spec)
    })?;
    full_verdict_of(&l, spec, options, timings)
}

fn full_verdict_of(
    l: &Lindbladian,
    spec: &ModelSpec,
    options: &NessOptions,
    mut timings: BTreeMap<&'static str, f64>,
) -> Result<NessReport> {
    let d = l.dim();
    let mut warnings: Vec<String> = spec.warnings().into_iter().map(str::to_string).collect();
    let theorem1 =
        timed(&mut timings, "closure", || closure::check_lindbladian(l, options.closure_tol, options.max_basis))?;
    let closure_stability = timed(&mut timings, "closure_stability", || {
        let gens = closure::generators(l, GeneratorSet::Effective);
        options
            .stability_factors
            .iter()
            .map(|f| {
                let tol = options.closure_tol * f;
                let r = closure::algebra_closure(&gens, d, tol, options.max_basis)?;
                Ok(StabilityPoint { tol, generated_dim: r.generated_dim, verdict: r.verdict() })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let hermitian_jumps = theorem1.hermitian_jumps;
    let identity_residual = if hermitian_jumps {
        let mixed = Operator::identity(d).scaled(c64::new(1.0 / d as f64, 0.0));
        Some(l.apply(&mixed).stage("identity")?.hs_norm())
    } else {
        None
    };
    let steady = timed(&mut timings, "kernel", || steady_states_of(l, options.kernel_tol, options.max_dim))?;
    let mut frigerio = if d <= options.commutant_max_dim {
        Some(timed(&mut timings, "commutant", || frigerio_check(l, options.closure_tol))?)
    } else {
        warnings.push(format!("commutant skipped: dimension {d} exceeds {}", options.commutant_max_dim));
        None
    };
    let pd_known = steady.state.as_ref().is_some_and(SteadyState::is_positive_definite);
    if let Some(f) = frigerio.as_mut() {
        f.full_rank_ness_known = pd_known;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let symmetries = spec.symmetry_operators().stage("sectors")?;
    let mut sectors = Vec::with_capacity(symmetries.len());
    for (label, s) in &symmetries {
        sectors.push(timed(&mut timings, "sectors", || per_sector_ness_of(l, label, s, options, &mut rng))?);
    }
    let kernel_invariance = match &steady.state {
        Some(st) => Some(timed(&mut timings, "diagnostic", || kernel_invariance_diagnostic_of(l, &st.rho, 1e-9))?),
        None => None,
    };

    let certified = theorem1.verdict == Verdict::CertifiedUnique;
    let kdim = steady.kernel_dim();
    let mut consistency = vec![ConsistencyCheck::implication(
        "certified_implies_unique_kernel",
        certified,
        kdim == 1,
        format!("kernel dimension {kdim}"),
    )];
    let dims: Vec<String> =
        closure_stability.iter().map(|p| format!("{} at tol {:.0e}", p.generated_dim, p.tol)).collect();
    consistency.push(ConsistencyCheck::implication(
        "closure_dimension_stable_under_tolerance",
        !closure_stability.is_empty(),
        closure_stability
            .iter()
            .all(|p| p.generated_dim == theorem1.closure.generated_dim || p.verdict == Verdict::Inconclusive),
        format!("{} at tol {:.0e}; {}", theorem1.closure.generated_dim, options.closure_tol, dims.join(", ")),
    ));
    let min_eig = steady.state.as_ref().map_or(f64::NAN, |s| s.min_eigenvalue);
    consistency.push(ConsistencyCheck::implication(
        "certified_implies_positive_definite",
        certified,
        pd_known,
        format!("minimum eigenvalue {min_eig:.3e}"),
    ));
    if let Some(r) = identity_residual {
        consistency.push(ConsistencyCheck::implication(
            "hermitian_jumps_identity_stationary",
            true,
            r <= IDENTITY_RESIDUAL_TOL,
            format!("residual {r:.3e}"),
        ));
    }
    let dist = steady.state.as_ref().map_or(f64::NAN, SteadyState::distance_to_maximally_mixed);
    consistency.push(ConsistencyCheck::implication(
        "hermitian_certified_implies_maximally_mixed",
        certified && hermitian_jumps,
        dist <= STATE_MATCH_TOL,
        format!("distance to I/d {dist:.3e}"),
    ));
    consistency.push(ConsistencyCheck::implication(
        "steady_state_valid",
        steady.state.is_some(),
        steady.state.as_ref().is_some_and(SteadyState::is_valid),
        steady.state.as_ref().map_or_else(
            || "no positive semidefinite canonical state".to_string(),
            |s| {
                format!(
                    "stationarity {:.1e}, hermiticity {:.1e}, trace {:.1e}, min eigenvalue {:.3e}",
                    s.stationarity_residual, s.hermiticity_defect, s.trace_defect, s.min_eigenvalue
                )
            },
        ),
    ));
    if let Some(f) = &frigerio {
        // With a positive definite steady state, a trivial commutant is
        // equivalent to uniqueness.
        let unique = kdim == 1;
        consistency.push(ConsistencyCheck::implication(
            "frigerio_agrees_with_kernel",
            pd_known,
            f.commutant.is_trivial() == unique,
            format!("commutant dimension {}, kernel dimension {kdim}", f.commutant.commutant_dim),
        ));
    }
    for a in &sectors {
        for s in &a.sectors {
            let sec_certified = s.closure_verdict == Verdict::CertifiedUnique;
            consistency.push(ConsistencyCheck::implication(
                format!("{}[{}]:certified_implies_unique_kernel", a.label, s.sector),
                sec_certified,
                s.kernel_dim == 1,
                format!("sector kernel dimension {}", s.kernel_dim),
            ));
            let sd = s.distance_to_maximally_mixed().unwrap_or(f64::NAN);
            consistency.push(ConsistencyCheck::implication(
                format!("{}[{}]:hermitian_certified_implies_maximally_mixed", a.label, s.sector),
                sec_certified && hermitian_jumps,
                sd <= STATE_MATCH_TOL,
                format!("distance to I/d_α {sd:.3e}"),
            ));
        }
        let r = a.reassembly_residual;
        consistency.push(ConsistencyCheck::implication(
            format!("{}:reassembled_state_stationary", a.label),
            r.is_some(),
            r.is_some_and(|r| r <= STATIONARITY_TOL),
            r.map_or_else(|| "some sector has no state".into(), |r| format!("residual {r:.3e}")),
        ));
        consistency.push(ConsistencyCheck::implication(
            format!("{}:blocks_invariant", a.label),
            a.block_invariance.passed().is_some(),
            a.block_invariance.passed().unwrap_or(true),
            match &a.block_invariance {
                BlockInvariance::Checked { max_leakage, .. } => format!("max leakage {max_leakage:.3e}"),
                BlockInvariance::Skipped { reason } => reason.clone(),
            },
        ));
    }
    if let Some(k) = &kernel_invariance {
        consistency.push(ConsistencyCheck::implication(
            "steady_state_kernel_invariant",
            true,
            k.passed,
            format!("null dimension {}", k.null_dim),
        ));
    }

    Ok(NessReport {
        dim: d,
        theorem1,
        closure_stability,
        hermitian_jumps,
        identity_residual,
        frigerio,
        steady,
        sectors,
        kernel_invariance,
        consistency,
        warnings,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelspec::{build_builtin, parse_model, Params};

    fn builtin(name: &str, pairs: &[(&str, &str)]) -> ModelSpec {
        build_builtin(name, &Params::from_pairs(pairs.iter().copied())).unwrap()
    }

    fn pure_dephasing() -> ModelSpec {
        parse_model(
            r#"{"n_sites": 1, "hamiltonian": [],
                "lindblad": [{"label": "L1", "terms": [{"coeff": [1, 0], "factors": [{"site": 1, "op": "Z"}]}]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn gain_loss_matches_rate_equation() {
        let spec = builtin("two_level_gain_loss", &[("gamma_g", "1"), ("gamma_l", "2")]);
        let ss = steady_states(&spec, 1e-9).unwrap();
        assert_eq!(ss.kernel_dim(), 1);
        let rho = &ss.state.unwrap().rho;
        // Gain raises into the up state (index 0).
        let up = 1.0 / 3.0;
        assert!((rho.get(0, 0).re - up).abs() < 1e-8);
        assert!((rho.get(1, 1).re - (1.0 - up)).abs() < 1e-8);
        assert!(rho.get(0, 1).norm() < 1e-8);
    }

    #[test]
    fn tfim_state_is_maximally_mixed() {
        let spec = builtin("tfim_boundary_dephasing", &[("N", "3"), ("h_x", "1"), ("gamma", "0.5")]);
        let ss = steady_states(&spec, 1e-9).unwrap();
        assert_eq!(ss.kernel_dim(), 1);
        assert!(ss.state.unwrap().distance_to_maximally_mixed() < 1e-8);
    }

    #[test]
    fn degenerate_kernel_gets_a_canonical_state() {
        let ss = steady_states(&pure_dephasing(), 1e-9).unwrap();
        assert_eq!(ss.kernel_dim(), 2);
        assert!(ss.is_canonical_choice());
        assert_eq!(ss.hermitian_basis.len(), 2);
        let st = ss.state.unwrap();
        assert!(st.distance_to_maximally_mixed() < 1e-10);
    }

    #[test]
    fn kernel_invariance_examples() {
        let spec = pure_dephasing();
        let up = Operator::diagonal(&[c64::new(1.0, 0.0), c64::new(0.0, 0.0)]);
        let k = kernel_invariance_diagnostic(&spec, &up, 1e-9).unwrap();
        assert_eq!(k.null_dim, 1);
        assert!(k.passed);
        let bad = Operator::from_fn(2, |_, _| c64::new(0.5, 0.0));
        assert!(matches!(kernel_invariance_diagnostic(&spec, &bad, 1e-9), Err(Error::NotStationary { .. })));
    }

    #[test]
    fn pure_dephasing_full_verdict() {
        let r = full_verdict(&pure_dephasing(), &NessOptions::default()).unwrap();
        assert_eq!(r.theorem1_verdict(), Verdict::NotCertified);
        assert_eq!(r.kernel_dim(), 2);
        assert_eq!(r.frigerio.as_ref().unwrap().commutant.commutant_dim, 2);
        assert!(r.all_consistent(), "{:?}", r.failed_checks());
    }

    #[test]
    fn compass_sectors_are_unique() {
        let spec = builtin("compass_dephasing", &[("N", "4"), ("Jx", "1"), ("Jy", "0.7"), ("gamma", "1")]);
        let r = full_verdict(&spec, &NessOptions::default()).unwrap();
        assert_eq!(r.sectors.len(), 1);
        for s in &r.sectors[0].sectors {
            assert_eq!(s.closure_verdict, Verdict::CertifiedUnique);
            assert_eq!(s.kernel_dim, 1);
        }
        assert!(r.all_consistent(), "{:?}", r.failed_checks());
    }

    #[test]
    fn wrong_symmetry_is_a_stage_error() {
        let mut spec = builtin("tfim_boundary_dephasing", &[("N", "2"), ("h_x", "1"), ("gamma", "0.5")]);
        spec.symmetries.push(crate::modelspec::SymmetryDescriptor::ParityZ);
        let err = full_verdict(&spec, &NessOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "sectors", .. }));
        assert!(matches!(err.root(), Error::NotCommuting { .. }));
    }
}
