//! JSON rendering of analysis results.
//!
//! Every report is wrapped in an envelope carrying `schema_version`, the tool
//! version, the model echo and the tolerances. Wall-clock timings live under
//! the top-level `timings` key and nowhere else, so two runs with the same
//! inputs differ only there.

use serde_json::{json, Map, Value};

use crate::closure::{ClosureResult, CommutantResult, RestrictedClosure, Theorem1Check};
use crate::liouvillian::Kernel;
use crate::modelspec::ModelSpec;
use crate::ness::{FrigerioCheck, NessOptions, NessReport, SectorAnalysis, SteadyState, SteadyStates};
use crate::opalg::{c64, Operator};
use crate::symmetry::SectorDecomposition;

pub const SCHEMA_VERSION: &str = "1";

/// Schema the envelope validates against.
pub const SCHEMA: &str = include_str!("../schema/report-v1.schema.json");

pub fn complex(z: c64) -> Value {
    json!([z.re, z.im])
}

/// `{dim, re, im}` with row-major nested rows.
pub fn operator(op: &Operator) -> Value {
    let d = op.dim();
    let rows =
        |f: fn(c64) -> f64| -> Vec<Vec<f64>> { (0..d).map(|i| (0..d).map(|j| f(op.get(i, j))).collect()).collect() };
    json!({ "dim": d, "re": rows(|z| z.re), "im": rows(|z| z.im) })
}

pub fn closure(c: &ClosureResult) -> Value {
    json!({
        "verdict": c.verdict(),
        "generated_dim": c.generated_dim,
        "full_dim_target": c.full_dim_target,
        "rounds": c.rounds,
        "saturated": c.saturated,
        "tol_used": c.tol_used,
        "min_accepted_residual": c.min_accepted_residual,
        "max_rejected_residual": c.max_rejected_residual,
        "candidates_tested": c.candidates_tested,
    })
}

pub fn theorem1(t: &Theorem1Check) -> Value {
    json!({
        "theorem1_verdict": t.verdict,
        "explanation": t.explanation(),
        "hermitian_jumps": t.hermitian_jumps,
        "closure": closure(&t.closure),
    })
}

pub fn commutant(c: &CommutantResult, with_basis: bool) -> Value {
    let mut v = json!({
        "commutant_dim": c.commutant_dim,
        "trivial": c.is_trivial(),
        "max_commutator_norm": c.max_commutator_norm,
        "tol_used": c.tol_used,
        "largest_null_sigma": c.largest_null_sigma,
        "smallest_nonnull_sigma": c.smallest_nonnull_sigma,
    });
    if with_basis {
        v["basis"] = Value::Array(c.basis.vectors().iter().map(operator).collect());
    }
    v
}

pub fn frigerio(f: &FrigerioCheck) -> Value {
    json!({
        "frigerio_verdict": f.verdict,
        "commutant_dim": f.commutant.commutant_dim,
        "full_rank_ness_known": f.full_rank_ness_known,
        "advisory": !f.full_rank_ness_known,
        "max_commutator_norm": f.commutant.max_commutator_norm,
        "smallest_nonnull_sigma": f.commutant.smallest_nonnull_sigma,
    })
}

pub fn kernel(k: &Kernel) -> Value {
    json!({
        "kernel_dim": k.dim(),
        "sigma_max": k.sigma_max,
        "cutoff": k.cutoff,
        "largest_null_sigma": k.largest_null_sigma,
        "smallest_nonnull_sigma": k.smallest_nonnull_sigma,
    })
}

pub fn steady_state(s: &SteadyState) -> Value {
    json!({
        "rho": operator(&s.rho),
        "min_eigenvalue": s.min_eigenvalue,
        "max_eigenvalue": s.max_eigenvalue,
        "positivity_ratio": s.positivity_ratio(),
        "positive_definite": s.is_positive_definite(),
        "stationarity_residual": s.stationarity_residual,
        "hermiticity_defect": s.hermiticity_defect,
        "trace_defect": s.trace_defect,
        "distance_to_maximally_mixed": s.distance_to_maximally_mixed(),
    })
}

pub fn steady_states(s: &SteadyStates) -> Value {
    json!({
        "kernel": kernel(&s.kernel),
        "kernel_dim": s.kernel_dim(),
        "canonical_choice": s.is_canonical_choice(),
        "steady_states": s.state.iter().map(steady_state).collect::<Vec<_>>(),
        "min_eigenvalues": s.state.iter().map(|st| st.min_eigenvalue).collect::<Vec<_>>(),
        "hermitian_kernel_basis": s.hermitian_basis.iter().map(operator).collect::<Vec<_>>(),
    })
}

pub fn decomposition(d: &SectorDecomposition) -> Value {
    Value::Array(
        (0..d.n_sectors())
            .map(|a| {
                json!({
                    "sector": a,
                    "eigenvalue": complex(d.eigenvalues()[a]),
                    "theta": d.angles()[a],
                    "dim": d.dims()[a],
                })
            })
            .collect(),
    )
}

pub fn restricted(r: &RestrictedClosure) -> Value {
    json!({
        "verdict": r.verdict(),
        "commutant_target": r.commutant_target,
        "generated_total": r.generated_total,
        "sectors": r.sectors.iter().map(|s| json!({
            "sector": s.sector,
            "eigenvalue": complex(s.eigenvalue),
            "dim": s.dim,
            "closure": closure(&s.closure),
        })).collect::<Vec<_>>(),
    })
}

pub fn sector_analysis(a: &SectorAnalysis) -> Value {
    json!({
        "symmetry": a.label,
        "strong_symmetry": a.check,
        "n_sectors": a.decomposition.n_sectors(),
        "restricted_closure": restricted(&a.restricted),
        "sectors": a.sectors.iter().map(|s| json!({
            "sector": s.sector,
            "eigenvalue": complex(s.eigenvalue),
            "theta": s.angle,
            "dim": s.dim,
            "closure_verdict": s.closure_verdict,
            "generated_dim": s.generated_dim,
            "target_dim": s.dim * s.dim,
            "kernel_dim": s.kernel_dim,
            "unique": s.kernel_dim == 1,
            "state": s.state.as_ref().map(steady_state),
            "distance_to_maximally_mixed": s.distance_to_maximally_mixed(),
        })).collect::<Vec<_>>(),
        "block_invariance": a.block_invariance,
        "reassembly_residual": a.reassembly_residual,
    })
}

pub fn ness_report(r: &NessReport) -> Value {
    json!({
        "dim": r.dim,
        "theorem1_verdict": r.theorem1.verdict,
        "theorem1": theorem1(&r.theorem1),
        "closure_stability": r.closure_stability,
        "hermitian_jumps": r.hermitian_jumps,
        "identity_residual": r.identity_residual,
        "frigerio": r.frigerio.as_ref().map(frigerio),
        "kernel_dim": r.kernel_dim(),
        "steady": steady_states(&r.steady),
        "per_sector": r.sectors.iter().map(sector_analysis).collect::<Vec<_>>(),
        "kernel_invariance": r.kernel_invariance,
        "consistency": r.consistency,
        "all_consistent": r.all_consistent(),
    })
}

pub fn tolerances(o: &NessOptions) -> Value {
    json!({
        "closure": o.closure_tol,
        "kernel": o.kernel_tol,
        "cluster": o.cluster_tol,
        "symmetry": o.symmetry_tol,
        "max_basis": o.max_basis,
        "max_dim": o.max_dim,
        "block_trials": o.block_trials,
    })
}

/// Wraps a command result in the versioned envelope.
pub fn envelope(
    command: &str,
    source: Value,
    spec: &ModelSpec,
    options: &NessOptions,
    result: Value,
    warnings: &[String],
    timings: Map<String, Value>,
) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "tool": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "command": command,
        "source": source,
        "model": spec.to_json_value(),
        "tolerances": tolerances(options),
        "seed": options.seed,
        "result": result,
        "warnings": warnings,
        "timings": Value::Object(timings),
    })
}

/// Removes the `timings` key, leaving only deterministic content.
pub fn strip_timings(mut report: Value) -> Value {
    if let Some(obj) = report.as_object_mut() {
        obj.remove("timings");
    }
    report
}
