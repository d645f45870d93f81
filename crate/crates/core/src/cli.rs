//! The `lindblad-certify` command line.
//!
//! ```text
//! lindblad-certify <check|ness|sectors|closure|commutant|spectrum|full>
//!     (--builtin NAME | --model PATH) [-p key=value]... [--tol X]
//!     [--max-basis K] [--json] [--seed S] [--out PATH]
//! ```
//!
//! Exit codes: 0 when the analysis completed (whatever the verdict), 2 for
//! usage and model errors, 3 for numerical failures, 4 when a closure hit
//! its basis limit without a verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::closure::{self, GeneratorSet, Verdict};
use crate::error::{Error, Result, StageExt};
use crate::liouvillian::{self, Lindbladian};
use crate::modelspec::{build_builtin, parse_model, ModelSpec, Params, SymmetryDescriptor};
use crate::ness::{self, NessOptions, NessReport};
use crate::report;
use crate::symmetry::BlockInvariance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lindblad-certify", version, about = "Certify uniqueness of Lindblad steady states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Algebraic generation test on {K, L_1, ..., L_M}.
    Check(RunArgs),
    /// Steady states from the Liouvillian kernel.
    Ness(RunArgs),
    /// Per-sector closure and steady states for each strong symmetry.
    Sectors(RunArgs),
    /// Generated algebra of a chosen generator set.
    Closure(RunArgs),
    /// Commutant of a chosen generator set.
    Commutant(RunArgs),
    /// Eigenvalues of the Liouvillian.
    Spectrum(RunArgs),
    /// Every stage plus consistency checks.
    Full(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::Ness(_) => "ness",
            Command::Sectors(_) => "sectors",
            Command::Closure(_) => "closure",
            Command::Commutant(_) => "commutant",
            Command::Spectrum(_) => "spectrum",
            Command::Full(_) => "full",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Check(a)
            | Command::Ness(a)
            | Command::Sectors(a)
            | Command::Closure(a)
            | Command::Commutant(a)
            | Command::Spectrum(a)
            | Command::Full(a) => a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeneratorChoice {
    /// H - (i/2) sum L^dag L and every L.
    Effective,
    /// H + (i/2) sum L^dag L and every L^dag.
    Adjoint,
    /// H and every L.
    Hamiltonian,
    /// H, every L and every L^dag.
    Frigerio,
}

impl From<GeneratorChoice> for GeneratorSet {
    fn from(c: GeneratorChoice) -> Self {
        match c {
            GeneratorChoice::Effective => GeneratorSet::Effective,
            GeneratorChoice::Adjoint => GeneratorSet::AdjointEffective,
            GeneratorChoice::Hamiltonian => GeneratorSet::Hamiltonian,
            GeneratorChoice::Frigerio => GeneratorSet::Frigerio,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SymmetryChoice {
    ParityZ,
    U1Number,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["builtin", "model"]))]
pub struct RunArgs {
    /// Builtin model name.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Model JSON file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Builtin parameter, repeatable.
    #[arg(short = 'p', long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Rank tolerance for closure, commutant and kernel.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Stop closures at this many basis elements.
    #[arg(long)]
    pub max_basis: Option<usize>,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    pub json: bool,
    /// Seed for randomized block-invariance trials.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Generator set for `closure` and `commutant`.
    #[arg(long, value_enum)]
    pub generators: Option<GeneratorChoice>,
    /// Extra strong symmetry to analyse, added to the declared ones.
    #[arg(long, value_enum)]
    pub symmetry: Vec<SymmetryChoice>,
    /// Largest Hilbert space dimension for Liouvillian assembly.
    #[arg(long, default_value_t = liouvillian::DEFAULT_MAX_DIM)]
    pub max_dim: usize,
}

impl RunArgs {
    fn options(&self) -> NessOptions {
        NessOptions {
            closure_tol: self.tol,
            kernel_tol: self.tol,
            max_basis: self.max_basis,
            seed: self.seed,
            max_dim: self.max_dim,
            ..NessOptions::default()
        }
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Numerical(_) | Error::NonFinite(_) | Error::NotStationary { .. } | Error::AmbiguousClustering(_) => {
            EXIT_NUMERICAL
        }
        _ => EXIT_USAGE,
    }
}

struct Loaded {
    spec: ModelSpec,
    source: Value,
    name: String,
}

fn load(args: &RunArgs) -> Result<Loaded> {
    let mut loaded = if let Some(name) = &args.builtin {
        let mut params = Params::new();
        for p in &args.params {
            params.insert_assignment(p)?;
        }
        let spec = build_builtin(name, &params)?;
        let echo: BTreeMap<&str, &str> = params.entries().collect();
        Loaded { spec, source: json!({ "builtin": name, "params": echo }), name: name.clone() }
    } else {
        let path = args.model.as_ref().expect("clap requires a source");
        if !args.params.is_empty() {
            return Err(Error::Validation("-p only applies to --builtin models".into()));
        }
        let text = std::fs::read_to_string(path)?;
        Loaded {
            spec: parse_model(&text)?,
            source: json!({ "file": path.display().to_string() }),
            name: path.display().to_string(),
        }
    };
    for s in &args.symmetry {
        let desc = match s {
            SymmetryChoice::ParityZ => SymmetryDescriptor::ParityZ,
            SymmetryChoice::U1Number => SymmetryDescriptor::U1Number,
        };
        if !loaded.spec.symmetries.contains(&desc) {
            loaded.spec.symmetries.push(desc);
        }
    }
    loaded.spec.validate()?;
    Ok(loaded)
}

struct Outcome {
    result: Value,
    text: String,
    inconclusive: bool,
    warnings: Vec<String>,
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::CertifiedUnique => "certified unique (algebraic generation criterion)",
        Verdict::NotCertified => "not certified (sufficient condition fails; degeneracy not implied)",
        Verdict::Inconclusive => "inconclusive (basis limit reached)",
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.3e}"))
}

fn closure_text(out: &mut String, c: &closure::ClosureResult) {
    let _ = writeln!(
        out,
        "  generated dimension {} / {} after {} round(s), saturated: {}, tol {:.1e}, weakest accepted residual {}, largest rejected residual {:.3e}",
        c.generated_dim,
        c.full_dim_target,
        c.rounds,
        c.saturated,
        c.tol_used,
        fmt_opt(c.min_accepted_residual),
        c.max_rejected_residual
    );
}

fn steady_text(out: &mut String, s: &ness::SteadyStates) {
    let _ = writeln!(out, "Liouvillian kernel dim: {}", s.kernel_dim());
    match &s.state {
        Some(st) if s.is_canonical_choice() => {
            let _ = writeln!(
                out,
                "  canonical steady state (projection of I/d, not unique): min eigenvalue {:.6e}, distance to I/d {:.3e}",
                st.min_eigenvalue,
                st.distance_to_maximally_mixed()
            );
        }
        Some(st) => {
            let _ = writeln!(
                out,
                "  steady state: min eigenvalue {:.6e} (ratio {:.3e}), positive definite: {}, distance to I/d {:.3e}, residual {:.1e}",
                st.min_eigenvalue,
                st.positivity_ratio(),
                st.is_positive_definite(),
                st.distance_to_maximally_mixed(),
                st.stationarity_residual
            );
        }
        None => {
            let _ = writeln!(out, "  no positive semidefinite canonical state; Hermitian kernel basis reported");
        }
    }
}

fn sectors_text(out: &mut String, a: &ness::SectorAnalysis) {
    let _ = writeln!(
        out,
        "strong symmetry sectors for {}: {} sector(s), restricted closure {} / {} ({})",
        a.label,
        a.decomposition.n_sectors(),
        a.restricted.generated_total,
        a.restricted.commutant_target,
        a.restricted.verdict().as_str()
    );
    for s in &a.sectors {
        let _ = writeln!(
            out,
            "  s = {:+.4}{:+.4}i (theta {:.4}): d = {}, closure {} / {} {}, kernel dim {}, distance to I/d {}",
            s.eigenvalue.re,
            s.eigenvalue.im,
            s.angle,
            s.dim,
            s.generated_dim,
            s.dim * s.dim,
            s.closure_verdict.as_str(),
            s.kernel_dim,
            fmt_opt(s.distance_to_maximally_mixed())
        );
    }
    let _ = match &a.block_invariance {
        BlockInvariance::Checked { passed, trials_per_block, blocks, max_leakage } => writeln!(
            out,
            "  block invariance: {blocks} block(s), {trials_per_block} trial(s) each, max leakage {max_leakage:.3e}, {}",
            if *passed { "passed" } else { "FAILED" }
        ),
        BlockInvariance::Skipped { reason } => writeln!(out, "  block invariance: skipped ({reason})"),
    };
}

fn full_text(out: &mut String, r: &NessReport) {
    let _ = writeln!(out, "generation test: {}", verdict_text(r.theorem1.verdict));
    closure_text(out, &r.theorem1.closure);
    if let Some(res) = r.identity_residual {
        let _ = writeln!(out, "all jump operators Hermitian: |L(I/d)| = {res:.3e}, predicted steady state I/d");
    }
    if let Some(f) = &r.frigerio {
        let _ = writeln!(
            out,
            "Frigerio commutant dim: {} ({}{})",
            f.commutant.commutant_dim,
            if f.commutant.is_trivial() { "trivial" } else { "nontrivial" },
            if f.full_rank_ness_known {
                ", positive definite steady state known"
            } else {
                ", advisory: no positive definite steady state known"
            }
        );
    }
    steady_text(out, &r.steady);
    for a in &r.sectors {
        sectors_text(out, a);
    }
    let failed = r.failed_checks();
    let _ = writeln!(out, "consistency checks: {} run, {} failed", r.consistency.len(), failed.len());
    for c in failed {
        let _ = writeln!(out, "  FAILED {}: {}", c.name, c.detail);
    }
}

fn execute(cmd: &Command, loaded: &Loaded, timings: &mut Map<String, Value>) -> Result<Outcome> {
    let args = cmd.args();
    let options = args.options();
    let spec = &loaded.spec;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "model: {} ({} site(s), d = {}, {} jump operator(s))",
        loaded.name,
        spec.n_sites,
        spec.dim(),
        spec.lindblad.len()
    );
    let mut warnings: Vec<String> = spec.warnings().into_iter().map(str::to_string).collect();
    let l = Lindbladian::from_spec(spec).stage("model")?;
    let mut time = |stage: &str, start: Instant| {
        timings.insert(stage.to_string(), json!(start.elapsed().as_secs_f64()));
    };
    let mut inconclusive = false;
    let result = match cmd {
        Command::Check(_) => {
            let t = Instant::now();
            let check = closure::check_lindbladian(&l, options.closure_tol, options.max_basis).stage("closure")?;
            time("closure", t);
            inconclusive = check.verdict == Verdict::Inconclusive;
            let _ = writeln!(text, "generation test: {}", verdict_text(check.verdict));
            closure_text(&mut text, &check.closure);
            let _ = writeln!(text, "  {}", check.explanation());
            report::theorem1(&check)
        }
        Command::Closure(a) => {
            let set = a.generators.unwrap_or(GeneratorChoice::Effective);
            let t = Instant::now();
            let gens = closure::generators(&l, set.into());
            let c =
                closure::algebra_closure(&gens, l.dim(), options.closure_tol, options.max_basis).stage("closure")?;
            time("closure", t);
            inconclusive = c.verdict() == Verdict::Inconclusive;
            let _ = writeln!(text, "closure of the {:?} generator set:", set);
            closure_text(&mut text, &c);
            let name = set.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            json!({ "generator_set": name, "closure": report::closure(&c) })
        }
        Command::Commutant(a) => {
            let set = a.generators.unwrap_or(GeneratorChoice::Frigerio);
            let t = Instant::now();
            let gens = closure::generators(&l, set.into());
            let c = closure::commutant(&gens, l.dim(), options.closure_tol).stage("commutant")?;
            time("commutant", t);
            let _ = writeln!(
                text,
                "Frigerio commutant dim: {} ({:?} generator set, max commutator {:.3e})",
                c.commutant_dim, set, c.max_commutator_norm
            );
            let name = set.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            json!({ "generator_set": name, "commutant": report::commutant(&c, l.dim() <= 16) })
        }
        Command::Spectrum(_) => {
            let t = Instant::now();
            let lm = liouvillian::assemble_with_limit(&l, options.max_dim).stage("assemble")?;
            let mut ev = liouvillian::spectrum(&lm).stage("spectrum")?;
            time("spectrum", t);
            ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
            let scale = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let max_re = ev.first().map_or(f64::NAN, |z| z.re);
            let n_zero = ev.iter().filter(|z| z.norm() <= options.kernel_tol * scale.max(1.0)).count();
            let _ = writeln!(
                text,
                "Liouvillian spectrum: {} eigenvalues, max real part {max_re:.3e}, {n_zero} within tolerance of zero",
                ev.len()
            );
            json!({
                "eigenvalues": ev.iter().map(|&z| report::complex(z)).collect::<Vec<_>>(),
                "max_real_part": max_re,
                "n_zero": n_zero,
            })
        }
        Command::Ness(_) => {
            let t = Instant::now();
            let s = ness::steady_states_of(&l, options.kernel_tol, options.max_dim).stage("kernel")?;
            time("kernel", t);
            steady_text(&mut text, &s);
            let mut v = report::steady_states(&s);
            if let Some(st) = &s.state {
                let diag = ness::kernel_invariance_diagnostic_of(&l, &st.rho, 1e-9).stage("diagnostic")?;
                let _ = writeln!(
                    text,
                    "  kernel invariance of the state: null dim {}, passed: {}",
                    diag.null_dim, diag.passed
                );
                v["kernel_invariance"] = json!(diag);
            }
            v
        }
        Command::Sectors(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            let syms = spec.symmetry_operators().stage("sectors")?;
            if syms.is_empty() {
                warnings.push("no strong symmetry declared; pass --symmetry to analyse one".into());
            }
            let t = Instant::now();
            let mut out = Vec::new();
            for (label, s) in &syms {
                let a = ness::per_sector_ness_of(&l, label, s, &options, &mut rng).stage("sectors")?;
                inconclusive |= a.restricted.verdict() == Verdict::Inconclusive;
                sectors_text(&mut text, &a);
                out.push(report::sector_analysis(&a));
            }
            time("sectors", t);
            json!({ "per_sector": out })
        }
        Command::Full(_) => {
            let r = ness::full_verdict(spec, &options)?;
            for (k, v) in &r.timings {
                timings.insert(k.to_string(), json!(v));
            }
            inconclusive = r.theorem1.verdict == Verdict::Inconclusive;
            warnings.extend(r.warnings.iter().filter(|w| !warnings.contains(w)).cloned().collect::<Vec<_>>());
            full_text(&mut text, &r);
            report::ness_report(&r)
        }
    };
    for w in &warnings {
        let _ = writeln!(text, "warning: {w}");
    }
    Ok(Outcome { result, text, inconclusive, warnings })
}

/// Parses `argv` (including the program name), runs the command and writes
/// the report to `stdout` or `--out`. Diagnostics go to `stderr`.
pub fn run_with(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let args = cli.command.args();
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        let _ = writeln!(stderr, "error: --tol must be positive, got {}", args.tol);
        return EXIT_USAGE;
    }
    let start = Instant::now();
    let loaded = match load(args) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let mut timings = Map::new();
    let outcome = match execute(&cli.command, &loaded, &mut timings) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    timings.insert("total".into(), json!(start.elapsed().as_secs_f64()));

    let body = if args.json {
        let env = report::envelope(
            cli.command.name(),
            loaded.source.clone(),
            &loaded.spec,
            &args.options(),
            outcome.result,
            &outcome.warnings,
            timings,
        );
        let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
        s.push('\n');
        s
    } else {
        outcome.text
    };
    let written = match &args.out {
        Some(path) => std::fs::write(path, body.as_bytes()),
        None => stdout.write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    if outcome.inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

/// [`run_with`] on the process streams.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> =
            std::iter::once("lindblad-certify").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(&argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn check_emits_json() {
        let (code, out, _) = call(&[
            "check",
            "--builtin",
            "tfim_boundary_dephasing",
            "-p",
            "N=3",
            "-p",
            "h_x=1",
            "-p",
            "gamma=0.5",
            "--json",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["theorem1_verdict"], "certified_unique");
        assert_eq!(v["schema_version"], report::SCHEMA_VERSION);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["closure", "--model", "/nonexistent/badpath.json"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["check", "--builtin", "nope"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("tfim_boundary_dephasing"));
        assert_eq!(call(&["check"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate", "--builtin", "x"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["check", "--builtin", "two_level_gain_loss", "-p", "gamma_g=1", "-p", "gamma_l=1", "--tol", "0"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn basis_limit_exits_four() {
        let (code, out, _) = call(&[
            "check",
            "--builtin",
            "two_level_gain_loss",
            "-p",
            "gamma_g=1",
            "-p",
            "gamma_l=2",
            "--max-basis",
            "2",
        ]);
        assert_eq!(code, EXIT_INCONCLUSIVE);
        assert!(out.contains("inconclusive"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("full"));
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(exit_code(&Error::Numerical("x".into()).at_stage("kernel")), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::MissingParameter("N".into())), EXIT_USAGE);
    }
}
