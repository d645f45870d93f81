//! Model descriptions: Hamiltonian and jump operators as weighted Pauli
//! strings, declared strong symmetries, and the JSON exchange format.

mod builtin;
mod lattice;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{c64, pauli_to_operator, Operator, PauliLetter, PauliTerm};

pub use builtin::{build_builtin, tight_binding_lattice, xyz_lattice, Params, BUILTINS};
pub use lattice::{lattice_connected, Bond, BondCoupling, LatticeSpec};

/// Largest number of sites a model may declare. The Liouvillian has
/// `4^n_sites` entries per side, so anything beyond this is unusable anyway.
pub const MAX_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleKind {
    SpinHalf,
    Fermion,
}

/// A unitary declared to commute with `H` and every jump operator.
#[derive(Clone, Debug, PartialEq)]
pub enum SymmetryDescriptor {
    /// `∏_j Z_j`.
    ParityZ,
    /// `exp(i N_tot)` with `N_tot = Σ_j n_j`, eigenvalues `e^{iα}`, `α = 0..N`.
    U1Number,
    Custom(Operator),
}

impl SymmetryDescriptor {
    pub fn label(&self) -> &'static str {
        match self {
            SymmetryDescriptor::ParityZ => "parity_z",
            SymmetryDescriptor::U1Number => "u1_number",
            SymmetryDescriptor::Custom(_) => "custom",
        }
    }

    pub fn operator(&self, n_sites: usize) -> Result<Operator> {
        match self {
            SymmetryDescriptor::ParityZ => parity_z(n_sites),
            SymmetryDescriptor::U1Number => Ok(u1_number(n_sites)),
            SymmetryDescriptor::Custom(op) => {
                if op.dim() != 1 << n_sites {
                    return Err(Error::DimensionMismatch { expected: 1 << n_sites, found: op.dim() });
                }
                Ok(op.clone())
            }
        }
    }
}

/// `S = ∏_j Z_j`.
pub fn parity_z(n_sites: usize) -> Result<Operator> {
    let term = PauliTerm::new(c64::new(1.0, 0.0), (1..=n_sites).map(|j| (j, PauliLetter::Z)))?;
    pauli_to_operator(&[term], n_sites)
}

/// `S = exp(i N_tot)`, diagonal in the occupation basis.
pub fn u1_number(n_sites: usize) -> Operator {
    let d = 1usize << n_sites;
    let diag: Vec<c64> = (0..d).map(|b| c64::from_polar(1.0, b.count_ones() as f64)).collect();
    Operator::diagonal(&diag)
}

/// One jump operator `L_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladOp {
    pub label: String,
    pub terms: Vec<PauliTerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub n_sites: usize,
    pub particle_kind: ParticleKind,
    pub hamiltonian: Vec<PauliTerm>,
    pub lindblad: Vec<LindbladOp>,
    pub symmetries: Vec<SymmetryDescriptor>,
    pub metadata: BTreeMap<String, String>,
}

impl ModelSpec {
    /// Hilbert space dimension `2^n_sites`.
    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Checks every structural invariant: site ranges, at least one jump
    /// operator, symmetry matrix sizes.
    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::Validation("n_sites must be at least 1".into()));
        }
        if self.n_sites > MAX_SITES {
            return Err(Error::Validation(format!(
                "n_sites = {} exceeds the supported maximum of {MAX_SITES}",
                self.n_sites
            )));
        }
        if self.lindblad.is_empty() {
            return Err(Error::Validation("at least one Lindblad operator is required".into()));
        }
        let check = |terms: &[PauliTerm], what: &str| -> Result<()> {
            for (k, t) in terms.iter().enumerate() {
                if let Some(site) = t.max_site() {
                    if site > self.n_sites {
                        return Err(Error::Validation(format!(
                            "{what} term {k}: site {site} out of range for n_sites = {}",
                            self.n_sites
                        )));
                    }
                }
            }
            Ok(())
        };
        check(&self.hamiltonian, "hamiltonian")?;
        for (m, op) in self.lindblad.iter().enumerate() {
            check(&op.terms, &format!("lindblad[{m}] ({})", op.label))?;
        }
        for sym in &self.symmetries {
            if let SymmetryDescriptor::Custom(op) = sym {
                if op.dim() != self.dim() {
                    return Err(Error::Validation(format!(
                        "custom symmetry matrix has dimension {}, expected {}",
                        op.dim(),
                        self.dim()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn hamiltonian_operator(&self) -> Result<Operator> {
        pauli_to_operator(&self.hamiltonian, self.n_sites)
    }

    pub fn lindblad_operators(&self) -> Result<Vec<Operator>> {
        self.lindblad.iter().map(|l| pauli_to_operator(&l.terms, self.n_sites)).collect()
    }

    pub fn symmetry_operators(&self) -> Result<Vec<(String, Operator)>> {
        self.symmetries.iter().map(|s| Ok((s.label().to_string(), s.operator(self.n_sites)?))).collect()
    }

    pub fn warnings(&self) -> Vec<&str> {
        self.metadata.iter().filter(|(k, _)| k.starts_with("warning")).map(|(_, v)| v.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serialization")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelFile::from(self)).expect("model serialization")
    }
}

/// Parses and validates a model in the JSON exchange format.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let spec = ModelSpec::try_from(file)?;
    spec.validate()?;
    Ok(spec)
}

// Wire format.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n_sites: usize,
    #[serde(default = "default_kind")]
    particle_kind: ParticleKind,
    hamiltonian: Vec<TermWire>,
    lindblad: Vec<LindbladWire>,
    #[serde(default)]
    symmetries: Vec<SymmetryWire>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

fn default_kind() -> ParticleKind {
    ParticleKind::SpinHalf
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermWire {
    coeff: [f64; 2],
    factors: Vec<FactorWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorWire {
    site: usize,
    op: PauliLetter,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LindbladWire {
    label: String,
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SymmetryWire {
    Named(String),
    Matrix { matrix: Vec<[f64; 2]> },
}

impl From<&PauliTerm> for TermWire {
    fn from(t: &PauliTerm) -> Self {
        TermWire {
            coeff: [t.coeff().re, t.coeff().im],
            factors: t.factors().iter().map(|&(site, op)| FactorWire { site, op }).collect(),
        }
    }
}

impl From<&ModelSpec> for ModelFile {
    fn from(spec: &ModelSpec) -> Self {
        ModelFile {
            n_sites: spec.n_sites,
            particle_kind: spec.particle_kind,
            hamiltonian: spec.hamiltonian.iter().map(TermWire::from).collect(),
            lindblad: spec
                .lindblad
                .iter()
                .map(|l| LindbladWire { label: l.label.clone(), terms: l.terms.iter().map(TermWire::from).collect() })
                .collect(),
            symmetries: spec
                .symmetries
                .iter()
                .map(|s| match s {
                    SymmetryDescriptor::Custom(op) => {
                        SymmetryWire::Matrix { matrix: op.to_row_major().iter().map(|z| [z.re, z.im]).collect() }
                    }
                    named => SymmetryWire::Named(named.label().to_string()),
                })
                .collect(),
            metadata: spec.metadata.clone(),
        }
    }
}

fn terms_from_wire(terms: Vec<TermWire>, what: &str) -> Result<Vec<PauliTerm>> {
    terms
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            PauliTerm::new(c64::new(t.coeff[0], t.coeff[1]), t.factors.into_iter().map(|f| (f.site, f.op)))
                .map_err(|e| Error::Validation(format!("{what} term {k}: {e}")))
        })
        .collect()
}

impl TryFrom<ModelFile> for ModelSpec {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<Self> {
        if file.n_sites == 0 || file.n_sites > MAX_SITES {
            return Err(Error::Validation(format!("n_sites must lie in 1..={MAX_SITES}, got {}", file.n_sites)));
        }
        let dim = 1usize << file.n_sites;
        let hamiltonian = terms_from_wire(file.hamiltonian, "hamiltonian")?;
        let lindblad = file
            .lindblad
            .into_iter()
            .enumerate()
            .map(|(m, l)| {
                let what = format!("lindblad[{m}] ({})", l.label);
                Ok(LindbladOp { terms: terms_from_wire(l.terms, &what)?, label: l.label })
            })
            .collect::<Result<Vec<_>>>()?;
        let symmetries = file
            .symmetries
            .into_iter()
            .map(|s| match s {
                SymmetryWire::Named(name) => match name.as_str() {
                    "parity_z" => Ok(SymmetryDescriptor::ParityZ),
                    "u1_number" => Ok(SymmetryDescriptor::U1Number),
                    other => Err(Error::Validation(format!(
                        "unknown symmetry `{other}` (expected parity_z, u1_number or a matrix)"
                    ))),
                },
                SymmetryWire::Matrix { matrix } => {
                    let entries: Vec<c64> = matrix.iter().map(|p| c64::new(p[0], p[1])).collect();
                    Operator::from_row_major(dim, &entries)
                        .map(SymmetryDescriptor::Custom)
                        .map_err(|e| Error::Validation(format!("custom symmetry matrix: {e}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelSpec {
            n_sites: file.n_sites,
            particle_kind: file.particle_kind,
            hamiltonian,
            lindblad,
            symmetries,
            metadata: file.metadata,
        })
    }
}
