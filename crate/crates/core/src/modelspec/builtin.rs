//! Named model builders: two-level gain/loss, transverse-field Ising with
//! boundary dephasing, XYZ and compass chains with bulk dephasing, the
//! tight-binding ring with bulk dephasing, and their general-lattice forms.

use std::collections::{BTreeMap, BTreeSet};

use super::lattice::parse_bond_list;
use super::{BondCoupling, LatticeSpec, LindbladOp, ModelSpec, ParticleKind, SymmetryDescriptor};
use crate::error::{Error, Result};
use crate::opalg::{c64, hopping_terms, jordan_wigner_terms, FermionOp, PauliLetter, PauliTerm};

pub const BUILTINS: [&str; 7] = [
    "two_level_gain_loss",
    "tfim_boundary_dephasing",
    "xyz_bulk_dephasing",
    "compass_dephasing",
    "tight_binding_dephasing",
    "xyz_lattice",
    "tight_binding_lattice",
];

/// Default identity shift of the tight-binding Hamiltonian.
pub const DEFAULT_DELTA: f64 = 0.3;

/// Builder parameters as `key=value` strings. Keys are matched ignoring case
/// and underscores, so `h_x`, `hx` and `HX` are the same parameter.
#[derive(Clone, Debug, Default)]
pub struct Params {
    values: BTreeMap<String, (String, String)>,
}

fn normalize(key: &str) -> String {
    key.chars().filter(|c| *c != '_').flat_map(char::to_lowercase).collect()
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.values.insert(normalize(key), (key.to_string(), value.to_string()));
        self
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.set(key, value);
        self
    }

    /// Parses one `key=value` argument.
    pub fn insert_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| Error::InvalidParameter {
            name: assignment.to_string(),
            reason: "expected key=value".into(),
        })?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut p = Self::new();
        for (k, v) in pairs {
            p.set(k, v);
        }
        p
    }

    /// Parameters with their keys as originally spelled.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.values().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize(key)).map(|(_, v)| v.as_str())
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| {
                v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| Error::InvalidParameter {
                    name: key.into(),
                    reason: format!("`{v}` is not a finite number"),
                })
            })
            .transpose()
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?.ok_or_else(|| Error::MissingParameter(key.into()))
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.f64(key)?;
        if v <= 0.0 {
            return Err(Error::InvalidParameter { name: key.into(), reason: format!("must be > 0, got {v}") });
        }
        Ok(v)
    }

    fn sites(&self, min: usize) -> Result<usize> {
        let v = self.raw("N").ok_or_else(|| Error::MissingParameter("N".into()))?;
        let n: usize = v.parse().map_err(|_| Error::InvalidParameter {
            name: "N".into(),
            reason: format!("`{v}` is not a positive integer"),
        })?;
        if n < min || n > super::MAX_SITES {
            return Err(Error::InvalidParameter {
                name: "N".into(),
                reason: format!("must lie in {min}..={}, got {n}", super::MAX_SITES),
            });
        }
        Ok(n)
    }

    fn reject_unknown(&self, builtin: &str, allowed: &[&str]) -> Result<()> {
        let allowed: BTreeSet<String> = allowed.iter().map(|k| normalize(k)).collect();
        for (norm, (orig, _)) in &self.values {
            if !allowed.contains(norm) {
                return Err(Error::InvalidParameter {
                    name: orig.clone(),
                    reason: format!("not a parameter of `{builtin}`"),
                });
            }
        }
        Ok(())
    }
}

fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

fn term(coeff: f64, factors: &[(usize, PauliLetter)]) -> Result<PauliTerm> {
    PauliTerm::new(re(coeff), factors.iter().copied())
}

fn dephasing_z(n: usize, gammas: &[f64]) -> Result<Vec<LindbladOp>> {
    (1..=n)
        .map(|j| {
            Ok(LindbladOp {
                label: format!("dephasing_{j}"),
                terms: vec![term(gammas[j - 1].sqrt(), &[(j, PauliLetter::Z)])?],
            })
        })
        .collect()
}

fn xyz_bond(a: usize, b: usize, jx: f64, jy: f64, jz: f64) -> Result<Vec<PauliTerm>> {
    use PauliLetter::{X, Y, Z};
    [(jx, X), (jy, Y), (jz, Z)]
        .into_iter()
        .filter(|(j, _)| *j != 0.0)
        .map(|(j, l)| term(j, &[(a, l), (b, l)]))
        .collect()
}

struct Meta(BTreeMap<String, String>);

impl Meta {
    fn new(builtin: &str) -> Self {
        Self(BTreeMap::from([("builtin".to_string(), builtin.to_string())]))
    }
    fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.insert(format!("param.{key}"), value.to_string());
        self
    }
    fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }
    fn warn(&mut self, msg: String) -> &mut Self {
        let k = self.0.keys().filter(|k| k.starts_with("warning")).count();
        self.0.insert(format!("warning.{k}"), msg);
        self
    }
}

/// Builds a named model.
pub fn build_builtin(name: &str, params: &Params) -> Result<ModelSpec> {
    let spec = match name {
        "two_level_gain_loss" => two_level_gain_loss(params),
        "tfim_boundary_dephasing" => tfim_boundary_dephasing(params),
        "xyz_bulk_dephasing" => xyz_bulk_dephasing(params),
        "compass_dephasing" => compass_dephasing(params),
        "tight_binding_dephasing" => tight_binding_dephasing(params),
        "xyz_lattice" => xyz_lattice_from_params(params),
        "tight_binding_lattice" => tight_binding_lattice_from_params(params),
        other => Err(Error::UnknownBuiltin { name: other.to_string(), available: BUILTINS.to_vec() }),
    }?;
    spec.validate()?;
    Ok(spec)
}

/// One spin with gain `√γ_g |↑⟩⟨↓|`, loss `√γ_l |↓⟩⟨↑|` and an optional field
/// `H = hx X + hy Y + hz Z`.
fn two_level_gain_loss(p: &Params) -> Result<ModelSpec> {
    p.reject_unknown("two_level_gain_loss", &["gamma_g", "gamma_l", "hx", "hy", "hz"])?;
    let gamma_g = p.positive("gamma_g")?;
    let gamma_l = p.positive("gamma_l")?;
    let mut meta = Meta::new("two_level_gain_loss");
    meta.param("gamma_g", gamma_g).param("gamma_l", gamma_l);
    let mut hamiltonian = Vec::new();
    for (key, letter) in [("hx", PauliLetter::X), ("hy", PauliLetter::Y), ("hz", PauliLetter::Z)] {
        let h = p.f64_opt(key)?.unwrap_or(0.0);
        meta.param(key, h);
        if h != 0.0 {
            hamiltonian.push(term(h, &[(1, letter)])?);
        }
    }
    Ok(ModelSpec {
        n_sites: 1,
        particle_kind: ParticleKind::SpinHalf,
        hamiltonian,
        lindblad: vec![
            LindbladOp { label: "gain".into(), terms: vec![term(gamma_g.sqrt(), &[(1, PauliLetter::Plus)])?] },
            LindbladOp { label: "loss".into(), terms: vec![term(gamma_l.sqrt(), &[(1, PauliLetter::Minus)])?] },
        ],
        symmetries: Vec::new(),
        metadata: meta.0,
    })
}

/// Open chain `H = Σ_{j<N} Z_j Z_{j+1} + h_x Σ_j X_j`, single jump `√γ Z_1`.
fn tfim_boundary_dephasing(p: &Params) -> Result<ModelSpec> {
    p.reject_unknown("tfim_boundary_dephasing", &["N", "h_x", "gamma"])?;
    let n = p.sites(1)?;
    let h_x = p.f64("h_x")?;
    let gamma = p.positive("gamma")?;
    let mut meta = Meta::new("tfim_boundary_dephasing");
    meta.param("N", n).param("h_x", h_x).param("gamma", gamma).set("boundary", "open");
    if h_x == 0.0 {
        meta.warn("h_x = 0: the Hamiltonian is diagonal and the NESS is degenerate".into());
    }
    let mut hamiltonian = Vec::new();
    for j in 1..n {
        hamiltonian.push(term(1.0, &[(j, PauliLetter::Z), (j + 1, PauliLetter::Z)])?);
    }
    if h_x != 0.0 {
        for j in 1..=n {
            hamiltonian.push(term(h_x, &[(j, PauliLetter::X)])?);
        }
    }
    Ok(ModelSpec {
        n_sites: n,
        particle_kind: ParticleKind::SpinHalf,
        hamiltonian,
        lindblad: vec![LindbladOp {
            label: "dephasing_1".into(),
            terms: vec![term(gamma.sqrt(), &[(1, PauliLetter::Z)])?],
        }],
        symmetries: Vec::new(),
        metadata: meta.0,
    })
}

/// Periodic chain `H = Σ_j (Jx XX + Jy YY + Jz ZZ)_{j,j+1} + hz Σ_j Z_j` with
/// `√γ Z_j` on every site.
fn xyz_bulk_dephasing(p: &Params) -> Result<ModelSpec> {
    p.reject_unknown("xyz_bulk_dephasing", &["N", "Jx", "Jy", "Jz", "hz", "gamma"])?;
    let n = p.sites(2)?;
    let (jx, jy, jz) = (p.f64("Jx")?, p.f64("Jy")?, p.f64("Jz")?);
    let hz = p.f64_opt("hz")?.unwrap_or(0.0);
    let gamma = p.positive("gamma")?;
    let mut meta = Meta::new("xyz_bulk_dephasing");
    meta.param("N", n)
        .param("Jx", jx)
        .param("Jy", jy)
        .param("Jz", jz)
        .param("hz", hz)
        .param("gamma", gamma)
        .set("boundary", "periodic");
    if jx.abs() == jy.abs() {
        meta.warn(format!(
            "|Jx| = |Jy| = {}: an additional U(1) symmetry is present and parity sectors need not close",
            jx.abs()
        ));
    }
    let mut hamiltonian = Vec::new();
    for j in 1..=n {
        let k = if j == n { 1 } else { j + 1 };
        hamiltonian.extend(xyz_bond(j, k, jx, jy, jz)?);
    }
    if hz != 0.0 {
        for j in 1..=n {
            hamiltonian.push(term(hz, &[(j, PauliLetter::Z)])?);
        }
    }
    Ok(ModelSpec {
        n_sites: n,
        particle_kind: ParticleKind::SpinHalf,
        hamiltonian,
        lindblad: dephasing_z(n, &vec![gamma; n])?,
        symmetries: vec![SymmetryDescriptor::ParityZ],
        metadata: meta.0,
    })
}

/// `H = −Jx Σ_{j≤N/2} X_{2j−1} X_{2j} − Jy Σ_{j<N/2} Y_{2j} Y_{2j+1}`, open
/// chain, `√γ Z_j` on every site.
fn compass_dephasing(p: &Params) -> Result<ModelSpec> {
    p.reject_unknown("compass_dephasing", &["N", "Jx", "Jy", "gamma"])?;
    let n = p.sites(2)?;
    if n % 2 != 0 {
        return Err(Error::InvalidParameter {
            name: "N".into(),
            reason: format!("compass chain needs an even number of sites, got {n}"),
        });
    }
    let (jx, jy) = (p.f64("Jx")?, p.f64("Jy")?);
    let gamma = p.positive("gamma")?;
    let mut meta = Meta::new("compass_dephasing");
    meta.param("N", n).param("Jx", jx).param("Jy", jy).param("gamma", gamma).set("boundary", "open");
    let mut hamiltonian = Vec::new();
    for j in 1..=n / 2 {
        hamiltonian.push(term(-jx, &[(2 * j - 1, PauliLetter::X), (2 * j, PauliLetter::X)])?);
    }
    for j in 1..n / 2 {
        hamiltonian.push(term(-jy, &[(2 * j, PauliLetter::Y), (2 * j + 1, PauliLetter::Y)])?);
    }
    Ok(ModelSpec {
        n_sites: n,
        particle_kind: ParticleKind::SpinHalf,
        hamiltonian,
        lindblad: dephasing_z(n, &vec![gamma; n])?,
        symmetries: vec![SymmetryDescriptor::ParityZ],
        metadata: meta.0,
    })
}

fn number_dephasing(n: usize, gammas: &[f64]) -> Result<Vec<LindbladOp>> {
    (1..=n)
        .map(|j| {
            Ok(LindbladOp {
                label: format!("dephasing_{j}"),
                terms: jordan_wigner_terms(j, FermionOp::Number, n)?
                    .into_iter()
                    .map(|t| t.scaled(re(gammas[j - 1].sqrt())))
                    .collect(),
            })
        })
        .collect()
}

/// Periodic ring `H = t Σ_j (c†_j c_{j+1} + c†_{j+1} c_j) + δ I` with
/// `√γ n_j` on every site, mapped to spins by Jordan–Wigner.
fn tight_binding_dephasing(p: &Params) -> Result<ModelSpec> {
    p.reject_unknown("tight_binding_dephasing", &["N", "t", "delta", "gamma"])?;
    let n = p.sites(2)?;
    let t = p.f64("t")?;
    let delta = p.f64_opt("delta")?.unwrap_or(DEFAULT_DELTA);
    let gamma = p.positive("gamma")?;
    let lat = LatticeSpec::chain(n, true, BondCoupling::Hopping(re(t)));
    let mut spec = tight_binding_lattice(&lat, delta, &vec![gamma; n])?;
    let mut meta = Meta::new("tight_binding_dephasing");
    meta.param("N", n).param("t", t).param("delta", delta).param("gamma", gamma).set("boundary", "periodic");
    if t == 0.0 {
        meta.warn("t = 0: no hopping, sectors cannot be connected".into());
    }
    spec.metadata = meta.0;
    Ok(spec)
}

/// General-lattice XYZ model with site-dependent fields `hz[j]` and dephasing
/// rates `gammas[j]`.
pub fn xyz_lattice(lat: &LatticeSpec, hz: &[f64], gammas: &[f64]) -> Result<ModelSpec> {
    lat.validate()?;
    let n = lat.n_sites();
    check_site_values("hz", hz, n)?;
    check_site_values("gamma", gammas, n)?;
    if let Some(g) = gammas.iter().find(|g| **g <= 0.0) {
        return Err(Error::InvalidParameter { name: "gamma".into(), reason: format!("must be > 0, got {g}") });
    }
    let mut meta = Meta::new("xyz_lattice");
    meta.set("lattice.bonds", bond_string(lat));
    if !lat.is_connected() {
        meta.warn("lattice is not connected".into());
    }
    let mut hamiltonian = Vec::new();
    for bond in &lat.bonds {
        let BondCoupling::Xyz { jx, jy, jz } = bond.coupling else {
            return Err(Error::Validation(format!(
                "bond ({}, {}) carries a hopping coupling, expected XYZ exchange",
                bond.a, bond.b
            )));
        };
        if jx.abs() == jy.abs() {
            meta.warn(format!("bond ({}, {}) has |Jx| = |Jy|", bond.a, bond.b));
        }
        hamiltonian.extend(xyz_bond(bond.a, bond.b, jx, jy, jz)?);
    }
    for (j, &h) in hz.iter().enumerate() {
        if h != 0.0 {
            hamiltonian.push(term(h, &[(j + 1, PauliLetter::Z)])?);
        }
    }
    Ok(ModelSpec {
        n_sites: n,
        particle_kind: ParticleKind::SpinHalf,
        hamiltonian,
        lindblad: dephasing_z(n, gammas)?,
        symmetries: vec![SymmetryDescriptor::ParityZ],
        metadata: meta.0,
    })
}

/// General-lattice tight-binding model `Σ_bonds (t c†_a c_b + h.c.) + δ I`
/// with `√γ_j n_j` dephasing.
pub fn tight_binding_lattice(lat: &LatticeSpec, delta: f64, gammas: &[f64]) -> Result<ModelSpec> {
    lat.validate()?;
    let n = lat.n_sites();
    check_site_values("gamma", gammas, n)?;
    if let Some(g) = gammas.iter().find(|g| **g <= 0.0) {
        return Err(Error::InvalidParameter { name: "gamma".into(), reason: format!("must be > 0, got {g}") });
    }
    let mut meta = Meta::new("tight_binding_lattice");
    meta.set("lattice.bonds", bond_string(lat)).param("delta", delta);
    if !lat.is_connected() {
        meta.warn("lattice is not connected".into());
    }
    let mut hamiltonian = Vec::new();
    for bond in &lat.bonds {
        let BondCoupling::Hopping(t) = bond.coupling else {
            return Err(Error::Validation(format!(
                "bond ({}, {}) carries an XYZ coupling, expected hopping",
                bond.a, bond.b
            )));
        };
        if t == re(0.0) {
            continue;
        }
        hamiltonian.extend(hopping_terms(bond.a, bond.b, t, n)?);
        hamiltonian.extend(hopping_terms(bond.b, bond.a, t.conj(), n)?);
    }
    if delta != 0.0 {
        hamiltonian.push(PauliTerm::identity(re(delta)));
    }
    Ok(ModelSpec {
        n_sites: n,
        particle_kind: ParticleKind::Fermion,
        hamiltonian,
        lindblad: number_dephasing(n, gammas)?,
        symmetries: vec![SymmetryDescriptor::U1Number],
        metadata: meta.0,
    })
}

fn check_site_values(name: &str, values: &[f64], n: usize) -> Result<()> {
    if values.len() != n {
        return Err(Error::InvalidParameter {
            name: name.into(),
            reason: format!("expected {n} per-site values, got {}", values.len()),
        });
    }
    Ok(())
}

fn bond_string(lat: &LatticeSpec) -> String {
    lat.bonds.iter().map(|b| format!("{}-{}", b.a, b.b)).collect::<Vec<_>>().join(",")
}

fn lattice_from_params(p: &Params, n: usize, coupling: BondCoupling) -> Result<LatticeSpec> {
    let bonds = p.raw("bonds").ok_or_else(|| Error::MissingParameter("bonds".into()))?;
    let mut lat = LatticeSpec::with_sites(n);
    for (a, b) in parse_bond_list(bonds)? {
        lat.add_bond(a, b, coupling);
    }
    lat.validate()?;
    Ok(lat)
}

fn xyz_lattice_from_params(p: &Params) -> Result<ModelSpec> {
    p.reject_unknown("xyz_lattice", &["N", "bonds", "Jx", "Jy", "Jz", "hz", "gamma"])?;
    let n = p.sites(1)?;
    let (jx, jy, jz) = (p.f64("Jx")?, p.f64("Jy")?, p.f64_opt("Jz")?.unwrap_or(0.0));
    let hz = p.f64_opt("hz")?.unwrap_or(0.0);
    let gamma = p.positive("gamma")?;
    let lat = lattice_from_params(p, n, BondCoupling::Xyz { jx, jy, jz })?;
    let mut spec = xyz_lattice(&lat, &vec![hz; n], &vec![gamma; n])?;
    for (k, v) in [("N", n as f64), ("Jx", jx), ("Jy", jy), ("Jz", jz), ("hz", hz), ("gamma", gamma)] {
        spec.metadata.insert(format!("param.{k}"), v.to_string());
    }
    Ok(spec)
}

fn tight_binding_lattice_from_params(p: &Params) -> Result<ModelSpec> {
    p.reject_unknown("tight_binding_lattice", &["N", "bonds", "t", "delta", "gamma"])?;
    let n = p.sites(1)?;
    let t = p.f64("t")?;
    let delta = p.f64_opt("delta")?.unwrap_or(DEFAULT_DELTA);
    let gamma = p.positive("gamma")?;
    let lat = lattice_from_params(p, n, BondCoupling::Hopping(re(t)))?;
    let mut spec = tight_binding_lattice(&lat, delta, &vec![gamma; n])?;
    for (k, v) in [("N", n as f64), ("t", t), ("gamma", gamma)] {
        spec.metadata.insert(format!("param.{k}"), v.to_string());
    }
    Ok(spec)
}
