//! Spinless fermions on `n` sites through the Jordan–Wigner string.
//!
//! Occupation convention: empty = index 0, occupied = index 1 on each site, so
//! `n_j = diag(0, 1)` locally and `(-1)^{n_j} = Z_j`. With this convention
//! `c_j = (∏_{k<j} Z_k) ⊗ Plus_j` and `c†_j = (∏_{k<j} Z_k) ⊗ Minus_j`.

use super::{c64, pauli_to_operator, Operator, PauliLetter, PauliTerm, ONE};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FermionOp {
    Annihilate,
    Create,
    Number,
}

fn check_site(site: usize, n_sites: usize) -> Result<()> {
    if site == 0 || site > n_sites {
        Err(Error::SiteOutOfRange { site, n_sites })
    } else {
        Ok(())
    }
}

/// Pauli-term form of `c_j`, `c†_j` or `n_j`.
pub fn jordan_wigner_terms(site: usize, kind: FermionOp, n_sites: usize) -> Result<Vec<PauliTerm>> {
    check_site(site, n_sites)?;
    let string = (1..site).map(|k| (k, PauliLetter::Z));
    Ok(match kind {
        FermionOp::Annihilate => {
            vec![PauliTerm::new(ONE, string.chain([(site, PauliLetter::Plus)]))?]
        }
        FermionOp::Create => {
            vec![PauliTerm::new(ONE, string.chain([(site, PauliLetter::Minus)]))?]
        }
        FermionOp::Number => {
            vec![PauliTerm::identity(c64::new(0.5, 0.0)), PauliTerm::single(c64::new(-0.5, 0.0), site, PauliLetter::Z)?]
        }
    })
}

pub fn jordan_wigner(site: usize, kind: FermionOp, n_sites: usize) -> Result<Operator> {
    pauli_to_operator(&jordan_wigner_terms(site, kind, n_sites)?, n_sites)
}

/// Pauli-term form of `amp · c†_j c_k`.
///
/// For `j < k` this is `amp · Minus_j (∏_{j<l<k} Z_l) Plus_k`; for `j > k`
/// it is `amp · Plus_k (∏_{k<l<j} Z_l) Minus_j`; for `j == k` it is `amp · n_j`.
pub fn hopping_terms(j: usize, k: usize, amp: c64, n_sites: usize) -> Result<Vec<PauliTerm>> {
    check_site(j, n_sites)?;
    check_site(k, n_sites)?;
    if j == k {
        return Ok(jordan_wigner_terms(j, FermionOp::Number, n_sites)?.into_iter().map(|t| t.scaled(amp)).collect());
    }
    let (lo, hi) = (j.min(k), j.max(k));
    let (lo_letter, hi_letter) =
        if j < k { (PauliLetter::Minus, PauliLetter::Plus) } else { (PauliLetter::Plus, PauliLetter::Minus) };
    let factors =
        std::iter::once((lo, lo_letter)).chain((lo + 1..hi).map(|l| (l, PauliLetter::Z))).chain([(hi, hi_letter)]);
    Ok(vec![PauliTerm::new(amp, factors)?])
}
