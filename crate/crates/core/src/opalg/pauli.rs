use serde::{Deserialize, Serialize};

use super::{c64, Operator, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Single-site factor of a Pauli string.
///
/// Basis convention per site: `↑` is index 0, `↓` is index 1. `Plus` is the
/// raising operator `|↑⟩⟨↓|`, `Minus` the lowering operator `|↓⟩⟨↑|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliLetter {
    X,
    Y,
    Z,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl PauliLetter {
    /// Action on a local basis state: `letter |bit⟩ = amplitude |new_bit⟩`.
    /// Every letter maps a basis state to at most one basis state.
    fn act(self, bit: usize) -> Option<(usize, c64)> {
        match (self, bit) {
            (PauliLetter::X, b) => Some((b ^ 1, ONE)),
            (PauliLetter::Y, 0) => Some((1, I)),
            (PauliLetter::Y, _) => Some((0, -I)),
            (PauliLetter::Z, 0) => Some((0, ONE)),
            (PauliLetter::Z, _) => Some((1, -ONE)),
            (PauliLetter::Plus, 1) => Some((0, ONE)),
            (PauliLetter::Plus, _) => None,
            (PauliLetter::Minus, 0) => Some((1, ONE)),
            (PauliLetter::Minus, _) => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PauliLetter::X => "X",
            PauliLetter::Y => "Y",
            PauliLetter::Z => "Z",
            PauliLetter::Plus => "+",
            PauliLetter::Minus => "-",
        }
    }
}

/// `coeff · ⊗_k letter_k` on a set of distinct sites (1-based, ascending).
/// An empty factor list is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    coeff: c64,
    factors: Vec<(usize, PauliLetter)>,
}

impl PauliTerm {
    /// Sorts the factors by site; rejects site 0 and repeated sites.
    pub fn new(coeff: c64, factors: impl IntoIterator<Item = (usize, PauliLetter)>) -> Result<Self> {
        let mut factors: Vec<_> = factors.into_iter().collect();
        factors.sort_by_key(|&(site, _)| site);
        for (k, &(site, _)) in factors.iter().enumerate() {
            if site == 0 {
                return Err(Error::SiteOutOfRange { site, n_sites: 0 });
            }
            if k > 0 && factors[k - 1].0 == site {
                return Err(Error::DuplicateSite { site });
            }
        }
        if !(coeff.re.is_finite() && coeff.im.is_finite()) {
            return Err(Error::NonFinite("Pauli term coefficient".into()));
        }
        Ok(Self { coeff, factors })
    }

    pub fn identity(coeff: c64) -> Self {
        Self { coeff, factors: Vec::new() }
    }

    /// Single-site term `coeff · letter_site`.
    pub fn single(coeff: c64, site: usize, letter: PauliLetter) -> Result<Self> {
        Self::new(coeff, [(site, letter)])
    }

    pub fn coeff(&self) -> c64 {
        self.coeff
    }

    pub fn factors(&self) -> &[(usize, PauliLetter)] {
        &self.factors
    }

    pub fn max_site(&self) -> Option<usize> {
        self.factors.last().map(|&(s, _)| s)
    }

    pub fn scaled(&self, z: c64) -> Self {
        Self { coeff: self.coeff * z, factors: self.factors.clone() }
    }

    /// Adds this term into `out` (a `2^n` dimensional operator).
    fn accumulate(&self, out: &mut [c64], dim: usize) {
        for col in 0..dim {
            let mut row = col;
            let mut amp = self.coeff;
            let mut alive = true;
            for &(site, letter) in &self.factors {
                let shift = site - 1;
                let bit = (col >> shift) & 1;
                match letter.act(bit) {
                    Some((new_bit, a)) => {
                        row = (row & !(1 << shift)) | (new_bit << shift);
                        amp *= a;
                    }
                    None => {
                        alive = false;
                        break;
                    }
                }
            }
            if alive {
                out[row + col * dim] += amp;
            }
        }
    }
}

/// Sum of Pauli terms embedded into the `2^n_sites` dimensional space, with
/// site 1 the least significant bit of the basis index.
pub fn pauli_to_operator(terms: &[PauliTerm], n_sites: usize) -> Result<Operator> {
    if n_sites == 0 {
        return Err(Error::Validation("a model needs at least one site".into()));
    }
    if n_sites > 24 {
        return Err(Error::SizeBudget { required: 1 << n_sites.min(63), limit: 1 << 24 });
    }
    for term in terms {
        if let Some(site) = term.max_site() {
            if site > n_sites {
                return Err(Error::SiteOutOfRange { site, n_sites });
            }
        }
    }
    let dim = 1usize << n_sites;
    let mut data = vec![ZERO; dim * dim];
    for term in terms {
        term.accumulate(&mut data, dim);
    }
    Operator::from_vectorized(dim, &data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn term(coeff: f64, factors: &[(usize, PauliLetter)]) -> PauliTerm {
        PauliTerm::new(c64::new(coeff, 0.0), factors.iter().copied()).unwrap()
    }

    #[test]
    fn single_z_is_diag() {
        let z = pauli_to_operator(&[term(1.0, &[(1, PauliLetter::Z)])], 1).unwrap();
        assert_eq!(z, Operator::diagonal(&[ONE, -ONE]));
    }

    #[test]
    fn xx_is_antidiagonal() {
        let xx = pauli_to_operator(&[term(1.0, &[(1, PauliLetter::X), (2, PauliLetter::X)])], 2).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r + c == 3 { ONE } else { ZERO };
                assert_eq!(xx.get(r, c), expected);
            }
        }
    }

    #[test]
    fn plus_raises_down_to_up() {
        let p = pauli_to_operator(&[term(1.0, &[(1, PauliLetter::Plus)])], 1).unwrap();
        assert_eq!(p.get(0, 1), ONE);
        assert_eq!(p.get(1, 0), ZERO);
        assert_eq!(p.get(0, 0), ZERO);
        assert_eq!(p.get(1, 1), ZERO);
    }

    #[test]
    fn y_matches_definition() {
        let y = pauli_to_operator(&[term(1.0, &[(1, PauliLetter::Y)])], 1).unwrap();
        assert_eq!(y.get(0, 1), -I);
        assert_eq!(y.get(1, 0), I);
    }

    #[test]
    fn site_one_is_least_significant() {
        let z1 = pauli_to_operator(&[term(1.0, &[(1, PauliLetter::Z)])], 2).unwrap();
        assert_eq!(z1, Operator::diagonal(&[ONE, -ONE, ONE, -ONE]));
    }

    #[test]
    fn rejects_bad_sites() {
        let err = pauli_to_operator(&[term(1.0, &[(3, PauliLetter::X)])], 2).unwrap_err();
        assert!(matches!(err, Error::SiteOutOfRange { site: 3, n_sites: 2 }));
        assert!(matches!(
            PauliTerm::new(ONE, [(2, PauliLetter::X), (2, PauliLetter::Z)]),
            Err(Error::DuplicateSite { site: 2 })
        ));
        assert!(PauliTerm::new(ONE, [(0, PauliLetter::X)]).is_err());
    }

    #[test]
    fn empty_terms_give_zero() {
        assert_eq!(pauli_to_operator(&[], 2).unwrap(), Operator::zeros(4));
    }

    #[test]
    fn factors_are_sorted() {
        let t = PauliTerm::new(ONE, [(3, PauliLetter::Z), (1, PauliLetter::X)]).unwrap();
        assert_eq!(t.factors(), &[(1, PauliLetter::X), (3, PauliLetter::Z)]);
    }

    fn letter() -> impl Strategy<Value = PauliLetter> {
        prop_oneof![
            Just(PauliLetter::X),
            Just(PauliLetter::Y),
            Just(PauliLetter::Z),
            Just(PauliLetter::Plus),
            Just(PauliLetter::Minus),
        ]
    }

    proptest! {
        // Terms on disjoint supports commute, and their concatenation is their product.
        #[test]
        fn disjoint_terms_multiply(a in letter(), b in letter(), c in letter(),
                                   re in -2.0..2.0f64, im in -2.0..2.0f64) {
            let n = 3;
            let t1 = PauliTerm::new(c64::new(re, im), [(1, a), (3, c)]).unwrap();
            let t2 = PauliTerm::new(ONE, [(2, b)]).unwrap();
            let joint = PauliTerm::new(c64::new(re, im), [(1, a), (2, b), (3, c)]).unwrap();
            let o1 = pauli_to_operator(&[t1], n).unwrap();
            let o2 = pauli_to_operator(&[t2], n).unwrap();
            let oj = pauli_to_operator(&[joint], n).unwrap();
            prop_assert!((&(&o1 * &o2) - &oj).hs_norm() < 1e-13);
            prop_assert!((&(&o2 * &o1) - &oj).hs_norm() < 1e-13);
        }
    }
}
