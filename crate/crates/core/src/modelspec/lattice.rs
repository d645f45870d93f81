use crate::error::{Error, Result};
use crate::opalg::c64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BondCoupling {
    /// `J^x X_a X_b + J^y Y_a Y_b + J^z Z_a Z_b`.
    Xyz { jx: f64, jy: f64, jz: f64 },
    /// `t c†_a c_b + t* c†_b c_a`.
    Hopping(c64),
}

/// Bond between two 1-based site indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub coupling: BondCoupling,
}

/// A finite lattice `(Λ, B)` with per-bond couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub sites: Vec<String>,
    pub bonds: Vec<Bond>,
}

impl LatticeSpec {
    /// Sites labelled `1..=n_sites`, no bonds yet.
    pub fn with_sites(n_sites: usize) -> Self {
        Self { sites: (1..=n_sites).map(|j| j.to_string()).collect(), bonds: Vec::new() }
    }

    /// Nearest-neighbour chain, optionally closed into a ring (bond `N → 1`).
    pub fn chain(n_sites: usize, periodic: bool, coupling: BondCoupling) -> Self {
        let mut lat = Self::with_sites(n_sites);
        let last = if periodic { n_sites } else { n_sites.saturating_sub(1) };
        for j in 1..=last {
            let k = if j == n_sites { 1 } else { j + 1 };
            lat.bonds.push(Bond { a: j, b: k, coupling });
        }
        lat
    }

    pub fn add_bond(&mut self, a: usize, b: usize, coupling: BondCoupling) -> &mut Self {
        self.bonds.push(Bond { a, b, coupling });
        self
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites();
        if n == 0 {
            return Err(Error::Validation("lattice has no sites".into()));
        }
        for bond in &self.bonds {
            for site in [bond.a, bond.b] {
                if site == 0 || site > n {
                    return Err(Error::SiteOutOfRange { site, n_sites: n });
                }
            }
            if bond.a == bond.b {
                return Err(Error::Validation(format!("bond ({0}, {0}) is a self-loop", bond.a)));
            }
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        lattice_connected(self)
    }
}

/// True iff every pair of sites is joined by a path of bonds.
pub fn lattice_connected(lat: &LatticeSpec) -> bool {
    let n = lat.n_sites();
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for bond in &lat.bonds {
        if bond.a == 0 || bond.b == 0 || bond.a > n || bond.b > n {
            continue;
        }
        let (ra, rb) = (find(&mut parent, bond.a - 1), find(&mut parent, bond.b - 1));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

/// Parses `"1-2,2-3"` (also `;` or whitespace separated) into site pairs.
pub(crate) fn parse_bond_list(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split([',', ';', ' '])
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair.trim().split_once('-').ok_or_else(|| Error::InvalidParameter {
                name: "bonds".into(),
                reason: format!("`{pair}` is not of the form a-b"),
            })?;
            let parse = |s: &str| {
                s.trim().parse::<usize>().map_err(|_| Error::InvalidParameter {
                    name: "bonds".into(),
                    reason: format!("`{s}` is not a site index"),
                })
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}
