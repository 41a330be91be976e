//! One- and two-site reduced density matrices built from Wick expectations.
//!
//! Local basis per site: `|0⟩, |↑↓⟩, |↑⟩, |↓⟩`, with `|↑↓⟩ = c↑† c↓† |0⟩`.
//! Two-site states are `|a⟩_i ⊗ |b⟩_j = A_a† B_b† |0⟩` at index `4a + b`,
//! orbitals ordered `(i↑, i↓, j↑, j↓)`.
//!
//! The element `⟨a|ρ|b⟩` is the ground-state expectation of the local
//! operator `|b⟩⟨a|`, written per orbital as `c†c`, `c c†`, `c†` or `c`
//! and evaluated with the Wick engine.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SiteId;
use crate::linalg;
use crate::wick::{self, CorrelatorTable, Op, OperatorString, Orbital, PairingSign};

pub use crate::fock::fock_oracle_rdm;

/// `(n↑, n↓)` of the one-site basis states in order.
pub const ONE_SITE_OCCUPATIONS: [(bool, bool); 4] = [(false, false), (true, true), (true, false), (false, true)];
pub const ONE_SITE_LABELS: [&str; 4] = ["0", "ud", "u", "d"];

/// Tolerance on hermiticity, trace and positivity of constructed states.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Mat<c64>,
    labels: Vec<String>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking the density-matrix invariants.
    pub fn new(entries: Mat<c64>, labels: Vec<String>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim || labels.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: labels.len() });
        }
        let rho = Self { entries, labels };
        rho.check()?;
        Ok(Self { entries: linalg::hermitian_part(rho.entries.as_ref()), ..rho })
    }

    /// Wraps a one- or two-site matrix with the standard basis labels.
    pub fn from_matrix(entries: Mat<c64>) -> Result<Self> {
        let labels = match entries.nrows() {
            4 => one_site_labels(),
            16 => two_site_labels(),
            d => return Err(Error::DimensionMismatch { expected: 16, got: d }),
        };
        Self::new(entries, labels)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.entries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, r: usize, c: usize) -> c64 {
        self.entries[(r, c)]
    }

    pub fn trace(&self) -> c64 {
        linalg::trace(self.entries.as_ref())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = linalg::hermitian_eigen(linalg::hermitian_part(self.entries.as_ref()).as_ref())?;
        Ok(eig.values[0])
    }

    /// Hermiticity, unit trace and positivity, each to [`STATE_TOL`].
    pub fn check(&self) -> Result<()> {
        let defect = linalg::hermiticity_defect(self.entries.as_ref());
        if defect > STATE_TOL {
            return Err(Error::NumericalConsistency(format!("hermiticity defect {defect:.3e}")));
        }
        let tr = self.trace();
        if (tr - c64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::NumericalConsistency(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue()?;
        if min < -STATE_TOL {
            return Err(Error::NumericalConsistency(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Largest magnitude among entries whose row and column states differ
    /// in fermion parity.
    pub fn parity_leakage(&self) -> f64 {
        let parity = parities(self.dim());
        let mut out = 0.0f64;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                if parity[r] != parity[c] {
                    out = out.max(self.entries[(r, c)].norm());
                }
            }
        }
        out
    }

    /// Reduced state of the first site of a two-site matrix.
    pub fn trace_out_second(&self) -> Result<DensityMatrix> {
        self.expect_dim(16)?;
        let m = Mat::<c64>::from_fn(4, 4, |a, a2| (0..4).map(|b| self.entries[(4 * a + b, 4 * a2 + b)]).sum());
        DensityMatrix::from_matrix(m)
    }

    /// Reduced state of the second site of a two-site matrix.
    pub fn trace_out_first(&self) -> Result<DensityMatrix> {
        self.expect_dim(16)?;
        let m = Mat::<c64>::from_fn(4, 4, |b, b2| (0..4).map(|a| self.entries[(4 * a + b, 4 * a + b2)]).sum());
        DensityMatrix::from_matrix(m)
    }

    /// The same two-site state with the site order exchanged, including the
    /// fermionic sign `(−1)^{|a||b|}` of reordering `A_a† B_b†`.
    pub fn swap_sites(&self) -> Result<DensityMatrix> {
        self.expect_dim(16)?;
        let odd = |k: usize| ONE_SITE_OCCUPATIONS[k].0 ^ ONE_SITE_OCCUPATIONS[k].1;
        let sign = |a: usize, b: usize| if odd(a) && odd(b) { -1.0 } else { 1.0 };
        let m = Mat::<c64>::from_fn(16, 16, |r, c| {
            let (b, a) = (r / 4, r % 4);
            let (b2, a2) = (c / 4, c % 4);
            self.entries[(4 * a + b, 4 * a2 + b2)] * (sign(a, b) * sign(a2, b2))
        });
        DensityMatrix::from_matrix(m)
    }

    /// `ρ₁ ⊗ ρ₂` in the two-site basis.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        self.expect_dim(4)?;
        other.expect_dim(4)?;
        let m = Mat::<c64>::from_fn(16, 16, |r, c| self.entries[(r / 4, c / 4)] * other.entries[(r % 4, c % 4)]);
        DensityMatrix::from_matrix(m)
    }

    fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.dim() });
        }
        Ok(())
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let mut out = 0.0f64;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                out = out.max((self.entries[(r, c)] - other.entries[(r, c)]).norm());
            }
        }
        out
    }

    pub fn to_json(&self) -> DensityMatrixJson {
        let n = self.dim();
        DensityMatrixJson {
            dim: n,
            basis: self.labels.clone(),
            entries: (0..n * n)
                .map(|k| {
                    let z = self.entries[(k / n, k % n)];
                    [z.re, z.im]
                })
                .collect(),
        }
    }

    pub fn from_json(json: &DensityMatrixJson) -> Result<Self> {
        let n = json.dim;
        if json.entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: json.entries.len() });
        }
        let m = Mat::<c64>::from_fn(n, n, |r, c| {
            let [re, im] = json.entries[r * n + c];
            c64::new(re, im)
        });
        Self::new(m, json.basis.clone())
    }
}

/// Serialized layout: row-major entries as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub dim: usize,
    pub basis: Vec<String>,
    pub entries: Vec<[f64; 2]>,
}

pub fn one_site_labels() -> Vec<String> {
    ONE_SITE_LABELS.iter().map(|s| s.to_string()).collect()
}

pub fn two_site_labels() -> Vec<String> {
    ONE_SITE_LABELS.iter().flat_map(|a| ONE_SITE_LABELS.iter().map(move |b| format!("{a},{b}"))).collect()
}

/// Occupations of the local orbitals for every basis state of a one- or
/// two-site system.
fn occupations(dim: usize) -> Vec<Vec<bool>> {
    let one = |k: usize| vec![ONE_SITE_OCCUPATIONS[k].0, ONE_SITE_OCCUPATIONS[k].1];
    match dim {
        4 => (0..4).map(one).collect(),
        _ => (0..16).map(|k| [one(k / 4), one(k % 4)].concat()).collect(),
    }
}

fn parities(dim: usize) -> Vec<bool> {
    occupations(dim).iter().map(|o| o.iter().filter(|&&x| x).count() % 2 == 1).collect()
}

/// Applies `op` on mode `k` to a local occupation pattern, returning the
/// Jordan–Wigner sign and the new pattern, or `None` if annihilated.
fn apply_local(k: usize, dagger: bool, state: &mut [bool]) -> Option<f64> {
    if state[k] == dagger {
        return None;
    }
    let sign = if state[..k].iter().filter(|&&x| x).count() % 2 == 0 { 1.0 } else { -1.0 };
    state[k] = dagger;
    Some(sign)
}

/// Operator string and sign `s` with `|n⟩⟨m| = s · string` on the local
/// orbitals.
pub fn projector_string(orbitals: &[Orbital], n: &[bool], m: &[bool]) -> Result<(f64, OperatorString)> {
    let mut ops = Vec::with_capacity(2 * orbitals.len());
    let mut modes = Vec::with_capacity(2 * orbitals.len());
    for (k, &o) in orbitals.iter().enumerate() {
        let pair: &[bool] = match (n[k], m[k]) {
            (true, true) => &[true, false],
            (false, false) => &[false, true],
            (true, false) => &[true],
            (false, true) => &[false],
        };
        for &dagger in pair {
            ops.push(if dagger { Op::create(o) } else { Op::annihilate(o) });
            modes.push((k, dagger));
        }
    }
    // Act on |m⟩ right to left; the result must be ±|n⟩.
    let mut state = m.to_vec();
    let mut sign = 1.0;
    for &(k, dagger) in modes.iter().rev() {
        sign *= apply_local(k, dagger, &mut state)
            .ok_or_else(|| Error::NumericalConsistency("projector string annihilates |m⟩".into()))?;
    }
    debug_assert_eq!(state, n);
    Ok((sign, OperatorString::new(ops)?))
}

fn build(table: &CorrelatorTable, orbitals: &[Orbital], sign_rule: PairingSign) -> Result<Mat<c64>> {
    let dim = 1usize << orbitals.len();
    let occ = occupations(dim);
    let parity = parities(dim);
    let mut m = Mat::<c64>::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            if parity[a] != parity[b] {
                continue;
            }
            // ⟨a|ρ|b⟩ = ⟨ |b⟩⟨a| ⟩
            let (sign, string) = projector_string(orbitals, &occ[b], &occ[a])?;
            m[(a, b)] = wick::pairing_sum(&string, table, sign_rule)? * sign;
        }
    }
    Ok(m)
}

pub fn one_site_rdm(table: &CorrelatorTable, site: SiteId) -> Result<DensityMatrix> {
    one_site_rdm_with(table, site, PairingSign::Permutation)
}

pub fn two_site_rdm(table: &CorrelatorTable, i: SiteId, j: SiteId) -> Result<DensityMatrix> {
    two_site_rdm_with(table, i, j, PairingSign::Permutation)
}

pub(crate) fn one_site_rdm_with(table: &CorrelatorTable, site: SiteId, rule: PairingSign) -> Result<DensityMatrix> {
    let orbitals = [Orbital::up(site), Orbital::down(site)];
    DensityMatrix::from_matrix(build(table, &orbitals, rule)?)
}

pub(crate) fn two_site_rdm_with(
    table: &CorrelatorTable,
    i: SiteId,
    j: SiteId,
    rule: PairingSign,
) -> Result<DensityMatrix> {
    if i == j {
        return Err(Error::Domain("two-site state needs distinct sites".into()));
    }
    let orbitals = [Orbital::up(i), Orbital::down(i), Orbital::up(j), Orbital::down(j)];
    DensityMatrix::from_matrix(build(table, &orbitals, rule)?)
}
