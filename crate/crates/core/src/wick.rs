//! Two-point correlators of the BdG ground state and a numeric Wick engine.
//!
//! The ground state is a fermionic Gaussian state, so the expectation of any
//! operator string is a signed sum over its complete pairings (a Pfaffian
//! expansion). Contractions are taken in the original operator order; the
//! sign is the parity of the pairing permutation.

use std::fmt;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::bdg::{fermi, BdgSolution};
use crate::error::{Error, Result};
use crate::lattice::SiteId;
use crate::model::{U_DOWN, U_UP, V_DOWN, V_UP};

/// Longest operator string the engine accepts.
pub const MAX_STRING_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orbital {
    pub site: SiteId,
    pub spin: Spin,
}

impl Orbital {
    pub fn new(site: SiteId, spin: Spin) -> Self {
        Self { site, spin }
    }

    pub fn up(site: SiteId) -> Self {
        Self::new(site, Spin::Up)
    }

    pub fn down(site: SiteId) -> Self {
        Self::new(site, Spin::Down)
    }
}

/// A single creation (`dagger = true`) or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Op {
    pub orbital: Orbital,
    pub dagger: bool,
}

impl Op {
    pub fn create(orbital: Orbital) -> Self {
        Self { orbital, dagger: true }
    }

    pub fn annihilate(orbital: Orbital) -> Self {
        Self { orbital, dagger: false }
    }

    pub fn adjoint(self) -> Self {
        Self { dagger: !self.dagger, ..self }
    }

    /// `(sign, row)` with `op = sign · Ψ_row` in the site's Nambu block.
    fn as_spinor(self) -> (f64, usize) {
        let b = 4 * self.orbital.site;
        match (self.orbital.spin, self.dagger) {
            (Spin::Up, false) => (1.0, b + U_UP),
            (Spin::Up, true) => (-1.0, b + V_UP),
            (Spin::Down, false) => (1.0, b + U_DOWN),
            (Spin::Down, true) => (1.0, b + V_DOWN),
        }
    }

    /// `(sign, row)` with `op = sign · Ψ_row†`.
    fn as_spinor_adjoint(self) -> (f64, usize) {
        let b = 4 * self.orbital.site;
        match (self.orbital.spin, self.dagger) {
            (Spin::Up, false) => (-1.0, b + V_UP),
            (Spin::Up, true) => (1.0, b + U_UP),
            (Spin::Down, false) => (1.0, b + V_DOWN),
            (Spin::Down, true) => (1.0, b + U_DOWN),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.orbital.spin {
            Spin::Up => '↑',
            Spin::Down => '↓',
        };
        let d = if self.dagger { "†" } else { "" };
        write!(f, "c{d}[{}{s}]", self.orbital.site)
    }
}

/// Ordered product of at most [`MAX_STRING_LEN`] operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct OperatorString(Vec<Op>);

impl OperatorString {
    pub fn new(ops: Vec<Op>) -> Result<Self> {
        if ops.len() > MAX_STRING_LEN {
            return Err(Error::Domain(format!("operator string of length {} exceeds {MAX_STRING_LEN}", ops.len())));
        }
        Ok(Self(ops))
    }

    pub fn ops(&self) -> &[Op] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(o₁ o₂ … oₖ)† = oₖ† … o₁†`.
    pub fn adjoint(&self) -> Self {
        Self(self.0.iter().rev().map(|o| o.adjoint()).collect())
    }
}

impl fmt::Display for OperatorString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|o| o.to_string()).collect();
        write!(f, "⟨{}⟩", parts.join(" "))
    }
}

/// All two-point functions `⟨o_x o_y⟩` among a set of orbitals, for every
/// combination of creation and annihilation operators.
#[derive(Debug, Clone)]
pub struct CorrelatorTable {
    orbitals: Vec<Orbital>,
    /// Row/column `2k + dagger` for orbital `k`.
    contractions: Mat<c64>,
}

impl CorrelatorTable {
    /// Builds a table from explicit contraction values, indexed as
    /// `2k + dagger` for orbital `k`.
    pub fn from_contractions(orbitals: Vec<Orbital>, contractions: Mat<c64>) -> Result<Self> {
        let dim = 2 * orbitals.len();
        if contractions.nrows() != dim || contractions.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: contractions.nrows() });
        }
        Ok(Self { orbitals, contractions })
    }

    pub fn orbitals(&self) -> &[Orbital] {
        &self.orbitals
    }

    fn slot(&self, op: Op) -> Result<usize> {
        self.orbitals
            .iter()
            .position(|&o| o == op.orbital)
            .map(|k| 2 * k + op.dagger as usize)
            .ok_or_else(|| Error::Domain(format!("orbital {:?} not in correlator table", op.orbital)))
    }

    /// `⟨a b⟩` for two single operators.
    pub fn contraction(&self, a: Op, b: Op) -> Result<c64> {
        Ok(self.contractions[(self.slot(a)?, self.slot(b)?)])
    }

    /// `⟨c†_a c_b⟩`.
    pub fn normal(&self, a: Orbital, b: Orbital) -> Result<c64> {
        self.contraction(Op::create(a), Op::annihilate(b))
    }

    /// `⟨c_a c_b⟩`.
    pub fn anomalous(&self, a: Orbital, b: Orbital) -> Result<c64> {
        self.contraction(Op::annihilate(a), Op::annihilate(b))
    }

    /// `⟨c†_a c†_b⟩`.
    pub fn anomalous_dagger(&self, a: Orbital, b: Orbital) -> Result<c64> {
        self.contraction(Op::create(a), Op::create(b))
    }
}

/// Two-point table for the given orbitals at temperature `temperature`,
/// using every eigenstate with occupations from the Fermi function.
pub fn build_correlators(solution: &BdgSolution, orbitals: &[Orbital], temperature: f64) -> Result<CorrelatorTable> {
    let n_sites = solution.num_sites();
    if let Some(o) = orbitals.iter().find(|o| o.site >= n_sites) {
        return Err(Error::Domain(format!("orbital {o:?} outside lattice")));
    }
    let weights: Vec<f64> = solution.energies.iter().map(|&e| 1.0 - fermi(e, temperature)).collect();
    let ops: Vec<Op> = orbitals.iter().flat_map(|&o| [Op::annihilate(o), Op::create(o)]).collect();
    let dim = ops.len();
    let v = &solution.vectors;
    // ⟨o_x o_y⟩ = s_x s'_y ⟨Ψ_p Ψ_q†⟩.
    let table = Mat::<c64>::from_fn(dim, dim, |x, y| {
        let (sx, p) = ops[x].as_spinor();
        let (sy, q) = ops[y].as_spinor_adjoint();
        let mut acc = c64::new(0.0, 0.0);
        for (n, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                acc += v[(p, n)] * v[(q, n)].conj() * w;
            }
        }
        acc * (sx * sy)
    });
    CorrelatorTable::from_contractions(orbitals.to_vec(), table)
}

/// Vacuum expectation of an operator string by Wick's theorem.
pub fn wick_expectation(string: &OperatorString, table: &CorrelatorTable) -> Result<c64> {
    pairing_sum(string, table, PairingSign::Permutation)
}

/// Sign rule applied to each pairing. `Ignored` drops the fermionic
/// permutation sign and exists only so the verification suite can prove it
/// detects a broken engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingSign {
    Permutation,
    Ignored,
}

pub fn pairing_sum(string: &OperatorString, table: &CorrelatorTable, sign: PairingSign) -> Result<c64> {
    let slots: Vec<usize> = string.ops().iter().map(|&o| table.slot(o)).collect::<Result<_>>()?;
    if slots.len() % 2 == 1 {
        return Ok(c64::new(0.0, 0.0));
    }
    Ok(expand(&slots, &table.contractions, sign))
}

fn expand(slots: &[usize], c: &Mat<c64>, sign: PairingSign) -> c64 {
    if slots.is_empty() {
        return c64::new(1.0, 0.0);
    }
    let first = slots[0];
    let mut rest: Vec<usize> = Vec::with_capacity(slots.len() - 2);
    let mut acc = c64::new(0.0, 0.0);
    for k in 1..slots.len() {
        let pair = c[(first, slots[k])];
        if pair == c64::new(0.0, 0.0) {
            continue;
        }
        rest.clear();
        rest.extend(slots[1..k].iter().chain(&slots[k + 1..]));
        // Moving operator k next to the first one passes k − 1 operators.
        let s = match sign {
            PairingSign::Permutation if (k - 1) % 2 == 1 => -1.0,
            _ => 1.0,
        };
        acc += pair * expand(&rest, c, sign) * s;
    }
    acc
}
