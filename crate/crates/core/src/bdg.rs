//! Eigensolution of the BdG matrix and the self-consistent gap iteration.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::linalg::{self, Eigen};
use crate::model::{self, GapField, ModelParams, U_DOWN, U_UP, V_DOWN, V_UP};

/// Fermi occupation; at zero temperature a step with `f(0) = ½`.
pub fn fermi(energy: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return match energy.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Less) => 1.0,
            Some(std::cmp::Ordering::Greater) => 0.0,
            _ => 0.5,
        };
    }
    let x = energy / temperature;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Full spectral decomposition of a Hermitian matrix, ascending.
pub fn eigensolve(h: &Mat<c64>) -> Result<Eigen> {
    linalg::hermitian_eigen(h.as_ref())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Linear mixing weight α for the new gap.
    pub mixing: f64,
    /// Stop once `max_i |Δ_new − Δ_old| < tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { mixing: 0.5, tol: 1e-8, max_iter: 500 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::Domain(format!("mixing {} outside (0, 1]", self.mixing)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Domain("tol must be positive and max_iter at least 1".into()));
        }
        Ok(())
    }
}

/// Converged (or fixed-gap) BdG eigensystem.
#[derive(Debug, Clone)]
pub struct BdgSolution {
    pub params: ModelParams,
    pub lattice: LatticeConfig,
    /// Ascending eigenvalues εₙ, `4N` of them.
    pub energies: Vec<f64>,
    /// Column `n` holds `ψₙ`; rows `4i..4i+4` are `(u↑, v↓, u↓, v↑)` at site `i`.
    pub vectors: Mat<c64>,
    /// The gap field the eigensystem was computed from.
    pub gap: GapField,
    pub iterations: usize,
    pub residual: f64,
    /// Quasiparticle vacancy `1 − f(εₙ)` per eigenstate.
    weights: Vec<f64>,
}

impl BdgSolution {
    /// Diagonalizes the BdG matrix for a fixed gap field (no self-consistency).
    pub fn fixed_gap(params: &ModelParams, lattice: &LatticeConfig, gap: &GapField) -> Result<Self> {
        let (energies, vectors) = diagonalize(params, lattice, gap)?;
        Ok(Self::from_parts(*params, *lattice, energies, vectors, gap.clone(), 0, 0.0))
    }

    fn from_parts(
        params: ModelParams,
        lattice: LatticeConfig,
        energies: Vec<f64>,
        vectors: Mat<c64>,
        gap: GapField,
        iterations: usize,
        residual: f64,
    ) -> Self {
        let weights = energies.iter().map(|&e| 1.0 - fermi(e, params.temperature)).collect();
        Self { params, lattice, energies, vectors, gap, iterations, residual, weights }
    }

    pub fn num_sites(&self) -> usize {
        self.lattice.num_sites()
    }

    /// Amplitude `ψₙ[row]`.
    pub fn amplitude(&self, row: usize, n: usize) -> c64 {
        self.vectors[(row, n)]
    }

    /// Nambu propagator `⟨Ψ_p Ψ_q†⟩ = Σₙ (1 − f(εₙ)) ψₙ[p] ψₙ[q]*`.
    pub fn green(&self, p: usize, q: usize) -> c64 {
        let mut acc = c64::new(0.0, 0.0);
        for (n, &w) in self.weights.iter().enumerate() {
            if w != 0.0 {
                acc += self.vectors[(p, n)] * self.vectors[(q, n)].conj() * w;
            }
        }
        acc
    }

    /// Applies the gap equation to this eigensystem.
    pub fn gap_update(&self) -> GapField {
        gap_update(&self.energies, &self.vectors, &self.params)
    }
}

/// Gap equation with the Debye window `0 < εₙ < ω_D`:
/// `Δᵢ = −g Σₙ (fₙ − ½) [uₙ(i,↑) vₙ*(i,↓) + uₙ(i,↓) vₙ*(i,↑)]`.
pub fn gap_update(energies: &[f64], vectors: &Mat<c64>, params: &ModelParams) -> GapField {
    let n_sites = vectors.nrows() / 4;
    let mut delta = vec![c64::new(0.0, 0.0); n_sites];
    if params.g == 0.0 {
        return GapField { delta };
    }
    for (n, &e) in energies.iter().enumerate() {
        if !(e > 0.0 && e < params.omega_d) {
            continue;
        }
        let w = -params.g * (fermi(e, params.temperature) - 0.5);
        let col = vectors.col(n);
        for (i, d) in delta.iter_mut().enumerate() {
            let b = 4 * i;
            let pair = col[b + U_UP] * col[b + V_DOWN].conj() + col[b + U_DOWN] * col[b + V_UP].conj();
            *d += pair * w;
        }
    }
    GapField { delta }
}

/// Eigensystem in whichever form the solver produced it.
enum Spectrum {
    /// Decoupled `(u↑, v↓)` and `(u↓, v↑)` sectors, each a real `2N` block.
    Blocks {
        values: [Vec<f64>; 2],
        vectors: [Mat<f64>; 2],
    },
    Dense {
        values: Vec<f64>,
        vectors: Mat<c64>,
    },
}

impl Spectrum {
    fn compute(params: &ModelParams, lattice: &LatticeConfig, gap: &GapField) -> Result<Self> {
        let n = lattice.num_sites();
        let (cos_phi, _) = params.axis();
        if gap.is_real() && params.j_coupling * cos_phi == 0.0 {
            let mut blocks = [Mat::<f64>::zeros(2 * n, 2 * n), Mat::<f64>::zeros(2 * n, 2 * n)];
            model::for_each_entry(params, lattice, gap, |r, c, v| {
                let (br, bc) = ((r % 4) / 2, (c % 4) / 2);
                debug_assert_eq!(br, bc);
                blocks[br][(2 * (r / 4) + r % 2, 2 * (c / 4) + c % 2)] += v.re;
            })?;
            let (va, ua) = linalg::real_symmetric_eigen(&blocks[0])?;
            let (vb, ub) = linalg::real_symmetric_eigen(&blocks[1])?;
            Ok(Self::Blocks { values: [va, vb], vectors: [ua, ub] })
        } else {
            let h = model::assemble_bdg_matrix(params, lattice, gap)?;
            let eig = linalg::hermitian_eigen(h.as_ref())?;
            Ok(Self::Dense { values: eig.values, vectors: eig.vectors })
        }
    }

    fn gap_update(&self, params: &ModelParams) -> GapField {
        match self {
            Self::Dense { values, vectors } => gap_update(values, vectors, params),
            Self::Blocks { values, vectors } => {
                let n_sites = vectors[0].nrows() / 2;
                let mut delta = vec![c64::new(0.0, 0.0); n_sites];
                if params.g == 0.0 {
                    return GapField { delta };
                }
                for (vals, u) in values.iter().zip(vectors) {
                    for (k, &e) in vals.iter().enumerate() {
                        if !(e > 0.0 && e < params.omega_d) {
                            continue;
                        }
                        let w = -params.g * (fermi(e, params.temperature) - 0.5);
                        let col = u.col(k);
                        for (i, d) in delta.iter_mut().enumerate() {
                            d.re += w * col[2 * i] * col[2 * i + 1];
                        }
                    }
                }
                GapField { delta }
            }
        }
    }

    /// Sorted eigenvalues and `4N` complex eigenvectors with fixed phases.
    fn into_dense(self) -> (Vec<f64>, Mat<c64>) {
        let (values, mut vectors) = match self {
            Self::Dense { values, vectors } => (values, vectors),
            Self::Blocks { values, vectors } => {
                let n = vectors[0].nrows() / 2;
                let dim = 4 * n;
                let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dim);
                for (b, vals) in values.iter().enumerate() {
                    pairs.extend(vals.iter().enumerate().map(|(k, &e)| (e, b, k)));
                }
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut out = Mat::<c64>::zeros(dim, dim);
                for (col, &(_, b, k)) in pairs.iter().enumerate() {
                    let u = &vectors[b];
                    for i in 0..n {
                        out[(4 * i + 2 * b, col)] = c64::new(u[(2 * i, k)], 0.0);
                        out[(4 * i + 2 * b + 1, col)] = c64::new(u[(2 * i + 1, k)], 0.0);
                    }
                }
                (pairs.iter().map(|p| p.0).collect(), out)
            }
        };
        linalg::fix_phases(&mut vectors);
        (values, vectors)
    }
}

/// Diagonalizes the BdG matrix, exploiting structure when possible: a real
/// matrix takes the real symmetric solver, and with no spin-flip term the
/// `(u↑, v↓)` and `(u↓, v↑)` sectors are solved as separate `2N` blocks.
pub fn diagonalize(params: &ModelParams, lattice: &LatticeConfig, gap: &GapField) -> Result<(Vec<f64>, Mat<c64>)> {
    Ok(Spectrum::compute(params, lattice, gap)?.into_dense())
}

/// Iterates assemble → diagonalize → gap update with linear mixing
/// `Δ ← αΔ_new + (1 − α)Δ_old` until the largest change drops below `tol`.
pub fn solve_self_consistent(
    params: &ModelParams,
    lattice: &LatticeConfig,
    init: &GapField,
    options: &SolverOptions,
) -> Result<BdgSolution> {
    options.validate()?;
    params.validate()?;
    init.validate(lattice.num_sites())?;
    let alpha = options.mixing;
    let mut gap = init.clone();
    let mut history = Vec::new();
    for iteration in 1..=options.max_iter {
        let spectrum = Spectrum::compute(params, lattice, &gap)?;
        let updated = spectrum.gap_update(params);
        let residual = updated.max_abs_diff(&gap);
        history.push(residual);
        if !residual.is_finite() {
            break;
        }
        if residual < options.tol {
            let (energies, vectors) = spectrum.into_dense();
            return Ok(BdgSolution::from_parts(*params, *lattice, energies, vectors, gap, iteration, residual));
        }
        for (old, new) in gap.delta.iter_mut().zip(&updated.delta) {
            *old = new * alpha + *old * (1.0 - alpha);
        }
    }
    Err(Error::Convergence {
        iterations: history.len(),
        residual: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}
