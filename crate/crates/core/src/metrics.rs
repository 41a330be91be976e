//! Fidelity, the Uhlmann overlap H, classical fidelity and the C₂ quotient.
//!
//! All square roots go through the clipped spectral decomposition in
//! [`linalg::density_sqrt`].

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rdm::DensityMatrix;
use crate::sweep::SweepMode;

/// Allowed overshoot of F above one and of H above F.
pub const FIDELITY_SLACK: f64 = 1e-9;
/// Largest imaginary part of Tr(√ρa√ρb) accepted before it is discarded.
pub const H_IMAG_TOL: f64 = 1e-10;
/// Off-block weight above which the charge/spin split is rejected.
pub const BLOCK_LEAKAGE_TOL: f64 = 1e-8;
/// Relative tolerance for merging degenerate observable eigenvalues.
pub const DEGENERACY_RTOL: f64 = 1e-10;
/// Block traces below this are treated as empty.
const EMPTY_BLOCK: f64 = 1e-14;

fn same_dim(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<()> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    Ok(())
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `F = Tr|√ρa √ρb|`, the trace norm of `√ρa √ρb`, which equals
/// `Tr √(√ρa ρb √ρa)` without a second square root.
pub fn fidelity_matrix(rho_a: MatRef<'_, c64>, rho_b: MatRef<'_, c64>) -> Result<f64> {
    same_dim(rho_a, rho_b)?;
    let x = linalg::density_sqrt(rho_a)? * linalg::density_sqrt(rho_b)?;
    let s = x.singular_values().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(clamp_unit(s.iter().sum()))
}

/// Fidelity by the textbook route: eigenvalues of `√ρa ρb √ρa`, clipped,
/// then summed square roots. Kept as an independent cross-check of
/// [`fidelity_matrix`].
pub fn fidelity_matrix_eigen(rho_a: MatRef<'_, c64>, rho_b: MatRef<'_, c64>) -> Result<f64> {
    same_dim(rho_a, rho_b)?;
    let sa = linalg::density_sqrt(rho_a)?;
    let inner = linalg::hermitian_part((&sa * rho_b * &sa).as_ref());
    let eig = linalg::hermitian_eigen(inner.as_ref())?;
    let min = eig.values[0];
    if min < -linalg::PSD_CLIP {
        return Err(Error::NotPsd(min));
    }
    Ok(clamp_unit(eig.values.iter().map(|&v| v.max(0.0).sqrt()).sum()))
}

pub fn fidelity(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<f64> {
    fidelity_matrix(rho_a.matrix().as_ref(), rho_b.matrix().as_ref())
}

/// `H = Tr(√ρa √ρb)`.
pub fn h_overlap_matrix(rho_a: MatRef<'_, c64>, rho_b: MatRef<'_, c64>) -> Result<f64> {
    same_dim(rho_a, rho_b)?;
    let x = linalg::density_sqrt(rho_a)? * linalg::density_sqrt(rho_b)?;
    let h = linalg::trace(x.as_ref());
    if h.im.abs() > H_IMAG_TOL {
        return Err(Error::NumericalConsistency(format!("Tr(√ρa√ρb) has imaginary part {:.3e}", h.im)));
    }
    Ok(h.re.max(0.0))
}

pub fn h_overlap(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<f64> {
    h_overlap_matrix(rho_a.matrix().as_ref(), rho_b.matrix().as_ref())
}

/// Uhlmann unitary `V` from the polar decomposition of `√ρa √ρb = W Σ Y†`,
/// `V = Y W†`, chosen so that `Tr(√ρa √ρb V) = F`. For rank-deficient
/// states `V` is not unique; this is the SVD's choice.
pub fn uhlmann_unitary(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<Mat<c64>> {
    same_dim(rho_a.matrix().as_ref(), rho_b.matrix().as_ref())?;
    let x = linalg::density_sqrt(rho_a.matrix().as_ref())? * linalg::density_sqrt(rho_b.matrix().as_ref())?;
    let svd = x.svd().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(svd.V() * svd.U().adjoint())
}

/// Frobenius norm of `V − I`.
pub fn uhlmann_deviation(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<f64> {
    let v = uhlmann_unitary(rho_a, rho_b)?;
    let n = v.nrows();
    let mut acc = 0.0;
    for c in 0..n {
        for r in 0..n {
            let id = if r == c { 1.0 } else { 0.0 };
            acc += (v[(r, c)] - c64::new(id, 0.0)).norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// `Σ √(p_a p_b)` over the outcomes of measuring `observable`; degenerate
/// eigenvalues share one projector.
pub fn classical_fidelity_matrix(
    rho_a: MatRef<'_, c64>,
    rho_b: MatRef<'_, c64>,
    observable: MatRef<'_, c64>,
) -> Result<f64> {
    same_dim(rho_a, rho_b)?;
    same_dim(rho_a, observable)?;
    let eig = linalg::hermitian_eigen(observable)?;
    let n = eig.values.len();
    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let prob = |rho: MatRef<'_, c64>, k: usize| -> f64 {
        let v = eig.vectors.col(k);
        let mut acc = c64::new(0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                acc += v[r].conj() * rho[(r, c)] * v[c];
            }
        }
        acc.re
    };
    let mut total = 0.0;
    let mut k = 0;
    while k < n {
        let (mut pa, mut pb) = (0.0, 0.0);
        let start = eig.values[k];
        while k < n && (eig.values[k] - start).abs() <= DEGENERACY_RTOL * scale {
            pa += prob(rho_a, k);
            pb += prob(rho_b, k);
            k += 1;
        }
        total += (pa.max(0.0) * pb.max(0.0)).sqrt();
    }
    Ok(clamp_unit(total))
}

pub fn classical_fidelity(rho_a: &DensityMatrix, rho_b: &DensityMatrix, observable: MatRef<'_, c64>) -> Result<f64> {
    classical_fidelity_matrix(rho_a.matrix().as_ref(), rho_b.matrix().as_ref(), observable)
}

/// `C₂ = F₂ / (F₁ F₁′)`.
pub fn c2_quotient(f2: f64, f1_first: f64, f1_second: f64) -> Result<f64> {
    let denom = f1_first * f1_second;
    if !(denom > f64::EPSILON) {
        return Err(Error::SingularQuotient(denom));
    }
    Ok(f2 / denom)
}

/// Fidelities restricted to the charge block `{|0⟩, |↑↓⟩}` and the spin
/// block `{|↑⟩, |↓⟩}` of two one-site states, each block renormalized to
/// unit trace. Two empty blocks count as identical; one empty block as
/// orthogonal.
pub fn charge_spin_split(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<(f64, f64)> {
    for rho in [rho_a, rho_b] {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
        }
        let mut leak = 0.0f64;
        for r in 0..2 {
            for c in 2..4 {
                leak = leak.max(rho.get(r, c).norm()).max(rho.get(c, r).norm());
            }
        }
        if leak > BLOCK_LEAKAGE_TOL {
            return Err(Error::Structure(leak));
        }
    }
    let block = |rho: &DensityMatrix, off: usize| -> Option<Mat<c64>> {
        let b = Mat::<c64>::from_fn(2, 2, |r, c| rho.get(off + r, off + c));
        let tr = linalg::trace(b.as_ref()).re;
        (tr > EMPTY_BLOCK).then(|| Mat::<c64>::from_fn(2, 2, |r, c| b[(r, c)] / tr))
    };
    let part = |off: usize| -> Result<f64> {
        match (block(rho_a, off), block(rho_b, off)) {
            (Some(a), Some(b)) => fidelity_matrix(a.as_ref(), b.as_ref()),
            (None, None) => Ok(1.0),
            _ => Ok(0.0),
        }
    };
    Ok((part(0)?, part(2)?))
}

/// Fidelity, H and derived quantities for one pair of states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    pub fidelity: f64,
    pub h_value: f64,
}

impl PairMetrics {
    pub fn compute(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<Self> {
        let fidelity = fidelity(rho_a, rho_b)?;
        let h_value = h_overlap(rho_a, rho_b)?;
        if h_value > fidelity + FIDELITY_SLACK {
            return Err(Error::NumericalConsistency(format!("H = {h_value} exceeds F = {fidelity}")));
        }
        Ok(Self { fidelity, h_value })
    }

    pub fn f_minus_h(&self) -> f64 {
        self.fidelity - self.h_value
    }
}

/// One row of sweep output. Site coordinates are `(x, y)`; optional fields
/// are absent where the mode does not define them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub j_value: f64,
    pub delta_j: Option<f64>,
    pub mode: SweepMode,
    pub site_a: (usize, usize),
    pub site_b: Option<(usize, usize)>,
    pub fidelity: f64,
    pub h_value: f64,
    pub f_charge: Option<f64>,
    pub f_spin: Option<f64>,
    pub c2: Option<f64>,
    pub total_magnetization: f64,
    pub min_positive_level: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl FidelityRecord {
    pub fn f_minus_h(&self) -> f64 {
        self.fidelity - self.h_value
    }

    /// `0 ≤ H ≤ F ≤ 1` within [`FIDELITY_SLACK`].
    pub fn check(&self) -> Result<()> {
        let (f, h) = (self.fidelity, self.h_value);
        let ok = (0.0..=1.0 + FIDELITY_SLACK).contains(&f) && h >= -FIDELITY_SLACK && h <= f + FIDELITY_SLACK;
        if !ok {
            return Err(Error::NumericalConsistency(format!("record at J = {}: F = {f}, H = {h}", self.j_value)));
        }
        Ok(())
    }
}
