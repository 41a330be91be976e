//! Physical parameters and the real-space BdG matrix.
//!
//! Each site carries the four amplitudes `(u↑, v↓, u↓, v↑)`, stored at
//! offsets [`U_UP`], [`V_DOWN`], [`U_DOWN`], [`V_UP`] inside the site block
//! `4 * i .. 4 * i + 4`. In operator language the block corresponds to the
//! Nambu spinor `(c↑, c↓†, c↓, −c↑†)`, so that `H = ½ Ψ† 𝓗 Ψ + const`.

use std::f64::consts::FRAC_PI_2;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::bdg::BdgSolution;
use crate::error::{Error, Result};
use crate::lattice::{LatticeConfig, SiteId};

pub const U_UP: usize = 0;
pub const V_DOWN: usize = 1;
pub const U_DOWN: usize = 2;
pub const V_UP: usize = 3;

/// Pairing strength fixed by the calibration run (see `calibrate`).
pub const CALIBRATED_G: f64 = 2.5;
/// Debye cutoff fixed by the calibration run.
pub const CALIBRATED_OMEGA_D: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Nearest-neighbor hopping; the energy unit.
    pub t: f64,
    /// Chemical potential ε_F.
    pub eps_f: f64,
    /// Effective pairing attraction.
    pub g: f64,
    /// Debye cutoff on the gap-equation sum.
    pub omega_d: f64,
    /// Exchange coupling to the classical impurity spin (spin length absorbed).
    pub j_coupling: f64,
    /// Impurity spin angle: direction `cos φ x̂ + sin φ ẑ`.
    pub phi: f64,
    pub temperature: f64,
    /// Impurity location; `None` places it at the lattice center.
    pub impurity_site: Option<SiteId>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            t: 1.0,
            eps_f: -1.0,
            g: CALIBRATED_G,
            omega_d: CALIBRATED_OMEGA_D,
            j_coupling: 0.0,
            phi: FRAC_PI_2,
            temperature: 0.0,
            impurity_site: None,
        }
    }
}

impl ModelParams {
    pub fn with_coupling(mut self, j: f64) -> Self {
        self.j_coupling = j;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.t > 0.0, "t must be positive"),
            (self.g >= 0.0, "g must be non-negative"),
            (self.omega_d > 0.0, "omega_d must be positive"),
            (self.temperature >= 0.0, "temperature must be non-negative"),
            (self.j_coupling >= 0.0, "J must be non-negative"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::Domain(msg.into()));
            }
        }
        let finite = [self.t, self.eps_f, self.g, self.omega_d, self.j_coupling, self.phi, self.temperature];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite model parameter".into()));
        }
        Ok(())
    }

    pub fn impurity(&self, lattice: &LatticeConfig) -> Result<SiteId> {
        let site = self.impurity_site.unwrap_or_else(|| lattice.center());
        lattice.check_site(site)?;
        Ok(site)
    }

    /// `(cos φ, sin φ)` with angles within 1e-12 of a multiple of π/2 snapped
    /// to exact values, so the spin-flip terms vanish identically for an
    /// impurity spin along ẑ.
    pub fn axis(&self) -> (f64, f64) {
        let quarter = self.phi / FRAC_PI_2;
        let k = quarter.round();
        if (quarter - k).abs() < 1e-12 {
            match (k as i64).rem_euclid(4) {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                2 => (-1.0, 0.0),
                _ => (0.0, -1.0),
            }
        } else {
            (self.phi.cos(), self.phi.sin())
        }
    }
}

/// Site-resolved complex order parameter Δᵢ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapField {
    pub delta: Vec<c64>,
}

impl GapField {
    pub fn zeros(n: usize) -> Self {
        Self { delta: vec![c64::new(0.0, 0.0); n] }
    }

    pub fn uniform(n: usize, value: f64) -> Self {
        Self { delta: vec![c64::new(value, 0.0); n] }
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.delta.iter().all(|d| d.im == 0.0)
    }

    pub fn max_abs_diff(&self, other: &GapField) -> f64 {
        self.delta.iter().zip(&other.delta).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.len() });
        }
        if self.delta.iter().any(|d| !d.re.is_finite() || !d.im.is_finite()) {
            return Err(Error::Domain("non-finite gap entry".into()));
        }
        Ok(())
    }
}

/// Visits every nonzero entry `(row, col, value)` of the BdG matrix. Shared by
/// the dense complex assembly and the real block-decoupled fast path.
pub(crate) fn for_each_entry(
    params: &ModelParams,
    lattice: &LatticeConfig,
    gap: &GapField,
    mut visit: impl FnMut(usize, usize, c64),
) -> Result<()> {
    params.validate()?;
    let n = lattice.num_sites();
    if n == 0 {
        return Err(Error::Domain("empty lattice".into()));
    }
    gap.validate(n)?;
    let imp = params.impurity(lattice)?;
    let (cos_phi, sin_phi) = params.axis();
    let jz = params.j_coupling * sin_phi;
    let jx = params.j_coupling * cos_phi;
    let re = |x: f64| c64::new(x, 0.0);

    for i in 0..n {
        let b = 4 * i;
        for j in lattice.neighbors(i)? {
            let c = 4 * j;
            // h = t ŝ_δ: −h on particle rows, +h on hole rows.
            visit(b + U_UP, c + U_UP, re(-params.t));
            visit(b + V_DOWN, c + V_DOWN, re(params.t));
            visit(b + U_DOWN, c + U_DOWN, re(-params.t));
            visit(b + V_UP, c + V_UP, re(params.t));
        }
        let (mz_up, mz_down) = if i == imp { (jz, -jz) } else { (0.0, 0.0) };
        visit(b + U_UP, b + U_UP, re(-params.eps_f - mz_up));
        visit(b + V_DOWN, b + V_DOWN, re(params.eps_f - mz_up));
        visit(b + U_DOWN, b + U_DOWN, re(-params.eps_f - mz_down));
        visit(b + V_UP, b + V_UP, re(params.eps_f - mz_down));

        let d = gap.delta[i];
        visit(b + U_UP, b + V_DOWN, d);
        visit(b + V_DOWN, b + U_UP, d.conj());
        visit(b + U_DOWN, b + V_UP, d);
        visit(b + V_UP, b + U_DOWN, d.conj());

        if i == imp && jx != 0.0 {
            visit(b + U_UP, b + U_DOWN, re(-jx));
            visit(b + U_DOWN, b + U_UP, re(-jx));
            visit(b + V_DOWN, b + V_UP, re(-jx));
            visit(b + V_UP, b + V_DOWN, re(-jx));
        }
    }
    Ok(())
}

/// Dense `4N × 4N` BdG matrix.
pub fn assemble_bdg_matrix(params: &ModelParams, lattice: &LatticeConfig, gap: &GapField) -> Result<Mat<c64>> {
    let dim = 4 * lattice.num_sites();
    let mut h = Mat::<c64>::zeros(dim, dim);
    for_each_entry(params, lattice, gap, |r, c, v| h[(r, c)] += v)?;
    Ok(h)
}

/// Site-resolved spin polarization along the impurity axis together with its
/// lattice sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Magnetization {
    /// `⟨c†σ·n̂ c⟩` per site, in units where a single up electron gives 1.
    pub per_site: Vec<f64>,
    pub total: f64,
}

/// Spin density along `cos φ x̂ + sin φ ẑ`.
pub fn electronic_magnetization(solution: &BdgSolution, phi: f64) -> Magnetization {
    let axis = ModelParams { phi, ..ModelParams::default() }.axis();
    let (cos_phi, sin_phi) = axis;
    let n = solution.num_sites();
    let per_site: Vec<f64> = (0..n)
        .map(|i| {
            let b = 4 * i;
            // n↑ = ⟨(−Ψ_v↑)(−Ψ_v↑)†⟩, n↓ = ⟨Ψ_v↓ Ψ_v↓†⟩, c↑†c↓ = ⟨(−Ψ_v↑) Ψ_v↓†⟩
            let n_up = solution.green(b + V_UP, b + V_UP).re;
            let n_down = solution.green(b + V_DOWN, b + V_DOWN).re;
            let flip = -solution.green(b + V_UP, b + V_DOWN);
            sin_phi * (n_up - n_down) + cos_phi * 2.0 * flip.re
        })
        .collect();
    let total = per_site.iter().sum();
    Magnetization { per_site, total }
}

/// Quasiparticle-vacuum energy of the quadratic Hamiltonian at fixed gap:
/// `−½ Σ_{εₙ>0} εₙ − ½ Σ_hole 𝓗_pp`. This is the exact many-body ground
/// energy of the mean-field Hamiltonian without the `Σ|Δ|²/g` constant.
pub fn quasiparticle_vacuum_energy(solution: &BdgSolution) -> f64 {
    let p = &solution.params;
    let n = solution.num_sites();
    let positive: f64 = solution.energies.iter().filter(|&&e| e > 0.0).sum();
    let zero_modes = solution.energies.iter().filter(|&&e| e == 0.0).count();
    debug_assert!(zero_modes % 2 == 0);
    // Hole diagonals: εF ∓ J sinφ on the impurity cancel, leaving 2N εF.
    -0.5 * positive - p.eps_f * n as f64
}

/// Mean-field ground-state energy `E_vac + Σᵢ|Δᵢ|²/g`, the functional whose
/// stationary points at T = 0 solve the gap equation when the Debye window
/// covers the whole spectrum. Used to pick between coexisting branches.
pub fn mean_field_energy(solution: &BdgSolution) -> f64 {
    let g = solution.params.g;
    let condensate = if g > 0.0 { solution.gap.delta.iter().map(|d| d.norm_sqr()).sum::<f64>() / g } else { 0.0 };
    quasiparticle_vacuum_energy(solution) + condensate
}

/// The in-gap level pair: the smallest positive eigenvalue and its partner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InGapLevels {
    pub positive: f64,
    pub negative: f64,
}

pub fn in_gap_levels(solution: &BdgSolution) -> Result<InGapLevels> {
    let max_gap = solution.gap.delta.iter().map(|d| d.norm()).fold(0.0, f64::max);
    if max_gap <= 1e-10 {
        return Err(Error::Gapless(max_gap));
    }
    let positive = solution.energies.iter().copied().filter(|&e| e > 0.0).fold(f64::INFINITY, f64::min);
    if !positive.is_finite() {
        return Err(Error::Gapless(0.0));
    }
    let negative = solution
        .energies
        .iter()
        .copied()
        .filter(|&e| e <= 0.0)
        .min_by(|a, b| (a + positive).abs().total_cmp(&(b + positive).abs()))
        .ok_or(Error::Gapless(0.0))?;
    Ok(InGapLevels { positive, negative })
}
