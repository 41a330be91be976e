//! Calibration of the pairing strength: bulk gap, coherence length and a
//! coarse bracket of the level-crossing coupling.

use serde::{Deserialize, Serialize};

use crate::bdg::{solve_self_consistent, SolverOptions};
use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::model::{GapField, ModelParams};
use crate::sweep::{solve_branch, Direction, Probe};

/// Bulk gaps below this count as no superconducting solution.
pub const MIN_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub g: f64,
    pub omega_d: f64,
    /// Gap at the lattice center for J = 0.
    pub delta0: f64,
    /// Fermi velocity averaged over the Fermi surface.
    pub fermi_velocity: f64,
    /// `v_F / (π Δ₀)` in lattice spacings.
    pub coherence_length: f64,
    /// Adjacent coarse-grid couplings between which the total magnetization jumps.
    pub j0_bracket: Option<(f64, f64)>,
    pub coarse_grid: Vec<f64>,
    pub coarse_magnetization: Vec<f64>,
}

/// Mean of `|∇ξ_k|` along the Fermi surface `ξ_k = −2t(cos kx + cos ky) − ε_F = 0`,
/// sampled uniformly in `kx`.
pub fn fermi_velocity(params: &ModelParams) -> Option<f64> {
    let target = -params.eps_f / (2.0 * params.t);
    let samples = 4096;
    let (mut sum, mut count) = (0.0, 0usize);
    for k in 0..samples {
        let kx = std::f64::consts::PI * (k as f64 + 0.5) / samples as f64;
        let cy = target - kx.cos();
        if cy.abs() <= 1.0 {
            let ky = cy.acos();
            sum += 2.0 * params.t * (kx.sin().powi(2) + ky.sin().powi(2)).sqrt();
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// Solves at J = 0 for the bulk gap, then runs a warm-started upward sweep
/// over `coarse_grid` recording the total magnetization.
pub fn calibrate(
    params: &ModelParams,
    lattice: &LatticeConfig,
    options: &SolverOptions,
    coarse_grid: &[f64],
    initial_gap: f64,
) -> Result<CalibrationReport> {
    let n = lattice.num_sites();
    let clean = params.with_coupling(0.0);
    let sol = solve_self_consistent(&clean, lattice, &GapField::uniform(n, initial_gap), options)?;
    let delta0 = sol.gap.delta[lattice.center()].norm();
    if delta0 < MIN_GAP {
        return Err(Error::Calibration(format!(
            "no gapped solution at g = {} (bulk gap {delta0:.3e}); increase g or omega_d",
            params.g
        )));
    }
    let fermi_velocity = fermi_velocity(params)
        .ok_or_else(|| Error::Calibration(format!("no Fermi surface at eps_f = {}", params.eps_f)))?;
    let branch =
        solve_branch(params, lattice, coarse_grid, &Probe::default(), options, Direction::Up, true, initial_gap)?;
    let mut grid = Vec::new();
    let mut magnetization = Vec::new();
    for snap in branch.snapshots.values() {
        grid.push(snap.j);
        magnetization.push(snap.total_magnetization);
    }
    let j0_bracket = (1..grid.len())
        .filter(|&k| (magnetization[k] - magnetization[k - 1]).abs() > 0.5)
        .max_by(|&a, &b| {
            let da = (magnetization[a] - magnetization[a - 1]).abs();
            let db = (magnetization[b] - magnetization[b - 1]).abs();
            da.total_cmp(&db)
        })
        .map(|k| (grid[k - 1], grid[k]));
    Ok(CalibrationReport {
        g: params.g,
        omega_d: params.omega_d,
        delta0,
        fermi_velocity,
        coherence_length: fermi_velocity / (std::f64::consts::PI * delta0),
        j0_bracket,
        coarse_grid: grid,
        coarse_magnetization: magnetization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_fails_calibration() {
        let params = ModelParams { g: 0.0, ..ModelParams::default() };
        let lattice = LatticeConfig::square(4).unwrap();
        let err = calibrate(&params, &lattice, &SolverOptions::default(), &[0.5], 0.5).unwrap_err();
        assert!(matches!(err, Error::Calibration(_)));
    }

    #[test]
    fn fermi_velocity_bounds() {
        // Along an axis |v| = √3, along the diagonal 2√2·sin(acos ¼).
        let v = fermi_velocity(&ModelParams::default()).unwrap();
        assert!(v > 3f64.sqrt() && v < 2.0 * 2f64.sqrt() * (0.25f64).acos().sin());
        assert!(fermi_velocity(&ModelParams { eps_f: -10.0, ..ModelParams::default() }).is_none());
    }
}
