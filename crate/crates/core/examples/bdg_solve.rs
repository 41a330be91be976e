//! Self-consistent solutions below and above the transition on a 9x9 lattice.

use ysr_fidelity::bdg::{solve_self_consistent, SolverOptions};
use ysr_fidelity::lattice::LatticeConfig;
use ysr_fidelity::model::{electronic_magnetization, in_gap_levels, mean_field_energy, GapField, ModelParams};

fn main() -> ysr_fidelity::Result<()> {
    let lattice = LatticeConfig::square(9)?;
    let options = SolverOptions::default();
    let impurity = ModelParams::default().impurity(&lattice)?;
    let corner = lattice.site_index(0, 0)?;
    for j in [0.0, 1.0, 2.5] {
        let params = ModelParams::default().with_coupling(j);
        let sol = solve_self_consistent(&params, &lattice, &GapField::uniform(lattice.num_sites(), 0.5), &options)?;
        let m = electronic_magnetization(&sol, params.phi);
        let level = in_gap_levels(&sol).map(|l| l.positive).unwrap_or(f64::NAN);
        println!(
            "J = {j:.2}: {:3} iterations, impurity gap {:+.5}, corner gap {:+.5}, lowest level {level:.5}, M = {:.4}, E = {:.6}",
            sol.iterations,
            sol.gap.delta[impurity].re,
            sol.gap.delta[corner].re,
            m.total,
            mean_field_energy(&sol),
        );
    }
    Ok(())
}
