//! Upward and downward warm-started sweeps through the first-order
//! transition, with the crossing of their mean-field energies.

use ysr_fidelity::bdg::SolverOptions;
use ysr_fidelity::lattice::LatticeConfig;
use ysr_fidelity::model::ModelParams;
use ysr_fidelity::sweep::{energy_crossing, hysteresis, run_sweep, SweepPlan};

fn main() -> ysr_fidelity::Result<()> {
    let lattice = LatticeConfig::square(9)?;
    let plan = SweepPlan { j_min: 1.4, j_max: 2.2, site_offsets: vec![[0, 0]], ..SweepPlan::default() };
    let out = run_sweep(&plan, &ModelParams::default(), &lattice, &SolverOptions::default())?;
    let (up, down) = (&out[0], &out[1]);
    println!("    J   M(up)  M(down)   E(up) - E(down)");
    for j in plan.grid() {
        if let (Some(a), Some(b)) = (up.branch.at(j), down.branch.at(j)) {
            println!(
                "{j:.2}  {:6.3}  {:6.3}  {:+.6}",
                a.total_magnetization,
                b.total_magnetization,
                a.energy - b.energy
            );
        }
    }
    println!("branches disagree on F at {:?}", hysteresis(&up.records, &down.records, 1e-6));
    println!("energy crossing at J = {:?}", energy_crossing(&up.branch, &down.branch));
    Ok(())
}
