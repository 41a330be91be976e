//! Two-site fidelity for the pairs (impurity, impurity + δl x̂) and the C₂
//! quotient near the transition.

use ysr_fidelity::bdg::SolverOptions;
use ysr_fidelity::lattice::LatticeConfig;
use ysr_fidelity::model::ModelParams;
use ysr_fidelity::sweep::{run_sweep, Direction, SweepMode, SweepPlan};

fn main() -> ysr_fidelity::Result<()> {
    let lattice = LatticeConfig::square(9)?;
    let plan = SweepPlan {
        j_min: 1.8,
        j_max: 2.0,
        mode: SweepMode::C2,
        max_delta_l: 4,
        directions: vec![Direction::Up],
        ..SweepPlan::default()
    };
    let out = run_sweep(&plan, &ModelParams::default(), &lattice, &SolverOptions::default())?;
    println!("    J  dl        F2        C2-1");
    for r in &out[0].records {
        let dl = r.site_b.map(|b| b.0 - r.site_a.0).unwrap_or(0);
        println!("{:.2}  {dl}  {:.6}  {:+.3e}", r.j_value, r.fidelity, r.c2.unwrap_or(f64::NAN) - 1.0);
    }
    Ok(())
}
