//! One-site fidelity F(J, J + δJ) at the impurity, a neighbor and a bulk
//! site across the transition on a 9x9 lattice.

use ysr_fidelity::bdg::SolverOptions;
use ysr_fidelity::lattice::LatticeConfig;
use ysr_fidelity::model::ModelParams;
use ysr_fidelity::sweep::{locate_transition, run_sweep, Direction, SweepPlan};

fn main() -> ysr_fidelity::Result<()> {
    let lattice = LatticeConfig::square(9)?;
    let params = ModelParams::default();
    let plan = SweepPlan {
        j_min: 1.5,
        j_max: 2.3,
        site_offsets: vec![[0, 0], [1, 0], [3, 3]],
        directions: vec![Direction::Up],
        ..SweepPlan::default()
    };
    let out = run_sweep(&plan, &params, &lattice, &SolverOptions::default())?;
    let records = &out[0].records;
    println!("    J   impurity   neighbor       bulk   F-H(imp)        M");
    for chunk in records.chunks(3) {
        println!(
            "{:.2}  {:.6}  {:.6}  {:.6}  {:.2e}  {:7.4}",
            chunk[0].j_value,
            chunk[0].fidelity,
            chunk[1].fidelity,
            chunk[2].fidelity,
            chunk[0].f_minus_h(),
            chunk[0].total_magnetization
        );
    }
    let own: Vec<_> = records.iter().filter(|r| r.site_a == (4, 4)).cloned().collect();
    println!("{:?}", locate_transition(&own)?);
    Ok(())
}
