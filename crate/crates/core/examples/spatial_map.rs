//! Fidelity between the impurity's one-site state and every other site,
//! below and above the transition.

use ysr_fidelity::bdg::SolverOptions;
use ysr_fidelity::lattice::LatticeConfig;
use ysr_fidelity::model::{GapField, ModelParams};
use ysr_fidelity::sweep::spatial_map;

fn main() -> ysr_fidelity::Result<()> {
    let lattice = LatticeConfig::square(9)?;
    let params = ModelParams::default();
    let impurity = params.impurity(&lattice)?;
    let init = GapField::uniform(lattice.num_sites(), 0.5);
    for j in [1.5, 2.5] {
        let map = spatial_map(&params, &lattice, j, impurity, &init, &SolverOptions::default())?;
        println!("J = {j}");
        for y in 0..map.height {
            let row: Vec<String> = (0..map.width).map(|x| format!("{:.3}", map.at(x, y))).collect();
            println!("  {}", row.join(" "));
        }
    }
    Ok(())
}
