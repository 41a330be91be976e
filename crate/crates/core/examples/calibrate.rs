//! Bulk gap, coherence length and a coarse J₀ bracket for the default couplings.

use ysr_fidelity::bdg::SolverOptions;
use ysr_fidelity::calibration::calibrate;
use ysr_fidelity::lattice::LatticeConfig;
use ysr_fidelity::model::ModelParams;

fn main() -> ysr_fidelity::Result<()> {
    let lattice = LatticeConfig::square(9)?;
    let grid: Vec<f64> = (0..=12).map(|k| 0.25 * k as f64).collect();
    let report = calibrate(&ModelParams::default(), &lattice, &SolverOptions::default(), &grid, 0.5)?;
    println!("g = {}, omega_d = {}", report.g, report.omega_d);
    println!(
        "bulk gap {:.5}, v_F {:.4}, coherence length {:.3}",
        report.delta0, report.fermi_velocity, report.coherence_length
    );
    println!("J0 bracket {:?}", report.j0_bracket);
    Ok(())
}
