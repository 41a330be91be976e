//! Fidelity, the H overlap, the Uhlmann indicator and the C₂ quotient on
//! hand-built one- and two-site states.

use faer::Mat;
use num_complex::Complex64 as c64;
use ysr_fidelity::metrics::{
    c2_quotient, charge_spin_split, classical_fidelity, fidelity, h_overlap, uhlmann_deviation,
};
use ysr_fidelity::rdm::DensityMatrix;

fn diagonal(p: &[f64]) -> DensityMatrix {
    DensityMatrix::from_matrix(Mat::from_fn(p.len(), p.len(), |r, c| c64::new(if r == c { p[r] } else { 0.0 }, 0.0)))
        .expect("valid state")
}

fn main() -> ysr_fidelity::Result<()> {
    let a = diagonal(&[0.5, 0.5, 0.0, 0.0]);
    let b = diagonal(&[0.8, 0.2, 0.0, 0.0]);
    println!("commuting pair: F = {:.6}, H = {:.6}", fidelity(&a, &b)?, h_overlap(&a, &b)?);

    // A BCS-like coherence between |0⟩ and |↑↓⟩ rotates the eigenbasis.
    let coherent = DensityMatrix::from_matrix(Mat::from_fn(4, 4, |r, c| match (r, c) {
        (0, 0) | (1, 1) => c64::new(0.5, 0.0),
        (0, 1) | (1, 0) => c64::new(0.4, 0.0),
        _ => c64::new(0.0, 0.0),
    }))?;
    let f = fidelity(&coherent, &b)?;
    let h = h_overlap(&coherent, &b)?;
    println!("rotated pair:   F = {f:.6}, H = {h:.6}, F - H = {:.3e}", f - h);
    println!("Uhlmann unitary deviation from identity: {:.3e}", uhlmann_deviation(&coherent, &b)?);

    let (f_charge, f_spin) = charge_spin_split(&coherent, &b)?;
    println!("charge/spin split: {f_charge:.6} / {f_spin:.6}");

    let number = Mat::from_fn(4, 4, |r, c| c64::new(if r == c { [0.0, 2.0, 1.0, 1.0][r] } else { 0.0 }, 0.0));
    println!(
        "classical fidelity of the occupation number: {:.6} (>= F)",
        classical_fidelity(&coherent, &b, number.as_ref())?
    );

    // Product states have C₂ = 1.
    let pa = a.tensor(&a)?;
    let pb = b.tensor(&b)?;
    let c2 = c2_quotient(fidelity(&pa, &pb)?, fidelity(&a, &b)?, fidelity(&a, &b)?)?;
    println!("C2 for a product pair: {c2:.12}");
    Ok(())
}
