//! Reduced density matrices from Wick contractions against Fock-space exact
//! diagonalization on small random clusters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ysr_fidelity::bdg::BdgSolution;
use ysr_fidelity::fock::{fock_oracle_rdm, random_cluster};
use ysr_fidelity::rdm::{one_site_rdm, two_site_rdm};
use ysr_fidelity::wick::{build_correlators, Orbital};
use ysr_fidelity::Error;

fn main() -> ysr_fidelity::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..8 {
        let (params, lattice, gap) = random_cluster(&mut rng);
        let a = params.impurity_site.unwrap_or(0);
        let b = (a + 1) % lattice.num_sites();
        let sol = BdgSolution::fixed_gap(&params, &lattice, &gap)?;
        let table =
            build_correlators(&sol, &[Orbital::up(a), Orbital::down(a), Orbital::up(b), Orbital::down(b)], 0.0)?;
        let wick_one = one_site_rdm(&table, a)?;
        let wick_two = two_site_rdm(&table, a, b)?;
        let (exact_one, exact_two) =
            match (fock_oracle_rdm(&params, &lattice, &gap, &[a]), fock_oracle_rdm(&params, &lattice, &gap, &[a, b])) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(Error::Untestable(why)), _) | (_, Err(Error::Untestable(why))) => {
                    println!("{}x{}: skipped ({why})", lattice.width, lattice.height);
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
        println!(
            "{}x{} J = {:.3}: one-site deviation {:.2e}, two-site deviation {:.2e}",
            lattice.width,
            lattice.height,
            params.j_coupling,
            wick_one.max_abs_diff(&exact_one),
            wick_two.max_abs_diff(&exact_two),
        );
    }
    Ok(())
}
