//! Self-check suite: oracle equivalence, spectral symmetry and fidelity
//! axioms on small lattices and random matrices.

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bdg::{self, BdgSolution};
use crate::error::{Error, Result};
use crate::fock::{self, fock_oracle_rdm, random_cluster};
use crate::lattice::{Boundary, LatticeConfig};
use crate::linalg;
use crate::metrics;
use crate::model::{self, GapField, ModelParams};
use crate::rdm;
use crate::wick::{build_correlators, CorrelatorTable, Op, OperatorString, Orbital, PairingSign};

/// Random complex matrix with entries uniform in the unit square around 0.
fn random_complex<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Mat<c64> {
    Mat::from_fn(rows, cols, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// `A A† / Tr` for a random `dim × rank` matrix `A`.
pub fn random_density_matrix<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> Mat<c64> {
    let a = random_complex(rng, dim, rank.max(1));
    let rho = &a * a.adjoint();
    let tr = linalg::trace(rho.as_ref()).re;
    linalg::hermitian_part(Mat::from_fn(dim, dim, |r, c| rho[(r, c)] / tr).as_ref())
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> Mat<c64> {
    linalg::hermitian_part(random_complex(rng, dim, dim).as_ref())
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> Result<Mat<c64>> {
    let eig = linalg::hermitian_eigen(random_hermitian(rng, dim).as_ref())?;
    let u = &eig.vectors;
    Ok(Mat::from_fn(dim, dim, |r, c| {
        (0..dim).map(|k| u[(r, k)] * u[(c, k)].conj() * c64::from_polar(1.0, 3.0 * eig.values[k])).sum()
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub mutation: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `Ok` if every check passed, otherwise [`Error::Verification`] naming the failures.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            return Ok(self);
        }
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(Error::Verification(failed.join(", ")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Drop the fermionic pairing signs in the Wick expansion; the oracle
    /// check must then fail.
    pub mutation: bool,
    pub oracle_clusters: usize,
    pub matrix_pairs_4: usize,
    pub matrix_pairs_16: usize,
    pub observables_per_pair: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            mutation: false,
            oracle_clusters: 24,
            matrix_pairs_4: 10_000,
            matrix_pairs_16: 1_000,
            observables_per_pair: 10,
        }
    }
}

fn check(name: &str, outcome: Result<String>) -> CheckResult {
    match outcome {
        Ok(detail) => CheckResult { name: name.into(), passed: true, detail },
        Err(e) => CheckResult { name: name.into(), passed: false, detail: e.to_string() },
    }
}

fn fail(msg: String) -> Error {
    Error::Verification(msg)
}

pub fn run(options: &VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let rule = if options.mutation { PairingSign::Ignored } else { PairingSign::Permutation };
    let checks = vec![
        check("wick_pairing_count", pairing_count()),
        check("oracle_reduced_states", oracle_equivalence(&mut rng, options.oracle_clusters, rule)),
        check("oracle_six_site_chain", six_site_chain(rule)),
        check("gap_equation_vs_oracle", gap_equation()),
        check("bdg_particle_hole", particle_hole(&mut rng)),
        check("fidelity_axioms", fidelity_axioms(&mut rng, options)),
    ];
    VerifyReport { seed: options.seed, mutation: options.mutation, checks }
}

fn pairing_count() -> Result<String> {
    let orbs: Vec<Orbital> = (0..2).flat_map(|s| [Orbital::up(s), Orbital::down(s)]).collect();
    let table = CorrelatorTable::from_contractions(orbs.clone(), Mat::from_fn(8, 8, |_, _| c64::new(1.0, 0.0)))?;
    let ops: Vec<Op> = orbs.iter().flat_map(|&o| [Op::create(o), Op::annihilate(o)]).collect();
    let count = crate::wick::pairing_sum(&OperatorString::new(ops)?, &table, PairingSign::Ignored)?;
    if count != c64::new(105.0, 0.0) {
        return Err(fail(format!("8-operator string has {count} pairings, expected 105")));
    }
    Ok("105 pairings".into())
}

fn orbitals(sites: &[usize]) -> Vec<Orbital> {
    sites.iter().flat_map(|&s| [Orbital::up(s), Orbital::down(s)]).collect()
}

/// Largest deviation between the Wick pipeline and the oracle for `sites`,
/// or `None` if the oracle finds a degenerate ground state.
fn compare(
    params: &ModelParams,
    lattice: &LatticeConfig,
    gap: &GapField,
    sites: &[usize],
    rule: PairingSign,
) -> Result<Option<f64>> {
    let exact = match fock_oracle_rdm(params, lattice, gap, sites) {
        Ok(r) => r,
        Err(Error::Untestable(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sol = BdgSolution::fixed_gap(params, lattice, gap)?;
    let table = build_correlators(&sol, &orbitals(sites), 0.0)?;
    let rho = match sites {
        [a] => rdm::one_site_rdm_with(&table, *a, rule)?,
        [a, b] => {
            let two = rdm::two_site_rdm_with(&table, *a, *b, rule)?;
            for (site, reduced) in [(*a, two.trace_out_second()?), (*b, two.trace_out_first()?)] {
                let one = rdm::one_site_rdm_with(&build_correlators(&sol, &orbitals(&[site]), 0.0)?, site, rule)?;
                let d = one.max_abs_diff(&reduced);
                if d > 1e-10 {
                    return Err(fail(format!("partial trace of pair {sites:?} differs from site {site} by {d:.3e}")));
                }
            }
            let leak = two.parity_leakage();
            if leak > 1e-12 {
                return Err(fail(format!("parity leakage {leak:.3e}")));
            }
            two
        }
        _ => return Err(Error::Domain("one or two sites".into())),
    };
    Ok(Some(rho.max_abs_diff(&exact)))
}

fn oracle_equivalence(rng: &mut ChaCha8Rng, clusters: usize, rule: PairingSign) -> Result<String> {
    let mut tested = 0;
    let mut worst = 0.0f64;
    let mut attempts = 0;
    while tested < clusters && attempts < 20 * clusters.max(1) {
        attempts += 1;
        let (params, lattice, gap) = random_cluster(rng);
        let n = lattice.num_sites();
        let imp = params.impurity_site.expect("random clusters place the impurity");
        let other = (imp + 1 + rng.random_range(0..n - 1)) % n;
        let mut any = false;
        for sites in [vec![imp], vec![other], vec![imp, other]] {
            if let Some(d) = compare(&params, &lattice, &gap, &sites, rule)? {
                worst = worst.max(d);
                any = true;
            }
        }
        tested += any as usize;
    }
    if tested < clusters {
        return Err(fail(format!("only {tested} of {clusters} clusters were testable")));
    }
    if worst > 1e-10 {
        return Err(fail(format!("max deviation {worst:.3e} over {tested} clusters")));
    }
    Ok(format!("{tested} clusters, max deviation {worst:.3e}"))
}

fn six_site_chain(rule: PairingSign) -> Result<String> {
    let lattice = LatticeConfig::cluster(6, 1, Boundary::Open);
    let params = ModelParams {
        g: 1.0,
        omega_d: 100.0,
        j_coupling: 1.3,
        phi: 0.7,
        impurity_site: Some(2),
        ..ModelParams::default()
    };
    let gap = GapField { delta: (0..6).map(|k| c64::new(0.4, 0.1 * k as f64)).collect() };
    let mut worst = 0.0f64;
    for sites in [vec![2], vec![2, 3], vec![0, 5]] {
        let d =
            compare(&params, &lattice, &gap, &sites, rule)?.ok_or_else(|| fail("six-site chain degenerate".into()))?;
        worst = worst.max(d);
    }
    if worst > 1e-10 {
        return Err(fail(format!("max deviation {worst:.3e}")));
    }
    Ok(format!("max deviation {worst:.3e}"))
}

fn gap_equation() -> Result<String> {
    let lattice = LatticeConfig::cluster(2, 2, Boundary::Open);
    let params = ModelParams {
        g: 1.7,
        omega_d: 1e3,
        j_coupling: 0.8,
        phi: 0.3,
        impurity_site: Some(1),
        ..ModelParams::default()
    };
    let gap =
        GapField { delta: vec![c64::new(0.3, 0.1), c64::new(0.2, 0.0), c64::new(0.25, -0.05), c64::new(0.3, 0.0)] };
    let sol = BdgSolution::fixed_gap(&params, &lattice, &gap)?;
    let updated = sol.gap_update();
    let mut worst = 0.0f64;
    for i in 0..4 {
        let exact = fock::pair_amplitude(&params, &lattice, &gap, i)? * params.g;
        worst = worst.max((exact - updated.delta[i]).norm());
    }
    if worst > 1e-10 {
        return Err(fail(format!("gap equation differs from g⟨c↑c↓⟩ by {worst:.3e}")));
    }
    Ok(format!("max deviation {worst:.3e}"))
}

fn particle_hole(rng: &mut ChaCha8Rng) -> Result<String> {
    let lattice = LatticeConfig::square(5)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let params = ModelParams {
            eps_f: rng.random_range(-2.0..2.0),
            j_coupling: rng.random_range(0.0..3.5),
            phi: rng.random_range(0.0..std::f64::consts::TAU),
            impurity_site: Some(rng.random_range(0..25)),
            ..ModelParams::default()
        };
        let gap = GapField {
            delta: (0..25).map(|_| c64::from_polar(rng.random_range(0.0..0.5), rng.random_range(0.0..6.3))).collect(),
        };
        let eig = bdg::eigensolve(&model::assemble_bdg_matrix(&params, &lattice, &gap)?)?;
        let e = &eig.values;
        for k in 0..e.len() {
            worst = worst.max((e[k] + e[e.len() - 1 - k]).abs());
        }
    }
    if worst > 1e-8 {
        return Err(fail(format!("spectrum asymmetry {worst:.3e}")));
    }
    Ok(format!("10 draws, max asymmetry {worst:.3e}"))
}

fn fidelity_axioms(rng: &mut ChaCha8Rng, options: &VerifyOptions) -> Result<String> {
    let slack = metrics::FIDELITY_SLACK;
    for (dim, pairs) in [(4, options.matrix_pairs_4), (16, options.matrix_pairs_16)] {
        for _ in 0..pairs {
            let ra = rng.random_range(1..=dim);
            let rb = rng.random_range(1..=dim);
            let a = random_density_matrix(rng, dim, ra);
            let b = random_density_matrix(rng, dim, rb);
            let f = metrics::fidelity_matrix(a.as_ref(), b.as_ref())?;
            let h = metrics::h_overlap_matrix(a.as_ref(), b.as_ref())?;
            if !(h >= -slack && h <= f + slack && f <= 1.0 + slack) {
                return Err(fail(format!("ordering violated: H = {h}, F = {f}")));
            }
            let f_rev = metrics::fidelity_matrix(b.as_ref(), a.as_ref())?;
            if (f - f_rev).abs() > slack {
                return Err(fail(format!("asymmetry {:.3e}", (f - f_rev).abs())));
            }
            let self_f = metrics::fidelity_matrix(a.as_ref(), a.as_ref())?;
            if (self_f - 1.0).abs() > 1e-10 {
                return Err(fail(format!("F(ρ, ρ) = {self_f}")));
            }
            let u = random_unitary(rng, dim)?;
            let rot = |m: &Mat<c64>| linalg::hermitian_part((&u * m * u.adjoint()).as_ref());
            let f_rot = metrics::fidelity_matrix(rot(&a).as_ref(), rot(&b).as_ref())?;
            if (f - f_rot).abs() > slack {
                return Err(fail(format!("unitary invariance broken by {:.3e}", (f - f_rot).abs())));
            }
            for _ in 0..options.observables_per_pair {
                let obs = random_hermitian(rng, dim);
                let fc = metrics::classical_fidelity_matrix(a.as_ref(), b.as_ref(), obs.as_ref())?;
                if f > fc + slack {
                    return Err(fail(format!("F = {f} exceeds F_c = {fc}")));
                }
            }
        }
    }
    Ok(format!(
        "{} pairs at dim 4, {} at dim 16, {} observables each",
        options.matrix_pairs_4, options.matrix_pairs_16, options.observables_per_pair
    ))
}
