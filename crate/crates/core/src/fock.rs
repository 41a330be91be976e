//! Exact many-body reference for small clusters.
//!
//! The Hamiltonian is built directly in the occupation basis (Jordan–Wigner
//! order: site index, then spin ↑ before ↓), with the pairing field held
//! fixed so it is exactly quadratic. Its ground state is found per fermion
//! parity sector and partially traced onto the requested sites. Nothing here
//! goes through the BdG matrix or the Wick engine.

use faer::{c64, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{LatticeConfig, SiteId};
use crate::model::{GapField, ModelParams};
use crate::rdm::DensityMatrix;

/// Largest cluster the oracle accepts (Fock dimension 4⁶ = 4096).
pub const MAX_ORACLE_SITES: usize = 6;
/// Ground states closer than this in energy are considered degenerate.
pub const DEGENERACY_TOL: f64 = 1e-7;
/// Parity sectors up to this size are diagonalized densely.
const DENSE_LIMIT: usize = 256;

fn mode(site: SiteId, down: bool) -> usize {
    2 * site + down as usize
}

/// `c†_k` (create) or `c_k` on a basis state; `None` when it vanishes.
fn apply(state: u32, k: usize, create: bool) -> Option<(u32, f64)> {
    let occupied = state >> k & 1 == 1;
    if occupied == create {
        return None;
    }
    let below = (state & ((1u32 << k) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state ^ (1 << k), sign))
}

/// Applies an operator product (rightmost acts first).
fn apply_product(state: u32, ops: &[(usize, bool)]) -> Option<(u32, f64)> {
    let mut s = state;
    let mut sign = 1.0;
    for &(k, create) in ops.iter().rev() {
        let (next, sg) = apply(s, k, create)?;
        s = next;
        sign *= sg;
    }
    Some((s, sign))
}

/// Amplitude times a product of `(mode, create)` operators.
type Term = (c64, Vec<(usize, bool)>);

/// Many-body Hamiltonian as a list of terms.
fn hamiltonian_terms(params: &ModelParams, lattice: &LatticeConfig, gap: &GapField) -> Result<Vec<Term>> {
    let n = lattice.num_sites();
    let imp = params.impurity(lattice)?;
    let (cos_phi, sin_phi) = params.axis();
    let re = |x: f64| c64::new(x, 0.0);
    let mut terms = Vec::new();
    for i in 0..n {
        for j in lattice.neighbors(i)? {
            for down in [false, true] {
                terms.push((re(-params.t), vec![(mode(i, down), true), (mode(j, down), false)]));
            }
        }
        for down in [false, true] {
            terms.push((re(-params.eps_f), vec![(mode(i, down), true), (mode(i, down), false)]));
        }
        let d = gap.delta[i];
        terms.push((d, vec![(mode(i, false), true), (mode(i, true), true)]));
        terms.push((d.conj(), vec![(mode(i, true), false), (mode(i, false), false)]));
    }
    let j = params.j_coupling;
    let (up, dn) = (mode(imp, false), mode(imp, true));
    terms.push((re(-j * cos_phi), vec![(up, true), (dn, false)]));
    terms.push((re(-j * cos_phi), vec![(dn, true), (up, false)]));
    terms.push((re(-j * sin_phi), vec![(up, true), (up, false)]));
    terms.push((re(j * sin_phi), vec![(dn, true), (dn, false)]));
    Ok(terms)
}

/// Sparse matrix restricted to one parity sector: `rows[r]` lists `(col, value)`.
struct Sector {
    states: Vec<u32>,
    rows: Vec<Vec<(usize, c64)>>,
}

fn build_sector(terms: &[(c64, Vec<(usize, bool)>)], modes: usize, odd: bool) -> Sector {
    let states: Vec<u32> = (0..1u32 << modes).filter(|s| (s.count_ones() % 2 == 1) == odd).collect();
    let mut index = vec![usize::MAX; 1 << modes];
    for (k, &s) in states.iter().enumerate() {
        index[s as usize] = k;
    }
    // H|s⟩ = Σ amp·sign |s'⟩ gives column s; store rows of H (= conj of columns).
    let mut rows: Vec<Vec<(usize, c64)>> = vec![Vec::new(); states.len()];
    for (col, &s) in states.iter().enumerate() {
        for (amp, ops) in terms {
            if *amp == c64::new(0.0, 0.0) {
                continue;
            }
            if let Some((t, sign)) = apply_product(s, ops) {
                rows[index[t as usize]].push((col, amp * sign));
            }
        }
    }
    for row in &mut rows {
        row.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, c64)> = Vec::with_capacity(row.len());
        for &(c, v) in row.iter() {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        *row = merged;
    }
    Sector { states, rows }
}

impl Sector {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn apply(&self, x: &[c64], y: &mut [c64]) {
        for (r, row) in self.rows.iter().enumerate() {
            y[r] = row.iter().map(|&(c, v)| v * x[c]).sum();
        }
    }

    fn dense(&self) -> Mat<c64> {
        let mut m = Mat::<c64>::zeros(self.dim(), self.dim());
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }
}

/// Lowest two eigenvalues and the ground-state vector of a sector.
struct LowSpectrum {
    e0: f64,
    e1: f64,
    ground: Vec<c64>,
}

fn dense_low(sector: &Sector) -> Result<LowSpectrum> {
    let h = sector.dense();
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    Ok(LowSpectrum {
        e0: s[0].re,
        e1: if sector.dim() > 1 { s[1].re } else { f64::INFINITY },
        ground: (0..sector.dim()).map(|r| u[(r, 0)]).collect(),
    })
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(v: &mut [c64]) -> f64 {
    let n = dot(v, v).re.sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
    n
}

/// Lanczos with full reorthogonalization, restarted from the Ritz vector
/// until the ground-state residual is below 1e-12.
fn lanczos_low(sector: &Sector, seed: u64) -> Result<LowSpectrum> {
    let n = sector.dim();
    let krylov = n.min(160);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<c64> = (0..n).map(|_| c64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    normalize(&mut start);
    let mut w = vec![c64::new(0.0, 0.0); n];
    for _restart in 0..20 {
        let mut basis: Vec<Vec<c64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for k in 0..krylov {
            sector.apply(&basis[k], &mut w);
            let a = dot(&basis[k], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let proj = dot(q, &w);
                    for (x, y) in w.iter_mut().zip(q) {
                        *x -= y * proj;
                    }
                }
            }
            let b = dot(&w, &w).re.sqrt();
            if k + 1 == krylov || b < 1e-13 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let m = alpha.len();
        let t = Mat::<f64>::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r.abs_diff(c) == 1 {
                beta[r.min(c)]
            } else {
                0.0
            }
        });
        let evd = t.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let y = evd.U();
        let mut ritz = vec![c64::new(0.0, 0.0); n];
        for (k, q) in basis.iter().enumerate().take(m) {
            for (x, v) in ritz.iter_mut().zip(q) {
                *x += v * y[(k, 0)];
            }
        }
        normalize(&mut ritz);
        sector.apply(&ritz, &mut w);
        let e0 = dot(&ritz, &w).re;
        let resid = w.iter().zip(&ritz).map(|(hx, x)| (hx - x * e0).norm_sqr()).sum::<f64>().sqrt();
        if resid < 1e-12 {
            return Ok(LowSpectrum { e0, e1: if m > 1 { s[1] } else { f64::INFINITY }, ground: ritz });
        }
        start = ritz;
    }
    Err(Error::Untestable("Lanczos ground state did not converge".into()))
}

fn low_spectrum(sector: &Sector) -> Result<LowSpectrum> {
    if sector.dim() <= DENSE_LIMIT {
        dense_low(sector)
    } else {
        lanczos_low(sector, 0x5eed)
    }
}

/// Ground state of the full quadratic Hamiltonian in the occupation basis,
/// as `(energy, state amplitudes indexed by occupation bits)`.
pub fn ground_state(params: &ModelParams, lattice: &LatticeConfig, gap: &GapField) -> Result<(f64, Vec<c64>)> {
    params.validate()?;
    let n = lattice.num_sites();
    if n > MAX_ORACLE_SITES {
        return Err(Error::Domain(format!("oracle supports at most {MAX_ORACLE_SITES} sites, got {n}")));
    }
    gap.validate(n)?;
    let terms = hamiltonian_terms(params, lattice, gap)?;
    let modes = 2 * n;
    let mut best: Option<(f64, Sector, LowSpectrum)> = None;
    let mut energies = Vec::new();
    for odd in [false, true] {
        let sector = build_sector(&terms, modes, odd);
        let low = low_spectrum(&sector)?;
        energies.push(low.e0);
        if best.as_ref().is_none_or(|b| low.e0 < b.0) {
            best = Some((low.e0, sector, low));
        }
    }
    if (energies[0] - energies[1]).abs() < DEGENERACY_TOL {
        return Err(Error::Untestable(format!(
            "even and odd ground states degenerate (splitting {:.3e})",
            (energies[0] - energies[1]).abs()
        )));
    }
    let (e0, sector, low) = best.expect("two sectors examined");
    if low.e1 - low.e0 < DEGENERACY_TOL {
        return Err(Error::Untestable(format!(
            "degenerate ground state within parity sector (splitting {:.3e})",
            low.e1 - low.e0
        )));
    }
    let mut psi = vec![c64::new(0.0, 0.0); 1 << modes];
    for (k, &s) in sector.states.iter().enumerate() {
        psi[s as usize] = low.ground[k];
    }
    Ok((e0, psi))
}

/// Exact ground-state pair amplitude `⟨c_{i↑} c_{i↓}⟩`.
pub fn pair_amplitude(params: &ModelParams, lattice: &LatticeConfig, gap: &GapField, site: SiteId) -> Result<c64> {
    lattice.check_site(site)?;
    let (_, psi) = ground_state(params, lattice, gap)?;
    let ops = [(mode(site, false), false), (mode(site, true), false)];
    let mut acc = c64::new(0.0, 0.0);
    for (s, &amp) in psi.iter().enumerate() {
        if amp == c64::new(0.0, 0.0) {
            continue;
        }
        if let Some((t, sign)) = apply_product(s as u32, &ops) {
            acc += psi[t as usize].conj() * amp * sign;
        }
    }
    Ok(acc)
}

/// Reduced state of `sites` from the exact ground state, in the local basis
/// `|0⟩, |↑↓⟩, |↑⟩, |↓⟩` (tensor order for two sites).
pub fn fock_oracle_rdm(
    params: &ModelParams,
    lattice: &LatticeConfig,
    gap: &GapField,
    sites: &[SiteId],
) -> Result<DensityMatrix> {
    if sites.is_empty() || sites.len() > 2 || (sites.len() == 2 && sites[0] == sites[1]) {
        return Err(Error::Domain("oracle needs one site or two distinct sites".into()));
    }
    for &s in sites {
        lattice.check_site(s)?;
    }
    let (_, psi) = ground_state(params, lattice, gap)?;
    Ok(partial_trace(&psi, 2 * lattice.num_sites(), sites))
}

/// Traces out every mode not on `sites`. The subsystem modes are first
/// brought to the front of the Jordan–Wigner order (in the order
/// `sites[0]↑, sites[0]↓, sites[1]↑, …`), with the fermionic reordering sign.
fn partial_trace(psi: &[c64], modes: usize, sites: &[SiteId]) -> DensityMatrix {
    let sub: Vec<usize> = sites.iter().flat_map(|&s| [mode(s, false), mode(s, true)]).collect();
    let rest: Vec<usize> = (0..modes).filter(|m| !sub.contains(m)).collect();
    let order: Vec<usize> = sub.iter().chain(&rest).copied().collect();
    let local_dim = 1usize << sub.len();
    let label = |bits: u32| -> usize {
        // (n↑, n↓) → index in |0⟩, |↑↓⟩, |↑⟩, |↓⟩
        let site_label = |up: bool, down: bool| match (up, down) {
            (false, false) => 0,
            (true, true) => 1,
            (true, false) => 2,
            (false, true) => 3,
        };
        let mut idx = 0;
        for s in 0..sites.len() {
            idx = 4 * idx + site_label(bits >> (2 * s) & 1 == 1, bits >> (2 * s + 1) & 1 == 1);
        }
        idx
    };
    // amplitudes[(local, rest_bits)]
    let mut split: Vec<std::collections::HashMap<u32, c64>> = vec![Default::default(); local_dim];
    for (state, &amp) in psi.iter().enumerate() {
        if amp == c64::new(0.0, 0.0) {
            continue;
        }
        let state = state as u32;
        let occupied: Vec<usize> = order.iter().copied().filter(|&m| state >> m & 1 == 1).collect();
        // Sign of permuting the ascending occupied list into `order`.
        let mut inversions = 0;
        for a in 0..occupied.len() {
            for b in a + 1..occupied.len() {
                if occupied[a] > occupied[b] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let mut local = 0u32;
        for (k, &m) in sub.iter().enumerate() {
            local |= (state >> m & 1) << k;
        }
        let mut rest_bits = 0u32;
        for (k, &m) in rest.iter().enumerate() {
            rest_bits |= (state >> m & 1) << k;
        }
        split[label(local)].insert(rest_bits, amp * sign);
    }
    let rho = Mat::<c64>::from_fn(local_dim, local_dim, |a, b| {
        split[a].iter().filter_map(|(r, x)| split[b].get(r).map(|y| x * y.conj())).sum()
    });
    DensityMatrix::from_matrix(rho).expect("partial trace of a normalized state is a density matrix")
}

/// Random single-site-on-a-cluster parameters for oracle comparisons.
pub fn random_cluster<R: Rng>(rng: &mut R) -> (ModelParams, LatticeConfig, GapField) {
    use crate::lattice::Boundary;
    let shapes = [(1, 2), (2, 1), (1, 3), (2, 2), (1, 4), (1, 5), (2, 3), (3, 2), (1, 6)];
    let (w, h) = shapes[rng.random_range(0..shapes.len())];
    let boundary = if w >= 2 && h >= 2 && rng.random::<bool>() { Boundary::Periodic } else { Boundary::Open };
    let lattice = LatticeConfig::cluster(w, h, boundary);
    let n = lattice.num_sites();
    let params = ModelParams {
        t: rng.random_range(0.5..1.5),
        eps_f: rng.random_range(-2.0..2.0),
        g: 1.0,
        omega_d: 100.0,
        j_coupling: rng.random_range(0.0..3.0),
        phi: rng.random_range(0.0..std::f64::consts::TAU),
        temperature: 0.0,
        impurity_site: Some(rng.random_range(0..n)),
    };
    let delta = (0..n)
        .map(|_| c64::from_polar(rng.random_range(0.1..1.0), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    (params, lattice, GapField { delta })
}
