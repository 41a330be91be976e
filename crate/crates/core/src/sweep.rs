//! Coupling sweeps, spatial fidelity maps and transition location.

use std::collections::{BTreeMap, BTreeSet};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bdg::{solve_self_consistent, BdgSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::lattice::{LatticeConfig, SiteId};
use crate::metrics::{self, c2_quotient, charge_spin_split, FidelityRecord, PairMetrics};
use crate::model::{electronic_magnetization, in_gap_levels, mean_field_energy, GapField, ModelParams};
use crate::rdm::{one_site_rdm, two_site_rdm, DensityMatrix};
use crate::wick::{build_correlators, Orbital};

/// Minimum fidelity above which no transition is reported.
pub const TRANSITION_THRESHOLD: f64 = 0.999;

/// Energy differences below this count as the same branch.
pub const ENERGY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// F between the same site's state at J and J + δJ.
    OneSiteSameSite,
    /// F between a reference site and every site at the same J.
    OneSiteSpatial,
    /// Two-site F for the pairs (impurity, impurity + δl x̂).
    TwoSite,
    /// Two-site F with its one-site factors and the C₂ quotient.
    C2,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::OneSiteSameSite => "one_site_same_site",
            Self::OneSiteSpatial => "one_site_spatial",
            Self::TwoSite => "two_site",
            Self::C2 => "c2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepPlan {
    pub j_min: f64,
    pub j_max: f64,
    pub j_step: f64,
    pub delta_j: f64,
    pub mode: SweepMode,
    /// One-site probes as `[dx, dy]` offsets from the impurity.
    pub site_offsets: Vec<[i64; 2]>,
    /// Two-site separations run over `1..=max_delta_l` along +x.
    pub max_delta_l: usize,
    /// Spatial-mode reference as an offset from the impurity.
    pub reference_offset: [i64; 2],
    pub warm_start: bool,
    pub directions: Vec<Direction>,
    /// Uniform starting gap for cold starts and the first warm-start point.
    pub initial_gap: f64,
}

impl Default for SweepPlan {
    fn default() -> Self {
        Self {
            j_min: 0.5,
            j_max: 3.5,
            j_step: 0.05,
            delta_j: 0.05,
            mode: SweepMode::OneSiteSameSite,
            site_offsets: vec![[0, 0], [1, 0], [1, 1], [4, 4]],
            max_delta_l: 6,
            reference_offset: [0, 0],
            warm_start: true,
            directions: vec![Direction::Up, Direction::Down],
            initial_gap: 0.5,
        }
    }
}

fn key(j: f64) -> i64 {
    (j * 1e9).round() as i64
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.j_min, self.j_max, self.j_step, self.delta_j, self.initial_gap];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite sweep parameter".into()));
        }
        if !(self.j_step > 0.0) {
            return Err(Error::Domain("j_step must be positive".into()));
        }
        if !(self.delta_j > 0.0) {
            return Err(Error::Domain("delta_j must be positive".into()));
        }
        if self.j_min < 0.0 {
            return Err(Error::Domain("j_min must be non-negative".into()));
        }
        Ok(())
    }

    /// Grid values `j_min + k·j_step ≤ j_max`; empty if `j_max < j_min`.
    pub fn grid(&self) -> Vec<f64> {
        if self.j_max < self.j_min {
            return Vec::new();
        }
        let count = ((self.j_max - self.j_min) / self.j_step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.j_min + k as f64 * self.j_step).collect()
    }

    /// Every coupling that must be solved: the grid and its `J + δJ` partners.
    pub fn solve_points(&self) -> Vec<f64> {
        let mut points: BTreeMap<i64, f64> = BTreeMap::new();
        for j in self.grid() {
            points.entry(key(j)).or_insert(j);
            if self.mode != SweepMode::OneSiteSpatial {
                let jb = j + self.delta_j;
                points.entry(key(jb)).or_insert(jb);
            }
        }
        points.into_values().collect()
    }

    pub fn one_site_sites(&self, lattice: &LatticeConfig, impurity: SiteId) -> Result<Vec<SiteId>> {
        self.site_offsets.iter().map(|&[dx, dy]| lattice.offset(impurity, dx, dy)).collect()
    }

    pub fn pairs(&self, lattice: &LatticeConfig, impurity: SiteId) -> Result<Vec<(SiteId, SiteId)>> {
        (1..=self.max_delta_l).map(|dl| Ok((impurity, lattice.offset(impurity, dl as i64, 0)?))).collect()
    }

    pub fn reference(&self, lattice: &LatticeConfig, impurity: SiteId) -> Result<SiteId> {
        lattice.offset(impurity, self.reference_offset[0], self.reference_offset[1])
    }

    /// Reduced states this plan's mode needs at every solved coupling.
    pub fn probe(&self, lattice: &LatticeConfig, impurity: SiteId) -> Result<Probe> {
        let mut probe = Probe::default();
        match self.mode {
            SweepMode::OneSiteSameSite => probe.one_site.extend(self.one_site_sites(lattice, impurity)?),
            SweepMode::OneSiteSpatial => probe.one_site.extend(0..lattice.num_sites()),
            SweepMode::TwoSite | SweepMode::C2 => {
                for (a, b) in self.pairs(lattice, impurity)? {
                    probe.two_site.insert((a, b));
                    if self.mode == SweepMode::C2 {
                        probe.one_site.extend([a, b]);
                    }
                }
            }
        }
        Ok(probe)
    }
}

/// Which reduced states to keep from each solution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Probe {
    pub one_site: BTreeSet<SiteId>,
    pub two_site: BTreeSet<(SiteId, SiteId)>,
}

impl Probe {
    pub fn union(mut self, other: &Probe) -> Probe {
        self.one_site.extend(other.one_site.iter().copied());
        self.two_site.extend(other.two_site.iter().copied());
        self
    }
}

/// What is kept from one converged solution.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub j: f64,
    pub gap: GapField,
    pub iterations: usize,
    pub residual: f64,
    pub total_magnetization: f64,
    pub min_positive_level: Option<f64>,
    /// Mean-field ground-state energy, for comparing coexisting branches.
    pub energy: f64,
    pub one_site: BTreeMap<SiteId, DensityMatrix>,
    pub two_site: BTreeMap<(SiteId, SiteId), DensityMatrix>,
}

impl Snapshot {
    pub fn from_solution(solution: &BdgSolution, probe: &Probe) -> Result<Self> {
        let orbitals = |sites: &[SiteId]| -> Vec<Orbital> {
            sites.iter().flat_map(|&s| [Orbital::up(s), Orbital::down(s)]).collect()
        };
        let t = solution.params.temperature;
        let mut one_site = BTreeMap::new();
        for &s in &probe.one_site {
            let table = build_correlators(solution, &orbitals(&[s]), t)?;
            one_site.insert(s, one_site_rdm(&table, s)?);
        }
        let mut two_site = BTreeMap::new();
        for &(a, b) in &probe.two_site {
            let table = build_correlators(solution, &orbitals(&[a, b]), t)?;
            two_site.insert((a, b), two_site_rdm(&table, a, b)?);
        }
        Ok(Self {
            j: solution.params.j_coupling,
            gap: solution.gap.clone(),
            iterations: solution.iterations,
            residual: solution.residual,
            total_magnetization: electronic_magnetization(solution, solution.params.phi).total,
            min_positive_level: in_gap_levels(solution).ok().map(|l| l.positive),
            energy: mean_field_energy(solution),
            one_site,
            two_site,
        })
    }

    fn one(&self, s: SiteId) -> Result<&DensityMatrix> {
        self.one_site.get(&s).ok_or_else(|| Error::Domain(format!("site {s} not probed")))
    }

    fn two(&self, a: SiteId, b: SiteId) -> Result<&DensityMatrix> {
        self.two_site.get(&(a, b)).ok_or_else(|| Error::Domain(format!("pair ({a}, {b}) not probed")))
    }
}

/// A coupling whose self-consistent solve failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub j: f64,
    pub message: String,
}

/// Solutions along one sweep direction, keyed by coupling.
#[derive(Debug, Clone)]
pub struct Branch {
    pub direction: Direction,
    pub snapshots: BTreeMap<i64, Snapshot>,
    pub failures: Vec<PointFailure>,
}

impl Branch {
    pub fn at(&self, j: f64) -> Option<&Snapshot> {
        self.snapshots.get(&key(j))
    }
}

/// Solves every coupling in `points`. With `warm_start` the points run
/// sequentially in the sweep direction, each seeded by the last converged
/// gap; otherwise each starts from a uniform gap and points run in parallel.
#[allow(clippy::too_many_arguments)]
pub fn solve_branch(
    params: &ModelParams,
    lattice: &LatticeConfig,
    points: &[f64],
    probe: &Probe,
    options: &SolverOptions,
    direction: Direction,
    warm_start: bool,
    initial_gap: f64,
) -> Result<Branch> {
    params.validate()?;
    options.validate()?;
    let mut order = points.to_vec();
    order.sort_by(f64::total_cmp);
    if direction == Direction::Down {
        order.reverse();
    }
    let n = lattice.num_sites();
    let solve_one = |j: f64, init: &GapField| -> Result<Snapshot> {
        let p = params.with_coupling(j);
        let sol = solve_self_consistent(&p, lattice, init, options)?;
        info!("{} J = {j:.4}: {} iterations, residual {:.2e}", direction.as_str(), sol.iterations, sol.residual);
        Snapshot::from_solution(&sol, probe)
    };
    let mut snapshots = BTreeMap::new();
    let mut failures = Vec::new();
    let mut record = |j: f64, outcome: Result<Snapshot>| -> Result<Option<GapField>> {
        match outcome {
            Ok(s) => {
                let gap = s.gap.clone();
                snapshots.insert(key(j), s);
                Ok(Some(gap))
            }
            Err(e @ Error::Convergence { .. }) => {
                warn!("{} J = {j:.4}: {e}", direction.as_str());
                failures.push(PointFailure { j, message: e.to_string() });
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };
    let cold = GapField::uniform(n, initial_gap);
    if warm_start {
        let mut seed = cold.clone();
        for &j in &order {
            if let Some(gap) = record(j, solve_one(j, &seed))? {
                seed = gap;
            }
        }
    } else {
        let outcomes: Vec<(f64, Result<Snapshot>)> = order.par_iter().map(|&j| (j, solve_one(j, &cold))).collect();
        for (j, outcome) in outcomes {
            record(j, outcome)?;
        }
    }
    Ok(Branch { direction, snapshots, failures })
}

fn coords(lattice: &LatticeConfig, s: SiteId) -> (usize, usize) {
    lattice.site_coords(s).expect("probed sites are on the lattice")
}

/// Fidelity records for `plan.mode` from the solved branch. Grid points
/// whose own or partner solve failed are skipped.
pub fn records(
    plan: &SweepPlan,
    params: &ModelParams,
    lattice: &LatticeConfig,
    branch: &Branch,
) -> Result<Vec<FidelityRecord>> {
    let impurity = params.impurity(lattice)?;
    let mut grid = plan.grid();
    if branch.direction == Direction::Down {
        grid.reverse();
    }
    let mut out = Vec::new();
    for j in grid {
        let Some(sa) = branch.at(j) else { continue };
        let base = |mode: SweepMode, site_a: SiteId, site_b: Option<SiteId>, delta_j: Option<f64>, pm: PairMetrics| {
            FidelityRecord {
                j_value: j,
                delta_j,
                mode,
                site_a: coords(lattice, site_a),
                site_b: site_b.map(|s| coords(lattice, s)),
                fidelity: pm.fidelity,
                h_value: pm.h_value,
                f_charge: None,
                f_spin: None,
                c2: None,
                total_magnetization: sa.total_magnetization,
                min_positive_level: sa.min_positive_level,
                iterations: sa.iterations,
                residual: sa.residual,
            }
        };
        if plan.mode == SweepMode::OneSiteSpatial {
            let reference = plan.reference(lattice, impurity)?;
            let ra = sa.one(reference)?;
            for s in 0..lattice.num_sites() {
                let pm = PairMetrics::compute(ra, sa.one(s)?)?;
                out.push(base(SweepMode::OneSiteSpatial, reference, Some(s), None, pm));
            }
            continue;
        }
        let Some(sb) = branch.at(j + plan.delta_j) else { continue };
        match plan.mode {
            SweepMode::OneSiteSameSite => {
                for s in plan.one_site_sites(lattice, impurity)? {
                    let (a, b) = (sa.one(s)?, sb.one(s)?);
                    let pm = PairMetrics::compute(a, b)?;
                    let (fc, fs) = charge_spin_split(a, b)?;
                    let mut r = base(SweepMode::OneSiteSameSite, s, None, Some(plan.delta_j), pm);
                    r.f_charge = Some(fc);
                    r.f_spin = Some(fs);
                    out.push(r);
                }
            }
            SweepMode::TwoSite | SweepMode::C2 => {
                for (p, q) in plan.pairs(lattice, impurity)? {
                    let pm = PairMetrics::compute(sa.two(p, q)?, sb.two(p, q)?)?;
                    let mut r = base(plan.mode, p, Some(q), Some(plan.delta_j), pm);
                    if plan.mode == SweepMode::C2 {
                        let f1a = metrics::fidelity(sa.one(p)?, sb.one(p)?)?;
                        let f1b = metrics::fidelity(sa.one(q)?, sb.one(q)?)?;
                        r.c2 = Some(c2_quotient(pm.fidelity, f1a, f1b)?);
                    }
                    out.push(r);
                }
            }
            SweepMode::OneSiteSpatial => unreachable!(),
        }
    }
    for r in &out {
        r.check()?;
    }
    Ok(out)
}

/// Records and diagnostics of one sweep direction.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub direction: Direction,
    pub records: Vec<FidelityRecord>,
    pub failures: Vec<PointFailure>,
    pub branch: Branch,
}

/// Runs every direction of `plan`.
pub fn run_sweep(
    plan: &SweepPlan,
    params: &ModelParams,
    lattice: &LatticeConfig,
    options: &SolverOptions,
) -> Result<Vec<SweepOutput>> {
    plan.validate()?;
    let impurity = params.impurity(lattice)?;
    let probe = plan.probe(lattice, impurity)?;
    let points = plan.solve_points();
    plan.directions
        .iter()
        .map(|&direction| {
            let branch =
                solve_branch(params, lattice, &points, &probe, options, direction, plan.warm_start, plan.initial_gap)?;
            let records = records(plan, params, lattice, &branch)?;
            Ok(SweepOutput { direction, records, failures: branch.failures.clone(), branch })
        })
        .collect()
}

/// One-site fidelity between a reference site and every site at one coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialMap {
    pub j: f64,
    pub reference: SiteId,
    pub width: usize,
    pub height: usize,
    /// Row-major per-site fidelity.
    pub fidelity: Vec<f64>,
    pub h_value: Vec<f64>,
}

impl SpatialMap {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.fidelity[y * self.width + x]
    }
}

/// Spatial map from an already converged solution.
pub fn spatial_map_from_solution(solution: &BdgSolution, reference: SiteId) -> Result<SpatialMap> {
    let lattice = solution.lattice;
    let probe = Probe { one_site: (0..lattice.num_sites()).collect(), two_site: BTreeSet::new() };
    let snap = Snapshot::from_solution(solution, &probe)?;
    let ra = snap.one(reference)?;
    let mut fidelity = Vec::with_capacity(lattice.num_sites());
    let mut h_value = Vec::with_capacity(lattice.num_sites());
    for s in 0..lattice.num_sites() {
        let pm = PairMetrics::compute(ra, snap.one(s)?)?;
        fidelity.push(pm.fidelity);
        h_value.push(pm.h_value);
    }
    Ok(SpatialMap {
        j: solution.params.j_coupling,
        reference,
        width: lattice.width,
        height: lattice.height,
        fidelity,
        h_value,
    })
}

/// Solves at `j` from `init` and maps the fidelity against `reference`.
pub fn spatial_map(
    params: &ModelParams,
    lattice: &LatticeConfig,
    j: f64,
    reference: SiteId,
    init: &GapField,
    options: &SolverOptions,
) -> Result<SpatialMap> {
    lattice.check_site(reference)?;
    let sol = solve_self_consistent(&params.with_coupling(j), lattice, init, options)?;
    spatial_map_from_solution(&sol, reference)
}

/// Location of the fidelity minimum and the two independent signatures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    /// Grid coupling with the smallest F(J, J + δJ).
    pub j0: f64,
    /// Grid spacing of the records.
    pub uncertainty: f64,
    pub f_min: f64,
    /// Lower end of the largest total-magnetization step between grid points.
    pub magnetization_jump_j: f64,
    pub magnetization_jump: f64,
    /// Coupling with the smallest positive in-gap level, if any was gapped.
    pub level_min_j: Option<f64>,
    /// All three signatures within one grid step of each other.
    pub concordant: bool,
}

/// Locates the transition from one-site same-site records of a single site.
pub fn locate_transition(records: &[FidelityRecord]) -> Result<TransitionEstimate> {
    let first = records.first().ok_or(Error::NoTransition(f64::NAN))?;
    if records.iter().any(|r| r.mode != SweepMode::OneSiteSameSite || r.site_a != first.site_a) {
        return Err(Error::Domain("transition location needs one-site same-site records of a single site".into()));
    }
    let mut rows: Vec<&FidelityRecord> = records.iter().collect();
    rows.sort_by(|a, b| a.j_value.total_cmp(&b.j_value));
    let min = rows.iter().min_by(|a, b| a.fidelity.total_cmp(&b.fidelity)).expect("non-empty");
    if min.fidelity > TRANSITION_THRESHOLD {
        return Err(Error::NoTransition(min.fidelity));
    }
    let uncertainty = rows.windows(2).map(|w| w[1].j_value - w[0].j_value).fold(f64::INFINITY, f64::min);
    let uncertainty = if uncertainty.is_finite() { uncertainty } else { first.delta_j.unwrap_or(0.0) };
    let (jump_j, jump) = rows
        .windows(2)
        .map(|w| (w[0].j_value, (w[1].total_magnetization - w[0].total_magnetization).abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((min.j_value, 0.0));
    let level_min_j = rows
        .iter()
        .filter_map(|r| r.min_positive_level.map(|e| (r.j_value, e)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(j, _)| j);
    let within = |a: f64, b: f64| (a - b).abs() <= uncertainty * (1.0 + 1e-9);
    let concordant =
        within(min.j_value, jump_j) && level_min_j.is_some_and(|l| within(min.j_value, l) && within(jump_j, l));
    if !concordant {
        warn!(
            "transition signatures disagree: fidelity {:.4}, magnetization {:.4}, level {:?}",
            min.j_value, jump_j, level_min_j
        );
    }
    Ok(TransitionEstimate {
        j0: min.j_value,
        uncertainty,
        f_min: min.fidelity,
        magnetization_jump_j: jump_j,
        magnetization_jump: jump,
        level_min_j,
        concordant,
    })
}

/// Grid couplings where two directions disagree on F by more than `tol`.
pub fn hysteresis(a: &[FidelityRecord], b: &[FidelityRecord], tol: f64) -> Vec<f64> {
    type Key = (i64, (usize, usize), Option<(usize, usize)>);
    let index: BTreeMap<Key, f64> = b.iter().map(|r| ((key(r.j_value), r.site_a, r.site_b), r.fidelity)).collect();
    let mut out: Vec<f64> = a
        .iter()
        .filter(|r| index.get(&(key(r.j_value), r.site_a, r.site_b)).is_some_and(|f| (f - r.fidelity).abs() > tol))
        .map(|r| r.j_value)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Coupling where the mean-field energies of two branches cross, linearly
/// interpolated between the first pair of shared grid points with opposite
/// sign of `E_a − E_b`. Points where the branches coincide within
/// [`ENERGY_TOL`] are skipped.
pub fn energy_crossing(a: &Branch, b: &Branch) -> Option<f64> {
    let diffs: Vec<(f64, f64)> = a
        .snapshots
        .iter()
        .filter_map(|(k, sa)| b.snapshots.get(k).map(|sb| (sa.j, sa.energy - sb.energy)))
        .filter(|(_, d)| d.abs() > ENERGY_TOL)
        .collect();
    diffs.windows(2).find_map(|w| {
        let ((j0, d0), (j1, d1)) = (w[0], w[1]);
        (d0.signum() != d1.signum()).then(|| j0 + (j1 - j0) * d0 / (d0 - d1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branch_with(direction: Direction, energies: &[(f64, f64)]) -> Branch {
        let snapshots = energies
            .iter()
            .map(|&(j, energy)| {
                let snap = Snapshot {
                    j,
                    gap: GapField::zeros(1),
                    iterations: 1,
                    residual: 0.0,
                    total_magnetization: 0.0,
                    min_positive_level: None,
                    energy,
                    one_site: BTreeMap::new(),
                    two_site: BTreeMap::new(),
                };
                (key(j), snap)
            })
            .collect();
        Branch { direction, snapshots, failures: Vec::new() }
    }

    #[test]
    fn energy_crossing_interpolates() {
        let up = branch_with(Direction::Up, &[(1.0, -1.0), (1.1, -1.2), (1.2, -1.4)]);
        let down = branch_with(Direction::Down, &[(1.0, -0.8), (1.1, -1.3), (1.2, -1.7)]);
        let j = energy_crossing(&up, &down).unwrap();
        assert!((j - (1.0 + 0.1 * 0.2 / 0.3)).abs() < 1e-12);
        assert!(energy_crossing(&up, &up).is_none());
    }

    fn small() -> (ModelParams, LatticeConfig, SolverOptions) {
        (ModelParams::default(), LatticeConfig::square(5).unwrap(), SolverOptions::default())
    }

    #[test]
    fn grid_and_partners_share_points() {
        let plan = SweepPlan { j_min: 0.5, j_max: 0.7, j_step: 0.05, ..SweepPlan::default() };
        assert_eq!(plan.grid().len(), 5);
        assert_eq!(plan.solve_points().len(), 6);
        let empty = SweepPlan { j_min: 1.0, j_max: 0.5, ..SweepPlan::default() };
        assert!(empty.grid().is_empty() && empty.solve_points().is_empty());
        assert!(SweepPlan { j_step: 0.0, ..SweepPlan::default() }.validate().is_err());
    }

    #[test]
    fn sweep_is_deterministic_and_records_are_valid() {
        let (params, lattice, options) = small();
        let plan = SweepPlan {
            j_min: 0.5,
            j_max: 0.6,
            site_offsets: vec![[0, 0], [1, 0]],
            directions: vec![Direction::Up],
            ..SweepPlan::default()
        };
        let a = run_sweep(&plan, &params, &lattice, &options).unwrap();
        let b = run_sweep(&plan, &params, &lattice, &options).unwrap();
        assert_eq!(a[0].records, b[0].records);
        assert_eq!(a[0].records.len(), 6);
        for r in &a[0].records {
            r.check().unwrap();
            assert!(r.f_charge.is_some() && r.c2.is_none());
        }
    }

    #[test]
    fn warm_and_cold_agree_away_from_transition() {
        let (params, lattice, options) = small();
        let base = SweepPlan {
            j_min: 0.5,
            j_max: 0.6,
            directions: vec![Direction::Up],
            site_offsets: vec![[0, 0]],
            ..SweepPlan::default()
        };
        let warm = run_sweep(&base, &params, &lattice, &options).unwrap();
        let cold = run_sweep(&SweepPlan { warm_start: false, ..base }, &params, &lattice, &options).unwrap();
        for (w, c) in warm[0].records.iter().zip(&cold[0].records) {
            assert!((w.fidelity - c.fidelity).abs() < 1e-6);
        }
    }

    #[test]
    fn c2_mode_and_spatial_mode() {
        let (params, lattice, options) = small();
        let plan = SweepPlan {
            j_min: 1.0,
            j_max: 1.0,
            mode: SweepMode::C2,
            max_delta_l: 2,
            directions: vec![Direction::Up],
            ..SweepPlan::default()
        };
        let out = run_sweep(&plan, &params, &lattice, &options).unwrap();
        assert_eq!(out[0].records.len(), 2);
        assert!(out[0].records.iter().all(|r| r.c2.is_some() && r.site_b.is_some()));
        let spatial = SweepPlan { mode: SweepMode::OneSiteSpatial, ..plan };
        let out = run_sweep(&spatial, &params, &lattice, &options).unwrap();
        assert_eq!(out[0].records.len(), 25);
        let own = out[0].records.iter().find(|r| r.site_b == Some(r.site_a)).unwrap();
        assert!((own.fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn no_transition_below_threshold() {
        let rec = |j: f64| FidelityRecord {
            j_value: j,
            delta_j: Some(0.05),
            mode: SweepMode::OneSiteSameSite,
            site_a: (2, 2),
            site_b: None,
            fidelity: 0.9999,
            h_value: 0.9999,
            f_charge: None,
            f_spin: None,
            c2: None,
            total_magnetization: 0.0,
            min_positive_level: Some(0.1),
            iterations: 1,
            residual: 0.0,
        };
        let rows: Vec<_> = [0.5, 0.55, 0.6].iter().map(|&j| rec(j)).collect();
        assert!(matches!(locate_transition(&rows), Err(Error::NoTransition(_))));
        let mut rows = rows;
        rows[1].fidelity = 0.5;
        rows[2].total_magnetization = 1.0;
        rows[1].min_positive_level = Some(0.01);
        let est = locate_transition(&rows).unwrap();
        assert_eq!(est.j0, 0.55);
        assert!(est.concordant);
    }
}
