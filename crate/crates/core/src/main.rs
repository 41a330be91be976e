#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, info};
use serde::Serialize;

use ysr_fidelity::bdg::solve_self_consistent;
use ysr_fidelity::calibration::{calibrate, CalibrationReport};
use ysr_fidelity::config::RunConfig;
use ysr_fidelity::model::{electronic_magnetization, in_gap_levels, mean_field_energy, GapField, InGapLevels};
use ysr_fidelity::output::{
    write_field_csv, write_gap_csv, write_json, write_magnetization_csv, write_records_csv, write_spectrum_csv,
};
use ysr_fidelity::rdm::DensityMatrixJson;
use ysr_fidelity::sweep::{
    energy_crossing, hysteresis, locate_transition, run_sweep, spatial_map, Direction, PointFailure, Probe, Snapshot,
    SweepMode, TransitionEstimate,
};
use ysr_fidelity::verify::{self, VerifyOptions};
use ysr_fidelity::{Error, Result};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Parser)]
#[command(version, about = "BdG magnetic-impurity simulator with partial-state fidelity diagnostics")]
struct Cli {
    /// TOML run configuration; omitted keys take library defaults.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "YSR_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    g: Option<f64>,
    #[arg(long, global = true)]
    omega_d: Option<f64>,
    #[arg(long, global = true)]
    phi: Option<f64>,
    /// Square lattice side; sets both width and height.
    #[arg(long, global = true)]
    side: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    mixing: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Bulk gap, coherence length and a coarse bracket of J₀.
    Calibrate {
        #[arg(long, default_value_t = 0.1)]
        coarse_step: f64,
        #[arg(long, default_value_t = 3.0)]
        coarse_max: f64,
    },
    /// Self-consistent solution at one coupling.
    Solve {
        #[arg(long)]
        j: f64,
    },
    /// Coupling sweep in the configured mode.
    Sweep {
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        j_min: Option<f64>,
        #[arg(long)]
        j_max: Option<f64>,
        #[arg(long)]
        j_step: Option<f64>,
        #[arg(long)]
        delta_j: Option<f64>,
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
    },
    /// One-site fidelity between a reference site and every site.
    Spatial {
        #[arg(long)]
        j: f64,
        /// Reference as `dx,dy` from the impurity.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        reference: Option<Vec<i64>>,
    },
    /// Oracle and invariant suites.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Drop fermionic pairing signs; the suite must then fail.
        #[arg(long)]
        mutation: bool,
        /// Reduced sample counts.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    OneSiteSameSite,
    OneSiteSpatial,
    TwoSite,
    C2,
}

impl From<ModeArg> for SweepMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::OneSiteSameSite => SweepMode::OneSiteSameSite,
            ModeArg::OneSiteSpatial => SweepMode::OneSiteSpatial,
            ModeArg::TwoSite => SweepMode::TwoSite,
            ModeArg::C2 => SweepMode::C2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Up,
    Down,
    Both,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        Error::Verification(_) => EXIT_VERIFICATION,
        _ => EXIT_FAILURE,
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let o = &cli.overrides;
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if let Some(v) = o.g {
        cfg.model.g = v;
    }
    if let Some(v) = o.omega_d {
        cfg.model.omega_d = v;
    }
    if let Some(v) = o.phi {
        cfg.model.phi = v;
    }
    if let Some(v) = o.side {
        cfg.lattice.width = v;
        cfg.lattice.height = v;
    }
    if let Some(v) = o.tol {
        cfg.solver.tol = v;
    }
    if let Some(v) = o.mixing {
        cfg.solver.mixing = v;
    }
    if let Some(v) = o.max_iter {
        cfg.solver.max_iter = v;
    }
    match &cli.command {
        Command::Sweep { mode, j_min, j_max, j_step, delta_j, direction } => {
            let plan = &mut cfg.sweep;
            if let Some(m) = mode {
                plan.mode = (*m).into();
            }
            if let Some(v) = j_min {
                plan.j_min = *v;
            }
            if let Some(v) = j_max {
                plan.j_max = *v;
            }
            if let Some(v) = j_step {
                plan.j_step = *v;
            }
            if let Some(v) = delta_j {
                plan.delta_j = *v;
            }
            if let Some(d) = direction {
                plan.directions = match d {
                    DirectionArg::Up => vec![Direction::Up],
                    DirectionArg::Down => vec![Direction::Down],
                    DirectionArg::Both => vec![Direction::Up, Direction::Down],
                };
            }
        }
        Command::Spatial { reference: Some(r), .. } => match r.as_slice() {
            &[dx, dy] => cfg.sweep.reference_offset = [dx, dy],
            _ => return Err(Error::Config("--reference takes dx,dy".into())),
        },
        Command::Verify { seed: Some(s), .. } => cfg.seed = *s,
        _ => {}
    }
    match cli.command {
        Command::Sweep { .. } | Command::Spatial { .. } => cfg.validate_sweep()?,
        _ => cfg.validate()?,
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    }
    let dir = cfg.prepare_output_dir()?.to_path_buf();
    match cli.command {
        Command::Calibrate { coarse_step, coarse_max } => cmd_calibrate(&cfg, &dir, coarse_step, coarse_max),
        Command::Solve { j } => cmd_solve(&cfg, &dir, j),
        Command::Sweep { .. } => cmd_sweep(&cfg, &dir),
        Command::Spatial { j, .. } => cmd_spatial(&cfg, &dir, j),
        Command::Verify { mutation, quick, .. } => cmd_verify(&cfg, &dir, mutation, quick),
    }
}

fn cmd_calibrate(cfg: &RunConfig, dir: &Path, step: f64, max: f64) -> Result<()> {
    if !(step > 0.0) || !(max >= 0.0) {
        return Err(Error::Config("coarse grid needs a positive step and non-negative maximum".into()));
    }
    let count = (max / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|k| k as f64 * step).collect();
    let report: CalibrationReport = calibrate(&cfg.model, &cfg.lattice, &cfg.solver, &grid, cfg.sweep.initial_gap)?;
    info!(
        "g = {}, omega_d = {}: bulk gap {:.6}, coherence length {:.3}, J0 bracket {:?}",
        report.g, report.omega_d, report.delta0, report.coherence_length, report.j0_bracket
    );
    write_json(&dir.join("calibration.json"), &report)?;
    std::fs::write(dir.join("calibrated.toml"), cfg.to_toml()?)?;
    Ok(())
}

#[derive(Serialize)]
struct SolveSummary {
    j: f64,
    iterations: usize,
    residual: f64,
    energy: f64,
    total_magnetization: f64,
    impurity_gap: [f64; 2],
    in_gap_levels: Option<InGapLevels>,
    impurity_rdm: DensityMatrixJson,
}

fn cmd_solve(cfg: &RunConfig, dir: &Path, j: f64) -> Result<()> {
    let params = cfg.model.with_coupling(j);
    let lattice = &cfg.lattice;
    let impurity = params.impurity(lattice)?;
    let init = GapField::uniform(lattice.num_sites(), cfg.sweep.initial_gap);
    let sol = solve_self_consistent(&params, lattice, &init, &cfg.solver)?;
    let magnetization = electronic_magnetization(&sol, params.phi);
    let probe = Probe { one_site: [impurity].into(), ..Probe::default() };
    let snap = Snapshot::from_solution(&sol, &probe)?;
    write_spectrum_csv(&dir.join("spectrum.csv"), &sol.energies)?;
    write_gap_csv(&dir.join("gap.csv"), lattice, &sol.gap)?;
    write_magnetization_csv(&dir.join("magnetization.csv"), lattice, &magnetization)?;
    let d = sol.gap.delta[impurity];
    let summary = SolveSummary {
        j,
        iterations: sol.iterations,
        residual: sol.residual,
        energy: mean_field_energy(&sol),
        total_magnetization: magnetization.total,
        impurity_gap: [d.re, d.im],
        in_gap_levels: in_gap_levels(&sol).ok(),
        impurity_rdm: snap.one_site[&impurity].to_json(),
    };
    write_json(&dir.join("solve.json"), &summary)?;
    info!("J = {j}: {} iterations, total magnetization {:.6}", sol.iterations, magnetization.total);
    Ok(())
}

#[derive(Serialize)]
struct DirectionSummary {
    direction: Direction,
    csv: String,
    records: usize,
    failures: Vec<PointFailure>,
    transition: Option<TransitionEstimate>,
    transition_error: Option<String>,
}

#[derive(Serialize)]
struct SweepSummary {
    g: f64,
    omega_d: f64,
    width: usize,
    height: usize,
    mode: SweepMode,
    directions: Vec<DirectionSummary>,
    /// Couplings where the up and down branches disagree on F.
    hysteresis: Vec<f64>,
    /// Coupling where the two branches' mean-field energies cross.
    energy_crossing: Option<f64>,
}

const HYSTERESIS_TOL: f64 = 1e-6;

fn cmd_sweep(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let plan = &cfg.sweep;
    let outputs = run_sweep(plan, &cfg.model, &cfg.lattice, &cfg.solver)?;
    let impurity = cfg.lattice.site_coords(cfg.model.impurity(&cfg.lattice)?)?;
    let mut directions = Vec::new();
    for out in &outputs {
        let name = format!("sweep_{}_{}.csv", plan.mode.as_str(), out.direction.as_str());
        write_records_csv(&dir.join(&name), &out.records)?;
        let (transition, transition_error) = if plan.mode == SweepMode::OneSiteSameSite && !out.records.is_empty() {
            let own: Vec<_> = out.records.iter().filter(|r| r.site_a == impurity).cloned().collect();
            match locate_transition(&own) {
                Ok(t) => (Some(t), None),
                Err(e) => (None, Some(e.to_string())),
            }
        } else {
            (None, None)
        };
        if let Some(t) = &transition {
            info!("{}: J0 = {:.3} ± {:.3}, F_min = {:.6}", out.direction.as_str(), t.j0, t.uncertainty, t.f_min);
        }
        directions.push(DirectionSummary {
            direction: out.direction,
            csv: name,
            records: out.records.len(),
            failures: out.failures.clone(),
            transition,
            transition_error,
        });
    }
    let up = outputs.iter().find(|o| o.direction == Direction::Up);
    let down = outputs.iter().find(|o| o.direction == Direction::Down);
    let (hysteresis, energy_crossing) = match (up, down) {
        (Some(u), Some(d)) => {
            (hysteresis(&u.records, &d.records, HYSTERESIS_TOL), energy_crossing(&u.branch, &d.branch))
        }
        _ => (Vec::new(), None),
    };
    let summary = SweepSummary {
        g: cfg.model.g,
        omega_d: cfg.model.omega_d,
        width: cfg.lattice.width,
        height: cfg.lattice.height,
        mode: plan.mode,
        directions,
        hysteresis,
        energy_crossing,
    };
    write_json(&dir.join(format!("sweep_{}_summary.json", plan.mode.as_str())), &summary)
}

fn cmd_spatial(cfg: &RunConfig, dir: &Path, j: f64) -> Result<()> {
    let impurity = cfg.model.impurity(&cfg.lattice)?;
    let reference = cfg.sweep.reference(&cfg.lattice, impurity)?;
    let init = GapField::uniform(cfg.lattice.num_sites(), cfg.sweep.initial_gap);
    let map = spatial_map(&cfg.model, &cfg.lattice, j, reference, &init, &cfg.solver)?;
    let stem = format!("spatial_j{j:.4}");
    write_field_csv(&dir.join(format!("{stem}.csv")), map.width, &map.fidelity, &map.h_value)?;
    write_json(&dir.join(format!("{stem}.json")), &map)
}

fn cmd_verify(cfg: &RunConfig, dir: &Path, mutation: bool, quick: bool) -> Result<()> {
    let mut options = VerifyOptions { seed: cfg.seed, mutation, ..VerifyOptions::default() };
    if quick {
        options.oracle_clusters = 20;
        options.matrix_pairs_4 = 500;
        options.matrix_pairs_16 = 50;
    }
    let report = verify::run(&options);
    for c in &report.checks {
        info!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    write_json(&dir.join("verify.json"), &report)?;
    report.into_result().map(|_| ())
}
