//! Experiment orchestration behind the command-line tool: experiment
//! files, sweeps, Monte Carlo aggregation, analytical overlays, bounds and
//! CSV output.
//!
//! An experiment file is a scenario config with an optional `[sweep]`
//! table naming an axis (`e_inter`, `e_dest`, `e_<user>` or `F`), its
//! values, and `[[sweep.variants]]` (scheme plus distribution overrides).
//! Every CSV starts with a `# config_hash=... master_seed=...` line.

mod experiment;
mod output;
pub mod presets;

use std::path::{Path, PathBuf};

pub use experiment::{Axis, Experiment, Point, SweepSpec, Variant};
pub use output::{
    analysis_rows, bounds_rows, hash_text, recovery_analysis_rows, recovery_sim_rows,
    simulation_rows, CsvTable,
};

use crate::analysis::AnalysisError;
use crate::optimizer::{
    design_fcc, pcc_design_fixed_point, DesignError, DesignKind, DesignParams,
};
use crate::protocol::{ConfigError, ProtocolError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    /// 2 for anything wrong with the inputs, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::UnknownPreset(_) | HarnessError::Unsupported(_) => 2,
            HarnessError::Design(DesignError::Invalid { .. }) => 2,
            _ => 1,
        }
    }
}

/// Command-line overrides shared by every verb.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: PathBuf,
}

/// Reads `preset:NAME` from the shipped presets, anything else from disk.
/// Returns the text and the directory relative paths resolve against.
pub fn read_config(spec: &str) -> Result<(String, Option<PathBuf>), HarnessError> {
    if let Some(name) = spec.strip_prefix("preset:") {
        let text = presets::preset(name).ok_or_else(|| HarnessError::UnknownPreset(name.into()))?;
        return Ok((text.to_string(), None));
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    Ok((text, path.parent().map(Path::to_path_buf)))
}

fn write(out: &Path, name: &str, contents: &str) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(out).map_err(|source| HarnessError::Io { path: out.to_path_buf(), source })?;
    let path = out.join(name);
    std::fs::write(&path, contents).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn load_experiment(spec: &str, opts: &RunOptions) -> Result<Experiment, HarnessError> {
    let (text, base_dir) = read_config(spec)?;
    let mut exp = Experiment::from_toml(&text, base_dir)?;
    if let Some(seed) = opts.seed {
        exp.base.master_seed = seed;
    }
    exp.points()?;
    Ok(exp)
}

/// Runs the Monte Carlo trials of every sweep point; writes
/// `simulation.csv` and `recovery_sim.csv`.
pub fn cmd_simulate(spec: &str, opts: &RunOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let exp = load_experiment(spec, opts)?;
    simulate(&exp, opts)
}

fn simulate(exp: &Experiment, opts: &RunOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let runs = exp.simulate(opts.workers)?;
    let header = exp.header();
    Ok(vec![
        write(&opts.out, "simulation.csv", &simulation_rows(exp, &runs).render(&header))?,
        write(&opts.out, "recovery_sim.csv", &recovery_sim_rows(&runs).render(&header))?,
    ])
}

/// Analytical predictions aligned with `simulation.csv`; writes
/// `analysis.csv` and `recovery_analysis.csv`.
pub fn cmd_analyze(spec: &str, opts: &RunOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let exp = load_experiment(spec, opts)?;
    analyze(&exp, opts)
}

fn analyze(exp: &Experiment, opts: &RunOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let header = exp.header();
    let summary = analysis_rows(exp)?;
    let recovery = recovery_analysis_rows(exp)?;
    Ok(vec![
        write(&opts.out, "analysis.csv", &summary.render(&header))?,
        write(&opts.out, "recovery_analysis.csv", &recovery.render(&header))?,
    ])
}

/// Throughput upper bounds over the sweep axis; writes `bounds.csv`.
pub fn cmd_bounds(spec: &str, opts: &RunOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let exp = load_experiment(spec, opts)?;
    bounds(&exp, opts)
}

fn bounds(exp: &Experiment, opts: &RunOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let table = bounds_rows(exp)?;
    Ok(vec![write(&opts.out, "bounds.csv", &table.render(&exp.header()))?])
}

/// Simulation, analysis and (for two users) bounds of one experiment.
pub fn cmd_sweep(spec: &str, opts: &RunOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let exp = load_experiment(spec, opts)?;
    let mut paths = simulate(&exp, opts)?;
    paths.extend(analyze(&exp, opts)?);
    if exp.base.users == 2 {
        paths.extend(bounds(&exp, opts)?);
    }
    Ok(paths)
}

/// Designs a distribution; writes `distribution.txt` and
/// `design_report.csv`.
pub fn cmd_optimize(spec: &str, opts: &RunOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let (text, _) = read_config(spec)?;
    let params = DesignParams::from_toml(&text)?;
    let (design, extra) = match params.kind {
        DesignKind::Fcc => (design_fcc(&params)?, None),
        DesignKind::Pcc => {
            let d = pcc_design_fixed_point(&params)?;
            let extra = (d.iterations, d.converged, d.last_tv, d.s.clone());
            (d.design, Some(extra))
        }
    };
    if design.min_residual < -1e-9 || design.verified_min_residual < -1e-9 {
        return Err(HarnessError::Design(DesignError::Lp {
            source: crate::optimizer::LpError::Infeasible,
            min_residual: design.min_residual.min(design.verified_min_residual),
        }));
    }
    let hash = hash_text(&text);
    let header = format!("# config_hash={hash} master_seed=none");
    let mut report = CsvTable::new(&["key", "value"]);
    report.row(vec!["kind".into(), format!("{:?}", params.kind).to_lowercase()]);
    report.row(vec!["M".into(), params.users.to_string()]);
    report.row(vec!["k".into(), params.k.to_string()]);
    report.row(vec!["c".into(), params.c.to_string()]);
    report.row(vec!["mean_degree".into(), design.dist.mean().to_string()]);
    report.row(vec!["objective".into(), design.objective.to_string()]);
    for (i, (r, e)) in design.r.iter().zip(design.overheads()).enumerate() {
        report.row(vec![format!("r_{}", i + 1), r.to_string()]);
        report.row(vec![format!("eps_{}", i + 1), e.to_string()]);
    }
    report.row(vec!["min_residual".into(), design.min_residual.to_string()]);
    report.row(vec!["verified_min_residual".into(), design.verified_min_residual.to_string()]);
    report.row(vec!["dropped_grid_points".into(), design.dropped_points.to_string()]);
    if let Some((iterations, converged, tv, s)) = extra {
        report.row(vec!["outer_iterations".into(), iterations.to_string()]);
        report.row(vec!["converged".into(), converged.to_string()]);
        report.row(vec!["last_tv".into(), tv.to_string()]);
        for (i, v) in s.iter().enumerate() {
            report.row(vec![format!("s_{}", i + 1), v.to_string()]);
        }
    }
    Ok(vec![
        write(&opts.out, "distribution.txt", &crate::codec::write_distribution(&design.dist))?,
        write(&opts.out, "design_report.csv", &report.render(&header))?,
    ])
}
