//! The `cirdiff` command-line pipeline: bootstrap, calibrate, simulate,
//! price, or the whole report in one go.
//!
//! Runs are driven by a JSON config with flag overrides; every stage emits
//! plot-ready CSV files into the output directory. A fixed seed makes all
//! data outputs byte-identical across runs and thread counts (only the
//! wall-time entry of the calibration report varies).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::calibration::{
    calibrate, default_guess, CalibrationOptions, CalibrationResult, PhiVector,
};
use crate::error::{CirError, Result};
use crate::market::{bootstrap, load_quotes, ZeroCurve};
use crate::model::DiffModel;
use crate::pricing::{
    load_swaption_quotes, model_forward_zcb, swaption_grid_report, write_swaption_report,
};
use crate::simulation::{
    discount_factors, distribution_summary, simulate, Recording, SimConfig, DEFAULT_PATHS,
    DEFAULT_STEP,
};

/// Confidence level of the discount-factor comparison.
const DF_LEVEL: f64 = 0.999;
/// Confidence level of forward-price and swaption bands.
const PRICE_LEVEL: f64 = 0.99;
/// Histogram bins of the distribution summary.
const HIST_BINS: usize = 50;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    /// Starting point `[phi1_x, phi2_x, phi3_x, phi1_y, phi2_y, phi3_y, x0, y0]`.
    pub guess: Option<[f64; 8]>,
    pub multistart: usize,
    pub max_iterations: usize,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        CalibrationSection {
            guess: None,
            multistart: 0,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub delta: f64,
    pub paths: usize,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        SimulationSection {
            delta: DEFAULT_STEP,
            paths: DEFAULT_PATHS,
            horizon: 30.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PricingSection {
    /// Future dates of the forward zero-coupon comparison.
    pub forward_dates: Vec<f64>,
    /// Market swaption quotes CSV; the swaption step is skipped with a
    /// warning when absent.
    pub swaption_grid: Option<PathBuf>,
}

impl Default for PricingSection {
    fn default() -> Self {
        PricingSection {
            forward_dates: vec![1.0, 3.0, 5.0],
            swaption_grid: None,
        }
    }
}

/// A full pipeline configuration; JSON file with CLI-flag overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub valuation_date: Option<NaiveDate>,
    /// Quotes CSV (`type,tenor_years,rate`); exactly one of `quotes`/`curve`.
    pub quotes: Option<PathBuf>,
    /// Pillar curve CSV (`maturity_years,zero_rate,discount`).
    pub curve: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub calibration: CalibrationSection,
    pub simulation: SimulationSection,
    pub pricing: PricingSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            valuation_date: None,
            quotes: None,
            curve: None,
            out_dir: PathBuf::from("out"),
            calibration: CalibrationSection::default(),
            simulation: SimulationSection::default(),
            pricing: PricingSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| {
            CirError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: RunConfig = serde_json::from_str(&raw)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.quotes, &self.curve) {
            (Some(_), Some(_)) => Err(CirError::Validation(
                "supply exactly one of quotes/curve, not both".into(),
            )),
            (None, None) => Err(CirError::Validation("supply one of quotes or curve".into())),
            (Some(p), None) | (None, Some(p)) if !p.exists() => Err(CirError::Validation(format!(
                "input file {} does not exist",
                p.display()
            ))),
            _ => Ok(()),
        }
    }
}

/// Pipeline stage to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bootstrap,
    Calibrate,
    Simulate,
    Price,
    Report,
}

/// Executes one stage (later stages run their prerequisites in memory).
/// Returns the list of files written.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut written = Vec::new();
    let curve = stage_curve(cfg)?;
    if cmd == Command::Bootstrap || cmd == Command::Report {
        let path = cfg.out_dir.join("curve.csv");
        curve.to_csv_file(&path)?;
        written.push(path);
        if cmd == Command::Bootstrap {
            return Ok(written);
        }
    }

    let result = stage_calibration(cfg, &curve)?;
    if matches!(cmd, Command::Calibrate | Command::Report) {
        written.extend(write_calibration_outputs(cfg, &curve, &result)?);
    }
    // every stage past this point builds on the fit; outputs written so far
    // stay on disk for inspection
    if !result.converged {
        return Err(CirError::NonConvergence {
            iterations: result.iterations,
            objective: result.objective,
        });
    }
    if cmd == Command::Calibrate {
        return Ok(written);
    }
    let model = result.model;

    // one path set serves both the simulation and pricing stages
    let (paths, skipped) = main_path_set(cfg, &curve, &model)?;
    for w in &skipped {
        eprintln!("warning: {w}");
    }

    if matches!(cmd, Command::Simulate | Command::Report) {
        written.extend(run_simulation_stage(cfg, &curve, &model, &paths)?);
        if cmd == Command::Simulate {
            return Ok(written);
        }
    }

    written.extend(run_pricing_stage(cfg, &curve, &model, &paths)?);
    if cmd == Command::Report {
        let manifest = cfg.out_dir.join("manifest.json");
        write_manifest(cfg, &model, &written, &manifest)?;
        written.push(manifest);
    }
    Ok(written)
}

fn stage_curve(cfg: &RunConfig) -> Result<ZeroCurve> {
    match (&cfg.quotes, &cfg.curve) {
        (Some(q), None) => bootstrap(&load_quotes(q)?),
        (None, Some(c)) => ZeroCurve::from_csv_file(c),
        _ => unreachable!("validated"),
    }
}

fn stage_calibration(cfg: &RunConfig, curve: &ZeroCurve) -> Result<CalibrationResult> {
    let maturities: Vec<f64> = curve.pillars().iter().map(|p| p.maturity).collect();
    let guess = cfg
        .calibration
        .guess
        .map(PhiVector)
        .unwrap_or_else(default_guess);
    let options = CalibrationOptions {
        max_iterations: cfg.calibration.max_iterations,
        multistart: cfg.calibration.multistart,
        seed: cfg.simulation.seed,
        ..Default::default()
    };
    let result = calibrate(curve, &maturities, &guess, &options)?;
    if result.guess_projected {
        eprintln!("warning: inadmissible guess was projected onto the admissible set");
    }
    Ok(result)
}

fn write_calibration_outputs(
    cfg: &RunConfig,
    curve: &ZeroCurve,
    result: &CalibrationResult,
) -> Result<Vec<PathBuf>> {
    let report_path = cfg.out_dir.join("calibration_report.json");
    let report = serde_json::json!({
        "pi_star": result.pi_star.0,
        "model": {
            "x": { "k": result.model.x.k, "sigma": result.model.x.sigma,
                   "theta": result.model.x.theta, "x0": result.model.x.z0 },
            "y": { "k": result.model.y.k, "sigma": result.model.y.sigma,
                   "theta": result.model.y.theta, "y0": result.model.y.z0 },
        },
        "objective": result.objective,
        "mre": result.mre,
        "iterations": result.iterations,
        "converged": result.converged,
        "wall_time_s": result.wall_time_s,
    });
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;

    let mut fit = String::from("maturity_years,market_price,model_price,abs_error\n");
    let m = &result.model;
    for p in curve.pillars() {
        let model_price = m.zcb_price(m.x.z0, m.y.z0, p.maturity)?;
        let _ = writeln!(
            fit,
            "{},{},{},{}",
            p.maturity,
            p.discount,
            model_price,
            (p.discount - model_price).abs()
        );
    }
    let fit_path = cfg.out_dir.join("zc_fit.csv");
    std::fs::write(&fit_path, fit)?;
    Ok(vec![report_path, fit_path])
}

/// Recording times for the main path set: on-mesh pillars, forward dates
/// and swaption expiries within the horizon.
fn recording_times(cfg: &RunConfig, curve: &ZeroCurve) -> Result<(Vec<f64>, Vec<String>)> {
    let delta = cfg.simulation.delta;
    let horizon = cfg.simulation.horizon;
    let on_mesh = |t: f64| ((t / delta).round() * delta - t).abs() <= 1e-9;
    let mut skipped = Vec::new();
    let mut times = BTreeSet::new();
    for p in curve.pillars() {
        if p.maturity > horizon + 1e-12 {
            continue;
        }
        if on_mesh(p.maturity) {
            times.insert(ordered(p.maturity));
        } else {
            skipped.push(format!(
                "pillar {} is off the simulation mesh and is skipped in MC comparisons",
                p.maturity
            ));
        }
    }
    for &t in &cfg.pricing.forward_dates {
        if t.is_nan() || t < 0.0 || t > horizon + 1e-12 {
            return Err(CirError::Grid(format!(
                "forward date {t} outside the simulation horizon {horizon}"
            )));
        }
        if !on_mesh(t) {
            return Err(CirError::Grid(format!(
                "forward date {t} is not on the simulation mesh (step {delta})"
            )));
        }
        times.insert(ordered(t));
    }
    if let Some(grid_path) = &cfg.pricing.swaption_grid {
        if grid_path.exists() {
            for q in load_swaption_quotes(grid_path)? {
                if q.maturity <= horizon + 1e-12 && on_mesh(q.maturity) {
                    times.insert(ordered(q.maturity));
                }
            }
        }
    }
    Ok((times.into_iter().map(|t| t.0).collect(), skipped))
}

#[derive(PartialEq, PartialOrd)]
struct Ordered(f64);
impl Eq for Ordered {}
#[allow(clippy::derive_ord_xor_partial_ord)]
impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).expect("finite recording times")
    }
}
fn ordered(t: f64) -> Ordered {
    Ordered(t)
}

fn main_path_set(
    cfg: &RunConfig,
    curve: &ZeroCurve,
    model: &DiffModel,
) -> Result<(crate::simulation::PathSet, Vec<String>)> {
    let (times, skipped) = recording_times(cfg, curve)?;
    let sim_cfg = SimConfig::new(
        cfg.simulation.horizon,
        cfg.simulation.delta,
        cfg.simulation.paths,
        cfg.simulation.seed,
    )?
    .with_record(Recording::Times(times));
    Ok((simulate(model, &sim_cfg)?, skipped))
}

fn run_simulation_stage(
    cfg: &RunConfig,
    curve: &ZeroCurve,
    model: &DiffModel,
    paths: &crate::simulation::PathSet,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    // discount factors vs the analytic curve at recorded pillar times
    let maturities: Vec<f64> = curve
        .pillars()
        .iter()
        .map(|p| p.maturity)
        .filter(|&t| paths.col_of(t).is_ok() && t > 0.0)
        .collect();
    let stats = discount_factors(paths, &maturities, DF_LEVEL)?;
    let mut csv = String::from("maturity,mc_mean,std_err,ci_low,ci_high,analytic\n");
    for s in &stats {
        let analytic = model.zcb_price(model.x.z0, model.y.z0, s.maturity)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            s.maturity, s.mean, s.std_err, s.ci_low, s.ci_high, analytic
        );
    }
    let df_path = cfg.out_dir.join("df_comparison.csv");
    std::fs::write(&df_path, csv)?;
    written.push(df_path);

    // distribution of r at the horizon
    let summary = distribution_summary(paths, cfg.simulation.horizon, HIST_BINS)?;
    let mut csv = String::from("bin_lo,bin_hi,count,density,normal_density\n");
    for b in &summary.bins {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            b.lo, b.hi, b.count, b.density, b.normal_density
        );
    }
    let dist_path = cfg.out_dir.join("distribution.csv");
    std::fs::write(&dist_path, csv)?;
    written.push(dist_path);

    let moments = serde_json::json!({
        "t": summary.t,
        "mean": summary.mean,
        "variance": summary.variance,
        "skewness": summary.skewness,
        "excess_kurtosis": summary.excess_kurtosis,
        "analytic_mean": model.cond_mean(model.x.z0, model.y.z0, summary.t),
        "analytic_variance": model.cond_var(model.x.z0, model.y.z0, summary.t),
    });
    let moments_path = cfg.out_dir.join("distribution_moments.json");
    std::fs::write(&moments_path, serde_json::to_string_pretty(&moments)?)?;
    written.push(moments_path);

    // analytic conditional mean and standard deviation of r over time
    let mut csv = String::from("time,mean,std\n");
    let mut t = 0.0;
    while t <= cfg.simulation.horizon + 1e-12 {
        let mean = model.cond_mean(model.x.z0, model.y.z0, t);
        let std = model.cond_var(model.x.z0, model.y.z0, t).sqrt();
        let _ = writeln!(csv, "{t},{mean},{std}");
        t += 0.25;
    }
    let cm_path = cfg.out_dir.join("cond_moments.csv");
    std::fs::write(&cm_path, csv)?;
    written.push(cm_path);

    // one full-resolution sample trajectory (path 0 of the same seed)
    let traj_cfg = SimConfig::new(
        cfg.simulation.horizon,
        cfg.simulation.delta,
        1,
        cfg.simulation.seed,
    )?;
    let traj = simulate(model, &traj_cfg)?;
    let mut csv = String::from("time,x,y,r\n");
    for (col, &t) in traj.times().iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            t,
            traj.x_at(0, col),
            traj.y_at(0, col),
            traj.r_at(0, col)
        );
    }
    let traj_path = cfg.out_dir.join("trajectory.csv");
    std::fs::write(&traj_path, csv)?;
    written.push(traj_path);
    Ok(written)
}

fn run_pricing_stage(
    cfg: &RunConfig,
    curve: &ZeroCurve,
    model: &DiffModel,
    paths: &crate::simulation::PathSet,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    for &t in &cfg.pricing.forward_dates {
        let mut csv = String::from("maturity_years,model_mean,ci_low,ci_high,market_price\n");
        for p in curve.pillars() {
            if p.maturity <= t + 1e-12 {
                continue;
            }
            let est = model_forward_zcb(model, paths, t, p.maturity, PRICE_LEVEL)?;
            let market = if t == 0.0 {
                curve.discount(p.maturity)?
            } else {
                curve.forward_zcb(t, p.maturity)?
            };
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                p.maturity, est.mean, est.ci_low, est.ci_high, market
            );
        }
        let name = if t.fract() == 0.0 {
            format!("forward_zc_t{}.csv", t as i64)
        } else {
            format!("forward_zc_t{t}.csv")
        };
        let path = cfg.out_dir.join(name);
        std::fs::write(&path, csv)?;
        written.push(path);
    }

    match &cfg.pricing.swaption_grid {
        Some(grid_path) if grid_path.exists() => {
            let quotes = load_swaption_quotes(grid_path)?;
            let grid = swaption_grid_report(model, paths, curve, &quotes, PRICE_LEVEL)?;
            for w in &grid.warnings {
                eprintln!("warning: {w}");
            }
            let mut buf = Vec::new();
            write_swaption_report(&grid, &mut buf)?;
            let path = cfg.out_dir.join("swaption_report.csv");
            std::fs::write(&path, buf)?;
            written.push(path);
        }
        Some(grid_path) => {
            eprintln!(
                "warning: swaption grid {} not found; swaption step skipped",
                grid_path.display()
            );
        }
        None => {}
    }
    Ok(written)
}

fn write_manifest(
    cfg: &RunConfig,
    model: &DiffModel,
    written: &[PathBuf],
    path: &Path,
) -> Result<()> {
    let files: Vec<String> = written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let manifest = serde_json::json!({
        "valuation_date": cfg.valuation_date,
        "seed": cfg.simulation.seed,
        "delta": cfg.simulation.delta,
        "paths": cfg.simulation.paths,
        "horizon": cfg.simulation.horizon,
        "model": model,
        "outputs": files,
    });
    std::fs::write(path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::flat_curve_quotes;

    fn write_flat_quotes(dir: &Path) -> PathBuf {
        let q = flat_curve_quotes(
            -0.002,
            &[0.25, 0.5, 1.0],
            &(2..=10).map(f64::from).collect::<Vec<_>>(),
        );
        let mut csv = String::from("type,tenor_years,rate\n");
        for d in &q.deposits {
            let _ = writeln!(csv, "DEPO,{},{}", d.tenor, d.rate);
        }
        for s in &q.swaps {
            let _ = writeln!(csv, "SWAP,{},{}", s.tenor, s.rate);
        }
        let path = dir.join("quotes.csv");
        std::fs::write(&path, csv).unwrap();
        path
    }

    #[test]
    fn config_requires_exactly_one_input() {
        let cfg = RunConfig::default();
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            quotes: Some(PathBuf::from("a.csv")),
            curve: Some(PathBuf::from("b.csv")),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = RunConfig {
            quotes: Some(PathBuf::from("quotes.csv")),
            ..Default::default()
        };
        let s = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back.simulation.paths, DEFAULT_PATHS);
        assert_eq!(back.pricing.forward_dates, vec![1.0, 3.0, 5.0]);
        // unknown keys are rejected
        assert!(serde_json::from_str::<RunConfig>("{\"typo\": 1}").is_err());
    }

    #[test]
    fn bootstrap_command_writes_flat_curve() {
        let dir = tempfile::tempdir().unwrap();
        let quotes = write_flat_quotes(dir.path());
        let cfg = RunConfig {
            quotes: Some(quotes),
            out_dir: dir.path().join("out"),
            ..Default::default()
        };
        let files = run(Command::Bootstrap, &cfg).unwrap();
        assert_eq!(files.len(), 1);
        let curve = ZeroCurve::from_csv_file(&files[0]).unwrap();
        for p in curve.pillars() {
            assert!((p.zero_rate + 0.002).abs() < 1e-10);
        }
    }

    #[test]
    fn missing_input_is_a_config_error() {
        let cfg = RunConfig {
            quotes: Some(PathBuf::from("/nonexistent/quotes.csv")),
            ..Default::default()
        };
        let err = run(Command::Bootstrap, &cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("quotes.csv"));
    }

    #[test]
    fn off_mesh_horizon_is_a_grid_error() {
        let dir = tempfile::tempdir().unwrap();
        let quotes = write_flat_quotes(dir.path());
        let cfg = RunConfig {
            quotes: Some(quotes),
            out_dir: dir.path().join("out"),
            simulation: SimulationSection {
                horizon: 10.0001,
                paths: 10,
                ..Default::default()
            },
            ..Default::default()
        };
        let err = run(Command::Simulate, &cfg).unwrap_err();
        assert!(matches!(err, CirError::Grid(_)));
        assert_eq!(err.exit_code(), 2);
    }
}
