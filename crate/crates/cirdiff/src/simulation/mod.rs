//! Truncated Euler-Maruyama simulation of the two CIR legs.
//!
//! Each leg follows
//! `z(t+dt) = z + k (theta - z) dt + sigma sqrt(max(z, 0)) dW`; the state
//! itself is not floored, only the square-root argument, so discretization
//! can push a leg slightly negative exactly as the recursion allows.
//! Paths are embarrassingly parallel and bit-reproducible: every
//! `(seed, path, leg)` tuple owns its own random substream, and all
//! reductions run in fixed path order.

pub mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{CirError, Result};
use crate::model::{DiffModel, Leg};

/// Which grid points to keep. Full recording stores `paths x (steps+1)`
/// values per quantity, so prefer selected times for long horizons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Recording {
    FullGrid,
    /// Record at these times (0 and the horizon are always included).
    Times(Vec<f64>),
}

/// Simulation settings. The default mesh is 1/256 with 10000 paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: f64,
    pub step: f64,
    pub paths: usize,
    pub seed: u64,
    pub record: Recording,
}

pub const DEFAULT_STEP: f64 = 1.0 / 256.0;
pub const DEFAULT_PATHS: usize = 10_000;

impl SimConfig {
    pub fn new(horizon: f64, step: f64, paths: usize, seed: u64) -> Result<Self> {
        let cfg = SimConfig {
            horizon,
            step,
            paths,
            seed,
            record: Recording::FullGrid,
        };
        cfg.n_steps()?;
        Ok(cfg)
    }

    pub fn with_record(mut self, record: Recording) -> Self {
        self.record = record;
        self
    }

    /// Number of Euler steps; the horizon must sit on the mesh.
    pub fn n_steps(&self) -> Result<usize> {
        if self.step.is_nan()
            || self.step <= 0.0
            || !self.horizon.is_finite()
            || self.horizon <= 0.0
        {
            return Err(CirError::Grid(format!(
                "need positive step and horizon, got step = {}, horizon = {}",
                self.step, self.horizon
            )));
        }
        if self.paths < 1 {
            return Err(CirError::Grid("need at least one path".into()));
        }
        let n = (self.horizon / self.step).round();
        if (n * self.step - self.horizon).abs() > 1e-12 {
            return Err(CirError::Grid(format!(
                "horizon {} is not a multiple of the step {}",
                self.horizon, self.step
            )));
        }
        Ok(n as usize)
    }
}

/// Simulated states and running discount integrals at the recorded times.
///
/// `r = x - y` holds elementwise by construction; the integral column
/// carries the left-point Riemann sum of `r` up to each recorded time, so
/// path-wise discount factors are available wherever states are.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    times: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    integral_r: Vec<f64>,
    paths: usize,
    step: f64,
    seed: u64,
}

impl PathSet {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Column index of a recorded time.
    pub fn col_of(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&v| (v - t).abs() <= 1e-9)
            .ok_or_else(|| CirError::Grid(format!("time {t} was not recorded")))
    }

    pub fn x_at(&self, path: usize, col: usize) -> f64 {
        self.x[path * self.times.len() + col]
    }

    pub fn y_at(&self, path: usize, col: usize) -> f64 {
        self.y[path * self.times.len() + col]
    }

    pub fn r_at(&self, path: usize, col: usize) -> f64 {
        self.x_at(path, col) - self.y_at(path, col)
    }

    /// Left-point Riemann sum of `r` from 0 to the recorded time.
    pub fn integral_at(&self, path: usize, col: usize) -> f64 {
        self.integral_r[path * self.times.len() + col]
    }

    /// Path-wise discount factor `exp(-integral)`.
    pub fn discount_at(&self, path: usize, col: usize) -> f64 {
        (-self.integral_at(path, col)).exp()
    }
}

/// Runs the truncated Euler scheme for both legs across all paths.
pub fn simulate(m: &DiffModel, cfg: &SimConfig) -> Result<PathSet> {
    m.x.validate()?;
    m.y.validate()?;
    let n_steps = cfg.n_steps()?;
    let cols = recorded_steps(cfg, n_steps)?;
    let times: Vec<f64> = cols.iter().map(|&c| c as f64 * cfg.step).collect();
    let k = cols.len();

    let mut x = vec![0.0; cfg.paths * k];
    let mut y = vec![0.0; cfg.paths * k];
    let mut integral = vec![0.0; cfg.paths * k];

    x.par_chunks_mut(k)
        .zip(y.par_chunks_mut(k))
        .zip(integral.par_chunks_mut(k))
        .enumerate()
        .for_each(|(path, ((xs, ys), ints))| {
            simulate_path(m, cfg, n_steps, &cols, path as u64, xs, ys, ints);
        });

    Ok(PathSet {
        times,
        x,
        y,
        integral_r: integral,
        paths: cfg.paths,
        step: cfg.step,
        seed: cfg.seed,
    })
}

fn recorded_steps(cfg: &SimConfig, n_steps: usize) -> Result<Vec<usize>> {
    let mut cols = match &cfg.record {
        Recording::FullGrid => (0..=n_steps).collect::<Vec<_>>(),
        Recording::Times(ts) => {
            let mut cols = vec![0, n_steps];
            for &t in ts {
                if !(0.0..=cfg.horizon + 1e-12).contains(&t) {
                    return Err(CirError::Grid(format!(
                        "recorded time {t} outside [0, {}]",
                        cfg.horizon
                    )));
                }
                let c = (t / cfg.step).round();
                if (c * cfg.step - t).abs() > 1e-9 {
                    return Err(CirError::Grid(format!(
                        "recorded time {t} is not on the mesh (step {})",
                        cfg.step
                    )));
                }
                cols.push(c as usize);
            }
            cols
        }
    };
    cols.sort_unstable();
    cols.dedup();
    Ok(cols)
}

#[allow(clippy::too_many_arguments)]
fn simulate_path(
    m: &DiffModel,
    cfg: &SimConfig,
    n_steps: usize,
    cols: &[usize],
    path: u64,
    out_x: &mut [f64],
    out_y: &mut [f64],
    out_int: &mut [f64],
) {
    let mut rng_x = rng::substream(cfg.seed, path, Leg::X);
    let mut rng_y = rng::substream(cfg.seed, path, Leg::Y);
    let dt = cfg.step;
    let sqrt_dt = dt.sqrt();
    let (mut xv, mut yv) = (m.x.z0, m.y.z0);
    let mut acc = 0.0;
    let mut next = 0;
    for step in 0..=n_steps {
        if next < cols.len() && cols[next] == step {
            out_x[next] = xv;
            out_y[next] = yv;
            out_int[next] = acc;
            next += 1;
        }
        if step == n_steps {
            break;
        }
        // left-point quadrature of r before the state moves
        acc += (xv - yv) * dt;
        let zx = rng::standard_normal(&mut rng_x);
        let zy = rng::standard_normal(&mut rng_y);
        xv += m.x.k * (m.x.theta - xv) * dt + m.x.sigma * xv.max(0.0).sqrt() * sqrt_dt * zx;
        yv += m.y.k * (m.y.theta - yv) * dt + m.y.sigma * yv.max(0.0).sqrt() * sqrt_dt * zy;
    }
    debug_assert_eq!(next, cols.len());
}

/// Two-sided normal quantile for a confidence level in (0, 1).
pub fn confidence_z(level: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - (1.0 - level) / 2.0)
}

/// A Monte Carlo sample mean with its CLT confidence band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Mean, standard error and CLT band over per-path values, accumulated in
/// fixed path order.
pub fn mc_estimate(values: impl Iterator<Item = f64>, level: f64) -> McEstimate {
    let mut n = 0usize;
    let (mut mean, mut m2) = (0.0, 0.0);
    for v in values {
        // Welford, deterministic in iteration order
        n += 1;
        let d = v - mean;
        mean += d / n as f64;
        m2 += d * (v - mean);
    }
    let var = if n > 1 { m2 / (n as f64 - 1.0) } else { 0.0 };
    let std_err = (var / n as f64).sqrt();
    let z = confidence_z(level);
    McEstimate {
        mean,
        std_err,
        ci_low: mean - z * std_err,
        ci_high: mean + z * std_err,
    }
}

/// Monte Carlo discount factor at one maturity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscountFactorStat {
    pub maturity: f64,
    pub mean: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Sample statistics of `D(T) = exp(-sum r dt)` at the requested
/// maturities (CLT band at `level`, e.g. 0.999).
pub fn discount_factors(
    p: &PathSet,
    maturities: &[f64],
    level: f64,
) -> Result<Vec<DiscountFactorStat>> {
    maturities
        .iter()
        .map(|&t| {
            let col = p.col_of(t)?;
            let est = mc_estimate((0..p.paths()).map(|i| p.discount_at(i, col)), level);
            Ok(DiscountFactorStat {
                maturity: t,
                mean: est.mean,
                std_err: est.std_err,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
            })
        })
        .collect()
}

/// One histogram bar plus the matched-normal overlay density at its center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub density: f64,
    pub normal_density: f64,
}

/// Moments and histogram of the simulated short rate at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub t: f64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub bins: Vec<HistogramBin>,
}

/// Sample moments of `r(t)` with a histogram and a normal overlay of
/// identical mean and variance.
pub fn distribution_summary(p: &PathSet, t: f64, n_bins: usize) -> Result<DistributionSummary> {
    if n_bins == 0 {
        return Err(CirError::Validation(
            "histogram needs at least one bin".into(),
        ));
    }
    let col = p.col_of(t)?;
    let m = p.paths();
    let values: Vec<f64> = (0..m).map(|i| p.r_at(i, col)).collect();
    let n = m as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in &values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // degenerate samples (deterministic paths) carry no shape information
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    let excess_kurtosis = if m2 > 0.0 { m4 / (m2 * m2) - 3.0 } else { 0.0 };
    let variance = if m > 1 { m2 * n / (n - 1.0) } else { 0.0 };

    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = ((hi - lo) / n_bins as f64).max(f64::MIN_POSITIVE);
    let mut counts = vec![0usize; n_bins];
    for &v in &values {
        let idx = (((v - lo) / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let sd = m2.sqrt();
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let b_lo = lo + i as f64 * width;
            let b_hi = b_lo + width;
            let center = 0.5 * (b_lo + b_hi);
            let normal_density = if sd > 0.0 {
                (-0.5 * ((center - mean) / sd).powi(2)).exp()
                    / (sd * (2.0 * std::f64::consts::PI).sqrt())
            } else {
                0.0
            };
            HistogramBin {
                lo: b_lo,
                hi: b_hi,
                count,
                density: count as f64 / (n * width),
                normal_density,
            }
        })
        .collect();

    Ok(DistributionSummary {
        t,
        mean,
        variance,
        skewness,
        excess_kurtosis,
        bins,
    })
}
