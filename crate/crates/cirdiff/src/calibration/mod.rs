//! Calibration of the 8-parameter vector to a market discount curve.
//!
//! The parameter vector is
//! `Pi = [phi1_x, phi2_x, phi3_x, phi1_y, phi2_y, phi3_y, x0, y0]` and the
//! objective is the relative squared pricing error
//! `f(Pi) = sum_i (P_M(0,T_i) / P(Pi;0,T_i) - 1)^2` over the curve pillars,
//! minimized over the admissible polyhedron
//! `{ Pi >= 0, phi3_x >= 1, phi3_y >= 1, A Pi <= 0 }` with four linear
//! rows encoding real sigma and nonnegative mean reversion per leg.
//!
//! The solver is Levenberg-Marquardt on the price residuals with quadratic
//! penalties for the linear rows and clamping onto the bounds; the penalty
//! weight is ramped until the exact constraints hold. An optional
//! multi-start mode draws admissible candidates from a seeded stream and
//! keeps the best local result.

mod lm;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CirError, Result};
use crate::market::ZeroCurve;
use crate::model::{DiffModel, Leg, PhiTriple, MIN_PHI};

use lm::{LmOptions, LmResult};

/// Interior margin keeping `sigma` real and `k` positive during
/// optimization; the inverse phi map is singular on the boundary.
pub const INTERIOR_MARGIN: f64 = 1e-8;

/// The calibration vector `[phi1_x, phi2_x, phi3_x, phi1_y, phi2_y, phi3_y, x0, y0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiVector(pub [f64; 8]);

/// Lower bounds of the admissible box.
const LOWER_BOUNDS: [f64; 8] = [MIN_PHI, MIN_PHI, 1.0, MIN_PHI, MIN_PHI, 1.0, 0.0, 0.0];

/// The four linear rows of `A Pi <= 0`.
const LINEAR_ROWS: [(&str, [f64; 8]); 4] = [
    (
        "sigma x real: phi2_x <= phi1_x",
        [-1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ),
    (
        "sigma y real: phi1_y <= phi2_y",
        [0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0],
    ),
    (
        "mean-reversion x: phi1_x <= 2 phi2_x",
        [1.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ),
    (
        "mean-reversion y: phi1_y <= 2 phi2_y",
        [0.0, 0.0, 0.0, 1.0, -2.0, 0.0, 0.0, 0.0],
    ),
];

const BOUND_NAMES: [&str; 8] = [
    "phi1_x >= 0",
    "phi2_x >= 0",
    "Feller x: phi3_x >= 1",
    "phi1_y >= 0",
    "phi2_y >= 0",
    "Feller y: phi3_y >= 1",
    "x0 >= 0",
    "y0 >= 0",
];

impl PhiVector {
    pub fn x_triple(&self) -> Result<PhiTriple> {
        PhiTriple::new(self.0[0], self.0[1], self.0[2], Leg::X)
    }

    pub fn y_triple(&self) -> Result<PhiTriple> {
        PhiTriple::new(self.0[3], self.0[4], self.0[5], Leg::Y)
    }

    pub fn x0(&self) -> f64 {
        self.0[6]
    }

    pub fn y0(&self) -> f64 {
        self.0[7]
    }

    /// Recovers `(k, sigma, theta, z0)` for both legs.
    pub fn to_model(&self) -> Result<DiffModel> {
        let cx = self.x_triple()?.model_params()?;
        let cy = self.y_triple()?.model_params()?;
        DiffModel::new(cx.with_initial(self.x0())?, cy.with_initial(self.y0())?)
    }

    /// Phi vector of a model (the inverse of [`PhiVector::to_model`]).
    pub fn from_model(m: &DiffModel) -> Result<Self> {
        let (tx, ty) = m.phi()?;
        Ok(PhiVector([
            tx.phi1, tx.phi2, tx.phi3, ty.phi1, ty.phi2, ty.phi3, m.x.z0, m.y.z0,
        ]))
    }

    /// Zero-coupon price `P(Pi; 0, tau)` without constructing a model;
    /// returns `None` when the closed form cannot be evaluated at this
    /// point (used as an infinite penalty by the optimizer).
    fn price(&self, tau: f64) -> Option<f64> {
        let p = &self.0;
        let price_leg = |phi1: f64, phi2: f64, phi3: f64, state: f64, sign: f64| -> Option<f64> {
            if phi1 <= 0.0 || phi2 <= 0.0 {
                return None;
            }
            let u = phi1 * tau;
            let one_m_emu = -(-u).exp_m1();
            let den = phi1 * (-u).exp() + phi2 * one_m_emu;
            if den <= 0.0 {
                return None;
            }
            let b = one_m_emu / den;
            let log_a = phi3 * (phi1.ln() + phi2 * tau - u - den.ln());
            let v = (log_a + sign * b * state).exp();
            v.is_finite().then_some(v)
        };
        let x = price_leg(p[0], p[1], p[2], p[6], -1.0)?;
        let y = price_leg(p[3], p[4], p[5], p[7], 1.0)?;
        Some(x * y)
    }
}

/// Outcome of an admissibility check: pass flag plus the violated
/// constraints by name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub violations: Vec<String>,
}

/// Checks the bounds and the four linear rows exactly (non-strict
/// inequalities as written).
pub fn is_admissible(pi: &PhiVector) -> Admissibility {
    let mut violations = Vec::new();
    for (i, (&v, &lb)) in pi.0.iter().zip(LOWER_BOUNDS.iter()).enumerate() {
        // the admissible set's lower bounds are 0; MIN_PHI only guards division
        let effective_lb = if lb == MIN_PHI { 0.0 } else { lb };
        if v.is_nan() || v < effective_lb {
            violations.push(BOUND_NAMES[i].to_string());
        }
    }
    for (name, row) in &LINEAR_ROWS {
        let g: f64 = row.iter().zip(pi.0.iter()).map(|(a, x)| a * x).sum();
        if g > 0.0 {
            violations.push((*name).to_string());
        }
    }
    Admissibility {
        admissible: violations.is_empty(),
        violations,
    }
}

/// Maps a vector into the admissible set. Points already inside (with the
/// strict-interior margin) pass through unchanged; an out-of-band `phi2`
/// is moved well inside its leg's feasible band rather than onto the
/// boundary, because both band edges (`sigma = 0` and `k = 0`) make the
/// inverse parameter map singular and strand the optimizer.
pub fn project(pi: &PhiVector) -> PhiVector {
    let mut p = pi.0;
    for (v, lb) in p.iter_mut().zip(LOWER_BOUNDS.iter()) {
        if !v.is_finite() || *v < *lb {
            *v = *lb;
        }
    }
    // leg X: phi2 in [phi1/2, phi1 - margin]
    p[0] = p[0].max(2.0 * MIN_PHI + INTERIOR_MARGIN);
    let (lo, hi) = (0.5 * p[0], p[0] - INTERIOR_MARGIN);
    if !(lo..=hi).contains(&p[1]) {
        p[1] = 0.75 * p[0];
    }
    // leg Y: phi2 >= phi1 + margin (2 phi2 >= phi1 follows)
    if p[4] < p[3] + INTERIOR_MARGIN {
        p[4] = 1.25 * p[3] + INTERIOR_MARGIN;
    }
    PhiVector(p)
}

/// The calibration objective `sum_i (P_M / P(Pi) - 1)^2`; infinite when the
/// closed form cannot be evaluated at `pi`.
pub fn objective(pi: &PhiVector, curve: &ZeroCurve, maturities: &[f64]) -> Result<f64> {
    let market: Vec<f64> = maturities
        .iter()
        .map(|&t| curve.discount(t))
        .collect::<Result<_>>()?;
    Ok(objective_from_prices(pi, &market, maturities))
}

fn objective_from_prices(pi: &PhiVector, market: &[f64], maturities: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pm, &tau) in market.iter().zip(maturities.iter()) {
        match pi.price(tau) {
            Some(p) if p > 0.0 => {
                let r = pm / p - 1.0;
                acc += r * r;
            }
            _ => return f64::INFINITY,
        }
    }
    acc
}

/// Mean relative error `1/n sum |P_M / P(Pi) - 1|`.
pub fn mre(pi: &PhiVector, curve: &ZeroCurve, maturities: &[f64]) -> Result<f64> {
    if maturities.is_empty() {
        return Err(CirError::Validation(
            "mre needs at least one maturity".into(),
        ));
    }
    let mut acc = 0.0;
    for &tau in maturities {
        let pm = curve.discount(tau)?;
        let p = pi
            .price(tau)
            .filter(|p| *p > 0.0)
            .ok_or_else(|| CirError::InvalidPhi(format!("price not evaluable at tau = {tau}")))?;
        acc += (pm / p - 1.0).abs();
    }
    Ok(acc / maturities.len() as f64)
}

/// Options controlling [`calibrate`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationOptions {
    pub max_iterations: usize,
    pub gradient_tol: f64,
    pub step_tol: f64,
    /// Number of extra seeded starting points; 0 disables multi-start.
    pub multistart: usize,
    /// Seed for the multi-start draws.
    pub seed: u64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            max_iterations: 500,
            gradient_tol: 1e-10,
            step_tol: 1e-12,
            multistart: 0,
            seed: 0,
        }
    }
}

/// Default starting point near the region where both legs mean-revert at
/// plausible speeds.
pub fn default_guess() -> PhiVector {
    PhiVector([0.7, 0.65, 1.6, 0.47, 0.53, 1.5, 0.27, 0.28])
}

/// A calibration outcome. `converged = false` flags the best iterate of a
/// run that hit the iteration cap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub pi_star: PhiVector,
    pub model: DiffModel,
    pub objective: f64,
    pub mre: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
    /// Set when an inadmissible guess had to be projected first.
    pub guess_projected: bool,
}

/// Fits `Pi` to the curve's discount factors at the given maturities.
///
/// Inadmissible guesses are projected onto the admissible set. The run is
/// deterministic given `(curve, maturities, guess, options)`; the returned
/// objective never exceeds the projected guess's.
pub fn calibrate(
    curve: &ZeroCurve,
    maturities: &[f64],
    guess: &PhiVector,
    options: &CalibrationOptions,
) -> Result<CalibrationResult> {
    if maturities.is_empty() {
        return Err(CirError::Validation(
            "calibration needs at least one maturity".into(),
        ));
    }
    let started = std::time::Instant::now();
    let market: Vec<f64> = maturities
        .iter()
        .map(|&t| curve.discount(t))
        .collect::<Result<_>>()?;

    let projected = project(guess);
    if !is_admissible(&projected).admissible {
        return Err(CirError::InfeasibleGuess(format!(
            "projection failed: {:?}",
            is_admissible(&projected).violations
        )));
    }
    let guess_projected = projected.0 != guess.0;

    let mut starts = vec![projected];
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for _ in 0..options.multistart {
        starts.push(random_admissible(&mut rng));
    }

    let mut best: Option<(LmResult, PhiVector)> = None;
    for start in &starts {
        let run = run_from(start, &market, maturities, options);
        let candidate = project(&PhiVector(run.x.clone().try_into().expect("8 params")));
        let replace = match &best {
            None => true,
            Some((b, _)) => run.cost < b.cost,
        };
        if replace {
            best = Some((run, candidate));
        }
    }
    let (run, pi_star) = best.expect("at least one start");

    let adm = is_admissible(&pi_star);
    if !adm.admissible {
        return Err(CirError::InfeasibleGuess(format!(
            "optimizer left the admissible set: {:?}",
            adm.violations
        )));
    }
    let final_objective = objective_from_prices(&pi_star, &market, maturities);
    let guess_objective = objective_from_prices(&starts[0], &market, maturities);
    // monotone improvement with respect to the projected guess
    let (pi_star, final_objective) = if final_objective <= guess_objective {
        (pi_star, final_objective)
    } else {
        (starts[0], guess_objective)
    };

    let model = pi_star.to_model()?;
    Ok(CalibrationResult {
        pi_star,
        model,
        objective: final_objective,
        mre: mre(&pi_star, curve, maturities)?,
        iterations: run.iterations,
        converged: run.converged,
        wall_time_s: started.elapsed().as_secs_f64(),
        guess_projected,
    })
}

/// One penalty-continuation LM run from a single start.
fn run_from(
    start: &PhiVector,
    market: &[f64],
    maturities: &[f64],
    options: &CalibrationOptions,
) -> LmResult {
    let lm_opts = LmOptions {
        max_iterations: options.max_iterations,
        gradient_tol: options.gradient_tol,
        step_tol: options.step_tol,
        // objective 1e-12 is an rms relative price error below 2e-7 on a
        // 30-pillar curve; the flat phi3/state valley makes tighter
        // first-order stops unreachable in finitely many damped steps
        cost_tol: 1e-12,
        ..Default::default()
    };
    let clamp = |x: &mut [f64]| {
        for (v, lb) in x.iter_mut().zip(LOWER_BOUNDS.iter()) {
            if !v.is_finite() || *v < *lb {
                *v = *lb;
            }
        }
    };
    let mut x = start.0.to_vec();
    let mut result = None;
    let mut mu: f64 = 1e4;
    let mut total_iterations = 0;
    for _ in 0..4 {
        let weight = mu.sqrt();
        let residuals = |p: &[f64]| -> Vec<f64> {
            let pi = PhiVector(p.try_into().expect("8 params"));
            let mut out = Vec::with_capacity(market.len() + LINEAR_ROWS.len());
            for (&pm, &tau) in market.iter().zip(maturities.iter()) {
                match pi.price(tau) {
                    Some(pr) if pr > 0.0 => out.push(pm / pr - 1.0),
                    _ => out.push(1e6),
                }
            }
            for (_, row) in &LINEAR_ROWS {
                let g: f64 = row.iter().zip(p.iter()).map(|(a, v)| a * v).sum();
                out.push(weight * (g + INTERIOR_MARGIN).max(0.0));
            }
            out
        };
        let run = lm::minimize(&residuals, &clamp, &x, &lm_opts);
        total_iterations += run.iterations;
        x = run.x.clone();
        let feasible = LINEAR_ROWS
            .iter()
            .all(|(_, row)| row.iter().zip(x.iter()).map(|(a, v)| a * v).sum::<f64>() <= 0.0);
        result = Some(LmResult {
            iterations: total_iterations,
            ..run
        });
        if feasible {
            break;
        }
        mu *= 100.0;
    }
    result.expect("at least one continuation round")
}

/// Draws one admissible vector with `phi2` uniform strictly inside its
/// leg's feasible band, away from the singular edges.
fn random_admissible(rng: &mut ChaCha8Rng) -> PhiVector {
    let mut uniform = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let phi1_x = 0.05 + 1.95 * uniform();
    let phi2_x = phi1_x * (0.55 + 0.40 * uniform());
    let phi3_x = 1.0 + 4.0 * uniform();
    let phi1_y = 0.05 + 1.95 * uniform();
    let phi2_y = phi1_y * (1.05 + 1.00 * uniform());
    let phi3_y = 1.0 + 4.0 * uniform();
    PhiVector([
        phi1_x,
        phi2_x,
        phi3_x,
        phi1_y,
        phi2_y,
        phi3_y,
        uniform(),
        uniform(),
    ])
}

/// Builds the analytic discount curve of a known model at the given
/// pillars; calibrating to it from a nearby guess must recover a near-zero
/// objective.
pub fn synthetic_curve(m: &DiffModel, maturities: &[f64]) -> Result<ZeroCurve> {
    let points: Vec<(f64, f64)> = maturities
        .iter()
        .map(|&t| {
            let p = m.zcb_price(m.x.z0, m.y.z0, t)?;
            Ok((t, crate::model::spot_rate(p, t)?))
        })
        .collect::<Result<_>>()?;
    ZeroCurve::from_pillar_rates(&points)
}
