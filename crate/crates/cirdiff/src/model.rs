//! Closed-form machinery of the CIR-difference short-rate model.
//!
//! The short rate is `r(t) = x(t) - y(t)` with `x` and `y` two independent
//! CIR processes `dz = k (theta - z) dt + sigma sqrt(z) dW`. Zero-coupon
//! bond prices are affine in the two states,
//!
//! ```text
//! P(t,T) = A_x e^{-B_x x(t)} * A_y e^{+B_y y(t)},
//! ```
//!
//! with `A_z`, `B_z` expressed through a leg-specific triple
//! `(phi1, phi2, phi3)`:
//!
//! ```text
//! A_z = ( phi1 e^{phi2 tau} / (phi2 (e^{phi1 tau} - 1) + phi1) )^{phi3}
//! B_z = (e^{phi1 tau} - 1) / (phi2 (e^{phi1 tau} - 1) + phi1)
//! ```
//!
//! The x-leg uses `phi1 = sqrt(k^2 + 2 sigma^2)`, the y-leg
//! `phi1 = sqrt(k^2 - 2 sigma^2)`; both use `phi2 = (k + phi1)/2` and
//! `phi3 = 2 k theta / sigma^2`. Even though both legs stay positive under
//! the Feller condition, the difference can go negative, which is the point
//! of the construction.

use serde::{Deserialize, Serialize};

use crate::error::{CirError, Result};

/// Volatilities below this floor make `phi3 = 2 k theta / sigma^2`
/// numerically meaningless and the inverse map singular.
pub const MIN_SIGMA: f64 = 1e-8;

/// Lower floor for `phi1`, `phi2` keeping the bond-factor denominators
/// strictly positive.
pub const MIN_PHI: f64 = 1e-8;

/// Which CIR leg a parameter set belongs to. The y-leg enters the short
/// rate with a negative sign and flips two signs in the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leg {
    X,
    Y,
}

impl std::fmt::Display for Leg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Leg::X => write!(f, "x"),
            Leg::Y => write!(f, "y"),
        }
    }
}

/// Parameters of one CIR leg: `dz = k (theta - z) dt + sigma sqrt(z) dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirParams {
    /// Mean-reversion speed (1/year).
    pub k: f64,
    /// Volatility of the square-root diffusion.
    pub sigma: f64,
    /// Long-run mean level.
    pub theta: f64,
    /// Initial level z(0).
    pub z0: f64,
}

impl CirParams {
    /// Validates non-negativity and the Feller condition `2 k theta >= sigma^2`.
    pub fn new(k: f64, sigma: f64, theta: f64, z0: f64) -> Result<Self> {
        let p = CirParams {
            k,
            sigma,
            theta,
            z0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k", self.k),
            ("sigma", self.sigma),
            ("theta", self.theta),
            ("z0", self.z0),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(CirError::InvalidParams(format!(
                    "{name} = {v} must be finite and nonnegative"
                )));
            }
        }
        // tolerate rounding dust on the exact Feller boundary (phi3 = 1)
        let slack = 1e-12 * (self.sigma * self.sigma).max(1e-16);
        if self.feller_margin() < -slack {
            return Err(CirError::InvalidParams(format!(
                "Feller condition violated: 2*k*theta - sigma^2 = {:e}",
                self.feller_margin()
            )));
        }
        Ok(())
    }

    /// `2 k theta - sigma^2`; nonnegative iff the origin is inaccessible.
    pub fn feller_margin(&self) -> f64 {
        2.0 * self.k * self.theta - self.sigma * self.sigma
    }

    pub fn satisfies_feller(&self) -> bool {
        self.feller_margin() >= 0.0
    }

    /// Conditional mean `E_s[z(s+dt)] = z_s e^{-k dt} + theta (1 - e^{-k dt})`.
    pub fn cond_mean(&self, z_s: f64, dt: f64) -> f64 {
        let e = (-self.k * dt).exp();
        z_s * e + self.theta * (1.0 - e)
    }

    /// Conditional variance
    /// `z_s sigma^2/k (e^{-k dt} - e^{-2 k dt}) + theta sigma^2/(2k) (1 - e^{-k dt})^2`.
    pub fn cond_var(&self, z_s: f64, dt: f64) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let e = (-self.k * dt).exp();
        let s2k = self.sigma * self.sigma / self.k;
        z_s * s2k * (e - e * e) + 0.5 * self.theta * s2k * (1.0 - e) * (1.0 - e)
    }
}

/// Result of a Feller-condition check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FellerCheck {
    pub pass: bool,
    /// `2 k theta - sigma^2`.
    pub margin: f64,
}

/// Feller condition `2 k theta >= sigma^2` with its margin.
pub fn feller_check(p: &CirParams) -> FellerCheck {
    let margin = p.feller_margin();
    FellerCheck {
        pass: margin >= 0.0,
        margin,
    }
}

/// The leg-specific triple `(phi1, phi2, phi3)` entering the bond factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiTriple {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub leg: Leg,
}

impl PhiTriple {
    /// Validates the admissibility constraints for the given leg:
    /// `phi1, phi2 >= 1e-8`, `phi3 >= 1`, `2 phi2 >= phi1`, and the
    /// leg-specific ordering (`phi1 >= phi2` for X, `phi2 >= phi1` for Y).
    pub fn new(phi1: f64, phi2: f64, phi3: f64, leg: Leg) -> Result<Self> {
        let t = PhiTriple {
            phi1,
            phi2,
            phi3,
            leg,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi1.is_finite() && self.phi2.is_finite() && self.phi3.is_finite()) {
            return Err(CirError::InvalidPhi("non-finite phi".into()));
        }
        if self.phi1 < MIN_PHI || self.phi2 < MIN_PHI {
            return Err(CirError::InvalidPhi(format!(
                "phi1 = {:e}, phi2 = {:e} must both be >= {MIN_PHI:e}",
                self.phi1, self.phi2
            )));
        }
        if self.phi3 < 1.0 - 1e-12 {
            return Err(CirError::InvalidPhi(format!(
                "phi3 = {} < 1 (Feller condition in phi-space)",
                self.phi3
            )));
        }
        match self.leg {
            Leg::X if self.phi2 > self.phi1 => {
                return Err(CirError::InvalidPhi(format!(
                    "leg x requires phi1 >= phi2 (sigma real), got phi1 = {}, phi2 = {}",
                    self.phi1, self.phi2
                )));
            }
            Leg::Y if self.phi1 > self.phi2 => {
                return Err(CirError::InvalidPhi(format!(
                    "leg y requires phi2 >= phi1 (sigma real), got phi1 = {}, phi2 = {}",
                    self.phi1, self.phi2
                )));
            }
            _ => {}
        }
        if 2.0 * self.phi2 < self.phi1 {
            return Err(CirError::InvalidPhi(format!(
                "2*phi2 = {} < phi1 = {} (negative mean-reversion speed)",
                2.0 * self.phi2,
                self.phi1
            )));
        }
        Ok(())
    }

    /// Maps CIR parameters to the phi triple of the given leg:
    /// `phi1 = sqrt(k^2 +/- 2 sigma^2)`, `phi2 = (k + phi1)/2`,
    /// `phi3 = 2 k theta / sigma^2`.
    pub fn from_model(p: &CirParams, leg: Leg) -> Result<Self> {
        if p.sigma < MIN_SIGMA {
            return Err(CirError::DegenerateSigma(p.sigma));
        }
        let two_sig2 = 2.0 * p.sigma * p.sigma;
        let phi1 = match leg {
            Leg::X => (p.k * p.k + two_sig2).sqrt(),
            Leg::Y => {
                let disc = p.k * p.k - two_sig2;
                if disc < 0.0 {
                    return Err(CirError::NegativeDiscriminant(disc));
                }
                disc.sqrt()
            }
        };
        let phi2 = 0.5 * (p.k + phi1);
        let phi3 = 2.0 * p.k * p.theta / (p.sigma * p.sigma);
        PhiTriple::new(phi1, phi2, phi3, leg)
    }

    /// Inverts the phi map back to `(k, sigma, theta)`:
    /// `k = 2 phi2 - phi1`, `sigma^2 = ±2 phi2 (phi1 - phi2)`,
    /// `theta = sigma^2 phi3 / (2 k)`. Fails on the `phi1 = phi2`
    /// (sigma = 0) and `phi1 = 2 phi2` (k = 0) boundaries where the map
    /// is singular.
    pub fn model_params(&self) -> Result<CirCoeffs> {
        self.validate()?;
        let k = 2.0 * self.phi2 - self.phi1;
        let sig2 = match self.leg {
            Leg::X => 2.0 * self.phi2 * (self.phi1 - self.phi2),
            Leg::Y => 2.0 * self.phi2 * (self.phi2 - self.phi1),
        };
        let sigma = sig2.max(0.0).sqrt();
        if sigma < MIN_SIGMA {
            return Err(CirError::InvalidPhi(format!(
                "sigma = {sigma:e} degenerate on the phi1 = phi2 boundary"
            )));
        }
        if k < MIN_PHI {
            return Err(CirError::InvalidPhi(format!(
                "k = {k:e} degenerate on the phi1 = 2*phi2 boundary"
            )));
        }
        let theta = sig2 * self.phi3 / (2.0 * k);
        Ok(CirCoeffs { k, sigma, theta })
    }

    /// Bond factors `(A_z, B_z)` at time to maturity `tau`.
    ///
    /// Evaluated in the overflow-free form
    /// `B = (1 - e^{-u}) / den`,
    /// `log A = phi3 (log phi1 + phi2 tau - u - log den)` with
    /// `u = phi1 tau` and `den = phi1 e^{-u} - phi2 expm1(-u)`, which is
    /// exactly `phi1` at `tau = 0` so the terminal values `(1, 0)` are
    /// exact. Defined for tau >= 0; small negative arguments are accepted
    /// so that centered differences can straddle tau = 0.
    pub fn bond_factors(&self, tau: f64) -> BondFactors {
        let u = self.phi1 * tau;
        let one_m_emu = -(-u).exp_m1();
        let den = self.phi1 * (-u).exp() + self.phi2 * one_m_emu;
        let b = one_m_emu / den;
        let log_a = self.phi3 * (self.phi1.ln() + self.phi2 * tau - u - den.ln());
        BondFactors { a: log_a.exp(), b }
    }

    /// Maturity derivatives `(-d log A / dT, dB/dT)` at `tau = T - t`,
    /// used by the instantaneous forward rate:
    /// `-d log A/dT = phi2 phi3 (phi1 - phi2) B(tau)` and
    /// `dB/dT = phi1^2 e^{-u} / den^2`.
    pub fn d_bond_factors(&self, tau: f64) -> (f64, f64) {
        let u = self.phi1 * tau;
        let emu = (-u).exp();
        let one_m_emu = -(-u).exp_m1();
        let den = self.phi1 * emu + self.phi2 * one_m_emu;
        let b = one_m_emu / den;
        let neg_dlog_a = self.phi2 * self.phi3 * (self.phi1 - self.phi2) * b;
        let db = self.phi1 * self.phi1 * emu / (den * den);
        (neg_dlog_a, db)
    }
}

/// `(k, sigma, theta)` recovered from a phi triple; the initial level is
/// not part of the triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirCoeffs {
    pub k: f64,
    pub sigma: f64,
    pub theta: f64,
}

impl CirCoeffs {
    pub fn with_initial(self, z0: f64) -> Result<CirParams> {
        CirParams::new(self.k, self.sigma, self.theta, z0)
    }
}

/// Bond factors of one leg at a fixed time to maturity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondFactors {
    /// `A_z(t,T) > 0`, equal to 1 at tau = 0.
    pub a: f64,
    /// `B_z(t,T) >= 0` (years), nondecreasing in tau, 0 at tau = 0.
    pub b: f64,
}

/// The two-leg difference model: `r(t) = x(t) - y(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffModel {
    pub x: CirParams,
    pub y: CirParams,
}

impl DiffModel {
    /// Validates both legs, including the y-leg discriminant `k^2 >= 2 sigma^2`.
    pub fn new(x: CirParams, y: CirParams) -> Result<Self> {
        let m = DiffModel { x, y };
        m.phi()?;
        Ok(m)
    }

    /// Phi triples of both legs.
    pub fn phi(&self) -> Result<(PhiTriple, PhiTriple)> {
        Ok((
            PhiTriple::from_model(&self.x, Leg::X)?,
            PhiTriple::from_model(&self.y, Leg::Y)?,
        ))
    }

    /// Short rate at time zero.
    pub fn r0(&self) -> f64 {
        self.x.z0 - self.y.z0
    }

    /// Zero-coupon bond price `P = A_x e^{-B_x x_t} A_y e^{+B_y y_t}` for a
    /// bond maturing `tau` years ahead, given the current leg states.
    /// Can exceed 1 when rates are negative.
    pub fn zcb_price(&self, x_t: f64, y_t: f64, tau: f64) -> Result<f64> {
        if x_t.is_nan() || y_t.is_nan() || x_t < 0.0 || y_t < 0.0 {
            return Err(CirError::Domain(format!(
                "leg states must be nonnegative, got x_t = {x_t}, y_t = {y_t}"
            )));
        }
        if tau.is_nan() || tau < 0.0 {
            return Err(CirError::Domain(format!("tau = {tau} must be >= 0")));
        }
        let (px, py) = self.phi()?;
        let fx = px.bond_factors(tau);
        let fy = py.bond_factors(tau);
        Ok(fx.a * (-fx.b * x_t).exp() * fy.a * (fy.b * y_t).exp())
    }

    /// Conditional mean `E_s[r(s+dt)] = E_s[x] - E_s[y]`.
    pub fn cond_mean(&self, x_s: f64, y_s: f64, dt: f64) -> f64 {
        self.x.cond_mean(x_s, dt) - self.y.cond_mean(y_s, dt)
    }

    /// Conditional variance; the legs are independent so variances add.
    pub fn cond_var(&self, x_s: f64, y_s: f64, dt: f64) -> f64 {
        self.x.cond_var(x_s, dt) + self.y.cond_var(y_s, dt)
    }

    /// Instantaneous forward rate `f(t,T) = -d log P(t,T) / dT` from the
    /// closed-form maturity derivatives of both legs.
    pub fn inst_forward_rate(&self, x_t: f64, y_t: f64, tau: f64) -> Result<f64> {
        let (px, py) = self.phi()?;
        let (ax, bx) = px.d_bond_factors(tau);
        let (ay, by) = py.d_bond_factors(tau);
        Ok(ax + bx * x_t + ay - by * y_t)
    }
}

/// Continuously compounded spot rate `R = -log(price)/tau`.
pub fn spot_rate(price: f64, tau: f64) -> Result<f64> {
    if price.is_nan() || price <= 0.0 {
        return Err(CirError::Domain(format!("price = {price} must be > 0")));
    }
    if tau.is_nan() || tau <= 0.0 {
        return Err(CirError::Domain(format!("tau = {tau} must be > 0")));
    }
    Ok(-price.ln() / tau)
}

/// Residuals of the two Riccati equations of one leg at a grid point.
/// Both vanish when `(A, B)` solve the system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiResidual {
    pub tau: f64,
    /// Residual of the B-equation (drift/diffusion balance).
    pub b_eq: f64,
    /// Residual of the log-A equation.
    pub log_a_eq: f64,
}

/// Finite-difference step for the time derivatives in the Riccati check.
const RICCATI_FD_STEP: f64 = 1e-6;

/// Evaluates the Riccati-equation residuals of a leg on a grid of
/// maturities. Time derivatives of `log A` and `B` are taken by centered
/// differences of the closed forms themselves (step 1e-6), so the check
/// retains power against a wrong `A` or `B`.
pub fn riccati_residual(t: &PhiTriple, tau_grid: &[f64]) -> Result<Vec<RiccatiResidual>> {
    let coeffs = t.model_params()?;
    for &tau in tau_grid {
        if tau.is_nan() || tau < 0.0 {
            return Err(CirError::Domain(format!("grid point {tau} must be >= 0")));
        }
    }
    let log_a = |tau: f64| t.bond_factors(tau).a.ln();
    let b = |tau: f64| t.bond_factors(tau).b;
    Ok(riccati_residual_fns(&log_a, &b, &coeffs, t.leg, tau_grid))
}

/// Residuals for arbitrary `(log A, B)` candidates; used by
/// [`riccati_residual`] and by tests that deliberately perturb one factor.
///
/// With CIR coefficients (`lambda = -k`, `eta = k theta`, `gamma = sigma^2`,
/// `delta = 0`) the system per leg reads, in `d/dt` form at fixed `T`:
///
/// ```text
/// x:  -1 + k B - dB/dt_signed + sigma^2 B^2 / 2 = 0,   -k theta B + d(log A)/dt = 0
/// y:   1 - k B + dB/dt_signed + sigma^2 B^2 / 2 = 0,    k theta B + d(log A)/dt = 0
/// ```
///
/// where `d/dt = -d/dtau`.
fn riccati_residual_fns(
    log_a: &dyn Fn(f64) -> f64,
    b: &dyn Fn(f64) -> f64,
    coeffs: &CirCoeffs,
    leg: Leg,
    tau_grid: &[f64],
) -> Vec<RiccatiResidual> {
    let h = RICCATI_FD_STEP;
    // d/dt F(T - t) = (F(tau - h) - F(tau + h)) / (2h)
    let d_dt = |f: &dyn Fn(f64) -> f64, tau: f64| (f(tau - h) - f(tau + h)) / (2.0 * h);
    let (k, sig2, ktheta) = (
        coeffs.k,
        coeffs.sigma * coeffs.sigma,
        coeffs.k * coeffs.theta,
    );
    tau_grid
        .iter()
        .map(|&tau| {
            let b_val = b(tau);
            let db_dt = d_dt(b, tau);
            let dloga_dt = d_dt(log_a, tau);
            let (b_eq, log_a_eq) = match leg {
                Leg::X => (
                    -1.0 + k * b_val - db_dt + 0.5 * sig2 * b_val * b_val,
                    -ktheta * b_val + dloga_dt,
                ),
                Leg::Y => (
                    1.0 - k * b_val + db_dt + 0.5 * sig2 * b_val * b_val,
                    ktheta * b_val + dloga_dt,
                ),
            };
            RiccatiResidual {
                tau,
                b_eq,
                log_a_eq,
            }
        })
        .collect()
}
