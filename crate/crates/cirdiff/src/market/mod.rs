//! Market data: quote ingestion, curve bootstrapping and interpolation.
//!
//! The zero curve is built from money-market deposits (maturities up to one
//! year, simple compounding) and par swap rates (annual fixed leg), then
//! interpolated with a natural cubic spline on the continuously compounded
//! zero rate. Discount factors need not be monotone: negative rates push
//! them above 1.

mod spline;

use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use spline::CubicSpline;

use crate::error::{CirError, Result};

/// ACT/365-fixed year fraction between two calendar dates.
pub fn year_fraction_act365f(from: NaiveDate, to: NaiveDate) -> f64 {
    (to - from).num_days() as f64 / 365.0
}

/// A single market quote: maturity in year fractions, rate as a decimal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub tenor: f64,
    pub rate: f64,
}

/// Validated input instruments for one valuation date.
#[derive(Debug, Clone, Default)]
pub struct QuoteSet {
    /// Deposits, simple compounding, tenors up to ~1y, strictly increasing.
    pub deposits: Vec<Quote>,
    /// Par swap rates vs the floating leg, annual fixed leg, strictly increasing.
    pub swaps: Vec<Quote>,
    pub valuation_date: Option<NaiveDate>,
}

impl QuoteSet {
    pub fn new(deposits: Vec<Quote>, swaps: Vec<Quote>) -> Result<Self> {
        let q = QuoteSet {
            deposits,
            swaps,
            valuation_date: None,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.deposits.is_empty() && self.swaps.is_empty() {
            return Err(CirError::Validation("no instruments".into()));
        }
        for (name, list) in [("deposit", &self.deposits), ("swap", &self.swaps)] {
            for q in list {
                if q.tenor.is_nan() || q.tenor <= 0.0 || !q.rate.is_finite() {
                    return Err(CirError::Validation(format!(
                        "{name} quote ({}, {}) has nonpositive tenor or non-finite rate",
                        q.tenor, q.rate
                    )));
                }
            }
            for w in list.windows(2) {
                if w[1].tenor <= w[0].tenor {
                    return Err(CirError::Validation(format!(
                        "{name} tenors must be strictly increasing: {} after {}",
                        w[1].tenor, w[0].tenor
                    )));
                }
            }
        }
        if let (Some(d), Some(s)) = (self.deposits.last(), self.swaps.first()) {
            if s.tenor <= d.tenor {
                return Err(CirError::Validation(format!(
                    "first swap maturity {} must exceed last deposit tenor {}",
                    s.tenor, d.tenor
                )));
            }
        }
        Ok(())
    }
}

/// Reads quotes from CSV with header `type,tenor_years,rate` and rows
/// `DEPO|SWAP,<years>,<decimal rate>`.
pub fn load_quotes(path: &Path) -> Result<QuoteSet> {
    let raw = std::fs::read_to_string(path).map_err(|e| {
        CirError::Validation(format!("cannot read quotes file {}: {e}", path.display()))
    })?;
    let mut deposits: Vec<Quote> = Vec::new();
    let mut swaps: Vec<Quote> = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if idx == 0 {
            let header: Vec<&str> = line.split(',').map(str::trim).collect();
            if header != ["type", "tenor_years", "rate"] {
                return Err(CirError::Parse {
                    line: lineno,
                    msg: format!("expected header 'type,tenor_years,rate', got '{line}'"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(CirError::Parse {
                line: lineno,
                msg: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let tenor: f64 = fields[1].parse().map_err(|_| CirError::Parse {
            line: lineno,
            msg: format!("bad tenor '{}'", fields[1]),
        })?;
        let rate: f64 = fields[2].parse().map_err(|_| CirError::Parse {
            line: lineno,
            msg: format!("bad rate '{}'", fields[2]),
        })?;
        let list = match fields[0] {
            "DEPO" => &mut deposits,
            "SWAP" => &mut swaps,
            other => {
                return Err(CirError::Parse {
                    line: lineno,
                    msg: format!("unknown instrument type '{other}'"),
                })
            }
        };
        if let Some(prev) = list.last() {
            if tenor <= prev.tenor {
                return Err(CirError::Parse {
                    line: lineno,
                    msg: format!(
                        "{} tenor {tenor} is not above the previous {}",
                        fields[0], prev.tenor
                    ),
                });
            }
        }
        list.push(Quote { tenor, rate });
    }
    QuoteSet::new(deposits, swaps)
}

/// One curve pillar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pillar {
    pub maturity: f64,
    /// Continuously compounded zero rate.
    pub zero_rate: f64,
    pub discount: f64,
}

/// Zero/discount curve: pillars plus a natural cubic spline on the
/// continuously compounded zero rate. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ZeroCurve {
    pillars: Vec<Pillar>,
    spline: CubicSpline,
}

impl ZeroCurve {
    /// Builds a curve from `(maturity, zero_rate)` pairs; discounts are
    /// derived as `exp(-R T)`.
    pub fn from_pillar_rates(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(CirError::Validation(
                "curve needs at least one pillar".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(CirError::Validation(format!(
                    "pillar maturities must be strictly increasing: {} after {}",
                    w[1].0, w[0].0
                )));
            }
        }
        for &(t, r) in points {
            if t.is_nan() || t <= 0.0 || !r.is_finite() {
                return Err(CirError::Validation(format!("bad pillar ({t}, {r})")));
            }
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let spline = CubicSpline::natural(&xs, &ys)?;
        let pillars = points
            .iter()
            .map(|&(t, r)| Pillar {
                maturity: t,
                zero_rate: r,
                discount: (-r * t).exp(),
            })
            .collect();
        Ok(ZeroCurve { pillars, spline })
    }

    pub fn pillars(&self) -> &[Pillar] {
        &self.pillars
    }

    pub fn max_maturity(&self) -> f64 {
        self.pillars.last().map(|p| p.maturity).unwrap_or(0.0)
    }

    /// Interpolated continuously compounded zero rate. Below the first
    /// pillar the boundary spline segment extends; beyond the last pillar
    /// the request fails.
    pub fn zero_rate(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(CirError::Domain(format!("maturity {t} must be >= 0")));
        }
        let max = self.max_maturity();
        if t > max {
            return Err(CirError::Extrapolation { t, max });
        }
        Ok(self.spline.eval(t))
    }

    /// `D(T) = exp(-R(T) T)`; equals 1 at `T = 0`.
    pub fn discount(&self, t: f64) -> Result<f64> {
        Ok((-self.zero_rate(t)? * t).exp())
    }

    /// Curve-implied simply forward-looking zero rate between `t` and `T`:
    /// `(T R(0,T) - t R(0,t)) / (T - t)`.
    pub fn forward_rate(&self, t: f64, big_t: f64) -> Result<f64> {
        if t.is_nan() || big_t.is_nan() || t <= 0.0 || big_t <= t {
            return Err(CirError::Domain(format!(
                "need 0 < t < T, got t = {t}, T = {big_t}"
            )));
        }
        Ok((big_t * self.zero_rate(big_t)? - t * self.zero_rate(t)?) / (big_t - t))
    }

    /// Market t-forward zero-coupon price `exp(-R(t,T) (T-t))`; equals
    /// `discount(T)/discount(t)` algebraically.
    pub fn forward_zcb(&self, t: f64, big_t: f64) -> Result<f64> {
        Ok((-self.forward_rate(t, big_t)? * (big_t - t)).exp())
    }

    /// Writes the pillar table as CSV with header
    /// `maturity_years,zero_rate,discount`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "maturity_years,zero_rate,discount")?;
        for p in &self.pillars {
            writeln!(w, "{},{},{}", p.maturity, p.zero_rate, p.discount)?;
        }
        Ok(())
    }

    pub fn to_csv_file(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    /// Reads a pillar table written by [`ZeroCurve::write_csv`]. The zero
    /// rate column is authoritative; a discount column that disagrees with
    /// `exp(-R T)` by more than 1e-6 is rejected as inconsistent.
    pub fn from_csv_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| {
            CirError::Validation(format!("cannot read curve file {}: {e}", path.display()))
        })?;
        let mut points = Vec::new();
        for (idx, line) in raw.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if idx == 0 {
                let header: Vec<&str> = line.split(',').map(str::trim).collect();
                if header != ["maturity_years", "zero_rate", "discount"] {
                    return Err(CirError::Parse {
                        line: lineno,
                        msg: format!(
                            "expected header 'maturity_years,zero_rate,discount', got '{line}'"
                        ),
                    });
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(CirError::Parse {
                    line: lineno,
                    msg: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| CirError::Parse {
                    line: lineno,
                    msg: format!("bad number '{s}'"),
                })
            };
            let (t, r, d) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            if ((-r * t).exp() - d).abs() > 1e-6 {
                return Err(CirError::Parse {
                    line: lineno,
                    msg: format!("discount {d} inconsistent with zero rate {r} at T = {t}"),
                });
            }
            points.push((t, r));
        }
        ZeroCurve::from_pillar_rates(&points)
    }
}

/// Annual fixed-leg payment schedule for a swap maturing at `t_n`:
/// dates counted back one year at a time from maturity, with a possible
/// short first period. Returns `(date, accrual)` pairs in ascending order.
fn fixed_leg_schedule(t_n: f64) -> Vec<(f64, f64)> {
    let n = t_n.ceil().max(1.0) as usize;
    let mut dates: Vec<f64> = (0..n).map(|j| t_n - j as f64).rev().collect();
    if dates[0] < 1e-12 {
        dates.remove(0);
    }
    let mut out = Vec::with_capacity(dates.len());
    let mut prev = 0.0;
    for d in dates {
        out.push((d, d - prev));
        prev = d;
    }
    out
}

/// Maximum pillar update across fixed-point sweeps declaring convergence.
const BOOTSTRAP_TOL: f64 = 1e-14;
const BOOTSTRAP_MAX_SWEEPS: usize = 200;
/// Repricing tolerance every instrument must meet on the final curve.
const REPRICE_TOL: f64 = 1e-10;

/// Bootstraps the zero curve from deposits and par swaps.
///
/// Deposits pin discounts directly via `D = 1/(1 + r T)`. Swap pillars are
/// solved by fixed-point sweeps: with the spline built on the current
/// pillar rates, each par equation
/// `c = (1 - D(T_n)) / sum_i tau_i D(T_i)` is re-solved for its own
/// maturity discount until the pillars stop moving. This keeps intermediate
/// fixed-leg dates consistent with the final spline even when quoted
/// maturities have gaps.
pub fn bootstrap(quotes: &QuoteSet) -> Result<ZeroCurve> {
    quotes.validate()?;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for q in &quotes.deposits {
        let d = 1.0 + q.rate * q.tenor;
        if d <= 0.0 {
            return Err(CirError::Bootstrap(format!(
                "deposit ({}, {}) implies nonpositive discount",
                q.tenor, q.rate
            )));
        }
        points.push((q.tenor, d.ln() / q.tenor));
    }
    // initial guess for swap pillars: the par rate itself
    for q in &quotes.swaps {
        points.push((q.tenor, q.rate));
    }
    let n_dep = quotes.deposits.len();

    let mut curve = ZeroCurve::from_pillar_rates(&points)?;
    if quotes.swaps.is_empty() {
        return Ok(curve);
    }
    let mut converged = false;
    for _ in 0..BOOTSTRAP_MAX_SWEEPS {
        let mut shift = 0.0f64;
        for (i, q) in quotes.swaps.iter().enumerate() {
            let schedule = fixed_leg_schedule(q.tenor);
            let (last_date, last_accrual) = *schedule.last().expect("nonempty schedule");
            debug_assert!((last_date - q.tenor).abs() < 1e-12);
            let mut annuity_butlast = 0.0;
            for &(d, accrual) in &schedule[..schedule.len() - 1] {
                annuity_butlast += accrual * curve.discount(d)?;
            }
            let den = 1.0 + q.rate * last_accrual;
            let d_n = (1.0 - q.rate * annuity_butlast) / den;
            if d_n.is_nan() || d_n <= 0.0 {
                return Err(CirError::Bootstrap(format!(
                    "swap ({}, {}) drives discount factor to {d_n}",
                    q.tenor, q.rate
                )));
            }
            if annuity_butlast + last_accrual * d_n <= 0.0 {
                return Err(CirError::Bootstrap(format!(
                    "swap ({}, {}) has nonpositive annuity",
                    q.tenor, q.rate
                )));
            }
            let r_new = -d_n.ln() / q.tenor;
            shift = shift.max((r_new - points[n_dep + i].1).abs());
            points[n_dep + i].1 = r_new;
        }
        curve = ZeroCurve::from_pillar_rates(&points)?;
        if shift < BOOTSTRAP_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CirError::Bootstrap(format!(
            "pillar fixed point did not settle within {BOOTSTRAP_MAX_SWEEPS} sweeps"
        )));
    }
    // final repricing audit
    for q in &quotes.deposits {
        let implied = (1.0 / curve.discount(q.tenor)? - 1.0) / q.tenor;
        if (implied - q.rate).abs() > REPRICE_TOL {
            return Err(CirError::Bootstrap(format!(
                "deposit {}y reprices to {implied}, quoted {}",
                q.tenor, q.rate
            )));
        }
    }
    for q in &quotes.swaps {
        let par = par_rate_on_curve(&curve, q.tenor)?;
        if (par - q.rate).abs() > REPRICE_TOL {
            return Err(CirError::Bootstrap(format!(
                "swap {}y reprices to {par}, quoted {}",
                q.tenor, q.rate
            )));
        }
    }
    Ok(curve)
}

/// Par rate of a spot-starting swap with annual fixed leg on the curve:
/// `(1 - D(T_n)) / sum tau_i D(T_i)`.
pub fn par_rate_on_curve(curve: &ZeroCurve, maturity: f64) -> Result<f64> {
    let schedule = fixed_leg_schedule(maturity);
    let mut annuity = 0.0;
    for &(d, accrual) in &schedule {
        annuity += accrual * curve.discount(d)?;
    }
    if annuity <= 0.0 {
        return Err(CirError::Bootstrap(format!(
            "nonpositive annuity {annuity} for maturity {maturity}"
        )));
    }
    Ok((1.0 - curve.discount(maturity)?) / annuity)
}

/// Synthetic instruments consistent with a flat continuously compounded
/// rate; handy for tests and demos.
pub fn flat_curve_quotes(rate: f64, deposit_tenors: &[f64], swap_maturities: &[f64]) -> QuoteSet {
    let deposits = deposit_tenors
        .iter()
        .map(|&t| Quote {
            tenor: t,
            rate: ((rate * t).exp() - 1.0) / t,
        })
        .collect();
    let swaps = swap_maturities
        .iter()
        .map(|&t| {
            let annuity: f64 = fixed_leg_schedule(t)
                .iter()
                .map(|&(d, accrual)| accrual * (-rate * d).exp())
                .sum();
            Quote {
                tenor: t,
                rate: (1.0 - (-rate * t).exp()) / annuity,
            }
        })
        .collect();
    QuoteSet {
        deposits,
        swaps,
        valuation_date: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_quote_set(rate: f64) -> QuoteSet {
        let swaps: Vec<f64> = (2..=30).map(f64::from).collect();
        flat_curve_quotes(rate, &[0.25, 0.5, 1.0], &swaps)
    }

    #[test]
    fn quote_set_validation() {
        assert!(matches!(
            QuoteSet::new(vec![], vec![]),
            Err(CirError::Validation(msg)) if msg == "no instruments"
        ));
        let unsorted = QuoteSet::new(
            vec![],
            vec![
                Quote {
                    tenor: 5.0,
                    rate: 0.01,
                },
                Quote {
                    tenor: 3.0,
                    rate: 0.01,
                },
            ],
        );
        assert!(unsorted.is_err());
    }

    #[test]
    fn load_quotes_schema() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("quotes.csv");
        std::fs::write(
            &path,
            "type,tenor_years,rate\nDEPO,0.5,-0.003\nSWAP,10,0.002\n",
        )
        .unwrap();
        let q = load_quotes(&path).unwrap();
        assert_eq!(q.deposits.len(), 1);
        assert_eq!(q.swaps.len(), 1);
        assert_eq!(q.deposits[0].rate, -0.003);

        std::fs::write(&path, "type,tenor_years,rate\n").unwrap();
        assert!(matches!(
            load_quotes(&path),
            Err(CirError::Validation(msg)) if msg == "no instruments"
        ));

        std::fs::write(
            &path,
            "type,tenor_years,rate\nSWAP,10,0.002\nSWAP,5,0.001\n",
        )
        .unwrap();
        let err = load_quotes(&path).unwrap_err();
        assert!(matches!(err, CirError::Parse { line: 3, .. }), "{err}");

        std::fs::write(&path, "type,tenor_years,rate\nBOND,10,0.002\n").unwrap();
        assert!(matches!(
            load_quotes(&path),
            Err(CirError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn single_zero_rate_deposit() {
        let q = QuoteSet::new(
            vec![Quote {
                tenor: 1.0,
                rate: 0.0,
            }],
            vec![],
        )
        .unwrap();
        let c = bootstrap(&q).unwrap();
        assert_eq!(c.discount(1.0).unwrap(), 1.0);
        assert_eq!(c.zero_rate(1.0).unwrap(), 0.0);
    }

    #[test]
    fn flat_curve_bootstrap_positive() {
        let c = bootstrap(&flat_quote_set(0.01)).unwrap();
        for p in c.pillars() {
            assert!(
                (p.zero_rate - 0.01).abs() < 1e-10,
                "pillar {}: {}",
                p.maturity,
                p.zero_rate
            );
        }
    }

    #[test]
    fn flat_curve_bootstrap_negative() {
        let c = bootstrap(&flat_quote_set(-0.005)).unwrap();
        for p in c.pillars() {
            assert!((p.zero_rate + 0.005).abs() < 1e-10);
            assert!(p.discount > 1.0); // negative rates push discounts above par
        }
    }

    #[test]
    fn gapped_swaps_still_reprice() {
        // upward-sloping generating curve, quotes only at selected maturities
        let gen_rate = |t: f64| 0.002 + 0.004 * (1.0 + t).ln();
        let deposits: Vec<Quote> = [0.5, 1.0]
            .iter()
            .map(|&t| Quote {
                tenor: t,
                rate: ((gen_rate(t) * t).exp() - 1.0) / t,
            })
            .collect();
        let swaps: Vec<Quote> = [2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0]
            .iter()
            .map(|&t| {
                let annuity: f64 = fixed_leg_schedule(t)
                    .iter()
                    .map(|&(d, a)| a * (-gen_rate(d) * d).exp())
                    .sum();
                Quote {
                    tenor: t,
                    rate: (1.0 - (-gen_rate(t) * t).exp()) / annuity,
                }
            })
            .collect();
        let q = QuoteSet {
            deposits: deposits.clone(),
            swaps: swaps.clone(),
            valuation_date: None,
        };
        let c = bootstrap(&q).unwrap();
        for quote in &deposits {
            let implied = (1.0 / c.discount(quote.tenor).unwrap() - 1.0) / quote.tenor;
            assert!((implied - quote.rate).abs() < 1e-10);
        }
        for quote in &swaps {
            let par = par_rate_on_curve(&c, quote.tenor).unwrap();
            assert!((par - quote.rate).abs() < 1e-10, "swap {}", quote.tenor);
        }
    }

    #[test]
    fn discount_basics() {
        let c = bootstrap(&flat_quote_set(0.01)).unwrap();
        assert_eq!(c.discount(0.0).unwrap(), 1.0);
        // exact at a pillar
        let p = c.pillars()[4];
        assert_eq!(c.zero_rate(p.maturity).unwrap(), p.zero_rate);
        // constants reproduced between pillars
        assert!((c.zero_rate(3.71).unwrap() - 0.01).abs() < 1e-12);
        assert!((c.zero_rate(0.1).unwrap() - 0.01).abs() < 1e-12);
        // no extrapolation
        assert!(matches!(
            c.discount(31.0),
            Err(CirError::Extrapolation { .. })
        ));
        assert!(c.zero_rate(-1.0).is_err());
    }

    #[test]
    fn forward_rate_flat_and_two_pillar() {
        let c = bootstrap(&flat_quote_set(0.01)).unwrap();
        for (t, big_t) in [(0.5, 2.0), (1.0, 10.0), (5.0, 30.0)] {
            assert!((c.forward_rate(t, big_t).unwrap() - 0.01).abs() < 1e-12);
        }
        // t -> 0 recovers the spot rate
        assert!((c.forward_rate(1e-9, 10.0).unwrap() - 0.01).abs() < 1e-9);

        let two = ZeroCurve::from_pillar_rates(&[(1.0, 0.0), (2.0, 0.01)]).unwrap();
        assert!((two.forward_rate(1.0, 2.0).unwrap() - 0.02).abs() < 1e-15);
        assert!(two.forward_rate(2.0, 1.0).is_err());
        assert!(two.forward_rate(1.0, 1.0).is_err());
    }

    #[test]
    fn forward_zcb_identity() {
        let c = bootstrap(&flat_quote_set(0.01)).unwrap();
        assert!((c.forward_zcb(1.0, 3.0).unwrap() - (-0.02f64).exp()).abs() < 1e-14);
        for (t, big_t) in [(0.5, 2.0), (2.0, 7.0), (10.0, 30.0)] {
            let lhs = c.forward_zcb(t, big_t).unwrap() * c.discount(t).unwrap();
            let rhs = c.discount(big_t).unwrap();
            assert!((lhs - rhs).abs() < 1e-14);
        }
        // price tends to 1 as the window shrinks
        assert!((c.forward_zcb(5.0, 5.0 + 1e-9).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn curve_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        let c = bootstrap(&flat_quote_set(-0.005)).unwrap();
        c.to_csv_file(&path).unwrap();
        let back = ZeroCurve::from_csv_file(&path).unwrap();
        assert_eq!(back.pillars().len(), c.pillars().len());
        for (a, b) in back.pillars().iter().zip(c.pillars()) {
            assert_eq!(a.maturity, b.maturity);
            assert_eq!(a.zero_rate, b.zero_rate);
        }
        // inconsistent discount column is rejected
        std::fs::write(&path, "maturity_years,zero_rate,discount\n1,0.01,0.5\n").unwrap();
        assert!(ZeroCurve::from_csv_file(&path).is_err());
    }

    #[test]
    fn year_fraction_convention() {
        let d0 = NaiveDate::from_ymd_opt(2019, 12, 30).unwrap();
        let d1 = NaiveDate::from_ymd_opt(2020, 12, 29).unwrap();
        assert!((year_fraction_act365f(d0, d1) - 1.0).abs() < 1e-12);
    }
}
