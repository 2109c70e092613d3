//! Dense Levenberg-Marquardt for small least-squares problems.
//!
//! The calibration problem has 8 parameters and a few dozen residuals.
//! Steps solve the damped system `[J; sqrt(lambda) D] delta = [-r; 0]` by
//! Householder QR, which keeps the step accurate even when `J^T J` is
//! nearly rank-deficient (the phi parametrization has flat directions).
//! Jacobians come from centered finite differences; everything is
//! deterministic.

/// Outcome of one LM run.
#[derive(Debug, Clone)]
pub struct LmResult {
    pub x: Vec<f64>,
    /// Final cost `sum r_i^2`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the gradient infinity norm of the cost falls below this.
    pub gradient_tol: f64,
    /// Stop when the accepted step infinity norm falls below this.
    pub step_tol: f64,
    /// Stop when the cost itself falls below this (zero-residual fits).
    pub cost_tol: f64,
    /// Stop after three consecutive iterations whose relative cost drop
    /// stays below this (stagnation at a positive-residual minimum).
    pub ftol: f64,
    /// Stop when the total relative cost improvement over this many
    /// iterations falls below [`LmOptions::progress_tol`]; catches the
    /// asymptotic crawl toward a positive-residual valley floor.
    pub progress_window: usize,
    pub progress_tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 500,
            gradient_tol: 1e-10,
            step_tol: 1e-12,
            cost_tol: 1e-20,
            ftol: 1e-9,
            progress_window: 25,
            progress_tol: 1e-5,
        }
    }
}

const FD_STEP: f64 = 1e-7;

fn jacobian(residuals: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut jac = vec![vec![0.0; n]; m];
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = FD_STEP * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let up = residuals(&xp);
        xp[j] = x[j] - h;
        let dn = residuals(&xp);
        xp[j] = x[j];
        for i in 0..m {
            jac[i][j] = (up[i] - dn[i]) / (2.0 * h);
        }
    }
    jac
}

/// Least-squares solve of `A delta = b` for every right-hand side (rows >=
/// cols) by Householder QR. Returns `None` when a diagonal of `R` collapses.
#[allow(clippy::needless_range_loop)]
fn qr_solve(a: &mut [Vec<f64>], rhs: &mut [Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let rows = a.len();
    let cols = a[0].len();
    for k in 0..cols {
        // Householder vector for column k
        let mut norm = 0.0f64;
        for i in k..rows {
            norm = norm.hypot(a[i][k]);
        }
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            a[k][k] = alpha;
            continue;
        }
        // apply H = I - 2 v v^T / (v^T v) to the trailing block and rhs
        for j in k..cols {
            let dot: f64 = (k..rows).map(|i| v[i - k] * a[i][j]).sum();
            let s = 2.0 * dot / vnorm2;
            for i in k..rows {
                a[i][j] -= s * v[i - k];
            }
        }
        for b in rhs.iter_mut() {
            let dot: f64 = (k..rows).map(|i| v[i - k] * b[i]).sum();
            let s = 2.0 * dot / vnorm2;
            for i in k..rows {
                b[i] -= s * v[i - k];
            }
        }
    }
    // back substitution on the R factor
    let mut out = Vec::with_capacity(rhs.len());
    for b in rhs.iter() {
        let mut delta = vec![0.0; cols];
        for i in (0..cols).rev() {
            let mut s = b[i];
            for j in i + 1..cols {
                s -= a[i][j] * delta[j];
            }
            if a[i][i] == 0.0 || !a[i][i].is_finite() {
                return None;
            }
            delta[i] = s / a[i][i];
        }
        out.push(delta);
    }
    Some(out)
}

fn cost_of(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes `sum_i r_i(x)^2` starting from `x0`. `project` is applied to
/// every trial point (bound clamping), keeping iterates feasible.
pub fn minimize(
    residuals: &dyn Fn(&[f64]) -> Vec<f64>,
    project: &dyn Fn(&mut [f64]),
    x0: &[f64],
    opts: &LmOptions,
) -> LmResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x);
    let mut r = residuals(&x);
    let m = r.len();
    let mut cost = cost_of(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = cost <= opts.cost_tol;
    let mut stalled = 0usize;
    let mut cost_history: Vec<f64> = Vec::new();

    let trace = std::env::var_os("CIRDIFF_LM_TRACE").is_some();
    while iterations < opts.max_iterations && !converged {
        iterations += 1;
        cost_history.push(cost);
        if iterations > opts.progress_window {
            let then = cost_history[iterations - 1 - opts.progress_window];
            if (then - cost) / cost.max(f64::MIN_POSITIVE) < opts.progress_tol {
                converged = true;
                break;
            }
        }
        let jac = jacobian(residuals, &x, m);
        let mut g = vec![0.0; n];
        let mut col_norm2 = vec![0.0; n];
        for i in 0..m {
            for j in 0..n {
                g[j] += jac[i][j] * r[i];
                col_norm2[j] += jac[i][j] * jac[i][j];
            }
        }
        let gnorm = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if trace && (iterations % 20 == 0 || iterations <= 5) {
            eprintln!(
                "lm iter {iterations}: cost {cost:.3e} gnorm {gnorm:.3e} lambda {lambda:.1e}"
            );
        }
        if gnorm < opts.gradient_tol {
            converged = true;
            break;
        }

        let mut accepted = false;
        for _ in 0..30 {
            // augmented system [J; sqrt(lambda) D], D = sqrt(diag(J^T J))
            let mut a = Vec::with_capacity(m + n);
            let mut rhs = vec![Vec::with_capacity(m + n)];
            for i in 0..m {
                a.push(jac[i].clone());
                rhs[0].push(-r[i]);
            }
            for j in 0..n {
                let mut row = vec![0.0; n];
                row[j] = (lambda * col_norm2[j].max(1e-12)).sqrt();
                a.push(row);
                rhs[0].push(0.0);
            }
            // second right-hand side: geodesic acceleration against the
            // directional curvature of the residuals along the velocity;
            // it speeds descent along the narrow curved valleys of the
            // phi parametrization (Transtrum-Sethna correction)
            let mut a_fact = a.clone();
            let Some(velocity) = qr_solve(&mut a_fact, &mut rhs.clone()).map(|mut s| s.remove(0))
            else {
                lambda *= 10.0;
                continue;
            };
            let h = 0.1;
            let xp: Vec<f64> = x.iter().zip(&velocity).map(|(x, v)| x + h * v).collect();
            let xm: Vec<f64> = x.iter().zip(&velocity).map(|(x, v)| x - h * v).collect();
            let (rp, rm) = (residuals(&xp), residuals(&xm));
            let mut rhs_acc = vec![0.0; m + n];
            for i in 0..m {
                rhs_acc[i] = -(rp[i] - 2.0 * r[i] + rm[i]) / (h * h);
            }
            let accel = qr_solve(&mut a, &mut [rhs_acc])
                .map(|mut s| s.remove(0))
                .unwrap_or_else(|| vec![0.0; n]);
            let vnorm: f64 = velocity.iter().map(|v| v * v).sum::<f64>().sqrt();
            let anorm: f64 = accel.iter().map(|v| v * v).sum::<f64>().sqrt();
            let step: Vec<f64> = if anorm <= 0.75 * vnorm {
                velocity
                    .iter()
                    .zip(&accel)
                    .map(|(v, a)| v + 0.5 * a)
                    .collect()
            } else {
                velocity
            };
            let mut trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            project(&mut trial);
            let trial_r = residuals(&trial);
            let trial_cost = cost_of(&trial_r);
            if trial_cost.is_finite() && trial_cost < cost {
                let step_norm = trial
                    .iter()
                    .zip(&x)
                    .fold(0.0f64, |a, (t, o)| a.max((t - o).abs()));
                let rel_drop = (cost - trial_cost) / trial_cost.max(f64::MIN_POSITIVE);
                stalled = if rel_drop <= opts.ftol {
                    stalled + 1
                } else {
                    0
                };
                x = trial;
                r = trial_r;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-14);
                accepted = true;
                if step_norm < opts.step_tol || cost <= opts.cost_tol || stalled >= 3 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // no acceptable step at any damping: stationary within precision
            converged = true;
            break;
        }
    }
    LmResult {
        x,
        cost,
        iterations,
        converged,
    }
}
