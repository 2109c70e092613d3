//! Natural cubic spline interpolation.

use crate::error::{CirError, Result};

/// Natural cubic spline through `(x_i, y_i)` knots: second derivative zero
/// at both ends. One knot degenerates to a constant, two to a straight
/// line. Evaluation outside the knot range extends the boundary segment's
/// polynomial; range policy is the caller's business.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots (zero at both ends).
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(CirError::Validation(format!(
                "spline needs matching nonempty knots, got {} xs and {} ys",
                xs.len(),
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CirError::Validation(
                "spline knots must be strictly increasing".into(),
            ));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(CirError::Validation("spline knots must be finite".into()));
        }
        let n = xs.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives
            let rows = n - 2;
            let mut sub = vec![0.0; rows];
            let mut diag = vec![0.0; rows];
            let mut sup = vec![0.0; rows];
            let mut rhs = vec![0.0; rows];
            for i in 0..rows {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                sub[i] = h0 / 6.0;
                diag[i] = (h0 + h1) / 3.0;
                sup[i] = h1 / 6.0;
                rhs[i] = (ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0;
            }
            // Thomas algorithm
            for i in 1..rows {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[rows] = rhs[rows - 1] / diag[rows - 1];
            for i in (0..rows - 1).rev() {
                m[i + 1] = (rhs[i] - sup[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 1 {
            return self.ys[0];
        }
        // exact at knots
        if let Ok(i) = self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            return self.ys[i];
        }
        let seg = self.xs.partition_point(|&v| v < x).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let (y0, y1) = (self.ys[seg], self.ys[seg + 1]);
        let (m0, m1) = (self.m[seg], self.m[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_exactly() {
        let xs = [0.5, 1.0, 2.0, 5.0, 10.0];
        let ys = [-0.004, -0.003, 0.001, 0.004, 0.009];
        let s = CubicSpline::natural(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(ys.iter()) {
            assert_eq!(s.eval(*x), *y);
        }
    }

    #[test]
    fn reproduces_constants_everywhere() {
        let xs = [0.25, 1.0, 2.0, 7.0, 30.0];
        let ys = [0.01; 5];
        let s = CubicSpline::natural(&xs, &ys).unwrap();
        let mut t = 0.0;
        while t <= 30.0 {
            assert!((s.eval(t) - 0.01).abs() < 1e-14, "t = {t}");
            t += 0.173;
        }
    }

    #[test]
    fn reproduces_straight_lines() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.002 * x - 0.005).collect();
        let s = CubicSpline::natural(&xs, &ys).unwrap();
        for t in [0.0, 1.3, 3.9, 6.5, 8.0] {
            assert!((s.eval(t) - (0.002 * t - 0.005)).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_sizes() {
        let s = CubicSpline::natural(&[2.0], &[0.7]).unwrap();
        assert_eq!(s.eval(0.0), 0.7);
        assert_eq!(s.eval(5.0), 0.7);
        let s = CubicSpline::natural(&[1.0, 3.0], &[0.0, 1.0]).unwrap();
        assert!((s.eval(2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(CubicSpline::natural(&[], &[]).is_err());
        assert!(CubicSpline::natural(&[1.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(CubicSpline::natural(&[2.0, 1.0], &[0.0, 1.0]).is_err());
    }
}
