//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).

use alloc::vec::Vec;

use crate::error::{invalid, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `xs` strictly increasing, at least two points.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(invalid("xs", "need matching abscissae and ordinates, at least two"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("xs", "abscissae must be strictly increasing"));
        }
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = alloc::vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            if a * b <= 0.0 {
                slopes[i] = 0.0;
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                slopes[i] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    /// Cubic Hermite interpolant with prescribed slopes (monotone only if the
    /// slopes are).
    pub fn hermite(xs: Vec<f64>, ys: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() != slopes.len() || xs.len() < 2 {
            return Err(invalid("xs", "need matching abscissae, ordinates and slopes, at least two"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("xs", "abscissae must be strictly increasing"));
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value at `x`; outside the table the end values are held constant.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_nodes_and_lines() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let m = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(m.eval(*x), *y);
        }
        assert!((m.eval(1.3) - 2.9).abs() < 1e-14);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.7).collect();
        let f = |x: f64| x * x * x - 2.0 * x;
        let ys = xs.iter().map(|&x| f(x)).collect();
        let ds = xs.iter().map(|&x| 3.0 * x * x - 2.0).collect();
        let h = MonotoneCubic::hermite(xs, ys, ds).unwrap();
        assert!((h.eval(2.33) - f(2.33)).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(MonotoneCubic::new(alloc::vec![0.0, 0.0], alloc::vec![1.0, 2.0]).is_err());
        assert!(MonotoneCubic::new(alloc::vec![0.0], alloc::vec![1.0]).is_err());
    }

    proptest! {
        #[test]
        fn preserves_monotone_data(steps in proptest::collection::vec(0.0f64..1.0, 3..20), probe in 0.0f64..1.0) {
            let xs: Vec<f64> = (0..steps.len()).map(|i| i as f64).collect();
            let mut acc = 0.0;
            let ys: Vec<f64> = steps.iter().map(|s| { acc += s; acc }).collect();
            let m = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
            let x0 = probe * (xs.len() - 1) as f64;
            let x1 = (x0 + 0.1).min((xs.len() - 1) as f64);
            prop_assert!(m.eval(x1) >= m.eval(x0) - 1e-12);
            let i = x0.floor() as usize;
            let j = (i + 1).min(xs.len() - 1);
            prop_assert!(m.eval(x0) >= ys[i] - 1e-12 && m.eval(x0) <= ys[j] + 1e-12);
        }
    }
}
