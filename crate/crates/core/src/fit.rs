//! Least-squares line fits used by the growth and decay diagnostics.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::linear_fit;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
    pub points: usize,
}

impl LineFit {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let (intercept, slope, r2) = linear_fit(x, y)?;
        Ok(LineFit { intercept, slope, r2, points: x.len() })
    }

    /// Fit `log y` against `x`.
    pub fn semilog(x: &[f64], y: &[f64]) -> Result<Self> {
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        Self::new(x, &ly)
    }

    /// Fit `log y` against `log x`.
    pub fn loglog(x: &[f64], y: &[f64]) -> Result<Self> {
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        Self::semilog(&lx, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_exponent() {
        let x: Vec<f64> = (1..50).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|k| 3.0 * k.powf(-0.75)).collect();
        let f = LineFit::loglog(&x, &y).unwrap();
        assert!((f.slope + 0.75).abs() < 1e-12 && f.r2 > 0.999_999);
        let g = LineFit::semilog(&x, &x.iter().map(|k| 0.5f64.powf(*k)).collect::<Vec<_>>()).unwrap();
        assert!((g.slope - 0.5f64.ln()).abs() < 1e-12);
    }
}
