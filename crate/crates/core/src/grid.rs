//! Uniform position grid with trapezoid weights.
//!
//! Grid functions are stored pre-multiplied by `sqrt(w_k)`, so inner
//! products, traces and operator products become plain vector and matrix
//! algebra.

use nalgebra::DVector;

use crate::error::{Error, Result};

pub const DEFAULT_POINTS: usize = 2048;
pub const MIN_POINTS: usize = 256;
/// Margin (in pointer spreads) required beyond the outermost shift.
pub const MARGIN_SPREADS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_points: usize,
    q_min: f64,
    q_max: f64,
}

impl Grid {
    pub fn new(n_points: usize, q_min: f64, q_max: f64) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{n_points} points, need at least {MIN_POINTS}"
            )));
        }
        if !(q_max > q_min) || !q_min.is_finite() || !q_max.is_finite() {
            return Err(Error::InvalidGrid(format!("bounds [{q_min}, {q_max}]")));
        }
        Ok(Self {
            n_points,
            q_min,
            q_max,
        })
    }

    /// Symmetric grid spanning `±(max|shift| + 8 delta)`.
    pub fn covering(shifts: &[f64], delta: f64, n_points: usize) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                range: "(0, inf)",
            });
        }
        let reach = shifts.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let half = reach + MARGIN_SPREADS * delta;
        Self::new(n_points, -half, half)
    }

    /// Fails unless every shift sits at least eight spreads inside the grid.
    pub fn ensure_covers(&self, shifts: &[f64], delta: f64) -> Result<()> {
        // Relative slack so a grid built by `covering` always passes.
        let slack = 1e-12 * (self.q_max - self.q_min);
        for &shift in shifts {
            let lo = shift - MARGIN_SPREADS * delta;
            let hi = shift + MARGIN_SPREADS * delta;
            if lo < self.q_min - slack || hi > self.q_max + slack {
                return Err(Error::GridTooNarrow {
                    q_min: self.q_min,
                    q_max: self.q_max,
                    shift,
                });
            }
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> DVector<f64> {
        let h = self.spacing();
        DVector::from_fn(self.n_points, |k, _| self.q_min + h * k as f64)
    }

    pub fn weights(&self) -> DVector<f64> {
        let h = self.spacing();
        let last = self.n_points - 1;
        DVector::from_fn(self.n_points, |k, _| {
            if k == 0 || k == last {
                0.5 * h
            } else {
                h
            }
        })
    }

    /// `sqrt(w_k) f(q_k)` for a real function `f`.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> DVector<f64> {
        let q = self.points();
        let w = self.weights();
        DVector::from_fn(self.n_points, |k, _| w[k].sqrt() * f(q[k]))
    }

    /// Pointer wavefunction `phi(q - center)` with spread `delta`, weighted.
    pub fn gaussian(&self, delta: f64, center: f64) -> DVector<f64> {
        self.sample(|q| gaussian_amplitude(q - center, delta))
    }
}

/// `(2 pi delta^2)^(-1/4) exp[-q^2 / (4 delta^2)]`
pub fn gaussian_amplitude(q: f64, delta: f64) -> f64 {
    (2.0 * std::f64::consts::PI * delta * delta).powf(-0.25) * (-q * q / (4.0 * delta * delta)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_small_or_inverted_grids() {
        assert!(Grid::new(100, -1.0, 1.0).is_err());
        assert!(Grid::new(512, 1.0, -1.0).is_err());
        assert!(Grid::new(512, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn covering_grid_spans_shifts_with_margin() {
        let g = Grid::covering(&[-2.0, 3.0], 0.5, 512).unwrap();
        assert_abs_diff_eq!(g.q_max(), 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.q_min(), -7.0, epsilon = 1e-15);
        g.ensure_covers(&[-2.0, 3.0], 0.5).unwrap();
        assert!(matches!(
            g.ensure_covers(&[4.0], 0.5),
            Err(Error::GridTooNarrow { .. })
        ));
    }

    #[test]
    fn gaussian_is_normalized_with_unit_variance() {
        let g = Grid::covering(&[1.5], 1.0, 1024).unwrap();
        let phi = g.gaussian(1.0, 1.5);
        assert_abs_diff_eq!(phi.norm_squared(), 1.0, epsilon = 1e-12);
        let q = g.points();
        let mean: f64 = (0..g.n_points()).map(|k| q[k] * phi[k] * phi[k]).sum();
        let var: f64 = (0..g.n_points())
            .map(|k| (q[k] - mean).powi(2) * phi[k] * phi[k])
            .sum();
        assert_abs_diff_eq!(mean, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(var, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn weights_sum_to_length() {
        let g = Grid::new(300, -2.0, 4.0).unwrap();
        assert_abs_diff_eq!(g.weights().sum(), 6.0, epsilon = 1e-12);
    }
}
