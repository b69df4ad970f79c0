use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Samples of a scalar field on a uniform grid `x_i = x_min + i h`,
/// endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field1D {
    x_min: f64,
    x_max: f64,
    values: Vec<f64>,
    pub time: Option<f64>,
}

impl Field1D {
    pub fn new(x_min: f64, x_max: f64, values: Vec<f64>) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::param(format!("empty interval [{x_min}, {x_max}]")));
        }
        if values.len() < 16 {
            return Err(Error::param(format!("{} samples, at least 16 required", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("sample {i} is not finite")));
        }
        Ok(Field1D { x_min, x_max, values, time: None })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(x_min: f64, x_max: f64, n: usize, f: F) -> Result<Self> {
        let h = (x_max - x_min) / (n.max(2) - 1) as f64;
        Self::new(x_min, x_max, (0..n).map(|i| f(x_min + h * i as f64)).collect())
    }

    pub fn zeros(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        Self::new(x_min, x_max, vec![0.0; n])
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    /// Same grid, new samples.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(self.x_min, self.x_max, values)?;
        out.time = self.time;
        Ok(out)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn n_points(&self) -> usize {
        self.values.len()
    }
    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.values.len() - 1) as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.h() * i as f64
    }
    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points()).map(|i| self.x(i)).collect()
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index of the node nearest to `x`, if `x` is within the grid.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let u = (x - self.x_min) / self.h();
        let i = u.round();
        (i >= 0.0 && i < self.n_points() as f64).then_some(i as usize)
    }

    /// True when the grid is symmetric about 0 with a node at 0.
    pub fn is_symmetric(&self) -> bool {
        let n = self.n_points();
        n % 2 == 1 && (self.x_min + self.x_max).abs() <= 1e-12 * self.x_max.abs()
    }

    /// `max_i |f(x_i) + f(-x_i)|` on a symmetric grid.
    pub fn odd_deviation(&self) -> Option<f64> {
        self.is_symmetric().then(|| {
            let n = self.n_points();
            (0..n).map(|i| (self.values[i] + self.values[n - 1 - i]).abs()).fold(0.0, f64::max)
        })
    }

    /// Linear interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        if x < self.x_min || x > self.x_max {
            return 0.0;
        }
        let u = (x - self.x_min) / self.h();
        let i = (u.floor() as usize).min(self.n_points() - 2);
        let w = u - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Four-point Lagrange interpolation; zero outside the grid.
    pub fn interpolate_cubic(&self, x: f64) -> f64 {
        if x < self.x_min || x > self.x_max {
            return 0.0;
        }
        let n = self.n_points();
        let u = (x - self.x_min) / self.h();
        let i = (u.floor() as usize).clamp(1, n - 3);
        let s = u - i as f64;
        let v = &self.values;
        let (a, b, c, d) = (v[i - 1], v[i], v[i + 1], v[i + 2]);
        -s * (s - 1.0) * (s - 2.0) / 6.0 * a + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * b
            - (s + 1.0) * s * (s - 2.0) / 2.0 * c
            + (s + 1.0) * s * (s - 1.0) / 6.0 * d
    }

    /// Heuristic jump detector: a sample step much larger than both
    /// neighbouring steps and not negligible against the field's size.
    pub(crate) fn jump_at(&self, i: usize) -> bool {
        let v = &self.values;
        let n = v.len();
        let scale = self.sup_norm();
        let step = |j: usize| -> Option<f64> { (j + 1 < n).then(|| (v[j + 1] - v[j]).abs()) };
        let is_jump = |j: usize| -> bool {
            let Some(d) = step(j) else { return false };
            let before = if j >= 1 { step(j - 1).unwrap_or(0.0) } else { 0.0 };
            let after = step(j + 1).unwrap_or(0.0);
            d > 1e-3 * scale && d > 10.0 * (before + after)
        };
        is_jump(i) || (i >= 1 && is_jump(i - 1))
    }

    /// CSV with columns `x,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.x(i), v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let f = Field1D::from_fn(-1.0, 1.0, 33, |x| x * x * x - 2.0 * x + 0.5).unwrap();
        for &x in &[-0.99, -0.31, 0.0, 0.517, 0.99] {
            assert!((f.interpolate_cubic(x) - (x * x * x - 2.0 * x + 0.5)).abs() < 1e-13);
        }
        assert_eq!(f.interpolate_cubic(1.5), 0.0);
    }

    #[test]
    fn rejects_small_or_nonfinite() {
        assert!(Field1D::new(0.0, 1.0, vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(Field1D::new(0.0, 1.0, v).is_err());
        assert!(Field1D::new(1.0, 1.0, vec![0.0; 16]).is_err());
    }

    #[test]
    fn grid_geometry() {
        let f = Field1D::from_fn(-1.0, 1.0, 21, |x| x).unwrap();
        assert!(f.is_symmetric());
        assert_eq!(f.nearest(0.0), Some(10));
        assert!((f.interpolate(0.25) - 0.25).abs() < 1e-15);
        assert!(f.odd_deviation().unwrap() < 1e-15);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 22);
    }
}
