//! Sums of rescaled profiles `Σ x_k φ(A^k x/(x_k r^k))`.

use serde::{Deserialize, Serialize};

use super::BumpProfile;
use crate::singular_integrals::{Field1D, SmoothFunction};
use crate::{Error, Result};

/// Multi-bump data with per-bump heights; at time 0 the heights are `A^k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiBumpData {
    pub n: usize,
    pub ratio: f64,
    pub r: f64,
    pub phi: BumpProfile,
    heights: Vec<f64>,
}

/// `w(x, 0) = Σ_{k=0}^n A^k φ(x/r^k)`.
pub fn assemble_multibump(n: usize, ratio: f64, r: f64, phi: &BumpProfile) -> Result<MultiBumpData> {
    if !(ratio > 1.0 && ratio < 2.0) {
        return Err(Error::param(format!("A = {ratio} outside (1, 2)")));
    }
    let heights = (0..=n).map(|k| ratio.powi(k as i32)).collect();
    MultiBumpData::with_heights(ratio, r, phi, heights)
}

impl MultiBumpData {
    /// Bumps `x_k φ(A^k x/(x_k r^k))` for given heights `x_0, …, x_n`.
    pub fn with_heights(ratio: f64, r: f64, phi: &BumpProfile, heights: Vec<f64>) -> Result<Self> {
        if !(r > 0.0 && r <= 0.25) {
            return Err(Error::param(format!("r = {r} outside (0, 1/4]")));
        }
        if heights.is_empty() || heights.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::param("heights must be positive and finite"));
        }
        let data = MultiBumpData { n: heights.len() - 1, ratio, r, phi: phi.clone(), heights };
        let mut pieces = data.positive_supports();
        pieces.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
        if pieces.windows(2).any(|w| w[1].1 .0 <= w[0].1 .1) {
            return Err(Error::Precondition("bump supports overlap".into()));
        }
        Ok(data)
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Spatial scale of bump `k`: `x_k r^k/A^k`.
    pub fn scale(&self, k: usize) -> f64 {
        self.heights[k] * (self.r / self.ratio).powi(k as i32)
    }

    /// `(k, [a, b])` for the positive support piece of each bump.
    pub fn positive_supports(&self) -> Vec<(usize, (f64, f64))> {
        let base: Vec<(f64, f64)> = self.phi.support_pieces().into_iter().filter(|p| p.0 >= 0.0).collect();
        (0..=self.n)
            .flat_map(|k| {
                let s = self.scale(k);
                base.iter().map(move |&(a, b)| (k, (a * s, b * s)))
            })
            .collect()
    }

    /// Intervals between the positive supports of bumps `k + 1` and `k`.
    pub fn gaps(&self) -> Vec<(usize, (f64, f64))> {
        let sup = self.positive_supports();
        (0..self.n)
            .map(|k| {
                let inner = sup.iter().filter(|p| p.0 == k + 1).map(|p| p.1 .1).fold(f64::NEG_INFINITY, f64::max);
                let outer = sup.iter().filter(|p| p.0 == k).map(|p| p.1 .0).fold(f64::INFINITY, f64::min);
                (k, (inner, outer))
            })
            .collect()
    }

    /// Contribution of bump `k` alone.
    pub fn bump_derivative(&self, k: usize, x: f64, order: usize) -> f64 {
        let s = self.scale(k);
        self.heights[k] * self.phi.derivative(x / s, order) / s.powi(order as i32)
    }

    /// Samples on a uniform grid, refusing one that puts fewer than 32 points
    /// across the innermost support.
    pub fn sample(&self, x_min: f64, x_max: f64, n_points: usize) -> Result<Field1D> {
        let h = (x_max - x_min) / (n_points.max(2) - 1) as f64;
        let (_, (a, b)) = self.positive_supports().into_iter().find(|p| p.0 == self.n).expect("bump n exists");
        if (b - a) / h < 32.0 {
            return Err(Error::Resolution(format!(
                "innermost support [{a:e}, {b:e}] gets {:.1} points at h = {h:e}; need 32",
                (b - a) / h
            )));
        }
        Field1D::from_fn(x_min, x_max, n_points, |x| self.value(x))
    }
}

impl SmoothFunction for MultiBumpData {
    fn derivative(&self, x: f64, order: usize) -> f64 {
        (0..=self.n).map(|k| self.bump_derivative(k, x, order)).sum()
    }

    fn support(&self) -> Vec<(f64, f64)> {
        (0..=self.n)
            .flat_map(|k| {
                let s = self.scale(k);
                self.phi.support_pieces().into_iter().map(move |(a, b)| (a * s, b * s))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::reference_profile;

    #[test]
    fn single_pair_at_n_zero() {
        let phi = reference_profile(0.25).unwrap();
        let w = assemble_multibump(0, 1.5, 0.25, &phi).unwrap();
        assert_eq!(w.support().len(), 2);
        assert_eq!(w.value(1.1), phi.value(1.1));
        assert!(w.gaps().is_empty());
    }

    #[test]
    fn gaps_match_interval_formula() {
        let r = 0.25;
        let phi = reference_profile(r).unwrap();
        let w = assemble_multibump(6, 1.3, r, &phi).unwrap();
        for (k, (lo, hi)) in w.gaps() {
            let elo = (1.0 + r) * r.powi(k as i32 + 1);
            let ehi = (1.0 - r) * r.powi(k as i32);
            assert!((lo - elo).abs() < 1e-15 && (hi - ehi).abs() < 1e-15);
            assert!(lo < hi);
        }
    }

    #[test]
    fn resolution_guard() {
        let phi = reference_profile(0.2).unwrap();
        let w = assemble_multibump(4, 1.2, 0.2, &phi).unwrap();
        assert!(matches!(w.sample(-1.3, 1.3, 4097), Err(Error::Resolution(_))));
    }
}
