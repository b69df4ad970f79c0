//! Interaction coefficient families `a_{n,j}(t)` for the cascade.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How the coefficients are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffSpec {
    /// `a_{n,j} ≡ c`.
    Constant { value: f64 },
    /// Piecewise constant on `2^depth` equal cells of the time span, values
    /// uniform in `[lo, hi]`. With `shared` the values depend on `j` only.
    Random { lo: f64, hi: f64, seed: u64, depth: u32, shared: bool },
    /// Level-independent `a_j(t)` given at `times` and linearly interpolated.
    Tabulated { times: Vec<f64>, values: Vec<Vec<f64>> },
}

impl CoeffSpec {
    pub fn ones() -> Self {
        CoeffSpec::Constant { value: 1.0 }
    }
}

/// A realised coefficient family on a fixed time span.
#[derive(Debug, Clone)]
pub struct CoeffFamily {
    spec: CoeffSpec,
    n_levels: usize,
    t_min: f64,
    table: Vec<f64>,
}

impl CoeffFamily {
    pub fn new(spec: CoeffSpec, n_levels: usize, t_min: f64) -> Result<Self> {
        let mut table = Vec::new();
        match &spec {
            CoeffSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::param("non-finite coefficient"));
                }
            }
            CoeffSpec::Random { lo, hi, seed, depth, shared } => {
                if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::param(format!("coefficient band [{lo}, {hi}] is empty")));
                }
                if *depth > 16 {
                    return Err(Error::param("dyadic depth above 16"));
                }
                let cells = 1usize << depth;
                let rows = if *shared { n_levels } else { n_levels * n_levels };
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                table = (0..rows * cells).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
            }
            CoeffSpec::Tabulated { times, values } => {
                if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::param("tabulated coefficient times must increase"));
                }
                if values.len() < n_levels.saturating_sub(1) || values.iter().any(|v| v.len() != times.len()) {
                    return Err(Error::param("tabulated coefficient table has the wrong shape"));
                }
            }
        }
        Ok(CoeffFamily { spec, n_levels, t_min, table })
    }

    pub fn spec(&self) -> &CoeffSpec {
        &self.spec
    }

    /// True when `a_{n,j}` does not depend on `n`.
    pub fn is_shared(&self) -> bool {
        match &self.spec {
            CoeffSpec::Constant { .. } | CoeffSpec::Tabulated { .. } => true,
            CoeffSpec::Random { shared, .. } => *shared,
        }
    }

    /// Range of values the family can take.
    pub fn bounds(&self) -> (f64, f64) {
        match &self.spec {
            CoeffSpec::Constant { value } => (*value, *value),
            CoeffSpec::Random { .. } => {
                let lo = self.table.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = self.table.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            CoeffSpec::Tabulated { values, .. } => {
                let it = values.iter().take(self.n_levels.saturating_sub(1)).flatten();
                let lo = it.clone().cloned().fold(f64::INFINITY, f64::min);
                let hi = it.cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        }
    }

    /// Times in `(t_min, 0)` where the family may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.spec {
            CoeffSpec::Random { depth, .. } => {
                let cells = 1usize << depth;
                (1..cells).map(|i| self.t_min * (1.0 - i as f64 / cells as f64)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Index of the dyadic cell containing `t`.
    pub fn cell_of(&self, t: f64) -> usize {
        match &self.spec {
            CoeffSpec::Random { depth, .. } => {
                let cells = 1usize << depth;
                let u = (t - self.t_min) / (-self.t_min);
                ((u * cells as f64).floor() as isize).clamp(0, cells as isize - 1) as usize
            }
            _ => 0,
        }
    }

    /// `a_{n,j}` on the given cell at time `t`.
    pub fn value(&self, n: usize, j: usize, cell: usize, t: f64) -> f64 {
        match &self.spec {
            CoeffSpec::Constant { value } => *value,
            CoeffSpec::Random { depth, shared, .. } => {
                let cells = 1usize << depth;
                let row = if *shared { j } else { n * self.n_levels + j };
                self.table[row * cells + cell]
            }
            CoeffSpec::Tabulated { times, values } => interp(times, &values[j], t),
        }
    }

    /// Convenience evaluation away from breakpoints.
    pub fn eval(&self, n: usize, j: usize, t: f64) -> f64 {
        self.value(n, j, self.cell_of(t), t)
    }
}

fn interp(times: &[f64], values: &[f64], t: f64) -> f64 {
    if t <= times[0] {
        return values[0];
    }
    let last = times.len() - 1;
    if t >= times[last] {
        return values[last];
    }
    let i = times.partition_point(|&s| s <= t) - 1;
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    values[i] * (1.0 - w) + values[i + 1] * w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_family_is_reproducible_and_banded() {
        let spec = CoeffSpec::Random { lo: 1.0, hi: 1.3, seed: 7, depth: 3, shared: false };
        let a = CoeffFamily::new(spec.clone(), 5, -1.0).unwrap();
        let b = CoeffFamily::new(spec, 5, -1.0).unwrap();
        assert_eq!(a.table, b.table);
        let (lo, hi) = a.bounds();
        assert!(lo >= 1.0 && hi <= 1.3);
        assert_eq!(a.breakpoints().len(), 7);
        assert_eq!(a.cell_of(-1.0), 0);
        assert_eq!(a.cell_of(-1e-9), 7);
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let spec = CoeffSpec::Tabulated { times: vec![-1.0, 0.0], values: vec![vec![1.0, 2.0]] };
        let f = CoeffFamily::new(spec, 2, -1.0).unwrap();
        assert!((f.eval(1, 0, -0.25) - 1.75).abs() < 1e-15);
    }
}
