//! Hölder seminorms of sampled data and vortex-free gap detection.

use serde::{Deserialize, Serialize};

use crate::singular_integrals::{Field1D, SmoothFunction};
use crate::{Error, Result};

/// `sup |f(x) - f(y)|/|x - y|^s` with the pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub exponent: f64,
    pub value: f64,
    pub x: f64,
    pub y: f64,
}

/// Hölder quotient over sorted samples `(x, f)`.
///
/// Candidate pairs are `(i, i + 2^m)` for every `m`, plus `(i, i + 2^m ± 1)`,
/// which is `O(N log N)` work and sees every scale of the data.
pub fn holder_seminorm(samples: &[(f64, f64)], s: f64) -> Result<HolderReport> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::param(format!("exponent {s} outside (0, 1]")));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::param("sample abscissae must increase"));
    }
    let n = samples.len();
    let mut best = HolderReport { exponent: s, value: 0.0, x: f64::NAN, y: f64::NAN };
    let mut consider = |i: usize, j: usize| {
        let (x, fx) = samples[i];
        let (y, fy) = samples[j];
        let q = (fx - fy).abs() / (y - x).powf(s);
        if q > best.value {
            best = HolderReport { exponent: s, value: q, x, y };
        }
    };
    let mut stride = 1usize;
    while stride < n {
        for i in 0..n - stride {
            consider(i, i + stride);
            if stride > 2 {
                consider(i, i + stride - 1);
                if i + stride + 1 < n {
                    consider(i, i + stride + 1);
                }
            }
        }
        stride *= 2;
    }
    Ok(best)
}

/// [`holder_seminorm`] of a grid field.
pub fn holder_of_field(f: &Field1D, s: f64) -> Result<HolderReport> {
    let samples: Vec<(f64, f64)> = (0..f.n_points()).map(|i| (f.x(i), f.values()[i])).collect();
    holder_seminorm(&samples, s)
}

/// [`holder_seminorm`] of a smooth function sampled with `per_piece` points
/// on each support piece, plus the piece endpoints.
pub fn holder_seminorm_fn(f: &dyn SmoothFunction, s: f64, per_piece: usize) -> Result<HolderReport> {
    let mut xs: Vec<f64> = f
        .support()
        .iter()
        .flat_map(|&(a, b)| (0..=per_piece).map(move |i| a + (b - a) * i as f64 / per_piece as f64))
        .collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, f.value(x))).collect();
    holder_seminorm(&samples, s)
}

/// Maximal runs of grid nodes with `|w| < floor`, as `[first, last]` node
/// abscissae.
pub fn support_gaps(w: &Field1D, floor: f64) -> Result<Vec<(f64, f64)>> {
    if !(floor > 0.0) {
        return Err(Error::param(format!("gap floor {floor} must be positive")));
    }
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, v) in w.values().iter().enumerate() {
        match (v.abs() < floor, start) {
            (true, None) => start = Some(i),
            (false, Some(j)) => {
                out.push((w.x(j), w.x(i - 1)));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(j) = start {
        out.push((w.x(j), w.x_max()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear() {
        let c: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, 3.0)).collect();
        assert_eq!(holder_seminorm(&c, 0.5).unwrap().value, 0.0);
        let l: Vec<(f64, f64)> = (0..=100).map(|i| (i as f64 / 100.0, i as f64 / 100.0)).collect();
        assert!((holder_seminorm(&l, 1.0).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_root_has_unit_half_seminorm() {
        let l: Vec<(f64, f64)> = (0..=4096).map(|i| i as f64 / 4096.0).map(|x| (x, x.sqrt())).collect();
        let rep = holder_seminorm(&l, 0.5).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-12);
        assert_eq!(rep.x, 0.0);
    }

    #[test]
    fn monotone_under_restriction() {
        let f: Vec<(f64, f64)> = (0..2000).map(|i| i as f64 / 1000.0).map(|x| (x, (7.0 * x).sin() * x)).collect();
        for s in [0.3, 0.7, 1.0] {
            let full = holder_seminorm(&f, s).unwrap().value;
            let part = holder_seminorm(&f[300..900], s).unwrap().value;
            assert!(part <= full);
        }
    }

    #[test]
    fn gaps_of_zero_field_cover_everything() {
        let z = Field1D::zeros(-1.0, 1.0, 33).unwrap();
        assert_eq!(support_gaps(&z, 1e-12).unwrap(), vec![(-1.0, 1.0)]);
        assert!(support_gaps(&z, 0.0).is_err());
    }
}
