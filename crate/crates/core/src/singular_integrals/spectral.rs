use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Field1D;
use crate::special::zeta;
use crate::{Error, Result};

/// FFT Hilbert transform of compactly supported samples on the whole line.
///
/// The samples are zero padded to a period `P = M h` and transformed with the
/// multiplier `-i sgn k`. That computes the periodic transform with kernel
/// `(1/P) cot(π(x-y)/P)`; the difference to the line kernel is
/// `Σ_m 2ζ(2m)(x-y)^{2m-1}/P^{2m}`, which is added back as a polynomial in `x`
/// built from moments of the data. With `|x - y| ≤ P/2` the series converges
/// geometrically and the result has no wrap-around error.
pub struct SpectralWorkspace {
    n: usize,
    m: usize,
    h: f64,
    x_min: f64,
    period: f64,
    center: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
    weight: Vec<f64>,
    /// `2ζ(2m)`, m = 1..
    zeta2: Vec<f64>,
}

/// Transforms of one field sharing a forward FFT.
#[derive(Debug, Clone)]
pub struct SpectralOutput {
    pub hilbert: Vec<f64>,
    pub derivative: Option<Vec<f64>>,
    /// `∫_0^x Hf`.
    pub velocity: Option<Vec<f64>>,
}

impl SpectralWorkspace {
    /// Workspace for `n` samples on `[x_min, x_max]`, padded by at least
    /// `pad`. With `dealias` the high wavenumbers are damped by the
    /// filter `exp(-36 (|k|/k_max)^36)`.
    pub fn new(x_min: f64, x_max: f64, n: usize, pad: usize, dealias: bool) -> Result<Self> {
        if pad < 2 {
            return Err(Error::param(format!("padding factor {pad} below 2")));
        }
        if n < 16 {
            return Err(Error::param("at least 16 samples are needed"));
        }
        let h = (x_max - x_min) / (n - 1) as f64;
        let m = (pad * n).next_power_of_two();
        let period = m as f64 * h;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let k: Vec<f64> = (0..m)
            .map(|j| {
                let j = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
                2.0 * PI * j / period
            })
            .collect();
        let weight = (0..m)
            .map(|j| {
                let a = j.min(m - j);
                if a == 0 || a == m / 2 {
                    0.0
                } else if dealias {
                    (-36.0 * (2.0 * a as f64 / m as f64).powi(36)).exp()
                } else {
                    1.0
                }
            })
            .collect();
        let ratio = (x_max - x_min) / period;
        let mut terms = 1;
        while terms < 60 && ratio.powi(2 * terms as i32) >= 1e-17 {
            terms += 1;
        }
        let zeta2 = (1..=terms).map(|j| 2.0 * zeta(2.0 * j as f64)).collect();
        Ok(SpectralWorkspace {
            n,
            m,
            h,
            x_min,
            period,
            center: 0.5 * (x_min + x_max),
            fwd,
            inv,
            k,
            weight,
            zeta2,
        })
    }

    pub fn for_field(f: &Field1D, pad: usize, dealias: bool) -> Result<Self> {
        Self::new(f.x_min(), f.x_max(), f.n_points(), pad, dealias)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn padded_len(&self) -> usize {
        self.m
    }

    /// Coefficients `c_p` with line-minus-periodic correction
    /// `(1/(πP)) Σ_p c_p s^p`, `s = (x - center)/P`.
    fn correction_coeffs(&self, v: &[f64]) -> Vec<f64> {
        let terms = self.zeta2.len();
        let deg = 2 * terms;
        let mut mu = vec![0.0; deg];
        for (j, &f) in v.iter().enumerate() {
            if f == 0.0 {
                continue;
            }
            let q = (self.x_min + self.h * j as f64 - self.center) / self.period;
            let mut p = self.h * f;
            for m in mu.iter_mut() {
                *m += p;
                p *= q;
            }
        }
        let mut c = vec![0.0; deg];
        for (mi, z) in self.zeta2.iter().enumerate() {
            let e = 2 * mi + 1;
            // (s - q)^e = Σ_l C(e, l) s^{e-l} (-q)^l
            let mut binom = 1.0;
            for l in 0..=e {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                c[e - l] += z * binom * sign * mu[l];
                binom = binom * (e - l) as f64 / (l + 1) as f64;
            }
        }
        c
    }

    fn correction_at(&self, c: &[f64], x: f64) -> f64 {
        let s = (x - self.center) / self.period;
        c.iter().rev().fold(0.0, |acc, ci| acc * s + ci) / (PI * self.period)
    }

    /// `∫ correction dx` up to a constant.
    fn correction_antiderivative(&self, c: &[f64], x: f64) -> f64 {
        let s = (x - self.center) / self.period;
        let mut acc = 0.0;
        for (p, ci) in c.iter().enumerate().rev() {
            acc = acc * s + ci / (p + 1) as f64;
        }
        acc * s / PI
    }

    pub fn hilbert(&self, v: &[f64]) -> Vec<f64> {
        self.transform(v, false, false).hilbert
    }

    pub fn transform(&self, v: &[f64], derivative: bool, velocity: bool) -> SpectralOutput {
        assert_eq!(v.len(), self.n, "sample count does not match the workspace");
        let m = self.m;
        let scale = 1.0 / m as f64;
        let mut spec: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        spec.resize(m, Complex64::new(0.0, 0.0));
        self.fwd.process(&mut spec);

        let inverse = |mult: &dyn Fn(usize) -> Complex64| -> Vec<f64> {
            let mut buf: Vec<Complex64> =
                (0..m).map(|j| if self.weight[j] != 0.0 { spec[j] * mult(j) * self.weight[j] } else { Complex64::new(0.0, 0.0) }).collect();
            self.inv.process(&mut buf);
            buf[..self.n].iter().map(|c| c.re * scale).collect()
        };

        let coeffs = self.correction_coeffs(v);
        let mut hilbert = inverse(&|j| Complex64::new(0.0, -self.k[j].signum()));
        for (i, hv) in hilbert.iter_mut().enumerate() {
            *hv += self.correction_at(&coeffs, self.x_min + self.h * i as f64);
        }
        let derivative = derivative.then(|| inverse(&|j| Complex64::new(0.0, self.k[j])));
        let velocity = velocity.then(|| {
            let mult = |j: usize| Complex64::new(-1.0 / self.k[j].abs(), 0.0);
            let mut u = inverse(&mult);
            // periodic antiderivative at x = 0 by direct synthesis
            let mut at0 = 0.0;
            for j in 0..m {
                if self.weight[j] != 0.0 {
                    let phase = Complex64::from_polar(1.0, -self.k[j] * self.x_min);
                    at0 += (spec[j] * mult(j) * phase * self.weight[j]).re;
                }
            }
            at0 *= scale;
            let base = self.correction_antiderivative(&coeffs, 0.0);
            for (i, ui) in u.iter_mut().enumerate() {
                let x = self.x_min + self.h * i as f64;
                *ui += self.correction_antiderivative(&coeffs, x) - base - at0;
            }
            u
        });
        SpectralOutput { hilbert, derivative, velocity }
    }
}

fn wraparound_warning(f: &Field1D) -> Option<String> {
    let tiny = 1e-14 * f.sup_norm();
    let v = f.values();
    let first = v.iter().position(|x| x.abs() > tiny)?;
    let last = v.iter().rposition(|x| x.abs() > tiny)?;
    let margin = (0.1 * (f.n_points() - 1) as f64) as usize;
    (first < margin || last + margin > f.n_points() - 1).then(|| {
        format!(
            "wrap-around contamination: support [{}, {}] is within 10% of the grid boundary",
            f.x(first),
            f.x(last)
        )
    })
}

/// Line Hilbert transform of a compactly supported field, with a warning
/// when the support comes within 10% of the grid boundary.
pub fn hilbert_spectral(f: &Field1D, padding_factor: usize) -> Result<(Field1D, Option<String>)> {
    let ws = SpectralWorkspace::for_field(f, padding_factor, false)?;
    let out = f.with_values(ws.hilbert(f.values()))?;
    Ok((out, wraparound_warning(f)))
}

/// Transform of samples covering exactly one period (right endpoint
/// excluded), multiplier `-i sgn k`.
pub fn hilbert_periodic(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let mut spec: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut spec);
    for (j, c) in spec.iter_mut().enumerate() {
        let a = j.min(m - j);
        *c = if a == 0 || 2 * a == m {
            Complex64::new(0.0, 0.0)
        } else if j < m - j {
            *c * Complex64::new(0.0, -1.0)
        } else {
            *c * Complex64::new(0.0, 1.0)
        };
    }
    planner.plan_fft_inverse(m).process(&mut spec);
    spec.iter().map(|c| c.re / m as f64).collect()
}

/// Velocity `u(x) = ∫_0^x Hw`, with the transform it came from.
#[derive(Debug, Clone)]
pub struct Velocity {
    pub u: Field1D,
    pub hw: Field1D,
    /// For odd `w`: the parity defect of `u` removed by symmetrisation.
    pub odd_deviation: Option<f64>,
}

/// `u` with `∂_x u = Hw`, `u(0) = 0`, from the exact spectral antiderivative.
pub fn velocity_from_w(w: &Field1D) -> Result<Velocity> {
    if !(w.x_min() <= 0.0 && w.x_max() >= 0.0) {
        return Err(Error::param("the grid must contain the origin"));
    }
    let ws = SpectralWorkspace::for_field(w, 2, false)?;
    let out = ws.transform(w.values(), false, true);
    let mut u = out.velocity.unwrap_or_default();
    let w_odd = w.odd_deviation().is_some_and(|d| d <= 1e-12 * w.sup_norm().max(f64::MIN_POSITIVE));
    let mut odd_deviation = None;
    if w_odd {
        let n = u.len();
        let dev = (0..n).map(|i| (u[i] + u[n - 1 - i]).abs()).fold(0.0, f64::max);
        let sym: Vec<f64> = (0..n).map(|i| 0.5 * (u[i] - u[n - 1 - i])).collect();
        u = sym;
        odd_deviation = Some(dev);
    }
    Ok(Velocity { u: w.with_values(u)?, hw: w.with_values(out.hilbert)?, odd_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singular_integrals::{hilbert_pv, FnSmooth, SmoothFunction};

    fn odd_gaussian() -> FnSmooth<impl Fn(f64, usize) -> f64 + Sync> {
        FnSmooth {
            f: |x: f64, order: usize| match order {
                0 => -x * (-x * x).exp(),
                _ => (2.0 * x * x - 1.0) * (-x * x).exp(),
            },
            support: vec![(-8.0, 8.0)],
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let f = Field1D::zeros(-1.0, 1.0, 65).unwrap();
        let (h, warn) = hilbert_spectral(&f, 2).unwrap();
        assert!(h.sup_norm() == 0.0);
        assert!(warn.is_none());
    }

    #[test]
    fn periodic_sine_to_minus_cosine() {
        let m = 64;
        let v: Vec<f64> = (0..m).map(|i| (3.0 * 2.0 * PI * i as f64 / m as f64).sin()).collect();
        let h = hilbert_periodic(&v);
        for (i, hv) in h.iter().enumerate() {
            let c = (3.0 * 2.0 * PI * i as f64 / m as f64).cos();
            assert!((hv + c).abs() < 1e-13);
        }
    }

    #[test]
    fn periodic_parseval_and_anti_involution() {
        let m = 128;
        let v: Vec<f64> = (0..m)
            .map(|i| {
                let x = 2.0 * PI * i as f64 / m as f64;
                (x.sin() * 2.0).exp() - (2.0 * x).cos() * 0.3
            })
            .collect();
        let mean = v.iter().sum::<f64>() / m as f64;
        let centred: Vec<f64> = v.iter().map(|x| x - mean).collect();
        let hv = hilbert_periodic(&centred);
        let n2 = |a: &[f64]| a.iter().map(|x| x * x).sum::<f64>();
        // the Nyquist mode is dropped, so compare against the band-limited part
        let hh = hilbert_periodic(&hv);
        let band: Vec<f64> = hh.iter().map(|x| -x).collect();
        assert!((n2(&hv) - n2(&band)).abs() < 1e-10 * n2(&hv));
        for (a, b) in band.iter().zip(&centred) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn line_transform_matches_quadrature() {
        let g = odd_gaussian();
        let f = Field1D::from_fn(-8.0, 8.0, 1025, |x| g.value(x)).unwrap();
        let (h, warn) = hilbert_spectral(&f, 2).unwrap();
        assert!(warn.is_none());
        for i in (0..1025).step_by(37) {
            let exact = hilbert_pv(&g, f.x(i), 1e-13).value;
            assert!((h.values()[i] - exact).abs() < 1e-11, "x = {}: {} vs {exact}", f.x(i), h.values()[i]);
        }
    }

    #[test]
    fn offcentre_support_and_boundary_warning() {
        let f = Field1D::from_fn(-3.0, 13.0, 1025, |x| (-(x - 1.0) * (x - 1.0) * 4.0).exp()).unwrap();
        let (h, warn) = hilbert_spectral(&f, 2).unwrap();
        assert!(warn.is_some());
        let g = FnSmooth {
            f: |x: f64, _| (-(x - 1.0) * (x - 1.0) * 4.0).exp(),
            support: vec![(-4.0, 6.0)],
        };
        for i in (0..1025).step_by(64) {
            let exact = hilbert_pv(&g, f.x(i), 1e-13).value;
            assert!((h.values()[i] - exact).abs() < 1e-10, "x = {}", f.x(i));
        }
    }

    #[test]
    fn velocity_of_odd_field_is_odd_and_integrates_hw() {
        let g = odd_gaussian();
        let w = Field1D::from_fn(-8.0, 8.0, 1025, |x| g.value(x)).unwrap();
        let vel = velocity_from_w(&w).unwrap();
        assert!(vel.odd_deviation.unwrap() < 1e-10);
        assert_eq!(vel.u.values()[512], 0.0);
        // u(x) = ∫_0^x Hw with Hw from quadrature
        for &i in &[600usize, 700, 900] {
            let x = w.x(i);
            let exact = crate::quad::adaptive(|s| hilbert_pv(&g, s, 1e-13).value, 0.0, x, 1e-12).value;
            assert!((vel.u.values()[i] - exact).abs() < 1e-10);
        }
    }
}
