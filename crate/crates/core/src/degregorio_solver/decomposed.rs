//! Bump-decomposed multi-scale backend.
//!
//! Every `W_k` lives on the same local grid `ξ ∈ [-(1+3r), 1+3r]` and obeys
//! `∂_t W = vW - aV∂_ξW` with
//!
//! * `v = x_k HW_k + Σ_{m≥2} T_{k,m} ξ^m + Σ_m R_{k,m} ξ^{-m-1}`,
//! * `V = x_k ∫_0^ξ HW_k + Σ T_{k,m} ξ^{m+1}/(m+1) - Σ R_{k,m} ξ^{-m}/m`.
//!
//! The `T` series is the Taylor expansion at 0 of the outer bumps' transform,
//! built from `μ_{j,m} = -(1/π)∫W_j s^{-m-1}`; its constant term cancels
//! `ẋ_k/x_k`. The `R` series is the multipole expansion of the inner bumps
//! from `ν_{j,m} = (1/π)∫W_j s^m`, integrated from infinity using
//! `∫_0^∞ Hw_j = 0` for odd `w_j`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{log_times, DiagRecord, Reversal, RunDiagnostics, SolverConfig, Termination};
use crate::profiles::{BumpProfile, MultiBumpData};
use crate::singular_integrals::{Field1D, SmoothFunction, SpectralWorkspace};
use crate::{Error, Result};

/// `W_k` at one time, in local coordinates, with its height and scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileFrame {
    pub k: usize,
    pub height: f64,
    /// `L_k`; the bump is `x ↦ height·W(x/L_k)`.
    pub scale: f64,
    pub time: f64,
    pub w: Field1D,
}

impl ProfileFrame {
    /// `w_k(x) = x_k W_k(x/L_k)`.
    pub fn physical(&self, x: f64) -> f64 {
        self.height * self.w.interpolate_cubic(x / self.scale)
    }
}

/// Sum of all bumps of a frame set at `x`.
pub fn assemble_frames(frames: &[ProfileFrame], x: f64) -> f64 {
    frames.iter().map(|f| f.physical(x)).sum()
}

/// Output of [`solve_decomposed`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecomposedRun {
    pub r: f64,
    pub ratio: f64,
    pub a: f64,
    /// Frame sets at the log times when `keep_frames` is set.
    pub frames: Vec<Vec<ProfileFrame>>,
    pub last: Vec<ProfileFrame>,
    pub diagnostics: RunDiagnostics,
    pub termination: Termination,
}

impl DecomposedRun {
    /// `w` reassembled on a uniform grid.
    pub fn sample(frames: &[ProfileFrame], x_min: f64, x_max: f64, n: usize) -> Result<Field1D> {
        Field1D::from_fn(x_min, x_max, n, |x| assemble_frames(frames, x))
    }
}

/// Moments of one profile.
#[derive(Debug, Clone)]
pub(crate) struct Moments {
    /// `HW(0)`.
    pub hw0: f64,
    /// `μ_m` for even `m = 2, 4, …`.
    pub mu: Vec<f64>,
    /// `ν_m` for odd `m = 1, 3, …`.
    pub nu: Vec<f64>,
}

pub(crate) fn moments(grid: &Field1D, w: &[f64], hw0: f64, terms: usize) -> Moments {
    let h = grid.h();
    let half = terms / 2;
    let mut mu = vec![0.0; half];
    let mut nu = vec![0.0; half];
    for (i, &wi) in w.iter().enumerate() {
        if wi == 0.0 {
            continue;
        }
        let s = grid.x(i);
        if s == 0.0 {
            continue;
        }
        let inv2 = 1.0 / (s * s);
        let mut p = wi / (s * s * s);
        for m in mu.iter_mut() {
            *m += p;
            p *= inv2;
        }
        let s2 = s * s;
        let mut q = wi * s;
        for m in nu.iter_mut() {
            *m += q;
            q *= s2;
        }
    }
    let c = h / std::f64::consts::PI;
    mu.iter_mut().for_each(|m| *m *= -c);
    nu.iter_mut().for_each(|m| *m *= c);
    Moments { hw0, mu, nu }
}

/// `T_{k,m}` and `R_{k,m}` for all bumps from heights, scales and moments.
pub(crate) fn cross_series(heights: &[f64], scales: &[f64], mom: &[Moments]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = heights.len();
    let half = mom.first().map_or(0, |m| m.mu.len());
    let mut outer = vec![vec![0.0; half]; n];
    for k in 0..n.saturating_sub(1) {
        let rho = scales[k + 1] / scales[k];
        let rho2 = rho * rho;
        let mut p = rho2;
        for i in 0..half {
            outer[k + 1][i] = (outer[k][i] + heights[k] * mom[k].mu[i]) * p;
            p *= rho2;
        }
    }
    let mut inner = vec![vec![0.0; half]; n];
    for k in (0..n.saturating_sub(1)).rev() {
        let rho = scales[k + 1] / scales[k];
        let rho2 = rho * rho;
        let mut p = rho2;
        for i in 0..half {
            inner[k][i] = (heights[k + 1] * mom[k + 1].nu[i] + inner[k + 1][i]) * p;
            p *= rho2;
        }
    }
    (outer, inner)
}

/// `(v, V)` contributions of the outer and inner series at `ξ`.
pub(crate) fn series_at(outer: &[f64], inner: &[f64], xi: f64) -> (f64, f64) {
    let x2 = xi * xi;
    let mut v = 0.0;
    let mut big = 0.0;
    let mut p = x2;
    for (i, t) in outer.iter().enumerate() {
        let m = 2 * i + 2;
        v += t * p;
        big += t * p * xi / (m + 1) as f64;
        p *= x2;
    }
    let inv = 1.0 / xi;
    let inv2 = inv * inv;
    let mut q = inv;
    for (i, r) in inner.iter().enumerate() {
        let m = 2 * i + 1;
        // q = ξ^{-m}
        v += r * q * inv;
        big -= r * q / m as f64;
        q *= inv2;
    }
    (v, big)
}

struct Engine<'a> {
    cfg: &'a SolverConfig,
    r: f64,
    ratio: f64,
    n: usize,
    grid: Field1D,
    ws: SpectralWorkspace,
    center: usize,
    phi_d1: Vec<f64>,
    max_phi: f64,
    /// Sign relating the integrated profiles to the physical ones.
    sign: f64,
    /// Sign of `dI/dt` in integration time.
    i_sign: f64,
}

struct Eval {
    dy: Vec<f64>,
    max_v: f64,
    max_big_v: f64,
    hw0: Vec<f64>,
    derivs: Vec<Vec<f64>>,
}

impl Engine<'_> {
    fn len(&self) -> usize {
        self.grid.n_points()
    }

    fn profile<'y>(&self, y: &'y [f64], k: usize) -> &'y [f64] {
        &y[k * self.len()..(k + 1) * self.len()]
    }

    fn heights(&self, y: &[f64]) -> Vec<f64> {
        let base = (self.n + 1) * self.len();
        y[base..base + self.n + 1].iter().map(|l| l.exp()).collect()
    }

    fn scales(&self, y: &[f64]) -> Vec<f64> {
        let a = self.cfg.a;
        let base = (self.n + 1) * self.len();
        let step = self.r.ln() - a * self.ratio.ln();
        (0..=self.n).map(|k| (a * y[base + k] + k as f64 * step).exp()).collect()
    }

    fn eval(&self, y: &[f64]) -> Eval {
        let nl = self.len();
        let a = self.cfg.a;
        let terms = self.cfg.series_terms;
        let spectra: Vec<_> = (0..=self.n)
            .into_par_iter()
            .map(|k| {
                let w = self.profile(y, k);
                let out = self.ws.transform(w, true, true);
                let hw0 = out.hilbert[self.center];
                let mom = moments(&self.grid, w, hw0, terms);
                (out, mom)
            })
            .collect();
        let heights = self.heights(y);
        let scales = self.scales(y);
        let mom: Vec<Moments> = spectra.iter().map(|s| s.1.clone()).collect();
        let (outer, inner) = cross_series(&heights, &scales, &mom);
        let lo = 1.0 - 3.0 * self.r;
        let band = (1.0 - 2.0 * self.r, 1.0 + 2.0 * self.r);
        let parts: Vec<(Vec<f64>, f64, f64)> = (0..=self.n)
            .into_par_iter()
            .map(|k| {
                let w = self.profile(y, k);
                let out = &spectra[k].0;
                let d = out.derivative.as_ref().expect("derivative requested");
                let u = out.velocity.as_ref().expect("velocity requested");
                let mut dw = vec![0.0; nl];
                let (mut max_v, mut max_big) = (0.0f64, 0.0f64);
                for i in 0..nl {
                    let xi = self.grid.x(i);
                    if xi.abs() < lo {
                        continue;
                    }
                    let (sv, sbig) = series_at(&outer[k], &inner[k], xi);
                    let v = heights[k] * out.hilbert[i] + sv;
                    let big = heights[k] * u[i] + sbig;
                    dw[i] = v * w[i] - a * big * d[i];
                    if xi.abs() >= band.0 && xi.abs() <= band.1 {
                        max_v = max_v.max(v.abs());
                        max_big = max_big.max(big.abs());
                    }
                }
                (dw, max_v, max_big)
            })
            .collect();
        let mut dy = Vec::with_capacity(y.len());
        let (mut max_v, mut max_big_v) = (0.0f64, 0.0f64);
        for p in &parts {
            dy.extend_from_slice(&p.0);
            max_v = max_v.max(p.1);
            max_big_v = max_big_v.max(p.2);
        }
        let hw0: Vec<f64> = mom.iter().map(|m| m.hw0).collect();
        let mut acc = 0.0;
        for k in 0..=self.n {
            dy.push(acc);
            acc += heights[k] * hw0[k];
        }
        for k in 0..=self.n {
            dy.push(self.i_sign * heights[k]);
        }
        let derivs = spectra.into_iter().map(|s| s.0.derivative.unwrap_or_default()).collect();
        Eval { dy, max_v, max_big_v, hw0, derivs }
    }

    /// Positive-side support of a profile in local units.
    fn support(&self, w: &[f64]) -> Option<(f64, f64)> {
        let floor = self.cfg.height_floor * w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let c = self.center;
        let first = (c..w.len()).find(|&i| w[i].abs() > floor)?;
        let last = (c..w.len()).rev().find(|&i| w[i].abs() > floor)?;
        Some((self.grid.x(first), self.grid.x(last)))
    }

    fn bootstrap_violation(&self, y: &[f64]) -> Option<String> {
        let (lo, hi) = (1.0 - 2.0 * self.r, 1.0 + 2.0 * self.r);
        let floor_rel = self.cfg.height_floor;
        for k in 0..=self.n {
            let w = self.profile(y, k);
            let m = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bad = w.iter().enumerate().find(|(i, v)| {
                let xi = self.grid.x(*i).abs();
                v.abs() > floor_rel * m && (xi < lo || xi > hi)
            });
            if let Some((i, _)) = bad {
                return Some(format!(
                    "support of W_{k} reached ξ = {:.4}, outside [{lo:.3}, {hi:.3}]",
                    self.grid.x(i)
                ));
            }
        }
        None
    }

    fn frames(&self, y: &[f64], t: f64) -> Result<Vec<ProfileFrame>> {
        let heights = self.heights(y);
        let scales = self.scales(y);
        (0..=self.n)
            .map(|k| {
                let w = self.profile(y, k).iter().map(|v| self.sign * v).collect();
                Ok(ProfileFrame {
                    k,
                    height: heights[k],
                    scale: scales[k],
                    time: t,
                    w: self.grid.with_values(w)?.with_time(t),
                })
            })
            .collect()
    }

    fn record(&self, y: &[f64], t: f64, ev: &Eval) -> DiagRecord {
        let heights = self.heights(y);
        let scales = self.scales(y);
        let h = self.grid.h();
        let nl = self.len();
        let base = (self.n + 1) * (nl + 1);
        let integral = y[base..base + self.n + 1].to_vec();
        let hw_self_0: Vec<f64> = ev.hw0.iter().map(|v| self.sign * v).collect();
        let mut hw_minus_0 = Vec::with_capacity(self.n + 1);
        let mut acc = 0.0;
        for k in 0..=self.n {
            hw_minus_0.push(acc);
            acc += heights[k] * hw_self_0[k];
        }
        let energy = (0..=self.n)
            .map(|k| {
                ev.derivs[k].iter().zip(&self.phi_d1).map(|(d, p)| (self.sign * d - p).powi(2)).sum::<f64>() * h
            })
            .collect();
        let maxes: Vec<f64> =
            (0..=self.n).map(|k| self.profile(y, k).iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();
        let sup_w = (0..=self.n).map(|k| heights[k] * maxes[k]).fold(0.0, f64::max);
        let support = (0..=self.n).map(|k| self.support(self.profile(y, k)).unwrap_or((f64::NAN, f64::NAN))).collect();
        let odd_deviation = (0..=self.n)
            .map(|k| {
                let w = self.profile(y, k);
                (0..nl).map(|i| (w[i] + w[nl - 1 - i]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let gap_level = (0..self.n)
            .map(|k| {
                let lo = (1.0 + 2.0 * self.r) * scales[k + 1];
                let hi = (1.0 - 2.0 * self.r) * scales[k];
                let mut worst = 0.0f64;
                for i in 0..=64 {
                    let x = lo + (hi - lo) * i as f64 / 64.0;
                    let w: f64 = (0..=self.n)
                        .map(|j| heights[j] * interp_abs(&self.grid, self.profile(y, j), x / scales[j]))
                        .sum();
                    worst = worst.max(w);
                }
                worst / sup_w.max(f64::MIN_POSITIVE)
            })
            .collect();
        let height_proxy = (0..=self.n).map(|k| heights[k] * maxes[k] / self.max_phi).collect();
        DiagRecord {
            t,
            sup_w,
            heights,
            hw_self_0,
            hw_minus_0,
            energy,
            integral,
            support,
            gap_level,
            height_proxy,
            odd_deviation,
        }
    }
}

fn interp_abs(grid: &Field1D, w: &[f64], xi: f64) -> f64 {
    if xi < grid.x_min() || xi > grid.x_max() {
        return 0.0;
    }
    let u = (xi - grid.x_min()) / grid.h();
    let n = w.len();
    let i = (u.floor() as usize).clamp(1, n - 3);
    let s = u - i as f64;
    let (a, b, c, d) = (w[i - 1], w[i], w[i + 1], w[i + 2]);
    (-s * (s - 1.0) * (s - 2.0) / 6.0 * a + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * b
        - (s + 1.0) * s * (s - 2.0) / 2.0 * c
        + (s + 1.0) * s * (s - 1.0) / 6.0 * d)
        .abs()
}

/// Evolves multi-bump data bump by bump.
///
/// Each `W_k` starts as `φ`, with `x_k` the data's heights at `t_start`.
/// The run stops with a bootstrap termination once some `W_k` carries mass
/// outside `[1-2r, 1+2r]` in local units.
pub fn solve_decomposed(data: &MultiBumpData, cfg: &SolverConfig) -> Result<DecomposedRun> {
    cfg.validate()?;
    let r = data.r;
    let phi = &data.phi;
    let (lo, hi) = (1.0 - 2.0 * r, 1.0 + 2.0 * r);
    if phi.support_pieces().iter().any(|&(a, b)| !((a >= lo && b <= hi) || (a >= -hi && b <= -lo))) {
        return Err(Error::Precondition("φ must be supported inside ±[1-2r, 1+2r]".into()));
    }
    let reach = 1.0 + 3.0 * r;
    let half = (reach / cfg.local_h).ceil() as usize;
    let nl = 2 * half + 1;
    let innermost = 2.0 * r / cfg.local_h;
    if innermost < 32.0 {
        return Err(Error::Resolution(format!("local grid puts {innermost:.1} points across a bump; need 32")));
    }
    let grid = Field1D::zeros(-reach, reach, nl)?;
    let ws = SpectralWorkspace::for_field(&grid, 2, cfg.dealias)?;
    let phi_vals: Vec<f64> = grid.xs().iter().map(|&x| phi.value(x)).collect();
    let phi_d1: Vec<f64> = grid.xs().iter().map(|&x| phi.derivative(x, 1)).collect();
    let max_phi = phi_vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let backward_sym = cfg.direction() < 0.0 && cfg.reversal == Reversal::Symmetry;
    let (sign, run_cfg) = if backward_sym {
        (-1.0, SolverConfig { t_start: -cfg.t_start, t_end: -cfg.t_end, ..cfg.clone() })
    } else {
        (1.0, cfg.clone())
    };
    let time_of = |s: f64| if backward_sym { -s } else { s };
    let engine = Engine {
        cfg: &run_cfg,
        r,
        ratio: data.ratio,
        n: data.n,
        grid,
        ws,
        center: half,
        phi_d1,
        max_phi,
        sign,
        i_sign: if backward_sym { 1.0 } else { -1.0 },
    };

    let mut y: Vec<f64> = Vec::with_capacity((data.n + 1) * (nl + 2));
    for _ in 0..=data.n {
        y.extend(phi_vals.iter().map(|v| sign * v));
    }
    y.extend(data.heights().iter().map(|h| h.ln()));
    y.extend(std::iter::repeat_n(0.0, data.n + 1));

    let dir = run_cfg.direction();
    let marks = log_times(&run_cfg);
    let mut diag = RunDiagnostics::default();
    let mut frames = Vec::new();
    let mut t = run_cfg.t_start;
    let mut ev = engine.eval(&y);
    diag.records.push(engine.record(&y, time_of(t), &ev));
    if cfg.keep_frames {
        frames.push(engine.frames(&y, time_of(t))?);
    }
    let mut termination = Termination::Completed;
    let mut warned_energy = vec![false; data.n + 1];
    let mut warned_proxy = vec![false; data.n + 1];
    let h = engine.grid.h();
    'outer: for &mark in &marks[1..] {
        while (mark - t) * dir > 0.0 {
            let mut dt = cfg.cfl / ev.max_v.max(f64::MIN_POSITIVE);
            if cfg.a != 0.0 {
                dt = dt.min(cfg.cfl * h / (cfg.a.abs() * ev.max_big_v).max(f64::MIN_POSITIVE));
            }
            dt = dt.min(cfg.max_dt);
            let remaining = (mark - t).abs();
            if dt < cfg.min_dt && remaining > cfg.min_dt {
                termination = Termination::StepUnderflow { t: time_of(t) };
                break 'outer;
            }
            let dt = dir * if remaining <= dt * (1.0 + 1e-9) { remaining } else { dt };
            let stage = |k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
            let k2 = engine.eval(&stage(&ev.dy, 0.5 * dt)).dy;
            let k3 = engine.eval(&stage(&k2, 0.5 * dt)).dy;
            let k4 = engine.eval(&stage(&k3, dt)).dy;
            for i in 0..y.len() {
                y[i] += dt / 6.0 * (ev.dy[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t = if (mark - (t + dt)) * dir <= 0.0 { mark } else { t + dt };
            diag.steps += 1;
            if y.iter().any(|v| !v.is_finite()) {
                termination = Termination::BlowUp { t: time_of(t), sup: f64::INFINITY };
                break 'outer;
            }
            if let Some(reason) = engine.bootstrap_violation(&y) {
                ev = engine.eval(&y);
                diag.records.push(engine.record(&y, time_of(t), &ev));
                termination = Termination::Bootstrap { t: time_of(t), reason };
                break 'outer;
            }
            ev = engine.eval(&y);
        }
        let rec = engine.record(&y, time_of(t), &ev);
        for k in 0..=data.n {
            if !warned_energy[k] && rec.energy[k] > cfg.eps * cfg.eps {
                warned_energy[k] = true;
                diag.warnings.push(format!("E_{k} = {:e} exceeds ε² at t = {}", rec.energy[k], rec.t));
            }
            let rel = (rec.height_proxy[k] / rec.heights[k] - 1.0).abs();
            if !warned_proxy[k] && rel > 0.05 {
                warned_proxy[k] = true;
                diag.warnings.push(format!("height proxy of bump {k} departs from x_{k} by {:.1}% at t = {}", 100.0 * rel, rec.t));
            }
        }
        let sup = rec.sup_w;
        diag.records.push(rec);
        if cfg.keep_frames {
            frames.push(engine.frames(&y, time_of(t))?);
        }
        if sup > cfg.blowup_sup {
            termination = Termination::BlowUp { t: time_of(t), sup };
            break;
        }
    }
    let last = engine.frames(&y, time_of(t))?;
    Ok(DecomposedRun { r, ratio: data.ratio, a: cfg.a, frames, last, diagnostics: diag, termination })
}

/// Reference profile on the local grid of a frame.
pub(crate) fn phi_on(grid: &Field1D, phi: &BumpProfile, order: usize) -> Vec<f64> {
    grid.xs().iter().map(|&x| phi.derivative(x, order)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{assemble_multibump, reference_profile};
    use crate::quad;

    #[test]
    fn moments_match_quadrature() {
        let phi = reference_profile(0.2).unwrap();
        let grid = Field1D::zeros(-1.6, 1.6, 3201).unwrap();
        let w = phi_on(&grid, &phi, 0);
        let m = moments(&grid, &w, 1.0, 8);
        let pi = std::f64::consts::PI;
        let mu2 = -2.0 / pi * quad::adaptive(|s| phi.value(s) / s.powi(3), 0.6, 1.4, 1e-14).value;
        let nu3 = 2.0 / pi * quad::adaptive(|s| phi.value(s) * s.powi(3), 0.6, 1.4, 1e-14).value;
        assert!((m.mu[0] - mu2).abs() < 1e-10 * mu2.abs());
        assert!((m.nu[1] - nu3).abs() < 1e-10 * nu3.abs());
    }

    #[test]
    fn series_reproduce_direct_transforms() {
        // two bumps; compare the series with PV quadrature of the other bump
        use crate::singular_integrals::hilbert_pv;
        let r = 0.2;
        let phi = reference_profile(r).unwrap();
        let grid = Field1D::zeros(-1.6, 1.6, 3201).unwrap();
        let w = phi_on(&grid, &phi, 0);
        let m = moments(&grid, &w, 1.0, 64);
        let heights = [1.0, 1.3];
        let scales = [1.0, 0.2];
        let (outer, inner) = cross_series(&heights, &scales, &[m.clone(), m]);
        for &xi in &[0.65, 1.0, 1.35] {
            // inner bump seen from bump 0: H[1.3 φ(x/0.2)](ξ)
            let direct = heights[1] * hilbert_pv(&phi, xi / 0.2, 1e-13).value;
            let (v, _) = series_at(&outer[0], &inner[0], xi);
            assert!((v - direct).abs() < 1e-9, "inner at {xi}: {v} vs {direct}");
            // outer bump seen from bump 1, minus its value at 0
            let direct = hilbert_pv(&phi, xi * 0.2, 1e-13).value - hilbert_pv(&phi, 0.0, 1e-13).value;
            let (v, _) = series_at(&outer[1], &inner[1], xi);
            assert!((v - direct).abs() < 1e-9, "outer at {xi}: {v} vs {direct}");
        }
    }

    #[test]
    fn single_pair_matches_the_monolithic_solver() {
        use crate::degregorio_solver::solve_monolithic;
        let r = 0.2;
        let phi = reference_profile(r).unwrap();
        let data = assemble_multibump(0, 1.05, r, &phi).unwrap();
        let cfg = SolverConfig { t_end: -0.002, log_dt: 0.001, local_h: 5e-4, ..Default::default() };
        let run = solve_decomposed(&data, &cfg).unwrap();
        assert!(run.termination.is_completed(), "{:?}", run.termination);
        let recs = &run.diagnostics.records;
        for rec in recs {
            assert_eq!(rec.heights[0], 1.0);
            assert_eq!(rec.hw_minus_0[0], 0.0);
        }
        // E grows like t² from exact initial data
        let q = recs[2].energy[0] / recs[1].energy[0];
        assert!((q - 4.0).abs() < 0.05, "{q}");
        let w0 = Field1D::from_fn(-4.0, 4.0, 16001, |x| phi.value(x)).unwrap();
        let mono = solve_monolithic(&w0, &cfg).unwrap();
        let last = &mono.last;
        let diff = (0..last.n_points())
            .map(|i| (assemble_frames(&run.last, last.x(i)) - last.values()[i]).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn initial_record_is_exact() {
        let r = 0.2;
        let phi = reference_profile(r).unwrap();
        let data = assemble_multibump(2, 1.05, r, &phi).unwrap();
        let cfg = SolverConfig { t_end: -1e-3, log_dt: 1e-3, local_h: 5e-4, ..Default::default() };
        let run = solve_decomposed(&data, &cfg).unwrap();
        let rec = &run.diagnostics.records[0];
        for k in 0..=2 {
            assert!(rec.energy[k] < 1e-20, "{}", rec.energy[k]);
            assert!((rec.hw_self_0[k] - 1.0).abs() < 1e-8);
        }
    }
}
