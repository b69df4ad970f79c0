//! The height cascade `x_k' = x_k Σ_{j<k} a_{n,j}(t) x_j` with data
//! `x_k(0) = A^k`, integrated backward in time.
//!
//! The closed form for `a ≡ 1` is `z_0 = t`, `z_{k+1} = A(e^{z_k} - 1)` with
//! `z_k(t) = ∫_0^t x_k` and `ln x_k = k ln A + Σ_{j<k} z_j`. In the source
//! derivation this sum is printed with the summand index `k`; it is read as
//! `j`, which is the only reading consistent with the recursion.

mod coeffs;
pub mod rk;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use coeffs::{CoeffFamily, CoeffSpec};
use rk::{DenseSolution, Tolerance};

use crate::quad;
use crate::{Error, Result};

/// Input to [`integrate_cascade`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CascadeParams {
    /// Height ratio `A > 1`.
    pub ratio: f64,
    pub n_levels: usize,
    pub coeff_lo: f64,
    pub coeff_hi: f64,
    pub t_min: f64,
    pub coeffs: CoeffSpec,
    /// Local error tolerance of the embedded pair.
    pub tol: f64,
    /// Output grid; `None` gives 201 equispaced times on `[t_min, 0]`.
    pub times: Option<Vec<f64>>,
    /// Interaction power `p` in `y_k' = Σ a x_j^p / A^{j(p-1)}`; 1 for the
    /// 1D cascade, 5/4 for the axisymmetric one.
    pub power: f64,
}

impl CascadeParams {
    pub fn new(ratio: f64, n_levels: usize, t_min: f64, coeffs: CoeffSpec) -> Self {
        let (lo, hi) = match &coeffs {
            CoeffSpec::Constant { value } => (*value, *value),
            CoeffSpec::Random { lo, hi, .. } => (*lo, *hi),
            CoeffSpec::Tabulated { values, .. } => {
                let lo = values.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
                let hi = values.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        };
        CascadeParams {
            ratio,
            n_levels,
            coeff_lo: lo,
            coeff_hi: hi,
            t_min,
            coeffs,
            tol: 1e-10,
            times: None,
            power: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ratio > 1.0) || !self.ratio.is_finite() {
            return Err(Error::param(format!("A = {} must exceed 1", self.ratio)));
        }
        if self.n_levels == 0 {
            return Err(Error::param("n_levels must be positive"));
        }
        if !(self.t_min < 0.0) || !self.t_min.is_finite() {
            return Err(Error::param(format!("t_min = {} must be negative", self.t_min)));
        }
        if !(self.coeff_lo <= self.coeff_hi) {
            return Err(Error::param("coeff_lo exceeds coeff_hi"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tolerance must be positive"));
        }
        if !(self.power > 0.0) {
            return Err(Error::param("interaction power must be positive"));
        }
        check_range(self.ratio, self.n_levels)
    }
}

fn check_range(ratio: f64, n_levels: usize) -> Result<()> {
    let top = (n_levels as f64 - 1.0) * ratio.ln();
    if top > 700.0 {
        return Err(Error::Sizing(format!(
            "A^{} overflows the exponent range ({} levels at A = {ratio})",
            n_levels - 1,
            n_levels
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Source {
    ClosedForm,
    Dense(DenseSolution),
}

/// Sampled cascade levels together with the means to evaluate them anywhere
/// in the integrated span.
#[derive(Debug, Clone)]
pub struct CascadeTrajectory {
    pub ratio: f64,
    pub power: f64,
    pub t_min: f64,
    /// Ascending sample times.
    pub times: Vec<f64>,
    /// `x[i][k] = x_k(times[i])`.
    pub x: Vec<Vec<f64>>,
    /// `z[i][k] = ∫_0^{times[i]} x_k` (signed, non-positive).
    pub z: Vec<Vec<f64>>,
    pub coeffs: CoeffFamily,
    source: Source,
}

impl CascadeTrajectory {
    pub fn n_levels(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    /// `ln x_k(t)`.
    pub fn y_at(&self, k: usize, t: f64) -> Result<f64> {
        match &self.source {
            Source::ClosedForm => Ok(closed_form_state(self.ratio, k + 1, t).0[k]),
            Source::Dense(d) => d.eval_component(t, k),
        }
    }

    pub fn x_at(&self, k: usize, t: f64) -> Result<f64> {
        self.y_at(k, t).map(f64::exp)
    }

    /// `z_k(t) = ∫_0^t x_k`.
    pub fn z_at(&self, k: usize, t: f64) -> Result<f64> {
        match &self.source {
            Source::ClosedForm => Ok(closed_form_state(self.ratio, k + 1, t).1[k]),
            Source::Dense(d) => d.eval_component(t, self.n_levels() + k),
        }
    }

    /// `∫_{t0}^{t1} x_k` by composite Simpson on the continuous output,
    /// split at coefficient breakpoints, certified to `tol`.
    pub fn integral(&self, k: usize, t0: f64, t1: f64, tol: f64) -> Result<quad::Estimate> {
        if t0 < self.t_min * (1.0 + 1e-12) - 1e-15 || t1 > 0.0 {
            return Err(Error::Precondition(format!(
                "integration window [{t0}, {t1}] leaves the span [{}, 0]",
                self.t_min
            )));
        }
        let t0 = t0.max(self.t_min);
        let mut pts = vec![t0];
        pts.extend(self.coeffs.breakpoints().into_iter().filter(|&b| b > t0 && b < t1));
        pts.push(t1);
        pts.sort_by(|a, b| a.total_cmp(b));
        let pieces = (pts.len() - 1) as f64;
        let mut total = quad::Estimate { value: 0.0, error: 0.0 };
        for w in pts.windows(2) {
            let failure = std::cell::RefCell::new(None);
            let est = quad::simpson_certified(
                |t| match self.x_at(k, t) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                },
                w[0],
                w[1],
                tol / pieces,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let est = est?;
            total.value += est.value;
            total.error += est.error;
        }
        Ok(total)
    }

    /// CSV with columns `t,k,x_k,y_k,z_k`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,k,x_k,y_k,z_k")?;
        for (i, t) in self.times.iter().enumerate() {
            for k in 0..self.n_levels() {
                let x = self.x[i][k];
                writeln!(w, "{},{},{},{},{}", t, k, x, x.ln(), self.z[i][k])?;
            }
        }
        Ok(())
    }
}

/// `(y_k, z_k)` for `k < n` at time `t` from the explicit recursion.
pub fn closed_form_state(ratio: f64, n: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let ln_a = ratio.ln();
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut zk = t;
    let mut sum = 0.0;
    for k in 0..n {
        y.push(k as f64 * ln_a + sum);
        z.push(zk);
        sum += zk;
        zk = ratio * zk.exp_m1();
    }
    (y, z)
}

/// Explicit solution of the cascade with `a ≡ 1`.
pub fn closed_form_cascade(ratio: f64, n_levels: usize, times: &[f64]) -> Result<CascadeTrajectory> {
    if !(ratio > 1.0) {
        return Err(Error::param(format!("A = {ratio} must exceed 1")));
    }
    if n_levels == 0 {
        return Err(Error::param("n_levels must be positive"));
    }
    check_range(ratio, n_levels)?;
    if times.iter().any(|&t| !(t <= 0.0)) {
        return Err(Error::param("closed form is evaluated at t ≤ 0"));
    }
    let mut times = times.to_vec();
    times.sort_by(|a, b| a.total_cmp(b));
    let t_min = times.first().copied().unwrap_or(0.0).min(-f64::MIN_POSITIVE);
    let mut x = Vec::with_capacity(times.len());
    let mut z = Vec::with_capacity(times.len());
    for &t in &times {
        let (yk, zk) = closed_form_state(ratio, n_levels, t);
        x.push(yk.iter().map(|v| v.exp()).collect());
        z.push(zk);
    }
    Ok(CascadeTrajectory {
        ratio,
        power: 1.0,
        t_min,
        times,
        x,
        z,
        coeffs: CoeffFamily::new(CoeffSpec::ones(), n_levels, t_min)?,
        source: Source::ClosedForm,
    })
}

/// Adaptive backward integration of the cascade in the variables `y_k = ln x_k`.
pub fn integrate_cascade(params: &CascadeParams) -> Result<CascadeTrajectory> {
    params.validate()?;
    let n = params.n_levels;
    let family = CoeffFamily::new(params.coeffs.clone(), n, params.t_min)?;
    let (lo, hi) = family.bounds();
    if n > 1 && (lo < params.coeff_lo - 1e-15 || hi > params.coeff_hi + 1e-15) {
        return Err(Error::param(format!(
            "coefficients span [{lo}, {hi}] outside the declared band [{}, {}]",
            params.coeff_lo, params.coeff_hi
        )));
    }
    let ln_a = params.ratio.ln();
    let p = params.power;
    let mut breaks = vec![0.0];
    let mut inner = family.breakpoints();
    inner.reverse();
    breaks.extend(inner);
    breaks.push(params.t_min);
    let cells: Vec<usize> = breaks.windows(2).map(|w| family.cell_of(0.5 * (w[0] + w[1]))).collect();
    let shared = family.is_shared();

    let rhs = |piece: usize, t: f64, y: &[f64], dy: &mut [f64]| {
        let cell = cells[piece];
        let weight = |j: usize| (p * y[j] - (p - 1.0) * j as f64 * ln_a).exp();
        if shared {
            let mut acc = 0.0;
            for k in 0..n {
                dy[k] = acc;
                if k + 1 < n {
                    acc += family.value(k, k, cell, t) * weight(k);
                }
            }
        } else {
            for k in 0..n {
                let mut s = 0.0;
                for j in 0..k {
                    s += family.value(k, j, cell, t) * weight(j);
                }
                dy[k] = s;
            }
        }
        for k in 0..n {
            dy[n + k] = y[k].exp();
        }
    };
    let mut y0 = vec![0.0; 2 * n];
    for (k, v) in y0.iter_mut().take(n).enumerate() {
        *v = k as f64 * ln_a;
    }
    let tol = Tolerance::uniform(params.tol);
    let (_, dense) = rk::dopri5_piecewise(rhs, &breaks, &y0, tol)?;

    let mut times = match &params.times {
        Some(t) => t.clone(),
        None => (0..=200).map(|i| params.t_min * (1.0 - i as f64 / 200.0)).collect(),
    };
    if times.iter().any(|&t| t < params.t_min || t > 0.0) {
        return Err(Error::param("requested output times leave [t_min, 0]"));
    }
    times.sort_by(|a, b| a.total_cmp(b));
    let mut x = Vec::with_capacity(times.len());
    let mut z = Vec::with_capacity(times.len());
    let mut buf = vec![0.0; 2 * n];
    for &t in &times {
        dense.eval(t, &mut buf)?;
        x.push(buf[..n].iter().map(|v| v.exp()).collect());
        z.push(buf[n..].to_vec());
    }
    Ok(CascadeTrajectory {
        ratio: params.ratio,
        power: p,
        t_min: params.t_min,
        times,
        x,
        z,
        coeffs: family,
        source: Source::Dense(dense),
    })
}

/// Smallest positive root of `a = A e^{(b-1)a}(1 - e^{-a})`.
pub fn fixed_point_a(ratio: f64, b: f64) -> Result<f64> {
    if !(ratio > 1.0) || !(b >= 1.0) {
        return Err(Error::param(format!("need A > 1 and b ≥ 1, got A = {ratio}, b = {b}")));
    }
    let g = |a: f64| ratio * ((b - 1.0) * a).exp() * (-(-a).exp_m1()) - a;
    let remark = 2.0 * (ratio - 1.0) / (1.5 - b);
    let hi = 10.0 * remark.max(1.0);
    smallest_root(g, 1e-15, hi).ok_or_else(|| {
        Error::NoFixedPoint(format!("a = A e^((b-1)a)(1-e^-a) has no root in (1e-15, {hi}] for A = {ratio}, b = {b}"))
    })
}

/// Remark bound `2(A-1)/(3/2-b)` when its hypotheses hold.
pub fn remark_bound(ratio: f64, b: f64) -> Option<f64> {
    let gap = 1.5 - b;
    if b <= 1.5 && gap * gap >= 2.0 * (b - 1.0) * (ratio - 1.0) && gap > 0.0 {
        Some(2.0 * (ratio - 1.0) / gap)
    } else {
        None
    }
}

/// First sign change of `g` on a geometric scan of `(lo, hi]`, refined by
/// bisection. Requires `g(lo) > 0`.
pub(crate) fn smallest_root<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Option<f64> {
    if !(g(lo) > 0.0) {
        return None;
    }
    let steps = 4000;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let mut a = lo;
    for _ in 0..steps {
        let b = (a * ratio).min(hi);
        if g(b) <= 0.0 {
            return Some(bisect(&g, a, b));
        }
        a = b;
    }
    None
}

/// Bisection for a root of `g` with `g(a) > 0 ≥ g(b)`.
pub(crate) fn bisect<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    if g(a).abs() < g(b).abs() {
        a
    } else {
        b
    }
}

/// Per-level outcome of an integral inequality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub integral: f64,
    pub bound: f64,
    /// Signed slack; non-negative when the inequality holds.
    pub margin: f64,
    pub quad_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntLeReport {
    pub a: f64,
    pub remark_bound: Option<f64>,
    pub remark_holds: Option<bool>,
    pub levels: Vec<LevelCheck>,
    pub pass: bool,
}

fn check_band(traj: &CascadeTrajectory, lo: f64, hi: f64) -> Result<()> {
    if traj.n_levels() < 2 {
        return Ok(());
    }
    let (l, h) = traj.coeffs.bounds();
    if l < lo - 1e-15 || h > hi + 1e-15 {
        return Err(Error::Precondition(format!(
            "coefficients span [{l}, {h}], lemma needs [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Checks `∫_{-a}^0 x_n ≤ a` at every level.
pub fn verify_int_le(traj: &CascadeTrajectory, ratio: f64, b: f64, tol: f64) -> Result<IntLeReport> {
    check_band(traj, 1.0, b)?;
    if (traj.ratio - ratio).abs() > 1e-15 * ratio || traj.power != 1.0 {
        return Err(Error::Precondition("trajectory was built for a different cascade".into()));
    }
    let a = fixed_point_a(ratio, b)?;
    let remark = remark_bound(ratio, b);
    let mut levels = Vec::with_capacity(traj.n_levels());
    for k in 0..traj.n_levels() {
        let est = traj.integral(k, -a, 0.0, tol)?;
        let margin = a - est.value;
        levels.push(LevelCheck {
            level: k,
            integral: est.value,
            bound: a,
            margin,
            quad_error: est.error,
            pass: margin >= -tol,
        });
    }
    let pass = levels.iter().all(|l| l.pass);
    Ok(IntLeReport { a, remark_bound: remark, remark_holds: remark.map(|r| a <= r), levels, pass })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntGeReport {
    pub t: f64,
    /// `A e^{(1-b)t}`.
    pub effective_ratio: f64,
    /// Recursion started from `I_0 = |t|` (used for the verdict).
    pub envelope: Vec<f64>,
    /// Recursion started from the literal `I_0 = t`, reported only.
    pub envelope_literal: Vec<f64>,
    pub levels: Vec<LevelCheck>,
    pub pass: bool,
}

/// Lower envelope `I_n(t)` and the check `∫_t^0 x_n ≥ I_n(t)`.
pub fn lower_envelope(traj: &CascadeTrajectory, ratio: f64, b: f64, t: f64, tol: f64) -> Result<IntGeReport> {
    if !(b <= 1.0) {
        return Err(Error::param(format!("lower envelope needs b ≤ 1, got {b}")));
    }
    check_band(traj, b, 1.0)?;
    if !(t <= 0.0) || t < traj.t_min {
        return Err(Error::Precondition(format!("t = {t} outside [{}, 0]", traj.t_min)));
    }
    let n = traj.n_levels();
    let eff = ratio * ((1.0 - b) * t).exp();
    let recurse = |i0: f64| {
        let mut v = Vec::with_capacity(n);
        let mut i = i0;
        for _ in 0..n {
            v.push(i);
            i = eff * (-(-i).exp_m1());
        }
        v
    };
    let envelope = recurse(t.abs());
    let envelope_literal = recurse(t);
    let mut levels = Vec::with_capacity(n);
    for (k, &bound) in envelope.iter().enumerate() {
        let est = traj.integral(k, t, 0.0, tol)?;
        let margin = est.value - bound;
        levels.push(LevelCheck {
            level: k,
            integral: est.value,
            bound,
            margin,
            quad_error: est.error,
            pass: margin >= -tol,
        });
    }
    let pass = levels.iter().all(|l| l.pass);
    Ok(IntGeReport { t, effective_ratio: eff, envelope, envelope_literal, levels, pass })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeLimit {
    pub effective_ratio: f64,
    /// Positive root of `a' = A e^{(1-b)t}(1 - e^{-a'})`, if any.
    pub a_prime: Option<f64>,
    pub iterations: usize,
    pub final_gap: f64,
    pub monotone: bool,
    pub converged: bool,
}

/// Iterates the envelope recursion from `I_0 = |t|` and checks convergence to
/// `a'` (or decay to zero when `A e^{(1-b)t} ≤ 1`).
pub fn envelope_limit(ratio: f64, b: f64, t: f64, tol: f64, max_iter: usize) -> EnvelopeLimit {
    let eff = ratio * ((1.0 - b) * t).exp();
    let a_prime = if eff > 1.0 {
        let g = |a: f64| eff * (-(-a).exp_m1()) - a;
        smallest_root(g, 1e-300_f64.max(1e-15 * (eff - 1.0)), eff)
    } else {
        None
    };
    let target = a_prime.unwrap_or(0.0);
    let mut i = t.abs();
    let mut prev_gap = (i - target).abs();
    let mut monotone = true;
    let mut iterations = 0;
    while iterations < max_iter && (i - target).abs() > tol {
        let next = eff * (-(-i).exp_m1());
        let gap = (next - target).abs();
        if gap > prev_gap * (1.0 + 1e-12) + 1e-300 {
            monotone = false;
        }
        prev_gap = gap;
        i = next;
        iterations += 1;
    }
    let final_gap = (i - target).abs();
    EnvelopeLimit { effective_ratio: eff, a_prime, iterations, final_gap, monotone, converged: final_gap <= tol }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub pairs_checked: usize,
    /// Most negative increment of `ln(x_n/x_k)` between consecutive samples.
    pub worst_increment: f64,
    pub pass: bool,
}

/// Checks that `x_n/x_k` (n > k) is non-decreasing in time.
pub fn verify_monotone_ratio(traj: &CascadeTrajectory, tol: f64) -> Result<MonotoneReport> {
    if !traj.coeffs.is_shared() {
        return Err(Error::Precondition("monotone ratio requires level-independent coefficients".into()));
    }
    let n = traj.n_levels();
    let mut worst = f64::INFINITY;
    let mut pairs = 0;
    for w in traj.x.windows(2) {
        for nn in 1..n {
            for k in 0..nn {
                let before = (w[0][nn] / w[0][k]).ln();
                let after = (w[1][nn] / w[1][k]).ln();
                worst = worst.min(after - before);
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        worst = 0.0;
    }
    Ok(MonotoneReport { pairs_checked: pairs, worst_increment: worst, pass: worst >= -tol })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderPrediction {
    pub a_prime: Option<f64>,
    /// `(a' - ln A)/(a' - ln r)`.
    pub s: Option<f64>,
    /// Root of `a_0 = A(1 - e^{-a_0})`.
    pub a0: f64,
    pub a0_exceeds_ln_a: bool,
    /// False when `a' ≤ ln A`: no positive exponent at this time.
    pub positive: bool,
}

/// Predicted Hölder exponent of the multi-bump data at time `t`.
pub fn holder_exponent_prediction(ratio: f64, r: f64, b: f64, t: f64) -> Result<HolderPrediction> {
    if !(ratio > 1.0) {
        return Err(Error::param("A must exceed 1"));
    }
    if !(r > 0.0 && r <= 0.25) {
        return Err(Error::param(format!("scale ratio r = {r} outside (0, 1/4]")));
    }
    let a0 = fixed_point_a(ratio, 1.0)?;
    let eff = ratio * ((1.0 - b) * t).exp();
    let a_prime = if eff > 1.0 {
        smallest_root(|a: f64| eff * (-(-a).exp_m1()) - a, 1e-15, eff)
    } else {
        None
    };
    let ln_a = ratio.ln();
    let s = a_prime.map(|ap| (ap - ln_a) / (ap - r.ln()));
    Ok(HolderPrediction {
        a_prime,
        s,
        a0,
        a0_exceeds_ln_a: a0 > ln_a,
        positive: s.is_some_and(|s| s > 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fixed-step RK4 on the untransformed system, used as an independent
    /// reference for the closed form.
    fn rk4_reference(ratio: f64, n: usize, t_end: f64, steps: usize) -> Vec<f64> {
        let f = |x: &[f64]| -> Vec<f64> {
            let mut acc = 0.0;
            x.iter()
                .map(|&xk| {
                    let d = xk * acc;
                    acc += xk;
                    d
                })
                .collect()
        };
        let mut x: Vec<f64> = (0..n).map(|k| ratio.powi(k as i32)).collect();
        let h = t_end / steps as f64;
        for _ in 0..steps {
            let k1 = f(&x);
            let x2: Vec<f64> = x.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
            let k2 = f(&x2);
            let x3: Vec<f64> = x.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
            let k3 = f(&x3);
            let x4: Vec<f64> = x.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
            let k4 = f(&x4);
            for i in 0..n {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        x
    }

    #[test]
    fn closed_form_trivial_levels() {
        let traj = closed_form_cascade(1.3, 6, &[-0.7, -0.2, 0.0]).unwrap();
        for row in &traj.x {
            assert_eq!(row[0], 1.0);
        }
        for k in 0..6 {
            assert!((traj.x[2][k] - 1.3f64.powi(k as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_matches_rk_reference() {
        let traj = closed_form_cascade(1.1, 15, &[-0.5]).unwrap();
        let reference = rk4_reference(1.1, 15, -0.5, 20000);
        for k in 0..15 {
            let rel = (traj.x[0][k] - reference[k]).abs() / reference[k];
            assert!(rel < 1e-8, "level {k}: rel err {rel}");
        }
    }

    #[test]
    fn closed_form_satisfies_ode_second_order() {
        let ratio = 1.2;
        let n = 8;
        let t = -0.3;
        let resid = |h: f64| {
            let (yp, _) = closed_form_state(ratio, n, t + h);
            let (ym, _) = closed_form_state(ratio, n, t - h);
            let (y, _) = closed_form_state(ratio, n, t);
            let mut worst: f64 = 0.0;
            let mut acc = 0.0;
            for k in 0..n {
                let dx = (yp[k].exp() - ym[k].exp()) / (2.0 * h);
                worst = worst.max((dx - y[k].exp() * acc).abs());
                acc += y[k].exp();
            }
            worst
        };
        let (r1, r2) = (resid(1e-2), resid(5e-3));
        assert!(r1 / r2 > 3.5 && r1 / r2 < 4.5, "ratio {}", r1 / r2);
    }

    #[test]
    fn overflow_is_a_sizing_error() {
        assert!(matches!(closed_form_cascade(2.0, 2000, &[0.0]), Err(Error::Sizing(_))));
    }

    #[test]
    fn integrate_matches_closed_form() {
        let mut p = CascadeParams::new(1.1, 15, -1.0, CoeffSpec::ones());
        p.tol = 1e-12;
        let traj = integrate_cascade(&p).unwrap();
        let exact = closed_form_cascade(1.1, 15, &traj.times).unwrap();
        for (i, row) in traj.x.iter().enumerate() {
            for k in 0..15 {
                let rel = (row[k] - exact.x[i][k]).abs() / exact.x[i][k];
                assert!(rel < 1e-9, "t={} k={k} rel={rel}", traj.times[i]);
                assert!((traj.z[i][k] - exact.z[i][k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_coefficient_is_time_rescaled_closed_form() {
        let b = 1.25;
        let p = CascadeParams::new(1.15, 10, -0.8, CoeffSpec::Constant { value: b });
        let traj = integrate_cascade(&p).unwrap();
        for (i, &t) in traj.times.iter().enumerate() {
            let (y, _) = closed_form_state(1.15, 10, b * t);
            for k in 0..10 {
                assert!((traj.x[i][k].ln() - y[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn single_level_is_constant() {
        let spec = CoeffSpec::Random { lo: 1.0, hi: 2.0, seed: 3, depth: 4, shared: false };
        let traj = integrate_cascade(&CascadeParams::new(1.5, 1, -2.0, spec)).unwrap();
        assert!(traj.x.iter().all(|row| row[0] == 1.0));
    }

    #[test]
    fn fixed_point_values() {
        let a = fixed_point_a(1.1, 1.0).unwrap();
        assert!((a - 0.194).abs() < 1e-3, "a = {a}");
        assert!((a - 1.1 * (1.0 - (-a).exp())).abs() < 1e-12);
        let tiny = fixed_point_a(1.0 + 1e-8, 1.0).unwrap();
        assert!(tiny < 1e-7);
        assert!(a <= remark_bound(1.1, 1.0).unwrap());
    }

    #[test]
    fn int_le_equality_at_level_zero_and_proof_recursion() {
        let b = 1.0;
        let ratio = 1.05;
        let a = fixed_point_a(ratio, b).unwrap();
        let traj = closed_form_cascade(ratio, 6, &[-a, 0.0]).unwrap();
        let rep = verify_int_le(&traj, ratio, b, 1e-10).unwrap();
        assert!(rep.pass);
        assert!((rep.levels[0].integral - a).abs() < 1e-10);
        // with a ≡ 1 the integral is -z_n(-a), which equals the proof's Z_n = a
        for l in &rep.levels {
            assert!((l.integral - a).abs() < 1e-9, "level {} integral {}", l.level, l.integral);
        }
    }

    #[test]
    fn int_le_rejects_out_of_band_coefficients() {
        let traj = integrate_cascade(&CascadeParams::new(1.05, 4, -0.5, CoeffSpec::Constant { value: 0.9 })).unwrap();
        assert!(matches!(verify_int_le(&traj, 1.05, 1.2, 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn envelope_limits_follow_the_remark() {
        let up = envelope_limit(1.1, 0.9, -0.3, 1e-10, 1_000_000);
        assert!(up.converged && up.monotone && up.a_prime.is_some());
        let down = envelope_limit(1.01, 0.5, -0.5, 1e-10, 1_000_000);
        assert!(down.effective_ratio <= 1.0);
        assert!(down.converged && down.monotone && down.a_prime.is_none());
    }

    #[test]
    fn monotone_ratio_constant_coefficients() {
        let traj = closed_form_cascade(1.2, 8, &(0..=50).map(|i| -0.02 * i as f64).collect::<Vec<_>>()).unwrap();
        assert!(verify_monotone_ratio(&traj, 1e-10).unwrap().pass);
    }

    #[test]
    fn holder_prediction_limits() {
        let p = holder_exponent_prediction(1.05, 0.2, 1.0, -0.1).unwrap();
        assert!(p.a0_exceeds_ln_a);
        assert!(p.positive);
        let near = holder_exponent_prediction(1.0 + 1e-9, 0.2, 1.0, -0.1).unwrap();
        assert!(near.s.unwrap().abs() < 1e-8);
    }

    #[test]
    fn csv_export_shape() {
        let traj = closed_form_cascade(1.1, 3, &[-0.1, 0.0]).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 3);
        assert!(text.starts_with("t,k,x_k,y_k,z_k\n"));
    }
}
